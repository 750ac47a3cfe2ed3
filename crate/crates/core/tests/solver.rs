//! Line decompositions: conservation of number, invariance and plane independence of multiplicities.

mod common;

use common::{corpus, int_net, invertible, mat_f64, orthogonal, weights};
use proptest::prelude::*;
use quadnet::determinantal::{cubic_system, ConstraintQuadric};
use quadnet::geometry::line_angle;
use quadnet::solver::{decompose, multiplicity_on_plane, Reality, VarietyDecomposition};
use quadnet::{NetOfQuadrics, Surd};

fn check_counts(d: &VarietyDecomposition) -> Result<(), String> {
    if d.zero_dimensional && d.total_multiplicity != 6 {
        return Err(format!("total {}", d.total_multiplicity));
    }
    if d.lines.iter().any(|l| l.reality == Reality::ComplexPair && l.multiplicity == 2) {
        return Err("complex double line".into());
    }
    if d.zero_dimensional && d.lines.iter().map(|l| l.weight()).sum::<u32>() != d.total_multiplicity {
        return Err("weights do not add up".into());
    }
    Ok(())
}

#[test]
fn conservation_of_number_on_the_corpus() {
    let mut zero_dimensional = 0;
    for (name, n) in corpus() {
        for c in [ConstraintQuadric::sphere(), ConstraintQuadric::cylinder()] {
            let Ok(d) = decompose(&cubic_system(&n, &c).unwrap(), 0) else { continue };
            check_counts(&d).unwrap_or_else(|e| panic!("{name} {:?}: {e}", c.kind));
            zero_dimensional += d.zero_dimensional as usize;
        }
    }
    assert!(zero_dimensional >= 40, "{zero_dimensional}");
}

fn mat_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|j| m[i][j] * v[j]).sum())
}

/// Real lines of Q ∘ R, mapped by R, are the real lines of Q.
fn same_lines(a: &VarietyDecomposition, b: &VarietyDecomposition, r: &[[f64; 3]; 3]) -> bool {
    let ua: Vec<[f64; 3]> = a.real_lines().filter_map(|l| l.unit_vector()).collect();
    let ub: Vec<[f64; 3]> = b.real_lines().filter_map(|l| l.unit_vector()).map(|u| mat_vec(r, u)).collect();
    ua.len() == ub.len() && ub.iter().all(|u| ua.iter().any(|v| line_angle(*u, *v) < 1e-6))
}

fn sphere(n: &NetOfQuadrics) -> Option<VarietyDecomposition> {
    decompose(&cubic_system(n, &ConstraintQuadric::sphere()).unwrap(), 0).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conservation_of_number_on_random_nets(n in int_net(3)) {
        if let Some(d) = sphere(&n) {
            prop_assert!(check_counts(&d).is_ok(), "{:?}", d.census());
        }
    }

    #[test]
    fn orthogonal_and_target_changes_move_the_lines(n in int_net(2), r in orthogonal(), a in invertible()) {
        let (Some(x), Some(y)) = (sphere(&n), sphere(&n.compose(&r).mix(&a))) else {
            prop_assert!(sphere(&n).is_none() && sphere(&n.compose(&r).mix(&a)).is_none());
            return Ok(());
        };
        prop_assert_eq!(x.census(), y.census());
        prop_assert_eq!(weights(&x), weights(&y));
        prop_assert_eq!(x.planes.len(), y.planes.len());
        prop_assert!(same_lines(&x, &y, &mat_f64(&r)));
    }

    #[test]
    fn multiplicity_does_not_depend_on_the_plane(n in int_net(2), normal in prop::array::uniform3(-3i64..=3)) {
        let sys = cubic_system(&n, &ConstraintQuadric::sphere()).unwrap();
        let Ok(d) = decompose(&sys, 0) else { return Ok(()) };
        let normal = normal.map(Surd::from_int);
        for l in &d.lines {
            let z = l.direction_complex();
            let dot: num_complex::Complex64 = (0..3).map(|i| z[i] * normal[i].to_f64()).sum();
            let scale = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if dot.norm() < 1e-3 * scale {
                continue;
            }
            prop_assert_eq!(multiplicity_on_plane(&sys, &l.line(), &normal).unwrap(), l.multiplicity, "{:?}", l.direction);
        }
    }
}

#[test]
fn worked_line_sets() {
    let d = sphere(&common::net(["x*y", "x*z", "y*z"])).unwrap();
    let mut dirs: Vec<String> = d.lines.iter().map(|l| quadnet::solver::format_direction(&l.direction)).collect();
    dirs.sort();
    assert_eq!(dirs, ["(-1, 0, 1)", "(-1, 1, 0)", "(0, -1, 1)", "(0, 1, 1)", "(1, 0, 1)", "(1, 1, 0)"]);
    assert!(d.lines.iter().all(|l| l.multiplicity == 1 && l.direction.iter().all(|c| c.is_exact())));
}
