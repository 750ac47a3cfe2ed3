//! Generic constraint transforms, the A/B/C region analysis and batch
//! verification of the orbit tables.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::atlas::{lookup, orbit_table, regular_row_to_singular, AtlasError, OrbitRecord};
use crate::classifier::{classify_regular, classify_with, ClassifyError, LocusKind, SingularCensus};
use crate::determinantal::{cubic_system, ConstraintQuadric, DeterminantalError};
use crate::linalg::{from_ints3, identity3, inverse3, matmul3, transpose3, Mat3};
use crate::net::{abc_family, abc_is_general, abc_orbit_label, NetOfQuadrics, QuadraticTernaryForm};
use crate::projection::{is_asymptotic, project_along, ProjectionError, TangentDirection};
use crate::solver::decompose;
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenericError {
    #[error(transparent)]
    Constraint(#[from] DeterminantalError),
    #[error("square root of {0} leaves the supported surd field")]
    NotSurdExact(String),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("classification changed under the generic transform: {0:?} with the constraint, {1:?} after composing")]
    EquivalenceBroken(LocusKind, LocusKind),
    #[error("table violation in orbit {}: {} observed", .0.orbit, .0.observed)]
    TableViolation(Box<Witness>),
}

/// T with p ∘ T = x² + y² + z², so the net on {p = 1} is Q ∘ T on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericTransform {
    pub p: ConstraintQuadric,
    pub t: Mat3,
}

/// T = L⁻¹ for the factorization S = LᵀL of the matrix of p, L lower triangular with positive diagonal.
pub fn generic_transform(p: &ConstraintQuadric) -> Result<GenericTransform, GenericError> {
    if !p.form.is_positive_definite() {
        return Err(DeterminantalError::NotPositiveDefinite.into());
    }
    let s = p.form.sym_matrix();
    let sqrt = |x: &Surd| x.sqrt().ok_or_else(|| GenericError::NotSurdExact(x.to_string()));
    let div = |a: &Surd, b: &Surd| a * &b.inv().expect("positive pivot");
    let l33 = sqrt(&s[2][2])?;
    let l32 = div(&s[1][2], &l33);
    let l31 = div(&s[0][2], &l33);
    let l22 = sqrt(&(&s[1][1] - &(&l32 * &l32)))?;
    let l21 = div(&(&s[0][1] - &(&l31 * &l32)), &l22);
    let l11 = sqrt(&(&(&s[0][0] - &(&l21 * &l21)) - &(&l31 * &l31)))?;
    let z = Surd::zero;
    let l = [[l11, z(), z()], [l21, l22, z()], [l31, l32, l33]];
    let t = inverse3(&l).expect("triangular with nonzero diagonal");
    Ok(GenericTransform { p: p.clone(), t })
}

impl GenericTransform {
    pub fn identity() -> GenericTransform {
        GenericTransform { p: ConstraintQuadric::sphere(), t: identity3() }
    }

    /// The transform for the constraint p(x) = |L·x|².
    pub fn from_factor(l: &Mat3) -> Option<GenericTransform> {
        let t = inverse3(l)?;
        let form = QuadraticTernaryForm::from_sym_matrix(&matmul3(&transpose3(l), l));
        Some(GenericTransform { p: ConstraintQuadric::generic(form).ok()?, t })
    }

    /// p ∘ T, which equals the round sphere form.
    pub fn pulled_back_constraint(&self) -> QuadraticTernaryForm {
        self.p.form.compose_linear(&self.t)
    }
}

pub fn apply_generic(net: &NetOfQuadrics, t: &GenericTransform) -> NetOfQuadrics {
    net.compose(&t.t)
}

/// classify(net, p) against classify(net ∘ T, sphere).
pub fn check_equivalence(net: &NetOfQuadrics, t: &GenericTransform, seed: u64) -> Result<LocusKind, GenericError> {
    let a = classify_with(net, &t.p, seed)?.kind;
    let b = classify_regular(&apply_generic(net, t), seed)?.kind;
    if a != b {
        return Err(GenericError::EquivalenceBroken(a, b));
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ABCRegionReport {
    #[serde(serialize_with = "ser_q")]
    pub c: BigRational,
    #[serde(serialize_with = "ser_q")]
    pub g: BigRational,
    pub orbit: String,
    #[serde(serialize_with = "ser_q")]
    pub sigma: BigRational,
    /// c² + 2c + 1 + 36g² + 12g + 12gc − 4c, as commonly printed.
    #[serde(serialize_with = "ser_q")]
    pub delta_xi: BigRational,
    /// Discriminant of ξ times (3g − 1)², equal to (c + 6g − 1)².
    #[serde(serialize_with = "ser_q")]
    pub delta_xi_factored: BigRational,
    pub xi: Option<String>,
    pub predicted_real_solution_count: u32,
    pub boundary: bool,
}

fn ser_q<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

pub fn abc_region(c: &BigRational, g: &BigRational) -> ABCRegionReport {
    let q = |n: i64| BigRational::from_integer(n.into());
    let one = BigRational::one();
    let three_g_1 = q(3) * g - &one;
    let sigma = (c + &one) * &three_g_1;
    let delta_xi = c * c + q(2) * c + &one + q(36) * g * g + q(12) * g + q(12) * g * c - q(4) * c;
    let f = c + q(6) * g - &one;
    let delta_xi_factored = &f * &f;
    let xi = (!three_g_1.is_zero()).then(|| {
        let a = (c + &one) / &three_g_1;
        let b = (q(3) * g + c) / &three_g_1;
        format!("x^2 + ({a})*x*z - ({b})*z^2")
    });
    let (predicted, boundary) = if sigma.is_negative() {
        (if delta_xi_factored.is_zero() { 4 } else { 6 }, delta_xi_factored.is_zero())
    } else if sigma.is_positive() {
        (2, false)
    } else if *c == -&one {
        (6, true)
    } else {
        (4, true)
    };
    ABCRegionReport {
        c: c.clone(),
        g: g.clone(),
        orbit: abc_orbit_label(c, g).to_string(),
        sigma,
        delta_xi,
        delta_xi_factored,
        xi,
        predicted_real_solution_count: predicted,
        boundary,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridMismatch {
    pub c: String,
    pub g: String,
    pub predicted: u32,
    pub observed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ABCGridReport {
    pub width: usize,
    pub checked: usize,
    pub excluded: usize,
    pub mismatches: Vec<GridMismatch>,
}

/// Compares predicted and observed real-line counts on a width×width grid over (g, c) ∈ [−2, 2]².
pub fn abc_grid(width: usize, seed: u64) -> ABCGridReport {
    let q = |n: i64| BigRational::from_integer(n.into());
    let step = |i: usize| q(-2) + BigRational::new((4 * i as i64).into(), ((width.max(2) - 1) as i64).into());
    let (mut checked, mut excluded, mut mismatches) = (0, 0, Vec::new());
    for i in 0..width {
        for j in 0..width {
            let (g, c) = (step(i), step(j));
            let r = abc_region(&c, &g);
            if r.sigma.is_zero() || r.delta_xi.is_zero() || r.delta_xi_factored.is_zero() || !abc_is_general(&c, &g) || r.boundary {
                excluded += 1;
                continue;
            }
            checked += 1;
            let sys = cubic_system(&abc_family(&c, &g), &ConstraintQuadric::sphere()).expect("sphere");
            let observed = decompose(&sys, seed).ok().map(|d| d.real_count());
            if observed != Some(r.predicted_real_solution_count as usize) {
                mismatches.push(GridMismatch { c: c.to_string(), g: g.to_string(), predicted: r.predicted_real_solution_count, observed });
            }
        }
    }
    ABCGridReport { width, checked, excluded, mismatches }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    Regular,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub orbit: String,
    pub trial: usize,
    pub constraint: String,
    pub transform: Vec<Vec<String>>,
    pub direction: Option<String>,
    pub observed: String,
    pub allowed: Vec<String>,
    /// The same kind is observed again under every nearby perturbed constraint, so the
    /// violation holds on an open set rather than at a coincidence.
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub orbit: String,
    pub mode: CensusMode,
    pub trials: usize,
    pub observed: BTreeMap<String, usize>,
    pub violations: Vec<Witness>,
    pub errors: Vec<String>,
}

fn random_factor(rng: &mut ChaCha8Rng) -> Mat3 {
    let mut m = [[0i64; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = match i.cmp(&j) {
                std::cmp::Ordering::Equal => rng.gen_range(1..=99),
                std::cmp::Ordering::Greater => rng.gen_range(-99..=99),
                std::cmp::Ordering::Less => 0,
            };
        }
    }
    from_ints3(m)
}

/// Seeded lower-triangular integer factor L and the transform T = L⁻¹ of p = |L·x|².
pub fn random_generic_transform(rng: &mut ChaCha8Rng) -> GenericTransform {
    GenericTransform::from_factor(&random_factor(rng)).expect("unit-free triangular factor")
}

const PYTHAGOREAN: [[i64; 4]; 6] = [[1, 2, 2, 3], [2, 3, 6, 7], [1, 4, 8, 9], [2, 6, 9, 11], [3, 4, 12, 13], [0, 3, 4, 5]];

/// Rational unit directions in random order, with random signs and coordinate order.
pub fn candidate_directions(rng: &mut ChaCha8Rng) -> Vec<TangentDirection> {
    let mut base = PYTHAGOREAN;
    base.shuffle(rng);
    base.iter()
        .map(|&[a, b, c, d]| {
            let mut v = [a, b, c];
            v.shuffle(rng);
            let v = v.map(|x| if rng.gen_bool(0.5) { -x } else { x });
            TangentDirection::new(v.map(|x| Surd::from_frac(x, d))).expect("unit by construction")
        })
        .collect()
}

/// First non-asymptotic candidate, or (0, 0, 1) when every candidate is asymptotic.
pub fn pick_projection_direction(net: &NetOfQuadrics, rng: &mut ChaCha8Rng) -> TangentDirection {
    candidate_directions(rng)
        .into_iter()
        .find(|v| !is_asymptotic(net, v))
        .unwrap_or_else(|| TangentDirection::new([Surd::zero(), Surd::zero(), Surd::one()]).expect("unit"))
}

fn mat_strings(m: &Mat3) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect()
}

/// Singular-mode census of a net: projected along a seeded direction, or along (0, 0, 1)
/// for orbit I, where every direction is asymptotic.
pub fn singular_census_of(net: &NetOfQuadrics, along_pole: bool, rng: &mut ChaCha8Rng, seed: u64) -> Result<(SingularCensus, TangentDirection), GenericError> {
    let v = if along_pole {
        TangentDirection::new([Surd::zero(), Surd::zero(), Surd::one()]).expect("unit")
    } else {
        pick_projection_direction(net, rng)
    };
    let r = project_along(net, &v, seed)?;
    Ok((r.singular_report.census(), v))
}

const PERTURBATIONS: usize = 2;

/// L + E/1009 for a small random lower-triangular integer E.
fn perturbed(gt: &GenericTransform, rng: &mut ChaCha8Rng) -> GenericTransform {
    let l = inverse3(&gt.t).expect("invertible transform");
    let e: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| if j <= i { Surd::from_frac(rng.gen_range(-9..=9), 1009) } else { Surd::zero() }));
    let l2: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| &l[i][j] + &e[i][j]));
    GenericTransform::from_factor(&l2).expect("diagonal stays positive")
}

fn observe(net: &NetOfQuadrics, mode: CensusMode, direction: Option<&TangentDirection>, seed: u64) -> Option<String> {
    match mode {
        CensusMode::Regular => classify_regular(net, seed).ok().map(|c| c.kind.name().to_string()),
        CensusMode::Singular => {
            let v = direction?;
            if is_asymptotic(net, v) {
                return None;
            }
            project_along(net, v, seed).ok().map(|r| r.singular_report.census().name().to_string())
        }
    }
}

fn is_stable(net: &NetOfQuadrics, gt: &GenericTransform, mode: CensusMode, direction: Option<&TangentDirection>, kind: &str, rng: &mut ChaCha8Rng, seed: u64) -> bool {
    (0..PERTURBATIONS).all(|_| observe(&apply_generic(net, &perturbed(gt, rng)), mode, direction, seed).as_deref() == Some(kind))
}

/// Census without failing on violations; see [`generic_census`].
pub fn run_census(record: &OrbitRecord, trials: usize, seed: u64, mode: CensusMode) -> CensusReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fxhash(&record.name));
    let net = record.net();
    let mut observed = BTreeMap::new();
    let (mut violations, mut errors) = (Vec::new(), Vec::new());
    for trial in 0..trials {
        let gt = random_generic_transform(&mut rng);
        let composed = apply_generic(&net, &gt);
        let outcome: Result<(String, bool, Option<TangentDirection>), GenericError> = match mode {
            CensusMode::Regular => classify_regular(&composed, seed).map_err(Into::into).map(|c| (c.kind.name().to_string(), record.regular.contains(&c.kind), None)),
            CensusMode::Singular => singular_census_of(&composed, record.name == "I", &mut rng, seed)
                .map(|(k, v)| (k.name().to_string(), record.singular.contains(&k), Some(v))),
        };
        match outcome {
            Ok((kind, ok, direction)) => {
                *observed.entry(kind.clone()).or_insert(0) += 1;
                if !ok {
                    let allowed = match mode {
                        CensusMode::Regular => record.regular.iter().map(|k| k.name().to_string()).collect(),
                        CensusMode::Singular => record.singular.iter().map(|k| k.name().to_string()).collect(),
                    };
                    let mut prng = ChaCha8Rng::seed_from_u64(seed ^ fxhash(&record.name) ^ ((trial as u64 + 1) << 32));
                    let stable = is_stable(&net, &gt, mode, direction.as_ref(), &kind, &mut prng, seed);
                    violations.push(Witness {
                        orbit: record.name.clone(),
                        trial,
                        constraint: gt.p.form.to_string(),
                        transform: mat_strings(&gt.t),
                        direction: direction.map(|v| v.to_string()),
                        observed: kind,
                        allowed,
                        stable,
                    });
                }
            }
            Err(e) => errors.push(format!("trial {trial}: {e}")),
        }
    }
    CensusReport { orbit: record.name.clone(), mode, trials, observed, violations, errors }
}

/// Kinds observed over seeded generic constraints; a kind outside the orbit's row is a TableViolation.
pub fn generic_census(orbit: &str, trials: usize, seed: u64, mode: CensusMode) -> Result<CensusReport, GenericError> {
    let report = run_census(lookup(orbit)?, trials, seed, mode);
    match report.violations.first() {
        Some(w) => Err(GenericError::TableViolation(Box::new(w.clone()))),
        None => Ok(report),
    }
}

fn fxhash(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericFormCheck {
    pub orbit: String,
    pub label: String,
    pub observed: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TablesReport {
    pub mode: CensusMode,
    pub seed: u64,
    pub trials: usize,
    pub generic_forms: Vec<GenericFormCheck>,
    pub census: Vec<CensusReport>,
    pub abc_grid: Option<ABCGridReport>,
}

impl TablesReport {
    pub fn violations(&self) -> usize {
        self.generic_forms.iter().filter(|c| !c.ok).count()
            + self.census.iter().map(|c| c.violations.len()).sum::<usize>()
            + self.abc_grid.as_ref().map_or(0, |g| g.mismatches.len())
    }
}

/// Classifies every stored generic form and runs the census of every orbit; orbits run on separate threads.
pub fn verify_tables(mode: CensusMode, seed: u64, trials: usize, grid: Option<usize>) -> Result<TablesReport, GenericError> {
    let table = orbit_table()?;
    let rows: Vec<(Vec<GenericFormCheck>, CensusReport)> = std::thread::scope(|s| {
        let handles: Vec<_> = table.iter().map(|r| s.spawn(move || (check_generic_forms(r, mode, seed), run_census(r, trials, seed, mode)))).collect();
        handles.into_iter().map(|h| h.join().expect("census thread")).collect()
    });
    let (forms, census): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let abc = grid.filter(|_| mode == CensusMode::Regular).map(|w| abc_grid(w, seed));
    Ok(TablesReport { mode, seed, trials, generic_forms: forms.into_iter().flatten().collect(), census, abc_grid: abc })
}

/// Each stored generic form against its label; in singular mode the projected census is compared with the paired row.
pub fn check_generic_forms(record: &OrbitRecord, mode: CensusMode, seed: u64) -> Vec<GenericFormCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fxhash(&record.name) ^ 1);
    record
        .generic_forms
        .iter()
        .map(|f| {
            let (observed, ok) = match mode {
                CensusMode::Regular => match classify_regular(&f.net, seed) {
                    Ok(c) => (c.kind.name().to_string(), c.kind == f.label),
                    Err(e) => (format!("error: {e}"), false),
                },
                CensusMode::Singular => match singular_census_of(&f.net, record.name == "I", &mut rng, seed) {
                    Ok((k, _)) => (k.name().to_string(), Some(k) == regular_row_to_singular(f.label)),
                    Err(e) => (format!("error: {e}"), false),
                },
            };
            GenericFormCheck { orbit: record.name.clone(), label: f.label.name().to_string(), observed, ok }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn transform_of_worked_constraint() {
        let p = ConstraintQuadric::generic(QuadraticTernaryForm::parse("x^2 + 4*y^2 + (x + z)^2").unwrap()).unwrap();
        let t = generic_transform(&p).unwrap();
        assert_eq!(t.t, [[Surd::one(), Surd::zero(), Surd::zero()], [Surd::zero(), Surd::from_frac(1, 2), Surd::zero()], [-Surd::one(), Surd::zero(), Surd::one()]]);
        assert_eq!(t.pulled_back_constraint(), QuadraticTernaryForm::sphere());
        let fa = NetOfQuadrics::parse(["x^2 + y^2", "2*x*y", "2*y*z"]).unwrap();
        assert_eq!(apply_generic(&fa, &t), NetOfQuadrics::parse(["x^2 + y^2/4", "x*y", "y*(z - x)"]).unwrap());
        assert_eq!(check_equivalence(&fa, &t, 0).unwrap(), LocusKind::RomanSteiner);
    }

    #[test]
    fn identity_and_diagonal_transforms() {
        let t = generic_transform(&ConstraintQuadric::sphere()).unwrap();
        assert_eq!(t.t, identity3());
        let p = ConstraintQuadric::generic(QuadraticTernaryForm::parse("2*x^2 + 3*y^2 + 5*z^2").unwrap()).unwrap();
        let t = generic_transform(&p).unwrap();
        assert_eq!(t.pulled_back_constraint(), QuadraticTernaryForm::sphere());
        let r = |n: i64| Surd::sqrt_rational(&BigRational::new(1.into(), n.into())).unwrap();
        assert_eq!(t.t[0][0], r(2));
        assert_eq!(t.t[2][2], r(5));
        let bad = ConstraintQuadric { kind: crate::determinantal::ConstraintKind::Generic, form: QuadraticTernaryForm::parse("x^2 - y^2 + z^2").unwrap() };
        assert!(matches!(generic_transform(&bad), Err(GenericError::Constraint(_))));
    }

    #[test]
    fn cross_cap_generic_form_of_dc_star() {
        let n = NetOfQuadrics::parse(["x*z/3", "2*y*z/3", "x^2/4 + y^2 + z^2/9"]).unwrap();
        assert_eq!(classify_regular(&n, 0).unwrap().kind, LocusKind::CrossCapSurface);
    }

    #[test]
    fn region_spot_values() {
        let r = abc_region(&q(-2), &q(1));
        assert_eq!((r.sigma.clone(), r.delta_xi.clone(), r.predicted_real_solution_count), (q(-2), q(33), 6));
        assert_eq!(r.orbit, "A_c");
        let r = abc_region(&q(-2), &q(0));
        assert_eq!((r.sigma.clone(), r.predicted_real_solution_count), (q(1), 2));
        let r = abc_region(&q(1), &q(0));
        assert_eq!((r.sigma.clone(), r.delta_xi.clone(), r.predicted_real_solution_count), (q(-2), q(0), 4));
        assert!(r.boundary);
        assert_eq!(abc_region(&q(-1), &q(1)).predicted_real_solution_count, 6);
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(abc_region(&q(2), &third).predicted_real_solution_count, 4);
    }

    #[test]
    fn xi_discriminant_is_a_square() {
        // disc of x² + a·x·z − b·z², scaled by (3g − 1)², against the factored field.
        for (c, g) in [(-2, 1), (3, -2), (5, 2), (-7, -1)] {
            let r = abc_region(&q(c), &q(g));
            let k = q(3 * g - 1);
            let a = q(c + 1) / &k;
            let b = q(3 * g + c) / &k;
            let disc = (&a * &a + q(4) * &b) * &k * &k;
            assert_eq!(disc, r.delta_xi_factored, "({c},{g})");
            assert_eq!(parse_poly(r.xi.as_deref().unwrap()).unwrap().coeff([2, 0, 0]), Surd::one());
        }
    }

    #[test]
    fn census_rows_for_small_orbits() {
        let h = generic_census("H", 4, 1, CensusMode::Regular).unwrap();
        assert_eq!(h.observed.keys().collect::<Vec<_>>(), vec!["Type6"]);
        let i = generic_census("I*", 4, 1, CensusMode::Regular).unwrap();
        assert_eq!(i.observed.keys().collect::<Vec<_>>(), vec!["Ellipsoid"]);
        let i = generic_census("I", 4, 1, CensusMode::Singular).unwrap();
        assert_eq!(i.observed.keys().collect::<Vec<_>>(), vec!["Ellipse"]);
    }
}
