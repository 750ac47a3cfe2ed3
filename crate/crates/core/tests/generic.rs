//! Generic constraints: p ∘ T = ρ, the equivalence of classifications and the (c, g) grid.

mod common;

use common::int_net;
use num_rational::BigRational;
use proptest::prelude::*;
use quadnet::classifier::LocusKind;
use quadnet::determinantal::ConstraintQuadric;
use quadnet::generic::{abc_grid, abc_region, check_equivalence, generic_census, generic_transform, random_generic_transform, CensusMode, GenericError, GenericTransform};
use quadnet::linalg::from_ints3;
use quadnet::QuadraticTernaryForm;
use rand::SeedableRng;

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pulled_back_constraint_is_the_sphere(seed in any::<u64>()) {
        let t = random_generic_transform(&mut rng(seed));
        prop_assert_eq!(t.pulled_back_constraint(), QuadraticTernaryForm::sphere());
        let again = generic_transform(&t.p).unwrap();
        prop_assert_eq!(again.pulled_back_constraint(), QuadraticTernaryForm::sphere());
    }

    #[test]
    fn classification_commutes_with_the_transform(n in int_net(2), seed in any::<u64>()) {
        let t = random_generic_transform(&mut rng(seed));
        match check_equivalence(&n, &t, 0) {
            Ok(_) => {}
            Err(GenericError::EquivalenceBroken(a, b)) => prop_assert!(false, "{:?} vs {:?}", a, b),
            Err(_) => {}
        }
    }
}

#[test]
fn surd_factorizations() {
    // Diagonal 2, 3, 5 needs √2, √3, √5.
    let p = ConstraintQuadric::generic(QuadraticTernaryForm::from_ints([2, 0, 3, 0, 0, 5])).unwrap();
    let t = generic_transform(&p).unwrap();
    assert_eq!(t.pulled_back_constraint(), QuadraticTernaryForm::sphere());
    assert!(t.t[0][0].to_string().contains("sqrt(2)"));
    let l = from_ints3([[2, 0, 0], [1, 3, 0], [-1, 4, 1]]);
    let t = GenericTransform::from_factor(&l).unwrap();
    assert_eq!(generic_transform(&t.p).unwrap().t, t.t);
    assert!(ConstraintQuadric::generic(QuadraticTernaryForm::from_ints([1, 0, -1, 0, 0, 1])).is_err());
}

#[test]
fn small_grid_matches_predictions() {
    let r = abc_grid(9, 0);
    assert!(r.checked > 20, "{}", r.checked);
    assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    let q = |n: i64| BigRational::from_integer(n.into());
    assert_eq!(abc_region(&q(-2), &q(1)).predicted_real_solution_count, 6);
    assert_eq!(abc_region(&q(-2), &q(0)).predicted_real_solution_count, 2);
}

#[test]
fn census_of_rigid_rows() {
    let h = generic_census("H", 3, 0, CensusMode::Regular).unwrap();
    assert_eq!(h.observed.keys().collect::<Vec<_>>(), [LocusKind::Type6.name()]);
    let i = generic_census("I*", 3, 0, CensusMode::Regular).unwrap();
    assert_eq!(i.observed.keys().collect::<Vec<_>>(), [LocusKind::Ellipsoid.name()]);
    let i = generic_census("I", 3, 0, CensusMode::Singular).unwrap();
    assert_eq!(i.observed.keys().collect::<Vec<_>>(), ["Ellipse"]);
    let f = generic_census("F_a", 4, 0, CensusMode::Regular).unwrap();
    assert!(f.observed.keys().all(|k| k == "RomanSteiner" || k == "CrossCapSurface"), "{:?}", f.observed);
}
