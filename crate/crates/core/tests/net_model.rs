//! Nets of quadrics: discriminant equivariance, the (c, g) family labels and JSON.

mod common;

use common::{int_net, invertible};
use num_rational::BigRational;
use proptest::prelude::*;
use quadnet::atlas::orbit_table;
use quadnet::linalg::{det3_surd, transpose3};
use quadnet::net::{abc_discriminant_formula, abc_family, abc_orbit_label, equal_up_to_unit, net_discriminant};
use quadnet::NetOfQuadrics;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discriminant_under_source_change(n in int_net(3), m in invertible()) {
        let d = det3_surd(&m);
        prop_assert_eq!(net_discriminant(&n.compose(&m)), net_discriminant(&n).scale(&(&d * &d)));
    }

    #[test]
    fn discriminant_under_target_change(n in int_net(3), a in invertible()) {
        prop_assert_eq!(net_discriminant(&n.mix(&a)), net_discriminant(&n).compose_linear(&transpose3(&a)));
    }

    #[test]
    fn discriminant_under_both(n in int_net(2), m in invertible(), a in invertible()) {
        let g = n.compose(&m).mix(&a);
        let pulled = net_discriminant(&n).compose_linear(&transpose3(&a));
        prop_assert!(net_discriminant(&g).is_zero() == pulled.is_zero());
        prop_assert!(pulled.is_zero() || equal_up_to_unit(&net_discriminant(&g), &pulled));
    }

    #[test]
    fn json_round_trip(n in int_net(5)) {
        let back = NetOfQuadrics::from_json(&n.to_json()).unwrap();
        prop_assert_eq!(&back, &n);
        let text = serde_json::to_string(&n).unwrap();
        prop_assert_eq!(serde_json::from_str::<NetOfQuadrics>(&text).unwrap(), n);
    }

    /// Scaling (c, g) by (t², t) with t > 0 keeps every sign in c, g and c + 9g².
    #[test]
    fn family_labels_are_constant_on_cells(cn in -40i64..=40, gn in -8i64..=8, t in 1i64..=5, u in 1i64..=5) {
        let (c, g) = (q(cn, 4), q(gn, 2));
        let (c2, g2) = (&c * &q(t * t, u * u), &g * &q(t, u));
        prop_assert_eq!(abc_orbit_label(&c, &g), abc_orbit_label(&c2, &g2));
    }
}

#[test]
fn atlas_discriminants_recompute() {
    for r in orbit_table().unwrap() {
        let d = net_discriminant(&r.net());
        assert!(if r.discriminant.is_zero() { d.is_zero() } else { equal_up_to_unit(&d, &r.discriminant) }, "{}", r.name);
    }
}

#[test]
fn family_cells_match_the_atlas_representatives() {
    for r in orbit_table().unwrap() {
        if let quadnet::atlas::NormalForm::Family { c, g } = &r.normal_form {
            assert_eq!(abc_orbit_label(c, g), r.name, "{}", r.name);
            assert_eq!(abc_family(c, g), r.net());
        }
    }
    for (c, g) in [(q(-2, 1), q(1, 1)), (q(7, 3), q(-1, 2)), (q(0, 1), q(0, 1))] {
        assert!(equal_up_to_unit(&net_discriminant(&abc_family(&c, &g)), &abc_discriminant_formula(&c, &g)));
    }
}
