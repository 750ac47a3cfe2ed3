#![allow(dead_code)]

use proptest::prelude::*;
use quadnet::atlas::orbit_table;
use quadnet::linalg::{det3_surd, from_ints3, identity3, inverse3, matmul3, Mat3};
use quadnet::solver::VarietyDecomposition;
use quadnet::{NetOfQuadrics, QuadraticTernaryForm, Surd};

pub fn net(qs: [&str; 3]) -> NetOfQuadrics {
    NetOfQuadrics::parse(qs).unwrap()
}

pub fn int_net(range: i64) -> impl Strategy<Value = NetOfQuadrics> {
    prop::array::uniform3(prop::array::uniform6(-range..=range))
        .prop_map(|cs| NetOfQuadrics::new(QuadraticTernaryForm::from_ints(cs[0]), QuadraticTernaryForm::from_ints(cs[1]), QuadraticTernaryForm::from_ints(cs[2])))
}

pub fn invertible() -> impl Strategy<Value = Mat3> {
    prop::array::uniform3(prop::array::uniform3(-2i64..=2)).prop_map(from_ints3).prop_filter("singular", |m| !det3_surd(m).is_zero())
}

/// Rational rotation (I − S)(I + S)⁻¹ for the skew matrix of (a, b, c).
pub fn cayley(a: i64, b: i64, c: i64) -> Mat3 {
    let s = from_ints3([[0, -c, b], [c, 0, -a], [-b, a, 0]]);
    let i = identity3();
    let minus: Mat3 = std::array::from_fn(|r| std::array::from_fn(|k| &i[r][k] - &s[r][k]));
    let plus: Mat3 = std::array::from_fn(|r| std::array::from_fn(|k| &i[r][k] + &s[r][k]));
    matmul3(&minus, &inverse3(&plus).expect("1 + a² + b² + c² > 0"))
}

pub fn orthogonal() -> impl Strategy<Value = Mat3> {
    (-3i64..=3, -3i64..=3, -3i64..=3).prop_map(|(a, b, c)| cayley(a, b, c))
}

/// Atlas normal forms, stored generic forms and the worked nets.
pub fn corpus() -> Vec<(String, NetOfQuadrics)> {
    let mut out = Vec::new();
    for r in orbit_table().unwrap() {
        out.push((r.name.clone(), r.net()));
        for g in &r.generic_forms {
            out.push((format!("{} {}", r.name, g.label.name()), g.net.clone()));
        }
    }
    for qs in [
        ["2*x*y", "2*x*z", "z^2"],
        ["x^2", "2*x*y", "y^2 + 2*x*z"],
        ["x^2", "2*x*y", "y^2"],
        ["x^2", "2*x*z", "z^2"],
        ["x*y", "x*z", "y*z"],
        ["x^2/2 - y^2/2", "x*z", "y*z"],
        ["x^2 + y*z", "y^2 + x*z", "z^2 + x*y"],
    ] {
        out.push((qs.join(", "), net(qs)));
    }
    out
}

/// Sorted multiplicities with complex pairs listed twice.
pub fn weights(d: &VarietyDecomposition) -> Vec<u32> {
    let mut w: Vec<u32> = d.lines.iter().flat_map(|l| std::iter::repeat(l.multiplicity).take((l.weight() / l.multiplicity) as usize)).collect();
    w.sort();
    w
}

pub fn mat_f64(m: &Mat3) -> [[f64; 3]; 3] {
    m.clone().map(|r| r.map(|c| c.to_f64()))
}

pub fn s(n: i64) -> Surd {
    Surd::from_int(n)
}
