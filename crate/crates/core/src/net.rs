//! Nets of quadrics, their Monge-form jets, discriminants, and the A/B/C family.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::expr::{parse_poly, parse_scalar, ParseError};
use crate::poly::{det3, TernaryPoly, Var};
use crate::surd::Surd;

/// Monomial order of the stored coefficients.
pub const QUADRATIC_MONOMIALS: [[u32; 3]; 6] = [[2, 0, 0], [1, 1, 0], [0, 2, 0], [1, 0, 1], [0, 1, 1], [0, 0, 2]];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("{field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("{0}: not a homogeneous quadratic form")]
    NotQuadratic(String),
    #[error("{0}: expected six coefficients [xx, xy, yy, xz, yz, zz] or a polynomial string")]
    Shape(String),
    #[error("missing field {0}")]
    Missing(String),
}

/// c_xx·x² + c_xy·xy + c_yy·y² + c_xz·xz + c_yz·yz + c_zz·z², stored as written.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticTernaryForm {
    pub coeffs: [Surd; 6],
}

impl QuadraticTernaryForm {
    pub fn zero() -> QuadraticTernaryForm {
        QuadraticTernaryForm { coeffs: std::array::from_fn(|_| Surd::zero()) }
    }

    pub fn from_ints(c: [i64; 6]) -> QuadraticTernaryForm {
        QuadraticTernaryForm { coeffs: c.map(Surd::from_int) }
    }

    pub fn from_poly(p: &TernaryPoly) -> Option<QuadraticTernaryForm> {
        if !p.is_zero() && p.homogeneous_degree() != Some(2) {
            return None;
        }
        Some(QuadraticTernaryForm { coeffs: QUADRATIC_MONOMIALS.map(|e| p.coeff(e)) })
    }

    pub fn parse(s: &str) -> Result<QuadraticTernaryForm, NetError> {
        let p = parse_poly(s).map_err(|e| NetError::Parse { field: s.to_string(), source: e })?;
        QuadraticTernaryForm::from_poly(&p).ok_or_else(|| NetError::NotQuadratic(s.to_string()))
    }

    pub fn sphere() -> QuadraticTernaryForm {
        QuadraticTernaryForm::from_ints([1, 0, 1, 0, 0, 1])
    }

    pub fn cylinder() -> QuadraticTernaryForm {
        QuadraticTernaryForm::from_ints([1, 0, 1, 0, 0, 0])
    }

    pub fn to_poly(&self) -> TernaryPoly {
        TernaryPoly::from_terms(QUADRATIC_MONOMIALS.iter().zip(&self.coeffs).map(|(e, c)| (*e, c.clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Surd::is_zero)
    }

    /// Symmetric matrix S with q(v) = vᵀ S v.
    pub fn sym_matrix(&self) -> [[Surd; 3]; 3] {
        let h = |c: &Surd| c.scale(&BigRational::new(1.into(), 2.into()));
        let [a, b, c, d, e, f] = &self.coeffs;
        [[a.clone(), h(b), h(d)], [h(b), c.clone(), h(e)], [h(d), h(e), f.clone()]]
    }

    pub fn from_sym_matrix(s: &[[Surd; 3]; 3]) -> QuadraticTernaryForm {
        let two = |c: &Surd| c + c;
        QuadraticTernaryForm {
            coeffs: [s[0][0].clone(), two(&s[0][1]), s[1][1].clone(), two(&s[0][2]), two(&s[1][2]), s[2][2].clone()],
        }
    }

    pub fn compose_linear(&self, m: &[[Surd; 3]; 3]) -> QuadraticTernaryForm {
        QuadraticTernaryForm::from_poly(&self.to_poly().compose_linear(m)).expect("linear substitution keeps degree 2")
    }

    /// Positive definite iff all leading principal minors are positive (real rational-valued forms only).
    pub fn is_positive_definite(&self) -> bool {
        let s = self.sym_matrix();
        let m1 = s[0][0].clone();
        let m2 = &(&s[0][0] * &s[1][1]) - &(&s[0][1] * &s[1][0]);
        let m3 = crate::linalg::det3_surd(&s);
        [m1, m2, m3].iter().all(|m| m.is_real() && m.to_f64() > 0.0 && positive_exact(m))
    }
}

/// Sign test for rational values, falling back to the float for surds.
fn positive_exact(s: &Surd) -> bool {
    match s.as_rational() {
        Some(q) => q.is_positive(),
        None => s.to_f64() > 0.0,
    }
}

impl fmt::Display for QuadraticTernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// A net of quadrics Q = (q₁, q₂, q₃).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetOfQuadrics {
    pub q: [QuadraticTernaryForm; 3],
}

impl NetOfQuadrics {
    pub fn new(q1: QuadraticTernaryForm, q2: QuadraticTernaryForm, q3: QuadraticTernaryForm) -> NetOfQuadrics {
        NetOfQuadrics { q: [q1, q2, q3] }
    }

    pub fn zero() -> NetOfQuadrics {
        NetOfQuadrics { q: std::array::from_fn(|_| QuadraticTernaryForm::zero()) }
    }

    /// Parses three polynomial strings, e.g. `["2xy", "2xz", "z^2"]`.
    pub fn parse(qs: [&str; 3]) -> Result<NetOfQuadrics, NetError> {
        Ok(NetOfQuadrics {
            q: [QuadraticTernaryForm::parse(qs[0])?, QuadraticTernaryForm::parse(qs[1])?, QuadraticTernaryForm::parse(qs[2])?],
        })
    }

    pub fn polys(&self) -> [TernaryPoly; 3] {
        std::array::from_fn(|i| self.q[i].to_poly())
    }

    /// Rows are the gradients of q₁, q₂, q₃.
    pub fn jacobian(&self) -> [[TernaryPoly; 3]; 3] {
        self.polys().map(|p| p.gradient())
    }

    /// Source change: returns Q ∘ M.
    pub fn compose(&self, m: &[[Surd; 3]; 3]) -> NetOfQuadrics {
        NetOfQuadrics { q: std::array::from_fn(|i| self.q[i].compose_linear(m)) }
    }

    /// Target change: returns A·Q.
    pub fn mix(&self, a: &[[Surd; 3]; 3]) -> NetOfQuadrics {
        NetOfQuadrics {
            q: std::array::from_fn(|i| {
                let p = (0..3).fold(TernaryPoly::zero(), |acc, j| &acc + &self.q[j].to_poly().scale(&a[i][j]));
                QuadraticTernaryForm::from_poly(&p).unwrap()
            }),
        }
    }

    pub fn eval(&self, u: &[Surd; 3]) -> [Surd; 3] {
        std::array::from_fn(|i| self.q[i].to_poly().eval(u))
    }

    pub fn eval_f64(&self, u: [f64; 3]) -> [f64; 3] {
        let c = u.map(|x| num_complex::Complex64::new(x, 0.0));
        std::array::from_fn(|i| self.q[i].to_poly().eval_complex(&c).re)
    }

    pub fn is_rational(&self) -> bool {
        self.q.iter().all(|f| f.coeffs.iter().all(Surd::is_rational))
    }

    /// JSON in the net schema: coefficient arrays of exact strings.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("net serializes")
    }

    pub fn from_json(v: &Value) -> Result<NetOfQuadrics, NetError> {
        let field = |name: &str| -> Result<QuadraticTernaryForm, NetError> {
            let f = v.get(name).ok_or_else(|| NetError::Missing(name.to_string()))?;
            match f {
                Value::String(s) => QuadraticTernaryForm::parse(s).map_err(|e| match e {
                    NetError::Parse { source, .. } => NetError::Parse { field: name.to_string(), source },
                    NetError::NotQuadratic(_) => NetError::NotQuadratic(name.to_string()),
                    other => other,
                }),
                Value::Array(items) if items.len() == 6 => {
                    let mut coeffs: [Surd; 6] = std::array::from_fn(|_| Surd::zero());
                    for (k, item) in items.iter().enumerate() {
                        let text = match item {
                            Value::String(s) => s.clone(),
                            Value::Number(n) => n.to_string(),
                            _ => return Err(NetError::Shape(format!("{name}[{k}]"))),
                        };
                        coeffs[k] = parse_scalar(&text)
                            .map_err(|e| NetError::Parse { field: format!("{name}[{k}]"), source: e })?;
                    }
                    Ok(QuadraticTernaryForm { coeffs })
                }
                _ => Err(NetError::Shape(name.to_string())),
            }
        };
        Ok(NetOfQuadrics { q: [field("q1")?, field("q2")?, field("q3")?] })
    }
}

impl Serialize for NetOfQuadrics {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NetOfQuadrics", 3)?;
        for (k, name) in ["q1", "q2", "q3"].iter().enumerate() {
            let v: Vec<String> = self.q[k].coeffs.iter().map(|c| c.to_string()).collect();
            st.serialize_field(name, &v)?;
        }
        st.end()
    }
}

impl<'de> Deserialize<'de> for NetOfQuadrics {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<NetOfQuadrics, D::Error> {
        let v = Value::deserialize(d)?;
        NetOfQuadrics::from_json(&v).map_err(de::Error::custom)
    }
}

impl fmt::Display for NetOfQuadrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.q[0], self.q[1], self.q[2])
    }
}

/// The Monge-form 2-jet (x, y, z, q₁, q₂, q₃) of a regular 3-manifold in R⁶.
#[derive(Clone, Debug, PartialEq)]
pub struct MongeJet {
    pub components: [TernaryPoly; 6],
}

pub fn monge_embed(net: &NetOfQuadrics) -> MongeJet {
    let [q1, q2, q3] = net.polys();
    MongeJet {
        components: [TernaryPoly::var(Var::X), TernaryPoly::var(Var::Y), TernaryPoly::var(Var::Z), q1, q2, q3],
    }
}

impl MongeJet {
    /// True when every normal component vanishes to second order (zero net).
    pub fn is_totally_geodesic(&self) -> bool {
        self.components[3..].iter().all(TernaryPoly::is_zero)
    }
}

/// Second-order data (l, m, n, p, q, r) of a corank-1 jet (x, y, f₃, f₄, f₅):
/// l = f_xx, m = f_xy, n = f_yy, p = f_xz, q = f_yz, r = f_zz per normal component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularJet {
    pub components: [[Surd; 6]; 3],
}

impl SingularJet {
    /// Reads the second derivatives off a net written in the rotated frame (projection along z).
    pub fn from_net(net: &NetOfQuadrics) -> SingularJet {
        let two = |c: &Surd| c + c;
        SingularJet {
            components: std::array::from_fn(|i| {
                let [a, b, c, d, e, f] = &net.q[i].coeffs;
                [two(a), b.clone(), two(c), d.clone(), e.clone(), two(f)]
            }),
        }
    }

    /// Inverse of [`SingularJet::from_net`].
    pub fn to_net(&self) -> NetOfQuadrics {
        let half = BigRational::new(1.into(), 2.into());
        NetOfQuadrics {
            q: std::array::from_fn(|i| {
                let [l, m, n, p, q, r] = &self.components[i];
                QuadraticTernaryForm {
                    coeffs: [l.scale(&half), m.clone(), n.scale(&half), p.clone(), q.clone(), r.scale(&half)],
                }
            }),
        }
    }

    /// p = q = r = 0 in every component: the locus does not depend on c.
    pub fn is_c_independent(&self) -> bool {
        self.components.iter().all(|c| c[3].is_zero() && c[4].is_zero() && c[5].is_zero())
    }
}

/// Discriminant det(λS₁ + μS₂ + νS₃) as a cubic form in (λ, μ, ν) = (x, y, z).
pub fn net_discriminant(net: &NetOfQuadrics) -> TernaryPoly {
    let mats = net.q.clone().map(|f| f.sym_matrix());
    let m: [[TernaryPoly; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            TernaryPoly::from_terms((0..3).map(|k| {
                let mut e = [0; 3];
                e[k] = 1;
                (e, mats[k][i][j].clone())
            }))
        })
    });
    det3(&m)
}

/// True when a and b agree up to a nonzero constant factor.
pub fn equal_up_to_unit(a: &TernaryPoly, b: &TernaryPoly) -> bool {
    a.normalized() == b.normalized()
}

/// (2xz + y², 2yz, −x² − 2g·y² + c·z² + 2g·xz).
pub fn abc_family(c: &BigRational, g: &BigRational) -> NetOfQuadrics {
    let c = Surd::from_rational(c.clone());
    let g = Surd::from_rational(g.clone());
    let two_g = &g + &g;
    NetOfQuadrics {
        q: [
            QuadraticTernaryForm::from_ints([0, 0, 1, 2, 0, 0]),
            QuadraticTernaryForm::from_ints([0, 0, 0, 0, 2, 0]),
            QuadraticTernaryForm { coeffs: [Surd::from_int(-1), Surd::zero(), -&two_g, two_g, Surd::zero(), c] },
        ],
    }
}

/// c(c + 9g²) ≠ 0: the net is a general member of the family.
pub fn abc_is_general(c: &BigRational, g: &BigRational) -> bool {
    let nine = BigRational::from_integer(9.into());
    !(c * (c + nine * g * g)).is_zero()
}

/// Orbit label of the (c, g) family member by the sign pattern of c + 9g², c and g.
pub fn abc_orbit_label(c: &BigRational, g: &BigRational) -> &'static str {
    if c.is_zero() && g.is_zero() {
        return "C";
    }
    let b = -BigRational::from_integer(9.into()) * g * g;
    if c > &BigRational::zero() {
        return "A_d";
    }
    if c < &b {
        return "A_b";
    }
    let pos = g.is_positive();
    if c == &b {
        return if pos { "B_c" } else { "B_a" };
    }
    if c.is_zero() {
        return if pos { "B_a*" } else { "B_c*" };
    }
    if pos {
        "A_c"
    } else {
        "A_a"
    }
}

/// −μ²ν + (λ − 2gν)(λ² + 2gλν + (c + g²)ν²) in (λ, μ, ν) = (x, y, z).
///
/// The commonly printed form has −λ²ν as its first term; the determinant of
/// the family has μ there (the middle generator 2yz only enters through μ²).
pub fn abc_discriminant_formula(c: &BigRational, g: &BigRational) -> TernaryPoly {
    abc_discriminant_with_first_term(c, g, Var::Y)
}

/// The printed variant with −λ²ν as first term, kept for comparison.
pub fn abc_discriminant_printed(c: &BigRational, g: &BigRational) -> TernaryPoly {
    abc_discriminant_with_first_term(c, g, Var::X)
}

fn abc_discriminant_with_first_term(c: &BigRational, g: &BigRational, v: Var) -> TernaryPoly {
    let l = TernaryPoly::var(Var::X);
    let n = TernaryPoly::var(Var::Z);
    let w = TernaryPoly::var(v);
    let gs = Surd::from_rational(g.clone());
    let cg = Surd::from_rational(c + g * g);
    let first = -(&(&w * &w) * &n);
    let lin = &l - &n.scale(&(&gs + &gs));
    let quad = &(&(&l * &l) + &(&l * &n).scale(&(&gs + &gs))) + &(&n * &n).scale(&cg);
    &first + &(&lin * &quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_poly_in;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn abc_examples() {
        let net = abc_family(&q(-2, 1), &q(1, 1));
        assert_eq!(net.q[2].to_poly(), parse_poly("-x^2 - 2y^2 - 2z^2 + 2xz").unwrap());
        assert_eq!(abc_family(&q(1, 1), &q(0, 1)).q[2].to_poly(), parse_poly("-x^2 + z^2").unwrap());
        assert_eq!(abc_orbit_label(&q(0, 1), &q(0, 1)), "C");
        assert_eq!(abc_orbit_label(&q(-2, 1), &q(1, 1)), "A_c");
        assert_eq!(abc_orbit_label(&q(-9, 1), &q(1, 1)), "B_c");
        assert_eq!(abc_orbit_label(&q(5, 1), &q(-1, 1)), "A_d");
        assert_eq!(abc_orbit_label(&q(-1, 2), &q(0, 1)), "A_b");
    }

    #[test]
    fn discriminant_examples() {
        let i = NetOfQuadrics::parse(["x^2", "2xy", "y^2"]).unwrap();
        assert!(net_discriminant(&i).is_zero());
        let da = NetOfQuadrics::parse(["x^2", "y^2", "z^2+2xy"]).unwrap();
        let expected = parse_poly_in("n*(l*m - n^2)", ["l", "m", "n"]).unwrap();
        assert!(equal_up_to_unit(&net_discriminant(&da), &expected));
        for (c, g) in [(-2, 1), (3, -2), (-20, 1), (7, 0)] {
            let (c, g) = (q(c, 1), q(g, 1));
            let d = net_discriminant(&abc_family(&c, &g));
            assert!(equal_up_to_unit(&d, &abc_discriminant_formula(&c, &g)));
            assert!(!equal_up_to_unit(&d, &abc_discriminant_printed(&c, &g)));
        }
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let net = NetOfQuadrics::parse(["x^2/2 - y^2/2", "xz", "sqrt(2)*yz"]).unwrap();
        let back = NetOfQuadrics::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        let v: Value = serde_json::json!({"q1": [1, 0, 0, 0, 0, 0], "q2": "2xy", "q3": ["1", "x", "0", "0", "0", "0"]});
        match NetOfQuadrics::from_json(&v) {
            Err(NetError::Parse { field, .. }) => assert_eq!(field, "q3[1]"),
            other => panic!("{other:?}"),
        }
        let v: Value = serde_json::json!({"q1": "x^3", "q2": "x", "q3": "y"});
        assert_eq!(NetOfQuadrics::from_json(&v), Err(NetError::NotQuadratic("q1".into())));
    }

    #[test]
    fn monge_and_jets() {
        let h = NetOfQuadrics::parse(["x^2", "2xy", "y^2+2xz"]).unwrap();
        let jet = monge_embed(&h);
        assert_eq!(jet.components[5], parse_poly("y^2 + 2xz").unwrap());
        assert!(monge_embed(&NetOfQuadrics::zero()).is_totally_geodesic());
        let s = SingularJet::from_net(&h);
        assert_eq!(s.to_net(), h);
        assert!(!s.is_c_independent());
        assert!(SingularJet::from_net(&NetOfQuadrics::parse(["x^2", "2xy", "y^2"]).unwrap()).is_c_independent());
    }
}
