//! Orthogonal projection of a regular 3-manifold along a tangent direction.

use serde::Serialize;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::classifier::{census_multiset, classify_singular_net, ClassifyError, SingularLocusReport};
use crate::determinantal::{cubic_system, ConstraintQuadric};
use crate::expr::{parse_triple, ParseError};
use crate::linalg::{identity3, matvec3, transpose3, Mat3};
use crate::net::NetOfQuadrics;
use crate::solver::{decompose, VarietyDecomposition};
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("direction: {0}")]
    Parse(#[from] ParseError),
    #[error("direction must be real and nonzero")]
    Degenerate,
    #[error("direction cannot be normalized exactly: |v|^2 = {0}")]
    NotNormalizable(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// An exact unit tangent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangentDirection {
    #[serde(serialize_with = "ser_vec")]
    pub v: [Surd; 3],
}

fn ser_vec<S: serde::Serializer>(v: &[Surd; 3], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

fn ser_mat<S: serde::Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()))
}

impl TangentDirection {
    /// Normalizes v; the squared norm must be a rational with an exact surd square root.
    pub fn new(v: [Surd; 3]) -> Result<TangentDirection, ProjectionError> {
        if v.iter().any(|c| !c.is_real()) || v.iter().all(Surd::is_zero) {
            return Err(ProjectionError::Degenerate);
        }
        let n2 = v.iter().fold(Surd::zero(), |acc, c| &acc + &(c * c));
        let n = n2.sqrt().ok_or_else(|| ProjectionError::NotNormalizable(n2.to_string()))?;
        let inv = n.inv().ok_or(ProjectionError::Degenerate)?;
        Ok(TangentDirection { v: v.map(|c| &c * &inv) })
    }

    /// Comma-separated exact expressions or decimals, e.g. `sqrt(2)/4,sqrt(2)/4,sqrt(3)/2`.
    pub fn parse(s: &str) -> Result<TangentDirection, ProjectionError> {
        TangentDirection::new(parse_triple(s)?)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.v[i].to_f64())
    }
}

impl std::fmt::Display for TangentDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.v[0], self.v[1], self.v[2])
    }
}

/// δ(v) = 0, exactly.
pub fn is_asymptotic(net: &NetOfQuadrics, v: &TangentDirection) -> bool {
    delta_at(net, v).is_zero()
}

fn delta_at(net: &NetOfQuadrics, v: &TangentDirection) -> Surd {
    cubic_system(net, &ConstraintQuadric::sphere()).expect("sphere is positive definite").delta.eval(&v.v)
}

/// Orthogonal R with R·v = e₃: a Householder reflection, except for e₃ (identity)
/// and e₂, where R(a, b, c) = (a, −c, b).
pub fn rotate_to_pole(v: &TangentDirection) -> Mat3 {
    let e3 = [Surd::zero(), Surd::zero(), Surd::one()];
    if v.v == e3 {
        return identity3();
    }
    if v.v == [Surd::zero(), Surd::one(), Surd::zero()] {
        return crate::linalg::from_ints3([[1, 0, 0], [0, 0, -1], [0, 1, 0]]);
    }
    let w: [Surd; 3] = std::array::from_fn(|i| &v.v[i] - &e3[i]);
    let ww = w.iter().fold(Surd::zero(), |acc, c| &acc + &(c * c));
    let k = &Surd::from_int(2) * &ww.inv().expect("v differs from e3");
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let d = if i == j { Surd::one() } else { Surd::zero() };
            &d - &(&k * &(&w[i] * &w[j]))
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub direction: TangentDirection,
    pub asymptotic: bool,
    #[serde(serialize_with = "ser_mat")]
    pub rotation: Mat3,
    pub rotated_net: NetOfQuadrics,
    /// Jacobian of the rotated net at (0, 0, 1).
    #[serde(serialize_with = "ser_mat")]
    pub alpha_prime: Mat3,
    pub singular_report: SingularLocusReport,
    pub regular_evidence: Option<VarietyDecomposition>,
    pub isomorphic_to_regular: bool,
}

impl ProjectionReport {
    pub fn finite_cc(&self) -> usize {
        self.singular_report.count(crate::classifier::SingularityType::CC)
    }
}

pub fn project_along(net: &NetOfQuadrics, v: &TangentDirection, seed: u64) -> Result<ProjectionReport, ProjectionError> {
    let asymptotic = is_asymptotic(net, v);
    let rotation = rotate_to_pole(v);
    let rotated_net = net.compose(&transpose3(&rotation));
    let e3 = [Surd::zero(), Surd::zero(), Surd::one()];
    let alpha_prime: Mat3 = rotated_net.jacobian().map(|row| row.map(|p| p.eval(&e3)));
    let singular_report = classify_singular_net(&rotated_net, seed)?;
    let regular_evidence = decompose(&cubic_system(net, &ConstraintQuadric::sphere()).expect("sphere"), seed).ok();
    let isomorphic_to_regular = match (&regular_evidence, &singular_report.evidence) {
        (Some(r), Some(s)) => census_multiset(r) == census_multiset(s),
        _ => false,
    };
    debug_assert_eq!(matvec3(&rotation, &v.v), e3);
    Ok(ProjectionReport { direction: v.clone(), asymptotic, rotation, rotated_net, alpha_prime, singular_report, regular_evidence, isomorphic_to_regular })
}
