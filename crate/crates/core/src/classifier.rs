//! Locus types from the decomposition census: regular loci on the sphere and
//! singular (corank-1) loci on the cylinder.

use serde::Serialize;
use thiserror::Error;

use crate::determinantal::{cubic_system, eta_basis, substantiality_for, ConstraintQuadric, DeterminantalError};
use crate::linalg::det3_surd;
use crate::net::{NetOfQuadrics, QuadraticTernaryForm, SingularJet};
use crate::scalar::Scalar;
use crate::solver::{decompose, Reality, SolverError, VarietyDecomposition};
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Constraint(#[from] DeterminantalError),
    #[error("H = B1 = B2 = 0 with independent B3, B4, B5 but the locus classified as {0:?}")]
    SteinerCriterionViolation(LocusKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LocusKind {
    RomanSteiner,
    CrossCapSurface,
    Type5,
    Type6,
    TruncatedCone,
    Ellipsoid,
    Planar,
    Degenerate,
}

impl LocusKind {
    pub const ALL: [LocusKind; 8] = [
        LocusKind::RomanSteiner,
        LocusKind::CrossCapSurface,
        LocusKind::Type5,
        LocusKind::Type6,
        LocusKind::TruncatedCone,
        LocusKind::Ellipsoid,
        LocusKind::Planar,
        LocusKind::Degenerate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LocusKind::RomanSteiner => "RomanSteiner",
            LocusKind::CrossCapSurface => "CrossCapSurface",
            LocusKind::Type5 => "Type5",
            LocusKind::Type6 => "Type6",
            LocusKind::TruncatedCone => "TruncatedCone",
            LocusKind::Ellipsoid => "Ellipsoid",
            LocusKind::Planar => "Planar",
            LocusKind::Degenerate => "Degenerate",
        }
    }

    pub fn from_name(s: &str) -> Option<LocusKind> {
        LocusKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusClassification {
    pub kind: LocusKind,
    pub substantial: bool,
    pub evidence: Option<VarietyDecomposition>,
    pub notes: Vec<String>,
}

/// The decision table on a decomposition of a substantial locus.
pub fn kind_from_evidence(d: &VarietyDecomposition) -> LocusKind {
    let real = d.real_multiplicities();
    if !d.planes.is_empty() {
        return match (d.planes.len(), real.len()) {
            (1, 1) => LocusKind::TruncatedCone,
            (1, 0) => LocusKind::Ellipsoid,
            _ => LocusKind::Degenerate,
        };
    }
    let complex: Vec<u32> = d.complex_pairs().map(|l| l.multiplicity).collect();
    match (real.as_slice(), complex.as_slice()) {
        ([1, 1, 1, 1, 1, 1], []) => LocusKind::RomanSteiner,
        ([1, 1], [1, 1]) => LocusKind::CrossCapSurface,
        ([1, 1, 2, 2], []) => LocusKind::Type5,
        ([3, 3], []) => LocusKind::Type6,
        _ => LocusKind::Degenerate,
    }
}

pub fn classify_regular(net: &NetOfQuadrics, seed: u64) -> Result<LocusClassification, ClassifyError> {
    classify_with(net, &ConstraintQuadric::sphere(), seed)
}

/// Classification of the locus over the level set {p = 1} of a positive-definite constraint.
pub fn classify_with(net: &NetOfQuadrics, constraint: &ConstraintQuadric, seed: u64) -> Result<LocusClassification, ClassifyError> {
    let sys = cubic_system(net, constraint)?;
    let substantial = substantiality_for(net, &constraint.form).substantial;
    let mut notes = Vec::new();
    let evidence = match decompose(&sys, seed) {
        Ok(d) => Some(d),
        Err(SolverError::DegenerateSystem) => {
            notes.push("all minors vanish identically".to_string());
            None
        }
        Err(e) if !substantial => {
            notes.push(format!("decomposition failed: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let kind = match (&evidence, substantial) {
        (_, false) => LocusKind::Planar,
        (None, true) => LocusKind::Degenerate,
        (Some(d), true) => kind_from_evidence(d),
    };
    if kind == LocusKind::Degenerate {
        notes.push("census matches no row of the classification".to_string());
    }
    Ok(LocusClassification { kind, substantial, evidence, notes })
}

/// H = B₁ = B₂ = 0 and det(B₃, B₄, B₅) ≠ 0 forces a Roman Steiner surface.
pub fn check_prop36(net: &NetOfQuadrics, seed: u64) -> Result<(bool, LocusClassification), ClassifyError> {
    let e = eta_basis(net);
    let zero = |v: &[Surd; 3]| v.iter().all(Surd::is_zero);
    let holds = zero(&e.h) && zero(&e.b[0]) && zero(&e.b[1]) && !det3_surd(&[e.b[2].clone(), e.b[3].clone(), e.b[4].clone()]).is_zero();
    let c = classify_regular(net, seed)?;
    if holds && c.kind != LocusKind::RomanSteiner {
        return Err(ClassifyError::SteinerCriterionViolation(c.kind));
    }
    Ok((holds, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SingularityType {
    CC,
    TCC,
    DTCC,
    Higher(u32),
}

impl SingularityType {
    pub fn from_multiplicity(m: u32) -> SingularityType {
        match m {
            1 => SingularityType::CC,
            2 => SingularityType::TCC,
            3 => SingularityType::DTCC,
            m => SingularityType::Higher(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PlanarKind {
    Ellipse,
    Paraboloid,
    PlanarOther,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteSingularity {
    pub kind: SingularityType,
    pub direction: [Scalar; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularLocusReport {
    pub finite_singularities: Vec<FiniteSingularity>,
    pub at_infinity: Vec<crate::solver::LineSolution>,
    pub planar_kind: Option<PlanarKind>,
    pub asymptotic_projection: bool,
    pub evidence: Option<VarietyDecomposition>,
    pub notes: Vec<String>,
}

/// Census of a singular locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SingularCensus {
    SixCC,
    TwoCC,
    TwoCCTwoTCC,
    TwoDTCC,
    Ellipse,
    Paraboloid,
    Other,
}

impl SingularCensus {
    pub const ALL: [SingularCensus; 7] = [
        SingularCensus::SixCC,
        SingularCensus::TwoCC,
        SingularCensus::TwoCCTwoTCC,
        SingularCensus::TwoDTCC,
        SingularCensus::Ellipse,
        SingularCensus::Paraboloid,
        SingularCensus::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SingularCensus::SixCC => "6CC",
            SingularCensus::TwoCC => "2CC",
            SingularCensus::TwoCCTwoTCC => "2CC+2TCC",
            SingularCensus::TwoDTCC => "2DTCC",
            SingularCensus::Ellipse => "Ellipse",
            SingularCensus::Paraboloid => "Paraboloid",
            SingularCensus::Other => "Other",
        }
    }

    pub fn from_name(s: &str) -> Option<SingularCensus> {
        SingularCensus::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl SingularLocusReport {
    pub fn count(&self, t: SingularityType) -> usize {
        self.finite_singularities.iter().filter(|s| s.kind == t).count()
    }

    pub fn census(&self) -> SingularCensus {
        match self.planar_kind {
            Some(PlanarKind::Ellipse) => return SingularCensus::Ellipse,
            Some(PlanarKind::Paraboloid) => return SingularCensus::Paraboloid,
            Some(PlanarKind::PlanarOther) => return SingularCensus::Other,
            None => {}
        }
        let n = self.finite_singularities.len();
        let (cc, tcc, dtcc) = (self.count(SingularityType::CC), self.count(SingularityType::TCC), self.count(SingularityType::DTCC));
        match (cc, tcc, dtcc) {
            (6, 0, 0) if n == 6 => SingularCensus::SixCC,
            (2, 0, 0) if n == 2 => SingularCensus::TwoCC,
            (2, 2, 0) if n == 4 => SingularCensus::TwoCCTwoTCC,
            (0, 0, 2) if n == 2 => SingularCensus::TwoDTCC,
            _ => SingularCensus::Other,
        }
    }
}

pub fn classify_singular(jet: &SingularJet, seed: u64) -> Result<SingularLocusReport, ClassifyError> {
    classify_singular_net(&jet.to_net(), seed)
}

/// Locus of a corank-1 jet whose kernel direction is z, given by its net of quadrics.
pub fn classify_singular_net(net: &NetOfQuadrics, seed: u64) -> Result<SingularLocusReport, ClassifyError> {
    let sys = cubic_system(net, &ConstraintQuadric::cylinder())?;
    let asymptotic_projection = sys.delta.coeff([0, 0, 3]).is_zero();
    let c_independent = SingularJet::from_net(net).is_c_independent();
    let mut notes = Vec::new();
    let evidence = match decompose(&sys, seed) {
        Ok(d) => Some(d),
        Err(SolverError::DegenerateSystem) => {
            notes.push("all minors vanish identically".to_string());
            None
        }
        Err(e) => return Err(e.into()),
    };
    let mut finite = Vec::new();
    let mut at_infinity = Vec::new();
    if let Some(d) = &evidence {
        for l in d.real_lines() {
            let v = l.direction_complex();
            if v[0].norm() == 0.0 && v[1].norm() == 0.0 {
                at_infinity.push(l.clone());
            } else {
                finite.push(FiniteSingularity { kind: SingularityType::from_multiplicity(l.multiplicity), direction: l.direction.clone() });
            }
        }
    }
    let planar_kind = if c_independent {
        notes.push("locus independent of c".to_string());
        Some(if conic_is_nondegenerate(net) { PlanarKind::Ellipse } else { PlanarKind::PlanarOther })
    } else if evidence.as_ref().is_some_and(|d| !d.planes.is_empty() && d.real_count() == 0) {
        notes.push("plane component without real lines, unbounded in c".to_string());
        Some(PlanarKind::Paraboloid)
    } else if !substantiality_for(net, &QuadraticTernaryForm::cylinder()).substantial || evidence.is_none() {
        Some(PlanarKind::PlanarOther)
    } else {
        None
    };
    if planar_kind.is_some() {
        notes.push("planar kind decided by the boundedness rule".to_string());
    }
    Ok(SingularLocusReport { finite_singularities: finite, at_infinity, planar_kind, asymptotic_projection, evidence, notes })
}

/// For a c-independent jet, the image of the circle is a nondegenerate ellipse iff the
/// cos 2θ and sin 2θ coefficient vectors are independent.
fn conic_is_nondegenerate(net: &NetOfQuadrics) -> bool {
    let u: Vec<Surd> = net.q.iter().map(|q| &q.coeffs[0] - &q.coeffs[2]).collect();
    let v: Vec<Surd> = net.q.iter().map(|q| q.coeffs[1].clone()).collect();
    (0..3).any(|i| (0..3).any(|j| !(&(&u[i] * &v[j]) - &(&u[j] * &v[i])).is_zero()))
}

/// Multiset of (multiplicity, reality) of the real and complex lines, for comparisons across constraints.
pub fn census_multiset(d: &VarietyDecomposition) -> Vec<(u32, Reality)> {
    d.census()
}
