//! The orbit atlas: normal forms, discriminants, codimensions, generic normal
//! forms and the expected generic loci of every real orbit.

use std::sync::OnceLock;

use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::classifier::{LocusKind, SingularCensus};
use crate::expr::parse_poly_in;
use crate::net::{abc_discriminant_formula, abc_family, equal_up_to_unit, net_discriminant, NetOfQuadrics};
use crate::poly::TernaryPoly;

const ATLAS_JSON: &str = include_str!("../data/atlas.json");
pub const ATLAS_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtlasError {
    #[error("corrupt atlas: {0}")]
    CorruptAtlas(String),
    #[error("unknown orbit {0}")]
    UnknownOrbit(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalForm {
    Net(NetOfQuadrics),
    /// Representative (c, g) of the A/B/C family.
    Family { c: BigRational, g: BigRational },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenericForm {
    pub label: LocusKind,
    pub net: NetOfQuadrics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRecord {
    pub name: String,
    pub codimension: u32,
    pub normal_form: NormalForm,
    /// Cubic form in (λ, μ, ν), stored as a polynomial in (x, y, z).
    pub discriminant: TernaryPoly,
    pub generic_forms: Vec<GenericForm>,
    pub regular: Vec<LocusKind>,
    pub singular: Vec<SingularCensus>,
}

impl OrbitRecord {
    pub fn net(&self) -> NetOfQuadrics {
        match &self.normal_form {
            NormalForm::Net(n) => n.clone(),
            NormalForm::Family { c, g } => abc_family(c, g),
        }
    }

    pub fn is_family(&self) -> bool {
        matches!(self.normal_form, NormalForm::Family { .. })
    }

    pub fn generic_form(&self, label: LocusKind) -> Option<&NetOfQuadrics> {
        self.generic_forms.iter().find(|f| f.label == label).map(|f| &f.net)
    }
}

#[derive(Deserialize)]
struct RawAtlas {
    version: u64,
    orbits: Vec<RawOrbit>,
}

#[derive(Deserialize)]
struct RawOrbit {
    name: String,
    codimension: u32,
    #[serde(default)]
    family: Option<RawFamily>,
    #[serde(default)]
    normal_form: Option<Value>,
    #[serde(default)]
    discriminant: Option<String>,
    #[serde(default)]
    generic_forms: Vec<RawGeneric>,
    regular: Vec<String>,
    singular: Vec<String>,
}

#[derive(Deserialize)]
struct RawFamily {
    c: String,
    g: String,
}

#[derive(Deserialize)]
struct RawGeneric {
    label: String,
    net: Value,
}

/// Parses and validates an atlas document.
pub fn parse_atlas(text: &str) -> Result<Vec<OrbitRecord>, AtlasError> {
    let corrupt = |m: String| AtlasError::CorruptAtlas(m);
    let raw: RawAtlas = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    if raw.version != ATLAS_VERSION {
        return Err(corrupt(format!("unsupported version {}", raw.version)));
    }
    let mut out: Vec<OrbitRecord> = Vec::new();
    for o in raw.orbits {
        let name = o.name;
        if out.iter().any(|r| r.name == name) {
            return Err(corrupt(format!("{name}: duplicate record")));
        }
        let (normal_form, discriminant) = match (o.family, o.normal_form) {
            (Some(f), None) => {
                let q = |s: &str| s.parse::<BigRational>().map_err(|e| corrupt(format!("{name}: {s}: {e}")));
                let (c, g) = (q(&f.c)?, q(&f.g)?);
                (NormalForm::Family { c: c.clone(), g: g.clone() }, abc_discriminant_formula(&c, &g))
            }
            (None, Some(v)) => {
                let net = NetOfQuadrics::from_json(&v).map_err(|e| corrupt(format!("{name}: {e}")))?;
                let text = o.discriminant.ok_or_else(|| corrupt(format!("{name}: missing discriminant")))?;
                let d = parse_poly_in(&text, ["l", "m", "n"]).map_err(|e| corrupt(format!("{name}: discriminant: {e}")))?;
                (NormalForm::Net(net), d)
            }
            _ => return Err(corrupt(format!("{name}: exactly one of family and normal_form is required"))),
        };
        let record_net = match &normal_form {
            NormalForm::Net(n) => n.clone(),
            NormalForm::Family { c, g } => abc_family(c, g),
        };
        let recomputed = net_discriminant(&record_net);
        let agrees = if discriminant.is_zero() { recomputed.is_zero() } else { equal_up_to_unit(&recomputed, &discriminant) };
        if !agrees {
            return Err(corrupt(format!("{name}: stored discriminant {discriminant} but the normal form gives {recomputed}")));
        }
        let generic_forms = o
            .generic_forms
            .into_iter()
            .map(|g| {
                let label = LocusKind::from_name(&g.label).ok_or_else(|| corrupt(format!("{name}: unknown label {}", g.label)))?;
                let net = NetOfQuadrics::from_json(&g.net).map_err(|e| corrupt(format!("{name}: generic form: {e}")))?;
                Ok(GenericForm { label, net })
            })
            .collect::<Result<Vec<_>, AtlasError>>()?;
        let regular = o
            .regular
            .iter()
            .map(|k| LocusKind::from_name(k).ok_or_else(|| corrupt(format!("{name}: unknown kind {k}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let singular = o
            .singular
            .iter()
            .map(|k| SingularCensus::from_name(k).ok_or_else(|| corrupt(format!("{name}: unknown census {k}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(g) = generic_forms.iter().find(|g| !regular.contains(&g.label)) {
            return Err(corrupt(format!("{name}: generic form labelled {:?} outside the regular row set", g.label)));
        }
        out.push(OrbitRecord { name, codimension: o.codimension, normal_form, discriminant, generic_forms, regular, singular });
    }
    Ok(out)
}

/// The shipped atlas, parsed and validated once.
pub fn orbit_table() -> Result<&'static [OrbitRecord], AtlasError> {
    static TABLE: OnceLock<Result<Vec<OrbitRecord>, AtlasError>> = OnceLock::new();
    TABLE.get_or_init(|| parse_atlas(ATLAS_JSON)).as_deref().map_err(Clone::clone)
}

pub fn lookup(name: &str) -> Result<&'static OrbitRecord, AtlasError> {
    orbit_table()?.iter().find(|r| r.name == name).ok_or_else(|| AtlasError::UnknownOrbit(name.to_string()))
}

/// Singular-case census paired with a regular locus kind.
pub fn regular_row_to_singular(kind: LocusKind) -> Option<SingularCensus> {
    Some(match kind {
        LocusKind::RomanSteiner => SingularCensus::SixCC,
        LocusKind::CrossCapSurface => SingularCensus::TwoCC,
        LocusKind::Type5 => SingularCensus::TwoCCTwoTCC,
        LocusKind::Type6 => SingularCensus::TwoDTCC,
        LocusKind::TruncatedCone => SingularCensus::Ellipse,
        LocusKind::Ellipsoid => SingularCensus::Paraboloid,
        LocusKind::Planar | LocusKind::Degenerate => return None,
    })
}
