//! Versioned JSON reports. Exact values are strings; approximate values are
//! numbers inside objects carrying `"approx": true`.

use serde_json::{json, Map, Value};

use crate::atlas::OrbitRecord;
use crate::classifier::{LocusClassification, SingularLocusReport, SingularityType};
use crate::generic::GenericFormCheck;
use crate::linalg::Mat3;
use crate::net::NetOfQuadrics;
use crate::projection::ProjectionReport;
use crate::scalar::Scalar;
use crate::solver::{LineSolution, Reality, VarietyDecomposition};

pub const SCHEMA: &str = "locus-report/1";

/// Top-level object with the schema tag and command name.
pub fn envelope(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

pub fn scalar(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(e) => json!(e.to_string()),
        Scalar::Approx(z) if z.im == 0.0 => json!(z.re),
        Scalar::Approx(z) => json!([z.re, z.im]),
    }
}

fn direction(d: &[Scalar; 3]) -> (Value, bool) {
    (Value::Array(d.iter().map(scalar).collect()), d.iter().any(|s| !s.is_exact()))
}

fn reality(r: Reality) -> &'static str {
    match r {
        Reality::Real => "real",
        Reality::ComplexPair => "complex_pair",
    }
}

pub fn line(l: &LineSolution) -> Value {
    let (d, approx) = direction(&l.direction);
    let mut m = Map::new();
    m.insert("direction".into(), d);
    m.insert("reality".into(), json!(reality(l.reality)));
    m.insert("multiplicity".into(), json!(l.multiplicity));
    if approx {
        m.insert("approx".into(), json!(true));
    }
    Value::Object(m)
}

pub fn matrix(m: &Mat3) -> Value {
    json!(m.iter().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn decomposition_into(m: &mut Map<String, Value>, d: Option<&VarietyDecomposition>) {
    let (planes, lines, total, zd) = match d {
        Some(d) => (
            d.planes.iter().map(|p| json!(p.to_string())).collect(),
            d.lines.iter().map(line).collect(),
            json!(d.total_multiplicity),
            json!(d.zero_dimensional),
        ),
        None => (vec![], vec![], Value::Null, Value::Null),
    };
    m.insert("planes".into(), Value::Array(planes));
    m.insert("lines".into(), Value::Array(lines));
    m.insert("total_multiplicity".into(), total);
    m.insert("zero_dimensional".into(), zd);
}

/// `{kind, substantial, planes, lines, total_multiplicity, notes}` without the envelope.
pub fn classification_fields(c: &LocusClassification) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!(c.kind.name()));
    m.insert("substantial".into(), json!(c.substantial));
    decomposition_into(&mut m, c.evidence.as_ref());
    m.insert("notes".into(), json!(c.notes));
    m
}

pub fn classification(net: &NetOfQuadrics, c: &LocusClassification, seed: u64) -> Value {
    let mut m = envelope("classify");
    m.insert("seed".into(), json!(seed));
    m.insert("net".into(), net.to_json());
    m.extend(classification_fields(c));
    Value::Object(m)
}

fn singularity_type(t: SingularityType) -> String {
    match t {
        SingularityType::Higher(m) => format!("multiplicity {m}"),
        t => format!("{t:?}"),
    }
}

pub fn singular_fields(r: &SingularLocusReport) -> Map<String, Value> {
    let finite: Vec<Value> = r
        .finite_singularities
        .iter()
        .map(|s| {
            let (d, approx) = direction(&s.direction);
            let mut o = Map::new();
            o.insert("type".into(), json!(singularity_type(s.kind)));
            o.insert("direction".into(), d);
            if approx {
                o.insert("approx".into(), json!(true));
            }
            Value::Object(o)
        })
        .collect();
    let mut m = Map::new();
    m.insert("census".into(), json!(r.census().name()));
    m.insert("finite_cc".into(), json!(r.count(SingularityType::CC)));
    m.insert("finite_singularities".into(), Value::Array(finite));
    m.insert("at_infinity".into(), json!(r.at_infinity.len()));
    m.insert("at_infinity_lines".into(), Value::Array(r.at_infinity.iter().map(line).collect()));
    m.insert("planar_kind".into(), r.planar_kind.map_or(Value::Null, |k| json!(format!("{k:?}"))));
    m.insert("asymptotic_projection".into(), json!(r.asymptotic_projection));
    let mut evidence = Map::new();
    decomposition_into(&mut evidence, r.evidence.as_ref());
    m.insert("evidence".into(), Value::Object(evidence));
    m.insert("notes".into(), json!(r.notes));
    m
}

pub fn projection(net: &NetOfQuadrics, p: &ProjectionReport, seed: u64) -> Value {
    let mut m = envelope("project");
    m.insert("seed".into(), json!(seed));
    m.insert("net".into(), net.to_json());
    m.insert("direction".into(), json!(p.direction.v.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    m.insert("asymptotic".into(), json!(p.asymptotic));
    m.insert("rotation".into(), matrix(&p.rotation));
    m.insert("rotated_net".into(), p.rotated_net.to_json());
    m.insert("alpha_prime".into(), matrix(&p.alpha_prime));
    m.extend(singular_fields(&p.singular_report));
    m.insert("isomorphic_to_regular".into(), json!(p.isomorphic_to_regular));
    Value::Object(m)
}

/// Atlas record with the classification of its normal form and of each stored generic form.
pub fn orbit(
    record: &OrbitRecord,
    normal: &LocusClassification,
    generic: &[GenericFormCheck],
    seed: u64,
) -> Value {
    let mut m = envelope("orbit");
    m.insert("seed".into(), json!(seed));
    m.insert("name".into(), json!(record.name));
    m.insert("codimension".into(), json!(record.codimension));
    m.insert("net".into(), record.net().to_json());
    m.insert("discriminant".into(), json!(record.discriminant.to_string()));
    m.extend(classification_fields(normal));
    m.insert("table_regular".into(), json!(record.regular.iter().map(|k| k.name()).collect::<Vec<_>>()));
    m.insert("table_singular".into(), json!(record.singular.iter().map(|k| k.name()).collect::<Vec<_>>()));
    m.insert(
        "generic_forms".into(),
        Value::Array(generic.iter().map(|g| json!({"label": g.label, "kind": g.observed})).collect()),
    );
    Value::Object(m)
}

/// Any serializable payload under the envelope.
pub fn wrap<T: serde::Serialize>(command: &str, payload: &T) -> Value {
    let mut m = envelope(command);
    match serde_json::to_value(payload).expect("report types serialize") {
        Value::Object(o) => m.extend(o),
        v => {
            m.insert("result".into(), v);
        }
    }
    Value::Object(m)
}
