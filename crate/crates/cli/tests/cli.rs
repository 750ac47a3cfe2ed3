use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn quadnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadnet")).args(args).env_remove("QUADNET_TOL").output().unwrap()
}

fn write_net(dir: &Path, name: &str, qs: [&str; 3]) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::json!({"q1": qs[0], "q2": qs[1], "q3": qs[2]}).to_string()).unwrap();
    p
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_type5_net() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "n.json", ["2*x*y", "2*x*z", "z^2"]);
    let o = quadnet(&["classify", "--net", s(&net)]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert_eq!(v["schema"], "locus-report/1");
    assert_eq!(v["kind"], "Type5");
    let mut m: Vec<u64> = v["lines"].as_array().unwrap().iter().map(|l| l["multiplicity"].as_u64().unwrap()).collect();
    m.sort();
    assert_eq!(m, [1, 1, 2, 2]);
    assert_eq!(v["lines"][0]["direction"][0], "-1");
}

#[test]
fn coefficient_arrays_with_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("n.json");
    std::fs::write(&p, r#"{"q1":["1/2","0","-1/2","0","0","0"],"q2":[0,0,0,1,0,0],"q3":["0","0","0","0","1","0"]}"#).unwrap();
    let v = report(&quadnet(&["classify", "--net", s(&p)]));
    assert_eq!(v["kind"], "RomanSteiner");
    assert_eq!(v["net"]["q1"][0], "1/2");
}

#[test]
fn project_along_the_pole() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "n.json", ["x^2/2 - y^2/2", "x*z", "y*z"]);
    let o = quadnet(&["project", "--net", s(&net), "--direction", "0,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert_eq!(v["asymptotic"], true);
    assert_eq!(v["finite_cc"], 2);
    assert_eq!(v["at_infinity"], 1);
    let v = report(&quadnet(&["project", "--net", s(&net), "--direction", "sqrt(2)/4,sqrt(2)/4,sqrt(3)/2"]));
    assert_eq!(v["direction"], serde_json::json!(["sqrt(2)/4", "sqrt(2)/4", "sqrt(3)/2"]));
    assert_eq!(v["finite_cc"], 5);
}

#[test]
fn orbit_records() {
    let v = report(&quadnet(&["orbit", "--name", "H"]));
    assert_eq!(v["kind"], "Type6");
    assert_eq!(v["table_regular"], serde_json::json!(["Type6"]));
    let v = report(&quadnet(&["orbit", "--name", "I*"]));
    assert_eq!(v["kind"], "Ellipsoid");
    assert_eq!(v["planes"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "n.json", ["x^2 + y*z", "y^2 + x*z", "z^2 + x*y"]);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = quadnet(&["--seed", "5", "--tolerance", "1e-9", "-o", s(out), "project", "--net", s(&net), "--direction", "-sqrt(2)/2,0,sqrt(2)/2"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"q1":"x^2","q2":"y^2","q3":[0,"1/",0,0,0,0]}"#).unwrap();
    let o = quadnet(&["classify", "--net", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q3[1]"));
    std::fs::write(&bad, r#"{"q1":"x^2","q2":"y^3","q3":"z^2"}"#).unwrap();
    let o = quadnet(&["classify", "--net", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q2"));
    std::fs::write(&bad, r#"{"q1":"x^2","q2":"y^2"}"#).unwrap();
    assert!(String::from_utf8_lossy(&quadnet(&["classify", "--net", s(&bad)]).stderr).contains("q3"));

    let net = write_net(dir.path(), "n.json", ["x*y", "x*z", "y*z"]);
    for args in [
        vec!["classify", "--net", "/nonexistent/n.json"],
        vec!["classify"],
        vec!["project", "--net", s(&net), "--direction", "0,0,0"],
        vec!["project", "--net", s(&net), "--direction", "1,2"],
        vec!["orbit", "--name", "Z"],
        vec!["--tolerance", "-1", "orbit", "--name", "H"],
        vec!["frobnicate"],
        vec!["mesh", "--net", s(&net), "--samples", "4", "--mesh", "/tmp/never.obj"],
    ] {
        assert_eq!(quadnet(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn mesh_export() {
    let dir = tempfile::tempdir().unwrap();
    let net = write_net(dir.path(), "n.json", ["x*y", "x*z", "y*z"]);
    let mesh = dir.path().join("m.obj");
    let o = quadnet(&["mesh", "--net", s(&net), "--samples", "8", "--mesh", s(&mesh), "--scan", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert_eq!((v["vertices"].as_u64(), v["faces"].as_u64()), (Some(81), Some(128)));
    assert_eq!(v["singular_points"]["directions"].as_array().unwrap().len(), 6);
    assert_eq!(v["singular_points"]["approx"], true);
    let text = std::fs::read_to_string(&mesh).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 81);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 128);
    let again = dir.path().join("m2.obj");
    quadnet(&["mesh", "--net", s(&net), "--samples", "8", "--mesh", s(&again)]);
    assert_eq!(text, std::fs::read_to_string(&again).unwrap());
    let o = quadnet(&["mesh", "--net", s(&net), "--domain", "cylinder", "--height", "2", "--samples", "8", "--mesh", s(&mesh)]);
    assert_eq!(report(&o)["height"], 2.0);
}

#[test]
fn verify_tables_exit_code_follows_violations() {
    for mode in ["regular", "singular"] {
        let o = quadnet(&["verify-tables", "--mode", mode, "--seed", "3", "--trials", "1", "--grid", "5"]);
        let v = report(&o);
        assert_eq!(v["census"].as_array().unwrap().len(), 28);
        let n = v["violations"].as_u64().unwrap();
        assert_eq!(o.status.code(), Some(if n > 0 { 3 } else { 0 }), "{mode}");
        assert_eq!(v["abc_grid"].is_null(), mode == "singular");
    }
}
