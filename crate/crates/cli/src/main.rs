use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use quadnet::atlas::lookup;
use quadnet::classifier::{classify_regular, LocusKind};
use quadnet::generic::{check_generic_forms, verify_tables, CensusMode};
use quadnet::geometry::{export_mesh, numeric_singular_points, Domain, DEFAULT_CYLINDER_HEIGHT};
use quadnet::projection::{project_along, TangentDirection};
use quadnet::report;
use quadnet::scalar::TOLERANCE_ENV;
use quadnet::NetOfQuadrics;
use serde_json::{json, Value};

/// Curvature loci of 3-manifolds from nets of quadrics.
#[derive(Parser, Debug)]
#[command(name = "quadnet", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numeric tolerance; overrides QUADNET_TOL.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the regular curvature locus of a net (sphere constraint).
    Classify {
        #[arg(long)]
        net: PathBuf,
    },
    /// Project along a unit tangent direction and classify the singular locus.
    Project {
        #[arg(long)]
        net: PathBuf,
        /// Comma-separated exact expressions or decimals, e.g. "sqrt(2)/4,sqrt(2)/4,sqrt(3)/2".
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Atlas record of a named orbit with the classification of its forms.
    Orbit {
        #[arg(long)]
        name: String,
    },
    /// Check every atlas row: stored generic forms and a seeded census.
    VerifyTables {
        #[arg(long, value_enum, default_value_t = Mode::Regular)]
        mode: Mode,
        /// Width of the rational (c, g) grid for the A/B/C family (regular mode).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Write a triangle mesh of the locus parametrization.
    Mesh {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_enum, default_value_t = MeshDomain::Sphere)]
        domain: MeshDomain,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_CYLINDER_HEIGHT)]
        height: f64,
        /// Mesh file to write.
        #[arg(long)]
        mesh: PathBuf,
        /// Also run the numeric singular-point scan on a grid of this width.
        #[arg(long)]
        scan: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Regular,
    Singular,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MeshDomain {
    Sphere,
    Cylinder,
}

enum Outcome {
    Ok(Value),
    Degenerate(Value),
    Violation(Value),
}

const EXIT_INPUT: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn exit_code(o: &Outcome) -> u8 {
    match o {
        Outcome::Ok(_) => 0,
        Outcome::Degenerate(_) => EXIT_DEGENERATE,
        Outcome::Violation(_) => EXIT_VIOLATION,
    }
}

fn read_net(path: &Path) -> Result<NetOfQuadrics, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    NetOfQuadrics::from_json(&v).map_err(|e| format!("{}: {e}", path.display()))
}

fn execute(cli: &Cli) -> Result<Outcome, String> {
    let seed = cli.seed;
    match &cli.command {
        Command::Classify { net } => {
            let n = read_net(net)?;
            let c = classify_regular(&n, seed).map_err(|e| e.to_string())?;
            let v = report::classification(&n, &c, seed);
            Ok(if c.kind == LocusKind::Degenerate { Outcome::Degenerate(v) } else { Outcome::Ok(v) })
        }
        Command::Project { net, direction } => {
            let n = read_net(net)?;
            let d = TangentDirection::parse(direction).map_err(|e| format!("--direction: {e}"))?;
            let p = project_along(&n, &d, seed).map_err(|e| e.to_string())?;
            Ok(Outcome::Ok(report::projection(&n, &p, seed)))
        }
        Command::Orbit { name } => {
            let r = lookup(name).map_err(|e| e.to_string())?;
            let c = classify_regular(&r.net(), seed).map_err(|e| e.to_string())?;
            let forms = check_generic_forms(r, CensusMode::Regular, seed);
            let v = report::orbit(r, &c, &forms, seed);
            Ok(if c.kind == LocusKind::Degenerate { Outcome::Degenerate(v) } else { Outcome::Ok(v) })
        }
        Command::VerifyTables { mode, grid, trials } => {
            let mode = match mode {
                Mode::Regular => CensusMode::Regular,
                Mode::Singular => CensusMode::Singular,
            };
            let t = verify_tables(mode, seed, *trials, *grid).map_err(|e| e.to_string())?;
            let mut v = report::wrap("verify-tables", &t);
            v["violations"] = json!(t.violations());
            Ok(if t.violations() > 0 { Outcome::Violation(v) } else { Outcome::Ok(v) })
        }
        Command::Mesh { net, domain, samples, height, mesh, scan } => {
            let n = read_net(net)?;
            if *samples < 8 {
                return Err("--samples must be at least 8".into());
            }
            if scan.is_some_and(|g| g < 64) {
                return Err("--scan must be at least 64".into());
            }
            let d = match domain {
                MeshDomain::Sphere => Domain::Sphere,
                MeshDomain::Cylinder if *height > 0.0 && height.is_finite() => Domain::Cylinder { height: *height },
                MeshDomain::Cylinder => return Err("--height must be positive".into()),
            };
            export_mesh(&n, d, *samples, mesh).map_err(|e| format!("{}: {e}", mesh.display()))?;
            let mut m = report::envelope("mesh");
            m.insert("net".into(), n.to_json());
            m.insert("domain".into(), json!(format!("{domain:?}").to_lowercase()));
            m.insert("samples".into(), json!(samples));
            if let Domain::Cylinder { height } = d {
                m.insert("height".into(), json!(height));
            }
            m.insert("vertices".into(), json!((samples + 1) * (samples + 1)));
            m.insert("faces".into(), json!(2 * samples * samples));
            m.insert("path".into(), json!(mesh.display().to_string()));
            if let Some(g) = scan {
                let s = numeric_singular_points(&n, d, *g, quadnet::geometry::DEFAULT_RANK_TOL);
                m.insert(
                    "singular_points".into(),
                    json!({"approx": true, "directions": s.directions, "curve_of_singular_points": s.curve_of_singular_points}),
                );
            }
            Ok(Outcome::Ok(Value::Object(m)))
        }
    }
}

fn emit(v: &Value, output: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("json");
    text.push('\n');
    match output {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for degenerate loci.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("error: --tolerance must be a positive number");
            return ExitCode::from(EXIT_INPUT);
        }
        std::env::set_var(TOLERANCE_ENV, t.to_string());
    }
    let (v, code) = match execute(&cli) {
        Ok(o) => {
            let code = exit_code(&o);
            let (Outcome::Ok(v) | Outcome::Degenerate(v) | Outcome::Violation(v)) = o;
            (v, code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    if let Err(e) = emit(&v, cli.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}
