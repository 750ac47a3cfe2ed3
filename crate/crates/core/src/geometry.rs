//! Evaluation of the curvature-locus parametrizations, a numeric detector for
//! their singular points, and triangle-mesh export.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::determinantal::EtaBasis;
use crate::net::{NetOfQuadrics, SingularJet};

pub const DEFAULT_RANK_TOL: f64 = 1e-6;
pub const DEFAULT_CYLINDER_HEIGHT: f64 = 4.0;
/// Near an order-m singular point the ratio grows like r^m, so refined detections of one point
/// can scatter by about tol^(1/m); those within this angle are merged.
const MERGE_ANGLE: f64 = 1e-3;
const SIMPLEX_TOL: f64 = 1e-13;
const MAX_ISOLATED: usize = 6;
const PROBE_RADIUS: f64 = 1e-2;
/// A curve of zeros crosses the probe circle, where the refined ratio falls to rounding level;
/// around an isolated point it stays of order PROBE_RADIUS^m.
const PROBE_TOL: f64 = 1e-10;
/// Detections beyond this many are a curve; refinement stops there.
const CURVE_CAP: usize = 64;
/// Grid cells already below tolerance; isolated points, even of high order, cover only a few.
const CURVE_CELLS: usize = 16;
const PROBE_SAMPLES: usize = 72;
const RESTARTS: usize = 8;

/// Parameter domain of η: the unit sphere, or the cylinder a² + b² = 1 cut at |c| ≤ height.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "case")]
pub enum Domain {
    Sphere,
    Cylinder { height: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocusSample {
    /// (θ, φ) on the sphere, (θ, c) on the cylinder.
    pub params: [f64; 2],
    pub point: [f64; 3],
}

/// Float copy of a net: per component, coefficients in [xx, xy, yy, xz, yz, zz] order.
#[derive(Clone, Copy, Debug)]
struct QuadMap([[f64; 6]; 3]);

impl QuadMap {
    fn new(net: &NetOfQuadrics) -> QuadMap {
        QuadMap(std::array::from_fn(|i| std::array::from_fn(|k| net.q[i].coeffs[k].to_f64())))
    }

    fn eval(&self, u: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = u;
        let m = [x * x, x * y, y * y, x * z, y * z, z * z];
        self.0.map(|c| c.iter().zip(&m).map(|(a, b)| a * b).sum())
    }

    /// D(Q)(u)·w.
    fn apply_derivative(&self, u: [f64; 3], w: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = u;
        let [p, q, r] = w;
        let dm = [2.0 * x * p, x * q + y * p, 2.0 * y * q, x * r + z * p, y * r + z * q, 2.0 * z * r];
        self.0.map(|c| c.iter().zip(&dm).map(|(a, b)| a * b).sum())
    }
}

fn sphere_point(theta: f64, phi: f64) -> [f64; 3] {
    [theta.cos() * phi.sin(), theta.sin() * phi.sin(), phi.cos()]
}

/// η(u) = Q(u) with u = (cos θ sin φ, sin θ sin φ, cos φ).
pub fn eta_regular(net: &NetOfQuadrics, theta: f64, phi: f64) -> [f64; 3] {
    let q = QuadMap::new(net);
    let direct = q.eval(sphere_point(theta, phi));
    if log::log_enabled!(log::Level::Debug) {
        let b = float_basis(&q);
        let printed = expand(&b, theta, phi, ExpansionReading::Printed);
        let gap = (0..3).map(|i| (printed[i] - 2.0 * direct[i]).abs()).fold(0.0, f64::max);
        if gap > 1e-9 * (1.0 + direct.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            log::debug!("basis expansion with the cos(2θ)sin²θ term misses 2Q(u) by {gap:e} at θ={theta}, φ={phi}");
        }
    }
    direct
}

/// Which factor multiplies cos(2θ)·B₂ in the basis expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionReading {
    /// sin²θ, as displayed.
    Printed,
    /// sin²φ, which reproduces 2Q(u).
    SinSquaredPhi,
}

/// H + (1 + 3cos 2φ)B₁ + cos 2θ·s·B₂ + sin 2θ sin²φ B₃ + cos θ sin 2φ B₄ + sin θ sin 2φ B₅.
pub fn eta_expansion(basis: &EtaBasis, theta: f64, phi: f64, reading: ExpansionReading) -> [f64; 3] {
    let f = |v: &[crate::Surd; 3]| v.clone().map(|c| c.to_f64());
    let b = FloatBasis { h: f(&basis.h), b: basis.b.clone().map(|v| f(&v)) };
    expand(&b, theta, phi, reading)
}

struct FloatBasis {
    h: [f64; 3],
    b: [[f64; 3]; 5],
}

fn float_basis(q: &QuadMap) -> FloatBasis {
    let d = |k: usize, i: usize| if matches!(k, 0 | 2 | 5) { 2.0 * q.0[i][k] } else { q.0[i][k] };
    FloatBasis {
        h: std::array::from_fn(|i| (d(0, i) + d(2, i) + d(5, i)) / 3.0),
        b: [
            std::array::from_fn(|i| (2.0 * d(5, i) - d(0, i) - d(2, i)) / 12.0),
            std::array::from_fn(|i| (d(0, i) - d(2, i)) / 2.0),
            std::array::from_fn(|i| d(1, i)),
            std::array::from_fn(|i| d(3, i)),
            std::array::from_fn(|i| d(4, i)),
        ],
    }
}

fn expand(b: &FloatBasis, theta: f64, phi: f64, reading: ExpansionReading) -> [f64; 3] {
    let s = match reading {
        ExpansionReading::Printed => theta.sin().powi(2),
        ExpansionReading::SinSquaredPhi => phi.sin().powi(2),
    };
    let w = [
        1.0 + 3.0 * (2.0 * phi).cos(),
        (2.0 * theta).cos() * s,
        (2.0 * theta).sin() * phi.sin().powi(2),
        theta.cos() * (2.0 * phi).sin(),
        theta.sin() * (2.0 * phi).sin(),
    ];
    std::array::from_fn(|i| b.h[i] + (0..5).map(|k| w[k] * b.b[k][i]).sum::<f64>())
}

/// Σ (a²l + 2ab·m + b²n + 2ac·p + 2bc·q + c²r)·νᵢ with (a, b) = (cos θ, sin θ), in the jet's
/// second-derivative labels (p, q, r are the xz, yz, zz entries).
pub fn eta_singular(jet: &SingularJet, theta: f64, c: f64) -> [f64; 3] {
    let (a, b) = (theta.cos(), theta.sin());
    let w = [a * a, 2.0 * a * b, b * b, 2.0 * a * c, 2.0 * b * c, c * c];
    jet.components.clone().map(|k| k.iter().zip(&w).map(|(x, y)| x.to_f64() * y).sum())
}

/// Grid samples of η over the full parameter domain, (samples + 1)² points in row-major order.
/// The sphere is the double cover: η(u) = η(−u) is not quotiented out.
pub fn sample_locus(net: &NetOfQuadrics, domain: Domain, samples: usize) -> Vec<LocusSample> {
    let q = QuadMap::new(net);
    let n = samples;
    let row = |j: usize| -> Vec<LocusSample> {
        (0..=n)
            .map(|i| {
                let theta = TAU * i as f64 / n as f64;
                match domain {
                    Domain::Sphere => {
                        let phi = PI * j as f64 / n as f64;
                        LocusSample { params: [theta, phi], point: q.eval(sphere_point(theta, phi)) }
                    }
                    Domain::Cylinder { height } => {
                        let c = -height + 2.0 * height * j as f64 / n as f64;
                        // 2Q on the cylinder, matching eta_singular.
                        let p = q.eval([theta.cos(), theta.sin(), c]).map(|v| 2.0 * v);
                        LocusSample { params: [theta, c], point: p }
                    }
                }
            })
            .collect()
    };
    par_rows(n + 1, row)
}

/// Rows evaluated on scoped threads and concatenated in order.
fn par_rows<T: Send, F: Fn(usize) -> Vec<T> + Sync>(rows: usize, f: F) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(rows.max(1));
    let chunk = rows.div_ceil(workers);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                s.spawn(move || (w * chunk..((w + 1) * chunk).min(rows)).flat_map(f).collect::<Vec<T>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sampling thread")).collect()
    })
}

/// Triangulated mesh text: "v x y z" then "f i j k" (1-indexed), nine significant digits.
pub fn mesh_string(net: &NetOfQuadrics, domain: Domain, samples: usize) -> String {
    assert!(samples >= 8, "mesh needs at least 8 samples per side");
    let pts = sample_locus(net, domain, samples);
    let mut out = String::new();
    for s in &pts {
        let [x, y, z] = s.point;
        writeln!(out, "v {x:.8e} {y:.8e} {z:.8e}").unwrap();
    }
    let idx = |i: usize, j: usize| j * (samples + 1) + i + 1;
    for j in 0..samples {
        for i in 0..samples {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            writeln!(out, "f {a} {b} {c}").unwrap();
            writeln!(out, "f {a} {c} {d}").unwrap();
        }
    }
    out
}

pub fn export_mesh(net: &NetOfQuadrics, domain: Domain, samples: usize, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, mesh_string(net, domain, samples))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPointScan {
    /// Unit directions, one per antipodal pair on the sphere; on the cylinder, normalized (a, b, c).
    pub directions: Vec<[f64; 3]>,
    /// More rank-deficient points than an isolated configuration allows.
    pub curve_of_singular_points: bool,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    a.map(|x| x / n)
}

/// σ_min/σ_max of the 3×2 matrix [j1 j2]; 0 when both columns vanish.
fn rank_ratio(j1: [f64; 3], j2: [f64; 3]) -> f64 {
    let (a, b, c) = (dot(j1, j1), dot(j2, j2), dot(j1, j2));
    let tr = a + b;
    if tr == 0.0 {
        return 0.0;
    }
    let smax2 = 0.5 * (tr + ((a - b).powi(2) + 4.0 * c * c).sqrt());
    // σ_min·σ_max = |j1 × j2|, which keeps precision when σ_min is tiny.
    norm(cross(j1, j2)) / smax2
}

/// Orthonormal tangent frame at a unit vector.
fn tangent_frame(u: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let k = (0..3).min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let t1 = unit(cross(u, e));
    (t1, cross(u, t1))
}

fn sphere_ratio(q: &QuadMap, u: [f64; 3]) -> f64 {
    let (t1, t2) = tangent_frame(u);
    rank_ratio(q.apply_derivative(u, t1), q.apply_derivative(u, t2))
}

fn cylinder_ratio(q: &QuadMap, theta: f64, c: f64) -> f64 {
    let u = [theta.cos(), theta.sin(), c];
    rank_ratio(q.apply_derivative(u, [-theta.sin(), theta.cos(), 0.0]), q.apply_derivative(u, [0.0, 0.0, 1.0]))
}

/// Minimizes f over R² from x0 with initial step h; stops when the simplex diameter drops below SIMPLEX_TOL.
fn nelder_mead<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut s: Vec<([f64; 2], f64)> = [x0, [x0[0] + h, x0[1]], [x0[0], x0[1] + h]].iter().map(|&p| (p, f(p))).collect();
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for _ in 0..2000 {
        s.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam = (1..3).map(|i| (s[i].0[0] - s[0].0[0]).hypot(s[i].0[1] - s[0].0[1])).fold(0.0, f64::max);
        if diam < SIMPLEX_TOL || s[0].1 == 0.0 {
            break;
        }
        let c = lerp(s[0].0, s[1].0, 0.5);
        let r = lerp(c, s[2].0, -1.0);
        let fr = f(r);
        if fr < s[0].1 {
            let e = lerp(c, s[2].0, -2.0);
            let fe = f(e);
            s[2] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < s[1].1 {
            s[2] = (r, fr);
        } else {
            let k = if fr < s[2].1 { lerp(c, r, 0.5) } else { lerp(c, s[2].0, 0.5) };
            let fk = f(k);
            if fk < s[2].1.min(fr) {
                s[2] = (k, fk);
            } else {
                let best = s[0].0;
                for p in s.iter_mut().skip(1) {
                    p.0 = lerp(best, p.0, 0.5);
                    p.1 = f(p.0);
                }
            }
        }
    }
    s.sort_by(|a, b| a.1.total_cmp(&b.1));
    s[0]
}

/// Nelder–Mead restarted from its own result until a restart stops improving; a collapsed
/// simplex in the flat valley around a high-order point otherwise stalls short of it.
fn nelder_mead_restarted<F: Fn([f64; 2]) -> f64>(f: F, x0: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut best = nelder_mead(&f, x0, h);
    for _ in 0..RESTARTS {
        let next = nelder_mead(&f, best.0, h);
        if next.1 >= best.1 {
            break;
        }
        best = next;
    }
    best
}

/// Whether the rank-deficient set continues through a small circle around x, i.e. x is not isolated.
fn on_curve<F: Fn([f64; 2]) -> f64>(f: F, x: [f64; 2]) -> bool {
    let at = |a: f64| f([x[0] + PROBE_RADIUS * a.cos(), x[1] + PROBE_RADIUS * a.sin()]);
    let step = TAU / PROBE_SAMPLES as f64;
    let k = (0..PROBE_SAMPLES).min_by(|&i, &j| at(i as f64 * step).total_cmp(&at(j as f64 * step))).unwrap();
    // Golden-section search on the bracketing arc.
    let (mut lo, mut hi) = ((k as f64 - 1.0) * step, (k as f64 + 1.0) * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if at(a) < at(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    at(0.5 * (lo + hi)) < PROBE_TOL
}

/// Grid cells that are a minimum along their row (θ wraps) or along their column. A superset of the
/// 2D local minima that also seeds every stretch of a curve of zeros.
fn grid_seeds(values: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = values.len();
    let cols = values[0].len();
    let mut out = Vec::new();
    for j in 0..rows {
        for i in 0..cols {
            let v = values[j][i];
            let row_min = v <= values[j][(i + cols - 1) % cols] && v <= values[j][(i + 1) % cols];
            let col_min = (j == 0 || v <= values[j - 1][i]) && (j + 1 == rows || v <= values[j + 1][i]);
            if row_min || col_min {
                out.push((j, i));
            }
        }
    }
    out
}

/// Adds u unless an earlier detection lies within MERGE_ANGLE; the lower ratio wins.
fn push_unique(found: &mut Vec<([f64; 3], f64)>, u: [f64; 3], v: f64) {
    let u = canonical_sign(u);
    match found.iter_mut().find(|(w, _)| dot(*w, u).abs().min(1.0).acos() < MERGE_ANGLE) {
        Some(slot) if v < slot.1 => *slot = (u, v),
        Some(_) => {}
        None => found.push((u, v)),
    }
}

/// Representative of ±u with the largest-magnitude coordinate positive.
fn canonical_sign(u: [f64; 3]) -> [f64; 3] {
    let k = (0..3).max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs())).unwrap();
    if u[k] < 0.0 {
        u.map(|x| -x)
    } else {
        u
    }
}

/// Points where η restricted to the domain has Jacobian rank < 2 (σ_min/σ_max < tol), found as
/// row and column minima of a grid refined by Nelder–Mead in a local chart. Directions are identified up to sign.
pub fn numeric_singular_points(net: &NetOfQuadrics, domain: Domain, grid: usize, tol: f64) -> SingularPointScan {
    assert!(grid >= 64, "grid must be at least 64");
    let q = QuadMap::new(net);
    let mut found: Vec<([f64; 3], f64)> = Vec::new();
    let mut hits = 0usize;
    let mut curve = false;
    match domain {
        Domain::Sphere => {
            let (rows, cols) = (grid, 2 * grid);
            let param = |j: usize, i: usize| (TAU * i as f64 / cols as f64, PI * (j as f64 + 0.5) / rows as f64);
            let values = par_rows(rows, |j| vec![(0..cols).map(|i| { let (t, p) = param(j, i); sphere_ratio(&q, sphere_point(t, p)) }).collect::<Vec<f64>>()]);
            let h = PI / rows as f64;
            curve |= values.iter().flatten().filter(|&&v| v < tol).count() > CURVE_CELLS;
            for (j, i) in grid_seeds(&values) {
                if found.len() > CURVE_CAP {
                    break;
                }
                let (t, p) = param(j, i);
                let u0 = sphere_point(t, p);
                let (t1, t2) = tangent_frame(u0);
                let at = |x: [f64; 2]| unit(std::array::from_fn(|k| u0[k] + x[0] * t1[k] + x[1] * t2[k]));
                let (x, v) = nelder_mead_restarted(|x| sphere_ratio(&q, at(x)), [0.0, 0.0], h);
                if v < tol {
                    hits += 1;
                    let u = at(x);
                    let (s1, s2) = tangent_frame(u);
                    curve |= on_curve(|y| sphere_ratio(&q, unit(std::array::from_fn(|k| u[k] + y[0] * s1[k] + y[1] * s2[k]))), [0.0, 0.0]);
                    push_unique(&mut found, u, v);
                }
            }
        }
        Domain::Cylinder { height } => {
            // c = tan ψ keeps the grid resolution independent of the height.
            let (rows, cols) = (grid, 2 * grid);
            let top = height.atan();
            let param = |j: usize, i: usize| (TAU * i as f64 / cols as f64, -top + 2.0 * top * (j as f64 + 0.5) / rows as f64);
            let values = par_rows(rows, |j| vec![(0..cols).map(|i| { let (t, psi) = param(j, i); cylinder_ratio(&q, t, psi.tan()) }).collect::<Vec<f64>>()]);
            let h = PI / rows as f64;
            curve |= values.iter().flatten().filter(|&&v| v < tol).count() > CURVE_CELLS;
            for (j, i) in grid_seeds(&values) {
                if found.len() > CURVE_CAP {
                    break;
                }
                let (t0, p0) = param(j, i);
                let f = |x: [f64; 2]| if (p0 + x[1]).abs() > top { f64::INFINITY } else { cylinder_ratio(&q, t0 + x[0], (p0 + x[1]).tan()) };
                let (x, v) = nelder_mead_restarted(f, [0.0, 0.0], h);
                let (t, c) = (t0 + x[0], (p0 + x[1]).tan());
                if v >= tol {
                    continue;
                }
                curve |= on_curve(f, x);
                // Isolated minima in the outermost band are truncation artifacts that move outward with the height.
                if (p0 + x[1]).abs() <= top - h {
                    hits += 1;
                    push_unique(&mut found, unit([t.cos(), t.sin(), c]), v);
                }
            }
        }
    }
    let mut directions: Vec<[f64; 3]> = found.into_iter().map(|(u, _)| u).collect();
    directions.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    let curve = curve || directions.len() > MAX_ISOLATED || (hits > 0 && directions.is_empty());
    SingularPointScan { directions, curve_of_singular_points: curve }
}

/// Smallest angle between the lines spanned by a and b.
pub fn line_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    (dot(a, b).abs() / (norm(a) * norm(b))).min(1.0).acos()
}
