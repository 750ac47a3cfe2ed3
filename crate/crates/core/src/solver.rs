//! Decomposition of V(δ, δ₁, δ₂, δ₃) into planes and projective lines with
//! local intersection multiplicities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::determinantal::CubicSystem;
use crate::linalg::{det_exact, det3_surd, matvec3, rank_exact, rank_numeric, Mat3};
use crate::poly::{gcd_poly, TernaryPoly, Var};
use crate::scalar::{default_tolerance, Scalar};
use crate::surd::Surd;
use crate::upoly::{interpolate, roots_squarefree, UPoly};

const ATTEMPTS: u64 = 5;
const MAX_DUAL_DEGREE: usize = 6;
const PAIR_TOL: f64 = 1e-7;
const NUMERIC_RANK_TOL: f64 = 1e-8;
const COARSE_TOL: f64 = 1e-6;
const REFINE_STEPS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("all four minors vanish identically")]
    DegenerateSystem,
    #[error("common factor {0} is not a product of real planes")]
    NonPlanarComponent(String),
    #[error("elimination did not give a consistent solution set across seeded attempts")]
    UnstableElimination,
    #[error("the system has a positive-dimensional component besides planes")]
    NotZeroDimensional,
    #[error("dual space at {0} did not stabilize by degree 6")]
    MultiplicityOverflow(String),
    #[error("total multiplicity {0} of a zero-dimensional system, expected 6")]
    MultiplicityMismatch(u32),
    #[error("complex line {0} has multiplicity 2")]
    ComplexDoubleLine(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reality {
    Real,
    ComplexPair,
}

/// A line through the origin, normalized so its last nonzero coordinate is 1.
/// A complex pair is represented by one member.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveLine {
    pub direction: [Scalar; 3],
    pub reality: Reality,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineSolution {
    pub direction: [Scalar; 3],
    pub reality: Reality,
    pub multiplicity: u32,
}

impl LineSolution {
    pub fn line(&self) -> ProjectiveLine {
        ProjectiveLine { direction: self.direction.clone(), reality: self.reality }
    }

    pub fn direction_complex(&self) -> [Complex64; 3] {
        self.direction.clone().map(|s| s.to_complex())
    }

    /// Real unit vector along a real line.
    pub fn unit_vector(&self) -> Option<[f64; 3]> {
        (self.reality == Reality::Real).then(|| {
            let v = self.direction_complex().map(|z| z.re);
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.map(|a| a / n)
        })
    }

    /// Counted twice for a complex pair.
    pub fn weight(&self) -> u32 {
        match self.reality {
            Reality::Real => self.multiplicity,
            Reality::ComplexPair => 2 * self.multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarietyDecomposition {
    #[serde(serialize_with = "serialize_planes")]
    pub planes: Vec<TernaryPoly>,
    pub lines: Vec<LineSolution>,
    pub total_multiplicity: u32,
    pub zero_dimensional: bool,
}

fn serialize_planes<S: serde::Serializer>(planes: &[TernaryPoly], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(planes.iter().map(|p| p.to_string()))
}

impl VarietyDecomposition {
    pub fn real_lines(&self) -> impl Iterator<Item = &LineSolution> {
        self.lines.iter().filter(|l| l.reality == Reality::Real)
    }

    pub fn complex_pairs(&self) -> impl Iterator<Item = &LineSolution> {
        self.lines.iter().filter(|l| l.reality == Reality::ComplexPair)
    }

    pub fn real_count(&self) -> usize {
        self.real_lines().count()
    }

    /// Sorted (multiplicity, reality) multiset.
    pub fn census(&self) -> Vec<(u32, Reality)> {
        let mut c: Vec<(u32, Reality)> = self.lines.iter().map(|l| (l.multiplicity, l.reality)).collect();
        c.sort();
        c
    }

    /// Sorted multiplicities of the real lines.
    pub fn real_multiplicities(&self) -> Vec<u32> {
        let mut m: Vec<u32> = self.real_lines().map(|l| l.multiplicity).collect();
        m.sort();
        m
    }
}

/// Splits off the common factor of the four cubics as a list of real planes.
pub fn plane_components(sys: &CubicSystem) -> Result<(Vec<TernaryPoly>, CubicSystem), SolverError> {
    if sys.is_all_zero() {
        return Err(SolverError::DegenerateSystem);
    }
    let nonzero: Vec<TernaryPoly> = sys.polys().into_iter().filter(|p| !p.is_zero()).cloned().collect();
    let g = gcd_poly(&nonzero).map_err(|_| SolverError::DegenerateSystem)?;
    let residual = CubicSystem::new(sys.polys().map(|p| {
        if p.is_zero() {
            TernaryPoly::zero()
        } else {
            p.div_exact(&g).expect("gcd divides every input")
        }
    }));
    Ok((linear_factors(&g)?, residual))
}

/// Distinct real linear factors of a homogeneous form; anything else is an error.
fn linear_factors(g: &TernaryPoly) -> Result<Vec<TernaryPoly>, SolverError> {
    let mut rest = g.clone();
    let mut planes = Vec::new();
    while rest.degree().unwrap_or(0) > 0 {
        let Some(l) = find_linear_factor(&rest) else {
            return Err(SolverError::NonPlanarComponent(rest.normalized().to_string()));
        };
        if !l.is_real() {
            return Err(SolverError::NonPlanarComponent(rest.normalized().to_string()));
        }
        while let Some(q) = rest.div_exact(&l) {
            rest = q;
        }
        planes.push(l);
    }
    Ok(planes)
}

fn find_linear_factor(h: &TernaryPoly) -> Option<TernaryPoly> {
    let d = h.homogeneous_degree()?;
    let changes: [[[i64; 3]; 3]; 4] = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 1], [0, 1, 1], [0, 0, 1]],
        [[1, 0, -1], [0, 1, 2], [0, 0, 1]],
        [[1, 0, 2], [0, 1, -3], [0, 0, 1]],
    ];
    for m in changes {
        let m = crate::linalg::from_ints3(m);
        let hm = h.compose_linear(&m);
        if hm.coeff([0, 0, d]).is_zero() {
            continue;
        }
        // Every factor is z − αx − βy up to scale; α from h(1,0,t), β from h(0,1,t).
        let slice = |e: &dyn Fn(u32) -> [u32; 3]| UPoly::new((0..=d).map(|k| hm.coeff(e(k))).collect());
        let alphas = exact_roots(&slice(&|k| [d - k, 0, k]));
        let betas = exact_roots(&slice(&|k| [0, d - k, k]));
        let minv = crate::linalg::inverse3(&m).unwrap();
        for a in &alphas {
            for b in &betas {
                let l = TernaryPoly::from_terms([([0, 0, 1], Surd::from_int(1)), ([1, 0, 0], -a), ([0, 1, 0], -b)]);
                if hm.div_exact(&l).is_some() {
                    return Some(l.compose_linear(&minv).normalized());
                }
            }
        }
        return None;
    }
    None
}

fn exact_roots(p: &UPoly) -> Vec<Surd> {
    if p.degree() == 0 {
        return Vec::new();
    }
    roots_squarefree(&p.squarefree_part()).into_iter().filter_map(|r| r.as_exact().cloned()).collect()
}

fn attempt_seed(seed: u64, attempt: u64) -> u64 {
    seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Projective solutions of a system with no common factor, found by one seeded elimination.
pub fn line_solutions(sys: &CubicSystem, seed: u64) -> Result<Vec<ProjectiveLine>, SolverError> {
    let f: Vec<&TernaryPoly> = sys.polys().into_iter().filter(|p| !p.is_zero()).collect();
    if f.is_empty() {
        return Err(SolverError::DegenerateSystem);
    }
    if f.iter().any(|p| p.is_constant()) {
        return Ok(Vec::new());
    }
    let tol = default_tolerance();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = random_invertible(&mut rng);
    let p: Vec<TernaryPoly> = f.iter().map(|q| q.compose_linear(&c)).collect();
    let combos: Vec<TernaryPoly> = (0..4).map(|_| random_combination(&p, &mut rng)).collect();
    let total_degree = p.iter().filter_map(|q| q.degree()).max().unwrap_or(0) as usize;
    let res = |a: &TernaryPoly, b: &TernaryPoly, elim: Var| chart_resultant(a, b, elim, total_degree);
    let rx = res(&combos[0], &combos[1], Var::Z).gcd(&res(&combos[2], &combos[3], Var::Z));
    let rz = res(&combos[0], &combos[2], Var::X).gcd(&res(&combos[1], &combos[3], Var::X));
    if rx.is_zero() || rz.is_zero() {
        return Err(SolverError::NotZeroDimensional);
    }
    let xs = roots_of(&rx);
    let zs = roots_of(&rz);
    let mut found: Vec<[Scalar; 3]> = Vec::new();
    let grads: Vec<[TernaryPoly; 2]> = p.iter().map(|pi| [pi.differentiate(Var::X), pi.differentiate(Var::Z)]).collect();
    for x in &xs {
        for z in &zs {
            let mut q = [x.clone(), Scalar::one(), z.clone()];
            if !p.iter().all(|pi| vanishes_at(pi, &q, tol)) {
                if !p.iter().all(|pi| vanishes_at(pi, &q, COARSE_TOL)) {
                    continue;
                }
                match refine(&p, &grads, &q) {
                    Some(r) if p.iter().all(|pi| vanishes_at(pi, &r, tol)) => q = r,
                    _ => continue,
                }
            }
            let v = normalize(&map_point(&c, &q), tol);
            let v = snap(v, &f);
            if !found.iter().any(|w| projectively_equal(w, &v, PAIR_TOL)) {
                found.push(v);
            }
        }
    }
    pair_conjugates(found, tol)
}

/// Gauss-Newton on the chart y = 1; `None` if the iteration drifts away from the start.
fn refine(p: &[TernaryPoly], grads: &[[TernaryPoly; 2]], q: &[Scalar; 3]) -> Option<[Scalar; 3]> {
    let one = Complex64::new(1.0, 0.0);
    let (x0, z0) = (q[0].to_complex(), q[2].to_complex());
    let (mut x, mut z) = (x0, z0);
    for _ in 0..REFINE_STEPS {
        let pt = [x, one, z];
        let f: Vec<Complex64> = p.iter().map(|pi| pi.eval_complex(&pt)).collect();
        let j: Vec<[Complex64; 2]> = grads.iter().map(|g| [g[0].eval_complex(&pt), g[1].eval_complex(&pt)]).collect();
        let (mut a, mut b, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut r0, mut r1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (ji, fi) in j.iter().zip(&f) {
            a += ji[0].conj() * ji[0];
            b += ji[0].conj() * ji[1];
            d += ji[1].conj() * ji[1];
            r0 += ji[0].conj() * fi;
            r1 += ji[1].conj() * fi;
        }
        let det = a * d - b * b.conj();
        if det.norm() <= 1e-300 || !det.norm().is_finite() {
            break;
        }
        let dx = (d * r0 - b * r1) / det;
        let dz = (a * r1 - b.conj() * r0) / det;
        x -= dx;
        z -= dz;
        if dx.norm() + dz.norm() <= 1e-15 * (1.0 + x.norm() + z.norm()) {
            break;
        }
    }
    let scale = 1.0 + x0.norm() + z0.norm();
    if !(x.norm() + z.norm()).is_finite() || (x - x0).norm() + (z - z0).norm() > 1e-3 * scale {
        return None;
    }
    let fix = |w: Complex64| Scalar::Approx(if w.im.abs() <= 1e-12 * (1.0 + w.re.abs()) { Complex64::new(w.re, 0.0) } else { w });
    Some([fix(x), Scalar::one(), fix(z)])
}

fn roots_of(r: &UPoly) -> Vec<Scalar> {
    if r.degree() == 0 {
        return Vec::new();
    }
    roots_squarefree(&r.squarefree_part())
}

fn random_invertible(rng: &mut ChaCha8Rng) -> Mat3 {
    loop {
        let m: Mat3 = std::array::from_fn(|_| std::array::from_fn(|_| Surd::from_int(rng.gen_range(-3..=3))));
        if !det3_surd(&m).is_zero() {
            return m;
        }
    }
}

fn random_combination(p: &[TernaryPoly], rng: &mut ChaCha8Rng) -> TernaryPoly {
    p.iter().fold(TernaryPoly::zero(), |acc, q| {
        let k = rng.gen_range(1..=7) * if rng.gen_bool(0.5) { 1 } else { -1 };
        &acc + &q.scale(&Surd::from_int(k))
    })
}

/// Resultant of a(x, 1, z) and b(x, 1, z) eliminating `elim` (x or z), as a
/// univariate polynomial in the other variable; computed by evaluation and interpolation.
fn chart_resultant(a: &TernaryPoly, b: &TernaryPoly, elim: Var, total_degree: usize) -> UPoly {
    let keep = if elim == Var::X { Var::Z } else { Var::X };
    let ca = chart_coeffs(a, elim, keep);
    let cb = chart_coeffs(b, elim, keep);
    let (m, n) = (ca.len() - 1, cb.len() - 1);
    let bound = (total_degree * total_degree).max(m + n) + 1;
    let xs: Vec<i64> = (0..=bound as i64).collect();
    let ys: Vec<Surd> = xs
        .iter()
        .map(|&x0| {
            let t = Surd::from_int(x0);
            let av: Vec<Surd> = ca.iter().map(|c| c.eval(&t)).collect();
            let bv: Vec<Surd> = cb.iter().map(|c| c.eval(&t)).collect();
            det_exact(sylvester(&av, &bv))
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Coefficients (ascending in `elim`) of p(x, 1, z) as polynomials in `keep`.
fn chart_coeffs(p: &TernaryPoly, elim: Var, keep: Var) -> Vec<UPoly> {
    let mut table: BTreeMap<(u32, u32), Surd> = BTreeMap::new();
    for (e, c) in p.terms() {
        *table.entry((e[elim.index()], e[keep.index()])).or_insert_with(|| Surd::from_int(0)) += c;
    }
    let m = table.keys().map(|k| k.0).max().unwrap_or(0) as usize;
    (0..=m)
        .map(|i| {
            let deg = table.keys().filter(|k| k.0 as usize == i).map(|k| k.1).max().unwrap_or(0) as usize;
            UPoly::new(
                (0..=deg)
                    .map(|j| table.get(&(i as u32, j as u32)).cloned().unwrap_or_else(|| Surd::from_int(0)))
                    .collect(),
            )
        })
        .collect()
}

/// Sylvester matrix of two univariate polynomials given by ascending coefficients.
fn sylvester(a: &[Surd], b: &[Surd]) -> Vec<Vec<Surd>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![Surd::from_int(0); size];
        for k in 0..=m {
            row[i + k] = a[m - k].clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Surd::from_int(0); size];
        for k in 0..=n {
            row[i + k] = b[n - k].clone();
        }
        rows.push(row);
    }
    rows
}

fn vanishes_at(p: &TernaryPoly, q: &[Scalar; 3], tol: f64) -> bool {
    if let (Some(a), Some(b), Some(c)) = (q[0].as_exact(), q[1].as_exact(), q[2].as_exact()) {
        return p.eval(&[a.clone(), b.clone(), c.clone()]).is_zero();
    }
    let z = q.clone().map(|s| s.to_complex());
    p.eval_complex(&z).norm() <= 1e3 * tol * p.eval_scale(&z).max(f64::MIN_POSITIVE)
}

fn map_point(c: &Mat3, q: &[Scalar; 3]) -> [Scalar; 3] {
    if let (Some(a), Some(b), Some(d)) = (q[0].as_exact(), q[1].as_exact(), q[2].as_exact()) {
        return matvec3(c, &[a.clone(), b.clone(), d.clone()]).map(Scalar::Exact);
    }
    let z = q.clone().map(|s| s.to_complex());
    std::array::from_fn(|i| Scalar::Approx((0..3).map(|k| c[i][k].to_complex() * z[k]).sum()))
}

/// Scales so the last nonzero coordinate is 1; approximate coordinates at noise level become 0.
pub fn normalize(v: &[Scalar; 3], tol: f64) -> [Scalar; 3] {
    if v.iter().all(Scalar::is_exact) {
        let e: Vec<Surd> = v.iter().map(|s| s.as_exact().unwrap().clone()).collect();
        let Some(k) = (0..3).rev().find(|&i| !e[i].is_zero()) else {
            return v.clone();
        };
        let inv = e[k].inv().unwrap();
        return std::array::from_fn(|i| Scalar::Exact(&e[i] * &inv));
    }
    let z = v.clone().map(|s| s.to_complex());
    let scale = z.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let small = |a: Complex64| a.norm() <= 1e2 * tol * scale;
    let Some(k) = (0..3).rev().find(|&i| !small(z[i])) else {
        return v.clone();
    };
    let zk = z[k];
    std::array::from_fn(|i| {
        if small(z[i]) {
            Scalar::Approx(Complex64::new(0.0, 0.0))
        } else {
            Scalar::Approx(z[i] / zk).realified(PAIR_TOL)
        }
    })
}

/// Replaces an approximate real direction by nearby small rationals when they solve the system exactly.
fn snap(v: [Scalar; 3], f: &[&TernaryPoly]) -> [Scalar; 3] {
    if v.iter().all(Scalar::is_exact) {
        return v;
    }
    let mut e = Vec::with_capacity(3);
    for s in &v {
        let z = s.to_complex();
        if z.im != 0.0 {
            return v;
        }
        match rationalize(z.re, 10_000) {
            Some(q) => e.push(Surd::from_rational(q)),
            None => return v,
        }
    }
    let e = [e[0].clone(), e[1].clone(), e[2].clone()];
    if f.iter().all(|p| p.eval(&e).is_zero()) {
        e.map(Scalar::Exact)
    } else {
        v
    }
}

/// Continued-fraction approximation with denominator ≤ `max_den`, accepted only when very close.
fn rationalize(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() || x.abs() > 1e9 {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i64;
        let (h2, k2) = (ai.checked_mul(h1)?.checked_add(h0)?, ai.checked_mul(k1)?.checked_add(k0)?);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 1e-11 * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// True when the two directions span the same complex line (relative tolerance for approximations).
pub fn projectively_equal(a: &[Scalar; 3], b: &[Scalar; 3], tol: f64) -> bool {
    if a.iter().chain(b.iter()).all(Scalar::is_exact) {
        let x: Vec<&Surd> = a.iter().map(|s| s.as_exact().unwrap()).collect();
        let y: Vec<&Surd> = b.iter().map(|s| s.as_exact().unwrap()).collect();
        return (0..3).all(|i| (0..3).all(|j| (x[i] * y[j] - x[j] * y[i]).is_zero()));
    }
    let x = a.clone().map(|s| s.to_complex());
    let y = b.clone().map(|s| s.to_complex());
    let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (0..3).all(|i| (0..3).all(|j| (x[i] * y[j] - x[j] * y[i]).norm() <= tol * nx * ny))
}

fn is_real_direction(v: &[Scalar; 3]) -> bool {
    v.iter().all(|s| match s {
        Scalar::Exact(e) => e.is_real(),
        Scalar::Approx(z) => z.im == 0.0,
    })
}

fn pair_conjugates(found: Vec<[Scalar; 3]>, _tol: f64) -> Result<Vec<ProjectiveLine>, SolverError> {
    let mut out = Vec::new();
    let mut used = vec![false; found.len()];
    for i in 0..found.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if is_real_direction(&found[i]) {
            out.push(ProjectiveLine { direction: found[i].clone(), reality: Reality::Real });
            continue;
        }
        let conj = found[i].clone().map(|s| s.conj());
        let Some(j) = (0..found.len()).find(|&j| !used[j] && projectively_equal(&found[j], &conj, PAIR_TOL)) else {
            return Err(SolverError::UnstableElimination);
        };
        used[j] = true;
        // The member whose first non-real coordinate has positive imaginary part represents the pair.
        let first_im = |v: &[Scalar; 3]| v.iter().map(|s| s.to_complex().im).find(|im| *im != 0.0).unwrap_or(0.0);
        let rep = if first_im(&found[i]) > 0.0 { found[i].clone() } else { found[j].clone() };
        out.push(ProjectiveLine { direction: rep, reality: Reality::ComplexPair });
    }
    Ok(out)
}

/// Coefficient field used by the dual-space computation.
trait Coef: Clone {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_surd(s: &Surd) -> Self;
    fn rank(rows: Vec<Vec<Self>>) -> usize;
}

impl Coef for Surd {
    fn zero() -> Self {
        Surd::from_int(0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_surd(s: &Surd) -> Self {
        s.clone()
    }
    fn rank(rows: Vec<Vec<Self>>) -> usize {
        rank_exact(rows)
    }
}

impl Coef for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_surd(s: &Surd) -> Self {
        s.to_complex()
    }
    fn rank(rows: Vec<Vec<Self>>) -> usize {
        rank_numeric(&rows, NUMERIC_RANK_TOL)
    }
}

type Bivariate<T> = BTreeMap<(usize, usize), T>;

fn bmul<T: Coef>(a: &Bivariate<T>, b: &Bivariate<T>) -> Bivariate<T> {
    let mut out: Bivariate<T> = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = (ea.0 + eb.0, ea.1 + eb.1);
            let t = ca.mul(cb);
            let slot = out.entry(e).or_insert_with(T::zero);
            *slot = slot.add(&t);
        }
    }
    out
}

/// f(base + u·t1 + v·t2) as a polynomial in (u, v).
fn expand<T: Coef>(f: &TernaryPoly, base: &[T; 3], t1: &[T; 3], t2: &[T; 3]) -> Bivariate<T> {
    let lin: Vec<Bivariate<T>> = (0..3)
        .map(|c| BTreeMap::from([((0, 0), base[c].clone()), ((1, 0), t1[c].clone()), ((0, 1), t2[c].clone())]))
        .collect();
    let mut out: Bivariate<T> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut m = BTreeMap::from([((0, 0), T::from_surd(c))]);
        for (k, &p) in e.iter().enumerate() {
            for _ in 0..p {
                m = bmul(&m, &lin[k]);
            }
        }
        for (k, v) in m {
            let slot = out.entry(k).or_insert_with(T::zero);
            *slot = slot.add(&v);
        }
    }
    out
}

/// Macaulay dual-space dimension of the local ideal at the origin of the (u, v) plane.
fn dual_dimension<T: Coef>(hs: &[Bivariate<T>]) -> Option<u32> {
    let mut prev = 1usize;
    for k in 1..=MAX_DUAL_DEGREE {
        let cols: Vec<(usize, usize)> = (0..=k).flat_map(|d| (0..=d).map(move |i| (d - i, i))).collect();
        let index: BTreeMap<(usize, usize), usize> = cols.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut rows = Vec::new();
        for d in 0..k {
            for i in 0..=d {
                let beta = (d - i, i);
                for h in hs {
                    let mut row = vec![T::zero(); cols.len()];
                    let mut any = false;
                    for (e, c) in h {
                        let s = (e.0 + beta.0, e.1 + beta.1);
                        if let Some(&j) = index.get(&s) {
                            row[j] = row[j].add(c);
                            any = true;
                        }
                    }
                    if any {
                        rows.push(row);
                    }
                }
            }
        }
        let dim = cols.len() - T::rank(rows);
        if dim == prev {
            return Some(dim as u32);
        }
        prev = dim;
    }
    None
}

/// Scales to unit max coefficient; the minors can differ in scale by many orders of magnitude.
fn normalized(h: Bivariate<Complex64>) -> Bivariate<Complex64> {
    let m = h.values().map(|c| c.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        h.into_iter().map(|(e, c)| (e, c / m)).collect()
    } else {
        h
    }
}

/// Gauss-Newton in the (u, v) plane, kept only while the residual shrinks.
fn polish(polys: &[&TernaryPoly], mut b: [Complex64; 3], t1: &[Complex64; 3], t2: &[Complex64; 3]) -> [Complex64; 3] {
    let zero = Complex64::new(0.0, 0.0);
    let scale: Vec<f64> = polys.iter().map(|p| p.terms().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max)).collect();
    let residual = |b: &[Complex64; 3]| -> f64 {
        polys.iter().zip(&scale).map(|(p, s)| p.eval_complex(b).norm() / s).fold(0.0, f64::max)
    };
    let mut r = residual(&b);
    for _ in 0..REFINE_STEPS {
        let (mut a, mut o, mut d, mut r0, mut r1) = (zero, zero, zero, zero, zero);
        for (p, s) in polys.iter().zip(&scale) {
            let h = expand(p, &b, t1, t2);
            let get = |e: (usize, usize)| h.get(&e).copied().unwrap_or(zero) / *s;
            let (f, ju, jv) = (get((0, 0)), get((1, 0)), get((0, 1)));
            a += ju.conj() * ju;
            o += ju.conj() * jv;
            d += jv.conj() * jv;
            r0 += ju.conj() * f;
            r1 += jv.conj() * f;
        }
        let det = a * d - o * o.conj();
        if det.norm() <= 1e-300 || !det.norm().is_finite() {
            break;
        }
        let du = (d * r0 - o * r1) / det;
        let dv = (a * r1 - o.conj() * r0) / det;
        let next: [Complex64; 3] = std::array::from_fn(|i| b[i] - du * t1[i] - dv * t2[i]);
        let rn = residual(&next);
        if !(rn < r) {
            break;
        }
        b = next;
        r = rn;
    }
    b
}

fn multiplicity_in_plane(sys: &CubicSystem, base: &[Scalar; 3], t1: &[Surd; 3], t2: &[Surd; 3]) -> Result<u32, SolverError> {
    let polys: Vec<&TernaryPoly> = sys.polys().into_iter().filter(|p| !p.is_zero()).collect();
    let dim = if base.iter().all(Scalar::is_exact) {
        let b = base.clone().map(|s| s.as_exact().unwrap().clone());
        let hs: Vec<Bivariate<Surd>> = polys.iter().map(|p| expand(p, &b, t1, t2)).collect();
        dual_dimension(&hs)
    } else {
        let c1 = t1.clone().map(|s| s.to_complex());
        let c2 = t2.clone().map(|s| s.to_complex());
        let b = polish(&polys, base.clone().map(|s| s.to_complex()), &c1, &c2);
        let hs: Vec<Bivariate<Complex64>> = polys.iter().map(|p| normalized(expand(p, &b, &c1, &c2))).collect();
        dual_dimension(&hs)
    };
    dim.ok_or_else(|| SolverError::MultiplicityOverflow(format_direction(base)))
}

pub fn format_direction(v: &[Scalar; 3]) -> String {
    format!("({}, {}, {})", v[0], v[1], v[2])
}

fn unit_surd(i: usize) -> [Surd; 3] {
    std::array::from_fn(|k| Surd::from_int((k == i) as i64))
}

/// Local multiplicity on the affine chart where the largest coordinate of the direction is 1.
pub fn local_multiplicity(sys: &CubicSystem, line: &ProjectiveLine) -> Result<u32, SolverError> {
    let z = line.direction.clone().map(|s| s.to_complex());
    let w = (0..3).max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm())).unwrap();
    let base = scale_direction(&line.direction, w);
    let others: Vec<usize> = (0..3).filter(|&k| k != w).collect();
    multiplicity_in_plane(sys, &base, &unit_surd(others[0]), &unit_surd(others[1]))
}

/// Local multiplicity on the plane n·x = 1, which must not contain the line's direction at infinity.
pub fn multiplicity_on_plane(sys: &CubicSystem, line: &ProjectiveLine, n: &[Surd; 3]) -> Result<u32, SolverError> {
    let d = &line.direction;
    let dot = (0..3).fold(Scalar::zero(), |acc, i| {
        let t = Scalar::Exact(n[i].clone()).mul(&d[i]);
        match (&acc, &t) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(acc.to_complex() + t.to_complex()),
        }
    });
    let base: [Scalar; 3] = std::array::from_fn(|i| d[i].div(&dot));
    let k = (0..3).find(|&i| !n[i].is_zero()).expect("nonzero normal");
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let tangent = |a: usize| -> [Surd; 3] {
        let mut t = unit_surd(a);
        t[k] = -(&n[a] / &n[k]);
        t
    };
    multiplicity_in_plane(sys, &base, &tangent(others[0]), &tangent(others[1]))
}

fn scale_direction(v: &[Scalar; 3], w: usize) -> [Scalar; 3] {
    std::array::from_fn(|i| v[i].div(&v[w]))
}

fn on_plane(plane: &TernaryPoly, v: &[Scalar; 3], tol: f64) -> bool {
    vanishes_at(plane, v, tol)
}

/// Planes, lines and multiplicities of V(δ, δ₁, δ₂, δ₃); retries seeded eliminations until
/// the census is self-consistent (total 6 when zero-dimensional, two agreeing runs otherwise).
pub fn decompose(sys: &CubicSystem, seed: u64) -> Result<VarietyDecomposition, SolverError> {
    let (planes, residual) = plane_components(sys)?;
    let zero_dimensional = planes.is_empty();
    let tol = default_tolerance();
    let mut last_err = SolverError::UnstableElimination;
    let mut previous: Option<Vec<(u32, Reality)>> = None;
    for attempt in 0..ATTEMPTS {
        let lines = match line_solutions(&residual, attempt_seed(seed, attempt)) {
            Ok(l) => l,
            Err(e) => {
                last_err = e;
                continue;
            }
        };
        let mut sols = Vec::new();
        let mut failed = None;
        for l in lines.into_iter().filter(|l| !planes.iter().any(|p| on_plane(p, &l.direction, tol))) {
            match local_multiplicity(&residual, &l) {
                Ok(0) => {}
                Ok(m) => sols.push(LineSolution { direction: l.direction, reality: l.reality, multiplicity: m }),
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            last_err = e;
            continue;
        }
        if let Some(l) = sols.iter().find(|l| l.reality == Reality::ComplexPair && l.multiplicity == 2) {
            return Err(SolverError::ComplexDoubleLine(format_direction(&l.direction)));
        }
        sort_lines(&mut sols);
        let total: u32 = sols.iter().map(LineSolution::weight).sum();
        let d = VarietyDecomposition { planes: planes.clone(), lines: sols, total_multiplicity: total, zero_dimensional };
        if zero_dimensional {
            if total == 6 {
                return Ok(d);
            }
            last_err = SolverError::MultiplicityMismatch(total);
            continue;
        }
        let census = d.census();
        if previous.as_ref() == Some(&census) {
            return Ok(d);
        }
        previous = Some(census);
        last_err = SolverError::UnstableElimination;
    }
    Err(last_err)
}

/// Deterministic order: real before complex, then by coordinates.
fn sort_lines(lines: &mut [LineSolution]) {
    lines.sort_by(|a, b| {
        a.reality.cmp(&b.reality).then_with(|| {
            let (za, zb) = (a.direction_complex(), b.direction_complex());
            (0..3)
                .map(|i| za[i].re.total_cmp(&zb[i].re).then(za[i].im.total_cmp(&zb[i].im)))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}
