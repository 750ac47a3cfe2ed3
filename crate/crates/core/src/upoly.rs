//! Dense univariate polynomials over the surd field, binary forms, and root extraction.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Scalar;
use crate::surd::Surd;

/// Coefficients in ascending powers; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    c: Vec<Surd>,
}

impl UPoly {
    pub fn new(mut c: Vec<Surd>) -> UPoly {
        while c.last().is_some_and(Surd::is_zero) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> UPoly {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> UPoly {
        UPoly::new(vec![Surd::one()])
    }

    pub fn coeffs(&self) -> &[Surd] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Surd {
        self.c.last().cloned().unwrap_or_else(Surd::zero)
    }

    pub fn is_rational(&self) -> bool {
        self.c.iter().all(Surd::is_rational)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new(
            (0..n)
                .map(|i| match (self.c.get(i), o.c.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    _ => Surd::zero(),
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.scale(&Surd::from_int(-1)))
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Surd::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UPoly::new(out)
    }

    pub fn scale(&self, k: &Surd) -> UPoly {
        UPoly::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.scale(&BigRational::from_integer(i.into())))
                .collect(),
        )
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let inv = d.lc().inv().unwrap();
        let mut r = self.c.clone();
        let dd = d.degree();
        if r.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let mut q = vec![Surd::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = &r[k + dd] * &inv;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &(&t * b);
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        self.scale(&self.lc().inv().unwrap())
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            // keep coefficient size in check between steps
            b = r.monic();
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> UPoly {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Yun's algorithm: monic squarefree factors paired with multiplicity.
    pub fn squarefree_decomposition(&self) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.divrem(&a0).0;
        let c = d.divrem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&dd);
            let nb = b.divrem(&a).0;
            let nc = dd.divrem(&a).0;
            dd = nc.sub(&nb.derivative());
            if a.degree() > 0 {
                out.push((a.monic(), i));
            }
            b = nb;
            i += 1;
        }
        out
    }

    pub fn eval(&self, t: &Surd) -> Surd {
        let mut acc = Surd::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * t) + a;
        }
        acc
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.c.iter().map(Surd::to_complex).collect()
    }

    /// Clears denominators and content of a rational polynomial, making the leading coefficient positive.
    pub fn primitive_integer(&self) -> Option<Vec<BigInt>> {
        let qs: Vec<BigRational> = self.c.iter().map(Surd::as_rational).collect::<Option<_>>()?;
        let den = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = qs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        if g.is_zero() {
            return None;
        }
        let sign = if ints.last()?.is_negative() { -BigInt::one() } else { BigInt::one() };
        Some(ints.iter().map(|n| n / &g * &sign).collect())
    }
}

/// Newton interpolation through (xᵢ, yᵢ) with distinct integer nodes.
pub fn interpolate(xs: &[i64], ys: &[Surd]) -> UPoly {
    let n = xs.len();
    let mut coef: Vec<Surd> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = Surd::from_int(xs[i] - xs[i - j]);
            coef[i] = &(&coef[i] - &coef[i - 1]) / &den;
        }
    }
    let mut p = UPoly::new(vec![coef[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        let lin = UPoly::new(vec![Surd::from_int(-xs[i]), Surd::one()]);
        p = p.mul(&lin).add(&UPoly::new(vec![coef[i].clone()]));
    }
    p
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots by Aberth–Ehrlich iteration; coefficients ascending.
pub fn aberth_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = c.to_vec();
    while c.last().is_some_and(|a| a.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lc = c[n];
    let c: Vec<Complex64> = c.iter().map(|a| a / lc).collect();
    // Fujiwara bound on root moduli
    let bound = (0..n)
        .map(|k| c[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let r0 = bound.max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0 * (0.5 + 0.5 * (k as f64 + 1.0) / n as f64), 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    z
}

fn round_big(x: f64) -> Option<BigInt> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    Some(BigInt::from(x.round() as i64))
}

fn near_int(x: f64) -> bool {
    x.is_finite() && x.abs() < 1e15 && (x - x.round()).abs() <= 1e-6 * x.abs().max(1.0)
}

/// Roots of a squarefree polynomial: exact (rational or rational-quadratic)
/// when the coefficients are rational and an exact check confirms, otherwise approximate.
pub fn roots_squarefree(h: &UPoly) -> Vec<Scalar> {
    let zs = aberth_roots(&h.to_complex());
    let Some(ints) = h.primitive_integer() else {
        return zs.into_iter().map(Scalar::Approx).collect();
    };
    let a = ints.last().unwrap().to_f64().unwrap_or(f64::INFINITY);
    let hq = UPoly::new(ints.iter().map(|n| Surd::from_rational(BigRational::from_integer(n.clone()))).collect());
    let mut out: Vec<Option<Scalar>> = vec![None; zs.len()];
    let lcq = BigRational::from_integer(ints.last().unwrap().clone());
    for (k, z) in zs.iter().enumerate() {
        if z.im.abs() > 1e-6 * z.re.abs().max(1.0) || !near_int(a * z.re) {
            continue;
        }
        if let Some(n) = round_big(a * z.re) {
            let cand = Surd::from_rational(BigRational::new(n, 1.into()) / &lcq);
            if hq.eval(&cand).is_zero() {
                out[k] = Some(Scalar::Exact(cand));
            }
        }
    }
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            if out[i].is_some() || out[j].is_some() {
                continue;
            }
            let s = zs[i] + zs[j];
            let p = zs[i] * zs[j];
            let tol = 1e-6;
            if s.im.abs() > tol * s.re.abs().max(1.0) || p.im.abs() > tol * p.re.abs().max(1.0) {
                continue;
            }
            if !near_int(a * s.re) || !near_int(a * p.re) {
                continue;
            }
            let (Some(ns), Some(np)) = (round_big(a * s.re), round_big(a * p.re)) else {
                continue;
            };
            let sq = BigRational::new(ns, 1.into()) / &lcq;
            let pq = BigRational::new(np, 1.into()) / &lcq;
            let quad = UPoly::new(vec![Surd::from_rational(pq.clone()), Surd::from_rational(-sq.clone()), Surd::one()]);
            if !hq.divrem(&quad).1.is_zero() {
                continue;
            }
            let disc = &sq * &sq - BigRational::from_integer(4.into()) * &pq;
            let Some(root) = Surd::sqrt_rational(&disc) else {
                continue;
            };
            let half = BigRational::new(1.into(), 2.into());
            let r1 = (&Surd::from_rational(sq.clone()) + &root).scale(&half);
            let r2 = (&Surd::from_rational(sq) - &root).scale(&half);
            if (r1.to_complex() - zs[i]).norm() <= (r2.to_complex() - zs[i]).norm() {
                out[i] = Some(Scalar::Exact(r1));
                out[j] = Some(Scalar::Exact(r2));
            } else {
                out[i] = Some(Scalar::Exact(r2));
                out[j] = Some(Scalar::Exact(r1));
            }
        }
    }
    out.into_iter().zip(zs).map(|(e, z)| e.unwrap_or(Scalar::Approx(z))).collect()
}

/// A binary form Σ aₖ·x^(d−k)·y^k, coefficients listed from x^d down to y^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryForm {
    coeffs: Vec<Surd>,
}

/// A projective root (x : y) of a binary form.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryRoot {
    pub root: [Scalar; 2],
    pub multiplicity: u32,
    pub real: bool,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Surd>) -> BinaryForm {
        BinaryForm { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Surd] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Surd::is_zero)
    }

    /// f(t, 1) as a univariate polynomial in t.
    pub fn dehomogenize(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().rev().cloned().collect())
    }
}

/// Roots of a nonzero binary form with multiplicities summing to its degree.
/// Complex roots are listed individually, so conjugates appear side by side.
pub fn roots_binary(f: &BinaryForm, tol: f64) -> Vec<BinaryRoot> {
    let mut out = Vec::new();
    if f.is_zero() {
        return out;
    }
    let at_infinity = f.coeffs.iter().take_while(|a| a.is_zero()).count() as u32;
    if at_infinity > 0 {
        out.push(BinaryRoot { root: [Scalar::one(), Scalar::zero()], multiplicity: at_infinity, real: true });
    }
    let g = f.dehomogenize();
    for (factor, m) in g.squarefree_decomposition() {
        let mut roots: Vec<Scalar> = roots_squarefree(&factor).into_iter().map(|r| r.realified(tol)).collect();
        roots.sort_by(|a, b| {
            let (za, zb) = (a.to_complex(), b.to_complex());
            za.re.total_cmp(&zb.re).then(za.im.total_cmp(&zb.im))
        });
        for r in roots {
            let real = r.is_real(tol);
            out.push(BinaryRoot { root: [r, Scalar::one()], multiplicity: m, real });
        }
    }
    out
}
