//! Sparse polynomials in (x, y, z) with exact multiquadratic coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::surd::Surd;

pub type Exp = [u32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("all inputs are zero")]
    AllZero,
    #[error("variable has degree zero in an input; nothing to eliminate")]
    NoElimination,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TernaryPoly {
    terms: BTreeMap<Exp, Surd>,
}

impl TernaryPoly {
    pub fn zero() -> TernaryPoly {
        TernaryPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Surd) -> TernaryPoly {
        TernaryPoly::monomial([0, 0, 0], c)
    }

    pub fn one() -> TernaryPoly {
        TernaryPoly::constant(Surd::one())
    }

    pub fn monomial(e: Exp, c: Surd) -> TernaryPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        TernaryPoly { terms }
    }

    pub fn var(v: Var) -> TernaryPoly {
        let mut e = [0; 3];
        e[v.index()] = 1;
        TernaryPoly::monomial(e, Surd::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Surd)>>(it: I) -> TernaryPoly {
        let mut p = TernaryPoly::zero();
        for (e, c) in it {
            p.add_term(e, &c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exp, c: &Surd) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Surd::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Surd)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exp) -> Surd {
        self.terms.get(&e).cloned().unwrap_or_else(Surd::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e == &[0, 0, 0])
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    /// `Some(d)` when every term has total degree d (the zero polynomial is not homogeneous).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|k| k == d).then_some(d)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.values().all(Surd::is_rational)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Surd::is_real)
    }

    pub fn scale(&self, c: &Surd) -> TernaryPoly {
        if c.is_zero() {
            return TernaryPoly::zero();
        }
        TernaryPoly { terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> TernaryPoly {
        (0..n).fold(TernaryPoly::one(), |acc, _| &acc * self)
    }

    pub fn differentiate(&self, v: Var) -> TernaryPoly {
        let i = v.index();
        let mut out = TernaryPoly::zero();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                out.add_term(f, &c.scale(&BigRational::from_integer(e[i].into())));
            }
        }
        out
    }

    pub fn gradient(&self) -> [TernaryPoly; 3] {
        Var::ALL.map(|v| self.differentiate(v))
    }

    pub fn eval(&self, p: &[Surd; 3]) -> Surd {
        let mut acc = Surd::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for k in 0..3 {
                if e[k] > 0 {
                    t = &t * &p[k].pow(e[k]);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_complex(&self, p: &[Complex64; 3]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * p[0].powu(e[0]) * p[1].powu(e[1]) * p[2].powu(e[2]))
            .sum()
    }

    /// Σ |c|·|monomial(p)|, a scale for judging whether `eval_complex` is small.
    pub fn eval_scale(&self, p: &[Complex64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c.to_complex().norm()
                    * p[0].norm().powi(e[0] as i32)
                    * p[1].norm().powi(e[1] as i32)
                    * p[2].norm().powi(e[2] as i32)
            })
            .sum()
    }

    /// Substitutes (x, y, z) ↦ M·(x, y, z), i.e. returns p ∘ M.
    pub fn compose_linear(&self, m: &[[Surd; 3]; 3]) -> TernaryPoly {
        let rows: Vec<TernaryPoly> = (0..3)
            .map(|i| {
                TernaryPoly::from_terms(
                    (0..3).map(|j| {
                        let mut e = [0; 3];
                        e[j] = 1;
                        (e, m[i][j].clone())
                    }),
                )
            })
            .collect();
        let mut powers: Vec<Vec<TernaryPoly>> = Vec::new();
        for row in &rows {
            let max = self.terms.keys().map(|e| e[powers.len()]).max().unwrap_or(0);
            let mut ps = vec![TernaryPoly::one()];
            for k in 1..=max as usize {
                let next = &ps[k - 1] * row;
                ps.push(next);
            }
            powers.push(ps);
        }
        let mut out = TernaryPoly::zero();
        for (e, c) in &self.terms {
            let t = &(&powers[0][e[0] as usize] * &powers[1][e[1] as usize]) * &powers[2][e[2] as usize];
            out = &out + &t.scale(c);
        }
        out
    }

    /// Leading term in graded lexicographic order (x > y > z).
    pub fn leading_grlex(&self) -> Option<(Exp, &Surd)> {
        self.terms
            .iter()
            .max_by(|a, b| {
                let da: u32 = a.0.iter().sum();
                let db: u32 = b.0.iter().sum();
                da.cmp(&db).then(a.0.cmp(b.0))
            })
            .map(|(e, c)| (*e, c))
    }

    fn leading_lex(&self) -> Option<(Exp, &Surd)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// Exact quotient self / g when g divides self, otherwise `None`.
    pub fn div_exact(&self, g: &TernaryPoly) -> Option<TernaryPoly> {
        let (ge, gc) = g.leading_lex()?;
        let gc_inv = gc.inv()?;
        let mut r = self.clone();
        let mut q = TernaryPoly::zero();
        while let Some((re, rc)) = r.leading_lex() {
            if (0..3).any(|k| re[k] < ge[k]) {
                return None;
            }
            let e = [re[0] - ge[0], re[1] - ge[1], re[2] - ge[2]];
            let t = TernaryPoly::monomial(e, rc * &gc_inv);
            r = &r - &(&t * g);
            q = &q + &t;
        }
        Some(q)
    }

    /// Coefficients of powers of `v`, each free of `v`.
    pub fn coeffs_in(&self, v: Var) -> Vec<TernaryPoly> {
        let i = v.index();
        let mut out = vec![TernaryPoly::zero(); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut f = *e;
            f[i] = 0;
            out[e[i] as usize].add_term(f, c);
        }
        out
    }

    fn from_coeffs_in(v: Var, cs: &[TernaryPoly]) -> TernaryPoly {
        let i = v.index();
        let mut out = TernaryPoly::zero();
        for (k, c) in cs.iter().enumerate() {
            for (e, a) in &c.terms {
                let mut f = *e;
                f[i] += k as u32;
                out.add_term(f, a);
            }
        }
        out
    }

    /// Normal form up to a unit: integer coefficients with content 1 and
    /// positive graded-lex leading coefficient when all coefficients are
    /// rational; otherwise graded-lex leading coefficient 1.
    pub fn normalized(&self) -> TernaryPoly {
        let Some((_, lc)) = self.leading_grlex() else {
            return TernaryPoly::zero();
        };
        if self.is_rational() {
            let qs: Vec<BigRational> = self.terms.values().map(|c| c.as_rational().unwrap()).collect();
            let den = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let num = qs.iter().fold(BigInt::zero(), |acc, q| acc.gcd(&(q.numer() * (&den / q.denom()))));
            let mut factor = BigRational::new(den, num);
            if lc.as_rational().unwrap().is_negative() {
                factor = -factor;
            }
            self.scale(&Surd::from_rational(factor))
        } else {
            self.scale(&lc.inv().unwrap())
        }
    }

    /// Greatest common divisor, normalized as in [`TernaryPoly::normalized`].
    pub fn gcd(&self, other: &TernaryPoly) -> TernaryPoly {
        gcd_rec(self, other, &Var::ALL).normalized()
    }

    /// Sylvester resultant eliminating `v`.
    pub fn resultant(&self, other: &TernaryPoly, v: Var) -> Result<TernaryPoly, PolyError> {
        let m = self.degree_in(v) as usize;
        let n = other.degree_in(v) as usize;
        if self.is_zero() || other.is_zero() || m == 0 || n == 0 {
            return Err(PolyError::NoElimination);
        }
        let a = self.coeffs_in(v);
        let b = other.coeffs_in(v);
        let size = m + n;
        let mut rows: Vec<Vec<TernaryPoly>> = Vec::with_capacity(size);
        for i in 0..n {
            let mut row = vec![TernaryPoly::zero(); size];
            for k in 0..=m {
                row[i + k] = a[m - k].clone();
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![TernaryPoly::zero(); size];
            for k in 0..=n {
                row[i + k] = b[n - k].clone();
            }
            rows.push(row);
        }
        Ok(det_subset(&rows))
    }
}

/// Division-free determinant by dynamic programming over column subsets.
pub fn det_subset(rows: &[Vec<TernaryPoly>]) -> TernaryPoly {
    let n = rows.len();
    let mut layer: BTreeMap<u32, TernaryPoly> = BTreeMap::new();
    layer.insert(0, TernaryPoly::one());
    for row in rows {
        let mut next: BTreeMap<u32, TernaryPoly> = BTreeMap::new();
        for (mask, acc) in &layer {
            for (j, entry) in row.iter().enumerate().take(n) {
                if mask >> j & 1 == 1 || entry.is_zero() {
                    continue;
                }
                let inversions = (mask >> (j + 1)).count_ones();
                let mut t = acc * entry;
                if inversions % 2 == 1 {
                    t = -t;
                }
                let slot = next.entry(mask | 1 << j).or_insert_with(TernaryPoly::zero);
                *slot = &*slot + &t;
            }
        }
        layer = next;
    }
    layer.remove(&((1u32 << n) - 1)).unwrap_or_else(TernaryPoly::zero)
}

/// Laplace expansion of a 3×3 determinant.
pub fn det3(m: &[[TernaryPoly; 3]; 3]) -> TernaryPoly {
    let minor = |a: usize, b: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][b] * &m[2][a]);
    let t0 = &m[0][0] * &minor(1, 2);
    let t1 = &m[0][1] * &minor(0, 2);
    let t2 = &m[0][2] * &minor(0, 1);
    &(&t0 - &t1) + &t2
}

/// gcd of a nonempty list; `AllZero` when every entry vanishes.
pub fn gcd_poly(ps: &[TernaryPoly]) -> Result<TernaryPoly, PolyError> {
    let mut acc = TernaryPoly::zero();
    for p in ps {
        acc = gcd_rec(&acc, p, &Var::ALL);
        if !acc.is_zero() {
            acc = acc.normalized();
        }
    }
    if acc.is_zero() {
        Err(PolyError::AllZero)
    } else {
        Ok(acc.normalized())
    }
}

fn content_in(f: &TernaryPoly, v: Var, rest: &[Var]) -> TernaryPoly {
    let mut c = TernaryPoly::zero();
    for k in f.coeffs_in(v) {
        c = gcd_rec(&c, &k, rest);
        if c.is_constant() && !c.is_zero() {
            return TernaryPoly::one();
        }
    }
    c
}

fn primitive_in(f: &TernaryPoly, v: Var, rest: &[Var]) -> TernaryPoly {
    let c = content_in(f, v, rest);
    let p = if c.is_constant() { f.clone() } else { f.div_exact(&c).expect("content divides") };
    p.normalized()
}

fn pseudo_rem(a: &TernaryPoly, b: &TernaryPoly, v: Var) -> TernaryPoly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc.last().unwrap().clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).pop().unwrap();
        let mut shift = vec![TernaryPoly::zero(); (dr - db) as usize + 1];
        shift[(dr - db) as usize] = lr;
        let t = &TernaryPoly::from_coeffs_in(v, &shift) * b;
        r = &(&r * &lb) - &t;
    }
    r
}

fn gcd_rec(f: &TernaryPoly, g: &TernaryPoly, vars: &[Var]) -> TernaryPoly {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    let Some((&v, rest)) = vars.split_first() else {
        return TernaryPoly::one();
    };
    if f.degree_in(v) == 0 && g.degree_in(v) == 0 {
        return gcd_rec(f, g, rest);
    }
    let c = gcd_rec(&content_in(f, v, rest), &content_in(g, v, rest), rest);
    let (mut a, mut b) = (primitive_in(f, v, rest), primitive_in(g, v, rest));
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    while b.degree_in(v) > 0 {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            break;
        }
        a = b;
        b = primitive_in(&r, v, rest);
    }
    let g = if b.degree_in(v) == 0 { TernaryPoly::one() } else { b };
    &c * &g
}

impl Add for &TernaryPoly {
    type Output = TernaryPoly;
    fn add(self, rhs: &TernaryPoly) -> TernaryPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub for &TernaryPoly {
    type Output = TernaryPoly;
    fn sub(self, rhs: &TernaryPoly) -> TernaryPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl Mul for &TernaryPoly {
    type Output = TernaryPoly;
    fn mul(self, rhs: &TernaryPoly) -> TernaryPoly {
        let mut out = TernaryPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], &(ca * cb));
            }
        }
        out
    }
}

impl Neg for TernaryPoly {
    type Output = TernaryPoly;
    fn neg(self) -> TernaryPoly {
        TernaryPoly { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Add for TernaryPoly {
    type Output = TernaryPoly;
    fn add(self, rhs: TernaryPoly) -> TernaryPoly {
        &self + &rhs
    }
}

impl Sub for TernaryPoly {
    type Output = TernaryPoly;
    fn sub(self, rhs: TernaryPoly) -> TernaryPoly {
        &self - &rhs
    }
}

impl Mul for TernaryPoly {
    type Output = TernaryPoly;
    fn mul(self, rhs: TernaryPoly) -> TernaryPoly {
        &self * &rhs
    }
}

impl fmt::Display for TernaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, ["x", "y", "z"])
    }
}

impl fmt::Debug for TernaryPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl TernaryPoly {
    /// Renders with custom variable names, terms in descending graded-lex order.
    pub fn to_string_with(&self, names: [&str; 3]) -> String {
        struct W<'a>(&'a TernaryPoly, [&'a str; 3]);
        impl fmt::Display for W<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        W(self, names).to_string()
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, names: [&str; 3]) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut items: Vec<(&Exp, &Surd)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in items.into_iter().enumerate() {
            let mono: Vec<String> = (0..3)
                .filter(|&i| e[i] > 0)
                .map(|i| if e[i] == 1 { names[i].to_string() } else { format!("{}^{}", names[i], e[i]) })
                .collect();
            let mono = mono.join("*");
            let simple = c.as_rational();
            let coeff = match &simple {
                Some(q) if k > 0 && q.is_negative() => {
                    f.write_str(" - ")?;
                    (-q.clone()).to_string()
                }
                Some(q) => {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    q.to_string()
                }
                None => {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    format!("({c})")
                }
            };
            if mono.is_empty() {
                f.write_str(&coeff)?;
            } else if coeff == "1" {
                f.write_str(&mono)?;
            } else if coeff == "-1" {
                write!(f, "-{mono}")?;
            } else {
                write!(f, "{coeff}*{mono}")?;
            }
        }
        Ok(())
    }
}
