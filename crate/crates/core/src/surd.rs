//! Exact arithmetic in multiquadratic fields Q(√-1, √2, √3, √5, ...).
//!
//! An element is a finite sum Σ qₛ·√s over squarefree integers s, with
//! √s = i·√|s| for negative s. The radicals {√s} are linearly independent
//! over Q, so equality and zero tests are exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const PRIMES: [u64; 63] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
];

/// Squarefree radicand stored as a generator set: bit 0 is -1, bit k is the k-th prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Radical(u64);

impl Radical {
    pub const ONE: Radical = Radical(0);
    pub const I: Radical = Radical(1);

    fn generator(bit: u32) -> i64 {
        if bit == 0 {
            -1
        } else {
            PRIMES[bit as usize - 1] as i64
        }
    }

    fn bits(self) -> impl Iterator<Item = u32> {
        (0..64u32).filter(move |b| self.0 >> b & 1 == 1)
    }

    /// The signed squarefree integer s with this radical equal to √s.
    pub fn value(self) -> BigInt {
        self.bits().map(|b| BigInt::from(Self::generator(b))).product()
    }

    pub fn is_imaginary(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// √S·√T = (∏ common generators)·√(S △ T).
    fn mul(self, other: Radical) -> (i64, Radical) {
        let common = Radical(self.0 & other.0);
        let factor = common.bits().map(Self::generator).product();
        (factor, Radical(self.0 ^ other.0))
    }

    fn highest_bit(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros())
        }
    }

    /// Writes a nonzero integer as square·radicand. `None` when a prime factor
    /// outside the supported table survives to an odd power.
    fn split(n: &BigInt) -> Option<(BigInt, Radical)> {
        if n.is_zero() {
            return None;
        }
        let mut mask = if n.is_negative() { 1u64 } else { 0 };
        let mut rest = n.abs();
        let mut square_root = BigInt::one();
        for (k, &p) in PRIMES.iter().enumerate() {
            let p = BigInt::from(p);
            let mut e = 0u32;
            while rest.is_multiple_of(&p) {
                rest /= &p;
                e += 1;
            }
            if e % 2 == 1 {
                mask |= 1 << (k + 1);
            }
            square_root *= p.pow(e / 2);
        }
        let r = rest.sqrt();
        if &r * &r != rest {
            return None;
        }
        Some((square_root * r, Radical(mask)))
    }
}

/// An element of a multiquadratic extension of Q.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Surd {
    // sorted by radical, no zero coefficients
    terms: Vec<(Radical, BigRational)>,
}

impl Surd {
    pub fn from_rational(q: BigRational) -> Surd {
        if q.is_zero() {
            Surd::zero()
        } else {
            Surd { terms: vec![(Radical::ONE, q)] }
        }
    }

    pub fn from_int(n: i64) -> Surd {
        Surd::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_frac(n: i64, d: i64) -> Surd {
        Surd::from_rational(BigRational::new(n.into(), d.into()))
    }

    pub fn i() -> Surd {
        Surd { terms: vec![(Radical::I, BigRational::one())] }
    }

    /// Exact square root of a rational; `None` if the radicand has a prime
    /// factor beyond the supported table.
    pub fn sqrt_rational(q: &BigRational) -> Option<Surd> {
        if q.is_zero() {
            return Some(Surd::zero());
        }
        let m = q.numer() * q.denom();
        let (s, rad) = Radical::split(&m)?;
        let coeff = BigRational::new(s, q.denom().clone());
        Some(Surd { terms: vec![(rad, coeff)] })
    }

    /// Square root of a rational-valued element.
    pub fn sqrt(&self) -> Option<Surd> {
        Surd::sqrt_rational(&self.as_rational()?)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(r, q)] if r.is_one() => Some(q.clone()),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// True when no term involves √-1.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(r, _)| !r.is_imaginary())
    }

    pub fn terms(&self) -> impl Iterator<Item = (BigInt, &BigRational)> {
        self.terms.iter().map(|(r, q)| (r.value(), q))
    }

    /// Union of the generator sets of all radicals present.
    pub fn radical_mask(&self) -> u64 {
        self.terms.iter().fold(0, |m, (r, _)| m | r.0)
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Surd {
        Surd {
            terms: self
                .terms
                .iter()
                .map(|(r, q)| (*r, if r.is_imaginary() { -q.clone() } else { q.clone() }))
                .collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (r, q) in &self.terms {
            let v = r.value();
            let mag = v.abs().to_f64().unwrap_or(f64::INFINITY).sqrt() * q.to_f64().unwrap_or(f64::NAN);
            if r.is_imaginary() {
                z.im += mag;
            } else {
                z.re += mag;
            }
        }
        z
    }

    pub fn to_f64(&self) -> f64 {
        self.to_complex().re
    }

    pub fn scale(&self, q: &BigRational) -> Surd {
        if q.is_zero() {
            return Surd::zero();
        }
        Surd { terms: self.terms.iter().map(|(r, c)| (*r, c * q)).collect() }
    }

    pub fn pow(&self, e: u32) -> Surd {
        let mut acc = Surd::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by repeated conjugation over one generator at a time.
    pub fn inv(&self) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.as_rational() {
            return Some(Surd::from_rational(q.recip()));
        }
        let bit = Radical(self.radical_mask()).highest_bit()?;
        let g = 1u64 << bit;
        let conj = Surd {
            terms: self
                .terms
                .iter()
                .map(|(r, q)| (*r, if r.0 & g != 0 { -q.clone() } else { q.clone() }))
                .collect(),
        };
        let norm = self * &conj;
        Some(&conj * &norm.inv()?)
    }

    fn from_unsorted(mut terms: Vec<(Radical, BigRational)>) -> Surd {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Radical, BigRational)> = Vec::with_capacity(terms.len());
        for (r, q) in terms {
            match out.last_mut() {
                Some((lr, lq)) if *lr == r => *lq += q,
                _ => out.push((r, q)),
            }
        }
        out.retain(|(_, q)| !q.is_zero());
        Surd { terms: out }
    }

    fn add_ref(&self, other: &Surd, negate: bool) -> Surd {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (r, q) = &other.terms[j];
                    out.push((*r, if negate { -q.clone() } else { q.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let q = if negate {
                        &self.terms[i].1 - &other.terms[j].1
                    } else {
                        &self.terms[i].1 + &other.terms[j].1
                    };
                    if !q.is_zero() {
                        out.push((self.terms[i].0, q));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Surd { terms: out }
    }

    fn mul_ref(&self, other: &Surd) -> Surd {
        if self.is_zero() || other.is_zero() {
            return Surd::zero();
        }
        if self.terms.len() == 1 && other.terms.len() == 1 {
            let (ra, qa) = &self.terms[0];
            let (rb, qb) = &other.terms[0];
            let (f, r) = ra.mul(*rb);
            let mut q = qa * qb;
            if f != 1 {
                q *= BigRational::from_integer(f.into());
            }
            return Surd { terms: vec![(r, q)] };
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ra, qa) in &self.terms {
            for (rb, qb) in &other.terms {
                let (f, r) = ra.mul(*rb);
                let mut q = qa * qb;
                if f != 1 {
                    q *= BigRational::from_integer(f.into());
                }
                terms.push((r, q));
            }
        }
        Surd::from_unsorted(terms)
    }
}

impl Zero for Surd {
    fn zero() -> Surd {
        Surd { terms: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Surd {
        Surd::from_int(1)
    }
}

impl From<i64> for Surd {
    fn from(n: i64) -> Surd {
        Surd::from_int(n)
    }
}

impl From<BigRational> for Surd {
    fn from(q: BigRational) -> Surd {
        Surd::from_rational(q)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { terms: self.terms.iter().map(|(r, q)| (*r, -q.clone())).collect() }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Surd> for &Surd {
            type Output = Surd;
            fn $m(self, rhs: &Surd) -> Surd {
                let f: fn(&Surd, &Surd) -> Surd = $body;
                f(self, rhs)
            }
        }
        impl $tr<Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: &Surd) -> Surd {
                (&self).$m(rhs)
            }
        }
        impl $tr<Surd> for &Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b, false));
binop!(Sub, sub, |a, b| a.add_ref(b, true));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.inv().expect("division by zero surd")));

impl AddAssign<&Surd> for Surd {
    fn add_assign(&mut self, rhs: &Surd) {
        *self = self.add_ref(rhs, false);
    }
}

impl SubAssign<&Surd> for Surd {
    fn sub_assign(&mut self, rhs: &Surd) {
        *self = self.add_ref(rhs, true);
    }
}

impl MulAssign<&Surd> for Surd {
    fn mul_assign(&mut self, rhs: &Surd) {
        *self = self.mul_ref(rhs);
    }
}

fn fmt_term(f: &mut fmt::Formatter<'_>, r: Radical, q: &BigRational, first: bool) -> fmt::Result {
    let neg = q.is_negative();
    if !first {
        f.write_str(if neg { " - " } else { " + " })?;
    } else if neg {
        f.write_str("-")?;
    }
    let n = q.numer().abs();
    let d = q.denom();
    if r.is_one() {
        write!(f, "{n}")?;
    } else {
        if !n.is_one() {
            write!(f, "{n}*")?;
        }
        write!(f, "sqrt({})", r.value())?;
    }
    if !d.is_one() {
        write!(f, "/{d}")?;
    }
    Ok(())
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (r, q)) in self.terms.iter().enumerate() {
            fmt_term(f, *r, q, k == 0)?;
        }
        Ok(())
    }
}
