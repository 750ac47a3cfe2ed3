//! Values that are exact when possible and complex floating point otherwise.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::surd::Surd;

/// Environment variable overriding the default numeric tolerance.
pub const TOLERANCE_ENV: &str = "QUADNET_TOL";

const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Global default tolerance: 1e-9 unless `QUADNET_TOL` holds a positive float.
pub fn default_tolerance() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var(TOLERANCE_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| *t > 0.0 && t.is_finite())
            .unwrap_or(DEFAULT_TOLERANCE)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Surd),
    Approx(Complex64),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact(Surd::from_int(0))
    }

    pub fn one() -> Scalar {
        Scalar::Exact(Surd::from_int(1))
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(s) => s.to_complex(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Surd> {
        match self {
            Scalar::Exact(s) => Some(s),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Exact values are real iff free of √-1; approximations iff |im| ≤ tol·max(1,|re|).
    pub fn is_real(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(s) => s.is_real(),
            Scalar::Approx(z) => z.im.abs() <= tol * z.re.abs().max(1.0),
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(s) => s.is_zero(),
            Scalar::Approx(z) => z.norm() <= tol,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(s) => Scalar::Exact(s.conj()),
            Scalar::Approx(z) => Scalar::Approx(z.conj()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Approx(self.to_complex() * other.to_complex()),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) if !b.is_zero() => Scalar::Exact(a / b),
            _ => Scalar::Approx(self.to_complex() / other.to_complex()),
        }
    }

    /// Drops an imaginary part at noise level.
    pub fn realified(self, tol: f64) -> Scalar {
        match self {
            Scalar::Approx(z) if z.im.abs() <= tol * z.re.abs().max(1.0) => Scalar::Approx(Complex64::new(z.re, 0.0)),
            s => s,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(s) => write!(f, "{s}"),
            Scalar::Approx(z) if z.im == 0.0 => write!(f, "{:.12}", z.re),
            Scalar::Approx(z) => write!(f, "{:.12}{:+.12}i", z.re, z.im),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
