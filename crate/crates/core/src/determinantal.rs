//! The determinantal matrix of a net and a constraint quadric, its cubic minors,
//! and the substantiality test.

use thiserror::Error;

use crate::linalg::{left_kernel_vector, rank_exact};
use crate::net::{NetOfQuadrics, QuadraticTernaryForm};
use crate::poly::{det3, TernaryPoly};
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeterminantalError {
    #[error("constraint quadric is not positive definite")]
    NotPositiveDefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Sphere,
    Cylinder,
    Generic,
}

/// The quadric whose gradient forms the last row of the matrix; constant terms are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintQuadric {
    pub kind: ConstraintKind,
    pub form: QuadraticTernaryForm,
}

impl ConstraintQuadric {
    pub fn sphere() -> ConstraintQuadric {
        ConstraintQuadric { kind: ConstraintKind::Sphere, form: QuadraticTernaryForm::sphere() }
    }

    pub fn cylinder() -> ConstraintQuadric {
        ConstraintQuadric { kind: ConstraintKind::Cylinder, form: QuadraticTernaryForm::cylinder() }
    }

    pub fn generic(form: QuadraticTernaryForm) -> Result<ConstraintQuadric, DeterminantalError> {
        if !form.is_positive_definite() {
            return Err(DeterminantalError::NotPositiveDefinite);
        }
        Ok(ConstraintQuadric { kind: ConstraintKind::Generic, form })
    }
}

/// Rows 0..3: Jacobian of the net; row 3: gradient of the constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantalMatrix {
    pub rows: [[TernaryPoly; 3]; 4],
}

/// δ = det(rows 0,1,2); δᵢ = det with net row i deleted, rows ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSystem {
    pub delta: TernaryPoly,
    pub delta1: TernaryPoly,
    pub delta2: TernaryPoly,
    pub delta3: TernaryPoly,
}

impl CubicSystem {
    pub fn new(polys: [TernaryPoly; 4]) -> CubicSystem {
        let [delta, delta1, delta2, delta3] = polys;
        CubicSystem { delta, delta1, delta2, delta3 }
    }

    pub fn polys(&self) -> [&TernaryPoly; 4] {
        [&self.delta, &self.delta1, &self.delta2, &self.delta3]
    }

    pub fn is_all_zero(&self) -> bool {
        self.polys().iter().all(|p| p.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.polys().iter().all(|p| p.is_rational())
    }
}

pub fn build_matrix(net: &NetOfQuadrics, constraint: &ConstraintQuadric) -> Result<DeterminantalMatrix, DeterminantalError> {
    if constraint.kind == ConstraintKind::Generic && !constraint.form.is_positive_definite() {
        return Err(DeterminantalError::NotPositiveDefinite);
    }
    let [j0, j1, j2] = net.jacobian();
    Ok(DeterminantalMatrix { rows: [j0, j1, j2, constraint.form.to_poly().gradient()] })
}

pub fn minors(m: &DeterminantalMatrix) -> CubicSystem {
    let pick = |skip: usize| -> [[TernaryPoly; 3]; 3] {
        let idx: Vec<usize> = (0..4).filter(|&r| r != skip).collect();
        std::array::from_fn(|k| m.rows[idx[k]].clone())
    };
    CubicSystem::new([det3(&pick(3)), det3(&pick(0)), det3(&pick(1)), det3(&pick(2))])
}

/// `minors(build_matrix(net, constraint))`.
pub fn cubic_system(net: &NetOfQuadrics, constraint: &ConstraintQuadric) -> Result<CubicSystem, DeterminantalError> {
    build_matrix(net, constraint).map(|m| minors(&m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubstantialityReport {
    pub first_normal_rank: usize,
    pub augmented_rank: usize,
    pub substantial: bool,
    /// (a, b, c, d) with a·q₁ + b·q₂ + c·q₃ = d·(constraint form).
    pub planar_functional: Option<[Surd; 4]>,
}

/// Substantiality on the unit sphere.
pub fn substantiality(net: &NetOfQuadrics) -> SubstantialityReport {
    substantiality_for(net, &QuadraticTernaryForm::sphere())
}

/// Whether the image of the level set {form = 1} under the net spans an affine 3-space.
pub fn substantiality_for(net: &NetOfQuadrics, form: &QuadraticTernaryForm) -> SubstantialityReport {
    let mut rows: Vec<Vec<Surd>> = net.q.iter().map(|q| q.coeffs.to_vec()).collect();
    let first_normal_rank = rank_exact(rows.clone());
    rows.push(form.coeffs.iter().map(|c| -c).collect());
    let augmented_rank = rank_exact(rows.clone());
    let planar_functional = left_kernel_vector(&rows).map(|k| std::array::from_fn(|i| k[i].clone()));
    SubstantialityReport { first_normal_rank, augmented_rank, substantial: augmented_rank == 4, planar_functional }
}

/// H, B₁..B₅ built from the second derivatives f_xx, f_xy, … of the Monge form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaBasis {
    pub h: [Surd; 3],
    pub b: [[Surd; 3]; 5],
}

pub fn eta_basis(net: &NetOfQuadrics) -> EtaBasis {
    // Second derivatives per component: f_xx = 2·c_xx, f_xy = c_xy, …
    let d = |k: usize, i: usize| -> Surd {
        let c = &net.q[i].coeffs[k];
        if matches!(k, 0 | 2 | 5) {
            c + c
        } else {
            c.clone()
        }
    };
    let q = |n: i64, dd: i64| Surd::from_frac(n, dd);
    let h = std::array::from_fn(|i| &(&(&d(0, i) + &d(2, i)) + &d(5, i)) * &q(1, 3));
    let b1 = std::array::from_fn(|i| &(&(&d(5, i) + &d(5, i)) - &(&d(0, i) + &d(2, i))) * &q(1, 12));
    let b2 = std::array::from_fn(|i| &(&d(0, i) - &d(2, i)) * &q(1, 2));
    let b3 = std::array::from_fn(|i| d(1, i));
    let b4 = std::array::from_fn(|i| d(3, i));
    let b5 = std::array::from_fn(|i| d(4, i));
    EtaBasis { h, b: [b1, b2, b3, b4, b5] }
}
