//! Small dense linear algebra over the surd field and over complex floats.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::surd::Surd;

pub type Mat3 = [[Surd; 3]; 3];

pub fn identity3() -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| Surd::from_int((i == j) as i64)))
}

pub fn from_ints3(m: [[i64; 3]; 3]) -> Mat3 {
    m.map(|r| r.map(Surd::from_int))
}

pub fn transpose3(m: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i].clone()))
}

pub fn matmul3(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(Surd::from_int(0), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
    })
}

pub fn matvec3(a: &Mat3, v: &[Surd; 3]) -> [Surd; 3] {
    std::array::from_fn(|i| (0..3).fold(Surd::from_int(0), |acc, k| &acc + &(&a[i][k] * &v[k])))
}

pub fn det3_surd(m: &Mat3) -> Surd {
    let minor = |a: usize, b: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][b] * &m[2][a]);
    &(&(&m[0][0] * &minor(1, 2)) - &(&m[0][1] * &minor(0, 2))) + &(&m[0][2] * &minor(0, 1))
}

/// Inverse via the adjugate; `None` when singular.
pub fn inverse3(m: &Mat3) -> Option<Mat3> {
    let d = det3_surd(m);
    let dinv = d.inv()?;
    let c = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let s: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let v = &(&m[r[0]][s[0]] * &m[r[1]][s[1]]) - &(&m[r[0]][s[1]] * &m[r[1]][s[0]]);
        if (i + j) % 2 == 1 {
            -v
        } else {
            v
        }
    };
    Some(std::array::from_fn(|i| std::array::from_fn(|j| &c(j, i) * &dinv)))
}

/// Determinant by Gaussian elimination with exact pivots.
pub fn det_exact(mut a: Vec<Vec<Surd>>) -> Surd {
    let n = a.len();
    let mut det = Surd::from_int(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Surd::from_int(0);
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let inv = a[col][col].inv().unwrap();
        det = &det * &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= &t;
            }
        }
    }
    det
}

/// Rank by exact row reduction.
pub fn rank_exact(mut a: Vec<Vec<Surd>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let inv = a[rank][col].inv().unwrap();
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..cols {
                let t = &f * &a[rank][k];
                a[r][k] -= &t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// A nonzero vector c with Σ cᵢ·rowᵢ = 0, or `None` when the rows are independent.
pub fn left_kernel_vector(rows: &[Vec<Surd>]) -> Option<Vec<Surd>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    // Row-reduce [A | I]; a zero row of A carries its combination in the identity block.
    let mut a: Vec<Vec<Surd>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| Surd::from_int((i == j) as i64)));
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let inv = a[rank][col].inv().unwrap();
        for r in 0..n {
            if r == rank || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..cols + n {
                let t = &f * &a[rank][k];
                a[r][k] -= &t;
            }
        }
        rank += 1;
    }
    (rank < n).then(|| a[rank][cols..].to_vec())
}

/// Numerical rank: singular values above `rel_tol`·σ_max. Rows should share a common scale.
pub fn rank_numeric(a: &[Vec<Complex64>], rel_tol: f64) -> usize {
    let rows: Vec<&Vec<Complex64>> = a.iter().filter(|r| r.iter().any(|z| z.norm() > 0.0)).collect();
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let m = from_ints3([[2, 1, 0], [0, 1, -1], [1, 0, 3]]);
        let inv = inverse3(&m).unwrap();
        assert_eq!(matmul3(&m, &inv), identity3());
        let rows: Vec<Vec<Surd>> = m.iter().map(|r| r.to_vec()).collect();
        assert_eq!(det_exact(rows), det3_surd(&m));
    }

    #[test]
    fn ranks_agree() {
        let rows: Vec<Vec<Surd>> = vec![
            vec![1.into(), 2.into(), 3.into()],
            vec![2.into(), 4.into(), 6.into()],
            vec![0.into(), 1.into(), 1.into()],
        ];
        assert_eq!(rank_exact(rows.clone()), 2);
        let c: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(Surd::to_complex).collect()).collect();
        assert_eq!(rank_numeric(&c, 1e-10), 2);
        let k = left_kernel_vector(&rows).unwrap();
        for j in 0..3 {
            let s = (0..3).fold(Surd::from_int(0), |acc, i| &acc + &(&k[i] * &rows[i][j]));
            assert!(s.is_zero());
        }
        assert!(left_kernel_vector(&rows[1..]).is_none());
    }
}
