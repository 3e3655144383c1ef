//! Dense symmetric matrices in packed upper-triangular storage, with a
//! pivot-thresholded Cholesky factorization.
//!
//! Storage keeps only the upper triangle, so a matrix is symmetric by
//! construction and cannot drift through repeated updates.

// Index loops mirror the triangular recurrences.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Relative pivot threshold: a Cholesky pivot below `PIVOT_TOL * scale`
/// (scale = largest diagonal magnitude) makes the system singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Symmetric matrix stored as the packed upper triangle (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl SymMat {
    pub fn zeros(dim: usize) -> Self {
        SymMat {
            dim,
            data: vec![0.0; packed_len(dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from full row-major rows, checking symmetry to 1e-12 relative.
    pub fn from_full(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
        }
        let scale = rows
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        let mut m = SymMat::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let a = rows[i][j];
                let b = rows[j][i];
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Shape(format!(
                        "matrix is not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    pub fn to_full(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    #[inline]
    pub fn add_assign_at(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn packed(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, s: f64) -> SymMat {
        SymMat {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &SymMat) -> SymMat {
        debug_assert_eq!(self.dim, other.dim);
        SymMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMat) -> SymMat {
        debug_assert_eq!(self.dim, other.dim);
        SymMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Rank-one matrix v vᵀ.
    pub fn outer(v: &[f64]) -> SymMat {
        let dim = v.len();
        let mut m = SymMat::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, v[i] * v[j]);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// vᵀ S v
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Frobenius inner product tr(AᵀB); off-diagonal entries count twice.
    pub fn frob_inner(&self, other: &SymMat) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let w = if i == j { 1.0 } else { 2.0 };
                acc += w * self.get(i, j) * other.get(i, j);
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Zero out the off-diagonal part, keeping the diagonal (diag(A) in the
    /// matrix-differential sense).
    pub fn diag_part(&self) -> SymMat {
        let mut m = SymMat::zeros(self.dim);
        for i in 0..self.dim {
            m.set(i, i, self.get(i, i));
        }
        m
    }

    /// Cholesky factorization S = L Lᵀ with a relative pivot threshold.
    ///
    /// A pivot in (-tol*scale, tol*scale] is reported as singular; a pivot
    /// below -tol*scale means the matrix is not positive definite.
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.dim;
        let scale = (0..n)
            .map(|i| self.get(i, i).abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let tol = PIVOT_TOL * scale;
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= tol {
                if d < -tol {
                    return Err(Error::NotPd(format!("pivot {d} at column {j}")));
                }
                return Err(Error::SingularSystem(format!(
                    "pivot {d} at column {j} below threshold {tol}"
                )));
            }
            let root = d.sqrt();
            l[j * n + j] = root;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / root;
            }
        }
        Ok(Cholesky { dim: n, l })
    }

    /// True when the PD factorization succeeds.
    pub fn is_positive_definite(&self) -> bool {
        self.cholesky().is_ok()
    }
}

/// Lower-triangular Cholesky factor of a positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    l: Vec<f64>, // row-major dense, lower triangle populated
}

impl Cholesky {
    /// Solve S x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        // forward: L y = b
        let mut y = vec![0.0f64; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        // backward: Lᵀ x = y
        let mut x = vec![0.0f64; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    /// S⁻¹ as a symmetric matrix.
    pub fn inverse(&self) -> SymMat {
        let n = self.dim;
        let mut inv = SymMat::zeros(n);
        let mut e = vec![0.0f64; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for i in 0..=j {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }

    /// log det S
    pub fn log_det(&self) -> f64 {
        let n = self.dim;
        2.0 * (0..n).map(|i| self.l[i * n + i].ln()).sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        let n = self.dim;
        let d: f64 = (0..n).map(|i| self.l[i * n + i]).product();
        d * d
    }
}
