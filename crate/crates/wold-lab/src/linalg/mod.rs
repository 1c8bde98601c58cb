//! Dense complex linear algebra sized for operator windows up to a few
//! hundred coordinates: storage, Jacobi Hermitian eigensolver, one-sided
//! Jacobi SVD, psd square roots, and eigenphases of unitaries.
//!
//! Everything here is deterministic: the same input bits always produce the
//! same output bits, which is what makes the seeded experiment harness
//! byte-reproducible.

mod eigen;
mod phases;
mod svd;

pub use eigen::{hermitian_eigen, psd_sqrt};
pub use phases::{unitary_eigenphases, Branch, EigenPhaseForm};
pub use svd::{operator_norm, svd, Svd};

use num_complex::Complex64;
use std::ops::{Index, IndexMut};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("{what} did not converge within the sweep budget")]
    NoConvergence { what: &'static str },
}

/// Numerical tolerances used across the crate.
///
/// * `eq_tol` — slack for structural preconditions (Hermitian-ness, shape
///   residuals of inputs we are handed).
/// * `spec_tol` — accuracy promised by spectral routines and verified by
///   their residual post-checks.
/// * `clamp_tol` — threshold under which tiny eigenvalues and phase offsets
///   are snapped to exact values.
#[derive(Clone, Copy, Debug)]
pub struct TolerancePolicy {
    pub eq_tol: f64,
    pub spec_tol: f64,
    pub clamp_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            eq_tol: 1e-12,
            spec_tol: 1e-10,
            clamp_tol: 1e-12,
        }
    }
}

/// Dense complex matrix, row-major. Indexing is zero-based via `m[(r, c)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged rows in matrix literal"
        );
        CMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from column vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Complex64>]) -> Self {
        let mut m = CMatrix::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn col_vec(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn submatrix(&self, row_off: usize, col_off: usize, nrows: usize, ncols: usize) -> CMatrix {
        assert!(row_off + nrows <= self.rows && col_off + ncols <= self.cols);
        CMatrix::from_fn(nrows, ncols, |r, c| self[(row_off + r, col_off + c)])
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..self.cols {
                    acc += self[(r, k)] * other[(k, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + other[(r, c)])
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - other[(r, c)])
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| z * self[(r, c)])
    }

    /// Hermitian part `(A + A*)/2`; used to scrub asymmetric rounding before
    /// feeding a nominally Hermitian matrix to the eigensolver.
    pub fn symmetrized(&self) -> CMatrix {
        assert!(self.is_square());
        CMatrix::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum; upper-bounds the operator norm together
    /// with [`CMatrix::norm_inf`] via `sqrt(norm1 * norm_inf)`.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Max-entry residual of `A*A - I`; zero iff the columns are orthonormal.
    pub fn unitary_residual(&self) -> f64 {
        let gram = self.adjoint().mul(self);
        gram.sub(&CMatrix::identity(self.cols)).max_abs()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_and_adjoint_agree_with_hand_computation() {
        let a = CMatrix::from_rows(vec![vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(0.0, -1.0)]]);
        let b = a.adjoint();
        assert_eq!(b[(0, 0)], c(1.0, -1.0));
        assert_eq!(b[(1, 0)], c(0.0, -2.0));
        let prod = a.mul(&CMatrix::identity(2));
        assert_eq!(prod, a);
    }

    #[test]
    fn norms_on_a_small_example() {
        let a = CMatrix::from_rows(vec![vec![c(3.0, 4.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert_eq!(a.frobenius_norm(), (26.0f64).sqrt());
        assert_eq!(a.max_abs(), 5.0);
        assert_eq!(a.norm1(), 5.0);
        assert_eq!(a.norm_inf(), 5.0);
    }

    #[test]
    fn unitary_residual_detects_non_orthonormal_columns() {
        assert!(CMatrix::identity(4).unitary_residual() == 0.0);
        let a = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(a.unitary_residual() > 0.9);
    }
}
