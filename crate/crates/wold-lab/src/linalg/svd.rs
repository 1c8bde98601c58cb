//! One-sided (Hestenes) Jacobi SVD: orthogonalize columns by plane rotations
//! chosen from 2x2 Gram blocks. Numerically boring and very accurate for the
//! modest dimensions used here.

use super::{CMatrix, LinalgError, TolerancePolicy};
use num_complex::Complex64;

const SWEEP_FACTOR: usize = 100;
/// Relative off-diagonal threshold below which a column pair counts as
/// orthogonal. Close to machine precision; the final residual check is the
/// real arbiter.
const PAIR_TOL: f64 = 1e-15;

/// Economy singular value decomposition `A = left * diag(singulars) * right^*`
/// with `k = min(rows, cols)` columns in each factor and singular values in
/// descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: CMatrix,
    pub singulars: Vec<f64>,
    pub right: CMatrix,
}

pub fn svd(a: &CMatrix, tol: &TolerancePolicy) -> Result<Svd, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return Ok(Svd {
            left: CMatrix::zeros(m, 0),
            singulars: vec![],
            right: CMatrix::zeros(n, 0),
        });
    }
    if m < n {
        // Factor the adjoint and swap the roles of the two bases.
        let t = svd(&a.adjoint(), tol)?;
        return Ok(Svd {
            left: t.right,
            singulars: t.singulars,
            right: t.left,
        });
    }

    let mut b: Vec<Vec<Complex64>> = (0..n).map(|c| a.col_vec(c)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|c| {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[c] = Complex64::new(1.0, 0.0);
            col
        })
        .collect();

    let mut converged = false;
    for _ in 0..SWEEP_FACTOR * n {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let gii: f64 = b[i].iter().map(|z| z.norm_sqr()).sum();
                let gjj: f64 = b[j].iter().map(|z| z.norm_sqr()).sum();
                if gii == 0.0 || gjj == 0.0 {
                    continue;
                }
                let gij: Complex64 = b[i]
                    .iter()
                    .zip(&b[j])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let r = gij.norm();
                if r <= PAIR_TOL * (gii * gjj).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gij / r;
                let tau = (gjj - gii) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate_pair(&mut b, i, j, c, s, phase);
                rotate_pair(&mut v, i, j, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { what: "jacobi svd" });
    }

    let mut singulars: Vec<f64> = b
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (col, &sigma) in b.iter().zip(&singulars) {
        if sigma > 0.0 {
            left_cols.push(col.iter().map(|z| z / sigma).collect());
        } else {
            left_cols.push(vec![Complex64::new(0.0, 0.0); m]);
        }
    }
    complete_zero_columns(&mut left_cols, &singulars);

    // Stable descending sort carrying both bases along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| singulars[j].partial_cmp(&singulars[i]).unwrap());
    singulars = order.iter().map(|&i| singulars[i]).collect();
    let left = CMatrix::from_cols(m, &order.iter().map(|&i| left_cols[i].clone()).collect::<Vec<_>>());
    let right = CMatrix::from_cols(n, &order.iter().map(|&i| v[i].clone()).collect::<Vec<_>>());

    let sigma = CMatrix::diag(
        &singulars
            .iter()
            .map(|&s| Complex64::new(s, 0.0))
            .collect::<Vec<_>>(),
    );
    let recon = left.mul(&sigma).mul(&right.adjoint());
    if recon.sub(a).frobenius_norm() > tol.spec_tol * a.frobenius_norm().max(1.0) {
        return Err(LinalgError::NoConvergence {
            what: "jacobi svd residual",
        });
    }
    Ok(Svd {
        left,
        singulars,
        right,
    })
}

/// `(cols[i], cols[j]) <- (c*cols[i] - s*conj(phase)*cols[j], s*phase*cols[i] + c*cols[j])`
fn rotate_pair(cols: &mut [Vec<Complex64>], i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let len = cols[i].len();
    for k in 0..len {
        let x = cols[i][k];
        let y = cols[j][k];
        cols[i][k] = c * x - s * phase.conj() * y;
        cols[j][k] = s * phase * x + c * y;
    }
}

/// Replaces left-basis columns belonging to zero singular values by a
/// deterministic Gram-Schmidt completion against the standard basis.
fn complete_zero_columns(left_cols: &mut [Vec<Complex64>], singulars: &[f64]) {
    let m = left_cols.first().map_or(0, |c| c.len());
    let mut candidate = 0usize;
    for idx in 0..left_cols.len() {
        if singulars[idx] > 0.0 {
            continue;
        }
        while candidate < m {
            let mut r = vec![Complex64::new(0.0, 0.0); m];
            r[candidate] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for other in 0..left_cols.len() {
                if other == idx || (singulars[other] == 0.0 && other > idx) {
                    continue; // skip self and the not-yet-filled slots
                }
                let col = &left_cols[other];
                let overlap: Complex64 = r.iter().zip(col).map(|(x, u)| u.conj() * x).sum();
                for k in 0..m {
                    let delta = overlap * col[k];
                    r[k] -= delta;
                }
            }
            let norm_sq = r.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if norm_sq > 0.25 {
                let norm = norm_sq.sqrt();
                for z in r.iter_mut() {
                    *z /= norm;
                }
                left_cols[idx] = r;
                break;
            }
        }
    }
}

/// Largest singular value; 0 for empty matrices.
pub fn operator_norm(a: &CMatrix, tol: &TolerancePolicy) -> Result<f64, LinalgError> {
    Ok(svd(a, tol)?.singulars.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_one_shift_block_has_singulars_two_and_zero() {
        let a = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        let f = svd(&a, &TolerancePolicy::default()).unwrap();
        assert_eq!(f.singulars, vec![2.0, 0.0]);
        // Range is spanned by e_1; the completed column must extend it orthonormally.
        assert!((f.left[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(f.left.unitary_residual() < 1e-12);
    }

    #[test]
    fn recovers_singular_values_of_a_constructed_factorization() {
        let inv_sqrt2 = 1.0 / (2.0f64).sqrt();
        let u = CMatrix::from_rows(vec![
            vec![c(inv_sqrt2, 0.0), c(0.0, -inv_sqrt2)],
            vec![c(0.0, -inv_sqrt2), c(inv_sqrt2, 0.0)],
        ]);
        let w = CMatrix::from_rows(vec![
            vec![c(inv_sqrt2, 0.0), c(inv_sqrt2, 0.0)],
            vec![c(-inv_sqrt2, 0.0), c(inv_sqrt2, 0.0)],
        ]);
        let a = u
            .mul(&CMatrix::diag(&[c(3.0, 0.0), c(0.5, 0.0)]))
            .mul(&w.adjoint());
        let f = svd(&a, &TolerancePolicy::default()).unwrap();
        assert!((f.singulars[0] - 3.0).abs() < 1e-12);
        assert!((f.singulars[1] - 0.5).abs() < 1e-12);
        assert!(f.left.unitary_residual() < 1e-12);
        assert!(f.right.unitary_residual() < 1e-12);
    }

    #[test]
    fn wide_matrices_go_through_the_adjoint() {
        let a = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)]]);
        let f = svd(&a, &TolerancePolicy::default()).unwrap();
        assert_eq!(f.singulars.len(), 1);
        assert!((f.singulars[0] - 3.0).abs() < 1e-14);
        assert_eq!(f.left.rows(), 1);
        assert_eq!(f.right.rows(), 3);
    }

    #[test]
    fn zero_matrix_completes_to_an_orthonormal_left_basis() {
        let f = svd(&CMatrix::zeros(3, 2), &TolerancePolicy::default()).unwrap();
        assert_eq!(f.singulars, vec![0.0, 0.0]);
        assert!(f.left.unitary_residual() == 0.0);
    }

    #[test]
    fn operator_norm_of_scalar_and_unitary() {
        let tol = TolerancePolicy::default();
        assert_eq!(operator_norm(&CMatrix::diag(&[c(3.0, 0.0)]), &tol).unwrap(), 3.0);
        let n = operator_norm(&CMatrix::identity(5), &tol).unwrap();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tall_thin_columns_orthonormalize() {
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.5)],
        ]);
        let f = svd(&a, &TolerancePolicy::default()).unwrap();
        assert!(f.left.unitary_residual() < 1e-12);
        assert!(f.right.unitary_residual() < 1e-12);
        assert!(f.singulars[0] >= f.singulars[1]);
    }
}
