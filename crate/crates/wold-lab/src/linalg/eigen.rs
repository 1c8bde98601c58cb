//! Cyclic complex Jacobi eigensolver for Hermitian matrices, plus the psd
//! square root built on it.

use super::{CMatrix, LinalgError, TolerancePolicy};
use num_complex::Complex64;

/// Sweep budget: the solver gives up after `SWEEP_FACTOR * n` full cyclic
/// sweeps. Jacobi converges quadratically once off-diagonal mass is small, so
/// hitting this is a sign of a genuinely broken input.
const SWEEP_FACTOR: usize = 100;

/// Diagonalizes a Hermitian matrix. Returns eigenvalues in ascending order
/// and the matching unitary eigenvector matrix (eigenvectors as columns).
///
/// Ties between equal eigenvalues are broken by a fixed lexicographic rule on
/// the sign-normalized eigenvectors, so the output is deterministic; the
/// identity matrix comes back with the standard basis in standard order.
///
/// Errors with `NotHermitian` if the Hermitian residual exceeds `eq_tol`, and
/// `NoConvergence` if the final residual check `||A V - V diag|| <=
/// spec_tol * max(1, ||A||_F)` fails.
pub fn hermitian_eigen(
    a: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let residual = a.hermitian_residual();
    if residual > tol.eq_tol {
        return Err(LinalgError::NotHermitian { residual });
    }
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }

    let mut h = a.symmetrized();
    let mut v = CMatrix::identity(n);
    let scale = h.frobenius_norm().max(1.0);
    let thresh = f64::EPSILON * scale;

    let mut converged = false;
    for _ in 0..SWEEP_FACTOR * n {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = h[(p, q)];
                let r = apq.norm();
                if r <= thresh {
                    continue;
                }
                rotated = true;
                let phase = apq / r; // e^{i alpha}
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // H <- J* H with the rotation acting on rows p, q.
                for k in 0..n {
                    let hp = h[(p, k)];
                    let hq = h[(q, k)];
                    h[(p, k)] = c * hp - s * phase * hq;
                    h[(q, k)] = s * phase.conj() * hp + c * hq;
                }
                // H <- H J on columns p, q; V follows the same column update.
                for k in 0..n {
                    let hp = h[(k, p)];
                    let hq = h[(k, q)];
                    h[(k, p)] = c * hp - s * phase.conj() * hq;
                    h[(k, q)] = s * phase * hp + c * hq;
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = c * vp - s * phase.conj() * vq;
                    v[(k, q)] = s * phase * vp + c * vq;
                }
                // The rotation zeroes this pair analytically; make it exact.
                h[(p, q)] = Complex64::new(0.0, 0.0);
                h[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            what: "hermitian eigensolver",
        });
    }

    let raw_values: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    sign_normalize_columns(&mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        raw_values[i]
            .partial_cmp(&raw_values[j])
            .unwrap()
            .then_with(|| cmp_columns(&v, j, i))
    });
    let values: Vec<f64> = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = permute_columns(&v, &order);

    // Residual post-check: A V = V diag within spec_tol at the input's scale.
    let av = a.mul(&vectors);
    let vd = vectors.mul(&CMatrix::diag(
        &values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(),
    ));
    if av.sub(&vd).frobenius_norm() > tol.spec_tol * scale {
        return Err(LinalgError::NoConvergence {
            what: "hermitian eigensolver residual",
        });
    }
    Ok((values, vectors))
}

/// Scales each column so its first component of modulus > 1e-12 is real and
/// positive. Pure phase change: spans and reconstructions are unaffected.
fn sign_normalize_columns(v: &mut CMatrix) {
    let (rows, cols) = (v.rows(), v.cols());
    for c in 0..cols {
        let mut pivot = None;
        for r in 0..rows {
            if v[(r, c)].norm() > 1e-12 {
                pivot = Some(v[(r, c)]);
                break;
            }
        }
        if let Some(p) = pivot {
            let phase = p.conj() / p.norm();
            for r in 0..rows {
                let val = v[(r, c)] * phase;
                v[(r, c)] = val;
            }
        }
    }
}

/// Lexicographic comparison of columns `i`, `j` by (re, im) component pairs.
fn cmp_columns(v: &CMatrix, i: usize, j: usize) -> std::cmp::Ordering {
    for r in 0..v.rows() {
        let (a, b) = (v[(r, i)], v[(r, j)]);
        match a.re.partial_cmp(&b.re).unwrap() {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
        match a.im.partial_cmp(&b.im).unwrap() {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn permute_columns(v: &CMatrix, order: &[usize]) -> CMatrix {
    CMatrix::from_fn(v.rows(), v.cols(), |r, c| v[(r, order[c])])
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-clamp_tol, clamp_tol]` are clamped to zero before the
/// square root; without the clamp, a defect matrix like `I - T*T` whose true
/// kernel directions come back as eigenvalues ~1e-15 would get sqrt values
/// ~3e-8 of pure noise, which is fatal downstream where dilation unitarity is
/// checked at 1e-10. Anything below `-clamp_tol` is an honest `NotPsd` error.
pub fn psd_sqrt(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix, LinalgError> {
    let (values, vectors) = hermitian_eigen(a, tol)?;
    if let Some(&min) = values.first() {
        if min < -tol.clamp_tol {
            return Err(LinalgError::NotPsd { min_eig: min });
        }
    }
    let roots: Vec<Complex64> = values
        .iter()
        .map(|&x| {
            let clamped = if x.abs() <= tol.clamp_tol { 0.0 } else { x };
            Complex64::new(clamped.sqrt(), 0.0)
        })
        .collect();
    let b = vectors.mul(&CMatrix::diag(&roots)).mul(&vectors.adjoint());
    Ok(b.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_diagonal_sorts_ascending_with_swapped_basis() {
        let a = CMatrix::diag(&[c(2.0, 0.0), c(-1.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&a, &TolerancePolicy::default()).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0]);
        assert_eq!(vecs[(0, 0)], c(0.0, 0.0));
        assert_eq!(vecs[(1, 0)], c(1.0, 0.0));
        assert_eq!(vecs[(0, 1)], c(1.0, 0.0));
        assert_eq!(vecs[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn identity_returns_standard_basis_in_standard_order() {
        let (vals, vecs) = hermitian_eigen(&CMatrix::identity(3), &TolerancePolicy::default()).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
        assert_eq!(vecs, CMatrix::identity(3));
    }

    #[test]
    fn pauli_y_eigenpairs_match_the_analytic_ones() {
        // [[0, -i], [i, 0]]: eigenvalues -1, 1 with vectors (1, -i)/sqrt2, (1, i)/sqrt2.
        let a = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
        let (vals, vecs) = hermitian_eigen(&a, &TolerancePolicy::default()).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let inv_sqrt2 = 1.0 / (2.0f64).sqrt();
        assert!((vecs[(0, 0)] - c(inv_sqrt2, 0.0)).norm() < 1e-12);
        assert!((vecs[(1, 0)] - c(0.0, -inv_sqrt2)).norm() < 1e-12);
        assert!((vecs[(0, 1)] - c(inv_sqrt2, 0.0)).norm() < 1e-12);
        assert!((vecs[(1, 1)] - c(0.0, inv_sqrt2)).norm() < 1e-12);
    }

    #[test]
    fn recovers_spectrum_of_a_constructed_hermitian() {
        // Build A = V diag(d) V* from a hand-made unitary V, then recover d.
        let inv_sqrt2 = 1.0 / (2.0f64).sqrt();
        let v = CMatrix::from_rows(vec![
            vec![c(inv_sqrt2, 0.0), c(0.0, inv_sqrt2)],
            vec![c(0.0, inv_sqrt2), c(inv_sqrt2, 0.0)],
        ]);
        assert!(v.unitary_residual() < 1e-15);
        let d = CMatrix::diag(&[c(-3.5, 0.0), c(0.25, 0.0)]);
        let a = v.mul(&d).mul(&v.adjoint());
        let (vals, vecs) = hermitian_eigen(&a, &TolerancePolicy::default()).unwrap();
        assert!((vals[0] + 3.5).abs() < 1e-12);
        assert!((vals[1] - 0.25).abs() < 1e-12);
        assert!(vecs.unitary_residual() < 1e-12);
    }

    #[test]
    fn rejects_a_non_hermitian_input() {
        let a = CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(
            hermitian_eigen(&a, &TolerancePolicy::default()),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn psd_sqrt_of_a_real_diagonal() {
        let a = CMatrix::diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let b = psd_sqrt(&a, &TolerancePolicy::default()).unwrap();
        assert!((b[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((b[(1, 1)] - c(3.0, 0.0)).norm() < 1e-14);
        assert!(b[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn psd_sqrt_scalar_defect_value() {
        // sqrt(1 - 1/4) = sqrt(3)/2, the defect of the contraction (1/2).
        let a = CMatrix::diag(&[c(0.75, 0.0)]);
        let b = psd_sqrt(&a, &TolerancePolicy::default()).unwrap();
        assert!((b[(0, 0)].re - 3.0f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn psd_sqrt_squares_back_to_the_input() {
        let inv_sqrt2 = 1.0 / (2.0f64).sqrt();
        let v = CMatrix::from_rows(vec![
            vec![c(inv_sqrt2, 0.0), c(-inv_sqrt2, 0.0)],
            vec![c(inv_sqrt2, 0.0), c(inv_sqrt2, 0.0)],
        ]);
        let a = v
            .mul(&CMatrix::diag(&[c(0.09, 0.0), c(2.0, 0.0)]))
            .mul(&v.adjoint())
            .symmetrized();
        let b = psd_sqrt(&a, &TolerancePolicy::default()).unwrap();
        assert!(b.mul(&b).max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn psd_sqrt_clamps_roundoff_scale_eigenvalues_to_zero() {
        // Eigenvalues at roundoff scale must not leak sqrt(1e-15) ~ 3e-8 noise.
        let a = CMatrix::diag(&[c(1e-15, 0.0), c(1.0, 0.0)]);
        let b = psd_sqrt(&a, &TolerancePolicy::default()).unwrap();
        assert_eq!(b[(0, 0)], c(0.0, 0.0));
        assert_eq!(b[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn psd_sqrt_rejects_genuinely_negative_input() {
        let a = CMatrix::diag(&[c(-0.1, 0.0)]);
        assert!(matches!(
            psd_sqrt(&a, &TolerancePolicy::default()),
            Err(LinalgError::NotPsd { .. })
        ));
    }
}
