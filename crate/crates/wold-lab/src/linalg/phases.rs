//! Eigenphase form of a unitary matrix: U = B diag(e^{i phi}) B*.
//!
//! A unitary is normal, so it diagonalizes in an orthonormal basis with
//! unimodular eigenvalues. We get at that basis through a Hermitian proxy
//! H = Re(e^{i theta} U): any eigenbasis of H that actually diagonalizes U is
//! accepted, and theta is redrawn (deterministically) when an eigenvalue
//! collision of H merges distinct phases of U.

use super::{hermitian_eigen, CMatrix, LinalgError, TolerancePolicy};
use crate::rng::SplitMix64;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which half-open interval eigenphases are reported in.
///
/// `Principal` is `(-pi, pi]`, `NonNeg` is `[0, 2*pi)`. Under both, the
/// eigenvalue -1 maps to the phase `pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Principal,
    NonNeg,
}

/// Diagonalization `U = basis * diag(e^{i phases}) * basis^*` with phases
/// ascending in the chosen branch.
#[derive(Clone, Debug)]
pub struct EigenPhaseForm {
    pub phases: Vec<f64>,
    pub basis: CMatrix,
}

/// Fixed seed for the theta retry stream; part of the deterministic contract.
const ANGLE_SEED: u64 = 0x0e19_5a1d_77c0_ffee;
const MAX_ATTEMPTS: usize = 32;

pub fn unitary_eigenphases(
    u: &CMatrix,
    branch: Branch,
    tol: &TolerancePolicy,
) -> Result<EigenPhaseForm, LinalgError> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    if !u.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let residual = u.unitary_residual();
    if residual > tol.spec_tol {
        return Err(LinalgError::NotUnitary { residual });
    }
    let n = u.rows();
    if n == 0 {
        return Ok(EigenPhaseForm {
            phases: vec![],
            basis: CMatrix::zeros(0, 0),
        });
    }

    let mut rng = SplitMix64::new(ANGLE_SEED);
    for attempt in 0..MAX_ATTEMPTS {
        // First try the natural choice theta = 0, i.e. H = (U + U*)/2.
        let theta = if attempt == 0 {
            0.0
        } else {
            2.0 * PI * rng.next_f64()
        };
        let w = Complex64::new(theta.cos(), theta.sin());
        let h = u.scale(w).symmetrized();
        let (_, vecs) = hermitian_eigen(&h, tol)?;
        let m = vecs.adjoint().mul(u).mul(&vecs);

        // The basis is only usable if it diagonalizes U itself, not just H.
        let mut ok = true;
        for i in 0..n {
            if (m[(i, i)].norm() - 1.0).abs() > 1e-8 {
                ok = false;
                break;
            }
            for j in 0..n {
                if i != j && m[(i, j)].norm() > 1e-8 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        if !ok {
            continue;
        }

        let mut phases: Vec<f64> = (0..n)
            .map(|i| snap_phase(m[(i, i)].im.atan2(m[(i, i)].re), branch, tol))
            .collect();
        let mut basis = vecs;
        sort_by_phase(&mut phases, &mut basis);

        // Final arbiter: reconstruct U from the snapped, sorted form.
        let recon = reconstruct(&phases, &basis);
        if recon.max_abs_diff(u) <= tol.spec_tol {
            return Ok(EigenPhaseForm { phases, basis });
        }
    }
    Err(LinalgError::NoConvergence {
        what: "unitary eigenphase extraction",
    })
}

/// Maps a raw `atan2` angle in `[-pi, pi]` into the branch interval, snapping
/// within `clamp_tol` of the seam so that exact structured inputs (plus or
/// minus one, pure phases crossing the cut) come out exact.
fn snap_phase(raw: f64, branch: Branch, tol: &TolerancePolicy) -> f64 {
    match branch {
        Branch::Principal => {
            if raw <= -PI + tol.clamp_tol {
                PI
            } else {
                raw
            }
        }
        Branch::NonNeg => {
            let shifted = if raw < 0.0 { raw + 2.0 * PI } else { raw + 0.0 };
            if shifted >= 2.0 * PI - tol.clamp_tol {
                0.0
            } else {
                shifted
            }
        }
    }
}

fn sort_by_phase(phases: &mut Vec<f64>, basis: &mut CMatrix) {
    let n = phases.len();
    // Normalize column signs first so the tie-break is well defined.
    for c in 0..n {
        let mut pivot = None;
        for r in 0..n {
            if basis[(r, c)].norm() > 1e-12 {
                pivot = Some(basis[(r, c)]);
                break;
            }
        }
        if let Some(p) = pivot {
            let phase = p.conj() / p.norm();
            for r in 0..n {
                let val = basis[(r, c)] * phase;
                basis[(r, c)] = val;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        phases[i]
            .partial_cmp(&phases[j])
            .unwrap()
            .then_with(|| cmp_cols(basis, j, i))
    });
    let sorted: Vec<f64> = order.iter().map(|&i| phases[i]).collect();
    *phases = sorted;
    *basis = CMatrix::from_fn(n, n, |r, c| basis[(r, order[c])]);
}

fn cmp_cols(v: &CMatrix, i: usize, j: usize) -> std::cmp::Ordering {
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

pub(crate) fn reconstruct(phases: &[f64], basis: &CMatrix) -> CMatrix {
    let d: Vec<Complex64> = phases
        .iter()
        .map(|&p| Complex64::new(p.cos(), p.sin()))
        .collect();
    basis.mul(&CMatrix::diag(&d)).mul(&basis.adjoint())
}
