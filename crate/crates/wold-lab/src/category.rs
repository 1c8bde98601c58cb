//! Quantitative smallness machinery.
//!
//! Non-unitary contractions betray themselves on the countable test family:
//! either some tested vector sits at a definite distance from the range
//! (`RangeGap`, the sets `{T : dist(x_j, range T) > 1/k}`) or some tested
//! vector is definitely shrunk (`NormDefect`, `{T : ||T x_j|| < (1 - 1/k)
//! ||x_j||}`). [`find_witness`] hunts for such a certificate; a unitary never
//! has one.
//!
//! The other half of the story is constructive: around every unitary there is
//! a strong-metric ball that avoids a given `RangeGap` set entirely.
//! [`nowhere_density_certificate`] packages the data for that ball
//! ([`exclusion_radius`] computes its radius), which is what makes the
//! witness sets nowhere dense rather than merely proper.
//!
//! Bridging the two topologies, [`verify_weak_to_strong`] checks the
//! inequality `||T_n x - S x||^2 <= 2 Re <(S - T_n) x, S x>`, valid whenever
//! `||T_n x|| <= ||S x||`: weak convergence of norm-dominated sequences is
//! automatically strong. The preset sequences exercise the lemma where it
//! bites, where its premise fails, and where it is sharp.

use crate::hilbert::{DenseFamily, FamilyError};
use crate::linalg::TolerancePolicy;
use crate::metrics::{d_sot, d_wot, MetricValue};
use crate::operator::{
    LinearOp, OperatorClass, OperatorError, PoweredOp, StructuredOperator, TailKind,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CategoryError {
    #[error("certificate base classifies as {0:?}, not unitary")]
    NotUnitary(OperatorClass),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Clearance a witness must have beyond its `1/k` threshold, so borderline
/// floating-point cases are never claimed.
const WITNESS_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `dist(x_j, range T) > 1/k`.
    RangeGap,
    /// `||T x_j|| / ||x_j|| < 1 - 1/k`.
    NormDefect,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub j: usize,
    pub k: u32,
    /// The measured quantity: range distance, or norm ratio.
    pub value: f64,
    /// Clearance beyond the threshold; always `> WITNESS_MARGIN`.
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum WitnessOutcome {
    Found(Witness),
    /// The scan budget, recorded so a miss is a statement about a definite
    /// finite search, not a vague shrug.
    NoneFound { scanned_j: usize, scanned_k: u32 },
}

/// Scan for a membership witness, smallest `j` first, then smallest `k`.
///
/// The classification decides which kind can exist: an isometry never shrinks
/// anything (so only `RangeGap` is worth measuring), a strict contraction is
/// scanned for `NormDefect`, and a unitary is reported clean immediately.
pub fn find_witness(
    t: &StructuredOperator,
    fam: &DenseFamily,
    j_limit: usize,
    k_limit: u32,
    tol: &TolerancePolicy,
) -> Result<WitnessOutcome, CategoryError> {
    if j_limit == 0 || k_limit == 0 {
        return Err(CategoryError::BadParameter(
            "witness scan needs j_limit >= 1 and k_limit >= 1".into(),
        ));
    }
    let class = t.classify(tol)?.class;
    let miss = WitnessOutcome::NoneFound {
        scanned_j: j_limit,
        scanned_k: k_limit,
    };
    match class {
        OperatorClass::Unitary => Ok(miss),
        OperatorClass::IsometryNonUnitary => {
            for j in 1..=j_limit {
                let value = t.dist_to_range(&fam.vector(j))?;
                for k in 1..=k_limit {
                    if value > 1.0 / f64::from(k) + WITNESS_MARGIN {
                        return Ok(WitnessOutcome::Found(Witness {
                            kind: WitnessKind::RangeGap,
                            j,
                            k,
                            value,
                            margin: value - 1.0 / f64::from(k),
                        }));
                    }
                }
            }
            Ok(miss)
        }
        OperatorClass::StrictContraction => {
            for j in 1..=j_limit {
                let x = fam.vector(j);
                let value = t.apply(&x).norm() / x.norm();
                for k in 1..=k_limit {
                    let threshold = 1.0 - 1.0 / f64::from(k);
                    if value < threshold - WITNESS_MARGIN {
                        return Ok(WitnessOutcome::Found(Witness {
                            kind: WitnessKind::NormDefect,
                            j,
                            k,
                            value,
                            margin: threshold - value,
                        }));
                    }
                }
            }
            Ok(miss)
        }
    }
}

/// Ready-made sequences for the weak-to-strong inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequencePreset {
    /// `T_n = (1 - 1/n) U` against the unitary `U` (a 48-cycle): premise
    /// holds everywhere, both sides shrink like `1/n`.
    DampedUnitary,
    /// `T_n = S^n` (shift powers) against `0`: weakly null but an isometry
    /// on every vector, so the premise `||T_n x|| <= 0` fails everywhere
    /// and the conclusion visibly fails with it.
    ShiftPowers,
    /// `T_n` the `n`-cycle against the shift: sharp case, the inequality
    /// holds with exact equality on the wrap-around vector.
    CyclicApproximants,
    /// `T_n = S` for all `n`: every row is `0 <= 0`.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lemma3Row {
    pub n: usize,
    pub j: usize,
    pub premise_ok: bool,
    /// `||T_n x_j - S x_j||^2`.
    pub lhs: f64,
    /// `2 Re <(S - T_n) x_j, S x_j>`.
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceDistances {
    pub n: usize,
    pub d_sot: MetricValue,
    pub d_wot: MetricValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma3Report {
    pub preset: SequencePreset,
    pub rows: Vec<Lemma3Row>,
    pub distances: Vec<SequenceDistances>,
}

impl Lemma3Report {
    /// Every row whose premise holds satisfies the inequality up to `slack`.
    pub fn all_rows_pass(&self, slack: f64) -> bool {
        self.rows
            .iter()
            .all(|r| !r.premise_ok || r.lhs <= r.rhs + slack)
    }

    pub fn premise_hold_count(&self) -> usize {
        self.rows.iter().filter(|r| r.premise_ok).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,j,premise_ok,lhs,rhs,d_sot_lower,d_sot_upper,d_wot_lower,d_wot_upper\n",
        );
        for r in &self.rows {
            let d = self
                .distances
                .iter()
                .find(|d| d.n == r.n)
                .expect("every row's n has distances");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.j,
                r.premise_ok,
                r.lhs,
                r.rhs,
                d.d_sot.lower,
                d.d_sot.upper,
                d.d_wot.lower,
                d.d_wot.upper
            ));
        }
        out
    }
}

fn lemma3_rows<A, B>(
    n: usize,
    t_n: &A,
    s: &B,
    fam: &DenseFamily,
    terms: usize,
    tol: &TolerancePolicy,
) -> (Vec<Lemma3Row>, SequenceDistances)
where
    A: LinearOp + ?Sized,
    B: LinearOp + ?Sized,
{
    let mut rows = Vec::with_capacity(terms);
    for j in 1..=terms {
        let x = fam.vector(j);
        let tx = t_n.apply_op(&x);
        let sx = s.apply_op(&x);
        let diff = sx.sub(&tx);
        rows.push(Lemma3Row {
            n,
            j,
            premise_ok: tx.norm_sq() <= sx.norm_sq() + tol.eq_tol,
            lhs: diff.norm_sq(),
            rhs: 2.0 * diff.inner(&sx).re,
        });
    }
    let dist = SequenceDistances {
        n,
        d_sot: d_sot(t_n, s, fam, terms),
        d_wot: d_wot(t_n, s, fam, terms),
    };
    (rows, dist)
}

/// Evaluate the weak-to-strong inequality for a preset sequence at the given
/// indices, recording per-row sides and per-`n` certified metric intervals.
pub fn verify_weak_to_strong(
    preset: SequencePreset,
    ns: &[usize],
    fam: &DenseFamily,
    terms: usize,
    tol: &TolerancePolicy,
) -> Result<Lemma3Report, CategoryError> {
    if ns.is_empty() {
        return Err(CategoryError::BadParameter("need at least one n".into()));
    }
    if ns.iter().any(|&n| n == 0) {
        return Err(CategoryError::BadParameter("sequence indices start at 1".into()));
    }
    if terms == 0 {
        return Err(CategoryError::BadParameter("terms must be >= 1".into()));
    }
    let mut rows = Vec::new();
    let mut distances = Vec::new();
    match preset {
        SequencePreset::DampedUnitary => {
            let u = StructuredOperator::cyclic_rotation(48, tol);
            for &n in ns {
                let scale = 1.0 - 1.0 / n as f64;
                let t_n = StructuredOperator::new(
                    u.block().scale(scale.into()),
                    TailKind::Identity,
                    tol,
                )?;
                let (r, d) = lemma3_rows(n, &t_n, &u, fam, terms, tol);
                rows.extend(r);
                distances.push(d);
            }
        }
        SequencePreset::ShiftPowers => {
            let s = StructuredOperator::shift(tol);
            let zero = StructuredOperator::zero_op(tol);
            for &n in ns {
                let t_n = PoweredOp {
                    base: &s,
                    exponent: n,
                };
                let (r, d) = lemma3_rows(n, &t_n, &zero, fam, terms, tol);
                rows.extend(r);
                distances.push(d);
            }
        }
        SequencePreset::CyclicApproximants => {
            let s = StructuredOperator::shift(tol);
            for &n in ns {
                let t_n = StructuredOperator::cyclic_rotation(n, tol);
                let (r, d) = lemma3_rows(n, &t_n, &s, fam, terms, tol);
                rows.extend(r);
                distances.push(d);
            }
        }
        SequencePreset::Constant => {
            let u = StructuredOperator::cyclic_rotation(8, tol);
            for &n in ns {
                let (r, d) = lemma3_rows(n, &u, &u, fam, terms, tol);
                rows.extend(r);
                distances.push(d);
            }
        }
    }
    Ok(Lemma3Report {
        preset,
        rows,
        distances,
    })
}

/// Data for a strong-metric ball around the unitary `U` that a `RangeGap`
/// set cannot touch. With `y = U* x_j` and a family anchor `x_m` within
/// `eta` of `y`, any contraction `S` satisfies
///
/// `dist(x_j, range S) <= ||U x_m - S x_m|| + 2 eta <= slope * d_sot(U, S) + 2 eta`
///
/// because `x_j = U y` and the `m`-th metric term already pays `2^-m
/// ||U x_m - S x_m|| / ||x_m||`. Far out in the family the slope overflows
/// to infinity; the certificate stays valid, just vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NowhereDensityCertificate {
    pub j: usize,
    /// Family index of the anchor near `U* x_j`.
    pub m: usize,
    /// Measured distance from the anchor to `U* x_j`.
    pub eta: f64,
    /// `2^m ||x_m||`, saturating.
    pub slope: f64,
}

pub fn nowhere_density_certificate(
    u: &StructuredOperator,
    j: usize,
    fam: &DenseFamily,
    eta_budget: f64,
    tol: &TolerancePolicy,
) -> Result<NowhereDensityCertificate, CategoryError> {
    let class = u.classify(tol)?.class;
    if class != OperatorClass::Unitary {
        return Err(CategoryError::NotUnitary(class));
    }
    let y = u.apply_adjoint(&fam.vector(j));
    let (m, eta) = fam.index_near(&y, eta_budget)?;
    let slope = if m > 1023 {
        f64::INFINITY
    } else {
        2f64.powi(m as i32) * fam.vector(m).norm()
    };
    Ok(NowhereDensityCertificate { j, m, eta, slope })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    /// `dist(x_j, range S)`, measured directly.
    pub lhs: f64,
    /// `slope * d_sot(U, S).upper + 2 eta`, the certified bound.
    pub rhs: f64,
}

/// Check the certificate's inequality against a concrete contraction. The
/// truncation depth only affects how tight `rhs` is, never its validity:
/// the certified upper bound dominates the true metric, which already
/// carries the `m`-th term.
pub fn apply_certificate(
    cert: &NowhereDensityCertificate,
    s: &StructuredOperator,
    u: &StructuredOperator,
    fam: &DenseFamily,
    terms: usize,
) -> Result<CertificateCheck, CategoryError> {
    let d = d_sot(u, s, fam, terms);
    let lhs = s.dist_to_range(&fam.vector(cert.j))?;
    let rhs = cert.slope * d.upper + 2.0 * cert.eta;
    Ok(CertificateCheck { lhs, rhs })
}

/// Radius of the strong-metric ball around the certifying unitary that the
/// set `{T : dist(x_j, range T) > 1/k}` cannot enter: any `S` with
/// `d_sot(U, S) < radius` has `dist(x_j, range S) <= 1/k`. Zero when the
/// certificate is too loose to exclude anything at this `k`.
pub fn exclusion_radius(cert: &NowhereDensityCertificate, k: u32) -> f64 {
    let headroom = 1.0 / f64::from(k) - 2.0 * cert.eta;
    if !(cert.slope > 0.0) || !headroom.is_sign_positive() {
        return 0.0;
    }
    (headroom / cert.slope).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::FamilyMode;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn fam() -> DenseFamily {
        DenseFamily::new(FamilyMode::BasisFirst)
    }

    #[test]
    fn shift_has_a_range_gap_at_the_first_vector() {
        let s = StructuredOperator::shift(&tol());
        let w = find_witness(&s, &fam(), 8, 8, &tol()).unwrap();
        match w {
            WitnessOutcome::Found(wit) => {
                assert_eq!(wit.kind, WitnessKind::RangeGap);
                assert_eq!((wit.j, wit.k), (1, 2));
                assert!((wit.value - 1.0).abs() < 1e-9);
                assert!(wit.margin > 0.49);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn half_projection_has_a_norm_defect() {
        let t = StructuredOperator::scaled_projection(0.5, 1, &tol()).unwrap();
        let w = find_witness(&t, &fam(), 8, 8, &tol()).unwrap();
        match w {
            WitnessOutcome::Found(wit) => {
                assert_eq!(wit.kind, WitnessKind::NormDefect);
                assert_eq!((wit.j, wit.k), (1, 3));
                assert!((wit.value - 0.5).abs() < 1e-12);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn zero_operator_is_maximally_defective() {
        let z = StructuredOperator::zero_op(&tol());
        match find_witness(&z, &fam(), 4, 4, &tol()).unwrap() {
            WitnessOutcome::Found(wit) => {
                assert_eq!(wit.kind, WitnessKind::NormDefect);
                assert_eq!((wit.j, wit.k), (1, 2));
                assert_eq!(wit.value, 0.0);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn unitaries_have_no_witness() {
        let u = StructuredOperator::cyclic_rotation(4, &tol());
        assert_eq!(
            find_witness(&u, &fam(), 6, 6, &tol()).unwrap(),
            WitnessOutcome::NoneFound {
                scanned_j: 6,
                scanned_k: 6
            }
        );
    }

    #[test]
    fn damped_unitary_rows_all_pass() {
        let report = verify_weak_to_strong(
            SequencePreset::DampedUnitary,
            &[1, 2, 4, 8, 16],
            &fam(),
            12,
            &tol(),
        )
        .unwrap();
        assert!(report.all_rows_pass(1e-10));
        assert_eq!(report.premise_hold_count(), report.rows.len());
        // Both metrics decay like 1/n.
        let lowers: Vec<f64> = report.distances.iter().map(|d| d.d_sot.lower).collect();
        for w in lowers.windows(2) {
            assert!(w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        }
    }

    #[test]
    fn shift_powers_violate_the_premise_and_the_conclusion() {
        let report = verify_weak_to_strong(
            SequencePreset::ShiftPowers,
            &[1, 2, 4, 16],
            &fam(),
            8,
            &tol(),
        )
        .unwrap();
        assert_eq!(report.premise_hold_count(), 0);
        for r in &report.rows {
            assert!(r.lhs > r.rhs, "conclusion should fail at n={}, j={}", r.n, r.j);
        }
        // Strong distance to zero never moves...
        for d in &report.distances {
            assert_eq!(d.d_sot.lower, 1.0 - 2f64.powi(-8));
        }
        // ...while the weak distance dies; past the tested window it is
        // exactly zero.
        let wot_lowers: Vec<f64> = report.distances.iter().map(|d| d.d_wot.lower).collect();
        for w in wot_lowers.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(*wot_lowers.last().unwrap(), 0.0);
    }

    #[test]
    fn cyclic_approximants_hit_the_inequality_exactly() {
        let report = verify_weak_to_strong(
            SequencePreset::CyclicApproximants,
            &[2, 5],
            &fam(),
            8,
            &tol(),
        )
        .unwrap();
        // Exact equality on the wrap-around row, exact zero elsewhere up to
        // the cycle length; slack 0 must already pass.
        assert!(report.all_rows_pass(0.0));
        let wrap = report
            .rows
            .iter()
            .find(|r| r.n == 5 && r.j == 5)
            .unwrap();
        assert!(wrap.premise_ok);
        assert_eq!(wrap.lhs, 2.0);
        assert_eq!(wrap.rhs, 2.0);
        let early = report.rows.iter().find(|r| r.n == 5 && r.j == 3).unwrap();
        assert_eq!((early.lhs, early.rhs), (0.0, 0.0));
    }

    #[test]
    fn constant_sequence_is_all_zeros() {
        let report =
            verify_weak_to_strong(SequencePreset::Constant, &[1, 3], &fam(), 6, &tol()).unwrap();
        assert!(report.all_rows_pass(0.0));
        for r in &report.rows {
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        }
        for d in &report.distances {
            assert_eq!(d.d_sot.lower, 0.0);
            assert_eq!(d.d_wot.lower, 0.0);
        }
    }

    #[test]
    fn csv_has_one_line_per_row_plus_header() {
        let report =
            verify_weak_to_strong(SequencePreset::Constant, &[1, 2], &fam(), 3, &tol()).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert_eq!(
            lines[0],
            "n,j,premise_ok,lhs,rhs,d_sot_lower,d_sot_upper,d_wot_lower,d_wot_upper"
        );
        assert!(lines[1].starts_with("1,1,true,0,0,"));
    }

    #[test]
    fn identity_certificate_excludes_a_ball_from_the_gap_set() {
        let tolp = tol();
        let u = StructuredOperator::new(
            crate::linalg::CMatrix::identity(4),
            TailKind::Identity,
            &tolp,
        )
        .unwrap();
        let cert = nowhere_density_certificate(&u, 1, &fam(), 1e-9, &tolp).unwrap();
        assert_eq!((cert.j, cert.m), (1, 1));
        assert_eq!(cert.eta, 0.0);
        assert_eq!(cert.slope, 2.0);
        // Against the shift: the left side is the full unit gap, the right
        // side is dominated by the strong distance between I and S.
        let s = StructuredOperator::shift(&tolp);
        let check = apply_certificate(&cert, &s, &u, &fam(), 8).unwrap();
        assert!((check.lhs - 1.0).abs() < 1e-9);
        assert!(check.lhs <= check.rhs + 1e-12);
        assert_eq!(exclusion_radius(&cert, 2), 0.25);
        assert_eq!(exclusion_radius(&cert, 4), 0.125);
    }

    #[test]
    fn staged_certificate_lands_on_the_first_family_vector() {
        let tolp = tol();
        let fam = DenseFamily::new(FamilyMode::StagedDyadic);
        let u = StructuredOperator::cyclic_rotation(2, &tolp);
        // Pick j so that U* x_j is exactly x_1 = (-1-i) e_1: the image
        // U x_1 = (-1-i) e_2 lives deep in stage 2.
        let x1 = fam.vector(1);
        let (j, dist) = fam.index_near(&u.apply(&x1), 1e-9).unwrap();
        assert_eq!(dist, 0.0);
        assert!(j > 24, "a stage-2 vector must rank past all of stage 1");
        let cert = nowhere_density_certificate(&u, j, &fam, 1e-9, &tolp).unwrap();
        assert_eq!(cert.m, 1);
        assert_eq!(cert.eta, 0.0);
        assert_eq!(cert.slope, 2.0 * 2f64.sqrt());
        assert!(exclusion_radius(&cert, 3) > 0.0);
    }

    #[test]
    fn certificate_requires_a_unitary() {
        let s = StructuredOperator::shift(&tol());
        assert!(matches!(
            nowhere_density_certificate(&s, 1, &fam(), 1e-6, &tol()),
            Err(CategoryError::NotUnitary(OperatorClass::IsometryNonUnitary))
        ));
    }
}
