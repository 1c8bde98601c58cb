//! Certified interval metrics for the strong, weak, and power-weak operator
//! topologies, restricted to contractions and a fixed dense family.
//!
//! Each metric is an infinite weighted sum over family vectors. We compute
//! the first `J` terms exactly (same order every time, so results are
//! bit-reproducible) and add the analytic worst-case bound for the rest:
//! every term of the strong metric is at most 2 because `||T - S|| <= 2` for
//! contractions, and similarly for the weak one. The reported interval
//! `[lower, upper]` therefore contains the true metric value; `lower` is the
//! truncated sum itself.

use crate::hilbert::DenseFamily;
use crate::operator::{LinearOp, PoweredOp, StructuredOperator};
use serde::Serialize;

/// A certified enclosure of a metric value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricValue {
    pub lower: f64,
    pub upper: f64,
    /// Family truncation depth `J` (for the power metric: per-power depth).
    pub terms: usize,
    /// `J^2` when the metric sums over pairs (weak and power-weak).
    pub pairs: Option<usize>,
    /// Power truncation `K` for the power-weak metric.
    pub powers: Option<usize>,
}

impl MetricValue {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// True if the two enclosures overlap (values could be equal).
    pub fn overlaps(&self, other: &MetricValue) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Report-friendly form with optional per-term breakdown.
#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    pub metric: String,
    pub lower: f64,
    pub upper: f64,
    pub terms: usize,
    pub pairs: Option<usize>,
    pub powers: Option<usize>,
    pub per_term: Option<Vec<f64>>,
}

impl MetricReport {
    pub fn from_value(metric: &str, value: MetricValue, per_term: Option<Vec<f64>>) -> Self {
        MetricReport {
            metric: metric.to_string(),
            lower: value.lower,
            upper: value.upper,
            terms: value.terms,
            pairs: value.pairs,
            powers: value.powers,
            per_term,
        }
    }
}

/// Tail bound for the strong metric truncated at `J`: each missing term is
/// `2^-j * (<= 2)`.
pub fn sot_tail(terms: usize) -> f64 {
    2.0 * 2f64.powi(-(terms as i32))
}

/// Tail bound for the weak metric truncated at `J` terms each way: the
/// missing index pairs carry total weight `2*2^-J - 4^-J`, each with a term
/// at most 2.
pub fn wot_tail(terms: usize) -> f64 {
    let j = terms as i32;
    2.0 * (2.0 * 2f64.powi(-j) - 4f64.powi(-j))
}

/// Strong-topology metric `sum_j 2^-j ||T x_j - S x_j|| / ||x_j||`.
pub fn d_sot<A, B>(t: &A, s: &B, fam: &DenseFamily, terms: usize) -> MetricValue
where
    A: LinearOp + ?Sized,
    B: LinearOp + ?Sized,
{
    d_sot_with_terms(t, s, fam, terms).0
}

pub fn d_sot_with_terms<A, B>(
    t: &A,
    s: &B,
    fam: &DenseFamily,
    terms: usize,
) -> (MetricValue, Vec<f64>)
where
    A: LinearOp + ?Sized,
    B: LinearOp + ?Sized,
{
    assert!(terms >= 1, "need at least one term");
    let mut lower = 0.0f64;
    let mut per_term = Vec::with_capacity(terms);
    for j in 1..=terms {
        let x = fam.vector(j);
        let diff = t.apply_op(&x).sub(&s.apply_op(&x));
        let term = 2f64.powi(-(j as i32)) * diff.norm() / x.norm();
        per_term.push(term);
        lower += term;
    }
    let value = MetricValue {
        lower,
        upper: lower + sot_tail(terms),
        terms,
        pairs: None,
        powers: None,
    };
    (value, per_term)
}

/// Weak-topology metric
/// `sum_{i,j} 2^{-i-j} |<T x_i - S x_i, x_j>| / (||x_i|| ||x_j||)`.
pub fn d_wot<A, B>(t: &A, s: &B, fam: &DenseFamily, terms: usize) -> MetricValue
where
    A: LinearOp + ?Sized,
    B: LinearOp + ?Sized,
{
    d_wot_with_terms(t, s, fam, terms).0
}

pub fn d_wot_with_terms<A, B>(
    t: &A,
    s: &B,
    fam: &DenseFamily,
    terms: usize,
) -> (MetricValue, Vec<f64>)
where
    A: LinearOp + ?Sized,
    B: LinearOp + ?Sized,
{
    assert!(terms >= 1, "need at least one term");
    let xs: Vec<_> = (1..=terms).map(|j| fam.vector(j)).collect();
    let norms: Vec<f64> = xs.iter().map(|x| x.norm()).collect();
    let mut lower = 0.0f64;
    let mut per_pair = Vec::with_capacity(terms * terms);
    for i in 0..terms {
        let diff = t.apply_op(&xs[i]).sub(&s.apply_op(&xs[i]));
        let wi = 2f64.powi(-(i as i32 + 1));
        for j in 0..terms {
            let wj = 2f64.powi(-(j as i32 + 1));
            let term = wi * wj * diff.inner(&xs[j]).norm() / (norms[i] * norms[j]);
            per_pair.push(term);
            lower += term;
        }
    }
    let value = MetricValue {
        lower,
        upper: lower + wot_tail(terms),
        terms,
        pairs: Some(terms * terms),
        powers: None,
    };
    (value, per_pair)
}

/// Power-weak metric `sum_k 2^-k min(1, d_wot(T^k, S^k))`: convergence in it
/// means every fixed power converges weakly. Each power's weak metric is an
/// interval, so the clamp and the weights are applied to both ends, plus the
/// `2^-K` bound for the untested powers.
pub fn d_pw(
    t: &StructuredOperator,
    s: &StructuredOperator,
    fam: &DenseFamily,
    terms: usize,
    powers: usize,
) -> MetricValue {
    assert!(powers >= 1, "need at least one power");
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    for k in 1..=powers {
        let tk = PoweredOp {
            base: t,
            exponent: k,
        };
        let sk = PoweredOp {
            base: s,
            exponent: k,
        };
        let w = d_wot(&tk, &sk, fam, terms);
        let wk = 2f64.powi(-(k as i32));
        lower += wk * w.lower.min(1.0);
        upper += wk * w.upper.min(1.0);
    }
    upper += 2f64.powi(-(powers as i32));
    MetricValue {
        lower,
        upper,
        terms,
        pairs: Some(terms * terms),
        powers: Some(powers),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::FamilyMode;
    use crate::linalg::TolerancePolicy;

    fn fam() -> DenseFamily {
        DenseFamily::new(FamilyMode::BasisFirst)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn self_distance_is_the_pure_tail() {
        let s = StructuredOperator::shift(&tol());
        let fam = fam();
        for j in [4usize, 8, 16] {
            let v = d_sot(&s, &s, &fam, j);
            assert_eq!(v.lower, 0.0);
            assert_eq!(v.upper, 2f64.powi(1 - j as i32));
            let w = d_wot(&s, &s, &fam, j);
            assert_eq!(w.lower, 0.0);
            assert_eq!(w.upper, wot_tail(j));
        }
    }

    #[test]
    fn shift_to_zero_sums_the_geometric_series_exactly() {
        // ||S e_j - 0|| / ||e_j|| = 1 for every j, so the truncated sum is
        // exactly 1 - 2^-J in binary arithmetic.
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let fam = fam();
        let v = d_sot(&s, &z, &fam, 10);
        assert_eq!(v.lower, 1.0 - 2f64.powi(-10));
        assert_eq!(v.upper, v.lower + 2f64.powi(-9));
    }

    #[test]
    fn high_shift_powers_vanish_weakly_but_not_strongly() {
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let fam = fam();
        let j = 8;
        let sn = PoweredOp {
            base: &s,
            exponent: 9,
        };
        let zn = PoweredOp {
            base: &z,
            exponent: 9,
        };
        // <S^9 e_i, e_j> = delta_{j, i+9} = 0 for i, j <= 8: exact weak zero.
        let w = d_wot(&sn, &zn, &fam, j);
        assert_eq!(w.lower, 0.0);
        // Strongly nothing shrinks: every term still has norm ratio 1.
        let v = d_sot(&sn, &zn, &fam, j);
        assert_eq!(v.lower, 1.0 - 2f64.powi(-(j as i32)));
    }

    #[test]
    fn symmetry_is_bitwise() {
        let s = StructuredOperator::shift(&tol());
        let t = StructuredOperator::scaled_projection(0.5, 3, &tol()).unwrap();
        let fam = fam();
        let ab = d_sot(&s, &t, &fam, 12);
        let ba = d_sot(&t, &s, &fam, 12);
        assert_eq!(ab, ba);
        let ab = d_wot(&s, &t, &fam, 8);
        let ba = d_wot(&t, &s, &fam, 8);
        assert_eq!(ab, ba);
    }

    #[test]
    fn triangle_inequality_on_certified_bounds() {
        let fam = fam();
        let a = StructuredOperator::shift(&tol());
        let b = StructuredOperator::zero_op(&tol());
        let c = StructuredOperator::scaled_projection(0.5, 2, &tol()).unwrap();
        let dab = d_sot(&a, &b, &fam, 10);
        let dac = d_sot(&a, &c, &fam, 10);
        let dcb = d_sot(&c, &b, &fam, 10);
        // True values satisfy the triangle inequality, so the intervals must
        // be compatible: lower(a,b) <= upper(a,c) + upper(c,b).
        assert!(dab.lower <= dac.upper + dcb.upper + 1e-12);
    }

    #[test]
    fn refinement_nests_the_intervals() {
        let fam = fam();
        let a = StructuredOperator::shift(&tol());
        let c = StructuredOperator::scaled_projection(0.5, 2, &tol()).unwrap();
        let mut prev = d_sot(&a, &c, &fam, 4);
        for j in [8usize, 16, 24] {
            let next = d_sot(&a, &c, &fam, j);
            assert!(next.lower >= prev.lower - 1e-12);
            assert!(next.upper <= prev.upper + 1e-12);
            prev = next;
        }
    }

    #[test]
    fn power_metric_separates_shift_from_zero() {
        let fam = fam();
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let v = d_pw(&s, &z, &fam, 8, 6);
        assert!(v.lower > 0.05, "lower = {}", v.lower);
        assert!(v.upper >= v.lower);
    }

    #[test]
    fn power_metric_self_distance_is_small() {
        let fam = fam();
        let s = StructuredOperator::shift(&tol());
        let v = d_pw(&s, &s, &fam, 8, 6);
        assert_eq!(v.lower, 0.0);
        assert!(v.upper <= 2f64.powi(-6) + wot_tail(8) + 1e-15);
    }

    #[test]
    fn per_term_breakdowns_sum_to_the_lower_bound() {
        let fam = fam();
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let (v, terms) = d_sot_with_terms(&s, &z, &fam, 10);
        assert_eq!(terms.len(), 10);
        assert!((terms.iter().sum::<f64>() - v.lower).abs() < 1e-15);
        let (w, pairs) = d_wot_with_terms(&s, &z, &fam, 6);
        assert_eq!(pairs.len(), 36);
        assert!((pairs.iter().sum::<f64>() - w.lower).abs() < 1e-15);
    }

    #[test]
    fn staged_family_first_vector_weights_differently() {
        // x_1 = (-1-i)e_1 has norm sqrt(2); the ratio normalization keeps the
        // shift-to-zero term at weight 1/2 regardless.
        let fam = DenseFamily::new(FamilyMode::StagedDyadic);
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let (_, terms) = d_sot_with_terms(&s, &z, &fam, 1);
        assert!((terms[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn report_carries_the_interval() {
        let fam = fam();
        let s = StructuredOperator::shift(&tol());
        let z = StructuredOperator::zero_op(&tol());
        let (v, terms) = d_sot_with_terms(&s, &z, &fam, 5);
        let rep = MetricReport::from_value("sot", v, Some(terms));
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"metric\":\"sot\""));
        assert!(json.contains("\"terms\":5"));
    }
}
