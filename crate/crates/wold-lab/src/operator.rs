//! Contractions stored exactly: a finite block acting on the first `window`
//! coordinates (possibly overflowing into one extra row) plus a structured
//! tail that says what happens to every coordinate past the window. The
//! block and the tail touch disjoint coordinate ranges, so applying the
//! operator to a finitely supported vector is finite, exact work.

use crate::hilbert::FinSuppVec;
use crate::linalg::{svd, CMatrix, LinalgError, TolerancePolicy};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("invalid block shape: {0}")]
    InvalidShape(String),
    #[error("tail {tail:?} incompatible with overflow {overflow}")]
    TailMismatch { tail: TailKind, overflow: usize },
    #[error("block has non-finite entries")]
    NonFinite,
    #[error("block norm {norm:.6} exceeds 1 (not a contraction)")]
    NotAContraction { norm: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Action on coordinates past the window.
///
/// * `Zero` — they are annihilated.
/// * `Identity` — they are fixed.
/// * `Shift` — `e_i` goes to `e_{i+1}`; forces the block to overflow by one
///   row so the whole operator is a clean forward shift on `[window+1, oo)`.
/// * `Phase` — `e_i` goes to `e^{i(alpha + beta i)} e_i`, a diagonal unitary
///   tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailKind {
    Zero,
    Identity,
    Shift,
    Phase { alpha: f64, beta: f64 },
}

impl TailKind {
    /// Tail eigenfactor at coordinate `i` (for diagonal tails).
    fn phase_at(alpha: f64, beta: f64, i: usize) -> Complex64 {
        let theta = alpha + beta * i as f64;
        Complex64::new(theta.cos(), theta.sin())
    }
}

/// Coarse class of a contraction, with a margin saying how far it sits from
/// the rejected alternatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorClass {
    StrictContraction,
    IsometryNonUnitary,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: OperatorClass,
    /// For `Unitary`: one minus the max-entry Gram residual of the block.
    /// For `IsometryNonUnitary`: the largest distance from a window basis
    /// vector to the range (the defect the shift part creates). For
    /// `StrictContraction`: the largest norm defect `1 - ||T e_i||` over the
    /// effective basis, tail included.
    pub margin: f64,
}

/// A contraction `T`: `block` maps `span(e_1..e_window)` into
/// `span(e_1..e_{window+overflow})`, the tail handles everything past the
/// window. `overflow` is 0 or 1, and exactly 1 for a `Shift` tail (the
/// shifted tail lands on `e_{window+2}, ...`, leaving `e_{window+1}` to the
/// block).
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredOperator {
    window: usize,
    overflow: usize,
    block: CMatrix,
    tail: TailKind,
}

impl StructuredOperator {
    /// Validates shape, tail compatibility, finiteness, and the contraction
    /// bound `sigma_max(block) <= 1 + spec_tol`. The norm check runs a cheap
    /// cascade first (norm1/norm_inf bound, then Gram residual for
    /// isometric-column blocks) and only falls back to a full SVD when both
    /// are inconclusive.
    pub fn new(
        block: CMatrix,
        tail: TailKind,
        tol: &TolerancePolicy,
    ) -> Result<Self, OperatorError> {
        let window = block.cols();
        if window == 0 {
            return Err(OperatorError::InvalidShape("window must be >= 1".into()));
        }
        if block.rows() < window || block.rows() > window + 1 {
            return Err(OperatorError::InvalidShape(format!(
                "block is {}x{}, want {window} or {} rows",
                block.rows(),
                window,
                window + 1
            )));
        }
        let overflow = block.rows() - window;
        let tail_ok = match tail {
            TailKind::Shift => overflow == 1,
            TailKind::Identity | TailKind::Phase { .. } => overflow == 0,
            TailKind::Zero => true,
        };
        if !tail_ok {
            return Err(OperatorError::TailMismatch { tail, overflow });
        }
        if !block.is_finite() {
            return Err(OperatorError::NonFinite);
        }

        let quick = (block.norm1() * block.norm_inf()).sqrt();
        if quick > 1.0 + tol.spec_tol {
            let gram_res = gram_residual_max(&block);
            if gram_res > tol.spec_tol {
                let sigma = svd(&block, tol)?.singulars.first().copied().unwrap_or(0.0);
                if sigma > 1.0 + tol.spec_tol {
                    return Err(OperatorError::NotAContraction { norm: sigma });
                }
            }
        }
        Ok(StructuredOperator {
            window,
            overflow,
            block,
            tail,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn overflow(&self) -> usize {
        self.overflow
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    pub fn tail(&self) -> TailKind {
        self.tail
    }

    /// The forward shift `e_i -> e_{i+1}`.
    pub fn shift(tol: &TolerancePolicy) -> Self {
        let mut block = CMatrix::zeros(2, 1);
        block[(1, 0)] = Complex64::new(1.0, 0.0);
        StructuredOperator::new(block, TailKind::Shift, tol).expect("shift is a contraction")
    }

    /// Cyclic rotation on the first `n` coordinates, identity beyond.
    pub fn cyclic_rotation(n: usize, tol: &TolerancePolicy) -> Self {
        let mut block = CMatrix::zeros(n, n);
        for i in 0..n {
            block[((i + 1) % n, i)] = Complex64::new(1.0, 0.0);
        }
        StructuredOperator::new(block, TailKind::Identity, tol).expect("rotation is unitary")
    }

    /// `c` times the orthogonal projection onto the first `window`
    /// coordinates (zero tail).
    pub fn scaled_projection(c: f64, window: usize, tol: &TolerancePolicy) -> Result<Self, OperatorError> {
        let block = CMatrix::diag(&vec![Complex64::new(c, 0.0); window]);
        StructuredOperator::new(block, TailKind::Zero, tol)
    }

    /// Phase rotation `e^{i theta}` on coordinate 1, forward shift on the
    /// rest: the smallest isometry with both a unitary part and a shift part.
    pub fn shift_with_phase(theta: f64, tol: &TolerancePolicy) -> Self {
        let mut block = CMatrix::zeros(3, 2);
        block[(0, 0)] = Complex64::new(theta.cos(), theta.sin());
        block[(2, 1)] = Complex64::new(1.0, 0.0);
        StructuredOperator::new(block, TailKind::Shift, tol).expect("isometry is a contraction")
    }

    pub fn identity_op(tol: &TolerancePolicy) -> Self {
        StructuredOperator::new(CMatrix::identity(1), TailKind::Identity, tol)
            .expect("identity is unitary")
    }

    pub fn zero_op(tol: &TolerancePolicy) -> Self {
        StructuredOperator::new(CMatrix::zeros(1, 1), TailKind::Zero, tol)
            .expect("zero is a contraction")
    }

    /// General square-window contraction with the given tail.
    pub fn from_window_matrix(
        m: CMatrix,
        tail: TailKind,
        tol: &TolerancePolicy,
    ) -> Result<Self, OperatorError> {
        StructuredOperator::new(m, tail, tol)
    }

    /// `T x`, exact on the finitely supported representation.
    pub fn apply(&self, x: &FinSuppVec) -> FinSuppVec {
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (i, v) in x.iter() {
            if i <= self.window {
                for r in 0..self.block.rows() {
                    let entry = self.block[(r, i - 1)];
                    if entry.re == 0.0 && entry.im == 0.0 {
                        continue;
                    }
                    *acc.entry(r + 1).or_insert(Complex64::new(0.0, 0.0)) += entry * v;
                }
            } else {
                match self.tail {
                    TailKind::Zero => {}
                    TailKind::Identity => {
                        *acc.entry(i).or_insert(Complex64::new(0.0, 0.0)) += v;
                    }
                    TailKind::Shift => {
                        *acc.entry(i + 1).or_insert(Complex64::new(0.0, 0.0)) += v;
                    }
                    TailKind::Phase { alpha, beta } => {
                        *acc.entry(i).or_insert(Complex64::new(0.0, 0.0)) +=
                            TailKind::phase_at(alpha, beta, i) * v;
                    }
                }
            }
        }
        FinSuppVec::from_pairs(acc)
    }

    /// `T* x`.
    pub fn apply_adjoint(&self, x: &FinSuppVec) -> FinSuppVec {
        let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
        for (ridx, v) in x.iter() {
            if ridx <= self.window + self.overflow {
                for c in 0..self.window {
                    let entry = self.block[(ridx - 1, c)];
                    if entry.re == 0.0 && entry.im == 0.0 {
                        continue;
                    }
                    *acc.entry(c + 1).or_insert(Complex64::new(0.0, 0.0)) += entry.conj() * v;
                }
            }
            if ridx > self.window {
                match self.tail {
                    TailKind::Zero => {}
                    TailKind::Identity => {
                        *acc.entry(ridx).or_insert(Complex64::new(0.0, 0.0)) += v;
                    }
                    TailKind::Shift => {
                        // S* e_{i+1} = e_i for i > window; e_{window+1} has no
                        // tail preimage (the block may still reach it).
                        if ridx > self.window + 1 {
                            *acc.entry(ridx - 1).or_insert(Complex64::new(0.0, 0.0)) += v;
                        }
                    }
                    TailKind::Phase { alpha, beta } => {
                        *acc.entry(ridx).or_insert(Complex64::new(0.0, 0.0)) +=
                            TailKind::phase_at(alpha, beta, ridx).conj() * v;
                    }
                }
            }
        }
        FinSuppVec::from_pairs(acc)
    }

    /// `T^k x` by repeated application; compositions are never materialized
    /// as matrices.
    pub fn power_apply(&self, k: usize, x: &FinSuppVec) -> FinSuppVec {
        let mut y = x.clone();
        for _ in 0..k {
            y = self.apply(&y);
        }
        y
    }

    /// Structural classification with a quantitative margin.
    pub fn classify(&self, tol: &TolerancePolicy) -> Result<Classification, OperatorError> {
        let gram_res = gram_residual_max(&self.block);
        let isometric_block = gram_res <= tol.spec_tol;
        let class = if isometric_block && self.overflow == 0 && !matches!(self.tail, TailKind::Zero)
        {
            // Square isometric block is unitary; Identity/Phase tails keep
            // the rest unitary too.
            OperatorClass::Unitary
        } else if isometric_block && matches!(self.tail, TailKind::Shift) {
            OperatorClass::IsometryNonUnitary
        } else {
            OperatorClass::StrictContraction
        };
        let margin = match class {
            OperatorClass::Unitary => (1.0 - gram_res).max(0.0),
            OperatorClass::IsometryNonUnitary => {
                let mut worst = 0.0f64;
                for i in 1..=self.window + self.overflow {
                    worst = worst.max(self.dist_to_range(&FinSuppVec::basis(i))?);
                }
                worst
            }
            OperatorClass::StrictContraction => {
                let mut min_len = f64::INFINITY;
                for c in 0..self.window {
                    let len = (0..self.block.rows())
                        .map(|r| self.block[(r, c)].norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    min_len = min_len.min(len);
                }
                let tail_len = match self.tail {
                    TailKind::Zero => 0.0,
                    _ => 1.0,
                };
                (1.0 - min_len.min(tail_len)).max(0.0)
            }
        };
        Ok(Classification { class, margin })
    }

    /// Distance from `x` to the range of `T`, computed over the finite
    /// coordinate extent `R = max(window + overflow, max support of x)`.
    ///
    /// Restricting to generators meeting `[1, R]` is exact, not a truncation:
    /// every excluded tail column lands strictly beyond `R`, orthogonal to
    /// both `x` and all included generators, so projecting onto it cannot
    /// shrink the distance. `dist_to_range_with_extent` lets tests re-verify
    /// with a larger extent.
    pub fn dist_to_range(&self, x: &FinSuppVec) -> Result<f64, OperatorError> {
        self.dist_to_range_with_extent(x, 0)
    }

    pub fn dist_to_range_with_extent(
        &self,
        x: &FinSuppVec,
        extra: usize,
    ) -> Result<f64, OperatorError> {
        if x.is_zero() {
            return Ok(0.0);
        }
        let reach = self.window + self.overflow;
        let r_max = reach.max(x.max_support().unwrap_or(1)) + extra;

        let mut gens: Vec<Vec<Complex64>> = Vec::new();
        for c in 0..self.window {
            let mut g = vec![Complex64::new(0.0, 0.0); r_max];
            for r in 0..self.block.rows() {
                g[r] = self.block[(r, c)];
            }
            gens.push(g);
        }
        match self.tail {
            TailKind::Zero => {}
            TailKind::Identity => {
                for i in self.window + 1..=r_max {
                    let mut g = vec![Complex64::new(0.0, 0.0); r_max];
                    g[i - 1] = Complex64::new(1.0, 0.0);
                    gens.push(g);
                }
            }
            TailKind::Shift => {
                for i in self.window + 1..r_max {
                    let mut g = vec![Complex64::new(0.0, 0.0); r_max];
                    g[i] = Complex64::new(1.0, 0.0); // T e_i = e_{i+1}
                    gens.push(g);
                }
            }
            TailKind::Phase { alpha, beta } => {
                for i in self.window + 1..=r_max {
                    let mut g = vec![Complex64::new(0.0, 0.0); r_max];
                    g[i - 1] = TailKind::phase_at(alpha, beta, i);
                    gens.push(g);
                }
            }
        }

        let gmat = CMatrix::from_cols(r_max, &gens);
        let tol = TolerancePolicy::default();
        let fact = svd(&gmat, &tol)?;
        let cutoff = fact.singulars.first().copied().unwrap_or(0.0) * 1e-12;

        let mut residual: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); r_max];
        for (i, v) in x.iter() {
            residual[i - 1] = v;
        }
        for (k, &sigma) in fact.singulars.iter().enumerate() {
            if sigma <= cutoff {
                continue;
            }
            let mut overlap = Complex64::new(0.0, 0.0);
            for r in 0..r_max {
                overlap += fact.left[(r, k)].conj() * residual[r];
            }
            for r in 0..r_max {
                let delta = overlap * fact.left[(r, k)];
                residual[r] -= delta;
            }
        }
        Ok(residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
    }

    /// The finite `n x n` compression `P_n T P_n` as a dense matrix.
    pub fn section(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for c in 1..=n {
            let col = self.apply(&FinSuppVec::basis(c));
            for (r, v) in col.iter() {
                if r <= n {
                    m[(r - 1, c - 1)] = v;
                }
            }
        }
        m
    }
}

/// Max-entry residual of `B*B - I`, exploiting row sparsity: cost is the sum
/// of squared nonzeros per row, so permutation-like blocks are linear.
fn gram_residual_max(block: &CMatrix) -> f64 {
    let n = block.cols();
    let mut gram = CMatrix::zeros(n, n);
    for r in 0..block.rows() {
        let nonzeros: Vec<(usize, Complex64)> = (0..n)
            .filter_map(|c| {
                let z = block[(r, c)];
                if z.re == 0.0 && z.im == 0.0 {
                    None
                } else {
                    Some((c, z))
                }
            })
            .collect();
        for &(c1, v1) in &nonzeros {
            for &(c2, v2) in &nonzeros {
                gram[(c1, c2)] += v1.conj() * v2;
            }
        }
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// Anything that acts linearly on finitely supported vectors. Metrics are
/// generic over this so operator powers can be measured without forming
/// product matrices.
pub trait LinearOp {
    fn apply_op(&self, x: &FinSuppVec) -> FinSuppVec;
}

impl LinearOp for StructuredOperator {
    fn apply_op(&self, x: &FinSuppVec) -> FinSuppVec {
        self.apply(x)
    }
}

/// `T^k` as a lazy linear map.
#[derive(Clone, Copy)]
pub struct PoweredOp<'a> {
    pub base: &'a StructuredOperator,
    pub exponent: usize,
}

impl LinearOp for PoweredOp<'_> {
    fn apply_op(&self, x: &FinSuppVec) -> FinSuppVec {
        self.base.power_apply(self.exponent, x)
    }
}

/// Serialized form: block entries as `[re, im]` pairs in row-major order.
#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    window: usize,
    overflow: usize,
    block: Vec<Vec<[f64; 2]>>,
    tail: TailKind,
}

impl Serialize for StructuredOperator {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let block = (0..self.block.rows())
            .map(|r| {
                (0..self.block.cols())
                    .map(|c| {
                        let z = self.block[(r, c)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        OperatorRepr {
            window: self.window,
            overflow: self.overflow,
            block,
            tail: self.tail,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for StructuredOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(de)?;
        let rows = repr.window + repr.overflow;
        if repr.block.len() != rows || repr.block.iter().any(|r| r.len() != repr.window) {
            return Err(serde::de::Error::custom("block shape mismatch"));
        }
        let block = CMatrix::from_rows(
            repr.block
                .into_iter()
                .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect(),
        );
        StructuredOperator::new(block, repr.tail, &TolerancePolicy::default())
            .map_err(|e| serde::de::Error::custom(format!("invalid operator: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn shift_moves_every_coordinate_up() {
        let s = StructuredOperator::shift(&tol());
        assert_eq!(s.apply(&FinSuppVec::basis(1)), FinSuppVec::basis(2));
        assert_eq!(s.apply(&FinSuppVec::basis(7)), FinSuppVec::basis(8));
        assert!(s.apply_adjoint(&FinSuppVec::basis(1)).is_zero());
        assert_eq!(s.apply_adjoint(&FinSuppVec::basis(8)), FinSuppVec::basis(7));
        // S* S = I on a mixed vector.
        let x = FinSuppVec::from_pairs([(1, c(0.5, -0.25)), (4, c(0.0, 1.0))]);
        assert_eq!(s.apply_adjoint(&s.apply(&x)), x);
    }

    #[test]
    fn half_projection_acts_only_inside_its_window() {
        let t = StructuredOperator::from_window_matrix(
            CMatrix::diag(&[c(0.5, 0.0)]),
            TailKind::Identity,
            &tol(),
        )
        .unwrap();
        assert_eq!(t.apply(&FinSuppVec::basis(5)), FinSuppVec::basis(5));
        assert_eq!(
            t.apply(&FinSuppVec::basis(1)),
            FinSuppVec::from_pairs([(1, c(0.5, 0.0))])
        );
    }

    #[test]
    fn phase_tail_is_a_diagonal_unitary() {
        let t = StructuredOperator::from_window_matrix(
            CMatrix::diag(&[c(1.0, 0.0)]),
            TailKind::Phase {
                alpha: 0.3,
                beta: 0.11,
            },
            &tol(),
        )
        .unwrap();
        let y = t.apply(&FinSuppVec::basis(9));
        let theta: f64 = 0.3 + 0.11 * 9.0;
        assert!((y.get(9) - c(theta.cos(), theta.sin())).norm() < 1e-15);
        // T* T = I there.
        assert!((t.apply_adjoint(&y).get(9) - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(t.classify(&tol()).unwrap().class, OperatorClass::Unitary);
    }

    #[test]
    fn power_apply_iterates_without_materializing() {
        let s = StructuredOperator::shift(&tol());
        assert_eq!(s.power_apply(3, &FinSuppVec::basis(2)), FinSuppVec::basis(5));
        let u = StructuredOperator::cyclic_rotation(3, &tol());
        let x = FinSuppVec::from_pairs([(1, c(1.0, 0.0)), (2, c(0.0, 1.0))]);
        assert_eq!(u.power_apply(3, &x), x);
    }

    #[test]
    fn constructor_rejects_bad_shapes_and_tails() {
        assert!(matches!(
            StructuredOperator::new(CMatrix::zeros(3, 1), TailKind::Zero, &tol()),
            Err(OperatorError::InvalidShape(_))
        ));
        assert!(matches!(
            StructuredOperator::new(CMatrix::zeros(2, 1), TailKind::Identity, &tol()),
            Err(OperatorError::TailMismatch { .. })
        ));
        assert!(matches!(
            StructuredOperator::new(CMatrix::zeros(1, 1), TailKind::Shift, &tol()),
            Err(OperatorError::TailMismatch { .. })
        ));
    }

    #[test]
    fn constructor_rejects_expansions() {
        let m = CMatrix::diag(&[c(1.2, 0.0)]);
        assert!(matches!(
            StructuredOperator::new(m, TailKind::Zero, &tol()),
            Err(OperatorError::NotAContraction { .. })
        ));
    }

    #[test]
    fn classify_shift_as_isometry_with_unit_margin() {
        let s = StructuredOperator::shift(&tol());
        let cl = s.classify(&tol()).unwrap();
        assert_eq!(cl.class, OperatorClass::IsometryNonUnitary);
        assert!((cl.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classify_rotation_and_identity_as_unitary() {
        let u = StructuredOperator::cyclic_rotation(4, &tol());
        let cl = u.classify(&tol()).unwrap();
        assert_eq!(cl.class, OperatorClass::Unitary);
        assert_eq!(cl.margin, 1.0);
        let id = StructuredOperator::identity_op(&tol());
        assert_eq!(id.classify(&tol()).unwrap().class, OperatorClass::Unitary);
    }

    #[test]
    fn classify_damped_projection_as_strict_contraction() {
        let t = StructuredOperator::scaled_projection(0.5, 1, &tol()).unwrap();
        let cl = t.classify(&tol()).unwrap();
        assert_eq!(cl.class, OperatorClass::StrictContraction);
        // Zero tail annihilates e_2, so the norm defect is a full 1.
        assert_eq!(cl.margin, 1.0);
        let d = StructuredOperator::from_window_matrix(
            CMatrix::diag(&[c(0.9, 0.0), c(1.0, 0.0)]),
            TailKind::Identity,
            &tol(),
        )
        .unwrap();
        let cl = d.classify(&tol()).unwrap();
        assert_eq!(cl.class, OperatorClass::StrictContraction);
        assert!((cl.margin - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_tail_with_isometric_block_is_not_an_isometry() {
        let t = StructuredOperator::from_window_matrix(
            CMatrix::identity(2),
            TailKind::Zero,
            &tol(),
        )
        .unwrap();
        assert_eq!(
            t.classify(&tol()).unwrap().class,
            OperatorClass::StrictContraction
        );
    }

    #[test]
    fn shift_range_misses_e1_by_exactly_one() {
        let s = StructuredOperator::shift(&tol());
        assert_eq!(s.dist_to_range(&FinSuppVec::basis(1)).unwrap(), 1.0);
        assert!(s.dist_to_range(&FinSuppVec::basis(2)).unwrap() < 1e-12);
        assert!(s.dist_to_range(&FinSuppVec::basis(9)).unwrap() < 1e-12);
    }

    #[test]
    fn half_block_still_covers_e1() {
        // e_1 = T(2 e_1) for T with block [[1/2]], so the distance is 0.
        let t = StructuredOperator::scaled_projection(0.5, 1, &tol()).unwrap();
        assert!(t.dist_to_range(&FinSuppVec::basis(1)).unwrap() < 1e-12);
        // But e_2 is annihilated outright.
        assert_eq!(t.dist_to_range(&FinSuppVec::basis(2)).unwrap(), 1.0);
    }

    #[test]
    fn range_distance_is_stable_under_extent_doubling() {
        let s = StructuredOperator::shift(&tol());
        let t = StructuredOperator::from_window_matrix(
            CMatrix::from_rows(vec![
                vec![c(0.6, 0.0), c(0.0, -0.4)],
                vec![c(0.2, 0.2), c(0.5, 0.0)],
            ]),
            TailKind::Phase { alpha: 1.0, beta: 0.5 },
            &tol(),
        )
        .unwrap();
        let xs = [
            FinSuppVec::basis(1),
            FinSuppVec::from_pairs([(1, c(0.3, -0.7)), (3, c(0.5, 0.0)), (6, c(0.0, 0.25))]),
        ];
        for op in [&s, &t] {
            for x in &xs {
                let base = op.dist_to_range(x).unwrap();
                for extra in [5, 17] {
                    let wider = op.dist_to_range_with_extent(x, extra).unwrap();
                    assert!((base - wider).abs() < 1e-10, "extent changed the distance");
                }
            }
        }
    }

    #[test]
    fn section_of_shift_is_the_subdiagonal() {
        let s = StructuredOperator::shift(&tol());
        let m = s.section(4);
        for r in 0..4 {
            for c_ in 0..4 {
                let expect = if r == c_ + 1 { 1.0 } else { 0.0 };
                assert_eq!(m[(r, c_)], c(expect, 0.0));
            }
        }
    }

    #[test]
    fn serde_round_trip_is_bit_exact() {
        let t = StructuredOperator::from_window_matrix(
            CMatrix::from_rows(vec![
                vec![c(0.1234567890123456, -0.25), c(0.0, 0.5)],
                vec![c(1.0 / 3.0, 0.0), c(-0.7071067811865476, 1e-300)],
            ]),
            TailKind::Phase {
                alpha: std::f64::consts::PI / 7.3,
                beta: -0.001,
            },
            &tol(),
        )
        .unwrap();
        let json = serde_json::to_string(&t).unwrap();
        let back: StructuredOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(t, back);
        let s = StructuredOperator::shift(&tol());
        let back: StructuredOperator = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn serde_rejects_non_contractions() {
        let json = r#"{"window":1,"overflow":0,"block":[[[2.0,0.0]]],"tail":{"kind":"zero"}}"#;
        assert!(serde_json::from_str::<StructuredOperator>(json).is_err());
    }

    #[test]
    fn gram_residual_is_sparse_aware_and_correct() {
        let u = StructuredOperator::cyclic_rotation(64, &tol());
        assert_eq!(gram_residual_max(u.block()), 0.0);
        let m = CMatrix::from_rows(vec![vec![c(0.8, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.6, 0.0)]]);
        // B*B = diag(0.64, 0.36); residual = max |gram - I| = 0.64.
        assert!((gram_residual_max(&m) - 0.64).abs() < 1e-15);
    }
}
