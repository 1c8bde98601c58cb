//! Embedding a unitary into a continuous one-parameter group.
//!
//! Diagonalize `U = B diag(e^{i phi}) B*` and let `U(t) = B diag(e^{i t phi})
//! B*`: then `U(0) = I`, `U(s)U(t) = U(s+t)`, `U(1) = U`, and `U(1/n)` is an
//! `n`-th root of `U` for every `n`. Which group (and which roots) you get
//! depends on the phase branch — that choice is the caller's.
//!
//! Only unitaries embed this way. For everything else the lab offers the
//! next best thing, and [`embeddability_report`] packages it: a non-unitary
//! isometry gets a strong-metric-close unitary (chain truncation), a strict
//! contraction gets a weakly indistinguishable one (dilation), and the
//! surrogate is embedded instead, with the certified distance attached.

use crate::approximation::{sot_unitary_approximant, wot_unitary_approximant, ApproxError};
use crate::hilbert::DenseFamily;
use crate::linalg::{
    unitary_eigenphases, Branch, CMatrix, EigenPhaseForm, LinalgError, TolerancePolicy,
};
use crate::metrics::{d_sot, MetricValue};
use crate::operator::{OperatorClass, OperatorError, StructuredOperator, TailKind};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("operator classifies as {0:?}, not unitary")]
    NotUnitary(OperatorClass),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
}

/// A unitary realized as time 1 of the group `t -> B diag(e^{i t phi}) B*`,
/// tail included (identity and phase tails scale their angles linearly).
#[derive(Clone, Debug)]
pub struct GroupEmbedding {
    form: EigenPhaseForm,
    tail: TailKind,
    branch: Branch,
    /// Max-entry residual of `evaluate(1)` against the source block.
    pub generator_residual: f64,
}

pub fn embed_unitary(
    u: &StructuredOperator,
    branch: Branch,
    tol: &TolerancePolicy,
) -> Result<GroupEmbedding, EmbedError> {
    let class = u.classify(tol)?.class;
    if class != OperatorClass::Unitary {
        return Err(EmbedError::NotUnitary(class));
    }
    let form = unitary_eigenphases(u.block(), branch, tol)?;
    let rebuilt = phase_block(&form, 1.0);
    let generator_residual = rebuilt.max_abs_diff(u.block());
    Ok(GroupEmbedding {
        form,
        tail: u.tail(),
        branch,
        generator_residual,
    })
}

fn phase_block(form: &EigenPhaseForm, t: f64) -> CMatrix {
    let d: Vec<Complex64> = form
        .phases
        .iter()
        .map(|&p| {
            let a = p * t;
            Complex64::new(a.cos(), a.sin())
        })
        .collect();
    form.basis
        .mul(&CMatrix::diag(&d))
        .mul(&form.basis.adjoint())
}

impl GroupEmbedding {
    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn phases(&self) -> &[f64] {
        &self.form.phases
    }

    /// Group element at time `t`.
    pub fn evaluate(&self, t: f64, tol: &TolerancePolicy) -> Result<StructuredOperator, EmbedError> {
        if !t.is_finite() {
            return Err(EmbedError::BadParameter("time must be finite".into()));
        }
        let tail = match self.tail {
            TailKind::Identity => TailKind::Identity,
            TailKind::Phase { alpha, beta } => TailKind::Phase {
                alpha: alpha * t,
                beta: beta * t,
            },
            other => {
                return Err(EmbedError::BadParameter(format!(
                    "embedded unitary cannot carry a {other:?} tail"
                )))
            }
        };
        Ok(StructuredOperator::new(
            phase_block(&self.form, t),
            tail,
            tol,
        )?)
    }

    /// `evaluate(1/n)`: an `n`-th root of the source.
    pub fn nth_root(&self, n: u32, tol: &TolerancePolicy) -> Result<StructuredOperator, EmbedError> {
        if n == 0 {
            return Err(EmbedError::BadParameter("root order must be >= 1".into()));
        }
        self.evaluate(1.0 / f64::from(n), tol)
    }

    /// The skew-adjoint generator `A = B diag(i phi) B*` of the block part,
    /// so `evaluate(t)` has block `exp(t A)`.
    pub fn generator(&self) -> CMatrix {
        let d: Vec<Complex64> = self
            .form
            .phases
            .iter()
            .map(|&p| Complex64::new(0.0, p))
            .collect();
        self.form
            .basis
            .mul(&CMatrix::diag(&d))
            .mul(&self.form.basis.adjoint())
    }

    /// Lipschitz bound: `||evaluate(t) - evaluate(s)|| <= modulus * |t - s|`
    /// in operator norm. Infinite for a phase tail with coordinate-dependent
    /// angle (the group is still strongly continuous, just not uniformly).
    pub fn continuity_modulus(&self) -> f64 {
        let block_max = self
            .form
            .phases
            .iter()
            .fold(0.0f64, |a, &p| a.max(p.abs()));
        match self.tail {
            TailKind::Identity => block_max,
            TailKind::Phase { alpha, beta } => {
                if beta == 0.0 {
                    block_max.max(alpha.abs())
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Max-entry residual of `evaluate(s) evaluate(t) = evaluate(s + t)` on
    /// the block. (On the tail the law is exact by construction.)
    pub fn group_law_residual(&self, s: f64, t: f64) -> f64 {
        let lhs = phase_block(&self.form, s).mul(&phase_block(&self.form, t));
        lhs.max_abs_diff(&phase_block(&self.form, s + t))
    }

    /// Diagnostic grid over `t in [0, 1]`: at each step, how unitary the
    /// group element is and how exactly `evaluate(t/2)^2` halves it.
    pub fn grid_csv(&self, steps: usize) -> String {
        let mut out = String::from("t,unitary_residual,halving_residual\n");
        for i in 0..=steps {
            let t = i as f64 / steps.max(1) as f64;
            let full = phase_block(&self.form, t);
            let half = phase_block(&self.form, t / 2.0);
            let halving = half.mul(&half).max_abs_diff(&full);
            out.push_str(&format!("{},{},{}\n", t, full.unitary_residual(), halving));
        }
        out
    }
}

/// How (a surrogate of) the operator was placed inside a one-parameter group.
#[derive(Clone, Debug)]
pub enum EmbedRoute {
    /// The operator is unitary; embedded as is.
    Direct,
    /// Non-unitary isometry: embedded a chain-truncation unitary at the
    /// certified strong distance.
    StrongApproximant { d_sot: MetricValue },
    /// Strict contraction: embedded a dilation at the certified weak
    /// distance (lower bound exactly zero).
    WeakDilation { d_wot: MetricValue },
}

#[derive(Clone, Debug)]
pub struct EmbeddabilityReport {
    pub class: OperatorClass,
    pub route: EmbedRoute,
    /// The unitary that was embedded (the operator itself, or its surrogate).
    pub surrogate: StructuredOperator,
    pub embedding: GroupEmbedding,
}

/// Embed the operator if unitary, otherwise its closest available unitary:
/// chain truncation at `sot_depth` for isometries, dilation at weak accuracy
/// `wot_eps` for strict contractions. `terms` is the metric truncation depth
/// used for the certified distance.
pub fn embeddability_report(
    t: &StructuredOperator,
    fam: &DenseFamily,
    sot_depth: usize,
    wot_eps: f64,
    terms: usize,
    branch: Branch,
    tol: &TolerancePolicy,
) -> Result<EmbeddabilityReport, EmbedError> {
    let class = t.classify(tol)?.class;
    let (surrogate, route) = match class {
        OperatorClass::Unitary => (t.clone(), EmbedRoute::Direct),
        OperatorClass::IsometryNonUnitary => {
            let u = sot_unitary_approximant(t, sot_depth, tol)?;
            let d = d_sot(&u, t, fam, terms);
            (u, EmbedRoute::StrongApproximant { d_sot: d })
        }
        OperatorClass::StrictContraction => {
            let (u, d) = wot_unitary_approximant(t, fam, wot_eps, tol)?;
            (u, EmbedRoute::WeakDilation { d_wot: d })
        }
    };
    let embedding = embed_unitary(&surrogate, branch, tol)?;
    Ok(EmbeddabilityReport {
        class,
        route,
        surrogate,
        embedding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::FamilyMode;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn swap() -> StructuredOperator {
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = Complex64::new(1.0, 0.0);
        b[(1, 0)] = Complex64::new(1.0, 0.0);
        StructuredOperator::new(b, TailKind::Identity, &tol()).unwrap()
    }

    #[test]
    fn swap_has_phases_zero_and_pi() {
        let e = embed_unitary(&swap(), Branch::Principal, &tol()).unwrap();
        assert_eq!(e.phases().len(), 2);
        assert!(e.phases()[0].abs() < 1e-12);
        assert!((e.phases()[1] - std::f64::consts::PI).abs() < 1e-12);
        assert!(e.generator_residual <= 1e-10);
    }

    #[test]
    fn square_root_of_swap_is_the_known_matrix() {
        let e = embed_unitary(&swap(), Branch::NonNeg, &tol()).unwrap();
        let half = e.nth_root(2, &tol()).unwrap();
        // B diag(1, i) B* = [[ (1+i)/2, (1-i)/2 ], [ (1-i)/2, (1+i)/2 ]].
        for (r, c, re, im) in [
            (0, 0, 0.5, 0.5),
            (0, 1, 0.5, -0.5),
            (1, 0, 0.5, -0.5),
            (1, 1, 0.5, 0.5),
        ] {
            assert!(
                (half.block()[(r, c)] - Complex64::new(re, im)).norm() < 1e-12,
                "entry ({r},{c})"
            );
        }
        // And it actually squares back to the swap.
        let sq = half.block().mul(half.block());
        assert!(sq.max_abs_diff(swap().block()) < 1e-12);
    }

    #[test]
    fn roots_of_all_orders_recompose() {
        let u = StructuredOperator::cyclic_rotation(8, &tol());
        let e = embed_unitary(&u, Branch::Principal, &tol()).unwrap();
        for n in [2u32, 3, 5, 8, 16] {
            let root = e.nth_root(n, &tol()).unwrap();
            assert_eq!(root.classify(&tol()).unwrap().class, OperatorClass::Unitary);
            let mut acc = CMatrix::identity(8);
            for _ in 0..n {
                acc = acc.mul(root.block());
            }
            assert!(
                acc.max_abs_diff(u.block()) < 1e-9,
                "n-th root failed to recompose at n = {n}"
            );
        }
    }

    #[test]
    fn group_law_and_time_zero() {
        let u = StructuredOperator::cyclic_rotation(5, &tol());
        let e = embed_unitary(&u, Branch::Principal, &tol()).unwrap();
        assert!(e.group_law_residual(0.3, 0.456) < 1e-12);
        assert!(e.group_law_residual(-1.7, 2.9) < 1e-12);
        let id = e.evaluate(0.0, &tol()).unwrap();
        assert!(id.block().max_abs_diff(&CMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn generator_is_skew_adjoint_and_drives_the_group() {
        let u = StructuredOperator::cyclic_rotation(4, &tol());
        let e = embed_unitary(&u, Branch::Principal, &tol()).unwrap();
        let a = e.generator();
        let skew = a.add(&a.adjoint());
        assert!(skew.max_abs_diff(&CMatrix::zeros(4, 4)) < 1e-12);
    }

    #[test]
    fn continuity_modulus_bounds_actual_increments() {
        let u = StructuredOperator::cyclic_rotation(6, &tol());
        let e = embed_unitary(&u, Branch::Principal, &tol()).unwrap();
        let m = e.continuity_modulus();
        assert!(m <= std::f64::consts::PI + 1e-12);
        for (s, t) in [(0.0, 0.25), (0.3, 0.31), (-0.5, 0.5)] {
            let a = e.evaluate(s, &tol()).unwrap();
            let b = e.evaluate(t, &tol()).unwrap();
            let diff = a.block().sub(b.block());
            let norm = crate::linalg::operator_norm(&diff, &tol()).unwrap();
            assert!(norm <= m * (t - s).abs() + 1e-9, "increment ({s}, {t})");
        }
    }

    #[test]
    fn phase_tails_scale_linearly_and_cap_the_modulus() {
        let u = StructuredOperator::new(
            CMatrix::identity(1),
            TailKind::Phase { alpha: 0.7, beta: 0.0 },
            &tol(),
        )
        .unwrap();
        let e = embed_unitary(&u, Branch::Principal, &tol()).unwrap();
        let third = e.evaluate(1.0 / 3.0, &tol()).unwrap();
        match third.tail() {
            TailKind::Phase { alpha, beta } => {
                assert!((alpha - 0.7 / 3.0).abs() < 1e-15);
                assert_eq!(beta, 0.0);
            }
            other => panic!("expected a phase tail, got {other:?}"),
        }
        assert!((e.continuity_modulus() - 0.7).abs() < 1e-15);

        let drift = StructuredOperator::new(
            CMatrix::identity(1),
            TailKind::Phase { alpha: 0.0, beta: 0.1 },
            &tol(),
        )
        .unwrap();
        let ed = embed_unitary(&drift, Branch::Principal, &tol()).unwrap();
        assert!(ed.continuity_modulus().is_infinite());
    }

    #[test]
    fn grid_csv_shape_and_exact_halving() {
        let e = embed_unitary(&swap(), Branch::Principal, &tol()).unwrap();
        let csv = e.grid_csv(4);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "t,unitary_residual,halving_residual");
        for l in &lines[1..] {
            let fields: Vec<&str> = l.split(',').collect();
            assert!(fields[1].parse::<f64>().unwrap() < 1e-12);
            assert!(fields[2].parse::<f64>().unwrap() < 1e-12);
        }
    }

    #[test]
    fn only_unitaries_embed_directly() {
        let s = StructuredOperator::shift(&tol());
        assert!(matches!(
            embed_unitary(&s, Branch::Principal, &tol()),
            Err(EmbedError::NotUnitary(OperatorClass::IsometryNonUnitary))
        ));
    }

    #[test]
    fn report_routes_by_class() {
        let tolp = tol();
        let fam = DenseFamily::new(FamilyMode::BasisFirst);

        let u = StructuredOperator::cyclic_rotation(3, &tolp);
        let r = embeddability_report(&u, &fam, 32, 1e-2, 8, Branch::Principal, &tolp).unwrap();
        assert!(matches!(r.route, EmbedRoute::Direct));
        assert_eq!(r.surrogate, u);

        let s = StructuredOperator::shift(&tolp);
        let r = embeddability_report(&s, &fam, 64, 1e-2, 8, Branch::Principal, &tolp).unwrap();
        match &r.route {
            EmbedRoute::StrongApproximant { d_sot } => {
                assert_eq!(d_sot.lower, 0.0);
                assert!(d_sot.upper < 0.01);
            }
            other => panic!("expected the strong route, got {other:?}"),
        }
        assert!(r.embedding.generator_residual <= 1e-10);

        let t = StructuredOperator::scaled_projection(0.5, 1, &tolp).unwrap();
        let r = embeddability_report(&t, &fam, 32, 1e-3, 8, Branch::Principal, &tolp).unwrap();
        match &r.route {
            EmbedRoute::WeakDilation { d_wot } => {
                assert_eq!(d_wot.lower, 0.0);
                assert!(d_wot.upper < 1e-3);
            }
            other => panic!("expected the weak route, got {other:?}"),
        }
    }
}
