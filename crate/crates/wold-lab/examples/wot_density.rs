//! Unitaries are weakly dense among all contractions. The dilation trick
//! hides its auxiliary coordinates past every tested family vector, so the
//! certified weak-metric lower bound is exactly zero — not small, zero —
//! and the upper bound is the pure truncation tail.

use wold_lab::approximation::wot_unitary_approximant;
use wold_lab::experiments::sample_contraction;
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::TolerancePolicy;
use wold_lab::operator::StructuredOperator;

fn main() {
    let tol = TolerancePolicy::default();
    let fam = DenseFamily::new(FamilyMode::BasisFirst);

    let t = sample_contraction(7, 0, 8, &tol).unwrap();
    println!("sampled 8-dim contraction, weak unitary approximants:");
    println!("{:>8}  {:>10}  {:>12}  {:>22}", "eps", "aux at", "lower", "upper");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let (u, bound) = wot_unitary_approximant(&t, &fam, eps, &tol).unwrap();
        println!(
            "{eps:>8.0e}  {:>10}  {:>12}  {:>22.16}",
            u.window() / 2,
            bound.lower,
            bound.upper
        );
    }

    // Works for structurally infinite operators too: the shift's section
    // carries the subdiagonal into the dilated corner.
    let s = StructuredOperator::shift(&tol);
    let (u, bound) = wot_unitary_approximant(&s, &fam, 1e-3, &tol).unwrap();
    println!(
        "\nshift: dilated window {}, certified [{}, {:.8}] < 1e-3",
        u.window(),
        bound.lower,
        bound.upper
    );
}
