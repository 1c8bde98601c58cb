//! Certified interval metrics: every distance comes back as a `[lower,
//! upper]` enclosure whose width is the analytic truncation tail, so
//! refining the truncation can only nest the interval.

use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::TolerancePolicy;
use wold_lab::metrics::{d_pw, d_sot, d_wot};
use wold_lab::operator::StructuredOperator;

fn main() {
    let tol = TolerancePolicy::default();
    let fam = DenseFamily::new(FamilyMode::BasisFirst);
    let s = StructuredOperator::shift(&tol);
    let u = StructuredOperator::cyclic_rotation(8, &tol);

    println!("distance between the 8-cycle and the shift, refined:");
    println!("{:>5}  {:>22}  {:>22}  {:>10}", "terms", "lower", "upper", "width");
    for terms in [2usize, 4, 8, 16, 32] {
        let d = d_sot(&u, &s, &fam, terms);
        println!(
            "{:>5}  {:>22.16}  {:>22.16}  {:>10.3e}",
            terms,
            d.lower,
            d.upper,
            d.upper - d.lower
        );
    }

    // The weak metric tests matrix elements instead of image norms, so it
    // can vanish where the strong metric stays put: shift powers against 0.
    println!("\nshift powers vs zero (8 terms): strong stays, weak dies");
    for k in [1usize, 2, 4, 8, 16] {
        let sk = wold_lab::operator::PoweredOp { base: &s, exponent: k };
        let zero = StructuredOperator::zero_op(&tol);
        let ds = d_sot(&sk, &zero, &fam, 8);
        let dw = d_wot(&sk, &zero, &fam, 8);
        println!(
            "  k = {k:>2}:  d_sot in [{:.6}, {:.6}]   d_wot in [{:.6}, {:.6}]",
            ds.lower, ds.upper, dw.lower, dw.upper
        );
    }

    let d = d_pw(&s, &StructuredOperator::zero_op(&tol), &fam, 8, 6);
    println!(
        "\npower-weak metric of (shift, zero) with 6 powers: [{:.6}, {:.6}]",
        d.lower, d.upper
    );
}
