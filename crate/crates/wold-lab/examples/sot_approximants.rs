//! Unitaries are strongly dense among isometries: close each shift chain
//! into an n-cycle and watch the certified distance collapse to the bare
//! truncation tail.

use wold_lab::approximation::sot_unitary_approximant;
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::TolerancePolicy;
use wold_lab::metrics::{d_sot, sot_tail};
use wold_lab::operator::StructuredOperator;

fn main() {
    let tol = TolerancePolicy::default();
    let fam = DenseFamily::new(FamilyMode::BasisFirst);
    let s = StructuredOperator::shift(&tol);
    let terms = 10;

    println!("cyclic closures U_n of the shift, distance certified with {terms} terms");
    println!("(tail floor: {})", sot_tail(terms));
    for exp in 1..=10 {
        let n = 1usize << exp;
        let u = sot_unitary_approximant(&s, n, &tol).expect("shift splits cleanly");
        let d = d_sot(&u, &s, &fam, terms);
        let note = if n > terms && d.lower == 0.0 {
            "  <- exact on every tested vector"
        } else {
            ""
        };
        println!("  n = {n:>4}:  [{:.10}, {:.10}]{note}", d.lower, d.upper);
    }

    // An isometry with a genuine unitary part: the cycle only touches the
    // shift chains, the rotation on e_1 is kept verbatim.
    let v = StructuredOperator::shift_with_phase(1.234, &tol);
    let u = sot_unitary_approximant(&v, 32, &tol).unwrap();
    let d = d_sot(&u, &v, &fam, 8);
    println!(
        "\nshift+phase, n = 32: certified [{:.8}, {:.8}] (lower is exactly {})",
        d.lower, d.upper, d.lower
    );
}
