//! Splitting an isometry into shift chains and a unitary part.

use wold_lab::approximation::wold;
use wold_lab::linalg::TolerancePolicy;
use wold_lab::operator::StructuredOperator;

fn main() {
    let tol = TolerancePolicy::default();

    for (label, v) in [
        ("forward shift", StructuredOperator::shift(&tol)),
        ("shift + phase on e_1", StructuredOperator::shift_with_phase(0.77, &tol)),
        ("4-cycle (already unitary)", StructuredOperator::cyclic_rotation(4, &tol)),
    ] {
        let wd = wold(&v, 6, &tol).expect("all three are isometries");
        println!("{label}:");
        println!("  multiplicity        {}", wd.multiplicity);
        println!("  unitary part dim    {}", wd.unitary_basis.len());
        println!("  gram residual       {:.2e}", wd.system_gram_residual);
        for (w, chain) in wd.chains.iter().enumerate() {
            let supports: Vec<String> = chain
                .iter()
                .map(|c| format!("{:?}", c.support()))
                .collect();
            println!("  chain {w}: supports {}", supports.join(" -> "));
        }
        if wd.unitary_basis.len() > 0 {
            println!("  unitary block       {:?}", wd.unitary_block);
        }
        println!();
    }

    // Chains cut too early leave shift-like directions in the leftover
    // space; that is detected, not silently absorbed.
    let v = StructuredOperator::shift_with_phase(0.3, &tol);
    match wold(&v, 1, &tol) {
        Err(e) => println!("depth 1 on shift+phase: refused ({e})"),
        Ok(_) => unreachable!("depth 1 cannot be enough here"),
    }
}
