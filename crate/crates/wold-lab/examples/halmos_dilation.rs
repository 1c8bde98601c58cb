//! Every contraction is the corner of a unitary twice its size:
//! U = [[T, D_{T*}], [D_T, -T*]] with D_T = (I - T*T)^{1/2}.

use wold_lab::approximation::{halmos_dilation, DilationPlacement};
use wold_lab::experiments::sample_contraction;
use wold_lab::linalg::{CMatrix, TolerancePolicy};
use num_complex::Complex64;

fn main() {
    let tol = TolerancePolicy::default();

    // The scalar 1/2 dilates to a rotation by 60 degrees.
    let t = CMatrix::diag(&[Complex64::new(0.5, 0.0)]);
    let u = halmos_dilation(&t, &DilationPlacement { offset: 1, aux_dim: 1 }, &tol).unwrap();
    println!("dilation of the scalar 1/2:");
    for r in 0..2 {
        println!(
            "  [{:>7.4} {:>+7.4}i,  {:>7.4} {:>+7.4}i]",
            u.block()[(r, 0)].re,
            u.block()[(r, 0)].im,
            u.block()[(r, 1)].re,
            u.block()[(r, 1)].im
        );
    }

    // A sampled 6-dimensional contraction, auxiliary block pushed out to
    // offset 10: compression back to the corner is bitwise exact.
    let sample = sample_contraction(42, 0, 6, &tol).unwrap();
    let section = sample.section(6);
    let u = halmos_dilation(&section, &DilationPlacement { offset: 10, aux_dim: 6 }, &tol).unwrap();
    println!("\nsampled 6x6 contraction, dilated with a gap (offset 10):");
    println!("  window           {}", u.window());
    println!("  unitarity        {:.2e}", u.block().unitary_residual());
    println!(
        "  compression diff {:e}",
        u.block().submatrix(0, 0, 6, 6).max_abs_diff(&section)
    );
    println!(
        "  classified as    {:?}",
        u.classify(&tol).unwrap().class
    );
}
