//! Around every unitary there is a strong-metric ball that a range-gap set
//! {T : dist(x_j, range T) > 1/k} cannot enter. The certificate is fully
//! quantitative: an anchor index m, its distance eta to U* x_j, and the
//! slope 2^m ||x_m|| that converts metric distance into range distance.

use wold_lab::category::{apply_certificate, exclusion_radius, nowhere_density_certificate};
use wold_lab::experiments::sample_contraction;
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::{CMatrix, TolerancePolicy};
use wold_lab::operator::{StructuredOperator, TailKind};

fn main() {
    let tol = TolerancePolicy::default();
    let fam = DenseFamily::new(FamilyMode::BasisFirst);
    let identity =
        StructuredOperator::from_window_matrix(CMatrix::identity(6), TailKind::Identity, &tol)
            .unwrap();

    println!("certificates around the identity:");
    for j in 1..=4 {
        let cert = nowhere_density_certificate(&identity, j, &fam, 1e-9, &tol).unwrap();
        println!(
            "  j = {j}: anchor m = {}, eta = {}, slope = {}, ball radius (k=2) = {}",
            cert.m,
            cert.eta,
            cert.slope,
            exclusion_radius(&cert, 2)
        );
    }

    // Any contraction obeys the certified chain; sampled ones comfortably.
    let cert = nowhere_density_certificate(&identity, 1, &fam, 1e-9, &tol).unwrap();
    println!("\nchecking dist(x_1, range S) <= slope * d_sot(U, S) + 2 eta:");
    for trial in 0..4u64 {
        let s = sample_contraction(5, trial, 6, &tol).unwrap();
        let check = apply_certificate(&cert, &s, &identity, &fam, 8).unwrap();
        println!("  sample {trial}: lhs = {:.6}  <=  rhs = {:.6}", check.lhs, check.rhs);
    }

    // Contrapositive, on the operator that started it all: the shift's unit
    // range gap at e_1 forces a definite strong distance from the identity.
    let s = StructuredOperator::shift(&tol);
    let check = apply_certificate(&cert, &s, &identity, &fam, 8).unwrap();
    let implied = (check.lhs - 2.0 * cert.eta) / cert.slope;
    println!(
        "\nshift: dist(x_1, range S) = {:.4}, so d_sot(I, S) >= {:.4} — no isometric
imposter with a range gap gets anywhere near a unitary.",
        check.lhs, implied
    );
}
