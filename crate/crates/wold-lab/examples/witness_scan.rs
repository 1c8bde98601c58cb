//! Membership witnesses: a non-unitary contraction either leaves a tested
//! vector visibly outside its range (range gap) or visibly shrinks one
//! (norm defect). Unitaries produce neither, however hard you scan.

use wold_lab::category::{find_witness, WitnessOutcome};
use wold_lab::experiments::sample_contraction;
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::TolerancePolicy;
use wold_lab::operator::StructuredOperator;

fn main() {
    let tol = TolerancePolicy::default();
    let fam = DenseFamily::new(FamilyMode::BasisFirst);

    let mut zoo: Vec<(String, StructuredOperator)> = vec![
        ("shift".into(), StructuredOperator::shift(&tol)),
        (
            "half projection".into(),
            StructuredOperator::scaled_projection(0.5, 1, &tol).unwrap(),
        ),
        ("8-cycle".into(), StructuredOperator::cyclic_rotation(8, &tol)),
        ("zero".into(), StructuredOperator::zero_op(&tol)),
    ];
    for trial in 0..4u64 {
        zoo.push((
            format!("sample {trial}"),
            sample_contraction(11, trial, 6, &tol).unwrap(),
        ));
    }

    for (label, op) in &zoo {
        let class = op.classify(&tol).unwrap();
        match find_witness(op, &fam, 8, 16, &tol).unwrap() {
            WitnessOutcome::Found(w) => println!(
                "{label:>16}  {:?}  ->  {:?} at (j, k) = ({}, {}), value {:.4}, margin {:.4}",
                class.class, w.kind, w.j, w.k, w.value, w.margin
            ),
            WitnessOutcome::NoneFound { scanned_j, scanned_k } => println!(
                "{label:>16}  {:?}  ->  clean after scanning j <= {scanned_j}, k <= {scanned_k}",
                class.class
            ),
        }
    }
}
