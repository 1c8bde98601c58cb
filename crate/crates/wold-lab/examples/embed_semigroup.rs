//! Every unitary here sits inside a continuous one-parameter group
//! U(t) = B e^{it diag(phi)} B*, so it has roots of every order: the n-th
//! root is just U(1/n). Discrete-time dynamics embed into continuous time.

use num_complex::Complex64;
use wold_lab::embedding::{embed_unitary, embeddability_report, EmbedRoute};
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::{Branch, CMatrix, TolerancePolicy};
use wold_lab::operator::{StructuredOperator, TailKind};

fn main() {
    let tol = TolerancePolicy::default();

    // The coordinate swap: phases {0, pi}, so its square root mixes the two
    // coordinates with complex weights (1 +- i)/2 — not reachable by any
    // real rotation.
    let mut b = CMatrix::zeros(2, 2);
    b[(0, 1)] = Complex64::new(1.0, 0.0);
    b[(1, 0)] = Complex64::new(1.0, 0.0);
    let swap = StructuredOperator::new(b, TailKind::Identity, &tol).unwrap();
    let emb = embed_unitary(&swap, Branch::Principal, &tol).unwrap();
    println!("swap phases: {:?}", emb.phases());
    let root = emb.nth_root(2, &tol).unwrap();
    println!("sqrt(swap) block:");
    for r in 0..2 {
        let row: Vec<String> = (0..2)
            .map(|c| {
                let z = root.block()[(r, c)];
                format!("{:+.2}{:+.2}i", z.re, z.im)
            })
            .collect();
        println!("  [{}]", row.join(", "));
    }
    let sq = root.block().mul(root.block());
    println!("sqrt squared back to swap: residual {:.2e}", sq.max_abs_diff(swap.block()));

    // An 8-cycle and its roots of several orders; each recomposes exactly.
    let cyc = StructuredOperator::cyclic_rotation(8, &tol);
    let emb = embed_unitary(&cyc, Branch::Principal, &tol).unwrap();
    println!("\n8-cycle: generator residual {:.2e}, continuity modulus {:.4}",
        emb.generator_residual, emb.continuity_modulus());
    for n in [2u32, 3, 5, 16] {
        let root = emb.nth_root(n, &tol).unwrap();
        let mut acc = CMatrix::identity(root.block().rows());
        for _ in 0..n {
            acc = acc.mul(root.block());
        }
        println!("  order {n:>2}: ||root^{n} - U||_max = {:.2e}", acc.max_abs_diff(cyc.block()));
    }
    println!("group law residual at (0.3, 0.4): {:.2e}", emb.group_law_residual(0.3, 0.4));

    println!("\ntrajectory checks (t, unitary residual, halving residual):");
    print!("{}", emb.grid_csv(6));

    // Non-unitary inputs route through a unitary surrogate first.
    let fam = DenseFamily::new(FamilyMode::BasisFirst);
    for (name, op) in [
        ("shift", StructuredOperator::shift(&tol)),
        ("half-projection", StructuredOperator::scaled_projection(0.5, 1, &tol).unwrap()),
    ] {
        let rep = embeddability_report(&op, &fam, 8, 1e-2, 8, Branch::Principal, &tol).unwrap();
        let route = match rep.route {
            EmbedRoute::Direct => "direct".to_string(),
            EmbedRoute::StrongApproximant { d_sot } => {
                format!("strong approximant, d_sot <= {:.4}", d_sot.upper)
            }
            EmbedRoute::WeakDilation { d_wot } => {
                format!("weak dilation, d_wot <= {:.4}", d_wot.upper)
            }
        };
        println!("\n{name}: {:?} -> {route}", rep.class);
    }
}
