//! A numerical laboratory for contraction operators on an infinite-dimensional
//! separable Hilbert space, truncated honestly to finite windows.
//!
//! The crate revolves around one question made quantitative: how close is a
//! given contraction to a unitary, measured in the strong or weak operator
//! topology restricted to a fixed dense family of finitely supported vectors?
//! Everything reported as a metric value is a certified interval: a truncated
//! sum plus an analytic tail bound, so the true (infinite) value provably lies
//! inside.
//!
//! What lives where:
//!
//! * [`linalg`] — dense complex matrices, Jacobi Hermitian eigensolver,
//!   one-sided Jacobi SVD, positive-semidefinite square roots, eigenphases of
//!   unitaries.
//! * [`rng`] — SplitMix64 and the Gaussian/unitary samplers built on it; fully
//!   reproducible from a `u64` seed, no platform dependence.
//! * [`hilbert`] — finitely supported vectors over a countable orthonormal
//!   basis, and the two dense countable families used as metric test vectors.
//! * [`operator`] — contractions stored as a finite block plus a structured
//!   tail (zero / identity / shift / diagonal phases), with exact
//!   classification into strict contractions, non-unitary isometries, and
//!   unitaries.
//! * [`metrics`] — the certified interval metrics `d_sot`, `d_wot`, `d_pw`.
//! * [`approximation`] — Wold decomposition of isometries, rotation-style
//!   unitary approximants in the strong topology, Halmos dilations, and
//!   dilation-based unitary approximants in the weak topology.
//! * [`category`] — quantitative witnesses that a contraction stays away from
//!   the unitaries, a weak-vs-strong convergence verifier, and nowhere-density
//!   certificates with an explicit Lipschitz-style slope.
//! * [`embedding`] — embedding a unitary into a strongly continuous one
//!   parameter group, giving roots of every order.
//! * [`experiments`] — the seeded scenario harness behind the `wold-lab`
//!   binary; writes `summary.json`, `trials.csv`, `meta.json` per run.
//!
//! Each capability has a runnable demo under `examples/`; start with
//! `cargo run --example metrics_intervals`.

pub mod approximation;
pub mod category;
pub mod embedding;
pub mod experiments;
pub mod hilbert;
pub mod linalg;
pub mod metrics;
pub mod operator;
pub mod rng;
