//! Randomized invariants. Case counts are kept small: each case samples
//! operators and evaluates certified metrics, which is far heavier than the
//! usual proptest payload.

use proptest::prelude::*;
use wold_lab::experiments::{sample_contraction, sample_unitary};
use wold_lab::hilbert::{DenseFamily, FamilyMode};
use wold_lab::linalg::{operator_norm, TolerancePolicy};
use wold_lab::metrics::{d_pw, d_sot, d_wot};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certified_intervals_are_ordered_and_symmetric(
        seed in 0u64..1_000_000,
        dim in 2usize..8,
    ) {
        let tol = tol();
        let fam = DenseFamily::new(FamilyMode::BasisFirst);
        let t = sample_contraction(seed, 0, dim, &tol).unwrap();
        let s = sample_contraction(seed, 1, dim, &tol).unwrap();

        let ts = d_sot(&t, &s, &fam, 8);
        prop_assert!(ts.lower <= ts.upper);
        let st = d_sot(&s, &t, &fam, 8);
        prop_assert_eq!(ts.lower.to_bits(), st.lower.to_bits());
        prop_assert_eq!(ts.upper.to_bits(), st.upper.to_bits());

        let wts = d_wot(&t, &s, &fam, 8);
        prop_assert!(wts.lower <= wts.upper);
        let wst = d_wot(&s, &t, &fam, 8);
        prop_assert_eq!(wts.lower.to_bits(), wst.lower.to_bits());
        prop_assert_eq!(wts.upper.to_bits(), wst.upper.to_bits());

        // The weak sum is dominated termwise by the strong one.
        prop_assert!(wts.lower <= ts.upper + 1e-12);
    }

    #[test]
    fn refining_the_truncation_nests_the_interval(
        seed in 0u64..1_000_000,
        terms in 2usize..12,
    ) {
        let tol = tol();
        let fam = DenseFamily::new(FamilyMode::BasisFirst);
        let t = sample_contraction(seed, 2, 5, &tol).unwrap();
        let s = sample_contraction(seed, 3, 5, &tol).unwrap();
        let coarse = d_sot(&t, &s, &fam, terms);
        let fine = d_sot(&t, &s, &fam, terms + 4);
        prop_assert!(coarse.lower <= fine.lower);
        prop_assert!(fine.upper <= coarse.upper);

        let coarse = d_pw(&t, &s, &fam, 6, terms);
        let fine = d_pw(&t, &s, &fam, 6, terms + 4);
        prop_assert!(coarse.lower <= fine.lower);
        prop_assert!(fine.upper <= coarse.upper);
    }

    #[test]
    fn family_lookup_roundtrips_on_its_own_vectors(
        j in 1usize..40,
        staged in proptest::bool::ANY,
    ) {
        let fam = DenseFamily::new(if staged {
            FamilyMode::StagedDyadic
        } else {
            FamilyMode::BasisFirst
        });
        let (found, dist) = fam.index_near(&fam.vector(j), 0.0).unwrap();
        prop_assert_eq!(found, j);
        prop_assert_eq!(dist, 0.0);
    }

    #[test]
    fn sampled_operators_respect_their_classes(
        seed in 0u64..1_000_000,
        dim in 2usize..10,
    ) {
        let tol = tol();
        let t = sample_contraction(seed, 4, dim, &tol).unwrap();
        prop_assert!(operator_norm(t.block(), &tol).unwrap() <= 1.0 + 1e-10);

        let u = sample_unitary(seed, 5, dim, &tol).unwrap();
        prop_assert!(u.block().unitary_residual() <= 1e-10);
        // A unitary is at certified weak distance zero from itself and
        // positive distance from its negation.
        let fam = DenseFamily::new(FamilyMode::BasisFirst);
        prop_assert_eq!(d_wot(&u, &u, &fam, 6).lower, 0.0);
    }
}
