//! Tests for the ∀∃-equivalence decision procedure: the invariant screen,
//! the theoretical bound, chain enumeration, verdicts, and certificate
//! verification.

use num_bigint::BigUint;
use vfree::corpus::{
    d_infinity, f2_times_z2, f2_times_z2_star_z, psl2z, sl2z, trivial_gog, zn_by_z,
};
use vfree::decide::{
    compute_bound, decide, enumerate_extensions, quick_refute, verify_certificate, Certificate,
    ChainStep, DecideConfig, DecideError, NoReason, Verdict,
};
use vfree::gog::GraphOfGroups;
use vfree::legal::{apply_legal_large, legal_large_candidates};

fn config(depth: usize) -> DecideConfig {
    DecideConfig {
        depth,
        ..DecideConfig::default()
    }
}

fn expect_yes(v: Verdict) -> Box<Certificate> {
    match v {
        Verdict::Yes { certificate, .. } => certificate,
        other => panic!("expected Yes, got {other:?}"),
    }
}

fn sl2z_with_large_loop() -> GraphOfGroups {
    let g = sl2z();
    let steps = legal_large_candidates(&g).unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0].class.order, 2);
    apply_legal_large(&g, &steps[0]).unwrap()
}

#[test]
fn quick_refute_separates_psl2z_from_sl2z() {
    let which = quick_refute(&psl2z(), &sl2z()).unwrap().unwrap();
    assert!(which.starts_with("K: 3 vs 6"), "got {which}");
}

#[test]
fn quick_refute_separates_by_n5() {
    let which = quick_refute(&f2_times_z2(), &f2_times_z2_star_z())
        .unwrap()
        .unwrap();
    assert!(which.contains("n5"), "got {which}");
    assert!(which.contains("1 vs 0"), "got {which}");
}

#[test]
fn quick_refute_passes_identical_inputs() {
    for g in [psl2z(), sl2z(), zn_by_z(25, 6), d_infinity()] {
        assert_eq!(quick_refute(&g, &g).unwrap(), None);
    }
}

#[test]
fn bound_of_trivial_pair_is_two() {
    let b = compute_bound(&trivial_gog(), &trivial_gog());
    assert_eq!((b.n, b.r, b.o), (1, 0, 1));
    assert_eq!(b.value, BigUint::from(2u8));
    assert_eq!(b.symbolic, "1·(0 + 1!) + 1");
}

#[test]
fn bound_of_large_cyclic_pair_is_dominated_by_factorial() {
    let b = compute_bound(&zn_by_z(25, 6), &zn_by_z(25, 11));
    assert_eq!(b.o, 25);
    assert!(b.symbolic.contains("25!"));
    let f25 = BigUint::from(15_511_210_043_330_985_984_000_000u128);
    assert!(b.value > f25);
    assert!(format!("{b}").contains("astronomically"));
}

#[test]
fn bound_is_at_least_n() {
    for (g, h) in [
        (trivial_gog(), trivial_gog()),
        (psl2z(), sl2z()),
        (zn_by_z(25, 6), zn_by_z(25, 11)),
        (f2_times_z2(), f2_times_z2()),
    ] {
        let b = compute_bound(&g, &h);
        assert!(b.value >= BigUint::from(b.n));
    }
}

#[test]
fn depth_zero_enumeration_is_the_trivial_chain() {
    for g in [psl2z(), sl2z(), zn_by_z(25, 6)] {
        let chains = enumerate_extensions(&g, 0, 100).unwrap();
        assert_eq!(chains.len(), 1);
        assert!(chains[0].steps.is_empty());
        assert_eq!(chains[0].result, g);
    }
}

#[test]
fn psl2z_depth_one_includes_the_large_step_over_the_trivial_class() {
    let chains = enumerate_extensions(&psl2z(), 1, 100).unwrap();
    assert!(chains.iter().any(|c| {
        c.steps.len() == 1
            && matches!(&c.steps[0], ChainStep::Large(s) if s.class.order == 1)
    }));
}

#[test]
fn sl2z_depth_one_includes_the_large_step_over_the_center() {
    let chains = enumerate_extensions(&sl2z(), 1, 100).unwrap();
    let hit = chains
        .iter()
        .find(|c| {
            c.steps.len() == 1
                && matches!(&c.steps[0], ChainStep::Large(s) if s.class.order == 2)
        })
        .expect("large step over Z/2 expected");
    // The HNN extension over the center adds one loop to the amalgam.
    assert_eq!(hit.result.edges.len(), 2);
    assert_eq!(hit.result.vertices.len(), 2);
}

#[test]
fn enumeration_budget_is_enforced() {
    match enumerate_extensions(&sl2z(), 2, 2) {
        Err(DecideError::BudgetExceeded { budget: 2 }) => {}
        other => panic!("expected BudgetExceeded, got {other:?}"),
    }
}

#[test]
fn decide_is_reflexive_with_empty_chains() {
    for g in [psl2z(), sl2z(), f2_times_z2(), zn_by_z(25, 6), d_infinity()] {
        let cert = expect_yes(decide(&g, &g, &config(2)).unwrap());
        assert!(cert.chain1.steps.is_empty());
        assert!(cert.chain2.steps.is_empty());
        verify_certificate(&cert).unwrap();
    }
}

#[test]
fn decide_matches_the_semidirect_pair_via_one_small_step() {
    let g = zn_by_z(25, 6);
    let h = zn_by_z(25, 11);
    let cert = expect_yes(decide(&g, &h, &config(2)).unwrap());
    let lens = (cert.chain1.steps.len(), cert.chain2.steps.len());
    assert!(lens == (1, 0) || lens == (0, 1), "got {lens:?}");
    verify_certificate(&cert).unwrap();
    // Symmetry.
    let cert = expect_yes(decide(&h, &g, &config(2)).unwrap());
    verify_certificate(&cert).unwrap();
}

#[test]
fn decide_matches_sl2z_with_its_large_extension() {
    let h = sl2z_with_large_loop();
    let cert = expect_yes(decide(&sl2z(), &h, &config(2)).unwrap());
    let lens = (cert.chain1.steps.len(), cert.chain2.steps.len());
    assert!(lens == (1, 0) || lens == (0, 1), "got {lens:?}");
    verify_certificate(&cert).unwrap();
}

#[test]
fn invariant_mismatch_refutes_without_enumeration() {
    let v = decide(&psl2z(), &sl2z(), &config(3)).unwrap();
    match v {
        Verdict::No {
            reason: NoReason::InvariantMismatch { which },
            bound,
        } => {
            assert!(which.starts_with("K"));
            assert!(bound.value >= BigUint::from(bound.n));
        }
        other => panic!("expected invariant mismatch, got {other:?}"),
    }
    let v = decide(&f2_times_z2(), &f2_times_z2_star_z(), &config(3)).unwrap();
    assert!(matches!(
        v,
        Verdict::No {
            reason: NoReason::InvariantMismatch { .. },
            ..
        }
    ));
}

#[test]
fn depth_zero_on_a_distinct_pair_is_unknown() {
    let v = decide(&zn_by_z(25, 6), &zn_by_z(25, 11), &config(0)).unwrap();
    match v {
        Verdict::Unknown {
            explored_depth,
            truncated,
            ..
        } => {
            assert_eq!(explored_depth, 0);
            assert!(!truncated);
        }
        other => panic!("expected Unknown, got {other:?}"),
    }
}

#[test]
fn inequivalent_same_k_pair_gets_a_sound_no() {
    // ·7 has multiplicative order 4 mod 25 and no mutual nice partner other
    // than itself, while the partner orbit of ·6 is {·6, ·11-type}; the two
    // groups are inequivalent.
    let v = decide(&zn_by_z(25, 6), &zn_by_z(25, 7), &config(3)).unwrap();
    assert!(matches!(v, Verdict::No { .. }), "got {v:?}");
}

#[test]
fn tampered_chain_fails_verification() {
    let g = zn_by_z(25, 6);
    let h = zn_by_z(25, 11);
    let mut cert = *expect_yes(decide(&g, &h, &config(2)).unwrap());
    let (long, _short) = if cert.chain1.steps.is_empty() {
        (&mut cert.chain2, &mut cert.chain1)
    } else {
        (&mut cert.chain1, &mut cert.chain2)
    };
    match &mut long.steps[0] {
        ChainStep::Small(s) => s.class.order += 1,
        ChainStep::Large(s) => s.class.order += 1,
    }
    let err = verify_certificate(&cert).unwrap_err();
    assert!(matches!(err, DecideError::BadCertificate { .. }), "{err}");
}

#[test]
fn tampered_iso_witness_fails_verification() {
    let g = zn_by_z(25, 6);
    let mut cert = *expect_yes(decide(&g, &g, &config(1)).unwrap());
    // Corrupt one vertex isomorphism into a non-homomorphism.
    let hom = cert
        .iso
        .iso
        .vertex_isos
        .values_mut()
        .next()
        .expect("at least one vertex");
    hom.images.swap(0, 1);
    let err = verify_certificate(&cert).unwrap_err();
    assert!(matches!(err, DecideError::BadCertificate { .. }), "{err}");
}

#[test]
fn certificates_survive_a_json_round_trip() {
    let g = zn_by_z(25, 6);
    let h = zn_by_z(25, 11);
    let cert = expect_yes(decide(&g, &h, &config(2)).unwrap());
    let text = serde_json::to_string(&*cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    verify_certificate(&back).unwrap();
}

#[test]
fn prepending_a_legal_step_never_flips_yes_to_no() {
    // G ≡∀∃ H and G′ a legal extension of G implies G′ ≡∀∃ H.
    let f2 = f2_times_z2();
    let steps = legal_large_candidates(&f2).unwrap();
    let f2_ext = apply_legal_large(&f2, &steps[0]).unwrap();
    assert!(decide(&f2_ext, &f2, &config(2)).unwrap().is_yes());

    let sl = sl2z_with_large_loop();
    assert!(decide(&sl, &sl2z(), &config(2)).unwrap().is_yes());
}

#[test]
fn chains_preserve_the_invariants() {
    use vfree::analysis::invariants;
    for g in [psl2z(), sl2z(), f2_times_z2()] {
        let base_inv = invariants(&g).unwrap();
        for chain in enumerate_extensions(&g, 2, 50).unwrap() {
            assert_eq!(invariants(&chain.result).unwrap(), base_inv);
        }
    }
}
