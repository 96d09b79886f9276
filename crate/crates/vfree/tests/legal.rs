//! Tests for legal large and small extension moves, homomorphism extension
//! by conjugation, and the special / strongly-special test.

use std::collections::BTreeMap;

use vfree::analysis::invariants;
use vfree::corpus::{
    d_infinity, f2_times_z2, psl2z, sl2z, zn_by_z, zn_gog, zn_times_f2,
};
use vfree::fingrp::cyclic;
use vfree::gog::{Dir, Edge, End, GoGHom, GraphOfGroups, Word};
use vfree::legal::{
    apply_legal_large, apply_legal_small, check_special, extend_hom, legal_large_candidates,
    legal_small_candidates, LegalError,
};
use vfree::vcyc::structure_of;
use vfree::{FinGroup, GrpHom, Subgrp};

/// The power map x ↦ x^k of a cyclic group as a GrpHom.
fn power_map(c: &FinGroup, k: i64) -> GrpHom {
    GrpHom {
        images: (0..c.order()).map(|x| c.pow(x, k)).collect(),
    }
}

/// (Z/25 ⋊₆ Z) ∗ Z/2: the ⋊-part carried by a loop on a larger graph, so
/// the normalizer of the Z/25 class is a proper virtually cyclic subgroup.
fn zn_by_z_free_z2() -> GraphOfGroups {
    let g = zn_by_z(25, 6);
    let z2 = cyclic(2);
    let triv = cyclic(1);
    let mut vertices = g.vertices.clone();
    vertices.insert(1, z2.clone());
    let mut edges = g.edges.clone();
    edges.push(Edge {
        id: 1,
        group: triv.clone(),
        from: 0,
        to: 1,
        inj_from: GrpHom { images: vec![0] },
        inj_to: GrpHom { images: vec![0] },
    });
    GraphOfGroups::new(vertices, edges)
}

/// Z/4 × F₂ with an extra loop commuting only with the subgroup ⟨c²⟩.
fn zn4_f2_with_sub_loop() -> GraphOfGroups {
    let g = zn_times_f2(4);
    let z4 = g.vertex_group(0).clone();
    let (sub, back) = z4.subgroup_as_group(&Subgrp {
        elements: vec![0, 2],
    });
    let inc = GrpHom { images: back };
    let mut edges = g.edges.clone();
    edges.push(Edge {
        id: 2,
        group: sub,
        from: 0,
        to: 0,
        inj_from: inc.clone(),
        inj_to: inc,
    });
    GraphOfGroups::new(g.vertices.clone(), edges)
}

// ---------------------------------------------------------------- large

#[test]
fn large_candidates_psl2z_is_trivial_class_only() {
    let g = psl2z();
    let cands = legal_large_candidates(&g).expect("non-elementary");
    assert_eq!(cands.len(), 1);
    assert_eq!(cands[0].class.order, 1);
}

#[test]
fn large_candidates_f2_times_z2_excludes_trivial_class() {
    let g = f2_times_z2();
    let cands = legal_large_candidates(&g).expect("non-elementary");
    assert_eq!(cands.len(), 1);
    assert_eq!(cands[0].class.order, 2);
}

#[test]
fn large_candidates_sl2z_is_central_z2() {
    let g = sl2z();
    let cands = legal_large_candidates(&g).expect("non-elementary");
    assert_eq!(cands.len(), 1);
    assert_eq!(cands[0].class.order, 2);
}

#[test]
fn large_candidates_elementary_group_rejected() {
    assert!(matches!(
        legal_large_candidates(&zn_gog(6)),
        Err(LegalError::ElementaryGroup)
    ));
    assert!(matches!(
        legal_large_candidates(&zn_by_z(25, 6)),
        Err(LegalError::ElementaryGroup)
    ));
}

#[test]
fn apply_large_f2_times_z2_adds_loop_and_preserves_invariants() {
    let g = f2_times_z2();
    let step = legal_large_candidates(&g).unwrap().remove(0);
    let g2 = apply_legal_large(&g, &step).expect("legal step applies");
    assert_eq!(g2.edges.len(), 3);
    assert_eq!(g2.edges[2].group.order(), 2);
    assert!(g2.edges[2].is_loop());
    assert_eq!(invariants(&g).unwrap(), invariants(&g2).unwrap());

    // The move is repeatable: the same class is again a candidate.
    let step2 = legal_large_candidates(&g2)
        .unwrap()
        .into_iter()
        .find(|s| s.class.order == 2)
        .expect("class still eligible");
    let g3 = apply_legal_large(&g2, &step2).expect("repeatable");
    assert_eq!(g3.edges.len(), 4);
    assert_eq!(invariants(&g).unwrap(), invariants(&g3).unwrap());
}

#[test]
fn apply_large_sl2z_preserves_invariants() {
    let g = sl2z();
    let step = legal_large_candidates(&g).unwrap().remove(0);
    let g2 = apply_legal_large(&g, &step).expect("legal step applies");
    assert_eq!(g2.edges.len(), 2);
    assert_eq!(invariants(&g).unwrap(), invariants(&g2).unwrap());
}

#[test]
fn apply_large_rejects_non_candidate_class() {
    // The trivial class of F₂ × Z/2 has E(N) = Z/2 ≠ {1}, so it is not
    // legal; a forged step must be rejected.
    let g = f2_times_z2();
    let psl = psl2z();
    let forged = legal_large_candidates(&psl).unwrap().remove(0);
    assert!(matches!(
        apply_legal_large(&g, &forged),
        Err(LegalError::IllegalStep)
    ));
}

// ---------------------------------------------------------------- small

#[test]
fn small_candidates_zn_by_z_25_6() {
    let g = zn_by_z(25, 6);
    let cands = legal_small_candidates(&g).expect("candidates");
    assert_eq!(cands.len(), 2);
    let n = structure_of(&g).unwrap();
    let z25 = cyclic(25);
    for step in &cands {
        assert_eq!(step.class.order, 25);
        assert_eq!(step.partner.c.order(), 25);
    }
    // One partner is the group itself, the other has monodromy ·11 or ·16.
    let selfs: Vec<_> = cands.iter().filter(|s| s.partner == n).collect();
    assert_eq!(selfs.len(), 1);
    let other = cands.iter().find(|s| s.partner != n).expect("other");
    let beta = other.partner.alpha();
    assert!(beta == power_map(&z25, 11) || beta == power_map(&z25, 16));
}

#[test]
fn small_candidates_empty_for_rigid_groups() {
    assert!(legal_small_candidates(&sl2z()).unwrap().is_empty());
    assert!(legal_small_candidates(&psl2z()).unwrap().is_empty());
    assert!(legal_small_candidates(&f2_times_z2()).unwrap().is_empty());
}

#[test]
fn small_candidates_d_infinity_is_self_partner() {
    let g = d_infinity();
    let cands = legal_small_candidates(&g).expect("candidates");
    assert_eq!(cands.len(), 1);
    assert_eq!(cands[0].class.order, 1);
    assert!(cands[0].partner.is_dihedral());
}

#[test]
fn apply_small_replaces_monodromy_of_whole_group() {
    let g = zn_by_z(25, 6);
    let n = structure_of(&g).unwrap();
    let z25 = cyclic(25);
    let cands = legal_small_candidates(&g).unwrap();

    let other = cands.iter().find(|s| s.partner != n).unwrap();
    let out = apply_legal_small(&g, other).expect("partner swap");
    let m = structure_of(&out).unwrap();
    assert!(m.alpha() == power_map(&z25, 11) || m.alpha() == power_map(&z25, 16));
    assert_eq!(invariants(&g).unwrap(), invariants(&out).unwrap());

    let id_step = cands.iter().find(|s| s.partner == n).unwrap();
    let back = apply_legal_small(&g, id_step).expect("identity partner");
    assert_eq!(structure_of(&back).unwrap(), n);
}

#[test]
fn apply_small_d_infinity_identity() {
    let g = d_infinity();
    let step = legal_small_candidates(&g).unwrap().remove(0);
    let out = apply_legal_small(&g, &step).expect("identity partner");
    assert!(structure_of(&out).unwrap().is_dihedral());
    assert_eq!(invariants(&g).unwrap(), invariants(&out).unwrap());
}

#[test]
fn apply_small_splices_loop_inside_larger_graph() {
    let g = zn_by_z_free_z2();
    let z25 = cyclic(25);
    let cands = legal_small_candidates(&g).expect("candidates");
    let swap = cands
        .iter()
        .find(|s| s.partner.alpha() != power_map(&z25, 6))
        .expect("nontrivial partner");
    let out = apply_legal_small(&g, swap).expect("loop splice");
    assert_eq!(out.vertices.len(), 2);
    let new_mu = &out.edge(0).inj_to;
    assert!(*new_mu == power_map(&z25, 11) || *new_mu == power_map(&z25, 16));
    assert_eq!(invariants(&g).unwrap(), invariants(&out).unwrap());
}

#[test]
fn apply_small_rejects_foreign_step() {
    // ·11 is not a power of ·7 on Z/25, so the partner step of Z/25⋊₆Z is
    // not legal for Z/25⋊₇Z.
    let g6 = zn_by_z(25, 6);
    let n6 = structure_of(&g6).unwrap();
    let step = legal_small_candidates(&g6)
        .unwrap()
        .into_iter()
        .find(|s| s.partner != n6)
        .unwrap();
    let g7 = zn_by_z(25, 7);
    assert!(matches!(
        apply_legal_small(&g7, &step),
        Err(LegalError::IllegalStep)
    ));
}

// ---------------------------------------------------------------- extend

#[test]
fn extend_hom_identity_round_trip() {
    let g = f2_times_z2();
    let id = GoGHom::identity_hom(&g);
    let out = extend_hom(&g, &g, &id, &id.vertex_images, &BTreeMap::new()).expect("identity");
    assert!(out.verify(&g, &g));
    for (e, w) in &out.edge_images {
        assert!(g.equal_words(w, &id.edge_images[e]).unwrap());
    }
}

#[test]
fn extend_hom_detects_edge_mismatch() {
    // On Z/4 ⋊₃ Z the automorphism x ↦ 3x of the vertex group is not
    // inner, so without conjugators the loop relation cannot extend.
    let g = zn_by_z(4, 3);
    let id = GoGHom::identity_hom(&g);
    let sigma: Vec<Word> = (0..4).map(|x| g.iota(0, (3 * x) % 4)).collect();
    let vmaps = BTreeMap::from([(0, sigma)]);
    assert!(matches!(
        extend_hom(&g, &g, &id, &vmaps, &BTreeMap::new()),
        Err(LegalError::EdgeMismatch { edge: 0 })
    ));
}

#[test]
fn extend_hom_with_conjugators_realizes_conjugation() {
    // The same vertex automorphism is conjugation by the stable letter, so
    // providing t as the conjugator at both ends succeeds and produces the
    // inner automorphism by t.
    let g = zn_by_z(4, 3);
    let id = GoGHom::identity_hom(&g);
    let sigma: Vec<Word> = (0..4).map(|x| g.iota(0, (3 * x) % 4)).collect();
    let vmaps = BTreeMap::from([(0, sigma)]);
    let t = g.lambda(0, Dir::Plus);
    let conj = BTreeMap::from([((0, End::From), t.clone()), ((0, End::To), t.clone())]);
    let hom = extend_hom(&g, &g, &id, &vmaps, &conj).expect("conjugation extends");
    assert!(hom.verify(&g, &g));
    assert!(g.equal_words(&hom.edge_images[&0], &t).unwrap());
    // H(ι(1)) = t·ι(1)·t⁻¹ = ι(3).
    let img = hom.apply(&g, &g, &g.iota(0, 1)).unwrap();
    assert!(g.equal_words(&img, &g.iota(0, 3)).unwrap());
}

#[test]
fn extend_hom_reroutes_stable_letter() {
    // Send the first loop letter of F₂ × Z/2 to λ₁·λ₀ by conjugating its
    // arrival end with λ₁.
    let g = f2_times_z2();
    let id = GoGHom::identity_hom(&g);
    let w = g.lambda(1, Dir::Plus);
    let conj = BTreeMap::from([((0, End::To), w.clone())]);
    let hom = extend_hom(&g, &g, &id, &id.vertex_images, &conj).expect("reroute");
    assert!(hom.verify(&g, &g));
    let expected = Word::concat(&[&w, &g.lambda(0, Dir::Plus)]);
    assert!(g.equal_words(&hom.edge_images[&0], &expected).unwrap());
}

// ---------------------------------------------------------------- special

#[test]
fn identity_is_strongly_special_on_corpus() {
    for g in [psl2z(), sl2z(), f2_times_z2(), zn_by_z(25, 6), d_infinity()] {
        let id = GoGHom::identity_hom(&g);
        let res = check_special(&g, &g, &id).expect("well-formed");
        assert!(res.special, "identity not special: {:?}", res.failures);
        assert!(
            res.strongly_special,
            "identity not strongly special: {:?}",
            res.failures
        );
    }
}

#[test]
fn retraction_killing_large_letter_is_strongly_special() {
    let g = f2_times_z2();
    let step = legal_large_candidates(&g).unwrap().remove(0);
    let big = apply_legal_large(&g, &step).unwrap();
    let id = GoGHom::identity_hom(&g);
    let mut edge_images = id.edge_images.clone();
    edge_images.insert(2, Word::empty());
    let retract = GoGHom {
        vertex_images: id.vertex_images.clone(),
        edge_images,
    };
    let res = check_special(&big, &g, &retract).expect("well-formed");
    assert!(res.special, "{:?}", res.failures);
    assert!(res.strongly_special, "{:?}", res.failures);
}

#[test]
fn inclusion_with_shrinking_e_is_special_not_strongly() {
    // Z/4 × F₂ includes into the extension with a loop commuting only with
    // ⟨c²⟩; the center drops from Z/4 to ⟨c²⟩, so the inclusion is special
    // but not strongly special.
    let g = zn_times_f2(4);
    let big = zn4_f2_with_sub_loop();
    let vmaps = BTreeMap::from([(0, (0..4).map(|x| big.iota(0, x)).collect::<Vec<_>>())]);
    let edge_images = BTreeMap::from([
        (0, big.lambda(0, Dir::Plus)),
        (1, big.lambda(1, Dir::Plus)),
    ]);
    let phi = GoGHom {
        vertex_images: vmaps,
        edge_images,
    };
    assert!(phi.verify(&g, &big));
    let res = check_special(&g, &big, &phi).expect("well-formed");
    assert!(res.special, "{:?}", res.failures);
    assert!(!res.strongly_special);
    assert!(!res.failures.is_empty());
}

#[test]
fn collapsing_map_is_not_special() {
    // Kill the Z/2 of F₂ × Z/2: finite subgroups collapse, so the map is
    // a homomorphism but not special.
    let g = f2_times_z2();
    let vmaps = BTreeMap::from([(0, vec![Word::empty(), Word::empty()])]);
    let edge_images = BTreeMap::from([(0, g.lambda(0, Dir::Plus)), (1, g.lambda(1, Dir::Plus))]);
    let phi = GoGHom {
        vertex_images: vmaps,
        edge_images,
    };
    assert!(phi.verify(&g, &g));
    let res = check_special(&g, &g, &phi).expect("well-formed");
    assert!(!res.special);
    assert!(!res.strongly_special);
}

#[test]
fn check_special_rejects_k_increase() {
    // The trivial map from F₂ × Z/2 (K = 2) into SL₂(Z) (K = 6) is a
    // homomorphism but raises K.
    let src = f2_times_z2();
    let tgt = sl2z();
    let vmaps = BTreeMap::from([(0, vec![Word::empty(), Word::empty()])]);
    let edge_images = BTreeMap::from([(0, Word::empty()), (1, Word::empty())]);
    let phi = GoGHom {
        vertex_images: vmaps,
        edge_images,
    };
    assert!(phi.verify(&src, &tgt));
    assert!(matches!(
        check_special(&src, &tgt, &phi),
        Err(LegalError::BadK { k_src: 2, k_tgt: 6 })
    ));
}

#[test]
fn check_special_rejects_non_homomorphism() {
    let g = psl2z();
    let id = GoGHom::identity_hom(&g);
    let mut broken = id.clone();
    // Map the Z/3 generator to the Z/2 generator: no longer a homomorphism.
    broken.vertex_images.get_mut(&0).unwrap()[1] = g.iota(1, 1);
    assert!(matches!(
        check_special(&g, &g, &broken),
        Err(LegalError::NotAHomomorphism)
    ));
}
