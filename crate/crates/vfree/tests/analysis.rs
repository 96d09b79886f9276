//! Oracle and property tests for subgroup classes, normalizers, E-subgroups,
//! M-membership, chains and the invariant vector.

use vfree::analysis::{
    class_table, classify_elementary, e_of, factorial, find_chain, finite_subgroup_classes,
    invariants, is_hyperbolic, m_membership, normalizer, AnalysisError, ElemKind,
};
use vfree::corpus::{
    d_infinity, f2_times_z2, f2_times_z2_star_z, psl2z, sl2z, trivial_gog, zn_by_z, zn_gog,
    zn_times_f2,
};
use vfree::gog::{Dir, GraphOfGroups, Token, Word};

fn class_orders(g: &GraphOfGroups) -> Vec<usize> {
    finite_subgroup_classes(g).iter().map(|c| c.order).collect()
}

#[test]
fn psl2z_has_three_classes() {
    assert_eq!(class_orders(&psl2z()), vec![1, 2, 3]);
}

#[test]
fn f2_times_z2_has_two_classes() {
    assert_eq!(class_orders(&f2_times_z2()), vec![1, 2]);
}

#[test]
fn sl2z_has_classes_of_orders_1_2_3_4_6() {
    assert_eq!(class_orders(&sl2z()), vec![1, 2, 3, 4, 6]);
}

#[test]
fn trivial_group_has_one_class() {
    assert_eq!(class_orders(&trivial_gog()), vec![1]);
}

#[test]
fn zn_by_z_classes_are_the_subgroups_of_zn() {
    // Z/25 ⋊ Z: subgroups 1, Z/5, Z/25 — all preserved by the action.
    assert_eq!(class_orders(&zn_by_z(25, 6)), vec![1, 5, 25]);
}

#[test]
fn distinct_class_representatives_are_not_conjugate_by_short_words() {
    for g in [psl2z(), sl2z()] {
        let classes = finite_subgroup_classes(&g);
        let ball = g.ball(4).unwrap();
        for i in 0..classes.len() {
            for j in 0..classes.len() {
                if i == j || classes[i].order != classes[j].order {
                    continue;
                }
                let (ci, cj) = (&classes[i], &classes[j]);
                let wi: Vec<Word> = ci
                    .rep
                    .elements
                    .iter()
                    .map(|&x| g.iota(ci.vertex, x))
                    .collect();
                let wj: Vec<Word> = cj
                    .rep
                    .elements
                    .iter()
                    .map(|&x| g.iota(cj.vertex, x))
                    .collect();
                for nf in &ball {
                    let u = g.nf_to_word(nf);
                    let u_inv = g.inverse_word(&u);
                    // u·C_i·u⁻¹ = C_j would contradict classhood.
                    let all_match = wi.iter().all(|w| {
                        let conj = Word::concat(&[&u, w, &u_inv]);
                        wj.iter().any(|w2| g.equal_words(&conj, w2).unwrap())
                    });
                    assert!(!all_match, "classes {i} and {j} conjugate by a short word");
                }
            }
        }
    }
}

#[test]
fn normalizer_generators_fix_the_class_representative() {
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity(), zn_by_z(25, 6)] {
        let table = class_table(&g);
        for class in &table.classes {
            let ninfo = normalizer(&g, &table, class.id);
            let elems: Vec<Word> = class
                .rep
                .elements
                .iter()
                .map(|&x| g.iota(class.vertex, x))
                .collect();
            for gen in &ninfo.generators {
                let gen_inv = g.inverse_word(gen);
                for w in &elems {
                    let conj = Word::concat(&[gen, w, &gen_inv]);
                    assert!(
                        elems.iter().any(|w2| g.equal_words(&conj, w2).unwrap()),
                        "generator does not normalize the representative"
                    );
                }
            }
        }
    }
}

#[test]
fn normalizer_embeddings_are_homomorphisms() {
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity()] {
        let table = class_table(&g);
        for class in &table.classes {
            let ninfo = normalizer(&g, &table, class.id);
            assert!(
                ninfo.embedding.verify(&ninfo.presentation, &g),
                "embedding fails relations for class of order {}",
                class.order
            );
        }
    }
}

#[test]
fn f2_times_z2_central_class_has_nonelementary_full_normalizer() {
    let g = f2_times_z2();
    let table = class_table(&g);
    let z2_class = table.classes.iter().find(|c| c.order == 2).unwrap();
    let ninfo = normalizer(&g, &table, z2_class.id);
    assert_eq!(ninfo.kind, ElemKind::NonElementary);
    // The normalizer is the whole group: same shape as the input graph.
    assert_eq!(ninfo.presentation.vertices.len(), 1);
    assert_eq!(ninfo.presentation.edges.len(), 2);
}

#[test]
fn psl2z_z3_normalizer_is_finite() {
    let g = psl2z();
    let table = class_table(&g);
    let c = table.classes.iter().find(|c| c.order == 3).unwrap();
    let ninfo = normalizer(&g, &table, c.id);
    assert_eq!(ninfo.kind, ElemKind::Finite);
    assert!(ninfo.presentation.is_single_vertex());
    assert_eq!(ninfo.presentation.vertices.values().next().unwrap().order(), 3);
}

#[test]
fn zn_by_z_full_class_normalizer_is_vc_cyclic() {
    let g = zn_by_z(25, 6);
    let table = class_table(&g);
    for class in &table.classes {
        let ninfo = normalizer(&g, &table, class.id);
        assert_eq!(ninfo.kind, ElemKind::VCCyclic, "order {}", class.order);
    }
}

#[test]
fn classify_oracle_values() {
    assert_eq!(classify_elementary(&zn_gog(6)).unwrap(), ElemKind::Finite);
    assert_eq!(classify_elementary(&zn_by_z(25, 6)).unwrap(), ElemKind::VCCyclic);
    assert_eq!(classify_elementary(&d_infinity()).unwrap(), ElemKind::VCDihedral);
    assert_eq!(
        classify_elementary(&f2_times_z2()).unwrap(),
        ElemKind::NonElementary
    );
    assert_eq!(classify_elementary(&psl2z()).unwrap(), ElemKind::NonElementary);
}

#[test]
fn classification_matches_ball_growth() {
    // Finite ⇔ ball sizes stabilize; VC ⇒ at most linear growth.
    for (g, kind) in [
        (zn_gog(6), ElemKind::Finite),
        (zn_by_z(4, 1), ElemKind::VCCyclic),
        (d_infinity(), ElemKind::VCDihedral),
        (psl2z(), ElemKind::NonElementary),
    ] {
        assert_eq!(classify_elementary(&g).unwrap(), kind);
        let sizes: Vec<usize> = (0..=6).map(|r| g.ball(r).unwrap().len()).collect();
        match kind {
            ElemKind::Finite => assert_eq!(sizes[4], sizes[6]),
            ElemKind::VCCyclic | ElemKind::VCDihedral => {
                // Linear growth: increments bounded by the first increment
                // times a small constant.
                let inc: Vec<usize> = (1..sizes.len()).map(|i| sizes[i] - sizes[i - 1]).collect();
                assert!(inc.iter().max().unwrap() <= &(2 * g.k_of() * g.k_of()));
            }
            ElemKind::NonElementary => assert!(sizes[6] > 4 * sizes[3] / 2),
        }
    }
}

#[test]
fn e_of_c4_times_f2_center_is_the_full_z4() {
    let g = zn_times_f2(4);
    let table = class_table(&g);
    let c2 = table.classes.iter().find(|c| c.order == 2).unwrap();
    let ninfo = normalizer(&g, &table, c2.id);
    assert_eq!(ninfo.kind, ElemKind::NonElementary);
    let e = e_of(&g, &ninfo).unwrap();
    assert_eq!(e.subgrp.order(), 4);
}

#[test]
fn e_of_psl2z_trivial_class_is_trivial() {
    let g = psl2z();
    let table = class_table(&g);
    let ninfo = normalizer(&g, &table, 0);
    let e = e_of(&g, &ninfo).unwrap();
    assert_eq!(e.subgrp.order(), 1);
}

#[test]
fn e_of_f2_times_z2_trivial_class_is_the_center() {
    let g = f2_times_z2();
    let table = class_table(&g);
    let triv = table.classes.iter().find(|c| c.order == 1).unwrap();
    let ninfo = normalizer(&g, &table, triv.id);
    let e = e_of(&g, &ninfo).unwrap();
    assert_eq!(e.subgrp.order(), 2);
}

#[test]
fn e_of_contains_c_and_is_normalized_by_generators() {
    for g in [psl2z(), sl2z(), f2_times_z2(), zn_times_f2(4)] {
        let table = class_table(&g);
        for class in &table.classes {
            let ninfo = normalizer(&g, &table, class.id);
            if ninfo.kind != ElemKind::NonElementary {
                continue;
            }
            let e = e_of(&g, &ninfo).unwrap();
            assert!(e.subgrp.order() % class.order == 0);
            assert!(e.subgrp.order() >= class.order);
            let e_words = e.element_words(&g);
            for gen in &ninfo.generators {
                let gen_inv = g.inverse_word(gen);
                for w in &e_words {
                    let conj = Word::concat(&[gen, w, &gen_inv]);
                    assert!(e_words.iter().any(|w2| g.equal_words(&conj, w2).unwrap()));
                }
            }
        }
    }
}

#[test]
fn e_of_requires_nonelementary() {
    let g = psl2z();
    let table = class_table(&g);
    let c3 = table.classes.iter().find(|c| c.order == 3).unwrap();
    let ninfo = normalizer(&g, &table, c3.id);
    assert_eq!(e_of(&g, &ninfo), Err(AnalysisError::NotNonElementary));
}

#[test]
fn hyperbolicity_oracle() {
    let g = f2_times_z2();
    let t1 = g.lambda(0, Dir::Plus);
    let z = g.iota(0, 1);
    assert!(is_hyperbolic(&g, &t1).unwrap());
    assert!(!is_hyperbolic(&g, &z).unwrap());
    // A conjugate of an elliptic element is elliptic despite edge steps in
    // its normal form.
    let conj = Word::concat(&[&t1, &z, &g.inverse_word(&t1)]);
    assert!(!is_hyperbolic(&g, &conj).unwrap());
    // Product of the two torsion generators of PSL₂(Z) is hyperbolic.
    let p = psl2z();
    let ab = Word::concat(&[&p.iota(0, 1), &p.iota(1, 1)]);
    assert!(is_hyperbolic(&p, &ab).unwrap());
}

#[test]
fn factorial_values() {
    assert_eq!(factorial(0), 1);
    assert_eq!(factorial(6), 720);
    assert_eq!(factorial(25), 15_511_210_043_330_985_984_000_000);
}

#[test]
fn m_membership_oracle_in_f2_times_z2() {
    let g = f2_times_z2();
    let t1 = g.lambda(0, Dir::Plus);
    let t2 = g.lambda(1, Dir::Plus);
    let z = g.iota(0, 1);
    assert!(m_membership(&g, &t1, &t1).unwrap());
    assert!(m_membership(&g, &t1, &z).unwrap());
    assert!(!m_membership(&g, &t1, &t2).unwrap());
    assert_eq!(
        m_membership(&g, &z, &t1),
        Err(AnalysisError::EllipticElement)
    );
}

#[test]
fn chains_in_f2_times_z2_terminate_at_the_center() {
    let g = f2_times_z2();
    let table = class_table(&g);
    let z2 = table.classes.iter().find(|c| c.order == 2).unwrap();
    let ninfo = normalizer(&g, &table, z2.id);
    let chain = find_chain(&g, &ninfo, 3).unwrap();
    assert!(chain.elements.len() >= 2);
    assert!(chain.certified_maximal);
}

#[test]
fn chains_in_psl2z_reach_the_trivial_intersection() {
    let g = psl2z();
    let table = class_table(&g);
    let ninfo = normalizer(&g, &table, 0);
    let chain = find_chain(&g, &ninfo, 4).unwrap();
    assert!(chain.certified_maximal);
    assert!(!chain.elements.is_empty());
    for h in &chain.elements {
        assert!(is_hyperbolic(&g, h).unwrap());
    }
}

#[test]
fn invariants_of_the_trivial_group() {
    let inv = invariants(&trivial_gog()).unwrap();
    assert_eq!((inv.n1, inv.n2, inv.n3, inv.n4, inv.n5), (1, 1, 0, 0, 0));
    assert_eq!(inv.k, 1);
}

#[test]
fn invariants_of_psl2z() {
    let inv = invariants(&psl2z()).unwrap();
    assert_eq!(inv.k, 3);
    assert_eq!((inv.n1, inv.n2, inv.n3, inv.n4, inv.n5), (3, 3, 0, 1, 0));
}

#[test]
fn invariants_of_sl2z() {
    let inv = invariants(&sl2z()).unwrap();
    assert_eq!(inv.k, 6);
    assert_eq!(inv.n1, 5);
    assert_eq!(inv.n3, 0);
    assert_eq!(inv.n4, 2);
    assert_eq!(inv.n5, 1);
}

#[test]
fn invariants_of_f2_times_z2() {
    let inv = invariants(&f2_times_z2()).unwrap();
    assert_eq!(inv.k, 2);
    assert_eq!((inv.n1, inv.n3, inv.n4, inv.n5), (2, 0, 2, 1));
}

#[test]
fn invariants_of_f2_times_z2_star_z_lose_n5() {
    let inv = invariants(&f2_times_z2_star_z()).unwrap();
    assert_eq!(inv.n5, 0);
    assert_eq!(inv.n1, 2);
    assert_eq!(inv.n4, 2);
}

#[test]
fn invariants_of_zn_by_z() {
    let inv = invariants(&zn_by_z(25, 6)).unwrap();
    assert_eq!(inv.k, 25);
    assert_eq!((inv.n1, inv.n2, inv.n3, inv.n4, inv.n5), (3, 7, 3, 0, 0));
}

#[test]
fn invariants_respect_bounds_and_slides() {
    use vfree::splittings::slide_neighbors;
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity()] {
        let inv = invariants(&g).unwrap();
        assert!(inv.n3 + inv.n4 <= inv.n1);
        assert!(inv.n5 <= inv.n4);
        for (_, h, _) in slide_neighbors(&g).unwrap() {
            assert_eq!(invariants(&h).unwrap(), inv);
        }
    }
}

#[test]
fn invariants_are_stable_under_vertex_relabeling() {
    // PSL₂(Z) with swapped vertex ids.
    use std::collections::BTreeMap;
    use vfree::fingrp::{cyclic, GrpHom};
    use vfree::gog::Edge;
    let relabeled = GraphOfGroups::new(
        BTreeMap::from([(0, cyclic(2)), (1, cyclic(3))]),
        vec![Edge {
            id: 0,
            group: cyclic(1),
            from: 1,
            to: 0,
            inj_from: GrpHom { images: vec![0] },
            inj_to: GrpHom { images: vec![0] },
        }],
    );
    assert_eq!(
        invariants(&relabeled).unwrap(),
        invariants(&psl2z()).unwrap()
    );
}

#[test]
fn d_infinity_invariants() {
    let inv = invariants(&d_infinity()).unwrap();
    assert_eq!((inv.n1, inv.n3, inv.n4, inv.n5), (3, 1, 0, 0));
    let profile_kinds: Vec<ElemKind> = inv.profile.iter().map(|&(_, k)| k).collect();
    assert_eq!(
        profile_kinds,
        vec![ElemKind::VCDihedral, ElemKind::Finite, ElemKind::Finite]
    );
}

#[test]
fn malformed_conjugation_words_do_not_panic() {
    // Sanity: m_membership on nontrivial inputs with tokens validated.
    let g = sl2z();
    let t = g.tree_path(1);
    assert!(g
        .normal_form(&Word(vec![Token::VertexElt(0, 1)]))
        .unwrap()
        .steps
        .is_empty());
    assert!(t.0.len() <= 1);
}
