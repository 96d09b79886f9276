//! Oracle and property tests for graphs of groups: validation, normal
//! forms, the word problem, and growth balls.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vfree::corpus::{d_infinity, f2_times_z2, psl2z, sl2z, trivial_gog, zn_gog};
use vfree::fingrp::{cyclic, GrpHom};
use vfree::gog::{Dir, Edge, GogError, GraphOfGroups, Token, Word};

/// A random valid loop at the base vertex with roughly `len` tokens.
fn random_loop(g: &GraphOfGroups, len: usize, rng: &mut ChaCha8Rng) -> Word {
    let base = g.base_vertex();
    let mut at = base;
    let mut tokens = Vec::new();
    for _ in 0..len {
        // Collect the moves available at the current vertex.
        let mut options: Vec<Token> = Vec::new();
        let gv = g.vertex_group(at);
        for x in 1..gv.order() {
            options.push(Token::VertexElt(at, x));
        }
        for e in &g.edges {
            for dir in [Dir::Plus, Dir::Minus] {
                if e.endpoint(dir.departure()) == at {
                    options.push(Token::EdgeStep(e.id, dir));
                }
            }
        }
        if options.is_empty() {
            break;
        }
        let t = options[rng.gen_range(0..options.len())];
        if let Token::EdgeStep(eid, dir) = t {
            at = g.edge(eid).endpoint(dir.arrival());
        }
        tokens.push(t);
    }
    // Close the loop along the spanning tree.
    let back = g.inverse_word(&g.tree_path(at));
    tokens.extend_from_slice(&back.0);
    Word(tokens)
}

#[test]
fn single_vertex_validates() {
    assert!(zn_gog(2).validate().is_ok());
    assert!(trivial_gog().validate().is_ok());
}

#[test]
fn two_isolated_vertices_are_disconnected() {
    let g = GraphOfGroups::new(
        BTreeMap::from([(0, cyclic(2)), (1, cyclic(3))]),
        vec![],
    );
    let errs = g.validate().unwrap_err();
    assert_eq!(errs, vec![GogError::Disconnected { vertex: 1 }]);
}

#[test]
fn sl2z_validates() {
    assert!(sl2z().validate().is_ok());
}

#[test]
fn non_injective_edge_map_is_rejected() {
    let z2 = cyclic(2);
    let e = Edge {
        id: 7,
        group: z2.clone(),
        from: 0,
        to: 0,
        inj_from: GrpHom {
            images: vec![0, 0],
        },
        inj_to: GrpHom::identity(&z2),
    };
    let g = GraphOfGroups::new(BTreeMap::from([(0, z2)]), vec![e]);
    let errs = g.validate().unwrap_err();
    assert_eq!(errs, vec![GogError::NonInjectiveEdgeMap { edge: 7 }]);
}

#[test]
fn empty_word_is_the_identity() {
    let g = sl2z();
    let nf = g.normal_form(&Word::empty()).unwrap();
    assert!(nf.is_identity());
}

#[test]
fn order_three_relator_reduces_to_identity() {
    let g = psl2z();
    // Vertex 0 carries Z/3; a·a·a is a relator.
    let a = g.vertex_group(0).generators()[0].clone();
    let ai = g.vertex_group(0).index_of(&a).unwrap();
    let w = Word(vec![
        Token::VertexElt(0, ai),
        Token::VertexElt(0, ai),
        Token::VertexElt(0, ai),
    ]);
    assert!(g.normal_form(&w).unwrap().is_identity());
}

#[test]
fn random_words_cancel_with_their_inverses() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity()] {
        g.validate().unwrap();
        for _ in 0..250 {
            let w = random_loop(&g, 10, &mut rng);
            let prod = Word::concat(&[&w, &g.inverse_word(&w)]);
            assert!(g.normal_form(&prod).unwrap().is_identity());
        }
    }
}

#[test]
fn normal_form_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity()] {
        g.validate().unwrap();
        for _ in 0..200 {
            let w = random_loop(&g, 8, &mut rng);
            let nf = g.normal_form(&w).unwrap();
            let nf2 = g.normal_form(&g.nf_to_word(&nf)).unwrap();
            assert_eq!(nf, nf2);
        }
    }
}

#[test]
fn equal_words_is_reflexive_and_respects_relators() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = sl2z();
    for _ in 0..100 {
        let w = random_loop(&g, 10, &mut rng);
        assert!(g.equal_words(&w, &w).unwrap());
    }
}

#[test]
fn edge_relations_hold() {
    for g in [psl2z(), sl2z(), f2_times_z2(), d_infinity()] {
        g.validate().unwrap();
        for e in g.edges.clone() {
            let tp = g.tree_path(e.to);
            let tp_inv = g.inverse_word(&tp);
            for c in 0..e.group.order() {
                let rel = Word(vec![
                    Token::EdgeStep(e.id, Dir::Plus),
                    Token::VertexElt(e.from, e.inj_from.apply(c)),
                    Token::EdgeStep(e.id, Dir::Minus),
                ]);
                let w1 = Word::concat(&[&tp, &rel, &tp_inv]);
                let w2 = g.iota(e.to, e.inj_to.apply(c));
                assert!(g.equal_words(&w1, &w2).unwrap());
            }
        }
    }
}

#[test]
fn tree_edge_loops_are_trivial() {
    for g in [psl2z(), sl2z(), d_infinity()] {
        g.validate().unwrap();
        for &eid in g.spanning_tree().clone().iter() {
            for dir in [Dir::Plus, Dir::Minus] {
                let w = g.lambda(eid, dir);
                assert!(g.normal_form(&w).unwrap().is_identity());
            }
        }
    }
}

#[test]
fn iota_is_a_homomorphism() {
    let g = sl2z();
    for (&v, gv) in g.vertices.clone().iter() {
        for x in 0..gv.order() {
            for y in 0..gv.order() {
                let w1 = Word::concat(&[&g.iota(v, x), &g.iota(v, y)]);
                let w2 = g.iota(v, gv.mul(x, y));
                assert!(g.equal_words(&w1, &w2).unwrap());
            }
        }
    }
}

#[test]
fn transversals_start_with_the_identity_and_have_index_length() {
    use vfree::gog::End;
    let g = sl2z();
    g.validate().unwrap();
    let e = &g.edges[0];
    for (end, vid) in [(End::From, e.from), (End::To, e.to)] {
        let t = g.transversal(e.id, end);
        assert_eq!(t[0], 0);
        assert_eq!(t.len(), g.vertex_group(vid).order() / e.group.order());
    }
}

#[test]
fn k_of_is_the_max_vertex_order() {
    assert_eq!(psl2z().k_of(), 3);
    assert_eq!(sl2z().k_of(), 6);
    assert_eq!(trivial_gog().k_of(), 1);
}

#[test]
fn radius_zero_ball_is_the_identity() {
    let g = sl2z();
    let b = g.ball(0).unwrap();
    assert_eq!(b.len(), 1);
    assert!(b[0].is_identity());
}

#[test]
fn z2_radius_one_ball_has_two_elements() {
    let g = zn_gog(2);
    assert_eq!(g.ball(1).unwrap().len(), 2);
}

#[test]
fn f2_times_z2_radius_two_ball_has_22_elements() {
    // Independent count: elements are w·z^eps with w a reduced word in F2
    // and z central of order 2, of length |w| + eps. Lengths ≤ 2:
    // |w|=0: 2, |w|=1: 4·2 = 8, |w|=2: 12·1 = 12; total 22.
    let g = f2_times_z2();
    assert_eq!(g.ball(2).unwrap().len(), 22);
}

#[test]
fn ball_radius_beyond_max_is_rejected() {
    let g = sl2z();
    assert_eq!(
        g.ball(9).unwrap_err(),
        GogError::BudgetExceeded {
            requested: 9,
            max: 8
        }
    );
}

#[test]
fn ball_sizes_strictly_increase_for_infinite_groups() {
    for g in [psl2z(), sl2z(), d_infinity()] {
        let mut prev = 0;
        for r in 0..=8 {
            let n = g.ball(r).unwrap().len();
            assert!(n > prev, "ball not strictly increasing at r={r}");
            prev = n;
        }
    }
}

#[test]
fn ball_sizes_stabilize_for_finite_groups() {
    let g = zn_gog(6);
    assert_eq!(g.ball(8).unwrap().len(), 6);
}

#[test]
fn malformed_words_are_reported() {
    let g = sl2z();
    // Vertex element at the wrong vertex.
    let w = Word(vec![Token::VertexElt(1, 1)]);
    assert!(matches!(
        g.normal_form(&w),
        Err(GogError::MalformedWord { .. })
    ));
    // Path that does not close at the base vertex.
    let w = Word(vec![Token::EdgeStep(0, Dir::Minus)]);
    assert!(matches!(
        g.normal_form(&w),
        Err(GogError::MalformedWord { .. })
    ));
}
