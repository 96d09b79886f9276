//! Tests for first-order sentence emission, S-expression serialization, and
//! brute-force evaluation over finite groups.

use std::collections::HashMap;

use vfree::corpus::{f2_times_z2, psl2z, trivial_gog, zn_gog};
use vfree::fingrp::{cyclic, enumerate_elements, symmetric, Perm};
use vfree::formulas::{
    cst, emit, evaluate_finite, from_sexp, instable_sentence, mul, one, symbol_count, to_sexp,
    var, FOFormula, FormulaError, Sentence, Term,
};
use vfree::FinGroup;

fn klein_four() -> FinGroup {
    let a = Perm::new(vec![1, 0, 2, 3]).unwrap();
    let b = Perm::new(vec![0, 1, 3, 2]).unwrap();
    enumerate_elements(4, vec![a, b], 100).unwrap()
}

/// The element `x` of `h` as a term over the named generators g0, g1, ...
fn element_term(h: &FinGroup, x: usize) -> Term {
    let mut t = one();
    for &gi in h.word_of(x) {
        t = mul(t, cst(format!("g{gi}")));
    }
    t
}

#[test]
fn instable_sentence_true_on_klein_four_false_on_s3() {
    let f = instable_sentence();
    assert!(evaluate_finite(&f, &klein_four(), 1_000).unwrap());
    assert!(!evaluate_finite(&f, &symmetric(3), 1_000).unwrap());
}

#[test]
fn tautology_is_true_everywhere() {
    let f = FOFormula::Forall(
        vec!["x".into()],
        Box::new(FOFormula::Eq(var("x"), var("x"))),
    );
    for h in [cyclic(1), cyclic(7), symmetric(3), klein_four()] {
        assert!(evaluate_finite(&f, &h, 1_000).unwrap());
    }
}

#[test]
fn evaluation_budget_is_enforced() {
    let err = evaluate_finite(&instable_sentence(), &symmetric(4), 100).unwrap_err();
    assert!(matches!(err, FormulaError::BudgetExceeded { .. }), "{err}");
}

#[test]
fn symbol_count_examples() {
    assert_eq!(symbol_count(&FOFormula::Eq(var("x"), var("x"))), 3);
    // Regression pin for the instability sentence's node count.
    assert_eq!(symbol_count(&instable_sentence()), 14);
}

#[test]
fn sexp_round_trip_is_exact() {
    let zeta = emit(&psl2z(), Sentence::Zeta).unwrap().formula;
    for f in [instable_sentence(), zeta] {
        let text = to_sexp(&f);
        let back = from_sexp(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(to_sexp(&back), text);
        assert_eq!(symbol_count(&back), symbol_count(&f));
    }
}

#[test]
fn sexp_parser_rejects_garbage() {
    for bad in ["", "(eq (var x) (var x)", "(frob)", "(eq (var x) (var x)) junk"] {
        assert!(from_sexp(bad).is_err(), "accepted {bad:?}");
    }
}

#[test]
fn chain_with_one_variable_is_a_single_power_clause() {
    let e = emit(&psl2z(), Sentence::ChainExists { n: 1, k: 2 }).unwrap();
    assert!(!e.approximate);
    match &e.formula {
        FOFormula::Exists(vars, body) => {
            assert_eq!(vars.len(), 1);
            match body.as_ref() {
                FOFormula::And(clauses) => {
                    assert_eq!(clauses.len(), 1);
                    assert!(matches!(clauses[0], FOFormula::Neq(..)));
                }
                other => panic!("expected And, got {other:?}"),
            }
        }
        other => panic!("expected Exists, got {other:?}"),
    }
}

#[test]
fn zeta_of_trivial_group_is_trivially_true() {
    let e = emit(&trivial_gog(), Sentence::Zeta).unwrap();
    assert!(!e.approximate);
    assert!(evaluate_finite(&e.formula, &cyclic(1), 10).unwrap());
}

#[test]
fn zeta_of_psl2z_is_larger_than_zeta_of_the_trivial_group() {
    let small = emit(&trivial_gog(), Sentence::Zeta).unwrap().formula;
    let big = emit(&psl2z(), Sentence::Zeta).unwrap().formula;
    assert!(symbol_count(&small) < symbol_count(&big));
}

#[test]
fn special_forall_accepts_the_identity_witness_on_a_finite_group() {
    // Z/4 as a one-vertex graph of groups; the identity map is special, so
    // substituting each generator for its own variable must satisfy the
    // universal formula over Z/4 itself.
    let g = zn_gog(4);
    let h = cyclic(4);
    for which in [Sentence::SpecialForall, Sentence::SpecialForallN(1)] {
        let f = emit(&g, which).unwrap().formula;
        let mut witness = HashMap::new();
        for x in 1..h.order() {
            witness.insert(format!("x{}", x - 1), element_term(&h, x));
        }
        let closed = f.substitute(&witness);
        assert!(
            evaluate_finite(&closed, &h, 10_000).unwrap(),
            "{which:?} rejected the identity witness"
        );
    }
}

#[test]
fn special_forall_rejects_the_collapse_witness() {
    // Sending every generator to 1 is not special: it collapses distinct
    // conjugacy classes of finite subgroups.
    let g = zn_gog(4);
    let h = cyclic(4);
    let f = emit(&g, Sentence::SpecialForallN(1)).unwrap().formula;
    let mut witness = HashMap::new();
    for x in 1..h.order() {
        witness.insert(format!("x{}", x - 1), one());
    }
    let closed = f.substitute(&witness);
    assert!(!evaluate_finite(&closed, &h, 10_000).unwrap());
}

#[test]
fn theta_counts_exponent_two_subgroups() {
    let f = emit(&f2_times_z2(), Sentence::ThetaInvariant { i: 2, n: 1 })
        .unwrap()
        .formula;
    assert!(evaluate_finite(&f, &klein_four(), 100_000).unwrap());
    assert!(!evaluate_finite(&f, &cyclic(3), 100_000).unwrap());
}

#[test]
fn prestrong_emits_an_existential_with_a_certification_flag() {
    let e = emit(&psl2z(), Sentence::PreStrongExists).unwrap();
    assert!(matches!(e.formula, FOFormula::Exists(..)));
    // The flag is honest either way; a certified chain must be nonempty.
    if !e.approximate {
        match &e.formula {
            FOFormula::Exists(vars, _) => assert!(!vars.is_empty()),
            _ => unreachable!(),
        }
    }
}
