//! Oracle tests for the finite-group kernel. Expected values are either
//! trivial consequences of the definitions or were derived by independent
//! brute force (counting units, exhausting bijections) and frozen here.

use vfree::fingrp::{
    automorphisms, conjugacy_classes_of_subgroups, cyclic, enumerate_elements, find_isomorphism,
    symmetric, FinGrpError, GrpHom, Perm, DEFAULT_CAP,
};

fn klein_four() -> vfree::FinGroup {
    let a = Perm::new(vec![1, 0, 2, 3]).unwrap();
    let b = Perm::new(vec![0, 1, 3, 2]).unwrap();
    enumerate_elements(4, vec![a, b], DEFAULT_CAP).unwrap()
}

fn z2_times_z3() -> vfree::FinGroup {
    let a = Perm::new(vec![1, 0, 2, 3, 4]).unwrap();
    let b = Perm::new(vec![0, 1, 3, 4, 2]).unwrap();
    enumerate_elements(5, vec![a, b], DEFAULT_CAP).unwrap()
}

#[test]
fn single_25_cycle_has_order_25() {
    assert_eq!(cyclic(25).order(), 25);
}

#[test]
fn empty_generator_list_gives_trivial_group() {
    let g = enumerate_elements(1, vec![], DEFAULT_CAP).unwrap();
    assert_eq!(g.order(), 1);
    assert_eq!(g.identity(), 0);
}

#[test]
fn s3_closure_has_order_6() {
    assert_eq!(symmetric(3).order(), 6);
}

#[test]
fn cap_exceeded_is_reported() {
    let err = enumerate_elements(25, cyclic(25).generators().to_vec(), 10).unwrap_err();
    assert_eq!(err, FinGrpError::CapExceeded { cap: 10 });
}

#[test]
fn identity_element_is_index_zero() {
    // Lexicographic order on image arrays puts the identity first.
    for g in [cyclic(6), symmetric(3), klein_four()] {
        assert!(g.element(0).is_identity());
    }
}

#[test]
fn trivial_group_has_one_subgroup_class() {
    let classes = conjugacy_classes_of_subgroups(&cyclic(1));
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].0.order(), 1);
}

#[test]
fn z4_has_three_subgroup_classes() {
    let classes = conjugacy_classes_of_subgroups(&cyclic(4));
    let orders: Vec<usize> = classes.iter().map(|(s, _)| s.order()).collect();
    assert_eq!(orders, vec![1, 2, 4]);
    assert!(classes.iter().all(|&(_, size)| size == 1));
}

#[test]
fn s3_has_four_subgroup_classes() {
    let classes = conjugacy_classes_of_subgroups(&symmetric(3));
    let profile: Vec<(usize, usize)> = classes.iter().map(|(s, n)| (s.order(), *n)).collect();
    assert_eq!(profile, vec![(1, 1), (2, 3), (3, 1), (6, 1)]);
}

#[test]
fn lagrange_holds_on_every_enumerated_subgroup() {
    for g in [cyclic(12), symmetric(3), klein_four()] {
        for s in g.all_subgroups() {
            assert_eq!(g.order() % s.order(), 0);
            assert!(g.is_subgroup(&s));
        }
    }
}

#[test]
fn class_sizes_partition_the_subgroup_lattice() {
    for g in [cyclic(8), symmetric(3), symmetric(4)] {
        let total = g.all_subgroups().len();
        let sum: usize = conjugacy_classes_of_subgroups(&g)
            .iter()
            .map(|&(_, size)| size)
            .sum();
        assert_eq!(sum, total);
    }
}

#[test]
fn z25_has_twenty_automorphisms() {
    // Independent oracle: the unit group mod 25 has phi(25) = 20 elements.
    assert_eq!(automorphisms(&cyclic(25)).len(), 20);
}

#[test]
fn trivial_group_has_one_automorphism() {
    assert_eq!(automorphisms(&cyclic(1)).len(), 1);
}

#[test]
fn klein_four_has_six_automorphisms() {
    assert_eq!(automorphisms(&klein_four()).len(), 6);
}

#[test]
fn automorphism_list_is_closed_under_composition_and_inversion() {
    for g in [cyclic(6), klein_four(), symmetric(3)] {
        let auts = automorphisms(&g);
        for a in &auts {
            assert!(auts.contains(&a.inverse(&g).unwrap()));
            for b in &auts {
                assert!(auts.contains(&a.then(b)));
            }
        }
    }
}

#[test]
fn z4_and_klein_four_are_not_isomorphic() {
    assert!(find_isomorphism(&cyclic(4), &klein_four()).is_none());
}

#[test]
fn any_group_is_isomorphic_to_itself_via_a_verified_map() {
    for g in [cyclic(4), symmetric(3)] {
        let h = find_isomorphism(&g, &g).unwrap();
        let back = h.inverse(&g).unwrap();
        assert_eq!(h.then(&back), GrpHom::identity(&g));
    }
}

#[test]
fn z6_and_z2_times_z3_are_isomorphic() {
    let h = find_isomorphism(&cyclic(6), &z2_times_z3()).unwrap();
    assert!(h.is_bijective_onto(&z2_times_z3()));
}

#[test]
fn composing_isomorphism_with_inverse_is_identity() {
    let g1 = cyclic(6);
    let g2 = z2_times_z3();
    let h = find_isomorphism(&g1, &g2).unwrap();
    assert_eq!(h.then(&h.inverse(&g2).unwrap()), GrpHom::identity(&g1));
}

#[test]
fn element_orders_and_powers_are_consistent() {
    let g = symmetric(4);
    for a in 0..g.order() {
        let o = g.element_order(a) as i64;
        assert_eq!(g.pow(a, o), g.identity());
        assert_eq!(g.mul(g.pow(a, -1), a), g.identity());
    }
}
