//! Built-in example graphs of groups used by tests and the CLI.

use std::collections::BTreeMap;

use crate::fingrp::{cyclic, FinGroup, GrpHom};
use crate::gog::{Edge, GraphOfGroups};

/// Embed a cyclic group into `tgt` by sending its distinguished generator to
/// the lexicographically first element of the right order. Panics if `tgt`
/// has no element of order `src.order()`.
pub fn cyclic_embedding(src: &FinGroup, tgt: &FinGroup) -> GrpHom {
    let n = src.order();
    for x in 0..tgt.order() {
        if tgt.element_order(x) == n {
            if let Ok(h) = GrpHom::from_gen_images(src, tgt, &[x]) {
                return h;
            }
        }
    }
    panic!("no element of order {n} in target group");
}

/// The trivial group as a one-vertex graph.
pub fn trivial_gog() -> GraphOfGroups {
    GraphOfGroups::new(BTreeMap::from([(0, cyclic(1))]), vec![])
}

/// Z/n as a one-vertex graph.
pub fn zn_gog(n: usize) -> GraphOfGroups {
    GraphOfGroups::new(BTreeMap::from([(0, cyclic(n))]), vec![])
}

/// PSL₂(Z) = Z/3 ∗ Z/2: two vertices joined by a trivial edge group.
pub fn psl2z() -> GraphOfGroups {
    let z3 = cyclic(3);
    let z2 = cyclic(2);
    let triv = cyclic(1);
    let e = Edge {
        id: 0,
        group: triv.clone(),
        from: 0,
        to: 1,
        inj_from: GrpHom { images: vec![0] },
        inj_to: GrpHom { images: vec![0] },
    };
    GraphOfGroups::new(BTreeMap::from([(0, z3), (1, z2)]), vec![e])
}

/// SL₂(Z) = Z/6 ∗_{Z/2} Z/4: amalgam over the common central involution.
pub fn sl2z() -> GraphOfGroups {
    let z6 = cyclic(6);
    let z4 = cyclic(4);
    let z2 = cyclic(2);
    let e = Edge {
        id: 0,
        group: z2.clone(),
        from: 0,
        to: 1,
        inj_from: cyclic_embedding(&z2, &z6),
        inj_to: cyclic_embedding(&z2, &z4),
    };
    GraphOfGroups::new(BTreeMap::from([(0, z6), (1, z4)]), vec![e])
}

/// F₂ × Z/2: one vertex Z/2 with two loops whose edge maps are identities.
pub fn f2_times_z2() -> GraphOfGroups {
    let z2 = cyclic(2);
    let mk_loop = |id| Edge {
        id,
        group: z2.clone(),
        from: 0,
        to: 0,
        inj_from: GrpHom::identity(&z2),
        inj_to: GrpHom::identity(&z2),
    };
    let edges = vec![mk_loop(0), mk_loop(1)];
    GraphOfGroups::new(BTreeMap::from([(0, z2)]), edges)
}

/// Z/n ⋊ Z with the stable letter acting by x ↦ x^k (gcd(k, n) = 1): one
/// vertex Z/n and one loop whose maps are the identity and the k-th power
/// automorphism.
pub fn zn_by_z(n: usize, k: i64) -> GraphOfGroups {
    let zn = cyclic(n);
    let aut = GrpHom {
        images: (0..zn.order()).map(|x| zn.pow(x, k)).collect(),
    };
    let e = Edge {
        id: 0,
        group: zn.clone(),
        from: 0,
        to: 0,
        inj_from: GrpHom::identity(&zn),
        inj_to: aut,
    };
    GraphOfGroups::new(BTreeMap::from([(0, zn)]), vec![e])
}

/// Z/n × F₂: one vertex Z/n with two loops whose edge maps are identities.
pub fn zn_times_f2(n: usize) -> GraphOfGroups {
    let zn = cyclic(n);
    let mk_loop = |id| Edge {
        id,
        group: zn.clone(),
        from: 0,
        to: 0,
        inj_from: GrpHom::identity(&zn),
        inj_to: GrpHom::identity(&zn),
    };
    let edges = vec![mk_loop(0), mk_loop(1)];
    GraphOfGroups::new(BTreeMap::from([(0, zn)]), edges)
}

/// (F₂ × Z/2) ∗ Z: the two-loop Z/2 graph with an extra trivial loop.
pub fn f2_times_z2_star_z() -> GraphOfGroups {
    let mut g = f2_times_z2();
    g.edges.push(Edge {
        id: 2,
        group: cyclic(1),
        from: 0,
        to: 0,
        inj_from: GrpHom { images: vec![0] },
        inj_to: GrpHom { images: vec![0] },
    });
    GraphOfGroups::new(g.vertices, g.edges)
}

/// The infinite dihedral group D∞ = Z/2 ∗ Z/2.
pub fn d_infinity() -> GraphOfGroups {
    let z2 = cyclic(2);
    let triv = cyclic(1);
    let e = Edge {
        id: 0,
        group: triv,
        from: 0,
        to: 1,
        inj_from: GrpHom { images: vec![0] },
        inj_to: GrpHom { images: vec![0] },
    };
    GraphOfGroups::new(BTreeMap::from([(0, z2.clone()), (1, z2)]), vec![e])
}
