//! Finite-group kernel: permutation-represented groups with full element
//! tables, subgroups, conjugacy of subgroups, automorphisms and isomorphism
//! search. Everything downstream (graphs of groups, normalizers, invariants)
//! reduces to exact computations inside these tables, so the representation
//! favours determinism over asymptotic cleverness: elements are kept in
//! lexicographic order on their image arrays and all derived keys are stable
//! across runs.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Default cap on the size of an element-table closure.
pub const DEFAULT_CAP: usize = 10080;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FinGrpError {
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("images array of length {len} is not a permutation of 0..{degree}")]
    NotAPermutation { len: usize, degree: usize },
    #[error("generator degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("generator images do not extend to a homomorphism")]
    NotAHomomorphism,
}

/// A permutation of {0, …, d−1}, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self, FinGrpError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(FinGrpError::NotAPermutation { len: d, degree: d });
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Function composition: `(a.compose(b))(x) = a(b(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }
}

/// A finite group given by permutation generators, with its full element
/// table. Elements are sorted lexicographically on their image arrays, so
/// index 0 is always the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    inverses: Vec<usize>,
    /// Each element expressed as a word in the generators (indices into
    /// `generators`, applied left to right under `compose`); used to extend
    /// generator images to full homomorphisms.
    words: Vec<Vec<usize>>,
    #[serde(skip)]
    index: std::cell::OnceCell<HashMap<Vec<usize>, usize>>,
}

impl PartialEq for FinGroup {
    fn eq(&self, other: &Self) -> bool {
        // The index cache is derived data and must not influence equality.
        self.degree == other.degree
            && self.generators == other.generators
            && self.elements == other.elements
    }
}

impl Eq for FinGroup {}

impl FinGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Perm {
        &self.elements[i]
    }

    pub fn identity(&self) -> usize {
        0
    }

    fn index_map(&self) -> &HashMap<Vec<usize>, usize> {
        self.index.get_or_init(|| {
            self.elements
                .iter()
                .enumerate()
                .map(|(i, p)| (p.images.to_vec(), i))
                .collect()
        })
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index_map().get(p.images()).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let p = self.elements[a].compose(&self.elements[b]);
        *self
            .index_map()
            .get(p.images())
            .expect("element table is closed under composition")
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn pow(&self, a: usize, n: i64) -> usize {
        let base = if n < 0 { self.inv(a) } else { a };
        let mut x = 0;
        for _ in 0..n.unsigned_abs() {
            x = self.mul(x, base);
        }
        x
    }

    /// The word of `a` in the generators, for transporting `a` through a
    /// homomorphism given on generators.
    pub fn word_of(&self, a: usize) -> &[usize] {
        &self.words[a]
    }
}

/// Builds the full element table generated by `generators` on `degree`
/// points, failing if the closure exceeds `cap`.
pub fn enumerate_elements(
    degree: usize,
    generators: Vec<Perm>,
    cap: usize,
) -> Result<FinGroup, FinGrpError> {
    for g in &generators {
        if g.degree() != degree {
            return Err(FinGrpError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
    }
    let mut table: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let id = Perm::identity(degree);
    table.insert(id.images.to_vec(), vec![]);
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        let word = table[p.images()].clone();
        for (gi, g) in generators.iter().enumerate() {
            let q = p.compose(g);
            if !table.contains_key(q.images()) {
                if table.len() >= cap {
                    return Err(FinGrpError::CapExceeded { cap });
                }
                let mut w = word.clone();
                w.push(gi);
                table.insert(q.images.to_vec(), w);
                frontier.push(q);
            }
        }
    }
    let mut elements: Vec<Perm> = table.keys().map(|k| Perm { images: k.clone() }).collect();
    elements.sort();
    let words = elements.iter().map(|p| table[p.images()].clone()).collect();
    let lookup: HashMap<&[usize], usize> = elements
        .iter()
        .enumerate()
        .map(|(i, p)| (p.images(), i))
        .collect();
    let inverses = elements
        .iter()
        .map(|p| lookup[p.inverse().images()])
        .collect();
    Ok(FinGroup {
        degree,
        generators,
        elements,
        inverses,
        words,
        index: std::cell::OnceCell::new(),
    })
}

/// Convenience: the cyclic group of order `n` as an `n`-cycle.
pub fn cyclic(n: usize) -> FinGroup {
    if n == 1 {
        return enumerate_elements(1, vec![], DEFAULT_CAP).unwrap();
    }
    let cycle = Perm::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
    enumerate_elements(n, vec![cycle], DEFAULT_CAP).unwrap()
}

/// Convenience: the symmetric group on `n` points.
pub fn symmetric(n: usize) -> FinGroup {
    if n <= 1 {
        return enumerate_elements(n.max(1), vec![], DEFAULT_CAP).unwrap();
    }
    let cycle = Perm::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
    let mut sw: Vec<usize> = (0..n).collect();
    sw.swap(0, 1);
    let swap = Perm::new(sw).unwrap();
    enumerate_elements(n, vec![cycle, swap], DEFAULT_CAP).unwrap()
}

/// A subgroup of a parent `FinGroup`, as a sorted set of element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subgrp {
    pub elements: Vec<usize>,
}

impl Subgrp {
    pub fn trivial() -> Self {
        Subgrp { elements: vec![0] }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements == [0]
    }
}

impl FinGroup {
    /// Closure of a seed set of element indices, as a subgroup.
    pub fn subgroup_closure(&self, seed: &[usize]) -> Subgrp {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(0);
        let mut frontier: Vec<usize> = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in seed {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if set.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Subgrp {
            elements: set.into_iter().collect(),
        }
    }

    pub fn full_subgroup(&self) -> Subgrp {
        Subgrp {
            elements: (0..self.order()).collect(),
        }
    }

    pub fn is_subgroup(&self, s: &Subgrp) -> bool {
        if !s.contains(0) {
            return false;
        }
        s.elements
            .iter()
            .all(|&a| s.elements.iter().all(|&b| s.contains(self.mul(a, b))))
            && s.elements.iter().all(|&a| s.contains(self.inv(a)))
    }

    /// Every subgroup, enumerated by closing generator extensions; exhaustive
    /// at desk scale.
    pub fn all_subgroups(&self) -> Vec<Subgrp> {
        let mut found: BTreeSet<Subgrp> = BTreeSet::new();
        found.insert(Subgrp::trivial());
        let mut frontier: Vec<Subgrp> = vec![Subgrp::trivial()];
        while let Some(h) = frontier.pop() {
            for g in 1..self.order() {
                if h.contains(g) {
                    continue;
                }
                let mut seed = h.elements.clone();
                seed.push(g);
                let bigger = self.subgroup_closure(&seed);
                if found.insert(bigger.clone()) {
                    frontier.push(bigger);
                }
            }
        }
        found.into_iter().collect()
    }

    pub fn conjugate_subgroup(&self, s: &Subgrp, g: usize) -> Subgrp {
        let mut elements: Vec<usize> = s.elements.iter().map(|&x| self.conj(g, x)).collect();
        elements.sort_unstable();
        Subgrp { elements }
    }

    /// Some `g` with `g s1 g⁻¹ = s2`, if the subgroups are conjugate.
    pub fn conjugator(&self, s1: &Subgrp, s2: &Subgrp) -> Option<usize> {
        if s1.order() != s2.order() {
            return None;
        }
        (0..self.order()).find(|&g| &self.conjugate_subgroup(s1, g) == s2)
    }

    pub fn normalizer_of(&self, s: &Subgrp) -> Subgrp {
        Subgrp {
            elements: (0..self.order())
                .filter(|&g| &self.conjugate_subgroup(s, g) == s)
                .collect(),
        }
    }

    pub fn centralizer_of(&self, s: &Subgrp) -> Subgrp {
        Subgrp {
            elements: (0..self.order())
                .filter(|&g| s.elements.iter().all(|&x| self.mul(g, x) == self.mul(x, g)))
                .collect(),
        }
    }

    pub fn intersect(&self, s1: &Subgrp, s2: &Subgrp) -> Subgrp {
        Subgrp {
            elements: s1
                .elements
                .iter()
                .copied()
                .filter(|&x| s2.contains(x))
                .collect(),
        }
    }

    /// The subgroup as a standalone `FinGroup` (same degree), together with
    /// the map from the standalone element indices back into the parent.
    pub fn subgroup_as_group(&self, s: &Subgrp) -> (FinGroup, Vec<usize>) {
        // Greedy small generating set: adjoin the least element of s outside
        // the current closure until the closure is all of s. Each step at
        // least doubles the closure, so at most log₂|s| generators result,
        // which keeps homomorphism searches over generator images tractable.
        let mut gen_idx: Vec<usize> = Vec::new();
        let mut closure = self.subgroup_closure(&gen_idx);
        while closure.elements.len() < s.elements.len() {
            let next = s
                .elements
                .iter()
                .copied()
                .find(|x| closure.elements.binary_search(x).is_err())
                .expect("closure is contained in s");
            gen_idx.push(next);
            closure = self.subgroup_closure(&gen_idx);
        }
        let gens: Vec<Perm> = gen_idx.iter().map(|&i| self.elements[i].clone()).collect();
        let sub = enumerate_elements(self.degree, gens, self.order().max(1))
            .expect("subgroup closure fits in the parent order");
        let back = sub
            .elements
            .iter()
            .map(|p| self.index_of(p).expect("subgroup element lies in parent"))
            .collect();
        (sub, back)
    }
}

/// Conjugacy classes of subgroups of `g`: one representative per class
/// (lexicographically least by (order, element set)), with the class size.
pub fn conjugacy_classes_of_subgroups(g: &FinGroup) -> Vec<(Subgrp, usize)> {
    let all = g.all_subgroups();
    let mut seen: BTreeSet<Subgrp> = BTreeSet::new();
    let mut classes = Vec::new();
    for s in &all {
        if seen.contains(s) {
            continue;
        }
        let mut class: BTreeSet<Subgrp> = BTreeSet::new();
        for h in 0..g.order() {
            class.insert(g.conjugate_subgroup(s, h));
        }
        let rep = class.iter().next().unwrap().clone();
        let size = class.len();
        seen.extend(class);
        classes.push((rep, size));
    }
    classes.sort_by(|a, b| (a.0.order(), &a.0).cmp(&(b.0.order(), &b.0)));
    classes
}

/// A homomorphism between finite groups, stored as the full element map
/// (index of the image of each source element), verified on construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GrpHom {
    pub images: Vec<usize>,
}

impl GrpHom {
    /// Builds a verified homomorphism from a full element map.
    pub fn new(
        source: &FinGroup,
        target: &FinGroup,
        images: Vec<usize>,
    ) -> Result<Self, FinGrpError> {
        if images.len() != source.order() || images.iter().any(|&i| i >= target.order()) {
            return Err(FinGrpError::NotAHomomorphism);
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if images[source.mul(a, b)] != target.mul(images[a], images[b]) {
                    return Err(FinGrpError::NotAHomomorphism);
                }
            }
        }
        Ok(GrpHom { images })
    }

    /// Extends generator images to a full homomorphism, if one exists.
    pub fn from_gen_images(
        source: &FinGroup,
        target: &FinGroup,
        gen_images: &[usize],
    ) -> Result<Self, FinGrpError> {
        if gen_images.len() != source.generators().len() {
            return Err(FinGrpError::NotAHomomorphism);
        }
        let images: Vec<usize> = (0..source.order())
            .map(|a| {
                source
                    .word_of(a)
                    .iter()
                    .fold(0, |acc, &gi| target.mul(acc, gen_images[gi]))
            })
            .collect();
        GrpHom::new(source, target, images)
    }

    pub fn identity(group: &FinGroup) -> Self {
        GrpHom {
            images: (0..group.order()).collect(),
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.images.iter().all(|&i| seen.insert(i))
    }

    pub fn is_bijective_onto(&self, target: &FinGroup) -> bool {
        self.is_injective() && self.images.len() == target.order()
    }

    /// `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &GrpHom) -> GrpHom {
        GrpHom {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    /// Inverse of a bijective homomorphism.
    pub fn inverse(&self, target: &FinGroup) -> Option<GrpHom> {
        if !self.is_bijective_onto(target) {
            return None;
        }
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Some(GrpHom { images })
    }

    /// Image of a subgroup, as a subgroup of the target.
    pub fn image_of(&self, s: &Subgrp) -> Subgrp {
        let mut elements: Vec<usize> = s.elements.iter().map(|&x| self.images[x]).collect();
        elements.sort_unstable();
        elements.dedup();
        Subgrp { elements }
    }

    pub fn image_subgroup(&self) -> Subgrp {
        let mut elements = self.images.clone();
        elements.sort_unstable();
        elements.dedup();
        Subgrp { elements }
    }
}

fn gen_image_candidates(source: &FinGroup, target: &FinGroup) -> Vec<Vec<usize>> {
    // Candidate images per generator: target elements of order dividing the
    // generator's order (necessary for a homomorphism, prunes the search).
    source
        .generators()
        .iter()
        .map(|g| {
            let o = source.element_order(source.index_of(g).unwrap());
            (0..target.order())
                .filter(|&t| o % target.element_order(t) == 0)
                .collect()
        })
        .collect()
}

fn search_homs(
    source: &FinGroup,
    target: &FinGroup,
    bijective_only: bool,
    first_only: bool,
) -> Vec<GrpHom> {
    let candidates = gen_image_candidates(source, target);
    let mut found = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    while let Some(partial) = stack.pop() {
        if partial.len() == candidates.len() {
            if let Ok(h) = GrpHom::from_gen_images(source, target, &partial) {
                if !bijective_only || h.is_bijective_onto(target) {
                    found.push(h);
                    if first_only {
                        return found;
                    }
                }
            }
            continue;
        }
        // Push in reverse so candidates are explored in increasing order.
        for &c in candidates[partial.len()].iter().rev() {
            let mut next = partial.clone();
            next.push(c);
            stack.push(next);
        }
    }
    found.sort();
    found.dedup();
    found
}

/// All automorphisms of `c`, by brute force over generator images.
pub fn automorphisms(c: &FinGroup) -> Vec<GrpHom> {
    if c.order() == 1 {
        return vec![GrpHom::identity(c)];
    }
    search_homs(c, c, true, false)
}

/// A verified isomorphism `c1 → c2`, or `None`; deterministic (first in
/// lexicographic generator-image order).
pub fn find_isomorphism(c1: &FinGroup, c2: &FinGroup) -> Option<GrpHom> {
    if c1.order() != c2.order() {
        return None;
    }
    if c1.order() == 1 {
        return Some(GrpHom::identity(c1));
    }
    search_homs(c1, c2, true, true).into_iter().next()
}
