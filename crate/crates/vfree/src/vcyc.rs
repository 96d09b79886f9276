//! Structured infinite virtually cyclic groups: the two normal forms
//! (cyclic type C⋊Z and dihedral type A∗_C B), the subgroup D_p(N) of p-th
//! powers, nice embeddings, mutual nice partner enumeration, twists, and
//! small test-sequence maps.
//!
//! Elements are kept in coset coordinates `c·t^k·a₀^ε` (ε = 0 always in
//! cyclic type), which are unique and make membership in `⟨t^p⟩` and index
//! computations purely arithmetic.

use std::cell::OnceCell;
use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::analysis::class_table;
use crate::fingrp::{
    automorphisms, enumerate_elements, find_isomorphism, FinGroup, GrpHom, Perm, Subgrp,
    DEFAULT_CAP,
};
use crate::gog::{Dir, Edge, GoGHom, GogError, GraphOfGroups, Word};
use crate::splittings::reduce;

/// Errors for virtually cyclic structure operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VcycError {
    #[error("the group is not infinite virtually cyclic")]
    NotVirtuallyCyclic,
    #[error("K = {k} is below the maximal finite subgroup order {needed}")]
    BadK { k: usize, needed: usize },
    #[error("delta does not lie in D(N')")]
    DeltaNotInD,
    #[error("N must be a proper subgroup of N'")]
    NotProperExtension,
    #[error("|C| = {size} exceeds the partner enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("no prime of the form k + p·λ found for λ ≤ {window}")]
    NoPrimeInWindow { window: usize },
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// Maximal |C| for dihedral partner enumeration.
pub const PARTNER_CAP: usize = 12;

/// An element of a structured virtually cyclic group, in coset normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VCElement {
    /// `c · t^k` in C ⋊_α Z.
    Cyclic { c: usize, k: i64 },
    /// `c · t^k · a₀^ε` in A ∗_C B, where t = b₀a₀ and a₀ is the chosen
    /// reflection of the A side (`refl` is ε).
    Dihedral { c: usize, k: i64, refl: bool },
}

impl VCElement {
    pub fn t_exponent(&self) -> i64 {
        match *self {
            VCElement::Cyclic { k, .. } | VCElement::Dihedral { k, .. } => k,
        }
    }

    pub fn c_part(&self) -> usize {
        match *self {
            VCElement::Cyclic { c, .. } | VCElement::Dihedral { c, .. } => c,
        }
    }

    pub fn is_reflection(&self) -> bool {
        matches!(*self, VCElement::Dihedral { refl: true, .. })
    }
}

/// The two shapes of an infinite virtually cyclic group with maximal normal
/// finite subgroup C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VCShape {
    /// C ⋊_α Z with stable letter t: `t·c·t⁻¹ = α(c)`.
    #[serde(rename = "cyclic")]
    Cyclic { alpha: GrpHom },
    /// A ∗_C B, with C of index 2 in both A and B and chosen reflections
    /// a₀ ∈ A∖C and b₀ ∈ B∖C; t = b₀a₀.
    #[serde(rename = "dihedral")]
    Dihedral {
        a_grp: FinGroup,
        b_grp: FinGroup,
        /// C → A and C → B inclusions.
        inc_a: GrpHom,
        inc_b: GrpHom,
        a0: usize,
        b0: usize,
        /// Conjugation of C by a₀ resp. b₀ (pulled back to C).
        phi_a: GrpHom,
        phi_b: GrpHom,
        /// a₀² resp. b₀² as elements of C.
        kappa_a: usize,
        kappa_b: usize,
    },
}

#[derive(Debug, Clone)]
struct AlphaCache {
    order: usize,
    /// powers[i] = α^i for 0 ≤ i < order.
    powers: Vec<GrpHom>,
}

/// A structured infinite virtually cyclic group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VCGroup {
    /// The maximal normal finite subgroup.
    pub c: FinGroup,
    pub shape: VCShape,
    #[serde(skip)]
    cache: OnceCell<AlphaCache>,
}

impl PartialEq for VCGroup {
    fn eq(&self, other: &Self) -> bool {
        // The power cache is derived data and must not influence equality.
        self.c == other.c && self.shape == other.shape
    }
}

/// Descriptor of (the subgroup generated by) D_p(N) = {n^p | n ∈ N}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DSubgroup {
    /// Minimal positive t-exponent: the ⟨t⟩-direction of D is ⟨t^t_exponent⟩.
    pub t_exponent: usize,
    /// D ∩ C.
    pub c_part: Subgrp,
    /// True when the closed form `D_p = ⟨t^p⟩` applies (p a multiple of
    /// e(N) = 2·ord(α)·|C|).
    pub exact: bool,
}

/// An embedding between structured virtually cyclic groups: its action on C
/// and the images of the generating letters (t for cyclic type, a₀ and b₀
/// for dihedral type).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceEmbedding {
    pub on_c: GrpHom,
    pub letters: Vec<VCElement>,
}

/// Diagnostic result of the three-bullet niceness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceCheck {
    pub ok: bool,
    /// 1 = not an injective homomorphism, 2 = collapses finite-subgroup
    /// conjugacy classes, 3 = not injective on the D-quotients.
    pub failed_bullet: Option<u8>,
}

impl NiceCheck {
    fn pass() -> Self {
        NiceCheck {
            ok: true,
            failed_bullet: None,
        }
    }

    fn fail(bullet: u8) -> Self {
        NiceCheck {
            ok: false,
            failed_bullet: Some(bullet),
        }
    }
}

impl VCGroup {
    /// C ⋊_α Z. Panics if `alpha` is not an automorphism of `c`.
    pub fn cyclic(c: FinGroup, alpha: GrpHom) -> Self {
        assert!(
            alpha.is_bijective_onto(&c),
            "alpha must be an automorphism of C"
        );
        VCGroup {
            c,
            shape: VCShape::Cyclic { alpha },
            cache: OnceCell::new(),
        }
    }

    /// A ∗_C B from vertex groups and C-inclusions; picks the least
    /// reflections a₀, b₀ and derives the structure constants. Panics unless
    /// C has index 2 in both.
    pub fn dihedral(
        c: FinGroup,
        a_grp: FinGroup,
        inc_a: GrpHom,
        b_grp: FinGroup,
        inc_b: GrpHom,
    ) -> Self {
        let mk = |grp: &FinGroup, inc: &GrpHom| -> (usize, GrpHom, usize) {
            assert_eq!(grp.order(), 2 * c.order(), "C must have index 2");
            let image: Vec<usize> = inc.images.clone();
            let x0 = (0..grp.order())
                .find(|x| !image.contains(x))
                .expect("a reflection exists");
            let pre: HashMap<usize, usize> =
                image.iter().enumerate().map(|(i, &y)| (y, i)).collect();
            let phi = GrpHom {
                images: (0..c.order())
                    .map(|x| pre[&grp.conj(x0, inc.apply(x))])
                    .collect(),
            };
            let kappa = pre[&grp.mul(x0, x0)];
            (x0, phi, kappa)
        };
        let (a0, phi_a, kappa_a) = mk(&a_grp, &inc_a);
        let (b0, phi_b, kappa_b) = mk(&b_grp, &inc_b);
        VCGroup {
            c,
            shape: VCShape::Dihedral {
                a_grp,
                b_grp,
                inc_a,
                inc_b,
                a0,
                b0,
                phi_a,
                phi_b,
                kappa_a,
                kappa_b,
            },
            cache: OnceCell::new(),
        }
    }

    pub fn is_dihedral(&self) -> bool {
        matches!(self.shape, VCShape::Dihedral { .. })
    }

    /// The automorphism of C induced by conjugation by t.
    pub fn alpha(&self) -> GrpHom {
        match &self.shape {
            VCShape::Cyclic { alpha } => alpha.clone(),
            VCShape::Dihedral { phi_a, phi_b, .. } => phi_a.then(phi_b),
        }
    }

    fn alpha_cache(&self) -> &AlphaCache {
        self.cache.get_or_init(|| {
            let alpha = self.alpha();
            let id = GrpHom::identity(&self.c);
            let mut powers = vec![id.clone()];
            let mut acc = alpha.clone();
            while acc != id {
                powers.push(acc.clone());
                acc = acc.then(&alpha);
            }
            AlphaCache {
                order: powers.len(),
                powers,
            }
        })
    }

    /// Order of the induced automorphism α in Aut(C).
    pub fn alpha_order(&self) -> usize {
        self.alpha_cache().order
    }

    /// The exponent e(N) = 2·ord(α)·|C|: D_p(N) = ⟨t^p⟩ for every multiple
    /// p of e(N).
    pub fn e_exponent(&self) -> usize {
        2 * self.alpha_order() * self.c.order()
    }

    /// Maximal order of a finite subgroup.
    pub fn k_of(&self) -> usize {
        match self.shape {
            VCShape::Cyclic { .. } => self.c.order(),
            VCShape::Dihedral { .. } => 2 * self.c.order(),
        }
    }

    fn alpha_pow(&self, x: usize, e: i64) -> usize {
        let cache = self.alpha_cache();
        let e = e.rem_euclid(cache.order as i64) as usize;
        cache.powers[e].apply(x)
    }

    /// Multiplication in the cyclic-part coordinates (c, k).
    fn cyc_mul(&self, a: (usize, i64), b: (usize, i64)) -> (usize, i64) {
        (self.c.mul(a.0, self.alpha_pow(b.0, a.1)), a.1 + b.1)
    }

    fn cyc_inv(&self, a: (usize, i64)) -> (usize, i64) {
        (self.alpha_pow(self.c.inv(a.0), -a.1), -a.1)
    }

    fn cyc_pow(&self, a: (usize, i64), n: i64) -> (usize, i64) {
        let mut base = if n < 0 { self.cyc_inv(a) } else { a };
        let mut n = n.unsigned_abs();
        let mut acc = (self.c.identity(), 0i64);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.cyc_mul(acc, base);
            }
            base = self.cyc_mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// c_h with a₀·t·a₀⁻¹ = c_h·t⁻¹ (dihedral only).
    fn c_h(&self) -> usize {
        match &self.shape {
            VCShape::Dihedral {
                phi_a,
                kappa_a,
                kappa_b,
                ..
            } => self.c.mul(phi_a.apply(*kappa_b), *kappa_a),
            VCShape::Cyclic { .. } => unreachable!("cyclic type has no reflection"),
        }
    }

    pub fn identity(&self) -> VCElement {
        self.elt_c(self.c.identity())
    }

    /// The element of C with the given index.
    pub fn elt_c(&self, c: usize) -> VCElement {
        match self.shape {
            VCShape::Cyclic { .. } => VCElement::Cyclic { c, k: 0 },
            VCShape::Dihedral { .. } => VCElement::Dihedral {
                c,
                k: 0,
                refl: false,
            },
        }
    }

    /// The stable letter t (t = b₀a₀ in dihedral type).
    pub fn letter_t(&self) -> VCElement {
        match self.shape {
            VCShape::Cyclic { .. } => VCElement::Cyclic { c: 0, k: 1 },
            VCShape::Dihedral { .. } => VCElement::Dihedral {
                c: 0,
                k: 1,
                refl: false,
            },
        }
    }

    /// The chosen A-side reflection a₀ (dihedral only).
    pub fn refl_a(&self) -> VCElement {
        VCElement::Dihedral {
            c: 0,
            k: 0,
            refl: true,
        }
    }

    /// The chosen B-side reflection b₀ = t·a₀⁻¹ (dihedral only).
    pub fn refl_b(&self) -> VCElement {
        self.mul(&self.letter_t(), &self.inv(&self.refl_a()))
    }

    pub fn mul(&self, x: &VCElement, y: &VCElement) -> VCElement {
        match (&self.shape, x, y) {
            (
                VCShape::Cyclic { .. },
                VCElement::Cyclic { c: c1, k: k1 },
                VCElement::Cyclic { c: c2, k: k2 },
            ) => {
                let (c, k) = self.cyc_mul((*c1, *k1), (*c2, *k2));
                VCElement::Cyclic { c, k }
            }
            (
                VCShape::Dihedral { phi_a, kappa_a, .. },
                VCElement::Dihedral {
                    c: c1,
                    k: k1,
                    refl: r1,
                },
                VCElement::Dihedral {
                    c: c2,
                    k: k2,
                    refl: r2,
                },
            ) => {
                if !r1 {
                    let (c, k) = self.cyc_mul((*c1, *k1), (*c2, *k2));
                    VCElement::Dihedral { c, k, refl: *r2 }
                } else {
                    // (c₁ t^{k₁} a₀)·(c₂ t^{k₂} a₀^{r₂}):
                    // a₀ c₂ a₀⁻¹ = φ_A(c₂), a₀ t a₀⁻¹ = c_h t⁻¹, a₀² = κ_A.
                    let mut z = self.cyc_mul((*c1, *k1), (phi_a.apply(*c2), 0));
                    z = self.cyc_mul(z, self.cyc_pow((self.c_h(), -1), *k2));
                    if *r2 {
                        z = self.cyc_mul(z, (*kappa_a, 0));
                    }
                    VCElement::Dihedral {
                        c: z.0,
                        k: z.1,
                        refl: !*r2,
                    }
                }
            }
            _ => panic!("element kind does not match group shape"),
        }
    }

    pub fn inv(&self, x: &VCElement) -> VCElement {
        match (&self.shape, x) {
            (VCShape::Cyclic { .. }, VCElement::Cyclic { c, k }) => {
                let (c, k) = self.cyc_inv((*c, *k));
                VCElement::Cyclic { c, k }
            }
            (VCShape::Dihedral { kappa_a, .. }, VCElement::Dihedral { c, k, refl }) => {
                if !refl {
                    let (c, k) = self.cyc_inv((*c, *k));
                    VCElement::Dihedral { c, k, refl: false }
                } else {
                    // (w·a₀)⁻¹ = κ_A⁻¹·a₀·w⁻¹.
                    let head = VCElement::Dihedral {
                        c: self.c.inv(*kappa_a),
                        k: 0,
                        refl: true,
                    };
                    let (ci, ki) = self.cyc_inv((*c, *k));
                    self.mul(
                        &head,
                        &VCElement::Dihedral {
                            c: ci,
                            k: ki,
                            refl: false,
                        },
                    )
                }
            }
            _ => panic!("element kind does not match group shape"),
        }
    }

    pub fn pow(&self, x: &VCElement, n: i64) -> VCElement {
        let mut base = if n < 0 { self.inv(x) } else { *x };
        let mut n = n.unsigned_abs();
        let mut acc = self.identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    pub fn has_infinite_order(&self, x: &VCElement) -> bool {
        !x.is_reflection() && x.t_exponent() != 0
    }

    /// The canonical one-loop (cyclic) or two-vertex (dihedral) graph of
    /// groups presenting this group.
    pub fn presentation(&self) -> GraphOfGroups {
        match &self.shape {
            VCShape::Cyclic { alpha } => {
                let e = Edge {
                    id: 0,
                    group: self.c.clone(),
                    from: 0,
                    to: 0,
                    inj_from: GrpHom::identity(&self.c),
                    inj_to: alpha.clone(),
                };
                GraphOfGroups::new(BTreeMap::from([(0, self.c.clone())]), vec![e])
            }
            VCShape::Dihedral {
                a_grp,
                b_grp,
                inc_a,
                inc_b,
                ..
            } => {
                let e = Edge {
                    id: 0,
                    group: self.c.clone(),
                    from: 0,
                    to: 1,
                    inj_from: inc_a.clone(),
                    inj_to: inc_b.clone(),
                };
                GraphOfGroups::new(
                    BTreeMap::from([(0, a_grp.clone()), (1, b_grp.clone())]),
                    vec![e],
                )
            }
        }
    }

    /// The dictionary: the word in `presentation()` realizing an element.
    pub fn word_of(&self, g: &GraphOfGroups, x: &VCElement) -> Word {
        match (&self.shape, x) {
            (VCShape::Cyclic { .. }, VCElement::Cyclic { c, k }) => {
                let mut parts = vec![g.iota(0, *c)];
                let dir = if *k >= 0 { Dir::Plus } else { Dir::Minus };
                for _ in 0..k.unsigned_abs() {
                    parts.push(g.lambda(0, dir));
                }
                let refs: Vec<&Word> = parts.iter().collect();
                Word::concat(&refs)
            }
            (VCShape::Dihedral { inc_a, a0, b0, .. }, VCElement::Dihedral { c, k, refl }) => {
                let t_word = Word::concat(&[&g.iota(1, *b0), &g.iota(0, *a0)]);
                let mut parts = vec![g.iota(0, inc_a.apply(*c))];
                let step = if *k >= 0 {
                    t_word
                } else {
                    g.inverse_word(&t_word)
                };
                for _ in 0..k.unsigned_abs() {
                    parts.push(step.clone());
                }
                if *refl {
                    parts.push(g.iota(0, *a0));
                }
                let refs: Vec<&Word> = parts.iter().collect();
                Word::concat(&refs)
            }
            _ => panic!("element kind does not match group shape"),
        }
    }

    /// Coset coordinates of each element of a vertex group of the canonical
    /// presentation (vertex 0 is C or A, vertex 1 is B).
    fn vertex_elements(&self, vertex: usize) -> Vec<VCElement> {
        match &self.shape {
            VCShape::Cyclic { .. } => {
                assert_eq!(vertex, 0);
                (0..self.c.order()).map(|c| self.elt_c(c)).collect()
            }
            VCShape::Dihedral {
                a_grp,
                b_grp,
                inc_a,
                inc_b,
                a0,
                b0,
                ..
            } => {
                let (grp, inc, x0, refl_word) = if vertex == 0 {
                    (a_grp, inc_a, *a0, self.refl_a())
                } else {
                    (b_grp, inc_b, *b0, self.refl_b())
                };
                // Each vertex-group element is inc(d)·x₀^s for unique (d, s).
                let pre: HashMap<usize, (usize, bool)> = (0..self.c.order())
                    .flat_map(|d| {
                        [
                            (inc.apply(d), (d, false)),
                            (grp.mul(inc.apply(d), x0), (d, true)),
                        ]
                    })
                    .collect();
                (0..grp.order())
                    .map(|y| {
                        let (d, s) = pre[&y];
                        if s {
                            self.mul(&self.elt_c(d), &refl_word)
                        } else {
                            self.elt_c(d)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Locate a finite subgroup (given as a closed set of elements) inside a
    /// vertex group of the canonical presentation: returns (vertex, subgroup
    /// in vertex-group indices) after conjugating by a power of t. Returns
    /// None if the set is not elliptic.
    pub fn locate_elliptic(&self, elems: &[VCElement]) -> Option<(usize, Subgrp)> {
        match &self.shape {
            VCShape::Cyclic { .. } => {
                if elems.iter().any(|x| x.t_exponent() != 0) {
                    return None;
                }
                let mut v: Vec<usize> = elems.iter().map(|x| x.c_part()).collect();
                v.sort_unstable();
                v.dedup();
                Some((0, Subgrp { elements: v }))
            }
            VCShape::Dihedral { .. } => {
                let refls: Vec<i64> = elems
                    .iter()
                    .filter(|x| x.is_reflection())
                    .map(|x| x.t_exponent())
                    .collect();
                if elems
                    .iter()
                    .any(|x| !x.is_reflection() && x.t_exponent() != 0)
                {
                    return None;
                }
                // All reflections of a finite subgroup share one t-exponent
                // ε₀; conjugating by t^{⌊ε₀/2⌋} moves it to 0 or 1, landing
                // in the A side (even) or B side (odd).
                let (vertex, shift) = if let Some(&e0) = refls.first() {
                    if refls.iter().any(|&e| e != e0) {
                        return None;
                    }
                    (usize::from(e0.rem_euclid(2) == 1), e0.div_euclid(2))
                } else {
                    (0, 0)
                };
                let tm = self.pow(&self.letter_t(), shift);
                let tmi = self.inv(&tm);
                let table = self.vertex_elements(vertex);
                let mut idxs = Vec::new();
                for x in elems {
                    let moved = self.mul(&self.mul(&tmi, x), &tm);
                    let i = table.iter().position(|y| *y == moved)?;
                    idxs.push(i);
                }
                idxs.sort_unstable();
                idxs.dedup();
                Some((vertex, Subgrp { elements: idxs }))
            }
        }
    }
}

/// Extract the structured form from a graph of groups presenting an
/// infinite virtually cyclic group.
pub fn structure_of(g: &GraphOfGroups) -> Result<VCGroup, VcycError> {
    let (r, _) = reduce(g)?;
    if r.vertices.len() == 1 && r.edges.len() == 1 {
        let e = &r.edges[0];
        let gv = r.vertices.values().next().unwrap();
        if e.is_loop() && e.group.order() == gv.order() {
            // t·inj_from(c)·t⁻¹ = inj_to(c), so α = inj_to ∘ inj_from⁻¹ on
            // the vertex group.
            let inv = e
                .inj_from
                .inverse(gv)
                .expect("an order-preserving injection is bijective");
            let alpha = inv.then(&e.inj_to);
            return Ok(VCGroup::cyclic(gv.clone(), alpha));
        }
    }
    if r.vertices.len() == 2 && r.edges.len() == 1 {
        let e = &r.edges[0];
        let (a, b) = (r.vertex_group(e.from), r.vertex_group(e.to));
        if a.order() == 2 * e.group.order() && b.order() == 2 * e.group.order() {
            return Ok(VCGroup::dihedral(
                e.group.clone(),
                a.clone(),
                e.inj_from.clone(),
                b.clone(),
                e.inj_to.clone(),
            ));
        }
    }
    Err(VcycError::NotVirtuallyCyclic)
}

/// The descriptor of D_p(N).
pub fn d_subgroup(n: &VCGroup, p: usize) -> DSubgroup {
    let e = n.e_exponent();
    if p % e == 0 {
        return DSubgroup {
            t_exponent: p,
            c_part: Subgrp {
                elements: vec![n.c.identity()],
            },
            exact: true,
        };
    }
    // Enumerate p-th powers of canonical forms with |k| ≤ 3p and close up.
    let bound = 3 * p as i64;
    let mut c_seed = Vec::new();
    let mut exps = Vec::new();
    let refls: &[bool] = if n.is_dihedral() {
        &[false, true]
    } else {
        &[false]
    };
    for c in 0..n.c.order() {
        for k in -bound..=bound {
            for &refl in refls {
                let x = if n.is_dihedral() {
                    VCElement::Dihedral { c, k, refl }
                } else {
                    VCElement::Cyclic { c, k }
                };
                let y = n.pow(&x, p as i64);
                if y.is_reflection() {
                    continue;
                }
                if y.t_exponent() == 0 {
                    c_seed.push(y.c_part());
                } else {
                    exps.push(y.t_exponent().unsigned_abs() as usize);
                }
            }
        }
    }
    let t_exponent = exps.iter().fold(0usize, |a, &b| a.gcd(&b));
    DSubgroup {
        t_exponent,
        c_part: n.c.subgroup_closure(&c_seed),
        exact: false,
    }
}

/// Membership x ∈ D_p(N) = ⟨t^p⟩; requires the closed form (p a multiple of
/// e(N)).
pub fn d_contains(n: &VCGroup, p: usize, x: &VCElement) -> bool {
    debug_assert_eq!(p % n.e_exponent(), 0);
    !x.is_reflection() && x.c_part() == n.c.identity() && x.t_exponent().rem_euclid(p as i64) == 0
}

impl NiceEmbedding {
    pub fn identity(n: &VCGroup) -> Self {
        let letters = if n.is_dihedral() {
            vec![n.refl_a(), n.refl_b()]
        } else {
            vec![n.letter_t()]
        };
        NiceEmbedding {
            on_c: GrpHom::identity(&n.c),
            letters,
        }
    }

    /// The image of the source stable letter t.
    pub fn t_image(&self, src: &VCGroup, tgt: &VCGroup) -> VCElement {
        match src.shape {
            VCShape::Cyclic { .. } => self.letters[0],
            VCShape::Dihedral { .. } => tgt.mul(&self.letters[1], &self.letters[0]),
        }
    }

    /// Image of an element under the embedding.
    pub fn apply(&self, src: &VCGroup, tgt: &VCGroup, x: &VCElement) -> VCElement {
        let c_img = tgt.elt_c(self.on_c.apply(x.c_part()));
        let t_img = self.t_image(src, tgt);
        let mut y = tgt.mul(&c_img, &tgt.pow(&t_img, x.t_exponent()));
        if x.is_reflection() {
            y = tgt.mul(&y, &self.letters[0]);
        }
        y
    }

    /// Composition: apply `self` (src → mid) then `other` (mid → tgt).
    pub fn then(&self, mid: &VCGroup, tgt: &VCGroup, other: &NiceEmbedding) -> NiceEmbedding {
        NiceEmbedding {
            on_c: self.on_c.then(&other.on_c),
            letters: self
                .letters
                .iter()
                .map(|l| other.apply(mid, tgt, l))
                .collect(),
        }
    }

    /// Checks the defining relations of the source presentation.
    pub fn is_homomorphism(&self, src: &VCGroup, tgt: &VCGroup) -> bool {
        // on_c must be a homomorphism C → C'.
        for x in 0..src.c.order() {
            for y in 0..src.c.order() {
                if self.on_c.apply(src.c.mul(x, y))
                    != tgt.c.mul(self.on_c.apply(x), self.on_c.apply(y))
                {
                    return false;
                }
            }
        }
        match &src.shape {
            VCShape::Cyclic { alpha } => {
                let u = self.letters[0];
                let ui = tgt.inv(&u);
                (0..src.c.order()).all(|x| {
                    let lhs = tgt.mul(&tgt.mul(&u, &tgt.elt_c(self.on_c.apply(x))), &ui);
                    lhs == tgt.elt_c(self.on_c.apply(alpha.apply(x)))
                })
            }
            VCShape::Dihedral {
                phi_a,
                phi_b,
                kappa_a,
                kappa_b,
                ..
            } => {
                let (ua, ub) = (self.letters[0], self.letters[1]);
                let check = |u: &VCElement, phi: &GrpHom, kappa: usize| -> bool {
                    if tgt.mul(u, u) != tgt.elt_c(self.on_c.apply(kappa)) {
                        return false;
                    }
                    let ui = tgt.inv(u);
                    (0..src.c.order()).all(|x| {
                        tgt.mul(&tgt.mul(u, &tgt.elt_c(self.on_c.apply(x))), &ui)
                            == tgt.elt_c(self.on_c.apply(phi.apply(x)))
                    })
                };
                check(&ua, phi_a, *kappa_a) && check(&ub, phi_b, *kappa_b)
            }
        }
    }

    /// Exact injectivity test (assumes `is_homomorphism`).
    pub fn is_injective(&self, src: &VCGroup, tgt: &VCGroup) -> bool {
        if !self.on_c.is_injective() {
            return false;
        }
        let t_img = self.t_image(src, tgt);
        if !tgt.has_infinite_order(&t_img) {
            return false;
        }
        if !src.is_dihedral() {
            return true;
        }
        // The map is injective on ⟨C, t⟩; a nontrivial kernel element must
        // be a reflection c·t^j·a₀ with φ(a₀) = φ(t)^{-j}·φ(c)⁻¹. The right
        // side is never a reflection and its t-exponent pins down j.
        let ua = self.letters[0];
        if ua.is_reflection() {
            return true;
        }
        let et = t_img.t_exponent();
        let eu = ua.t_exponent();
        if eu % et != 0 {
            return true;
        }
        let j = -eu / et;
        !(0..src.c.order()).any(|c| {
            ua == tgt.mul(
                &tgt.pow(&t_img, -j),
                &tgt.inv(&tgt.elt_c(self.on_c.apply(c))),
            )
        })
    }
}

/// The modulus used for the D-quotients in the niceness test: the least p
/// with the closed form D_p = ⟨t^p⟩ in both groups.
pub fn nice_modulus(src: &VCGroup, tgt: &VCGroup) -> usize {
    src.e_exponent().lcm(&tgt.e_exponent())
}

/// The three-bullet K-niceness test for an embedding candidate.
pub fn is_k_nice(
    src: &VCGroup,
    tgt: &VCGroup,
    emb: &NiceEmbedding,
    k: usize,
) -> Result<NiceCheck, VcycError> {
    let needed = src.k_of().max(tgt.k_of());
    if k < needed {
        return Err(VcycError::BadK { k, needed });
    }
    // Bullet 1: injective homomorphism.
    if !emb.is_homomorphism(src, tgt) || !emb.is_injective(src, tgt) {
        return Ok(NiceCheck::fail(1));
    }
    // Bullet 2: non-conjugate finite subgroups stay non-conjugate.
    let src_pres = src.presentation();
    let tgt_pres = tgt.presentation();
    let src_classes = class_table(&src_pres);
    let tgt_classes = class_table(&tgt_pres);
    let mut images = Vec::new();
    for class in &src_classes.classes {
        let table = src.vertex_elements(class.vertex);
        let mapped: Vec<VCElement> = class
            .rep
            .elements
            .iter()
            .map(|&i| emb.apply(src, tgt, &table[i]))
            .collect();
        let Some((v, s)) = tgt.locate_elliptic(&mapped) else {
            return Ok(NiceCheck::fail(2));
        };
        let (cid, _, _) = tgt_classes.class_of_subgroup(&tgt_pres, v, &s);
        images.push(cid);
    }
    let mut dedup = images.clone();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != images.len() {
        return Ok(NiceCheck::fail(2));
    }
    // Bullet 3: injectivity on the quotients N/D_p(N) → N'/D_p(N').
    let p = nice_modulus(src, tgt);
    let refls: &[bool] = if src.is_dihedral() {
        &[false, true]
    } else {
        &[false]
    };
    for c in 0..src.c.order() {
        for j in 0..p as i64 {
            for &refl in refls {
                if c == src.c.identity() && j == 0 && !refl {
                    continue;
                }
                let x = if src.is_dihedral() {
                    VCElement::Dihedral { c, k: j, refl }
                } else {
                    VCElement::Cyclic { c, k: j }
                };
                if d_contains(tgt, p, &emb.apply(src, tgt, &x)) {
                    return Ok(NiceCheck::fail(3));
                }
            }
        }
    }
    Ok(NiceCheck::pass())
}

/// Search for one nice embedding src → tgt (both cyclic type).
fn find_cyclic_nice(
    src: &VCGroup,
    tgt: &VCGroup,
    k: usize,
) -> Result<Option<NiceEmbedding>, VcycError> {
    let Some(base_iso) = find_isomorphism(&src.c, &tgt.c) else {
        return Ok(None);
    };
    let alpha = src.alpha();
    let window = tgt
        .alpha_order()
        .lcm(&src.e_exponent())
        .lcm(&tgt.e_exponent()) as i64;
    let abelian = (0..tgt.c.order())
        .all(|x| (0..tgt.c.order()).all(|y| tgt.c.mul(x, y) == tgt.c.mul(y, x)));
    let conjugators: Vec<usize> = if abelian {
        vec![tgt.c.identity()]
    } else {
        (0..tgt.c.order()).collect()
    };
    let ord_t = tgt.alpha_order() as i64;
    for theta0 in automorphisms(&src.c) {
        let theta = theta0.then(&base_iso);
        for &cp in &conjugators {
            // The constraint ad(c')∘β^s∘θ = θ∘α determines s modulo
            // ord(β): solve β^s = ad(c'⁻¹)∘θ∘α∘θ⁻¹ for the residue once.
            let cpi = tgt.c.inv(cp);
            let required: Vec<usize> = (0..tgt.c.order())
                .map(|x| {
                    let pre = theta
                        .images
                        .iter()
                        .position(|&y| y == x)
                        .expect("theta is bijective");
                    tgt.c.conj(cpi, theta.apply(alpha.apply(pre)))
                })
                .collect();
            let Some(s0) = (0..ord_t)
                .find(|&j| (0..tgt.c.order()).all(|x| tgt.alpha_pow(x, j) == required[x]))
            else {
                continue;
            };
            for s_abs in 1..=window {
                for s in [s_abs, -s_abs] {
                    if s.rem_euclid(ord_t) != s0 {
                        continue;
                    }
                    // With a central letter image, gcd(s, p) > 1 forces a
                    // quotient-bullet failure: t^{p/gcd} maps into ⟨t^p⟩.
                    if cp == tgt.c.identity()
                        && (s.unsigned_abs() as usize).gcd(&nice_modulus(src, tgt)) != 1
                    {
                        continue;
                    }
                    let emb = NiceEmbedding {
                        on_c: theta.clone(),
                        letters: vec![VCElement::Cyclic { c: cp, k: s }],
                    };
                    if is_k_nice(src, tgt, &emb, k)?.ok {
                        return Ok(Some(emb));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Search for one nice embedding src → tgt (both dihedral type).
fn find_dihedral_nice(
    src: &VCGroup,
    tgt: &VCGroup,
    k: usize,
) -> Result<Option<NiceEmbedding>, VcycError> {
    let Some(base_iso) = find_isomorphism(&src.c, &tgt.c) else {
        return Ok(None);
    };
    let bound = nice_modulus(src, tgt) as i64;
    let mut reflections = Vec::new();
    for c in 0..tgt.c.order() {
        for e in -bound..=bound {
            reflections.push(VCElement::Dihedral {
                c,
                k: e,
                refl: true,
            });
        }
    }
    for theta0 in automorphisms(&src.c) {
        let theta = theta0.then(&base_iso);
        for &ua in &reflections {
            for &ub in &reflections {
                let emb = NiceEmbedding {
                    on_c: theta.clone(),
                    letters: vec![ua, ub],
                };
                if !emb.is_homomorphism(src, tgt) {
                    continue;
                }
                if is_k_nice(src, tgt, &emb, k)?.ok {
                    return Ok(Some(emb));
                }
            }
        }
    }
    Ok(None)
}

/// Is there an automorphism σ of C with σ∘β∘σ⁻¹ ∈ {γ, γ⁻¹}? Then C⋊_β Z and
/// C⋊_γ Z are isomorphic.
fn cyclic_types_isomorphic(c: &FinGroup, beta: &GrpHom, gamma: &GrpHom) -> bool {
    let gamma_inv = gamma.inverse(c).expect("automorphism");
    automorphisms(c).iter().any(|s| {
        let si = s.inverse(c).expect("automorphism");
        let conj = si.then(beta).then(s);
        conj == *gamma || conj == gamma_inv
    })
}

/// All index-2 overgroups of C up to equivalence, as (group, inclusion)
/// pairs, built from (φ, κ) data with φ² = ad(κ) and φ(κ) = κ.
pub fn index2_overgroups(c: &FinGroup) -> Vec<(FinGroup, GrpHom)> {
    let auts = automorphisms(c);
    let mut pairs: Vec<(GrpHom, usize)> = Vec::new();
    for phi in &auts {
        for kappa in 0..c.order() {
            if phi.apply(kappa) != kappa {
                continue;
            }
            let sq = phi.then(phi);
            if (0..c.order()).all(|x| sq.apply(x) == c.conj(kappa, x)) {
                pairs.push((phi.clone(), kappa));
            }
        }
    }
    // Quotient by basepoint change a₀ ↦ c₀·a₀ and by Aut(C):
    // (φ, κ) ~ (ad(c₀)∘φ, c₀·φ(c₀)·κ) and (φ, κ) ~ (σφσ⁻¹, σ(κ)).
    let canon = |phi: &GrpHom, kappa: usize| -> (Vec<usize>, usize) {
        let mut orbit = vec![(phi.images.clone(), kappa)];
        let mut i = 0;
        while i < orbit.len() {
            let (pimg, kap) = orbit[i].clone();
            let p = GrpHom { images: pimg };
            for c0 in 0..c.order() {
                let np: Vec<usize> = (0..c.order()).map(|x| c.conj(c0, p.apply(x))).collect();
                let nk = c.mul(c.mul(c0, p.apply(c0)), kap);
                let cand = (np, nk);
                if !orbit.contains(&cand) {
                    orbit.push(cand);
                }
            }
            for s in &auts {
                let si = s.inverse(c).expect("automorphism");
                let np = si.then(&p).then(s);
                let nk = s.apply(kap);
                let cand = (np.images, nk);
                if !orbit.contains(&cand) {
                    orbit.push(cand);
                }
            }
            i += 1;
        }
        orbit.into_iter().min().unwrap()
    };
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (phi, kappa) in pairs {
        let key = canon(&phi, kappa);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        // Realize A = ⟨C, a₀⟩ by left multiplication on its 2|C| elements,
        // indexing d·a₀^i as i·|C| + d.
        let n = c.order();
        let mut gens = Vec::new();
        for g in 0..n {
            let mut images = vec![0; 2 * n];
            for d in 0..n {
                images[d] = c.mul(g, d);
                images[n + d] = n + c.mul(g, d);
            }
            gens.push(Perm::new(images).expect("valid permutation"));
        }
        // Left multiplication by a₀: a₀·(d·a₀^i) = φ(d)·a₀^{i+1}.
        let mut images = vec![0; 2 * n];
        for d in 0..n {
            images[d] = n + phi.apply(d);
            images[n + d] = c.mul(phi.apply(d), kappa);
        }
        gens.push(Perm::new(images).expect("valid permutation"));
        let grp = enumerate_elements(2 * n, gens, DEFAULT_CAP).expect("order 2|C| fits the cap");
        // The inclusion sends d ∈ C to its left-multiplication permutation.
        let mut inc_images = Vec::new();
        for d in 0..n {
            let mut images = vec![0; 2 * n];
            for x in 0..n {
                images[x] = c.mul(d, x);
                images[n + x] = n + c.mul(d, x);
            }
            let p = Perm::new(images).expect("valid permutation");
            inc_images.push(grp.index_of(&p).expect("C embeds in its overgroup"));
        }
        out.push((grp, GrpHom { images: inc_images }));
    }
    out
}

/// All mutual nice partner types of `n`, each with verified embeddings in
/// both directions (ι: n → partner, ι′: partner → n). Partners are listed
/// up to isomorphism of the structured form; `n` itself is always included
/// (identity witnesses).
pub fn mutual_nice_partners(
    n: &VCGroup,
    k: usize,
) -> Result<Vec<(VCGroup, NiceEmbedding, NiceEmbedding)>, VcycError> {
    let mut out = Vec::new();
    match &n.shape {
        VCShape::Cyclic { alpha } => {
            let mut reps: Vec<GrpHom> = Vec::new();
            for beta in automorphisms(&n.c) {
                if reps
                    .iter()
                    .any(|g| cyclic_types_isomorphic(&n.c, &beta, g))
                {
                    continue;
                }
                reps.push(beta);
            }
            for beta in reps {
                if cyclic_types_isomorphic(&n.c, &beta, alpha) {
                    let id = NiceEmbedding::identity(n);
                    out.push((n.clone(), id.clone(), id));
                    continue;
                }
                let cand = VCGroup::cyclic(n.c.clone(), beta);
                let Some(iota) = find_cyclic_nice(n, &cand, k)? else {
                    continue;
                };
                let Some(back) = find_cyclic_nice(&cand, n, k)? else {
                    continue;
                };
                out.push((cand, iota, back));
            }
        }
        VCShape::Dihedral { .. } => {
            if n.c.order() > PARTNER_CAP {
                return Err(VcycError::CapExceeded {
                    size: n.c.order(),
                    cap: PARTNER_CAP,
                });
            }
            let overgroups = index2_overgroups(&n.c);
            let mut seen_pairs: Vec<(usize, usize)> = Vec::new();
            for (i, (a_grp, inc_a)) in overgroups.iter().enumerate() {
                for (j, (b_grp, inc_b)) in overgroups.iter().enumerate() {
                    let key = (i.min(j), i.max(j));
                    if seen_pairs.contains(&key) {
                        continue;
                    }
                    seen_pairs.push(key);
                    let cand = VCGroup::dihedral(
                        n.c.clone(),
                        a_grp.clone(),
                        inc_a.clone(),
                        b_grp.clone(),
                        inc_b.clone(),
                    );
                    let Some(iota) = find_dihedral_nice(n, &cand, k)? else {
                        continue;
                    };
                    let Some(back) = find_dihedral_nice(&cand, n, k)? else {
                        continue;
                    };
                    out.push((cand, iota, back));
                }
            }
        }
    }
    Ok(out)
}

/// The data of a legal small extension Γ = G ∗_N N′, as produced by the
/// legal module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallExtension {
    /// The original group G.
    pub base: GraphOfGroups,
    /// The extension Γ.
    pub gamma: GraphOfGroups,
    /// N = N_G(C).
    pub n: VCGroup,
    /// N′ = N_Γ(C).
    pub n_prime: VCGroup,
    /// ι : N → N′.
    pub iota: NiceEmbedding,
    /// ι′ : N′ → N.
    pub iota_back: NiceEmbedding,
    /// The D-exponent used for the niceness quotients.
    pub modulus: usize,
    /// How N′ sits inside gamma.
    pub seat: NPrimeSeat,
}

/// Location of N′ inside the extension graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NPrimeSeat {
    /// Cyclic type: a loop edge; its stable letter is the t of N′.
    Hnn { loop_edge: usize, vertex: usize },
    /// Dihedral type: the vertices carrying the A′ and B′ sides.
    Amalgam { a_vertex: usize, b_vertex: usize },
}

/// A twist τ_δ of the extension: identity on G, stable letter multiplied by
/// δ (HNN case) or B′ side conjugated by δ (amalgam case).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Twist {
    pub delta: VCElement,
}

impl Twist {
    /// τ_δ restricted to N′, as an endomorphism of N′ in structured form.
    pub fn on_n_prime(&self, ctx: &SmallExtension) -> NiceEmbedding {
        let np = &ctx.n_prime;
        match np.shape {
            VCShape::Cyclic { .. } => NiceEmbedding {
                on_c: GrpHom::identity(&np.c),
                letters: vec![np.mul(&np.letter_t(), &self.delta)],
            },
            VCShape::Dihedral { .. } => {
                let di = np.inv(&self.delta);
                NiceEmbedding {
                    on_c: GrpHom::identity(&np.c),
                    letters: vec![
                        np.refl_a(),
                        np.mul(&np.mul(&self.delta, &np.refl_b()), &di),
                    ],
                }
            }
        }
    }

    /// τ_δ as a word transformer Γ → Γ.
    pub fn as_gog_hom(&self, ctx: &SmallExtension) -> GoGHom {
        let g = &ctx.gamma;
        let mut hom = GoGHom::identity_hom(g);
        match &ctx.seat {
            NPrimeSeat::Hnn { loop_edge, .. } => {
                // Stable letter ↦ t·δ, with δ = t^{pj} a power of the loop.
                let e = *loop_edge;
                let mut parts = vec![g.lambda(e, Dir::Plus)];
                let k = self.delta.t_exponent();
                let dir = if k >= 0 { Dir::Plus } else { Dir::Minus };
                for _ in 0..k.unsigned_abs() {
                    parts.push(g.lambda(e, dir));
                }
                let refs: Vec<&Word> = parts.iter().collect();
                hom.edge_images.insert(e, Word::concat(&refs));
            }
            NPrimeSeat::Amalgam { b_vertex, .. } => {
                // ad(δ) on the B′ side, with δ realized as a word in Γ.
                let d_word = n_prime_word_in_gamma(ctx, &self.delta);
                let d_inv = g.inverse_word(&d_word);
                let gv = g.vertex_group(*b_vertex);
                let images: Vec<Word> = (0..gv.order())
                    .map(|x| Word::concat(&[&d_word, &g.iota(*b_vertex, x), &d_inv]))
                    .collect();
                hom.vertex_images.insert(*b_vertex, images);
            }
        }
        hom
    }
}

/// Realize an element of N′ as a word in Γ using the seat.
pub fn n_prime_word_in_gamma(ctx: &SmallExtension, x: &VCElement) -> Word {
    let g = &ctx.gamma;
    match (&ctx.seat, &ctx.n_prime.shape) {
        (NPrimeSeat::Hnn { loop_edge, vertex }, VCShape::Cyclic { .. }) => {
            let mut parts = vec![g.iota(*vertex, x.c_part())];
            let k = x.t_exponent();
            let dir = if k >= 0 { Dir::Plus } else { Dir::Minus };
            for _ in 0..k.unsigned_abs() {
                parts.push(g.lambda(*loop_edge, dir));
            }
            let refs: Vec<&Word> = parts.iter().collect();
            Word::concat(&refs)
        }
        (
            NPrimeSeat::Amalgam { a_vertex, b_vertex },
            VCShape::Dihedral { inc_a, a0, b0, .. },
        ) => {
            let t_word = Word::concat(&[&g.iota(*b_vertex, *b0), &g.iota(*a_vertex, *a0)]);
            let mut parts = vec![g.iota(*a_vertex, inc_a.apply(x.c_part()))];
            let k = x.t_exponent();
            let step = if k >= 0 {
                t_word
            } else {
                g.inverse_word(&t_word)
            };
            for _ in 0..k.unsigned_abs() {
                parts.push(step.clone());
            }
            if x.is_reflection() {
                parts.push(g.iota(*a_vertex, *a0));
            }
            let refs: Vec<&Word> = parts.iter().collect();
            Word::concat(&refs)
        }
        _ => panic!("seat kind does not match N' shape"),
    }
}

/// Build the twist τ_δ; requires δ ∈ D(N′).
pub fn twist_map(ctx: &SmallExtension, delta: &VCElement) -> Result<Twist, VcycError> {
    if !d_contains(&ctx.n_prime, ctx.modulus, delta) {
        return Err(VcycError::DeltaNotInD);
    }
    Ok(Twist { delta: *delta })
}

/// The n-th member of a small test sequence: a homomorphism N′ → N whose
/// image has prime index p_n = k + p·λ_n in N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallTestMap {
    pub n: usize,
    /// The prime index [N : image].
    pub p: usize,
    /// The λ used.
    pub lambda: usize,
    /// ι′_n : N′ → N.
    pub map: NiceEmbedding,
}

fn is_prime(x: usize) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Maximal λ searched for primes of the form k + p·λ.
pub const PRIME_WINDOW: usize = 100_000;

/// Compute the n-th small test map. Requires ι to be a proper embedding.
pub fn small_test_map(ctx: &SmallExtension, n: usize) -> Result<SmallTestMap, VcycError> {
    let np = &ctx.n_prime;
    let ng = &ctx.n;
    // Index of ι(N) in N′ must exceed 1.
    let iota_exp = ctx.iota.t_image(ng, np).t_exponent().unsigned_abs();
    if iota_exp <= 1 {
        return Err(VcycError::NotProperExtension);
    }
    // k from ι′(z) with z the stable letter of N′.
    let z_img = ctx.iota_back.t_image(np, ng);
    let k_exp = z_img.t_exponent();
    let p = ctx.modulus;
    // Find the n-th λ (ascending, λ ≥ 0) with k + p·λ a positive prime.
    let mut found = 0usize;
    let mut chosen = None;
    for lambda in 0..=PRIME_WINDOW {
        let val = k_exp + (p as i64) * (lambda as i64);
        if val > 0 && is_prime(val as usize) {
            if found == n {
                chosen = Some((lambda, val as usize));
                break;
            }
            found += 1;
        }
    }
    let Some((lambda, prime)) = chosen else {
        return Err(VcycError::NoPrimeInWindow {
            window: PRIME_WINDOW,
        });
    };
    let map = match np.shape {
        VCShape::Cyclic { .. } => {
            // ι′_n(z) = ι′(z)·δ^λ with δ = t^p central in N.
            let delta = ng.pow(&ng.letter_t(), p as i64);
            NiceEmbedding {
                on_c: ctx.iota_back.on_c.clone(),
                letters: vec![ng.mul(&z_img, &ng.pow(&delta, lambda as i64))],
            }
        }
        VCShape::Dihedral { .. } => {
            // ι′_n = ι′ on the A′ side, ad(t^{(p/2)·λ})∘ι′ on the B′ side;
            // conjugation shifts the t-exponent of ι′_n(z) by p·λ.
            let half = ng.pow(&ng.letter_t(), (p as i64) / 2 * lambda as i64);
            let hi = ng.inv(&half);
            NiceEmbedding {
                on_c: ctx.iota_back.on_c.clone(),
                letters: vec![
                    ctx.iota_back.letters[0],
                    ng.mul(&ng.mul(&half, &ctx.iota_back.letters[1]), &hi),
                ],
            }
        }
    };
    // Verify the index: the image meets C in im(on_c) and the ⟨t⟩-direction
    // in ⟨t^{p_n}⟩, so [N : image] = p_n · |C| / |im(on_c)|.
    let exp = map.t_image(np, ng).t_exponent().unsigned_abs() as usize;
    let mut imset: Vec<usize> = map.on_c.images.clone();
    imset.sort_unstable();
    imset.dedup();
    let index = exp * ng.c.order() / imset.len();
    assert_eq!(index, prime, "computed index must equal the chosen prime");
    Ok(SmallTestMap {
        n,
        p: prime,
        lambda,
        map,
    })
}
