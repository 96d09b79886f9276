//! Conjugacy classes of finite subgroups, normalizers with elementary
//! classification, E_G(N_G(C)), M(h) membership tests, chains, and the five
//! counting invariants.
//!
//! Finite subgroups are elliptic, so every conjugacy class of finite
//! subgroups meets a vertex group. Classes are computed by a union-find over
//! pairs (vertex, subgroup up to vertex-group conjugacy), merged across
//! edges. Normalizers are materialized as induced graphs of groups on the
//! fixed subtree, together with an explicit embedding of their fundamental
//! group back into the ambient group, given by words.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::fingrp::{conjugacy_classes_of_subgroups, FinGroup, GrpHom, Subgrp};
use crate::gog::{Dir, GoGHom, GogError, GraphOfGroups, Word};
use crate::splittings::reduce;

/// Maximum number of tokens a materialized word power may reach.
pub const POWER_TOKEN_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("the normalizer of this class is not non-elementary")]
    NotNonElementary,
    #[error("the element has finite order (elliptic on the tree)")]
    EllipticElement,
    #[error("budget exceeded: {what}")]
    BudgetExceeded { what: String },
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// One conjugacy class of finite subgroups, by a representative subgroup of
/// a vertex group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinClass {
    pub id: usize,
    pub vertex: usize,
    pub rep: Subgrp,
    pub order: usize,
}

/// The classes plus a lookup from (vertex, vertex-level class) to class id.
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub classes: Vec<FinClass>,
    /// Per vertex: the vertex-group conjugacy class representatives.
    pub vertex_classes: BTreeMap<usize, Vec<Subgrp>>,
    /// (vertex, index into vertex_classes[vertex]) → global class id.
    class_of_node: HashMap<(usize, usize), usize>,
}

impl ClassTable {
    /// The global class of a subgroup of a vertex group. Returns the class
    /// id, the vertex-class index, and a vertex-group conjugator `a` with
    /// `a·s·a⁻¹` equal to the stored vertex-class representative.
    pub fn class_of_subgroup(
        &self,
        g: &GraphOfGroups,
        v: usize,
        s: &Subgrp,
    ) -> (usize, usize, usize) {
        let gv = g.vertex_group(v);
        for (i, rep) in self.vertex_classes[&v].iter().enumerate() {
            if let Some(a) = gv.conjugator(s, rep) {
                return (self.class_of_node[&(v, i)], i, a);
            }
        }
        unreachable!("every subgroup lies in some vertex class");
    }
}

fn uf_find(parent: &mut Vec<usize>, mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Compute the conjugacy classes of finite subgroups with their lookup
/// table.
pub fn class_table(g: &GraphOfGroups) -> ClassTable {
    // Nodes: (vertex, vertex-class index).
    let mut vertex_classes: BTreeMap<usize, Vec<Subgrp>> = BTreeMap::new();
    let mut node_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    for (&v, gv) in &g.vertices {
        let reps: Vec<Subgrp> = conjugacy_classes_of_subgroups(gv)
            .into_iter()
            .map(|(s, _)| s)
            .collect();
        for i in 0..reps.len() {
            node_ids.insert((v, i), nodes.len());
            nodes.push((v, i));
        }
        vertex_classes.insert(v, reps);
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    let local_class = |v: usize, s: &Subgrp| -> usize {
        let gv = g.vertex_group(v);
        vertex_classes[&v]
            .iter()
            .position(|rep| gv.conjugator(s, rep).is_some())
            .unwrap()
    };
    for e in &g.edges {
        for (s, _) in conjugacy_classes_of_subgroups(&e.group) {
            let img_from = e.inj_from.image_of(&s);
            let img_to = e.inj_to.image_of(&s);
            let a = node_ids[&(e.from, local_class(e.from, &img_from))];
            let b = node_ids[&(e.to, local_class(e.to, &img_to))];
            let (ra, rb) = (uf_find(&mut parent, a), uf_find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    // Assemble classes; representative = minimal (order, vertex, elements).
    let mut comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for n in 0..nodes.len() {
        let r = uf_find(&mut parent, n);
        comp.entry(r).or_default().push(n);
    }
    let mut reps: Vec<(usize, Subgrp, Vec<usize>)> = comp
        .into_values()
        .map(|members| {
            let &best = members
                .iter()
                .min_by_key(|&&n| {
                    let (v, i) = nodes[n];
                    let s = &vertex_classes[&v][i];
                    (s.order(), v, s.elements.clone())
                })
                .unwrap();
            let (v, i) = nodes[best];
            (v, vertex_classes[&v][i].clone(), members)
        })
        .collect();
    reps.sort_by_key(|(v, s, _)| (s.order(), *v, s.elements.clone()));
    let mut classes = Vec::new();
    let mut class_of_node = HashMap::new();
    for (id, (v, s, members)) in reps.into_iter().enumerate() {
        for n in members {
            class_of_node.insert(nodes[n], id);
        }
        classes.push(FinClass {
            id,
            vertex: v,
            order: s.order(),
            rep: s,
        });
    }
    ClassTable {
        classes,
        vertex_classes,
        class_of_node,
    }
}

/// Representatives of the conjugacy classes of finite subgroups.
pub fn finite_subgroup_classes(g: &GraphOfGroups) -> Vec<FinClass> {
    class_table(g).classes
}

/// The elementary trichotomy for fundamental groups of graphs of finite
/// groups (plus the finite case).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElemKind {
    Finite,
    VCCyclic,
    VCDihedral,
    NonElementary,
}

/// Classify the fundamental group of a graph of finite groups.
pub fn classify_elementary(g: &GraphOfGroups) -> Result<ElemKind, GogError> {
    let (r, _) = reduce(g)?;
    if r.edges.is_empty() {
        return Ok(ElemKind::Finite);
    }
    if r.vertices.len() == 1 && r.edges.len() == 1 {
        let e = &r.edges[0];
        let gv = r.vertices.values().next().unwrap();
        if e.is_loop() && e.group.order() == gv.order() {
            return Ok(ElemKind::VCCyclic);
        }
    }
    if r.vertices.len() == 2 && r.edges.len() == 1 {
        let e = &r.edges[0];
        let (a, b) = (r.vertex_group(e.from), r.vertex_group(e.to));
        if a.order() == 2 * e.group.order() && b.order() == 2 * e.group.order() {
            return Ok(ElemKind::VCDihedral);
        }
    }
    Ok(ElemKind::NonElementary)
}

/// A vertex of a normalizer presentation: one orbit of fixed vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerNode {
    /// Original vertex of the ambient graph.
    pub vertex: usize,
    /// The vertex-class representative copy of C inside that vertex group.
    pub local: Subgrp,
    /// Ambient word w with w·iota(vertex, local)·w⁻¹ = the class
    /// representative copy of C.
    pub witness: Word,
    /// Abstract node-group element i ↔ vertex-group element back[i].
    pub back: Vec<usize>,
}

/// N_G(C) as an induced graph of groups with an explicit word embedding
/// into the ambient fundamental group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizerInfo {
    pub class: FinClass,
    pub kind: ElemKind,
    pub presentation: GraphOfGroups,
    /// Orbit data per presentation vertex id.
    pub nodes: Vec<NormalizerNode>,
    /// Embedding of the presentation's fundamental group into the ambient
    /// group (standard-generator images as ambient words).
    pub embedding: GoGHom,
    /// Ambient words generating N_G(C).
    pub generators: Vec<Word>,
}

/// Build N_G(C) for a class representative: the induced graph of groups of
/// the normalizer acting on the fixed subtree of C.
pub fn normalizer(g: &GraphOfGroups, table: &ClassTable, class_id: usize) -> NormalizerInfo {
    let class = table.classes[class_id].clone();

    // Presentation vertices: nodes (v, vertex-class rep D) in this class.
    let mut node_keys: Vec<(usize, usize)> = Vec::new();
    for (&v, reps) in &table.vertex_classes {
        for i in 0..reps.len() {
            if table.class_of_node[&(v, i)] == class_id {
                node_keys.push((v, i));
            }
        }
    }
    node_keys.sort();
    let node_idx: HashMap<(usize, usize), usize> =
        node_keys.iter().enumerate().map(|(n, &k)| (k, n)).collect();

    let mut pres_vertices: BTreeMap<usize, FinGroup> = BTreeMap::new();
    let mut backs: Vec<Vec<usize>> = Vec::new();
    let mut locals: Vec<(usize, Subgrp)> = Vec::new();
    for (n, &(v, i)) in node_keys.iter().enumerate() {
        let gv = g.vertex_group(v);
        let d = table.vertex_classes[&v][i].clone();
        let norm = gv.normalizer_of(&d);
        let (ng, back) = gv.subgroup_as_group(&norm);
        pres_vertices.insert(n, ng);
        backs.push(back);
        locals.push((v, d));
    }
    let fwd: Vec<HashMap<usize, usize>> = backs
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, &x)| (x, i)).collect())
        .collect();

    // Presentation edges: (ambient edge, edge-group class of S) with S in
    // this class; endpoints composed with vertex-level conjugators.
    struct PresEdgeData {
        ambient: usize,
        a_from: usize,
        a_to: usize,
    }
    let mut pres_edges: Vec<crate::gog::Edge> = Vec::new();
    let mut pres_edge_data: Vec<PresEdgeData> = Vec::new();
    for e in &g.edges {
        for (s, _) in conjugacy_classes_of_subgroups(&e.group) {
            let img_from = e.inj_from.image_of(&s);
            let (cid, ifrom, a_from) = table.class_of_subgroup(g, e.from, &img_from);
            if cid != class_id {
                continue;
            }
            let img_to = e.inj_to.image_of(&s);
            let (_, ito, a_to) = table.class_of_subgroup(g, e.to, &img_to);
            let from_node = node_idx[&(e.from, ifrom)];
            let to_node = node_idx[&(e.to, ito)];
            let ns = e.group.normalizer_of(&s);
            let (ng, eback) = e.group.subgroup_as_group(&ns);
            let compose = |node: usize, inj: &GrpHom, a: usize, vid: usize| -> GrpHom {
                let gv = g.vertex_group(vid);
                GrpHom {
                    images: eback
                        .iter()
                        .map(|&c| fwd[node][&gv.conj(a, inj.apply(c))])
                        .collect(),
                }
            };
            let inj_from = compose(from_node, &e.inj_from, a_from, e.from);
            let inj_to = compose(to_node, &e.inj_to, a_to, e.to);
            pres_edges.push(crate::gog::Edge {
                id: pres_edge_data.len(),
                group: ng,
                from: from_node,
                to: to_node,
                inj_from,
                inj_to,
            });
            pres_edge_data.push(PresEdgeData {
                ambient: e.id,
                a_from,
                a_to,
            });
        }
    }

    let presentation = GraphOfGroups::new(pres_vertices, pres_edges);
    presentation
        .validate()
        .expect("normalizer presentation is structurally valid");

    // Coherent witnesses: walk the presentation's spanning tree from the
    // node carrying the class representative, choosing each node's witness
    // so that tree-edge letters embed to the identity.
    let root = node_keys
        .iter()
        .position(|&(v, i)| v == class.vertex && table.vertex_classes[&v][i] == class.rep)
        .expect("class representative is one of the nodes");
    let n_nodes = node_keys.len();
    let mut witness: Vec<Option<Word>> = vec![None; n_nodes];
    witness[root] = Some(Word::empty());
    let tree: BTreeSet<usize> = presentation.spanning_tree().clone();
    loop {
        let mut progressed = false;
        for (mid, pe) in presentation.edges.iter().enumerate() {
            if !tree.contains(&pe.id) {
                continue;
            }
            let ed = &pres_edge_data[mid];
            let e = g.edge(ed.ambient);
            let (u, w) = (e.from, e.to);
            let gu = g.vertex_group(u);
            let gw = g.vertex_group(w);
            let lam = g.lambda(e.id, Dir::Plus);
            if witness[pe.from].is_some() && witness[pe.to].is_none() {
                // w_to = w_from · ι_u(a_from) · λ⁻¹ · ι_w(a_to)⁻¹
                let wf = witness[pe.from].clone().unwrap();
                let word = Word::concat(&[
                    &wf,
                    &g.iota(u, ed.a_from),
                    &g.inverse_word(&lam),
                    &g.iota(w, gw.inv(ed.a_to)),
                ]);
                witness[pe.to] = Some(g.nf_to_word(&g.normal_form(&word).unwrap()));
                progressed = true;
            } else if witness[pe.to].is_some() && witness[pe.from].is_none() {
                // w_from = w_to · ι_w(a_to) · λ · ι_u(a_from)⁻¹
                let wt = witness[pe.to].clone().unwrap();
                let word = Word::concat(&[
                    &wt,
                    &g.iota(w, ed.a_to),
                    &lam,
                    &g.iota(u, gu.inv(ed.a_from)),
                ]);
                witness[pe.from] = Some(g.nf_to_word(&g.normal_form(&word).unwrap()));
                progressed = true;
            }
        }
        if witness.iter().all(|w| w.is_some()) {
            break;
        }
        assert!(progressed, "fixed subtree quotient is connected");
    }
    let witness: Vec<Word> = witness.into_iter().map(Option::unwrap).collect();

    // Embedding: vertex elements conjugated by witnesses; edge letters as
    // the connecting hyperbolic words (identity on tree edges).
    let mut vertex_images: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
    for n in 0..n_nodes {
        let (v, _) = locals[n];
        let wn = &witness[n];
        let wn_inv = g.inverse_word(wn);
        let imgs: Vec<Word> = backs[n]
            .iter()
            .map(|&x| {
                let word = Word::concat(&[wn, &g.iota(v, x), &wn_inv]);
                g.nf_to_word(&g.normal_form(&word).unwrap())
            })
            .collect();
        vertex_images.insert(n, imgs);
    }
    let mut edge_images: BTreeMap<usize, Word> = BTreeMap::new();
    for (mid, pe) in presentation.edges.iter().enumerate() {
        let ed = &pres_edge_data[mid];
        let e = g.edge(ed.ambient);
        let (u, w) = (e.from, e.to);
        let gu = g.vertex_group(u);
        // γ = w_to · ι_w(a_to) · λ(e,+) · ι_u(a_from)⁻¹ · w_from⁻¹
        let word = Word::concat(&[
            &witness[pe.to],
            &g.iota(w, ed.a_to),
            &g.lambda(e.id, Dir::Plus),
            &g.iota(u, gu.inv(ed.a_from)),
            &g.inverse_word(&witness[pe.from]),
        ]);
        edge_images.insert(pe.id, g.nf_to_word(&g.normal_form(&word).unwrap()));
    }
    let embedding = GoGHom {
        vertex_images,
        edge_images,
    };

    // Generators of N: all nontrivial node-group elements plus the
    // hyperbolic letters of non-tree edges.
    let mut generators = Vec::new();
    for n in 0..n_nodes {
        for x in 1..backs[n].len() {
            generators.push(embedding.vertex_images[&n][x].clone());
        }
    }
    for pe in &presentation.edges {
        if !tree.contains(&pe.id) {
            generators.push(embedding.edge_images[&pe.id].clone());
        }
    }

    let kind = classify_elementary(&presentation).expect("presentation classifies");
    let nodes = (0..n_nodes)
        .map(|n| NormalizerNode {
            vertex: locals[n].0,
            local: locals[n].1.clone(),
            witness: witness[n].clone(),
            back: backs[n].clone(),
        })
        .collect();
    NormalizerInfo {
        class,
        kind,
        presentation,
        nodes,
        embedding,
        generators,
    }
}

/// A finite subgroup of the fundamental group, as a vertex subgroup
/// transported by a witness word: the subgroup is
/// `witness·iota(vertex, subgrp)·witness⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESubgroup {
    pub vertex: usize,
    pub subgrp: Subgrp,
    pub witness: Word,
}

impl ESubgroup {
    /// The elements as ambient words.
    pub fn element_words(&self, g: &GraphOfGroups) -> Vec<Word> {
        let inv = g.inverse_word(&self.witness);
        self.subgrp
            .elements
            .iter()
            .map(|&x| {
                let w = Word::concat(&[&self.witness, &g.iota(self.vertex, x), &inv]);
                g.nf_to_word(&g.normal_form(&w).unwrap())
            })
            .collect()
    }
}

/// E_G(N_G(C)): the maximal finite subgroup normalized by the normalizer,
/// computed as the greatest fixpoint of conjugation-stability inside a
/// vertex group of the minimal subtree.
pub fn e_of(g: &GraphOfGroups, ninfo: &NormalizerInfo) -> Result<ESubgroup, AnalysisError> {
    if ninfo.kind != ElemKind::NonElementary {
        return Err(AnalysisError::NotNonElementary);
    }
    // Any finite subgroup normalized by N fixes the minimal subtree of N,
    // hence embeds into the base vertex group of the reduced presentation
    // (reduction never changes kept vertex groups or ids).
    let (r, _) = reduce(&ninfo.presentation)?;
    let n0 = r.base_vertex();
    let words = &ninfo.embedding.vertex_images[&n0];
    let mut alive: Vec<bool> = vec![true; words.len()];
    loop {
        let mut changed = false;
        for x in 0..words.len() {
            if !alive[x] {
                continue;
            }
            'gens: for gen in &ninfo.generators {
                let conj = Word::concat(&[gen, &words[x], &g.inverse_word(gen)]);
                for (x2, w2) in words.iter().enumerate() {
                    if alive[x2] && g.equal_words(&conj, w2)? {
                        continue 'gens;
                    }
                }
                alive[x] = false;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    let node = &ninfo.nodes[n0];
    let mut elements: Vec<usize> = (0..words.len())
        .filter(|&x| alive[x])
        .map(|x| node.back[x])
        .collect();
    elements.sort_unstable();
    Ok(ESubgroup {
        vertex: node.vertex,
        subgrp: Subgrp { elements },
        witness: node.witness.clone(),
    })
}

/// True iff the element acts hyperbolically on the Bass–Serre tree
/// (equivalently, has infinite order). Exact: an elliptic isometry never
/// moves the base point farther after squaring, a hyperbolic one always
/// does.
pub fn is_hyperbolic(g: &GraphOfGroups, w: &Word) -> Result<bool, GogError> {
    let n1 = g.normal_form(w)?;
    if n1.steps.is_empty() {
        return Ok(false);
    }
    let n2 = g.normal_form(&Word::concat(&[w, w]))?;
    Ok(n2.steps.len() > n1.steps.len())
}

/// w^n by repeated squaring over normal forms, with a token budget.
pub fn word_pow(g: &GraphOfGroups, w: &Word, mut n: u128) -> Result<Word, AnalysisError> {
    let mut base = g.nf_to_word(&g.normal_form(w)?);
    let mut acc = Word::empty();
    while n > 0 {
        if n & 1 == 1 {
            acc = g.nf_to_word(&g.normal_form(&Word::concat(&[&acc, &base]))?);
        }
        n >>= 1;
        if n > 0 {
            base = g.nf_to_word(&g.normal_form(&Word::concat(&[&base, &base]))?);
        }
        if acc.0.len() > POWER_TOKEN_BUDGET || base.0.len() > POWER_TOKEN_BUDGET {
            return Err(AnalysisError::BudgetExceeded {
                what: format!("word power exceeds {POWER_TOKEN_BUDGET} tokens"),
            });
        }
    }
    Ok(acc)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

/// Membership in M(h), the maximal virtually cyclic subgroup containing the
/// hyperbolic element h: x ∈ M(h) iff [h^{K!}, x·h^{K!}·x⁻¹] = 1.
pub fn m_membership(
    g: &GraphOfGroups,
    h: &Word,
    x: &Word,
) -> Result<bool, AnalysisError> {
    if !is_hyperbolic(g, h)? {
        return Err(AnalysisError::EllipticElement);
    }
    let k = g.k_of();
    let hk = word_pow(g, h, factorial(k))?;
    let hk_inv = g.inverse_word(&hk);
    let x_inv = g.inverse_word(x);
    let y = g.nf_to_word(&g.normal_form(&Word::concat(&[x, &hk, &x_inv]))?);
    let y_inv = g.inverse_word(&y);
    let comm = Word::concat(&[&hk_inv, &y_inv, &hk, &y]);
    Ok(g.normal_form(&comm)?.is_identity())
}

/// A chain: hyperbolic elements of N_G(C) whose M-intersections strictly
/// decrease, with a flag set when the final intersection provably equals
/// E_G(N_G(C)) on the search ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub elements: Vec<Word>,
    pub certified_maximal: bool,
}

/// Greedily extend a chain inside N_G(C), testing intersections against the
/// embedded ball of the normalizer presentation of radius `budget`.
pub fn find_chain(
    g: &GraphOfGroups,
    ninfo: &NormalizerInfo,
    budget: usize,
) -> Result<Chain, AnalysisError> {
    if ninfo.kind != ElemKind::NonElementary {
        return Err(AnalysisError::NotNonElementary);
    }
    let e = e_of(g, ninfo)?;
    let e_words = e.element_words(g);
    let pres = &ninfo.presentation;
    let ball = pres.ball_with_max(budget, budget)?;
    let mut test: Vec<Word> = Vec::new();
    for nf in &ball {
        let w = pres.nf_to_word(nf);
        test.push(ninfo.embedding.apply(pres, g, &w)?);
    }
    let in_e = |w: &Word| -> Result<bool, AnalysisError> {
        for ew in &e_words {
            if g.equal_words(w, ew)? {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let mut candidates: Vec<Word> = Vec::new();
    for w in &test {
        if is_hyperbolic(g, w)? {
            candidates.push(w.clone());
        }
    }
    candidates.sort_by_key(|w| w.0.len());
    let mut alive: Vec<usize> = (0..test.len()).collect();
    let mut elements: Vec<Word> = Vec::new();
    for h in &candidates {
        let mut keep = Vec::new();
        for &x in &alive {
            if m_membership(g, h, &test[x])? {
                keep.push(x);
            }
        }
        if keep.len() < alive.len() {
            alive = keep;
            elements.push(h.clone());
        }
        let mut done = true;
        for &x in &alive {
            if !in_e(&test[x])? {
                done = false;
                break;
            }
        }
        if done {
            return Ok(Chain {
                elements,
                certified_maximal: true,
            });
        }
    }
    Ok(Chain {
        elements,
        certified_maximal: false,
    })
}

/// The subgroup of Aut(C) realized by conjugation in the normalizer.
pub fn realized_automorphisms(
    g: &GraphOfGroups,
    ninfo: &NormalizerInfo,
) -> Result<usize, AnalysisError> {
    let class = &ninfo.class;
    let words: Vec<Word> = class
        .rep
        .elements
        .iter()
        .map(|&x| g.iota(class.vertex, x))
        .collect();
    let n = words.len();
    let mut perms: BTreeSet<Vec<usize>> = BTreeSet::new();
    perms.insert((0..n).collect());
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for gen in &ninfo.generators {
        let gen_inv = g.inverse_word(gen);
        let mut p = vec![usize::MAX; n];
        for (i, w) in words.iter().enumerate() {
            let conj = Word::concat(&[gen, w, &gen_inv]);
            let mut hit = None;
            for (j, w2) in words.iter().enumerate() {
                if g.equal_words(&conj, w2)? {
                    hit = Some(j);
                    break;
                }
            }
            p[i] = hit.expect("normalizer generators preserve the class representative");
        }
        if perms.insert(p.clone()) {
            frontier.push(p);
        }
    }
    // Close under composition.
    while let Some(p) = frontier.pop() {
        let existing: Vec<Vec<usize>> = perms.iter().cloned().collect();
        for q in existing {
            for comp in [
                p.iter().map(|&i| q[i]).collect::<Vec<usize>>(),
                q.iter().map(|&i| p[i]).collect::<Vec<usize>>(),
            ] {
                if perms.insert(comp.clone()) {
                    frontier.push(comp);
                }
            }
        }
    }
    Ok(perms.len())
}

/// The five counting invariants plus K and the class profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub k: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub n5: usize,
    /// Multiset of (class order, normalizer kind), sorted.
    pub profile: Vec<(usize, ElemKind)>,
}

/// Compute the invariant vector of a graph of groups.
pub fn invariants(g: &GraphOfGroups) -> Result<InvariantVector, AnalysisError> {
    let table = class_table(g);
    let mut out = InvariantVector {
        k: g.k_of(),
        n1: table.classes.len(),
        n2: 0,
        n3: 0,
        n4: 0,
        n5: 0,
        profile: Vec::new(),
    };
    for class in &table.classes {
        let ninfo = normalizer(g, &table, class.id);
        out.profile.push((class.order, ninfo.kind));
        out.n2 += realized_automorphisms(g, &ninfo)?;
        match ninfo.kind {
            ElemKind::VCCyclic | ElemKind::VCDihedral => out.n3 += 1,
            ElemKind::NonElementary => {
                out.n4 += 1;
                let e = e_of(g, &ninfo)?;
                if e.subgrp.order() != class.order {
                    out.n5 += 1;
                }
            }
            ElemKind::Finite => {}
        }
    }
    out.profile.sort();
    Ok(out)
}
