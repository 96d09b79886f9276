//! Graph-of-groups core: the data model for virtually free groups,
//! Bass–Serre normal forms, the word problem, growth balls and K_G.
//!
//! A [`GraphOfGroups`] is a finite connected graph with a finite group on
//! every vertex and edge, and injective homomorphisms from each edge group
//! into its two endpoint groups. Its fundamental group (loops at the
//! lexicographically minimal vertex) is finitely generated virtually free,
//! and every finitely generated virtually free group arises this way.
//!
//! Elements are [`Word`]s: alternating vertex-group elements and edge
//! traversals, read left to right as a path starting and ending at the base
//! vertex. The traversal `EdgeStep(e, Plus)` departs the edge's `to` vertex
//! and arrives at its `from` vertex, so that the Bass–Serre relation reads
//! `e+ · inj_from(c) · e− = inj_to(c)` for every edge-group element `c`.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::fingrp::{FinGroup, GrpHom, Subgrp};

/// Default maximum radius accepted by [`GraphOfGroups::ball`].
pub const DEFAULT_MAX_RADIUS: usize = 8;

/// Errors from validation and the word problem.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GogError {
    /// A vertex is not connected to the base vertex.
    #[error("vertex {vertex} is not connected to the base vertex")]
    Disconnected { vertex: usize },
    /// An edge map is not an injective homomorphism into the vertex group.
    #[error("edge {edge}: edge map into vertex group is not an injective homomorphism")]
    NonInjectiveEdgeMap { edge: usize },
    /// A coset transversal failed its self-check.
    #[error("edge {edge}: transversal inconsistent with the edge-group image")]
    BadTransversal { edge: usize },
    /// A word is not a valid loop at the base vertex.
    #[error("malformed word: {reason}")]
    MalformedWord { reason: String },
    /// A ball radius beyond the configured maximum was requested.
    #[error("ball radius {requested} exceeds the configured maximum {max}")]
    BudgetExceeded { requested: usize, max: usize },
}

/// The two ends of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    From,
    To,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::From => End::To,
            End::To => End::From,
        }
    }
}

/// Traversal direction of an edge step. `Plus` departs the `to` vertex and
/// arrives at the `from` vertex; `Minus` is the reverse traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    Plus,
    Minus,
}

impl Dir {
    pub fn opposite(self) -> Dir {
        match self {
            Dir::Plus => Dir::Minus,
            Dir::Minus => Dir::Plus,
        }
    }

    /// The end of the edge this traversal departs from.
    pub fn departure(self) -> End {
        match self {
            Dir::Plus => End::To,
            Dir::Minus => End::From,
        }
    }

    /// The end of the edge this traversal arrives at.
    pub fn arrival(self) -> End {
        self.departure().opposite()
    }
}

/// An edge of a graph of groups, with its group and the two injections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub group: FinGroup,
    pub from: usize,
    pub to: usize,
    pub inj_from: GrpHom,
    pub inj_to: GrpHom,
}

impl Edge {
    pub fn endpoint(&self, end: End) -> usize {
        match end {
            End::From => self.from,
            End::To => self.to,
        }
    }

    pub fn inj(&self, end: End) -> &GrpHom {
        match end {
            End::From => &self.inj_from,
            End::To => &self.inj_to,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// A single token of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Token {
    /// An element of a vertex group, given by (vertex id, element index).
    VertexElt(usize, usize),
    /// A traversal of an edge.
    EdgeStep(usize, Dir),
}

/// A word: a token path that starts and ends at the base vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Token>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(parts: &[&Word]) -> Word {
        let mut tokens = Vec::new();
        for p in parts {
            tokens.extend_from_slice(&p.0);
        }
        Word(tokens)
    }
}

/// One reduced step of a normal form: a left-coset representative in the
/// departure vertex group, followed by an edge traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NfStep {
    pub rep: usize,
    pub edge: usize,
    pub dir: Dir,
}

/// The Bass–Serre normal form of a word: reduced steps followed by a tail
/// element of the base vertex group. Two words represent the same group
/// element iff their normal forms are identical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub base: usize,
    pub steps: Vec<NfStep>,
    pub tail: usize,
}

impl NormalForm {
    /// True iff this is the identity element.
    pub fn is_identity(&self) -> bool {
        self.steps.is_empty() && self.tail == 0
    }

    /// Number of edge traversals (the "syllable length" over the tree).
    pub fn edge_len(&self) -> usize {
        self.steps.len()
    }
}

/// Per-edge-end derived data: the transversal and factorization tables.
#[derive(Debug, Clone)]
struct EndData {
    /// Coset representatives, ascending by element index (identity first).
    reps: Vec<usize>,
    /// For each vertex-group element x, the representative of the coset x·H.
    coset_rep: Vec<usize>,
    /// For each vertex-group element, its preimage in the edge group if it
    /// lies in the image of the injection.
    preimage: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
struct Derived {
    base: usize,
    tree: BTreeSet<usize>,
    /// Token path from the base vertex to each vertex along the tree.
    tree_paths: BTreeMap<usize, Vec<Token>>,
    ends: HashMap<(usize, End), EndData>,
}

/// A finite graph of finite groups. Immutable after [`validate`]; all
/// word-problem operations are pure.
///
/// [`validate`]: GraphOfGroups::validate
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphOfGroups {
    pub vertices: BTreeMap<usize, FinGroup>,
    pub edges: Vec<Edge>,
    #[serde(skip)]
    derived: OnceCell<Derived>,
}

impl PartialEq for GraphOfGroups {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for GraphOfGroups {}

impl GraphOfGroups {
    pub fn new(vertices: BTreeMap<usize, FinGroup>, edges: Vec<Edge>) -> GraphOfGroups {
        GraphOfGroups {
            vertices,
            edges,
            derived: OnceCell::new(),
        }
    }

    /// Check all structural invariants; on success, compute and cache the
    /// spanning tree, tree paths and coset transversals.
    pub fn validate(&self) -> Result<(), Vec<GogError>> {
        let mut errs = Vec::new();
        if self.vertices.is_empty() {
            errs.push(GogError::Disconnected { vertex: 0 });
            return Err(errs);
        }
        for e in &self.edges {
            let ok = match (self.vertices.get(&e.from), self.vertices.get(&e.to)) {
                (Some(gf), Some(gt)) => {
                    check_injection(&e.group, gf, &e.inj_from)
                        && check_injection(&e.group, gt, &e.inj_to)
                }
                _ => false,
            };
            if !ok {
                errs.push(GogError::NonInjectiveEdgeMap { edge: e.id });
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        // Spanning tree: Kruskal over ascending edge ids (lexicographically
        // minimal edge-id subset).
        let vertex_ids: Vec<usize> = self.vertices.keys().copied().collect();
        let vpos: HashMap<usize, usize> =
            vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..vertex_ids.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut edges_sorted: Vec<&Edge> = self.edges.iter().collect();
        edges_sorted.sort_by_key(|e| e.id);
        let mut tree = BTreeSet::new();
        for e in edges_sorted {
            if e.is_loop() {
                continue;
            }
            let (a, b) = (
                find(&mut parent, vpos[&e.from]),
                find(&mut parent, vpos[&e.to]),
            );
            if a != b {
                parent[a] = b;
                tree.insert(e.id);
            }
        }
        let base = *self.vertices.keys().min().unwrap();
        let root = find(&mut parent, vpos[&base]);
        for &v in &vertex_ids {
            if find(&mut parent, vpos[&v]) != root {
                errs.push(GogError::Disconnected { vertex: v });
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        // Tree paths by BFS from the base along tree edges.
        let mut tree_paths: BTreeMap<usize, Vec<Token>> = BTreeMap::new();
        tree_paths.insert(base, Vec::new());
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for e in &self.edges {
                if !tree.contains(&e.id) {
                    continue;
                }
                for dir in [Dir::Plus, Dir::Minus] {
                    if e.endpoint(dir.departure()) == u {
                        let w = e.endpoint(dir.arrival());
                        if !tree_paths.contains_key(&w) {
                            let mut path = tree_paths[&u].clone();
                            path.push(Token::EdgeStep(e.id, dir));
                            tree_paths.insert(w, path);
                            queue.push_back(w);
                        }
                    }
                }
            }
        }

        // Transversals: minimal-element left-coset representatives at each
        // edge end, plus factorization tables for normal forms.
        let mut ends = HashMap::new();
        for e in &self.edges {
            for end in [End::From, End::To] {
                let gv = &self.vertices[&e.endpoint(end)];
                let inj = e.inj(end);
                let image: Vec<usize> = (0..e.group.order()).map(|c| inj.apply(c)).collect();
                let image_set: HashSet<usize> = image.iter().copied().collect();
                let mut preimage = vec![None; gv.order()];
                for (c, &x) in image.iter().enumerate() {
                    preimage[x] = Some(c);
                }
                let mut coset_rep = vec![usize::MAX; gv.order()];
                let mut reps = Vec::new();
                for x in 0..gv.order() {
                    if coset_rep[x] != usize::MAX {
                        continue;
                    }
                    // x is the minimal element of its coset x·H.
                    reps.push(x);
                    for &h in &image_set {
                        coset_rep[gv.mul(x, h)] = x;
                    }
                }
                // Self-check: index formula and identity-first ordering.
                if reps.len() * image.len() != gv.order() || reps[0] != gv.identity() {
                    errs.push(GogError::BadTransversal { edge: e.id });
                }
                ends.insert(
                    (e.id, end),
                    EndData {
                        reps,
                        coset_rep,
                        preimage,
                    },
                );
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }

        let _ = self.derived.set(Derived {
            base,
            tree,
            tree_paths,
            ends,
        });
        Ok(())
    }

    fn derived(&self) -> &Derived {
        if self.derived.get().is_none() {
            self.validate().expect("graph of groups failed validation");
        }
        self.derived.get().unwrap()
    }

    /// The base vertex: the lexicographically minimal vertex id.
    pub fn base_vertex(&self) -> usize {
        self.derived().base
    }

    /// Edge ids of the lexicographically minimal spanning tree.
    pub fn spanning_tree(&self) -> &BTreeSet<usize> {
        &self.derived().tree
    }

    pub fn vertex_group(&self, v: usize) -> &FinGroup {
        &self.vertices[&v]
    }

    pub fn edge(&self, id: usize) -> &Edge {
        self.edges.iter().find(|e| e.id == id).expect("unknown edge id")
    }

    /// The transversal (coset representatives, identity first) at an edge end.
    pub fn transversal(&self, edge: usize, end: End) -> &[usize] {
        &self.derived().ends[&(edge, end)].reps
    }

    /// The image of the edge group at one end, as a subgroup of the vertex group.
    pub fn edge_image(&self, edge: usize, end: End) -> Subgrp {
        let e = self.edge(edge);
        let mut elements: Vec<usize> = (0..e.group.order()).map(|c| e.inj(end).apply(c)).collect();
        elements.sort_unstable();
        Subgrp { elements }
    }

    /// Token path from the base vertex to `v` along the spanning tree.
    pub fn tree_path(&self, v: usize) -> Word {
        Word(self.derived().tree_paths[&v].clone())
    }

    /// The loop `treepath(v) · x · treepath(v)⁻¹` embedding a vertex-group
    /// element into the fundamental group at the base vertex.
    pub fn iota(&self, v: usize, x: usize) -> Word {
        let path = self.tree_path(v);
        Word::concat(&[
            &path,
            &Word(vec![Token::VertexElt(v, x)]),
            &self.inverse_word(&path),
        ])
    }

    /// The loop `treepath(dep) · e^dir · treepath(arr)⁻¹` for one edge
    /// traversal. For tree edges this is the identity element.
    pub fn lambda(&self, edge: usize, dir: Dir) -> Word {
        let e = self.edge(edge);
        let dep = self.tree_path(e.endpoint(dir.departure()));
        let arr = self.tree_path(e.endpoint(dir.arrival()));
        Word::concat(&[&dep, &Word(vec![Token::EdgeStep(edge, dir)]), &self.inverse_word(&arr)])
    }

    /// Invert a word: reverse it, inverting vertex elements and flipping
    /// edge-step directions.
    pub fn inverse_word(&self, w: &Word) -> Word {
        let mut tokens = Vec::with_capacity(w.0.len());
        for t in w.0.iter().rev() {
            tokens.push(match *t {
                Token::VertexElt(v, x) => Token::VertexElt(v, self.vertices[&v].inv(x)),
                Token::EdgeStep(e, d) => Token::EdgeStep(e, d.opposite()),
            });
        }
        Word(tokens)
    }

    /// Bass–Serre normal form of a loop at the base vertex.
    pub fn normal_form(&self, w: &Word) -> Result<NormalForm, GogError> {
        let d = self.derived();
        let base = d.base;
        let mut at = base;
        let mut steps: Vec<NfStep> = Vec::new();
        // Pending vertex-group element at the current vertex.
        let mut cur = self.vertices[&base].identity();
        for t in &w.0 {
            match *t {
                Token::VertexElt(v, x) => {
                    if v != at {
                        return Err(GogError::MalformedWord {
                            reason: format!("vertex element at {v} while the path is at {at}"),
                        });
                    }
                    let gv = &self.vertices[&v];
                    if x >= gv.order() {
                        return Err(GogError::MalformedWord {
                            reason: format!("element index {x} out of range at vertex {v}"),
                        });
                    }
                    cur = gv.mul(cur, x);
                }
                Token::EdgeStep(eid, dir) => {
                    let Some(e) = self.edges.iter().find(|e| e.id == eid) else {
                        return Err(GogError::MalformedWord {
                            reason: format!("unknown edge id {eid}"),
                        });
                    };
                    let dep_end = dir.departure();
                    let (u, v) = (e.endpoint(dep_end), e.endpoint(dir.arrival()));
                    if u != at {
                        return Err(GogError::MalformedWord {
                            reason: format!("edge {eid} departs {u} but the path is at {at}"),
                        });
                    }
                    // Factor cur = rep · inj_dep(c), carry c across the edge:
                    // cur · e^dir = rep · e^dir · inj_arr(c).
                    let end_data = &d.ends[&(eid, dep_end)];
                    let gu = &self.vertices[&u];
                    let rep = end_data.coset_rep[cur];
                    let h = gu.mul(gu.inv(rep), cur);
                    let c = end_data.preimage[h].expect("coset factorization");
                    let inj_arr = e.inj(dir.arrival());
                    let mut new_cur = inj_arr.apply(c);
                    if rep == gu.identity() {
                        if let Some(last) = steps.last() {
                            if last.edge == eid && last.dir == dir.opposite() {
                                // Pinch: e^d̄ · inj_dep(c) · e^d collapses.
                                let prev = steps.pop().unwrap();
                                new_cur = self.vertices[&v].mul(prev.rep, new_cur);
                                at = v;
                                cur = new_cur;
                                continue;
                            }
                        }
                    }
                    steps.push(NfStep {
                        rep,
                        edge: eid,
                        dir,
                    });
                    at = v;
                    cur = new_cur;
                }
            }
        }
        if at != base {
            return Err(GogError::MalformedWord {
                reason: format!("path ends at vertex {at}, not the base vertex {base}"),
            });
        }
        Ok(NormalForm {
            base,
            steps,
            tail: cur,
        })
    }

    /// Re-materialize a normal form as a word.
    pub fn nf_to_word(&self, nf: &NormalForm) -> Word {
        let mut tokens = Vec::new();
        let mut at = nf.base;
        for s in &nf.steps {
            if s.rep != self.vertices[&at].identity() {
                tokens.push(Token::VertexElt(at, s.rep));
            }
            tokens.push(Token::EdgeStep(s.edge, s.dir));
            at = self.edge(s.edge).endpoint(s.dir.arrival());
        }
        if nf.tail != self.vertices[&at].identity() {
            tokens.push(Token::VertexElt(at, nf.tail));
        }
        Word(tokens)
    }

    /// True iff the two words represent the same group element.
    pub fn equal_words(&self, w1: &Word, w2: &Word) -> Result<bool, GogError> {
        let prod = Word::concat(&[w1, &self.inverse_word(w2)]);
        Ok(self.normal_form(&prod)?.is_identity())
    }

    /// The maximal order of a finite subgroup: finite subgroups are elliptic,
    /// so this is the maximal vertex-group order.
    pub fn k_of(&self) -> usize {
        self.vertices.values().map(|g| g.order()).max().unwrap_or(1)
    }

    /// The standard generating set of the fundamental group: all nontrivial
    /// vertex-group elements (conjugated to the base by tree paths) and all
    /// edge loops.
    pub fn generators(&self) -> Vec<Word> {
        let mut gens = Vec::new();
        for (&v, gv) in &self.vertices {
            for x in 1..gv.order() {
                gens.push(self.iota(v, x));
            }
        }
        for e in &self.edges {
            if !self.spanning_tree().contains(&e.id) {
                gens.push(self.lambda(e.id, Dir::Plus));
                gens.push(self.lambda(e.id, Dir::Minus));
            }
        }
        gens
    }

    /// All distinct elements of word length ≤ `r` with respect to
    /// [`generators`](GraphOfGroups::generators), as sorted normal forms.
    pub fn ball(&self, r: usize) -> Result<Vec<NormalForm>, GogError> {
        self.ball_with_max(r, DEFAULT_MAX_RADIUS)
    }

    pub fn ball_with_max(&self, r: usize, max: usize) -> Result<Vec<NormalForm>, GogError> {
        if r > max {
            return Err(GogError::BudgetExceeded {
                requested: r,
                max,
            });
        }
        let gens = self.generators();
        let identity = self.normal_form(&Word::empty())?;
        let mut seen: HashSet<NormalForm> = HashSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        for _ in 0..r {
            let mut next = Vec::new();
            for nf in &frontier {
                let w = self.nf_to_word(nf);
                for gen in &gens {
                    let prod = Word::concat(&[&w, gen]);
                    let nf2 = self.normal_form(&prod)?;
                    if seen.insert(nf2.clone()) {
                        next.push(nf2);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<NormalForm> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// True iff the graph is a single vertex with no edges (so the
    /// fundamental group is that finite vertex group).
    pub fn is_single_vertex(&self) -> bool {
        self.vertices.len() == 1 && self.edges.is_empty()
    }

    /// Render the underlying graph as DOT, labelling vertices and edges with
    /// their group orders.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph gog {\n");
        for (&v, gv) in &self.vertices {
            out.push_str(&format!("  v{v} [label=\"|G|={}\"];\n", gv.order()));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  v{} -- v{} [label=\"e{}: {}\"];\n",
                e.from,
                e.to,
                e.id,
                e.group.order()
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// One standard generator of the fundamental group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gen {
    /// `iota(v, x)`: a vertex-group element conjugated to the base.
    Vertex(usize, usize),
    /// `lambda(e, dir)`: an edge loop.
    EdgeLoop(usize, Dir),
}

impl GraphOfGroups {
    /// Decompose a loop at the base vertex as a product of standard
    /// generators: inserting `treepath(u)⁻¹·treepath(u)` between consecutive
    /// tokens telescopes the path into iota- and lambda-factors.
    pub fn decompose_loop(&self, w: &Word) -> Result<Vec<Gen>, GogError> {
        // Validate the path (and fail early on malformed words).
        self.normal_form(w)?;
        let mut gens = Vec::new();
        for t in &w.0 {
            match *t {
                Token::VertexElt(v, x) => {
                    if x != self.vertices[&v].identity() {
                        gens.push(Gen::Vertex(v, x));
                    }
                }
                Token::EdgeStep(e, d) => gens.push(Gen::EdgeLoop(e, d)),
            }
        }
        Ok(gens)
    }
}

/// A homomorphism between the fundamental groups of two graphs of groups,
/// given by images (words in the target) of the source's standard
/// generators. `edge_images[e]` is the image of `lambda(e, Plus)`; the
/// minus loop maps to its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoGHom {
    pub vertex_images: BTreeMap<usize, Vec<Word>>,
    pub edge_images: BTreeMap<usize, Word>,
}

impl GoGHom {
    /// The identity endomorphism of a graph of groups.
    pub fn identity_hom(g: &GraphOfGroups) -> GoGHom {
        let vertex_images = g
            .vertices
            .iter()
            .map(|(&v, gv)| (v, (0..gv.order()).map(|x| g.iota(v, x)).collect()))
            .collect();
        let edge_images = g
            .edges
            .iter()
            .map(|e| (e.id, g.lambda(e.id, Dir::Plus)))
            .collect();
        GoGHom {
            vertex_images,
            edge_images,
        }
    }

    /// Image of a source loop, returned in normal-form word shape.
    pub fn apply(
        &self,
        src: &GraphOfGroups,
        tgt: &GraphOfGroups,
        w: &Word,
    ) -> Result<Word, GogError> {
        let mut parts: Vec<Word> = Vec::new();
        for gen in src.decompose_loop(w)? {
            match gen {
                Gen::Vertex(v, x) => parts.push(self.vertex_images[&v][x].clone()),
                Gen::EdgeLoop(e, Dir::Plus) => parts.push(self.edge_images[&e].clone()),
                Gen::EdgeLoop(e, Dir::Minus) => {
                    parts.push(tgt.inverse_word(&self.edge_images[&e]))
                }
            }
        }
        let refs: Vec<&Word> = parts.iter().collect();
        let img = Word::concat(&refs);
        Ok(tgt.nf_to_word(&tgt.normal_form(&img)?))
    }

    /// Check that the images satisfy all defining relations of the source
    /// fundamental group, so the data defines a homomorphism.
    pub fn verify(&self, src: &GraphOfGroups, tgt: &GraphOfGroups) -> bool {
        for (&v, gv) in &src.vertices {
            let Some(imgs) = self.vertex_images.get(&v) else {
                return false;
            };
            if imgs.len() != gv.order() {
                return false;
            }
            for x in 0..gv.order() {
                for y in 0..gv.order() {
                    let lhs = Word::concat(&[&imgs[x], &imgs[y]]);
                    match tgt.equal_words(&lhs, &imgs[gv.mul(x, y)]) {
                        Ok(true) => {}
                        _ => return false,
                    }
                }
            }
        }
        for e in &src.edges {
            let Some(lam) = self.edge_images.get(&e.id) else {
                return false;
            };
            let lam_inv = tgt.inverse_word(lam);
            for c in 0..e.group.order() {
                let from_img = &self.vertex_images[&e.from][e.inj_from.apply(c)];
                let to_img = &self.vertex_images[&e.to][e.inj_to.apply(c)];
                let lhs = Word::concat(&[lam, from_img, &lam_inv]);
                match tgt.equal_words(&lhs, to_img) {
                    Ok(true) => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Compose `self: src→mid` with `other: mid→tgt`.
    pub fn compose(
        &self,
        src: &GraphOfGroups,
        mid: &GraphOfGroups,
        tgt: &GraphOfGroups,
        other: &GoGHom,
    ) -> Result<GoGHom, GogError> {
        let _ = src;
        let mut vertex_images = BTreeMap::new();
        for (&v, imgs) in &self.vertex_images {
            let mut out = Vec::with_capacity(imgs.len());
            for w in imgs {
                out.push(other.apply(mid, tgt, w)?);
            }
            vertex_images.insert(v, out);
        }
        let mut edge_images = BTreeMap::new();
        for (&e, w) in &self.edge_images {
            edge_images.insert(e, other.apply(mid, tgt, w)?);
        }
        Ok(GoGHom {
            vertex_images,
            edge_images,
        })
    }
}

fn check_injection(src: &FinGroup, tgt: &FinGroup, hom: &GrpHom) -> bool {
    if hom.images.len() != src.order() {
        return false;
    }
    if hom.images.iter().any(|&x| x >= tgt.order()) {
        return false;
    }
    // Homomorphism on all pairs, and injective.
    for a in 0..src.order() {
        for b in 0..src.order() {
            if hom.images[src.mul(a, b)] != tgt.mul(hom.images[a], hom.images[b]) {
                return false;
            }
        }
    }
    let set: HashSet<usize> = hom.images.iter().copied().collect();
    set.len() == src.order()
}
