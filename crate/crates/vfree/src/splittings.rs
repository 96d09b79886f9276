//! Operations on splittings: reduction, m-JSJ collapse, m(G), slide moves,
//! cylinder decompositions, and the tree of cylinders.
//!
//! Every transformation that preserves the fundamental group returns a
//! [`GoGHom`] word-translation witness alongside the new graph, so that the
//! preservation claim is machine-checkable via [`GoGHom::verify`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::analysis::{class_table, normalizer, ElemKind, NormalizerInfo};
use crate::fingrp::{FinGroup, GrpHom, Subgrp};
use crate::gog::{Dir, Edge, End, GoGHom, GogError, GraphOfGroups, Token, Word};

/// Errors specific to splitting operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    /// Cylinder decompositions require all edge groups of equal order.
    #[error("edge groups have mixed orders {orders:?}; cylinders need a uniform order")]
    MixedEdgeOrders { orders: Vec<usize> },
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// Direction-respecting end data for an edge: which end of `edge` departs.
fn dir_departing(end: End) -> Dir {
    match end {
        End::To => Dir::Plus,
        End::From => Dir::Minus,
    }
}

/// Collapse a non-loop edge whose injection at `onto_end` is surjective,
/// keeping the vertex at the opposite end. Returns the collapsed graph and
/// the translation of the old fundamental group onto the new one.
fn collapse_edge(
    g: &GraphOfGroups,
    eid: usize,
    onto_end: End,
) -> Result<(GraphOfGroups, GoGHom), GogError> {
    let e = g.edge(eid).clone();
    let keep_end = onto_end.opposite();
    let v = e.endpoint(keep_end); // kept vertex
    let w = e.endpoint(onto_end); // deleted vertex
    assert_ne!(v, w, "cannot collapse a loop");
    let gw = g.vertex_group(w).clone();

    // phi: G_w -> G_v through the edge group (inj at onto_end is bijective).
    let inj_w = e.inj(onto_end);
    let inj_v = e.inj(keep_end);
    let mut pre_w = vec![usize::MAX; gw.order()];
    for c in 0..e.group.order() {
        pre_w[inj_w.apply(c)] = c;
    }
    let phi: Vec<usize> = (0..gw.order()).map(|y| inj_v.apply(pre_w[y])).collect();

    let mut vertices = g.vertices.clone();
    vertices.remove(&w);
    let mut edges = Vec::new();
    for f in &g.edges {
        if f.id == eid {
            continue;
        }
        let mut nf = f.clone();
        if nf.from == w {
            nf.from = v;
            nf.inj_from = GrpHom {
                images: nf.inj_from.images.iter().map(|&y| phi[y]).collect(),
            };
        }
        if nf.to == w {
            nf.to = v;
            nf.inj_to = GrpHom {
                images: nf.inj_to.images.iter().map(|&y| phi[y]).collect(),
            };
        }
        edges.push(nf);
    }
    let new_g = GraphOfGroups::new(vertices, edges);
    new_g.validate().map_err(|mut es| es.remove(0))?;

    let translate = |tok: &Token| -> Vec<Token> {
        match *tok {
            Token::VertexElt(u, x) if u == w => vec![Token::VertexElt(v, phi[x])],
            Token::EdgeStep(f, _) if f == eid => vec![],
            t => vec![t],
        }
    };
    let rename = |u: usize| if u == w { v } else { u };
    let hom = hom_from_token_map(g, &new_g, &translate, &rename)?;
    Ok((new_g, hom))
}

/// Build the translation homomorphism induced by a token-level rewriting of
/// paths. `rename` maps old vertex ids to the vertices the rewritten paths
/// visit, so loops can be re-based onto the new base vertex.
fn hom_from_token_map(
    old: &GraphOfGroups,
    new: &GraphOfGroups,
    translate: &dyn Fn(&Token) -> Vec<Token>,
    rename: &dyn Fn(usize) -> usize,
) -> Result<GoGHom, GogError> {
    let re_base = |w: &Word, at: usize| -> Result<Word, GogError> {
        let mut tokens: Vec<Token> = Vec::new();
        for t in &w.0 {
            tokens.extend(translate(t));
        }
        let tp = new.tree_path(rename(at));
        let loop_w = Word::concat(&[&tp, &Word(tokens), &new.inverse_word(&tp)]);
        Ok(new.nf_to_word(&new.normal_form(&loop_w)?))
    };
    let b = old.base_vertex();
    let mut vertex_images = BTreeMap::new();
    for (&u, gu) in &old.vertices {
        let mut imgs = Vec::with_capacity(gu.order());
        for x in 0..gu.order() {
            imgs.push(re_base(&old.iota(u, x), b)?);
        }
        vertex_images.insert(u, imgs);
    }
    let mut edge_images = BTreeMap::new();
    for e in &old.edges {
        edge_images.insert(e.id, re_base(&old.lambda(e.id, Dir::Plus), b)?);
    }
    Ok(GoGHom {
        vertex_images,
        edge_images,
    })
}

/// Find a collapsible edge: a non-loop edge with a surjective injection.
fn find_collapsible(g: &GraphOfGroups) -> Option<(usize, End)> {
    let mut ids: Vec<usize> = g.edges.iter().map(|e| e.id).collect();
    ids.sort_unstable();
    for id in ids {
        let e = g.edge(id);
        if e.is_loop() {
            continue;
        }
        for end in [End::From, End::To] {
            if e.group.order() == g.vertex_group(e.endpoint(end)).order() {
                return Some((id, end));
            }
        }
    }
    None
}

/// True iff no non-loop edge injection is onto its vertex group.
pub fn is_reduced(g: &GraphOfGroups) -> bool {
    find_collapsible(g).is_none()
}

/// Iteratively collapse non-loop edges whose edge map is onto an endpoint
/// group. The fundamental group is unchanged; the returned [`GoGHom`]
/// translates old loops into the reduced graph.
pub fn reduce(g: &GraphOfGroups) -> Result<(GraphOfGroups, GoGHom), GogError> {
    g.validate().map_err(|mut es| es.remove(0))?;
    let mut cur = g.clone();
    let mut hom = GoGHom::identity_hom(g);
    while let Some((eid, end)) = find_collapsible(&cur) {
        let (next, step) = collapse_edge(&cur, eid, end)?;
        hom = hom.compose(g, &cur, &next, &step)?;
        cur = next;
    }
    Ok((cur, hom))
}

/// The smallest order of an edge group in the reduced splitting; for a
/// finite fundamental group (single collapsed vertex) this is the group
/// order by convention.
pub fn m_of(g: &GraphOfGroups) -> Result<usize, GogError> {
    let (r, _) = reduce(g)?;
    if r.edges.is_empty() {
        return Ok(r.vertices.values().next().unwrap().order());
    }
    Ok(r.edges.iter().map(|e| e.group.order()).min().unwrap())
}

/// A vertex of an m-JSJ splitting: a finite vertex group, or an infinite
/// m-factor materialized as a nested graph of groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MJsjVertexGroup {
    Finite(FinGroup),
    Infinite(GraphOfGroups),
}

/// An edge of an m-JSJ splitting. Attachments name the original vertex
/// inside the (possibly nested) component that the injection targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MJsjEdge {
    pub id: usize,
    pub group: FinGroup,
    pub from: usize,
    pub from_vertex: usize,
    pub inj_from: GrpHom,
    pub to: usize,
    pub to_vertex: usize,
    pub inj_to: GrpHom,
}

/// The m-JSJ splitting: all edges of order > m collapsed into component
/// vertices, remaining edges of order ≤ m between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MJsjSplitting {
    /// Component id (= minimal original vertex id in the component) → group.
    pub vertices: BTreeMap<usize, MJsjVertexGroup>,
    pub edges: Vec<MJsjEdge>,
}

impl MJsjSplitting {
    /// If every vertex is finite, reconstruct a plain graph of groups.
    pub fn as_gog(&self) -> Option<GraphOfGroups> {
        let mut vertices = BTreeMap::new();
        for (&id, vg) in &self.vertices {
            match vg {
                MJsjVertexGroup::Finite(f) => {
                    vertices.insert(id, f.clone());
                }
                MJsjVertexGroup::Infinite(_) => return None,
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id,
                group: e.group.clone(),
                from: e.from,
                to: e.to,
                inj_from: e.inj_from.clone(),
                inj_to: e.inj_to.clone(),
            })
            .collect();
        Some(GraphOfGroups::new(vertices, edges))
    }
}

/// Collapse all edges whose group has order > m in the reduced splitting.
pub fn m_jsj(g: &GraphOfGroups, m: usize) -> Result<MJsjSplitting, GogError> {
    let (r, _) = reduce(g)?;
    r.validate().map_err(|mut es| es.remove(0))?;
    let collapse: Vec<&Edge> = r.edges.iter().filter(|e| e.group.order() > m).collect();
    let keep: Vec<&Edge> = r.edges.iter().filter(|e| e.group.order() <= m).collect();

    // Components of the subgraph spanned by the collapsed edges.
    let vids: Vec<usize> = r.vertices.keys().copied().collect();
    let vpos: HashMap<usize, usize> = vids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vids.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &collapse {
        let (a, b) = (find(&mut parent, vpos[&e.from]), find(&mut parent, vpos[&e.to]));
        if a != b {
            parent[a] = b;
        }
    }
    // Component id = minimal original vertex id in the component.
    let mut comp_id: HashMap<usize, usize> = HashMap::new();
    for &v in &vids {
        let root = find(&mut parent, vpos[&v]);
        let entry = comp_id.entry(root).or_insert(v);
        if v < *entry {
            *entry = v;
        }
    }
    let comp_of = |v: usize, parent: &mut Vec<usize>| -> usize {
        let root = find(parent, vpos[&v]);
        comp_id[&root]
    };

    let mut comp_vertices: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in &vids {
        comp_vertices
            .entry(comp_of(v, &mut parent))
            .or_default()
            .push(v);
    }
    let mut vertices = BTreeMap::new();
    for (&cid, members) in &comp_vertices {
        let internal: Vec<Edge> = collapse
            .iter()
            .filter(|e| comp_of(e.from, &mut parent) == cid)
            .map(|e| (*e).clone())
            .collect();
        if members.len() == 1 && internal.is_empty() {
            vertices.insert(cid, MJsjVertexGroup::Finite(r.vertex_group(members[0]).clone()));
        } else {
            let sub_vertices: BTreeMap<usize, FinGroup> = members
                .iter()
                .map(|&v| (v, r.vertex_group(v).clone()))
                .collect();
            vertices.insert(
                cid,
                MJsjVertexGroup::Infinite(GraphOfGroups::new(sub_vertices, internal)),
            );
        }
    }
    let edges = keep
        .iter()
        .map(|e| MJsjEdge {
            id: e.id,
            group: e.group.clone(),
            from: comp_of(e.from, &mut parent),
            from_vertex: e.from,
            inj_from: e.inj_from.clone(),
            to: comp_of(e.to, &mut parent),
            to_vertex: e.to,
            inj_to: e.inj_to.clone(),
        })
        .collect();
    Ok(MJsjSplitting { vertices, edges })
}

/// A slide of one edge end across an anchor edge end at a shared vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideMove {
    pub moved: usize,
    pub moved_end: End,
    pub anchor: usize,
    pub anchor_end: End,
    /// Element g of the shared vertex group with
    /// g⁻¹·Im(moved)·g ⊆ Im(anchor).
    pub conjugator: usize,
}

/// Apply a slide move, returning the slid (not yet re-reduced) graph and
/// the token-level translation witness.
fn apply_slide(
    g: &GraphOfGroups,
    mv: &SlideMove,
) -> Result<(GraphOfGroups, GoGHom), GogError> {
    let e = g.edge(mv.moved).clone();
    let f = g.edge(mv.anchor).clone();
    let u = e.endpoint(mv.moved_end);
    assert_eq!(u, f.endpoint(mv.anchor_end));
    let gu = g.vertex_group(u).clone();
    let x = f.endpoint(mv.anchor_end.opposite());

    // New injection at the moved end: conjugate into Im(anchor at u), pull
    // back through the anchor, push out at its far end.
    let inj_fu = f.inj(mv.anchor_end);
    let inj_fx = f.inj(mv.anchor_end.opposite());
    let mut pre_fu = vec![usize::MAX; gu.order()];
    for c in 0..f.group.order() {
        pre_fu[inj_fu.apply(c)] = c;
    }
    let ginv = gu.inv(mv.conjugator);
    let mut new_images = Vec::with_capacity(e.group.order());
    for c in 0..e.group.order() {
        let moved_img = gu.mul(gu.mul(ginv, e.inj(mv.moved_end).apply(c)), mv.conjugator);
        let cf = pre_fu[moved_img];
        if cf == usize::MAX {
            return Err(GogError::MalformedWord {
                reason: "slide conjugator does not carry the moved image into the anchor".into(),
            });
        }
        new_images.push(inj_fx.apply(cf));
    }
    let mut edges = g.edges.clone();
    let slot = edges.iter_mut().find(|h| h.id == e.id).unwrap();
    match mv.moved_end {
        End::From => {
            slot.from = x;
            slot.inj_from = GrpHom { images: new_images };
        }
        End::To => {
            slot.to = x;
            slot.inj_to = GrpHom { images: new_images };
        }
    }
    let new_g = GraphOfGroups::new(g.vertices.clone(), edges);
    new_g.validate().map_err(|mut es| es.remove(0))?;

    // Crossing the moved edge departing its moved end becomes:
    // conjugator at u, cross the anchor u→x, cross the slid edge from x.
    let dep_dir = dir_departing(mv.moved_end);
    let f_dir = dir_departing(mv.anchor_end);
    let forward = vec![
        Token::VertexElt(u, mv.conjugator),
        Token::EdgeStep(f.id, f_dir),
        Token::EdgeStep(e.id, dep_dir),
    ];
    let backward = vec![
        Token::EdgeStep(e.id, dep_dir.opposite()),
        Token::EdgeStep(f.id, f_dir.opposite()),
        Token::VertexElt(u, ginv),
    ];
    let translate = move |tok: &Token| -> Vec<Token> {
        match *tok {
            Token::EdgeStep(h, d) if h == e.id && d == dep_dir => forward.clone(),
            Token::EdgeStep(h, d) if h == e.id && d == dep_dir.opposite() => backward.clone(),
            t => vec![t],
        }
    };
    let hom = hom_from_token_map(g, &new_g, &translate, &|v| v)?;
    Ok((new_g, hom))
}

/// All applicable slide moves on a reduced graph, each with the resulting
/// re-reduced graph and its fundamental-group translation. Results equal to
/// the input graph are omitted, and distinct conjugators producing the same
/// graph are deduplicated.
pub fn slide_neighbors(
    g: &GraphOfGroups,
) -> Result<Vec<(SlideMove, GraphOfGroups, GoGHom)>, GogError> {
    g.validate().map_err(|mut es| es.remove(0))?;
    let mut out: Vec<(SlideMove, GraphOfGroups, GoGHom)> = Vec::new();
    for e in &g.edges {
        for moved_end in [End::From, End::To] {
            let u = e.endpoint(moved_end);
            let gu = g.vertex_group(u);
            let moved_img = g.edge_image(e.id, moved_end);
            for f in &g.edges {
                if f.id == e.id {
                    continue;
                }
                for anchor_end in [End::From, End::To] {
                    if f.endpoint(anchor_end) != u {
                        continue;
                    }
                    let anchor_img = g.edge_image(f.id, anchor_end);
                    for conj in 0..gu.order() {
                        let transported =
                            gu.conjugate_subgroup(&moved_img, gu.inv(conj));
                        if !transported
                            .elements
                            .iter()
                            .all(|&z| anchor_img.contains(z))
                        {
                            continue;
                        }
                        let mv = SlideMove {
                            moved: e.id,
                            moved_end,
                            anchor: f.id,
                            anchor_end,
                            conjugator: conj,
                        };
                        let (slid, hom) = apply_slide(g, &mv)?;
                        let (red, red_hom) = reduce(&slid)?;
                        // Keep one witness per (ends, result): different
                        // conjugators with the same outcome are redundant.
                        if out.iter().any(|(m, h, _)| {
                            (m.moved, m.moved_end, m.anchor, m.anchor_end)
                                == (mv.moved, mv.moved_end, mv.anchor, mv.anchor_end)
                                && *h == red
                        }) {
                            continue;
                        }
                        let full = hom.compose(g, &slid, &red, &red_hom)?;
                        out.push((mv, red, full));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One cylinder: the edges whose groups are conjugate after transport, with
/// a representative subgroup inside a chosen vertex group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub edges: BTreeSet<usize>,
    /// Vertex carrying the representative copy of the common edge group.
    pub vertex: usize,
    pub group: Subgrp,
}

/// Partition of the edges into cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderDecomposition {
    pub cylinders: Vec<Cylinder>,
}

/// Group the edges by transported equality of their edge groups. Requires
/// all edge groups of equal order.
pub fn cylinders(g: &GraphOfGroups) -> Result<CylinderDecomposition, SplitError> {
    g.validate().map_err(|mut es| SplitError::Gog(es.remove(0)))?;
    let mut orders: Vec<usize> = g.edges.iter().map(|e| e.group.order()).collect();
    orders.sort_unstable();
    orders.dedup();
    if orders.len() > 1 {
        return Err(SplitError::MixedEdgeOrders { orders });
    }
    let ids: Vec<usize> = g.edges.iter().map(|e| e.id).collect();
    let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (&v, gv) in &g.vertices {
        // All edge ends at v with their images.
        let mut ends: Vec<(usize, Subgrp)> = Vec::new();
        for e in &g.edges {
            for end in [End::From, End::To] {
                if e.endpoint(end) == v {
                    ends.push((e.id, g.edge_image(e.id, end)));
                }
            }
        }
        for i in 0..ends.len() {
            for j in (i + 1)..ends.len() {
                if gv.conjugator(&ends[i].1, &ends[j].1).is_some() {
                    let (a, b) = (
                        find(&mut parent, pos[&ends[i].0]),
                        find(&mut parent, pos[&ends[j].0]),
                    );
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &e in &ids {
        let root = find(&mut parent, pos[&e]);
        groups.entry(ids[root]).or_default().insert(e);
    }
    let mut cyls = Vec::new();
    for edges in groups.into_values() {
        let rep = *edges.iter().min().unwrap();
        let e = g.edge(rep);
        cyls.push(Cylinder {
            vertex: e.from,
            group: g.edge_image(rep, End::From),
            edges,
        });
    }
    cyls.sort_by_key(|c| *c.edges.iter().min().unwrap());
    Ok(CylinderDecomposition { cylinders: cyls })
}

/// A cylinder-side vertex of the tree of cylinders, carrying the normalizer
/// of the cylinder's common edge group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocCylinderVertex {
    /// Index into the decomposition's cylinder list.
    pub cylinder: usize,
    pub normalizer: NormalizerInfo,
}

/// An edge of the tree of cylinders, joining an original vertex to a
/// cylinder containing it. Its group is the intersection of the two vertex
/// stabilizers: the normalizer, inside the original vertex group, of the
/// cylinder's edge group transported to that vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TocEdge {
    pub vertex: usize,
    pub cylinder: usize,
    /// Subgroup of the original vertex group at `vertex`.
    pub group: Subgrp,
}

/// The bipartite tree of cylinders: original vertices lying in at least two
/// cylinders on one side, cylinders on the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeOfCylinders {
    pub decomposition: CylinderDecomposition,
    /// Original vertices lying in ≥ 2 cylinders, with their vertex groups.
    pub shared_vertices: BTreeMap<usize, FinGroup>,
    pub cylinder_vertices: Vec<TocCylinderVertex>,
    pub edges: Vec<TocEdge>,
}

impl TreeOfCylinders {
    /// Render the bipartite graph as DOT, labelling vertices with group
    /// orders (`∞` for infinite cylinder stabilizers) and edges with edge
    /// group orders.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tree_of_cylinders {\n");
        for (&v, gv) in &self.shared_vertices {
            out.push_str(&format!("  v{v} [label=\"|G|={}\"];\n", gv.order()));
        }
        for cv in &self.cylinder_vertices {
            let label = match cv.normalizer.kind {
                ElemKind::Finite => cv
                    .normalizer
                    .presentation
                    .vertices
                    .values()
                    .next()
                    .unwrap()
                    .order()
                    .to_string(),
                _ => "∞".to_string(),
            };
            out.push_str(&format!(
                "  c{} [shape=box, label=\"|N|={label}\"];\n",
                cv.cylinder
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  v{} -- c{} [label=\"{}\"];\n",
                e.vertex,
                e.cylinder,
                e.group.order()
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Build the tree of cylinders: a bipartite graph whose sides are the
/// cylinders (with their edge-group normalizers as vertex groups) and the
/// original vertices lying in at least two cylinders (with their original
/// vertex groups).
pub fn tree_of_cylinders(g: &GraphOfGroups) -> Result<TreeOfCylinders, SplitError> {
    let decomposition = cylinders(g)?;
    let table = class_table(g);
    // Which cylinders touch which original vertices.
    let mut touching: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, cyl) in decomposition.cylinders.iter().enumerate() {
        for &eid in &cyl.edges {
            let e = g.edge(eid);
            touching.entry(e.from).or_default().insert(i);
            touching.entry(e.to).or_default().insert(i);
        }
    }
    let shared_vertices: BTreeMap<usize, FinGroup> = touching
        .iter()
        .filter(|(_, cs)| cs.len() >= 2)
        .map(|(&v, _)| (v, g.vertex_group(v).clone()))
        .collect();
    let cylinder_vertices: Vec<TocCylinderVertex> = decomposition
        .cylinders
        .iter()
        .enumerate()
        .map(|(i, cyl)| {
            let (class_id, _, _) = table.class_of_subgroup(g, cyl.vertex, &cyl.group);
            TocCylinderVertex {
                cylinder: i,
                normalizer: normalizer(g, &table, class_id),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for (&v, cs) in &touching {
        if !shared_vertices.contains_key(&v) {
            continue;
        }
        let gv = g.vertex_group(v);
        for &c in cs {
            // Transport the cylinder's edge group to v via the least
            // incident edge end.
            let cyl = &decomposition.cylinders[c];
            let local = cyl
                .edges
                .iter()
                .flat_map(|&eid| {
                    let e = g.edge(eid);
                    [End::From, End::To]
                        .into_iter()
                        .filter(move |&end| e.endpoint(end) == v)
                        .map(move |end| g.edge_image(eid, end))
                })
                .next()
                .expect("cylinder touches the vertex");
            edges.push(TocEdge {
                vertex: v,
                cylinder: c,
                group: gv.normalizer_of(&local),
            });
        }
    }
    Ok(TreeOfCylinders {
        decomposition,
        shared_vertices,
        cylinder_vertices,
        edges,
    })
}
