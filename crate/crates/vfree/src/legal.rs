//! Legal large and small extension moves on graphs of finite groups, the
//! conjugation-extension of homomorphisms, and the special /
//! strongly-special test for maps between fundamental groups.
//!
//! A *legal large* step picks a conjugacy class of finite subgroups C whose
//! normalizer is non-elementary and satisfies E(N(C)) = C, and forms the HNN
//! extension G∗_C with trivial stable-letter action. A *legal small* step
//! picks a class C whose normalizer N is infinite virtually cyclic with C
//! maximal normal in N, and replaces N by a mutual nice partner N′ over the
//! same C. Both moves preserve the counting invariants of the group.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    class_table, classify_elementary, e_of, normalizer, AnalysisError, ClassTable, ESubgroup,
    ElemKind, FinClass, NormalizerInfo,
};
use crate::fingrp::{automorphisms, find_isomorphism, GrpHom, Subgrp};
use crate::gog::{Edge, End, GoGHom, GogError, GraphOfGroups, Word};
use crate::splittings::reduce;
use crate::vcyc::{
    is_k_nice, mutual_nice_partners, structure_of, NiceEmbedding, VCElement, VCGroup, VCShape,
    VcycError,
};

#[derive(Debug, Error)]
pub enum LegalError {
    #[error("the group is elementary (finite or virtually cyclic); no legal extension applies")]
    ElementaryGroup,
    #[error("the step is not among the legal candidates for this graph")]
    IllegalStep,
    #[error("edge {edge}: the vertex maps are incompatible with the edge relation")]
    EdgeMismatch { edge: usize },
    #[error("the data does not define a homomorphism of fundamental groups")]
    NotAHomomorphism,
    #[error("target maximal finite order exceeds the source ({k_tgt} > {k_src})")]
    BadK { k_src: usize, k_tgt: usize },
    #[error("unsupported configuration: {what}")]
    Unsupported { what: String },
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Vcyc(#[from] VcycError),
}

/// A legal large extension step: the chosen conjugacy class of finite
/// subgroups (with non-elementary normalizer and E(N(C)) = C).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalLargeStep {
    pub class: FinClass,
}

/// A legal small extension step: a class C whose normalizer N is infinite
/// virtually cyclic with C maximal normal in N, together with a mutual nice
/// partner N′ and the two nice embeddings ι: N → N′ and ι′: N′ → N.
///
/// Steps are expressed relative to the *reduced* graph of the input (see
/// [`legal_small_candidates`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegalSmallStep {
    pub class: FinClass,
    pub partner: VCGroup,
    pub iota: NiceEmbedding,
    pub iota_back: NiceEmbedding,
}

fn first_validation_error(g: &GraphOfGroups) -> Result<(), LegalError> {
    g.validate()
        .map_err(|mut errs| LegalError::Gog(errs.remove(0)))
}

/// All classes eligible for a legal large extension: conjugacy classes of
/// finite subgroups whose normalizer is non-elementary and whose normalizer
/// satisfies E(N(C)) = C. Errors with [`LegalError::ElementaryGroup`] when
/// the whole group is finite or virtually cyclic.
pub fn legal_large_candidates(g: &GraphOfGroups) -> Result<Vec<LegalLargeStep>, LegalError> {
    first_validation_error(g)?;
    if classify_elementary(g)? != ElemKind::NonElementary {
        return Err(LegalError::ElementaryGroup);
    }
    let table = class_table(g);
    let mut out = Vec::new();
    for class in &table.classes {
        let ninfo = normalizer(g, &table, class.id);
        if ninfo.kind != ElemKind::NonElementary {
            continue;
        }
        let e = e_of(g, &ninfo)?;
        if e.subgrp.elements.len() == class.order {
            out.push(LegalLargeStep {
                class: class.clone(),
            });
        }
    }
    Ok(out)
}

/// Perform a legal large extension: adjoin a new loop at the class vertex
/// whose edge group is the class representative, included identically at
/// both ends (so the new stable letter centralizes a copy of C).
pub fn apply_legal_large(
    g: &GraphOfGroups,
    step: &LegalLargeStep,
) -> Result<GraphOfGroups, LegalError> {
    let candidates = legal_large_candidates(g)?;
    if !candidates.contains(step) {
        return Err(LegalError::IllegalStep);
    }
    let v = step.class.vertex;
    let gv = g.vertex_group(v);
    let (sub, back) = gv.subgroup_as_group(&step.class.rep);
    let inc = GrpHom { images: back };
    let new_id = g.edges.iter().map(|e| e.id).max().map_or(0, |m| m + 1);
    let mut edges = g.edges.clone();
    edges.push(Edge {
        id: new_id,
        group: sub,
        from: v,
        to: v,
        inj_from: inc.clone(),
        inj_to: inc,
    });
    let out = GraphOfGroups::new(g.vertices.clone(), edges);
    first_validation_error(&out)?;
    Ok(out)
}

/// All legal small extension steps of `g`, expressed on the reduced graph
/// `reduce(g).0`: for each conjugacy class of edge groups of the reduced
/// graph whose normalizer N is infinite virtually cyclic with the class
/// representative maximal normal in N, one step per mutual nice partner of
/// N (including N itself, with identity witnesses).
pub fn legal_small_candidates(g: &GraphOfGroups) -> Result<Vec<LegalSmallStep>, LegalError> {
    first_validation_error(g)?;
    let (r, _) = reduce(g)?;
    let table = class_table(&r);
    let kg = r.k_of();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in &r.edges {
        let img = r.edge_image(e.id, End::From);
        let (cid, _, _) = table.class_of_subgroup(&r, e.from, &img);
        if !seen.insert(cid) {
            continue;
        }
        let class = table.classes[cid].clone();
        let ninfo = normalizer(&r, &table, cid);
        if !matches!(ninfo.kind, ElemKind::VCCyclic | ElemKind::VCDihedral) {
            continue;
        }
        let n_struct = structure_of(&ninfo.presentation)?;
        // C must be the maximal normal finite subgroup of N, i.e. the class
        // representative itself.
        if n_struct.c.order() != class.order {
            continue;
        }
        for (partner, iota, iota_back) in mutual_nice_partners(&n_struct, kg)? {
            out.push(LegalSmallStep {
                class: class.clone(),
                partner,
                iota,
                iota_back,
            });
        }
    }
    Ok(out)
}

/// Perform a legal small extension: replace the virtually cyclic normalizer
/// N of the chosen class by its partner N′ over the same C.
///
/// Two configurations are supported: the whole (reduced) group is itself
/// virtually cyclic, in which case the output is the partner's canonical
/// presentation; or N is carried by a single loop edge whose two ends have
/// the same image, in which case the loop's monodromy is replaced by the
/// partner's. Other configurations return [`LegalError::Unsupported`].
pub fn apply_legal_small(
    g: &GraphOfGroups,
    step: &LegalSmallStep,
) -> Result<GraphOfGroups, LegalError> {
    let candidates = legal_small_candidates(g)?;
    if !candidates.contains(step) {
        return Err(LegalError::IllegalStep);
    }
    let (r, _) = reduce(g)?;

    // Degenerate case: the whole group is the normalizer.
    if structure_of(&r).is_ok() {
        let out = step.partner.presentation();
        first_validation_error(&out)?;
        return Ok(out);
    }

    let table = class_table(&r);
    // Find a loop edge carrying the class, with equal images at both ends.
    for e in &r.edges {
        if !e.is_loop() {
            continue;
        }
        let img_f = r.edge_image(e.id, End::From);
        if img_f != r.edge_image(e.id, End::To) {
            continue;
        }
        let (cid, _, _) = table.class_of_subgroup(&r, e.from, &img_f);
        if cid != step.class.id {
            continue;
        }
        let ninfo = normalizer(&r, &table, cid);
        let n_struct = structure_of(&ninfo.presentation)?;
        let (VCShape::Cyclic { alpha }, VCShape::Cyclic { alpha: alpha_p }) =
            (&n_struct.shape, &step.partner.shape)
        else {
            return Err(LegalError::Unsupported {
                what: "dihedral normalizer carried by a proper subgraph".into(),
            });
        };
        // The loop monodromy μ on the edge group E: ι_to = ι_from ∘ μ.
        let pre: HashMap<usize, usize> = e
            .inj_from
            .images
            .iter()
            .enumerate()
            .map(|(i, &y)| (y, i))
            .collect();
        let mu = GrpHom {
            images: (0..e.group.order())
                .map(|x| pre[&e.inj_to.apply(x)])
                .collect(),
        };
        // Conjugate (α, α′) into E-coordinates: find ψ: C → E with
        // ψ∘α^±1 = μ∘ψ, and transport α′ with the same orientation.
        let Some(iso) = find_isomorphism(&n_struct.c, &e.group) else {
            return Err(LegalError::Unsupported {
                what: "loop edge group is not isomorphic to the normalizer core".into(),
            });
        };
        let alpha_inv = alpha
            .inverse(&n_struct.c)
            .expect("alpha is an automorphism");
        let alpha_p_inv = alpha_p
            .inverse(&step.partner.c)
            .expect("partner alpha is an automorphism");
        let mut replacement = None;
        'psi: for aut in automorphisms(&n_struct.c) {
            let psi = aut.then(&iso);
            for (oriented, oriented_p) in [(alpha, alpha_p), (&alpha_inv, &alpha_p_inv)] {
                if oriented.then(&psi) == psi.then(&mu) {
                    let psi_inv = psi.inverse(&e.group).expect("psi is bijective");
                    replacement = Some(psi_inv.then(oriented_p).then(&psi));
                    break 'psi;
                }
            }
        }
        let Some(mu_p) = replacement else {
            return Err(LegalError::Unsupported {
                what: "loop monodromy is not conjugate to the normalizer action".into(),
            });
        };
        let new_inj_to = GrpHom {
            images: (0..e.group.order())
                .map(|x| e.inj_from.apply(mu_p.apply(x)))
                .collect(),
        };
        let mut edges = r.edges.clone();
        for edge in &mut edges {
            if edge.id == e.id {
                edge.inj_to = new_inj_to;
                break;
            }
        }
        let out = GraphOfGroups::new(r.vertices.clone(), edges);
        first_validation_error(&out)?;
        return Ok(out);
    }
    Err(LegalError::Unsupported {
        what: "the normalizer is not carried by a single loop edge".into(),
    })
}

/// Extend a base homomorphism by composing each vertex map with a
/// conjugation: given new vertex maps and, per edge end, a conjugator word
/// w with `vertex_map(ι_v(c)) = w·base(ι_v(c))·w⁻¹` on the edge image, the
/// stable letters are re-routed as `w_to·base(λ)·w_from⁻¹`. Missing
/// conjugators default to the empty word.
pub fn extend_hom(
    src: &GraphOfGroups,
    tgt: &GraphOfGroups,
    base: &GoGHom,
    vertex_maps: &BTreeMap<usize, Vec<Word>>,
    conjugators: &BTreeMap<(usize, End), Word>,
) -> Result<GoGHom, LegalError> {
    let empty = Word::empty();
    for e in &src.edges {
        for end in [End::From, End::To] {
            let v = e.endpoint(end);
            let w = conjugators.get(&(e.id, end)).unwrap_or(&empty);
            let wi = tgt.inverse_word(w);
            let inj = e.inj(end);
            for c in 0..e.group.order() {
                let x = inj.apply(c);
                let lhs = &vertex_maps[&v][x];
                let rhs = Word::concat(&[w, &base.vertex_images[&v][x], &wi]);
                if !tgt.equal_words(lhs, &rhs)? {
                    return Err(LegalError::EdgeMismatch { edge: e.id });
                }
            }
        }
    }
    let mut edge_images = BTreeMap::new();
    for e in &src.edges {
        let wf = conjugators.get(&(e.id, End::From)).unwrap_or(&empty);
        let wt = conjugators.get(&(e.id, End::To)).unwrap_or(&empty);
        let img = Word::concat(&[wt, &base.edge_images[&e.id], &tgt.inverse_word(wf)]);
        edge_images.insert(e.id, tgt.nf_to_word(&tgt.normal_form(&img)?));
    }
    let hom = GoGHom {
        vertex_images: vertex_maps.clone(),
        edge_images,
    };
    if !hom.verify(src, tgt) {
        return Err(LegalError::NotAHomomorphism);
    }
    Ok(hom)
}

/// Result of the special / strongly-special test, with human-readable
/// diagnostics for every failed condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialCheck {
    pub special: bool,
    pub strongly_special: bool,
    pub failures: Vec<String>,
}

/// Search radius for locating conjugated finite-subgroup images.
const LOCATE_RADIUS: usize = 4;
/// Cap on the number of conjugator candidates scanned per location search.
const LOCATE_CAP: usize = 5000;
/// Maximal |t-exponent| tried when expressing letter images in a virtually
/// cyclic normalizer.
const LETTER_WINDOW: i64 = 64;

/// Canonical (normal-form) word of `w` in `g`.
fn canon(g: &GraphOfGroups, w: &Word) -> Result<Word, GogError> {
    Ok(g.nf_to_word(&g.normal_form(w)?))
}

/// All vertex-group readings of canonical elliptic words: an element equal
/// to `ι(v, x)` may have several such readings when edge groups identify
/// vertex elements.
fn elliptic_lookup(g: &GraphOfGroups) -> Result<HashMap<Word, Vec<(usize, usize)>>, GogError> {
    let mut lookup: HashMap<Word, Vec<(usize, usize)>> = HashMap::new();
    for (&v, gv) in &g.vertices {
        for x in 1..gv.order() {
            let cw = canon(g, &g.iota(v, x))?;
            lookup.entry(cw).or_default().push((v, x));
        }
    }
    Ok(lookup)
}

/// Try to express `w⁻¹·u·w` for every image word `u` as elements of a single
/// vertex group of `tgt`; on success return that vertex, the subgroup they
/// span, and the conjugator `w`. The conjugator search runs over a bounded
/// ball of canonical words.
fn locate_subgroup(
    tgt: &GraphOfGroups,
    lookup: &HashMap<Word, Vec<(usize, usize)>>,
    image_words: &[Word],
) -> Result<Option<(usize, Subgrp, Word)>, GogError> {
    let fit = |w: &Word| -> Result<Option<(usize, Subgrp)>, GogError> {
        let wi = tgt.inverse_word(w);
        let mut options: Vec<Option<&Vec<(usize, usize)>>> = Vec::new();
        for u in image_words {
            let cw = canon(tgt, &Word::concat(&[&wi, u, w]))?;
            if cw.is_empty() {
                options.push(None); // identity: fits every vertex
            } else {
                match lookup.get(&cw) {
                    Some(opts) => options.push(Some(opts)),
                    None => return Ok(None),
                }
            }
        }
        'vertex: for &v in tgt.vertices.keys() {
            let mut elements = BTreeSet::from([0usize]);
            for opt in &options {
                match opt {
                    None => {}
                    Some(opts) => match opts.iter().find(|(ov, _)| *ov == v) {
                        Some(&(_, x)) => {
                            elements.insert(x);
                        }
                        None => continue 'vertex,
                    },
                }
            }
            return Ok(Some((
                v,
                Subgrp {
                    elements: elements.into_iter().collect(),
                },
            )));
        }
        Ok(None)
    };
    let gens = tgt.generators();
    let start = canon(tgt, &Word::empty())?;
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut scanned = 0usize;
    while let Some((w, depth)) = queue.pop_front() {
        scanned += 1;
        if let Some((v, s)) = fit(&w)? {
            return Ok(Some((v, s, w)));
        }
        if depth >= LOCATE_RADIUS || scanned + queue.len() >= LOCATE_CAP {
            continue;
        }
        for gen in &gens {
            let cw = canon(tgt, &Word::concat(&[&w, gen]))?;
            if seen.insert(cw.clone()) {
                queue.push_back((cw, depth + 1));
            }
        }
    }
    Ok(None)
}

/// Solve `target_word = W·embed(word_of(y))·W⁻¹` for an element `y` of a
/// structured virtually cyclic normalizer of `tgt`, scanning t-exponents up
/// to [`LETTER_WINDOW`].
fn solve_in_normalizer(
    tgt: &GraphOfGroups,
    n: &VCGroup,
    ninfo: &NormalizerInfo,
    conj: &Word,
    target_word: &Word,
) -> Result<Option<VCElement>, LegalError> {
    let pres = &ninfo.presentation;
    let conj_inv = tgt.inverse_word(conj);
    let goal = canon(tgt, target_word)?;
    let dihedral = n.is_dihedral();
    for k in -LETTER_WINDOW..=LETTER_WINDOW {
        for c in 0..n.c.order() {
            let refls: &[bool] = if dihedral { &[false, true] } else { &[false] };
            for &refl in refls {
                let y = if dihedral {
                    VCElement::Dihedral { c, k, refl }
                } else {
                    VCElement::Cyclic { c, k }
                };
                let inner = ninfo.embedding.apply(pres, tgt, &n.word_of(pres, &y))?;
                let cw = canon(tgt, &Word::concat(&[conj, &inner, &conj_inv]))?;
                if cw == goal {
                    return Ok(Some(y));
                }
            }
        }
    }
    Ok(None)
}

/// The special / strongly-special test for a verified homomorphism
/// `phi: src → tgt`. *Special* requires: injectivity on every finite
/// subgroup, injectivity on conjugacy classes of finite subgroups, and
/// K-niceness of every induced map between virtually cyclic normalizers.
/// *Strongly special* additionally requires φ(E(N(C))) = E(N(φ(C))) for
/// every class with non-elementary normalizer.
pub fn check_special(
    src: &GraphOfGroups,
    tgt: &GraphOfGroups,
    phi: &GoGHom,
) -> Result<SpecialCheck, LegalError> {
    first_validation_error(src)?;
    first_validation_error(tgt)?;
    if !phi.verify(src, tgt) {
        return Err(LegalError::NotAHomomorphism);
    }
    let (k_src, k_tgt) = (src.k_of(), tgt.k_of());
    if k_tgt > k_src {
        return Err(LegalError::BadK { k_src, k_tgt });
    }
    let src_table = class_table(src);
    let tgt_table = class_table(tgt);
    let lookup = elliptic_lookup(tgt)?;
    let mut failures = Vec::new();
    let mut special = true;
    let mut strongly = true;

    // Per source class: image words, injectivity, image location.
    let mut image_class: BTreeMap<usize, (usize, Word)> = BTreeMap::new();
    for class in &src_table.classes {
        let copy = ESubgroup {
            vertex: class.vertex,
            subgrp: class.rep.clone(),
            witness: Word::empty(),
        };
        let mut images = Vec::new();
        for w in copy.element_words(src) {
            images.push(phi.apply(src, tgt, &w)?);
        }
        let distinct: BTreeSet<&Word> = images.iter().collect();
        if distinct.len() != class.order {
            special = false;
            failures.push(format!(
                "class {}: not injective on the finite subgroup ({} of {} images distinct)",
                class.id,
                distinct.len(),
                class.order
            ));
            continue;
        }
        match locate_subgroup(tgt, &lookup, &images)? {
            Some((v, s, w)) => {
                let (cid, _, a) = tgt_table.class_of_subgroup(tgt, v, &s);
                // φ(copy) = W·ι(rep)·W⁻¹ with W = w·ι(v,a)⁻¹.
                let full = Word::concat(&[&w, &tgt.inverse_word(&tgt.iota(v, a))]);
                image_class.insert(class.id, (cid, canon(tgt, &full)?));
            }
            None => {
                special = false;
                failures.push(format!(
                    "class {}: image subgroup not located within the search bounds",
                    class.id
                ));
            }
        }
    }
    let located: Vec<usize> = image_class.values().map(|(cid, _)| *cid).collect();
    let distinct_classes: BTreeSet<usize> = located.iter().copied().collect();
    if distinct_classes.len() != located.len() {
        special = false;
        failures.push("distinct finite-subgroup classes merge in the target".into());
    }

    // Normalizer conditions per class.
    for class in &src_table.classes {
        let Some((tcid, conj)) = image_class.get(&class.id) else {
            continue;
        };
        let ninfo_s = normalizer(src, &src_table, class.id);
        let ninfo_t = normalizer(tgt, &tgt_table, *tcid);
        match ninfo_s.kind {
            ElemKind::VCCyclic | ElemKind::VCDihedral => {
                if !matches!(ninfo_t.kind, ElemKind::VCCyclic | ElemKind::VCDihedral) {
                    special = false;
                    failures.push(format!(
                        "class {}: virtually cyclic normalizer maps into a {:?} normalizer",
                        class.id, ninfo_t.kind
                    ));
                    continue;
                }
                let n_s = structure_of(&ninfo_s.presentation)?;
                let n_t = structure_of(&ninfo_t.presentation)?;
                let pres_s = &ninfo_s.presentation;
                // Induced images in tgt of the structured generators of N.
                let push = |x: &VCElement| -> Result<Word, LegalError> {
                    let w = ninfo_s.embedding.apply(pres_s, src, &n_s.word_of(pres_s, x))?;
                    Ok(phi.apply(src, tgt, &w)?)
                };
                let mut on_c = Vec::with_capacity(n_s.c.order());
                let mut solved = true;
                for c in 0..n_s.c.order() {
                    match solve_in_normalizer(tgt, &n_t, &ninfo_t, conj, &push(&n_s.elt_c(c))?)? {
                        Some(y) if !y.is_reflection() && y.t_exponent() == 0 => {
                            on_c.push(y.c_part())
                        }
                        _ => {
                            solved = false;
                            break;
                        }
                    }
                }
                let letter_srcs: Vec<VCElement> = if n_s.is_dihedral() {
                    vec![n_s.refl_a(), n_s.refl_b()]
                } else {
                    vec![n_s.letter_t()]
                };
                let mut letters = Vec::new();
                if solved {
                    for x in &letter_srcs {
                        match solve_in_normalizer(tgt, &n_t, &ninfo_t, conj, &push(x)?)? {
                            Some(y) => letters.push(y),
                            None => {
                                solved = false;
                                break;
                            }
                        }
                    }
                }
                if !solved {
                    special = false;
                    failures.push(format!(
                        "class {}: induced normalizer map not expressible within the search bounds",
                        class.id
                    ));
                    continue;
                }
                let emb = NiceEmbedding {
                    on_c: GrpHom { images: on_c },
                    letters,
                };
                let check = is_k_nice(&n_s, &n_t, &emb, k_src)?;
                if !check.ok {
                    special = false;
                    failures.push(format!(
                        "class {}: induced normalizer map fails niceness bullet {}",
                        class.id,
                        check.failed_bullet.unwrap_or(0)
                    ));
                }
            }
            ElemKind::NonElementary => {
                if ninfo_t.kind != ElemKind::NonElementary {
                    strongly = false;
                    failures.push(format!(
                        "class {}: non-elementary normalizer maps into a {:?} normalizer",
                        class.id, ninfo_t.kind
                    ));
                    continue;
                }
                let e_s = e_of(src, &ninfo_s)?;
                let e_t = e_of(tgt, &ninfo_t)?;
                let mut s_words = BTreeSet::new();
                for w in e_s.element_words(src) {
                    s_words.insert(phi.apply(src, tgt, &w)?);
                }
                let conj_inv = tgt.inverse_word(conj);
                let mut t_words = BTreeSet::new();
                for w in e_t.element_words(tgt) {
                    t_words.insert(canon(tgt, &Word::concat(&[conj, &w, &conj_inv]))?);
                }
                if s_words != t_words {
                    strongly = false;
                    failures.push(format!(
                        "class {}: φ(E(N)) ≠ E(N′) ({} vs {} elements)",
                        class.id,
                        s_words.len(),
                        t_words.len()
                    ));
                }
            }
            ElemKind::Finite => {}
        }
    }

    Ok(SpecialCheck {
        special,
        strongly_special: special && strongly,
        failures,
    })
}

/// The conjugacy classes eligible for legal moves, for external inspection:
/// each class paired with its normalizer kind.
pub fn class_kinds(g: &GraphOfGroups) -> Result<Vec<(FinClass, ElemKind)>, LegalError> {
    first_validation_error(g)?;
    let table: ClassTable = class_table(g);
    let mut out = Vec::new();
    for class in &table.classes {
        let ninfo = normalizer(g, &table, class.id);
        out.push((class.clone(), ninfo.kind));
    }
    Ok(out)
}
