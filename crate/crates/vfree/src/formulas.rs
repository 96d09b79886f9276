//! First-order sentences over groups: ASTs, emission of the
//! equivalence-detecting sentence families (Special^∀, Special_n^∀,
//! Chain^∃, PreStrong^∃, ζ, θ), S-expression serialization, and
//! brute-force evaluation over finite groups as a test oracle.
//!
//! Constants are named generators: `"1"` always denotes the identity and
//! `"g<i>"` the i-th generator of the group the sentence is evaluated over
//! (the standard generating set for graphs of groups, the permutation
//! generators for a finite group).

use std::collections::HashMap;

use thiserror::Error;

use crate::analysis::{class_table, find_chain, normalizer, AnalysisError, ElemKind};
use crate::fingrp::FinGroup;
use crate::gog::{Dir, GogError, GraphOfGroups, Token};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("evaluation needs {needed} assignments, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("the formula is not closed: free variable {0}")]
    FreeVariable(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("parse error at byte {at}: {detail}")]
    Parse { at: usize, detail: String },
    #[error("emission too large: {what}")]
    TooLarge { what: String },
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A term in the language of groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    /// A named generator; `"1"` is the identity.
    Const(String),
    Inv(Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

/// A first-order formula in the language of groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FOFormula {
    Forall(Vec<String>, Box<FOFormula>),
    Exists(Vec<String>, Box<FOFormula>),
    And(Vec<FOFormula>),
    Or(Vec<FOFormula>),
    Not(Box<FOFormula>),
    Eq(Term, Term),
    Neq(Term, Term),
}

pub fn var(name: impl Into<String>) -> Term {
    Term::Var(name.into())
}

pub fn cst(name: impl Into<String>) -> Term {
    Term::Const(name.into())
}

pub fn one() -> Term {
    Term::Const("1".into())
}

pub fn inv(t: Term) -> Term {
    Term::Inv(Box::new(t))
}

pub fn mul(a: Term, b: Term) -> Term {
    Term::Mul(Box::new(a), Box::new(b))
}

/// t^n by square and multiply (n ≥ 0), O(log n) term nodes.
pub fn pow(t: &Term, n: u128) -> Term {
    match n {
        0 => one(),
        1 => t.clone(),
        _ => {
            let half = pow(t, n / 2);
            let sq = mul(half.clone(), half);
            if n % 2 == 0 {
                sq
            } else {
                mul(sq, t.clone())
            }
        }
    }
}

fn conj_term(y: Term, x: Term) -> Term {
    mul(y.clone(), mul(x, inv(y)))
}

impl Term {
    fn count(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Inv(t) => 1 + t.count(),
            Term::Mul(a, b) => 1 + a.count() + b.count(),
        }
    }
}

impl FOFormula {
    fn count(&self) -> usize {
        match self {
            FOFormula::Forall(_, f) | FOFormula::Exists(_, f) | FOFormula::Not(f) => 1 + f.count(),
            FOFormula::And(fs) | FOFormula::Or(fs) => {
                1 + fs.iter().map(FOFormula::count).sum::<usize>()
            }
            FOFormula::Eq(a, b) | FOFormula::Neq(a, b) => 1 + a.count() + b.count(),
        }
    }

    /// Substitute terms for free variables (capture is not an issue: all
    /// emitted formulas use globally distinct variable names).
    pub fn substitute(&self, map: &HashMap<String, Term>) -> FOFormula {
        fn sub_term(t: &Term, map: &HashMap<String, Term>) -> Term {
            match t {
                Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
                Term::Const(_) => t.clone(),
                Term::Inv(t) => inv(sub_term(t, map)),
                Term::Mul(a, b) => mul(sub_term(a, map), sub_term(b, map)),
            }
        }
        match self {
            FOFormula::Forall(vs, f) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(v);
                }
                FOFormula::Forall(vs.clone(), Box::new(f.substitute(&inner)))
            }
            FOFormula::Exists(vs, f) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(v);
                }
                FOFormula::Exists(vs.clone(), Box::new(f.substitute(&inner)))
            }
            FOFormula::And(fs) => FOFormula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            FOFormula::Or(fs) => FOFormula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            FOFormula::Not(f) => FOFormula::Not(Box::new(f.substitute(map))),
            FOFormula::Eq(a, b) => FOFormula::Eq(sub_term(a, map), sub_term(b, map)),
            FOFormula::Neq(a, b) => FOFormula::Neq(sub_term(a, map), sub_term(b, map)),
        }
    }
}

/// Node count of the AST (formulas and terms).
pub fn symbol_count(f: &FOFormula) -> usize {
    f.count()
}

// ---------------------------------------------------------------------------
// S-expression serialization
// ---------------------------------------------------------------------------

/// Serialize to the S-expression text format with tokens
/// forall/exists/and/or/not/eq/neq/var/const/inv/mul.
pub fn to_sexp(f: &FOFormula) -> String {
    fn term(t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => {
                out.push_str("(var ");
                out.push_str(v);
                out.push(')');
            }
            Term::Const(c) => {
                out.push_str("(const ");
                out.push_str(c);
                out.push(')');
            }
            Term::Inv(t) => {
                out.push_str("(inv ");
                term(t, out);
                out.push(')');
            }
            Term::Mul(a, b) => {
                out.push_str("(mul ");
                term(a, out);
                out.push(' ');
                term(b, out);
                out.push(')');
            }
        }
    }
    fn formula(f: &FOFormula, out: &mut String) {
        match f {
            FOFormula::Forall(vs, body) | FOFormula::Exists(vs, body) => {
                out.push_str(if matches!(f, FOFormula::Forall(..)) {
                    "(forall ("
                } else {
                    "(exists ("
                });
                out.push_str(&vs.join(" "));
                out.push_str(") ");
                formula(body, out);
                out.push(')');
            }
            FOFormula::And(fs) | FOFormula::Or(fs) => {
                out.push_str(if matches!(f, FOFormula::And(..)) {
                    "(and"
                } else {
                    "(or"
                });
                for g in fs {
                    out.push(' ');
                    formula(g, out);
                }
                out.push(')');
            }
            FOFormula::Not(g) => {
                out.push_str("(not ");
                formula(g, out);
                out.push(')');
            }
            FOFormula::Eq(a, b) | FOFormula::Neq(a, b) => {
                out.push_str(if matches!(f, FOFormula::Eq(..)) {
                    "(eq "
                } else {
                    "(neq "
                });
                term(a, out);
                out.push(' ');
                term(b, out);
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    formula(f, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
enum SToken {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, SToken)>, FormulaError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, SToken::Open));
                i += 1;
            }
            b')' => {
                out.push((i, SToken::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push((start, SToken::Atom(text[start..i].to_string())));
            }
        }
    }
    Ok(out)
}

/// Parse the S-expression text format.
pub fn from_sexp(text: &str) -> Result<FOFormula, FormulaError> {
    let tokens = tokenize(text)?;
    let mut pos = 0usize;
    let f = parse_formula(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(FormulaError::Parse {
            at: tokens[pos].0,
            detail: "trailing input".into(),
        });
    }
    Ok(f)
}

fn expect(
    tokens: &[(usize, SToken)],
    pos: &mut usize,
    want: SToken,
    what: &str,
) -> Result<(), FormulaError> {
    match tokens.get(*pos) {
        Some((_, t)) if *t == want => {
            *pos += 1;
            Ok(())
        }
        Some((at, _)) => Err(FormulaError::Parse {
            at: *at,
            detail: format!("expected {what}"),
        }),
        None => Err(FormulaError::Parse {
            at: usize::MAX,
            detail: format!("expected {what}, got end of input"),
        }),
    }
}

fn atom(tokens: &[(usize, SToken)], pos: &mut usize) -> Result<String, FormulaError> {
    match tokens.get(*pos) {
        Some((_, SToken::Atom(a))) => {
            *pos += 1;
            Ok(a.clone())
        }
        Some((at, _)) => Err(FormulaError::Parse {
            at: *at,
            detail: "expected an atom".into(),
        }),
        None => Err(FormulaError::Parse {
            at: usize::MAX,
            detail: "expected an atom, got end of input".into(),
        }),
    }
}

fn parse_term(tokens: &[(usize, SToken)], pos: &mut usize) -> Result<Term, FormulaError> {
    expect(tokens, pos, SToken::Open, "(")?;
    let head = atom(tokens, pos)?;
    let t = match head.as_str() {
        "var" => Term::Var(atom(tokens, pos)?),
        "const" => Term::Const(atom(tokens, pos)?),
        "inv" => inv(parse_term(tokens, pos)?),
        "mul" => {
            let a = parse_term(tokens, pos)?;
            let b = parse_term(tokens, pos)?;
            mul(a, b)
        }
        other => {
            return Err(FormulaError::Parse {
                at: tokens[*pos - 1].0,
                detail: format!("unknown term head {other}"),
            })
        }
    };
    expect(tokens, pos, SToken::Close, ")")?;
    Ok(t)
}

fn parse_formula(tokens: &[(usize, SToken)], pos: &mut usize) -> Result<FOFormula, FormulaError> {
    expect(tokens, pos, SToken::Open, "(")?;
    let head = atom(tokens, pos)?;
    let f = match head.as_str() {
        "forall" | "exists" => {
            expect(tokens, pos, SToken::Open, "(")?;
            let mut vars = Vec::new();
            while !matches!(tokens.get(*pos), Some((_, SToken::Close))) {
                vars.push(atom(tokens, pos)?);
            }
            expect(tokens, pos, SToken::Close, ")")?;
            let body = Box::new(parse_formula(tokens, pos)?);
            if head == "forall" {
                FOFormula::Forall(vars, body)
            } else {
                FOFormula::Exists(vars, body)
            }
        }
        "and" | "or" => {
            let mut fs = Vec::new();
            while matches!(tokens.get(*pos), Some((_, SToken::Open))) {
                fs.push(parse_formula(tokens, pos)?);
            }
            if head == "and" {
                FOFormula::And(fs)
            } else {
                FOFormula::Or(fs)
            }
        }
        "not" => FOFormula::Not(Box::new(parse_formula(tokens, pos)?)),
        "eq" | "neq" => {
            let a = parse_term(tokens, pos)?;
            let b = parse_term(tokens, pos)?;
            if head == "eq" {
                FOFormula::Eq(a, b)
            } else {
                FOFormula::Neq(a, b)
            }
        }
        other => {
            return Err(FormulaError::Parse {
                at: tokens[*pos - 1].0,
                detail: format!("unknown formula head {other}"),
            })
        }
    };
    expect(tokens, pos, SToken::Close, ")")?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Brute-force evaluation over finite groups
// ---------------------------------------------------------------------------

fn quantifier_weight(f: &FOFormula, order: u128) -> u128 {
    match f {
        FOFormula::Forall(vs, body) | FOFormula::Exists(vs, body) => {
            let mut w = quantifier_weight(body, order);
            for _ in vs {
                w = w.saturating_mul(order).max(order);
            }
            w
        }
        FOFormula::And(fs) | FOFormula::Or(fs) => fs
            .iter()
            .map(|g| quantifier_weight(g, order))
            .max()
            .unwrap_or(1),
        FOFormula::Not(g) => quantifier_weight(g, order),
        FOFormula::Eq(..) | FOFormula::Neq(..) => 1,
    }
}

/// Evaluate a closed formula over a finite group by brute force. Constants
/// `"g<i>"` resolve to the i-th generator, `"1"` to the identity. The
/// budget caps the number of assignments of the deepest quantifier nest.
pub fn evaluate_finite(
    f: &FOFormula,
    h: &FinGroup,
    budget: u128,
) -> Result<bool, FormulaError> {
    let needed = quantifier_weight(f, h.order() as u128);
    if needed > budget {
        return Err(FormulaError::BudgetExceeded { needed, budget });
    }
    let gens: Vec<usize> = h
        .generators()
        .iter()
        .map(|p| h.index_of(p).expect("generator is an element"))
        .collect();
    let mut env: HashMap<String, usize> = HashMap::new();
    eval(f, h, &gens, &mut env)
}

fn eval_term(
    t: &Term,
    h: &FinGroup,
    gens: &[usize],
    env: &HashMap<String, usize>,
) -> Result<usize, FormulaError> {
    match t {
        Term::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| FormulaError::FreeVariable(v.clone())),
        Term::Const(c) => {
            if c == "1" {
                Ok(h.identity())
            } else if let Some(i) = c.strip_prefix('g').and_then(|s| s.parse::<usize>().ok()) {
                gens.get(i)
                    .copied()
                    .ok_or_else(|| FormulaError::UnknownConstant(c.clone()))
            } else {
                Err(FormulaError::UnknownConstant(c.clone()))
            }
        }
        Term::Inv(t) => Ok(h.inv(eval_term(t, h, gens, env)?)),
        Term::Mul(a, b) => Ok(h.mul(
            eval_term(a, h, gens, env)?,
            eval_term(b, h, gens, env)?,
        )),
    }
}

fn eval(
    f: &FOFormula,
    h: &FinGroup,
    gens: &[usize],
    env: &mut HashMap<String, usize>,
) -> Result<bool, FormulaError> {
    match f {
        FOFormula::Forall(vs, body) => eval_quant(vs, body, h, gens, env, true),
        FOFormula::Exists(vs, body) => eval_quant(vs, body, h, gens, env, false),
        FOFormula::And(fs) => {
            for g in fs {
                if !eval(g, h, gens, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        FOFormula::Or(fs) => {
            for g in fs {
                if eval(g, h, gens, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        FOFormula::Not(g) => Ok(!eval(g, h, gens, env)?),
        FOFormula::Eq(a, b) => Ok(eval_term(a, h, gens, env)? == eval_term(b, h, gens, env)?),
        FOFormula::Neq(a, b) => Ok(eval_term(a, h, gens, env)? != eval_term(b, h, gens, env)?),
    }
}

fn eval_quant(
    vs: &[String],
    body: &FOFormula,
    h: &FinGroup,
    gens: &[usize],
    env: &mut HashMap<String, usize>,
    universal: bool,
) -> Result<bool, FormulaError> {
    if vs.is_empty() {
        return eval(body, h, gens, env);
    }
    for x in 0..h.order() {
        env.insert(vs[0].clone(), x);
        let inner = eval_quant(&vs[1..], body, h, gens, env, universal)?;
        if inner != universal {
            env.remove(&vs[0]);
            return Ok(!universal);
        }
    }
    env.remove(&vs[0]);
    Ok(universal)
}

// ---------------------------------------------------------------------------
// Sentence emission
// ---------------------------------------------------------------------------

/// Which sentence family to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sentence {
    /// Universal formula whose solutions are exactly the images of the
    /// standard generators under special homomorphisms.
    SpecialForall,
    /// SpecialForall strengthened by injectivity on the ball of radius n.
    SpecialForallN(usize),
    /// ∃ g₁..g_N with g_k^{K!} ≠ 1 linked by the K!-power predicate.
    ChainExists { n: usize, k: usize },
    /// Existential chain clauses of certified length per non-elementary
    /// normalizer.
    PreStrongExists,
    /// ζ_G = ∃x̄ Special^∀(x̄) ∧ PreStrong^∃(x̄).
    Zeta,
    /// ∃ n pairwise non-conjugate finite subgroups of exponent dividing i,
    /// unrolled to element tuples with closure constraints.
    ThetaInvariant { i: usize, n: usize },
}

/// An emitted formula plus the certification caveat: `approximate` is true
/// when a PreStrong/Zeta chain length could not be certified maximal within
/// the search budget.
#[derive(Debug, Clone)]
pub struct Emitted {
    pub formula: FOFormula,
    pub approximate: bool,
}

/// Budget for chain certification inside PreStrong/Zeta.
const CHAIN_BUDGET: usize = 3;
/// Cap on injectivity clauses of SpecialForallN.
const BALL_PAIR_CAP: usize = 20_000;

/// Position of each standard generator in [`GraphOfGroups::generators`]
/// order: vertex elements first (per vertex, elements 1..order), then for
/// each non-tree edge the two loop directions.
struct GenIndex {
    vertex_offset: HashMap<usize, usize>,
    edge_offset: HashMap<usize, usize>,
    total: usize,
}

fn gen_index(g: &GraphOfGroups) -> GenIndex {
    let mut vertex_offset = HashMap::new();
    let mut next = 0usize;
    for (&v, gv) in &g.vertices {
        vertex_offset.insert(v, next);
        next += gv.order() - 1;
    }
    let mut edge_offset = HashMap::new();
    let tree = g.spanning_tree();
    for e in &g.edges {
        if !tree.contains(&e.id) {
            edge_offset.insert(e.id, next);
            next += 2;
        }
    }
    GenIndex {
        vertex_offset,
        edge_offset,
        total: next,
    }
}

impl GenIndex {
    fn vertex_var(&self, v: usize, x: usize) -> Term {
        debug_assert!(x > 0);
        var(format!("x{}", self.vertex_offset[&v] + x - 1))
    }

    fn edge_var(&self, e: usize, d: Dir) -> Option<Term> {
        let off = *self.edge_offset.get(&e)?;
        Some(var(format!(
            "x{}",
            off + if d == Dir::Plus { 0 } else { 1 }
        )))
    }

    /// A vertex element or the identity constant.
    fn elt(&self, g: &GraphOfGroups, v: usize, x: usize) -> Term {
        if x == g.vertex_group(v).identity() {
            one()
        } else {
            self.vertex_var(v, x)
        }
    }

    /// Translate a word over the standard generators into a term in the
    /// x-variables.
    fn word_term(&self, g: &GraphOfGroups, w: &crate::gog::Word) -> Term {
        let mut t = None;
        for tok in &w.0 {
            let piece = match *tok {
                Token::VertexElt(v, x) => self.elt(g, v, x),
                Token::EdgeStep(e, d) => match self.edge_var(e, d) {
                    Some(term) => term,
                    // Tree edge: its stable letter is trivial in the
                    // fundamental group relative to the spanning tree.
                    None => one(),
                },
            };
            t = Some(match t {
                None => piece,
                Some(acc) => mul(acc, piece),
            });
        }
        t.unwrap_or_else(one)
    }
}

fn special_forall_body(g: &GraphOfGroups, idx: &GenIndex) -> Result<FOFormula, FormulaError> {
    let mut clauses = Vec::new();
    // Closure constraints: the multiplication tables of the vertex groups.
    for (&v, gv) in &g.vertices {
        for a in 1..gv.order() {
            for b in 1..gv.order() {
                clauses.push(FOFormula::Eq(
                    mul(idx.vertex_var(v, a), idx.vertex_var(v, b)),
                    idx.elt(g, v, gv.mul(a, b)),
                ));
            }
        }
    }
    // Edge relations: t·ι_from(c)·t⁻¹ = ι_to(c), with t = 1 on tree edges.
    for e in &g.edges {
        for c in 1..e.group.order() {
            let lhs_core = idx.elt(g, e.from, e.inj_from.apply(c));
            let rhs = idx.elt(g, e.to, e.inj_to.apply(c));
            let lhs = match idx.edge_var(e.id, Dir::Plus) {
                Some(t) => mul(t.clone(), mul(lhs_core, inv(t))),
                None => lhs_core,
            };
            clauses.push(FOFormula::Eq(lhs, rhs));
        }
    }
    // Non-conjugacy: representatives of distinct conjugacy classes of
    // finite subgroups stay non-conjugate (universal clauses over y).
    let table = class_table(g);
    let mut reps: Vec<Term> = Vec::new();
    for class in &table.classes {
        if class.order > 1 {
            let x = class.rep.elements[1];
            reps.push(idx.vertex_var(class.vertex, x));
        }
    }
    let mut nonconj = Vec::new();
    for i in 0..reps.len() {
        for j in 0..reps.len() {
            if i != j {
                nonconj.push(FOFormula::Neq(
                    conj_term(var("y"), reps[i].clone()),
                    reps[j].clone(),
                ));
            }
        }
    }
    if nonconj.is_empty() {
        Ok(FOFormula::And(clauses))
    } else {
        clauses.extend(nonconj);
        Ok(FOFormula::Forall(vec!["y".into()], Box::new(FOFormula::And(clauses))))
    }
}

fn chain_clauses(vars: &[String], k: usize) -> Vec<FOFormula> {
    let kfact: u128 = (1..=k as u128).product::<u128>().max(1);
    let mut clauses = Vec::new();
    for v in vars {
        clauses.push(FOFormula::Neq(pow(&var(v.clone()), kfact), one()));
    }
    for w in vars.windows(2) {
        // D-membership via the power predicate: each element is the
        // K!-power of its successor.
        clauses.push(FOFormula::Eq(
            var(w[0].clone()),
            pow(&var(w[1].clone()), kfact),
        ));
    }
    clauses
}

fn prestrong_exists(g: &GraphOfGroups) -> Result<Emitted, FormulaError> {
    let table = class_table(g);
    let k = g.k_of();
    let mut vars = Vec::new();
    let mut clauses = Vec::new();
    let mut approximate = false;
    for class in &table.classes {
        let ninfo = normalizer(g, &table, class.id);
        if ninfo.kind != ElemKind::NonElementary {
            continue;
        }
        let chain = find_chain(g, &ninfo, CHAIN_BUDGET)?;
        approximate |= !chain.certified_maximal;
        let len = chain.elements.len().max(1);
        let cvars: Vec<String> = (0..len).map(|j| format!("c{}_{}", class.id, j)).collect();
        clauses.extend(chain_clauses(&cvars, k));
        vars.extend(cvars);
    }
    Ok(Emitted {
        formula: FOFormula::Exists(vars, Box::new(FOFormula::And(clauses))),
        approximate,
    })
}

/// Emit one of the sentence families for `g`. PreStrong and Zeta set the
/// `approximate` flag when a chain could not be certified maximal within
/// the internal budget.
pub fn emit(g: &GraphOfGroups, which: Sentence) -> Result<Emitted, FormulaError> {
    g.validate()
        .map_err(|mut e| FormulaError::Gog(e.remove(0)))?;
    let idx = gen_index(g);
    match which {
        Sentence::SpecialForall => Ok(Emitted {
            formula: special_forall_body(g, &idx)?,
            approximate: false,
        }),
        Sentence::SpecialForallN(n) => {
            let base = special_forall_body(g, &idx)?;
            let ball = g.ball(n)?;
            if ball.len() * ball.len() > BALL_PAIR_CAP {
                return Err(FormulaError::TooLarge {
                    what: format!("{} ball elements give too many injectivity pairs", ball.len()),
                });
            }
            let mut clauses = vec![base];
            for i in 0..ball.len() {
                for j in i + 1..ball.len() {
                    clauses.push(FOFormula::Neq(
                        idx.word_term(g, &g.nf_to_word(&ball[i])),
                        idx.word_term(g, &g.nf_to_word(&ball[j])),
                    ));
                }
            }
            Ok(Emitted {
                formula: FOFormula::And(clauses),
                approximate: false,
            })
        }
        Sentence::ChainExists { n, k } => {
            let vars: Vec<String> = (0..n).map(|j| format!("c{j}")).collect();
            let clauses = chain_clauses(&vars, k);
            Ok(Emitted {
                formula: FOFormula::Exists(vars, Box::new(FOFormula::And(clauses))),
                approximate: false,
            })
        }
        Sentence::PreStrongExists => prestrong_exists(g),
        Sentence::Zeta => {
            let special = special_forall_body(g, &idx)?;
            let pre = prestrong_exists(g)?;
            let xvars: Vec<String> = (0..idx.total).map(|i| format!("x{i}")).collect();
            Ok(Emitted {
                formula: FOFormula::Exists(
                    xvars,
                    Box::new(FOFormula::And(vec![special, pre.formula])),
                ),
                approximate: pre.approximate,
            })
        }
        Sentence::ThetaInvariant { i, n } => Ok(Emitted {
            formula: theta_sentence(g.k_of(), i, n),
            approximate: false,
        }),
    }
}

/// ∃ n finite subgroups of exponent dividing `i`, pairwise non-conjugate,
/// each unrolled to a tuple of `k` element variables with closure
/// constraints.
fn theta_sentence(k: usize, i: usize, n: usize) -> FOFormula {
    let tuple = |j: usize| -> Vec<Term> {
        (0..k).map(|a| var(format!("u{j}_{a}"))).collect()
    };
    let mut vars = Vec::new();
    let mut clauses = Vec::new();
    for j in 0..n {
        let us = tuple(j);
        for a in 0..k {
            vars.push(format!("u{j}_{a}"));
            // Exponent constraint.
            clauses.push(FOFormula::Eq(pow(&us[a], i as u128), one()));
        }
        // Closure: each product lands back in the tuple (or is trivial).
        for a in 0..k {
            for b in 0..k {
                let mut options = vec![FOFormula::Eq(mul(us[a].clone(), us[b].clone()), one())];
                for c in 0..k {
                    options.push(FOFormula::Eq(
                        mul(us[a].clone(), us[b].clone()),
                        us[c].clone(),
                    ));
                }
                clauses.push(FOFormula::Or(options));
            }
        }
        // Nontriviality.
        clauses.push(FOFormula::Or(
            us.iter()
                .map(|u| FOFormula::Neq(u.clone(), one()))
                .collect(),
        ));
    }
    // Pairwise non-conjugacy of the leading elements.
    let mut nonconj = Vec::new();
    for j1 in 0..n {
        for j2 in 0..n {
            if j1 != j2 {
                nonconj.push(FOFormula::Neq(
                    conj_term(var("y"), var(format!("u{j1}_0"))),
                    var(format!("u{j2}_0")),
                ));
            }
        }
    }
    if !nonconj.is_empty() {
        clauses.push(FOFormula::Forall(
            vec!["y".into()],
            Box::new(FOFormula::And(nonconj)),
        ));
    }
    FOFormula::Exists(vars, Box::new(FOFormula::And(clauses)))
}

/// The commuting-order-i pattern ∀x∀y (x^i = 1) ⇒ (xy = yx), the
/// θ-style building block; `instable_sentence` is the i = 2 case.
pub fn commuting_order_pattern(i: u128) -> FOFormula {
    FOFormula::Forall(
        vec!["x".into(), "y".into()],
        Box::new(FOFormula::Or(vec![
            FOFormula::Neq(pow(&var("x"), i), one()),
            FOFormula::Eq(mul(var("x"), var("y")), mul(var("y"), var("x"))),
        ])),
    )
}

/// ∀x∀y (x² = 1) ⇒ (xy = yx): true in Z/2×Z/2, false in S₃, and not
/// preserved under elementary equivalence moves between the two — the
/// classic instability witness.
pub fn instable_sentence() -> FOFormula {
    commuting_order_pattern(2)
}
