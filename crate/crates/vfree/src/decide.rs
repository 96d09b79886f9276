//! Deciding whether two virtually free groups have the same ∀∃-first-order
//! theory, with machine-checkable certificates.
//!
//! Two non-elementary virtually free groups share their ∀∃-theory exactly
//! when some multiple legal extension of the first is isomorphic to some
//! multiple legal extension of the second. The decision procedure first
//! compares the counting invariants (a mismatch soundly refutes), then
//! enumerates extension chains from both sides breadth-first, deduplicated
//! by canonical key, and reports a verified [`Certificate`] on the first
//! cross-side match.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{class_table, invariants, normalizer, AnalysisError, InvariantVector};
use crate::gog::{GogError, GraphOfGroups};
use crate::iso::{
    canonical_key, group_isomorphic, CanonKey, IsoVerdict, IsoWitness, DEFAULT_ISO_BUDGET,
};
use crate::legal::{
    apply_legal_large, apply_legal_small, legal_large_candidates, legal_small_candidates,
    LegalError, LegalLargeStep, LegalSmallStep,
};
use crate::splittings::{reduce, slide_neighbors};

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("extension enumeration exceeded the budget of {budget} chains")]
    BudgetExceeded { budget: usize },
    #[error("certificate rejected at {stage}: {detail}")]
    BadCertificate { stage: String, detail: String },
    #[error(transparent)]
    Gog(#[from] GogError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Legal(#[from] LegalError),
}

/// One move of an extension chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ChainStep {
    Large(LegalLargeStep),
    Small(LegalSmallStep),
}

/// A multiple legal extension: a base graph, an ordered list of legal steps,
/// and the resulting graph. Zero-length chains are permitted (the result is
/// the base itself).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionChain {
    pub base: GraphOfGroups,
    pub steps: Vec<ChainStep>,
    pub result: GraphOfGroups,
}

impl ExtensionChain {
    /// The zero-length chain at `g`.
    pub fn trivial(g: &GraphOfGroups) -> ExtensionChain {
        ExtensionChain {
            base: g.clone(),
            steps: Vec::new(),
            result: g.clone(),
        }
    }

    /// Re-apply every step to the base, re-deriving legality at each stage,
    /// and return the final graph. Legality is never inherited from the
    /// recorded chain: each `apply_legal_*` call re-checks its step against
    /// the candidates of the current graph.
    pub fn replay(&self) -> Result<GraphOfGroups, LegalError> {
        let mut cur = self.base.clone();
        for step in &self.steps {
            cur = match step {
                ChainStep::Large(s) => apply_legal_large(&cur, s)?,
                ChainStep::Small(s) => apply_legal_small(&cur, s)?,
            };
        }
        Ok(cur)
    }
}

/// A verified equivalence certificate: one extension chain per input and an
/// isomorphism witness between the two chain results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub chain1: ExtensionChain,
    pub chain2: ExtensionChain,
    pub iso: IsoWitness,
}

/// The theoretical search bound B = N·(R + o!) + N, where N is the larger
/// number of conjugacy classes of finite subgroups, R the larger maximal
/// normalizer generator count, and o the larger maximal finite-subgroup
/// order of the two inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub r: usize,
    pub o: usize,
    /// Exact value of N·(R + o!) + N.
    pub value: BigUint,
    /// Symbolic rendering, e.g. "3·(26 + 25!) + 3".
    pub symbolic: String,
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Factorials blow up quickly; past 12! the decimal expansion stops
        // being informative and the symbolic form is reported instead.
        if self.o > 12 {
            write!(f, "{} (≈ astronomically large)", self.symbolic)
        } else {
            write!(f, "{} = {}", self.symbolic, self.value)
        }
    }
}

/// Reasons for a sound No verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoReason {
    /// The counting invariants differ; `which` names the first mismatching
    /// component with both values.
    InvariantMismatch { which: String },
    /// Both extension orbits were enumerated to saturation (a fixed point
    /// under all legal steps, which exhausts the theoretical bound) without
    /// intersecting.
    ExhaustedWithinBound,
}

/// Outcome of [`decide`]. Every variant records the bound report (and with
/// it the audit value R).
#[derive(Debug, Clone)]
pub enum Verdict {
    Yes {
        certificate: Box<Certificate>,
        bound: BoundReport,
    },
    No {
        reason: NoReason,
        bound: BoundReport,
    },
    Unknown {
        /// Chain depth fully explored on both sides.
        explored_depth: usize,
        /// True when the chain budget (not the depth) cut the search.
        truncated: bool,
        bound: BoundReport,
    },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }
}

/// Search configuration for [`decide`].
#[derive(Debug, Clone, Copy)]
pub struct DecideConfig {
    /// Maximal chain length explored per side.
    pub depth: usize,
    /// Maximal total number of stored chains across both sides.
    pub budget: usize,
    /// Budget for the slide-orbit isomorphism search on matched results.
    pub iso_budget: usize,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig {
            depth: 3,
            budget: 10_000,
            iso_budget: DEFAULT_ISO_BUDGET,
        }
    }
}

/// Compare the invariant vectors and return the first mismatching component
/// ("K", "n1".."n5", or "profile") with both values. `None` means the fast
/// screen cannot distinguish the groups. A mismatch is a sound No.
pub fn quick_refute(
    g1: &GraphOfGroups,
    g2: &GraphOfGroups,
) -> Result<Option<String>, AnalysisError> {
    let a = invariants(g1)?;
    let b = invariants(g2)?;
    Ok(invariant_mismatch(&a, &b))
}

fn invariant_mismatch(a: &InvariantVector, b: &InvariantVector) -> Option<String> {
    let scalars = [
        ("K", a.k, b.k),
        ("n1", a.n1, b.n1),
        ("n2", a.n2, b.n2),
        ("n3", a.n3, b.n3),
        ("n4", a.n4, b.n4),
        ("n5", a.n5, b.n5),
    ];
    for (name, x, y) in scalars {
        if x != y {
            return Some(format!("{name}: {x} vs {y}"));
        }
    }
    if a.profile != b.profile {
        return Some(format!("profile: {:?} vs {:?}", a.profile, b.profile));
    }
    None
}

fn factorial_big(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product::<BigUint>().max(BigUint::from(1u8))
}

/// Compute the theoretical bound B = N·(R + o!) + N for the pair.
pub fn compute_bound(g1: &GraphOfGroups, g2: &GraphOfGroups) -> BoundReport {
    let mut n = 0usize;
    let mut r = 0usize;
    let mut o = 1usize;
    for g in [g1, g2] {
        let table = class_table(g);
        n = n.max(table.classes.len());
        o = o.max(g.k_of());
        for class in &table.classes {
            r = r.max(normalizer(g, &table, class.id).generators.len());
        }
    }
    let big_n = BigUint::from(n);
    let value = &big_n * (BigUint::from(r) + factorial_big(o)) + &big_n;
    BoundReport {
        n,
        r,
        o,
        value,
        symbolic: format!("{n}·({r} + {o}!) + {n}"),
    }
}

/// All legal steps available at `g`, large candidates first. An elementary
/// group contributes no large candidates. The boolean is true when every
/// candidate step could actually be applied (no configuration fell outside
/// the implemented small-extension cases).
fn step_candidates(g: &GraphOfGroups) -> Result<Vec<ChainStep>, DecideError> {
    let mut out = Vec::new();
    match legal_large_candidates(g) {
        Ok(steps) => out.extend(steps.into_iter().map(ChainStep::Large)),
        Err(LegalError::ElementaryGroup) => {}
        Err(e) => return Err(e.into()),
    }
    match legal_small_candidates(g) {
        Ok(steps) => out.extend(steps.into_iter().map(ChainStep::Small)),
        Err(LegalError::ElementaryGroup) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

/// Apply one step; `Ok(None)` marks a candidate whose configuration the
/// small-extension implementation does not cover (the caller must then not
/// claim exhaustion).
fn apply_step(g: &GraphOfGroups, step: &ChainStep) -> Result<Option<GraphOfGroups>, DecideError> {
    let applied = match step {
        ChainStep::Large(s) => apply_legal_large(g, s),
        ChainStep::Small(s) => apply_legal_small(g, s),
    };
    match applied {
        Ok(h) => Ok(Some(h)),
        Err(LegalError::Unsupported { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Canonical key of the reduced form, the deduplication key for chain
/// results.
fn reduced_key(g: &GraphOfGroups) -> Result<CanonKey, GogError> {
    let (r, _) = reduce(g)?;
    Ok(canonical_key(&r))
}

/// Enumerate all extension chains from `g` of length at most `depth`,
/// breadth-first, deduplicated by the canonical key of the (reduced) chain
/// result. The zero-length chain is always first; the order is
/// deterministic. Errors with [`DecideError::BudgetExceeded`] when more
/// than `budget` chains would be kept.
pub fn enumerate_extensions(
    g: &GraphOfGroups,
    depth: usize,
    budget: usize,
) -> Result<Vec<ExtensionChain>, DecideError> {
    g.validate().map_err(|mut e| DecideError::Gog(e.remove(0)))?;
    let mut chains = vec![ExtensionChain::trivial(g)];
    let mut seen: HashMap<CanonKey, usize> = HashMap::new();
    seen.insert(reduced_key(g)?, 0);
    if chains.len() > budget {
        return Err(DecideError::BudgetExceeded { budget });
    }
    let mut level_start = 0usize;
    for _ in 0..depth {
        let level_end = chains.len();
        for i in level_start..level_end {
            let cur = chains[i].result.clone();
            for step in step_candidates(&cur)? {
                let Some(next) = apply_step(&cur, &step)? else {
                    continue;
                };
                let key = reduced_key(&next)?;
                if seen.contains_key(&key) {
                    continue;
                }
                if chains.len() + 1 > budget {
                    return Err(DecideError::BudgetExceeded { budget });
                }
                let mut steps = chains[i].steps.clone();
                steps.push(step);
                seen.insert(key, chains.len());
                chains.push(ExtensionChain {
                    base: g.clone(),
                    steps,
                    result: next,
                });
            }
        }
        if chains.len() == level_end {
            break; // fixed point: no chain of any greater length is new
        }
        level_start = level_end;
    }
    Ok(chains)
}

/// Decide whether `g1` and `g2` have the same ∀∃-theory.
///
/// The invariant screen runs first: any mismatch is a sound No without
/// enumeration. Otherwise both sides are expanded level by level into one
/// shared canonical-key store, so the pairwise isomorphism test degenerates
/// to a key intersection; the first cross-side hit is upgraded to a
/// verified [`Certificate`]. A No by exhaustion is only returned when both
/// orbits reached a fixed point with every candidate step applied; running
/// out of depth or budget yields an honest Unknown.
pub fn decide(
    g1: &GraphOfGroups,
    g2: &GraphOfGroups,
    config: &DecideConfig,
) -> Result<Verdict, DecideError> {
    for g in [g1, g2] {
        g.validate().map_err(|mut e| DecideError::Gog(e.remove(0)))?;
    }
    let bound = compute_bound(g1, g2);
    if let Some(which) = quick_refute(g1, g2)? {
        return Ok(Verdict::No {
            reason: NoReason::InvariantMismatch { which },
            bound,
        });
    }

    // Shared key store: key -> (side, chain index on that side).
    let mut chains: [Vec<ExtensionChain>; 2] =
        [vec![ExtensionChain::trivial(g1)], vec![ExtensionChain::trivial(g2)]];
    let mut keys: HashMap<CanonKey, [Option<usize>; 2]> = HashMap::new();
    keys.entry(reduced_key(g1)?).or_default()[0] = Some(0);
    keys.entry(reduced_key(g2)?).or_default()[1] = Some(0);

    let certify = |c1: &ExtensionChain,
                   c2: &ExtensionChain,
                   bound: &BoundReport|
     -> Result<Option<Verdict>, DecideError> {
        match group_isomorphic(&c1.result, &c2.result, config.iso_budget)? {
            IsoVerdict::Yes(w) => Ok(Some(Verdict::Yes {
                certificate: Box::new(Certificate {
                    chain1: c1.clone(),
                    chain2: c2.clone(),
                    iso: *w,
                }),
                bound: bound.clone(),
            })),
            // A key match that the orbit search cannot confirm within
            // budget: keep searching rather than claim anything.
            _ => Ok(None),
        }
    };

    // Root check.
    if let Some(&[Some(i), Some(j)]) = keys.values().find(|s| s[0].is_some() && s[1].is_some()) {
        if let Some(v) = certify(&chains[0][i], &chains[1][j], &bound)? {
            return Ok(v);
        }
    }

    let mut saturated = [false; 2];
    let mut all_applied = [true; 2];
    let mut level_start = [0usize; 2];
    let mut explored_depth = 0usize;
    for _ in 0..config.depth {
        let mut progressed = false;
        for side in 0..2 {
            if saturated[side] {
                continue;
            }
            let level_end = chains[side].len();
            for i in level_start[side]..level_end {
                let cur = chains[side][i].result.clone();
                for step in step_candidates(&cur)? {
                    let Some(next) = apply_step(&cur, &step)? else {
                        all_applied[side] = false;
                        continue;
                    };
                    let key = reduced_key(&next)?;
                    let slot = keys.entry(key).or_default();
                    if slot[side].is_some() {
                        continue;
                    }
                    if chains[0].len() + chains[1].len() + 1 > config.budget {
                        return Ok(Verdict::Unknown {
                            explored_depth,
                            truncated: true,
                            bound,
                        });
                    }
                    let mut steps = chains[side][i].steps.clone();
                    steps.push(step);
                    slot[side] = Some(chains[side].len());
                    let other = slot[1 - side];
                    chains[side].push(ExtensionChain {
                        base: chains[side][i].base.clone(),
                        steps,
                        result: next,
                    });
                    if let Some(j) = other {
                        let (a, b) = if side == 0 {
                            (chains[0].len() - 1, j)
                        } else {
                            (j, chains[1].len() - 1)
                        };
                        if let Some(v) = certify(&chains[0][a], &chains[1][b], &bound)? {
                            return Ok(v);
                        }
                    }
                }
            }
            if chains[side].len() == level_end {
                saturated[side] = true;
            }
            level_start[side] = level_end;
            progressed = true;
        }
        if !progressed {
            break;
        }
        explored_depth += 1;
    }

    if saturated[0] && saturated[1] && all_applied[0] && all_applied[1] {
        // Both orbits are closed under every legal step, so every multiple
        // legal extension of either side (of any length, in particular all
        // of them up to the bound B) is already present and no two are
        // isomorphic.
        return Ok(Verdict::No {
            reason: NoReason::ExhaustedWithinBound,
            bound,
        });
    }
    Ok(Verdict::Unknown {
        explored_depth,
        truncated: false,
        bound,
    })
}

fn bad(stage: &str, detail: impl Into<String>) -> DecideError {
    DecideError::BadCertificate {
        stage: stage.to_string(),
        detail: detail.into(),
    }
}

/// Independently re-verify a certificate using only the legality, analysis
/// and isomorphism checkers — never any state of the search that produced
/// it. The error names the first failing stage.
pub fn verify_certificate(cert: &Certificate) -> Result<(), DecideError> {
    for (name, chain) in [("chain1", &cert.chain1), ("chain2", &cert.chain2)] {
        chain
            .base
            .validate()
            .map_err(|e| bad(name, format!("invalid base: {:?}", e[0])))?;
        let replayed = chain
            .replay()
            .map_err(|e| bad(name, format!("illegal step: {e}")))?;
        if reduced_key(&replayed)? != reduced_key(&chain.result)? {
            return Err(bad(name, "recorded result differs from the replayed chain"));
        }
        let base_inv = invariants(&chain.base)?;
        let result_inv = invariants(&chain.result)?;
        if base_inv != result_inv {
            return Err(bad(name, "chain does not preserve the invariants"));
        }
    }
    // The isomorphism witness: both slide paths must start at the reduced
    // chain results, advance by single slide moves, and end in graphs
    // related by the recorded graph-of-groups isomorphism.
    for (name, chain, path) in [
        ("path1", &cert.chain1, &cert.iso.path1),
        ("path2", &cert.chain2, &cert.iso.path2),
    ] {
        let (root, _) = reduce(&chain.result)?;
        let Some(first) = path.first() else {
            return Err(bad(name, "empty slide path"));
        };
        if *first != root {
            return Err(bad(name, "path does not start at the reduced result"));
        }
        for (i, pair) in path.windows(2).enumerate() {
            let neighbors = slide_neighbors(&pair[0])?;
            if !neighbors.iter().any(|(_, h, _)| *h == pair[1]) {
                return Err(bad(name, format!("step {i} is not a slide move")));
            }
        }
    }
    let end1 = cert.iso.path1.last().expect("nonempty path");
    let end2 = cert.iso.path2.last().expect("nonempty path");
    if !cert.iso.iso.verify(end1, end2) {
        return Err(bad("iso", "the isomorphism data fails verification"));
    }
    Ok(())
}
