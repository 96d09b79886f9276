//! `vfree`: analyze virtually free groups given as graphs of finite groups
//! (.gfg files) and decide ∀∃-equivalence with verifiable certificates.
//!
//! Exit codes: 0 success / decided, 2 input or validation error, 3 unknown
//! (budget or depth exhausted without a verdict).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use vfree::analysis::{class_table, invariants, is_hyperbolic, normalizer};
use vfree::decide::{decide, verify_certificate, DecideConfig, NoReason, Verdict};
use vfree::formulas::{emit, evaluate_finite, from_sexp, symbol_count, to_sexp, Sentence};
use vfree::gog::{Dir, GraphOfGroups, Token, Word};
use vfree::iso::{group_isomorphic, IsoVerdict};
use vfree::legal::{legal_large_candidates, legal_small_candidates, LegalError};
use vfree::splittings::{cylinders, tree_of_cylinders};
use vfree::vcyc::VCShape;
use vfree_cli::corpus;
use vfree_cli::gfg;

#[derive(Parser)]
#[command(name = "vfree", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtKind {
    Large,
    Small,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a .gfg file.
    Validate { file: PathBuf },
    /// Report the counting invariants and the finite-subgroup classes.
    Analyze { file: PathBuf },
    /// Normalize a word (tokens: v<vertex>.<element>, e<edge>+, e<edge>-).
    Word { file: PathBuf, word: String },
    /// List the legal extension candidates.
    Extensions {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<ExtKind>,
    },
    /// Decide abstract isomorphism via the slide-orbit search.
    Isomorphic {
        a: PathBuf,
        b: PathBuf,
        /// Visited-state budget of the orbit search.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Decide ∀∃-equivalence; first stdout line is YES, NO or UNKNOWN.
    Decide {
        a: PathBuf,
        b: PathBuf,
        /// Maximal extension-chain length per side.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Maximal number of stored chains across both sides.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Write the YES certificate to this JSON file.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Report the cylinder decomposition (and tree of cylinders with --tree).
    Cylinders {
        file: PathBuf,
        #[arg(long)]
        tree: bool,
    },
    /// Emit the sentence ζ_G in S-expression form.
    Zeta {
        file: PathBuf,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a closed .sexp sentence over a finite permutation group
    /// (.grp: JSON {"degree": d, "generators": [[..], ..]}).
    EvalFinite {
        formula: PathBuf,
        group: PathBuf,
        /// Cap on the number of assignments of the deepest quantifier nest.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u128,
    },
    /// Render the graph of groups as DOT.
    ExportDot { file: PathBuf },
    /// List the built-in corpus, or write it as .gfg + fixture files.
    Corpus {
        /// Directory to write <name>.gfg and <name>.analysis.json into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Uniform input-error reporting: anything wrong with an input file is
/// exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn load_graph(path: &Path) -> Result<GraphOfGroups, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    gfg::from_json(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn render_word(g: &GraphOfGroups, w: &Word) -> String {
    if w.0.is_empty() {
        return "1".into();
    }
    let _ = g;
    w.0.iter()
        .map(|t| match *t {
            Token::VertexElt(v, x) => format!("v{v}.{x}"),
            Token::EdgeStep(e, Dir::Plus) => format!("e{e}+"),
            Token::EdgeStep(e, Dir::Minus) => format!("e{e}-"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_word(g: &GraphOfGroups, text: &str) -> Result<Word, InputError> {
    let mut tokens = Vec::new();
    for piece in text.split_whitespace() {
        if piece == "1" {
            continue;
        }
        let tok = if let Some(rest) = piece.strip_prefix('v') {
            let (v, x) = rest
                .split_once('.')
                .ok_or_else(|| InputError(format!("bad token {piece:?}: expected v<id>.<elt>")))?;
            Token::VertexElt(
                v.parse().map_err(|_| InputError(format!("bad vertex id in {piece:?}")))?,
                x.parse().map_err(|_| InputError(format!("bad element in {piece:?}")))?,
            )
        } else if let Some(rest) = piece.strip_prefix('e') {
            let (id, dir) = if let Some(id) = rest.strip_suffix('+') {
                (id, Dir::Plus)
            } else if let Some(id) = rest.strip_suffix('-') {
                (id, Dir::Minus)
            } else {
                return Err(InputError(format!("bad token {piece:?}: expected e<id>+ or e<id>-")));
            };
            Token::EdgeStep(
                id.parse().map_err(|_| InputError(format!("bad edge id in {piece:?}")))?,
                dir,
            )
        } else {
            return Err(InputError(format!("bad token {piece:?}")));
        };
        match tok {
            Token::VertexElt(v, x) => {
                let gv = g
                    .vertices
                    .get(&v)
                    .ok_or_else(|| InputError(format!("unknown vertex {v}")))?;
                if x >= gv.order() {
                    return Err(InputError(format!("element {x} out of range at vertex {v}")));
                }
            }
            Token::EdgeStep(e, _) => {
                if !g.edges.iter().any(|edge| edge.id == e) {
                    return Err(InputError(format!("unknown edge {e}")));
                }
            }
        }
        tokens.push(tok);
    }
    Ok(Word(tokens))
}

fn analyze_report(g: &GraphOfGroups) -> Result<serde_json::Value, InputError> {
    let inv = invariants(g)?;
    let table = class_table(g);
    let classes: Vec<serde_json::Value> = table
        .classes
        .iter()
        .map(|c| {
            let ninfo = normalizer(g, &table, c.id);
            json!({
                "id": c.id,
                "vertex": c.vertex,
                "order": c.order,
                "normalizer_kind": ninfo.kind,
            })
        })
        .collect();
    Ok(json!({
        "k": inv.k,
        "n1": inv.n1,
        "n2": inv.n2,
        "n3": inv.n3,
        "n4": inv.n4,
        "n5": inv.n5,
        "profile": inv.profile,
        "classes": classes,
        "notes": [
            "small-extension candidates are generated from the edge-group classes of the reduced splitting; a finite subgroup with infinite virtually cyclic normalizer that is not such an edge class is not considered a candidate",
        ],
    }))
}

fn extensions_report(
    g: &GraphOfGroups,
    kind: Option<ExtKind>,
) -> Result<serde_json::Value, InputError> {
    let mut out = BTreeMap::new();
    let mut elementary = false;
    if kind != Some(ExtKind::Small) {
        let large = match legal_large_candidates(g) {
            Ok(steps) => steps
                .iter()
                .map(|s| {
                    json!({
                        "class_id": s.class.id,
                        "vertex": s.class.vertex,
                        "order": s.class.order,
                    })
                })
                .collect(),
            Err(LegalError::ElementaryGroup) => {
                elementary = true;
                Vec::new()
            }
            Err(e) => return Err(e.into()),
        };
        out.insert("large", serde_json::Value::Array(large));
    }
    if kind != Some(ExtKind::Large) {
        let small = legal_small_candidates(g)?
            .iter()
            .map(|s| {
                let shape = match s.partner.shape {
                    VCShape::Cyclic { .. } => "cyclic",
                    VCShape::Dihedral { .. } => "dihedral",
                };
                json!({
                    "class_id": s.class.id,
                    "order": s.class.order,
                    "partner_shape": shape,
                })
            })
            .collect();
        out.insert("small", serde_json::Value::Array(small));
    }
    let mut report = json!(out);
    report["elementary"] = json!(elementary);
    Ok(report)
}

fn run() -> Result<ExitCode, InputError> {
    match Cli::parse().cmd {
        Cmd::Validate { file } => {
            load_graph(&file)?;
            println!("OK");
        }
        Cmd::Analyze { file } => {
            let g = load_graph(&file)?;
            println!("{}", serde_json::to_string_pretty(&analyze_report(&g)?).unwrap());
        }
        Cmd::Word { file, word } => {
            let g = load_graph(&file)?;
            let w = parse_word(&g, &word)?;
            let nf = g.normal_form(&w)?;
            let canon = g.nf_to_word(&nf);
            let kind = if canon.0.is_empty() {
                "trivial"
            } else if is_hyperbolic(&g, &canon)? {
                "hyperbolic"
            } else {
                "elliptic"
            };
            println!("{}", render_word(&g, &canon));
            println!("{kind}");
        }
        Cmd::Extensions { file, kind } => {
            let g = load_graph(&file)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&extensions_report(&g, kind)?).unwrap()
            );
        }
        Cmd::Isomorphic { a, b, budget } => {
            let ga = load_graph(&a)?;
            let gb = load_graph(&b)?;
            match group_isomorphic(&ga, &gb, budget)? {
                IsoVerdict::Yes(w) => {
                    println!("YES");
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "slide_moves": [w.path1.len() - 1, w.path2.len() - 1],
                            "iso": w.iso,
                        }))
                        .unwrap()
                    );
                }
                IsoVerdict::No { provenance } => {
                    println!("NO");
                    println!("{provenance}");
                }
                IsoVerdict::Unknown => {
                    println!("UNKNOWN");
                    println!("visited-state budget {budget} exceeded");
                    return Ok(ExitCode::from(3));
                }
            }
        }
        Cmd::Decide {
            a,
            b,
            depth,
            budget,
            cert,
        } => {
            let ga = load_graph(&a)?;
            let gb = load_graph(&b)?;
            let config = DecideConfig {
                depth,
                budget,
                ..DecideConfig::default()
            };
            match decide(&ga, &gb, &config)? {
                Verdict::Yes { certificate, bound } => {
                    println!("YES");
                    println!(
                        "chains: ({}, {}); bound B = {bound}",
                        certificate.chain1.steps.len(),
                        certificate.chain2.steps.len()
                    );
                    verify_certificate(&certificate)?;
                    if let Some(path) = cert {
                        std::fs::write(
                            &path,
                            serde_json::to_string_pretty(&*certificate).unwrap(),
                        )
                        .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
                        println!("certificate written to {}", path.display());
                    }
                }
                Verdict::No { reason, bound } => {
                    println!("NO");
                    match reason {
                        NoReason::InvariantMismatch { which } => {
                            println!("invariant mismatch — {which}; bound B = {bound}");
                        }
                        NoReason::ExhaustedWithinBound => {
                            println!("extension orbits exhausted within the bound B = {bound}");
                        }
                    }
                }
                Verdict::Unknown {
                    explored_depth,
                    truncated,
                    bound,
                } => {
                    println!("UNKNOWN");
                    let cause = if truncated { "chain budget" } else { "depth" };
                    println!(
                        "explored depth {explored_depth}, stopped by {cause}; bound B = {bound}"
                    );
                    return Ok(ExitCode::from(3));
                }
            }
        }
        Cmd::Cylinders { file, tree } => {
            let g = load_graph(&file)?;
            if tree {
                let toc = tree_of_cylinders(&g)?;
                println!("{}", serde_json::to_string_pretty(&toc).unwrap());
            } else {
                let dec = cylinders(&g)?;
                println!("{}", serde_json::to_string_pretty(&dec).unwrap());
            }
        }
        Cmd::Zeta { file, output } => {
            let g = load_graph(&file)?;
            let emitted = emit(&g, Sentence::Zeta)?;
            if emitted.approximate {
                eprintln!("warning: a chain length could not be certified maximal; the emitted sentence is approximate");
            }
            let text = to_sexp(&emitted.formula);
            match output {
                Some(path) => std::fs::write(&path, text + "\n")
                    .map_err(|e| InputError(format!("{}: {e}", path.display())))?,
                None => println!("{text}"),
            }
        }
        Cmd::EvalFinite {
            formula,
            group,
            budget,
        } => {
            let ftext = std::fs::read_to_string(&formula)
                .map_err(|e| InputError(format!("{}: {e}", formula.display())))?;
            let f = from_sexp(ftext.trim())?;
            let gtext = std::fs::read_to_string(&group)
                .map_err(|e| InputError(format!("{}: {e}", group.display())))?;
            let spec: gfg::GroupSpec = serde_json::from_str(&gtext)
                .map_err(|e| InputError(format!("{}: {e}", group.display())))?;
            let h = spec.build("group")?;
            match evaluate_finite(&f, &h, budget) {
                Ok(v) => println!("{v}"),
                Err(vfree::formulas::FormulaError::BudgetExceeded { needed, budget }) => {
                    println!("UNKNOWN");
                    println!("evaluation needs {needed} assignments, budget is {budget}");
                    return Ok(ExitCode::from(3));
                }
                Err(e) => return Err(e.into()),
            }
            let _ = symbol_count(&f);
        }
        Cmd::ExportDot { file } => {
            let g = load_graph(&file)?;
            print!("{}", g.to_dot());
        }
        Cmd::Corpus { out } => match out {
            None => {
                for (name, _) in corpus::entries() {
                    println!("{name}");
                }
            }
            Some(dir) => {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
                for (name, g) in corpus::entries() {
                    let gfg_path = dir.join(format!("{name}.gfg"));
                    std::fs::write(&gfg_path, gfg::to_json(&g) + "\n")
                        .map_err(|e| InputError(format!("{}: {e}", gfg_path.display())))?;
                    let fx_path = dir.join(format!("{name}.analysis.json"));
                    let report = serde_json::to_string_pretty(&analyze_report(&g)?).unwrap();
                    std::fs::write(&fx_path, report + "\n")
                        .map_err(|e| InputError(format!("{}: {e}", fx_path.display())))?;
                    println!("{name} -> {}", gfg_path.display());
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
