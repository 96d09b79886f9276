//! End-to-end tests of the `vfree` binary and the GFG file format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vfree::decide::{verify_certificate, Certificate};
use vfree::iso::canonical_key;
use vfree_cli::{corpus, gfg};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vfree"))
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(name: &str) -> String {
    corpus_dir().join(name).to_string_lossy().into_owned()
}

#[test]
fn gfg_round_trip_preserves_the_canonical_key() {
    for (name, g) in corpus::entries() {
        let text = gfg::to_json(&g);
        let back = gfg::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(canonical_key(&g), canonical_key(&back), "{name}");
    }
}

#[test]
fn corpus_has_at_least_nine_validating_entries() {
    let entries = corpus::entries();
    assert!(entries.len() >= 9, "only {} entries", entries.len());
    for (name, g) in &entries {
        assert!(g.validate().is_ok(), "{name} does not validate");
    }
}

#[test]
fn shipped_corpus_files_match_the_built_in_entries() {
    for (name, g) in corpus::entries() {
        let file = corpus_dir().join(format!("{name}.gfg"));
        let text = std::fs::read_to_string(&file)
            .unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        let parsed = gfg::from_json(&text).unwrap();
        assert_eq!(canonical_key(&parsed), canonical_key(&g), "{name}");
    }
}

#[test]
fn shipped_analysis_fixtures_match_reanalysis() {
    for (name, _) in corpus::entries() {
        let fixture = corpus_dir().join(format!("{name}.analysis.json"));
        let expected = std::fs::read_to_string(&fixture)
            .unwrap_or_else(|e| panic!("{}: {e}", fixture.display()));
        let out = run(&["analyze", &path(&format!("{name}.gfg"))]);
        assert!(out.status.success(), "{name}");
        assert_eq!(stdout_of(&out).trim(), expected.trim(), "{name}");
    }
}

#[test]
fn analyze_is_byte_stable() {
    let a = run(&["analyze", &path("sl2z.gfg")]);
    let b = run(&["analyze", &path("sl2z.gfg")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_reports_psl2z_invariants() {
    let out = run(&["analyze", &path("psl2z.gfg")]);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["k"], 3);
    assert_eq!(report["n1"], 3);
}

#[test]
fn validate_rejects_malformed_input_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gfg");
    std::fs::write(&bad, "{\"version\": 1, \"vertices\": [], \"edges\": []}").unwrap();
    // An empty graph has no vertices, which fails validation.
    let out = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = run(&["validate", dir.path().join("nope.gfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    let ok = run(&["validate", &path("d-infinity.gfg")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_of(&ok).trim(), "OK");
}

#[test]
fn decide_yes_on_the_semidirect_pair_with_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert_path = dir.path().join("pair.cert.json");
    let out = run(&[
        "decide",
        &path("n25x6.gfg"),
        &path("n25x11.gfg"),
        "--cert",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(text.lines().next(), Some("YES"));
    let cert: Certificate =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    verify_certificate(&cert).unwrap();
}

#[test]
fn decide_no_on_invariant_mismatch() {
    let out = run(&["decide", &path("psl2z.gfg"), &path("sl2z.gfg")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(text.lines().next(), Some("NO"));
    assert!(text.contains("K: 3 vs 6"));
}

#[test]
fn decide_unknown_exits_3() {
    let out = run(&[
        "decide",
        &path("n25x6.gfg"),
        &path("n25x11.gfg"),
        "--depth",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_of(&out).lines().next(), Some("UNKNOWN"));
}

#[test]
fn isomorphic_answers_follow_the_slide_search() {
    let yes = run(&["isomorphic", &path("sl2z.gfg"), &path("sl2z.gfg")]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout_of(&yes).lines().next(), Some("YES"));
    let no = run(&["isomorphic", &path("n25x6.gfg"), &path("n25x11.gfg")]);
    assert_eq!(no.status.code(), Some(0));
    assert_eq!(stdout_of(&no).lines().next(), Some("NO"));
}

#[test]
fn export_dot_labels_the_sl2z_edge_with_2() {
    let out = run(&["export-dot", &path("sl2z.gfg")]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("label=\"e0: 2\""), "{text}");
}

#[test]
fn word_normalizes_and_classifies() {
    // c·c = c² in the Z/3 factor: elliptic.
    let out = run(&["word", &path("psl2z.gfg"), "v0.1 v0.1"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("v0.2"));
    assert_eq!(lines.next(), Some("elliptic"));
    // The product of the two free-factor involutions is hyperbolic.
    let out = run(&["word", &path("d-infinity.gfg"), "v0.1 e0- v1.1 e0+"]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().nth(1), Some("hyperbolic"));
}

#[test]
fn extensions_report_lists_large_and_small_candidates() {
    let out = run(&["extensions", &path("sl2z.gfg")]);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["elementary"], false);
    assert_eq!(report["large"].as_array().unwrap().len(), 1);
    assert_eq!(report["large"][0]["order"], 2);
    let out = run(&["extensions", &path("n25x6.gfg"), "--kind", "small"]);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["small"].as_array().unwrap().len(), 2);
}

#[test]
fn cylinders_report_covers_all_edges() {
    let out = run(&["cylinders", &path("f2-x-z2.gfg")]);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let cyls = report["cylinders"].as_array().unwrap();
    let total: usize = cyls.iter().map(|c| c["edges"].as_array().unwrap().len()).sum();
    assert_eq!(total, 2);
}

#[test]
fn zeta_and_eval_finite_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let sexp = dir.path().join("zeta.sexp");
    let out = run(&["zeta", &path("trivial.gfg"), "-o", sexp.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&sexp).unwrap();
    vfree::formulas::from_sexp(text.trim()).unwrap();

    // The instability sentence: true on Z/2×Z/2, false on S₃.
    let inst = dir.path().join("inst.sexp");
    std::fs::write(
        &inst,
        vfree::formulas::to_sexp(&vfree::formulas::instable_sentence()),
    )
    .unwrap();
    let klein = dir.path().join("klein.grp");
    std::fs::write(&klein, r#"{"degree":4,"generators":[[1,0,2,3],[0,1,3,2]]}"#).unwrap();
    let s3 = dir.path().join("s3.grp");
    std::fs::write(&s3, r#"{"degree":3,"generators":[[1,2,0],[1,0,2]]}"#).unwrap();
    let t = run(&["eval-finite", inst.to_str().unwrap(), klein.to_str().unwrap()]);
    assert_eq!(stdout_of(&t).trim(), "true");
    let f = run(&["eval-finite", inst.to_str().unwrap(), s3.to_str().unwrap()]);
    assert_eq!(stdout_of(&f).trim(), "false");
}
