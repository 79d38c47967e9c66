use std::path::{Path, PathBuf};

use ibpkit::cli::{self, Outcome};
use ibpkit::ibp0::Factor;
use ibpkit::io::{self, Document};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_file(name: &str) -> String {
    root().join("corpus").join(name).to_string_lossy().into_owned()
}

fn fixture(name: &str) -> String {
    root().join("crates/core/tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn ibpkit(args: &[&str]) -> Outcome {
    cli::run(std::iter::once("ibpkit").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn without_timing(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"elapsed_ms\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn lukasiewicz_three_fails_dl_at_one_half() {
    let out = ibpkit(&["validate", "--ibp0", &fixture("lukasiewicz3.json")]);
    assert_eq!(out.status, 1);
    let report = json(&out);
    let failed: Vec<&Value> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["verdict"] == "fail")
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["axiom"], "DL");
    assert_eq!(failed[0]["witness"], serde_json::json!(["1"]));
}

#[test]
fn lukasiewicz_three_is_still_mtl() {
    assert_eq!(ibpkit(&["validate", &fixture("lukasiewicz3.json")]).status, 0);
}

#[test]
fn split_on_chang_prints_weights_and_zero_residuals() {
    let out = ibpkit(&[
        "hyperstate",
        "split",
        &corpus_file("algebras/chang1.json"),
        &corpus_file("hyperstates/chang1_lambda2.json"),
        "--window",
        "8",
    ]);
    assert_eq!(out.status, 0, "{}", out.stdout);
    let report = json(&out);
    assert_eq!(report["data"]["lambda"], serde_json::json!(["2"]));
    assert_eq!(report["data"]["measure"], serde_json::json!(["1"]));
    let residuals = report["data"]["residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 18);
    assert!(residuals.iter().all(|r| r["residual"] == "0+e0"));
    let pos3 = residuals.iter().find(|r| r["element"] == "pos(3)").unwrap();
    assert_eq!(pos3["value"], "1+e-6");
}

#[test]
fn envelope_of_the_idempotent_pair_is_trivial() {
    let out = ibpkit(&["grothendieck", &corpus_file("lmonoids/idempotent2.json")]);
    assert_eq!(out.status, 0, "{}", out.stdout);
    let data = &json(&out)["data"];
    assert_eq!(data["trivial"], true);
    assert_eq!(data["h_injective"], false);
    assert_eq!(data["cancellative"], false);
}

#[test]
fn out_of_range_cell_is_named() {
    let out = ibpkit(&["validate", &fixture("out_of_range.json")]);
    assert_eq!(out.status, 2);
    assert!(json(&out)["error"].as_str().unwrap().contains("times[1][2]"));
}

#[test]
fn zero_hyperstate_fails_normalization() {
    let out = ibpkit(&[
        "hyperstate",
        "validate",
        &corpus_file("algebras/boolean2.json"),
        &fixture("zero_hyperstate.json"),
        "--format",
        "tsv",
    ]);
    assert_eq!(out.status, 1);
    assert!(out.stdout.lines().any(|l| l.starts_with("s1\tfail\t")), "{}", out.stdout);
}

#[test]
fn cancellative_form_needs_a_cone_radical() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("p.json");
    std::fs::write(&state, r#"{"measure": {"0": "1"}, "lambda": []}"#).unwrap();
    let out = ibpkit(&[
        "hyperstate",
        "cancellative",
        &corpus_file("algebras/rot_goedel3.json"),
        state.to_str().unwrap(),
    ]);
    assert_eq!(out.status, 2);
    assert!(out.stderr.contains("not cancellative"), "{}", out.stderr);
}

#[test]
fn every_hyperstate_verb_passes_on_the_product_fixture() {
    let algebra = corpus_file("algebras/boolean4_x_chang1.json");
    let state = corpus_file("hyperstates/boolean4_x_chang1.json");
    for verb in ["validate", "properties", "split", "join", "cancellative"] {
        let out = ibpkit(&["hyperstate", verb, &algebra, &state]);
        assert_eq!(out.status, 0, "{verb}: {}", out.stdout);
    }
}

#[test]
fn structure_verbs() {
    let algebra = corpus_file("algebras/boolean4_x_chang1.json");
    let skeleton = json(&ibpkit(&["skeleton", &algebra]));
    assert_eq!(skeleton["data"]["size"], 8);
    let radical = json(&ibpkit(&["radical", &corpus_file("algebras/rot_goedel3.json")]));
    assert_eq!(radical["status"], 0);
    assert_eq!(radical["data"]["cancellative"], false);
    let decomposed = json(&ibpkit(&["decompose", &corpus_file("algebras/chang1.json"), "neg(1)"]));
    assert_eq!(decomposed["data"][0]["b"], "neg(0)");
    assert_eq!(decomposed["data"][0]["c"], "pos(1)");
    assert_eq!(ibpkit(&["decompose", &corpus_file("algebras/chang1.json"), "pos(x)"]).status, 2);
}

#[test]
fn states_verb() {
    let enumerated = json(&ibpkit(&["states", &corpus_file("semihoops/lukasiewicz4.json")]));
    assert_eq!(enumerated["data"]["count"], 1);
    let out = ibpkit(&["states", &corpus_file("semihoops/cone1.json"), &corpus_file("states/cone1_lambda2.json")]);
    assert_eq!(out.status, 0, "{}", out.stdout);
    assert_eq!(json(&out)["data"]["sigma"]["lambda"], serde_json::json!(["2"]));
    assert_eq!(ibpkit(&["states", &corpus_file("semihoops/cone1.json")]).status, 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["hyperstate", "split", &corpus_file("algebras/chang2.json"), &corpus_file("hyperstates/chang2_mixed.json")];
    let first = ibpkit(&args);
    let second = ibpkit(&args);
    assert_eq!(without_timing(&first.stdout), without_timing(&second.stdout));
}

#[test]
fn parse_examples() {
    let boolean2 = io::parse_algebra(Path::new(&corpus_file("algebras/boolean2.json"))).unwrap();
    assert!(matches!(&boolean2.factors()[..], [Factor::Finite(m)] if m.size() == 2));
    let chang = io::parse_document(r#"{"kind": "rotation", "rank": 1}"#).unwrap();
    assert!(matches!(chang, Document::Algebra(a) if a.factors()[0].rank() == Some(1)));
}

#[test]
fn written_corpus_matches_the_checked_in_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ibpkit(&["corpus", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status, 0, "{}", out.stdout);
    for (name, _) in cli::corpus_documents() {
        let fresh = std::fs::read_to_string(dir.path().join(&name)).unwrap();
        let shipped = std::fs::read_to_string(root().join("corpus").join(&name)).unwrap();
        assert_eq!(fresh, shipped, "{name}");
    }
}
