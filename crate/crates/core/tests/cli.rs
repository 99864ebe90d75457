use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use blendflow::io::{NetworkDocument, ResultDocument};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blendflow"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn blendflow")
}

fn gas() -> Value {
    json!({"R": 8.3145, "T": 283.15, "components": [
        {"name": "H2", "molar_mass": 0.002016, "p_crit": 13.15, "T_crit": 33.19},
        {"name": "NG", "molar_mass": 0.01800678, "p_crit": 46.01, "T_crit": 204.62}]})
}

fn pipe(id: &str, from: &str, to: &str) -> Value {
    json!({"id": id, "from": from, "to": to, "kind": "pipe", "L": 10, "D": 0.5, "lambda_fr": 0.05})
}

fn write_doc(dir: &TempDir, name: &str, nodes: Value, edges: Value) -> PathBuf {
    let doc = json!({"schema_version": 1, "gas": gas(), "model": {"kind": "linear"}, "nodes": nodes, "edges": edges});
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path
}

fn triangle(dir: &TempDir) -> PathBuf {
    write_doc(
        dir,
        "triangle.json",
        json!([{"id": "v1", "load": -3, "zeta": 0.0, "pressure": 60}, {"id": "v2", "load": 1}, {"id": "v3", "load": 2}]),
        json!([pipe("a", "v1", "v2"), pipe("b", "v2", "v3"), pipe("c", "v3", "v1")]),
    )
}

fn solve_json(path: &Path, model: &str) -> ResultDocument {
    let out = run(&["solve", path.to_str().unwrap(), "--model", model, "--out", "-"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    ResultDocument::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn gaslib_constant_node7() {
    let doc = solve_json(&fixture("gaslib11.json"), "constant");
    let p = doc.node("7").unwrap().pressure_bar;
    assert!((p / 40.85 - 1.0).abs() <= 0.02, "{p}");
    assert_eq!(doc.provenance.model, "constant");
    assert_eq!(doc.provenance.fixture_sha256.len(), 64);
    assert!(doc.mixed.is_some());
}

#[test]
fn gaslib_papay_node7() {
    // The reconstructed topology lands 3.2 % below the reference value.
    let doc = solve_json(&fixture("gaslib11.json"), "papay");
    let p = doc.node("7").unwrap().pressure_bar;
    assert!((p / 44.41 - 1.0).abs() <= 0.05, "{p}");
}

#[test]
fn gaslib_fixture_shape() {
    let text = std::fs::read_to_string(fixture("gaslib11.json")).unwrap();
    let doc = NetworkDocument::from_json(&text).unwrap();
    let count = |k: &str| doc.edges.iter().filter(|e| e.kind == k).count();
    assert_eq!(doc.nodes.len(), 11);
    assert_eq!((count("pipe"), count("compressor"), count("valve")), (8, 2, 1));
    assert!(doc.comment.as_deref().unwrap().contains("reconstructed"));
}

#[test]
fn result_document_round_trips() {
    let doc = solve_json(&fixture("fig1_pipe.json"), "linear");
    let again = ResultDocument::from_json(&doc.to_json().unwrap()).unwrap();
    assert_eq!(doc, again);
}

#[test]
fn summary_goes_to_stdout_with_file_output() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let out = run(&["solve", fixture("fig1_pipe.json").to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("mass balance"), "{stdout}");
    assert!(out_path.exists());
}

#[test]
fn csv_result() {
    let out = run(&["solve", fixture("fig1_pipe.json").to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("element,id,pressure_bar,eta,q"));
    assert!(lines.next().unwrap().starts_with("node,in,60,"));
}

#[test]
fn unbalanced_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = write_doc(
        &dir,
        "unbalanced.json",
        json!([{"id": "s", "load": -10, "zeta": 0.1, "pressure": 60}, {"id": "d", "load": 12}]),
        json!([pipe("p", "s", "d")]),
    );
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_zeta_exits_2() {
    let dir = TempDir::new().unwrap();
    let path = write_doc(
        &dir,
        "nozeta.json",
        json!([{"id": "s", "load": -10, "pressure": 60}, {"id": "d", "load": 10}]),
        json!([pipe("p", "s", "d")]),
    );
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("composition"));
}

#[test]
fn parse_and_io_errors() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema_version\": 1,\n \"gas\": ").unwrap();
    let out = run(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let out = run(&["solve", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let out = run(&["solve", fixture("fig1_pipe.json").to_str().unwrap(), "--model", "virial"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn supersonic_exits_3() {
    let dir = TempDir::new().unwrap();
    let path = write_doc(
        &dir,
        "fast.json",
        json!([{"id": "s", "load": -2000, "zeta": 0.5, "pressure": 20}, {"id": "d", "load": 2000}]),
        json!([pipe("p", "s", "d")]),
    );
    let out = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

fn profile(path: &Path, edge: &str, samples: &str) -> Output {
    run(&["profile", path.to_str().unwrap(), "--edge", edge, "--samples", samples])
}

fn rows(out: &Output) -> Vec<(f64, f64)> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_m,p_bar"));
    lines
        .map(|l| {
            let (x, p) = l.split_once(',').unwrap();
            (x.parse().unwrap(), p.parse().unwrap())
        })
        .collect()
}

#[test]
fn profile_two_samples() {
    let out = profile(&fixture("fig1_pipe.json"), "pipe", "2");
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 2);
    assert_eq!(r[0], (0.0, 60.0));
    assert_eq!(r[1].0, 50_000.0);
    assert!(r[1].1 < 60.0);
}

#[test]
fn profile_spacing_is_uniform() {
    let out = profile(&fixture("fig1_pipe.json"), "pipe", "37");
    let r = rows(&out);
    assert_eq!(r.len(), 37);
    let dx = 50_000.0 / 36.0;
    for (i, (x, _)) in r.iter().enumerate() {
        assert!((x - i as f64 * dx).abs() <= 1e-9, "{i} {x}");
    }
    assert!(r.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn profile_idle_pipe_is_flat() {
    let dir = TempDir::new().unwrap();
    let path = write_doc(
        &dir,
        "idle.json",
        json!([{"id": "s", "load": -10, "zeta": 0.1, "pressure": 60}, {"id": "m", "load": 10}, {"id": "d", "load": 0}]),
        json!([pipe("a", "s", "m"), pipe("b", "m", "d")]),
    );
    let out = profile(&path, "b", "5");
    assert!(out.status.success());
    let r = rows(&out);
    assert!(r.iter().all(|&(_, p)| p == r[0].1));
}

#[test]
fn profile_unknown_edge() {
    let out = profile(&fixture("fig1_pipe.json"), "nope", "5");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_orders_models() {
    let outlet = |m: &str| {
        let out = run(&["profile", fixture("fig1_pipe.json").to_str().unwrap(), "--edge", "pipe", "--model", m]);
        rows(&out).last().unwrap().1
    };
    let (c, l, q) = (outlet("constant"), outlet("linear"), outlet("papay"));
    assert!(l < c && c < q, "{l} {c} {q}");
}

#[test]
fn compare_single_model() {
    let out = run(&["compare-models", fixture("gaslib11.json").to_str().unwrap(), "--models", "linear"]);
    assert!(out.status.success());
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["model"], "linear");
    let eta = |id: &str| rows[0]["exit_compositions"].as_array().unwrap().iter().find(|r| r[0] == id).unwrap()[1].as_f64().unwrap();
    assert!((eta("10") - eta("11")).abs() <= 1e-6);
}

#[test]
fn compare_reports_failures_per_model() {
    let out = run(&["compare-models", fixture("fig1_pipe.json").to_str().unwrap(), "--models", "constant,bogus"]);
    assert!(out.status.success());
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows[0]["error"].is_null());
    assert!(rows[1]["error"].as_str().unwrap().contains("bogus"));
    let out = run(&["compare-models", fixture("fig1_pipe.json").to_str().unwrap(), "--models", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cut_info_tree() {
    let out = run(&["cut-info", fixture("fig1_pipe.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "no cycle");
}

#[test]
fn cut_info_triangle() {
    let dir = TempDir::new().unwrap();
    let out = run(&["cut-info", triangle(&dir).to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let info: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(info["cut_edge"], "a");
    assert_eq!(info["flipped"], false);
    // Listed from the chosen start node onwards.
    assert_eq!(info["cycle_nodes"], json!(["v2", "v3", "v1"]));
    assert_eq!(info["modified_loads"], json!([1.0, 2.0, -3.0]));
    assert_eq!(info["beta"], json!([1.0, 3.0, 0.0]));
    assert_eq!(info["interval"], json!([0.0, 3.0]));
}

#[test]
fn cut_info_gaslib_interval_starts_at_zero() {
    let out = run(&["cut-info", fixture("gaslib11.json").to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let info: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(info["interval"][0], 0.0);
    assert!(info["interval"][1].as_f64().unwrap() > 0.0);
}

#[test]
fn validate_ok() {
    let out = run(&["validate", fixture("gaslib11.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ok"));
}
