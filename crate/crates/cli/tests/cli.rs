use std::path::Path;
use std::process::Command;

use arrwwid_cli::{degrees_json, recursify_json, to_json};
use arrwwid_core::catalog::builtin;
use arrwwid_core::certify::{certify_max_degree, DEFAULT_ROUND_BUDGET};
use arrwwid_core::cover::{estimate_arrwwid, SamplePlan};
use arrwwid_core::curve::classify_connections;
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_arrwwid")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn degrees_matches_library() {
    let got = run_json(&["degrees", "--tiling", "daun", "--depths", "1..2"]);
    let daun = builtin("daun").unwrap();
    assert_eq!(got, degrees_json(&daun.rules, &[1, 2], DEFAULT_TILE_BUDGET).unwrap());
    assert_eq!(got[1]["max_interior"], 3);
}

#[test]
fn certify_matches_library_and_sets_exit_code() {
    let got = run_json(&["certify", "--tiling", "daun", "--bound", "3"]);
    let want = certify_max_degree(&builtin("daun").unwrap().rules, 3, DEFAULT_ROUND_BUDGET).unwrap();
    assert_eq!(got, to_json(&want));
    let (code, out) = run(&["certify", "--tiling", "quadtree", "--bound", "3"]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["status"], "counterexample");
}

#[test]
fn arrwwid_matches_library() {
    let got = run_json(&["arrwwid", "--order", "hilbert", "--depths", "2..3", "--random", "20", "--seed", "4"]);
    let h = builtin("hilbert").unwrap();
    let want = estimate_arrwwid(&h.rules, &h.window, &SamplePlan::new(2..=3).with_random(20, 4)).unwrap();
    assert_eq!(got, to_json(&want));
    assert_eq!(got["max_fragments"], 4);
}

#[test]
fn connections_match_library() {
    let got = run_json(&["connections", "--order", "zorder", "--depths", "2"]);
    let z = builtin("zorder").unwrap();
    let want = classify_connections(&z.rules, 2, DEFAULT_TILE_BUDGET).unwrap();
    assert_eq!(got[0]["stats"], to_json(&want));
}

#[test]
fn recursify_matches_library() {
    let got = run_json(&["recursify", "--spec", "gosper7", "--levels", "2"]);
    assert_eq!(got, recursify_json("gosper7", 2).unwrap());
    assert_eq!(got["degree"], 3);
    assert_eq!(got["per_label"], 49);
}

#[test]
fn predict_and_catalog_list_entries() {
    let p = run_json(&["predict", "--family", "lifted-daun", "--dim", "3"]);
    assert_eq!(p[0]["arrwwid"], 6);
    let c = run_json(&["catalog"]);
    let names: Vec<&str> = c.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["quadtree", "daun", "hilbert", "dekking", "kochel", "ar2w2", "coil", "lifted-daun"] {
        assert!(names.contains(&n), "{n}");
    }
}

fn assert_svg(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(doc.descendants().filter(|n| n.has_tag_name("path")).count() > 4);
}

#[test]
fn svg_output_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("hilbert.svg");
    let (code, _) = run(&["render", "--order", "hilbert", "--depth", "3", "--sketch", "--out", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_svg(&a);
    let b = dir.path().join("gosper.svg");
    let (code, _) = run(&["render", "--spec", "gosper7", "--levels", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_svg(&b);
    let c = dir.path().join("daun.svg");
    let (code, _) = run(&["recursify", "--spec", "shifted-square", "--levels", "1", "--format", "svg", "--out", c.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_svg(&c);
}

#[test]
fn rule_files_load_from_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.rules");
    std::fs::write(&path, arrwwid_core::serialize_ruleset(&builtin("hilbert").unwrap().rules)).unwrap();
    let from_file = run_json(&["degrees", "--tiling", path.to_str().unwrap(), "--depths", "2"]);
    let builtin = run_json(&["degrees", "--tiling", "hilbert", "--depths", "2"]);
    assert_eq!(from_file, builtin);

    let bad = dir.path().join("bad.rules");
    std::fs::write(&bad, "name broken\ndim 2\nunit R\nrule R\n  base box 1 1\n  child rule=R scale=1/2 translate=(0,0)\n  child rule=R scale=1/2 translate=(0,0)\n").unwrap();
    let (code, out) = run(&["validate", "--tiling", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["valid"], false);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["degrees", "--tiling", "no-such-tiling"]).0, 2);
    assert_eq!(run(&["degrees", "--tiling", "hilbert", "--depths", "3..1"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["cover", "--tiling", "quadtree", "--center", "0.5,0.5", "--radius", "2"]).0, 2);
}

#[test]
fn csv_outputs_have_headers() {
    let (code, out) = run(&["arrwwid", "--order", "dekking", "--depths", "1", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("center,radius,kind,level,tiles,fragments,area,ratio"));
    let (code, out) = run(&["simulate", "--orders", "hilbert,zorder", "--points", "2000", "--queries", "20", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 2 * 5);
}
