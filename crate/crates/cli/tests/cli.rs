use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_szlenk"));
    c.env_remove("SZLENK_LOG");
    c
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn ord_prints_normal_forms() {
    let v = json_out(&["ord", "w^2*3 + w"]);
    let expect: Value = serde_json::from_str(
        r#"{"cnf":[[{"cnf":[[{"cnf":[]},2]]},3],[{"cnf":[[{"cnf":[]},1]]},1]]}"#,
    )
    .unwrap();
    assert_eq!(v, expect);
    let out = run(&["ord", "w + w^2", "--format", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "w^2");
    let out = run(&["ord", "w^^"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn sigma_and_frount() {
    let v = json_out(&["sigma", "1", "3", "1", "2"]);
    assert_eq!(v["cases"][0]["output"]["sigma"], 1);
    assert_eq!(v["cases"][0]["input"]["b"], "3");
    let v = json_out(&["frount", "--d", "1", "--eps-q", "1", "--q", "1", "--m", "2"]);
    assert_eq!(v["cases"][0]["output"]["m_big"], 8);
    let out = run(&["frount", "--d", "1", "--eps-q", "1", "--q", "1", "--m", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn derive_reports_a_trace() {
    let f = data("set_depth2_half.json");
    let v = json_out(&["set", "derive", f.to_str().unwrap(), "--eps-q", "1/2", "--steps", "5"]);
    let trace = &v["cases"][0]["output"];
    assert_eq!(trace["emptied_at"], 3);
    assert_eq!(trace["steps"].as_array().unwrap().len(), 4);
    assert_eq!(trace["eps_q"], "1/2");

    let f = data("set_sing.json");
    let v = json_out(&["set", "derive", f.to_str().unwrap(), "--eps-q", "1"]);
    assert_eq!(v["cases"][0]["output"]["emptied_at"], 1);

    let f = data("set_prod_two_fans.json");
    let v = json_out(&["set", "derive", f.to_str().unwrap(), "--eps-q", "3/2"]);
    let steps = v["cases"][0]["output"]["steps"].as_array().unwrap().clone();
    assert_eq!(steps[1]["set"]["boxes"], serde_json::json!([["sing", "sing"]]));
}

#[test]
fn space_eval_names_the_rule() {
    let f = data("space_c0_ladder_family.json");
    let v = json_out(&["space", "eval", f.to_str().unwrap()]);
    let ev = &v["cases"][0]["output"];
    assert_eq!(ev["rule"], "eps_profile_sup");
    assert_eq!(ev["verdict"]["index"], json_out(&["ord", "w^2"]));

    let f = data("space_l1_const_norms.json");
    let v = json_out(&["space", "eval", f.to_str().unwrap()]);
    assert_eq!(v["cases"][0]["output"]["verdict"], "not_asplund");
    assert_eq!(v["cases"][0]["output"]["rule"], "non_asplund_gate");

    let f = data("space_atom_compact.json");
    let v = json_out(&["space", "eval", f.to_str().unwrap()]);
    assert_eq!(v["cases"][0]["output"]["rule"], "identity");

    let f = data("space_prefix_norms.json");
    let out = run(&["space", "eval", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cover_lists_products_and_members() {
    let f = data("set_fan_half.json");
    let p = data("points_single.json");
    let v = json_out(&["cover", f.to_str().unwrap(), "--l", "2", "--points", p.to_str().unwrap()]);
    let ks: Vec<Value> = v["cases"][0]["output"]["products"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["k"].clone())
        .collect();
    assert_eq!(ks, vec![serde_json::json!([1]), serde_json::json!([2]), serde_json::json!([3])]);
    let members: Vec<bool> = v["cases"].as_array().unwrap()[1..]
        .iter()
        .map(|c| c["output"]["member"].as_bool().unwrap())
        .collect();
    assert_eq!(members, vec![true, true, false]);
}

#[test]
fn verify_exit_codes_and_output() {
    let out = run(&["verify", "foo"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_out(&["verify", "unionlemma2", "--samples", "12", "--seed", "1"]);
    assert_eq!(v["v"], 1);
    assert_eq!(v["command"]["suite"], "union-blocks");
    assert_eq!(v["totals"]["passed"], 12);
    assert!(v.get("wall_time_ms").is_none());
    let v = json_out(&["verify", "union-blocks", "--samples", "2", "--wall-time"]);
    assert!(v["wall_time_ms"].is_u64());
}

#[test]
fn report_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["verify", "techlem1", "--samples", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["totals"]["cases"], 4);
}

#[test]
fn log_flag_overrides_environment() {
    let out = bin()
        .env("SZLENK_LOG", "off")
        .args(["verify", "tvl", "--samples", "1", "--log-level", "info"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("running projection"));
    let out = bin()
        .env("SZLENK_LOG", "info")
        .args(["verify", "tvl", "--samples", "1"])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("running projection"));
    let out = bin()
        .env("SZLENK_LOG", "info")
        .args(["verify", "tvl", "--samples", "1", "--log-level", "off"])
        .output()
        .unwrap();
    assert!(out.stderr.is_empty());
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = run(&["set", "derive", "/nonexistent.json", "--eps-q", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
