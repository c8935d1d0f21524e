use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_announce"));
    cmd.env_remove("ANNOUNCE_BUDGET");
    cmd
}

fn asset(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("announce-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_shipped_example() {
    let out = run(&["check", "--model", &asset("figure1.json"), "--point", "w01", "--formula", "~K a q & <!> K a q"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["value"], true);
    assert_eq!(report["point"], "w01");
    for key in ["formula", "candidates_enumerated", "elapsed_ms"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn check_false_exits_one() {
    let out = run(&["check", "--model", &asset("figure1.json"), "--point", "w00", "--formula", "p | q"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["value"], false);
}

#[test]
fn malformed_formula_exits_two() {
    let out = run(&["check", "--model", &asset("figure1.json"), "--point", "w00", "--formula", "K a ("]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));
}

#[test]
fn unknown_agent_exits_two() {
    let out = run(&["check", "--model", &asset("figure1.json"), "--point", "w00", "--formula", "K z p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_cap_on_checkerboard_formula() {
    let model = scratch("grid_budget.json");
    let cb = scratch("cb_budget.txt");
    assert!(run(&["gen", "--kind", "grid", "--tiles", &asset("uniform_tiles.json"), "--width", "2", "--height", "2", "--out", &model])
        .status
        .success());
    assert!(run(&["gen", "--kind", "cb-apal", "--out", &cb]).status.success());
    let formula = std::fs::read_to_string(&cb).unwrap();
    let out = run(&["check", "--model", &model, "--point", "0_0_mid", "--formula", formula.trim(), "--budget", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    let out = bin()
        .args(["check", "--model", &model, "--point", "0_0_mid", "--formula", formula.trim()])
        .env("ANNOUNCE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bisim_partitions() {
    let out = run(&["bisim", "--model", &asset("figure1.json"), "-n", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 4);

    let out = run(&["bisim", "--model", &asset("singleton.json"), "-n", "3"]);
    assert_eq!(json(&out), serde_json::json!([["s"]]));

    let out = run(&["bisim", "--model", &asset("figure1.json"), "-n", "0", "--atoms", "p"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 2);
}

#[test]
fn bisim_distinguishing_formula_parses_and_holds() {
    let out = run(&["bisim", "--model", &asset("figure1.json"), "-n", "1", "--distinguish", "w10"]);
    assert_eq!(out.status.code(), Some(0));
    let formula = json(&out)["formula"].as_str().unwrap().to_string();
    for (state, want) in [("w10", 0), ("w00", 1), ("w01", 1), ("w11", 1)] {
        let out = run(&["check", "--model", &asset("figure1.json"), "--point", state, "--formula", &formula]);
        assert_eq!(out.status.code(), Some(want), "{state}");
    }
}

#[test]
fn gen_outputs() {
    let cb = scratch("cb.txt");
    assert!(run(&["gen", "--kind", "cb-apal", "--out", &cb]).status.success());
    assert!(std::fs::read_to_string(&cb).unwrap().starts_with("K e K s ("));

    let grid = scratch("grid.json");
    let out = run(&["gen", "--kind", "grid", "--tiles", &asset("uniform_tiles.json"), "--width", "2", "--height", "2", "--out", &grid]);
    assert_eq!(json(&out)["states"], 20);
    let model: Value = serde_json::from_str(&std::fs::read_to_string(&grid).unwrap()).unwrap();
    assert_eq!(model["states"].as_array().unwrap().len(), 20);
    assert_eq!(model["point"], "0_0_mid");

    let out = run(&["gen", "--kind", "sat", "--tiles", &asset("clash_tiles.json"), "--out", &scratch("sat.txt")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("white"));

    let out = run(&["gen", "--kind", "grid", "--tiles", &asset("mismatched_tiles.json"), "--width", "2", "--height", "2", "--out", &scratch("bad.json")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["gen", "--kind", "sat", "--out", &scratch("sat2.txt")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_sat_and_local_hold_on_generated_grid() {
    let grid = scratch("grid_sat.json");
    let sat = scratch("sat_ok.txt");
    let local = scratch("local.txt");
    assert!(run(&["gen", "--kind", "grid", "--tiles", &asset("uniform_tiles.json"), "--width", "3", "--height", "2", "--out", &grid]).status.success());
    assert!(run(&["gen", "--kind", "sat", "--tiles", &asset("uniform_tiles.json"), "--out", &sat]).status.success());
    assert!(run(&["gen", "--kind", "local", "--out", &local]).status.success());
    let formula = format!(
        "({}) & K e K s ({})",
        std::fs::read_to_string(&sat).unwrap().trim(),
        std::fs::read_to_string(&local).unwrap().trim()
    );
    let out = run(&["check", "--model", &grid, "--point", "0_0_mid", "--formula", &formula]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tile_search_outcomes() {
    let out = run(&["tile-search", "--tiles", &asset("mismatched_tiles.json"), "--width", "2", "--height", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out), Value::Null);

    let out = run(&["tile-search", "--tiles", &asset("uniform_tiles.json"), "--width", "4", "--height", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cells"], serde_json::json!([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]));
}

#[test]
fn empty_sizes_is_a_vacuous_pass() {
    let out = run(&["suite", "--sizes", ""]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(json(&out)["criteria"], serde_json::json!([]));
}

fn without_timings(mut v: Value) -> Value {
    for c in v["criteria"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("elapsed_ms");
        // Criterion 7's detail embeds wall-clock timings of its three checks.
        if c["id"] == 7 {
            c.as_object_mut().unwrap().remove("detail");
        }
    }
    v
}

#[test]
fn suite_passes_and_is_deterministic() {
    let a = run(&["suite", "--seed", "7", "--sizes", "3"]);
    let b = run(&["suite", "--seed", "7", "--sizes", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(without_timings(json(&a)), without_timings(json(&b)));
    let report = json(&a);
    assert_eq!(report["passed"], true);
    let ids: Vec<u64> = report["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    for id in 1..=8 {
        assert!(ids.contains(&id), "criterion {id} missing");
    }
}

#[test]
fn suite_passes_for_another_seed() {
    let out = run(&["suite", "--seed", "99", "--sizes", "2"]);
    assert_eq!(out.status.code(), Some(0));
}
