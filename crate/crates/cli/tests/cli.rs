use std::process::{Command, Output};

use serde_json::Value;

fn glab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn last_record(out: &Output) -> Value {
    records(out).pop().expect("at least one record")
}

#[test]
fn analyze_reports_the_large_table_example() {
    let out = glab(&["analyze", "--n", "2^20", "--t", "1"]);
    assert!(out.status.success());
    let summary = last_record(&out);
    assert_eq!(summary["kind"], "summary");
    assert_eq!(summary["schema_version"], 1);
    let o = &summary["outputs"];
    assert_eq!(o["optimal_iterations"], 804);
    assert_eq!(o["stopping_j_star"], 596);
    assert!((o["stopping_success_probability"].as_f64().unwrap() - 0.8442).abs() < 1e-4);
    assert_eq!(o["stopping_expected_iterations_rounded"], 706);

    let text = stdout(&out);
    let line = text.lines().last().unwrap();
    for needle in ["804", "596", "0.8442", "706"] {
        assert!(line.contains(needle), "{needle} missing from {line}");
    }
}

#[test]
fn analyze_quarter_table_is_certain_after_one_step() {
    let out = glab(&["analyze", "--n", "4", "--t", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let j1 = rows.iter().find(|r| &r[col("kind")] == "row" && &r[col("j")] == "1").unwrap();
    assert_eq!(j1[col("success_probability")].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn analyze_rejects_zero_solutions() {
    let out = glab(&["analyze", "--n", "16", "--t", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t must be ≥ 1"));
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(glab(&["analyze", "--n", "zero", "--t", "1"]).status.code(), Some(2));
    assert_eq!(glab(&["search", "--n", "8", "--solutions", "1,x"]).status.code(), Some(2));
    assert_eq!(glab(&["search", "--n", "8", "--solutions", "9"]).status.code(), Some(2));
    assert_eq!(glab(&["count", "--n", "64", "--t", "1", "--regime", "exact", "--c", "3"]).status.code(), Some(2));
    assert_eq!(glab(&["count", "--n", "64", "--t", "1", "--p", "12"]).status.code(), Some(2));
    assert_eq!(glab(&["bounds", "--n", "8", "--t", "9"]).status.code(), Some(2));
    assert_eq!(glab(&["reproduce-paper", "--criteria", "12"]).status.code(), Some(2));
    assert_eq!(glab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn search_known_t_on_quarter_table_always_succeeds() {
    let out = glab(&["search", "--n", "4", "--t", "1", "--strategy", "known", "--trials", "20", "--seed", "5"]);
    assert!(out.status.success());
    let recs = records(&out);
    assert_eq!(recs.len(), 21);
    for (i, r) in recs[..20].iter().enumerate() {
        assert_eq!(r["kind"], "trial");
        assert_eq!(r["trial"], i);
        assert_eq!(r["outputs"]["success"], true);
    }
    assert_eq!(recs[20]["outputs"]["success_rate"], 1.0);
}

#[test]
fn search_unknown_t_mean_cost_stays_under_the_critical_budget() {
    let out = glab(&["search", "--n", "65536", "--t", "1", "--trials", "1000", "--seed", "7"]);
    assert!(out.status.success());
    let agg = last_record(&out);
    let o = &agg["outputs"];
    let m0 = o["critical_scale"].as_f64().unwrap();
    assert!(o["mean_iterations"].as_f64().unwrap() <= 4.5 * m0);
    assert_eq!(o["false_positives"], 0);
}

#[test]
fn search_explicit_and_predicate_solutions() {
    let out = glab(&["search", "--n", "100", "--solutions", "mod:10:3", "--strategy", "restart", "--trials", "3"]);
    assert!(out.status.success());
    let agg = last_record(&out);
    assert_eq!(agg["parameters"]["t"], 10);
    let out = glab(&["search", "--n", "64", "--solutions", "7,8", "--backend", "statevector", "--trials", "4"]);
    assert!(out.status.success());
    for r in &records(&out)[..4] {
        let found = &r["outputs"]["found_index"];
        assert!(found.is_null() || found == 7 || found == 8);
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    for format in ["json", "csv"] {
        let args = ["search", "--n", "1000", "--t", "3", "--trials", "40", "--seed", "11", "--format", format];
        let (a, b) = (glab(&args), glab(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);

        let args = ["count", "--n", "256", "--t", "5", "--regime", "absolute", "--c", "4", "--trials", "30", "--seed", "2", "--format", format];
        assert_eq!(glab(&args).stdout, glab(&args).stdout);
    }
    let a = glab(&["search", "--n", "1000", "--t", "3", "--trials", "40", "--seed", "12"]);
    let b = glab(&["search", "--n", "1000", "--t", "3", "--trials", "40", "--seed", "11"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn timing_is_opt_in() {
    let out = glab(&["bounds", "--n", "1024", "--timing"]);
    assert!(last_record(&out)["wall_time_ms"].is_f64());
    let out = glab(&["bounds", "--n", "1024"]);
    assert!(last_record(&out)["wall_time_ms"].is_null());
}

#[test]
fn count_without_solutions_estimates_zero() {
    let out = glab(&["count", "--n", "1024", "--t", "0", "--trials", "25"]);
    assert!(out.status.success());
    let recs = records(&out);
    for r in &recs[..25] {
        assert_eq!(r["outputs"]["t_tilde"], 0.0);
    }
}

#[test]
fn count_exact_regime_recovers_t_when_resolved() {
    let out = glab(&["count", "--n", "1024", "--t", "4", "--regime", "exact", "--c", "14", "--trials", "200", "--seed", "1"]);
    assert!(out.status.success());
    let o = &last_record(&out)["outputs"];
    assert_eq!(o["exact_recovery_given_resolved"], 1.0);
    assert!(o["exact_recovery_rate"].as_f64().is_some());
}

#[test]
fn count_fixed_length_runs_obey_the_error_bound() {
    let out = glab(&["count", "--n", "1024", "--t", "16", "--p", "1024", "--trials", "300"]);
    assert!(out.status.success());
    let recs = records(&out);
    for r in &recs[..300] {
        if r["outputs"]["resolved"] == true {
            assert_eq!(r["outputs"]["within_bound"], true);
        }
    }
    assert_eq!(recs[300]["outputs"]["bound_violations"], 0);
}

#[test]
fn count_writes_a_normalized_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let out = glab(&["count", "--n", "256", "--t", "3", "--p", "64", "--spectrum", path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["nu", "probability", "solution_branch", "non_solution_branch"]
    );
    let total: f64 = reader
        .records()
        .map(|r| r.unwrap()[1].parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn bounds_rows_and_degenerate_flag() {
    let out = glab(&["bounds", "--n", "2^20", "--t", "1"]);
    assert_eq!(records(&out)[0]["outputs"]["lower_bound_queries"], 391);

    let out = glab(&["bounds", "--n", "1", "--t", "1"]);
    assert!(out.status.success());
    let row = &records(&out)[0]["outputs"];
    assert_eq!(row["lower_bound_queries"], 0);
    assert_eq!(row["degenerate"], true);
    assert_eq!(row["ratio"], "inf");
}

#[test]
fn bounds_sweep_ratio_approaches_the_limit() {
    let out = glab(&["bounds", "--n", "2^10..2^20", "--trials", "500"]);
    let recs = records(&out);
    assert_eq!(recs.len(), 12);
    let last_ratio = recs[10]["outputs"]["ratio"].as_f64().unwrap();
    assert!((last_ratio - 2.05).abs() <= 0.05);
    assert_eq!(recs[11]["outputs"]["inequalities_hold"], true);
}

#[test]
fn reproduce_paper_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.txt");
    let out = glab(&["reproduce-paper", "--criteria", "1,2,3,6", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let table = std::fs::read_to_string(&path).unwrap();
    assert_eq!(table.matches("PASS").count(), 4);
    assert!(table.ends_with("4/4 criteria passed\n"));

    let out = glab(&["reproduce-paper", "--criteria", "1", "--format", "json"]);
    let r = last_record(&out);
    assert_eq!(r["kind"], "criterion");
    assert_eq!(r["outputs"]["passed"], true);
}
