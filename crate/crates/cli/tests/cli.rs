use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jsonschema::{Resource, Validator};
use serde_json::Value;

const SCHEMA_BASE: &str = "https://extremaldep.invalid/schemas/";

fn extremaldep(args: &[&str]) -> Output {
    extremaldep_env(args, &[])
}

fn extremaldep_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_extremaldep"));
    cmd.args(args).env_remove("EXTREMALDEP_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn load_schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn validator(name: &str) -> Validator {
    let manifest = Resource::from_contents(load_schema("manifest.schema.json")).unwrap();
    jsonschema::options()
        .with_resource(format!("{SCHEMA_BASE}manifest.schema.json"), manifest)
        .build(&load_schema(name))
        .unwrap()
}

fn assert_valid(schema: &str, doc: &Value) {
    let v = validator(schema);
    let errors: Vec<String> = v
        .iter_errors(doc)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{schema}: {errors:#?}");
}

fn without_timing(mut doc: Value) -> Value {
    doc["manifest"].as_object_mut().unwrap().remove("duration_ms");
    doc
}

fn ci_contains(doc: &Value, target: f64) -> bool {
    let lo = doc["ci95"][0].as_f64().unwrap();
    let hi = doc["ci95"][1].as_f64().unwrap();
    lo <= target && target <= hi
}

#[test]
fn report_three_dependent() {
    let out = extremaldep(&[
        "report",
        "--model",
        "three_dependent",
        "--partition",
        "1,2|3",
        "--tau",
        "1,1,1",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_valid("report.schema.json", &doc);
    assert_eq!(doc["verdict_independent"], "no");
    assert_eq!(doc["verdict_total_dep"], "yes");
    assert!((doc["pair_epsilon"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((doc["witness_d"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert_eq!(doc["manifest"]["command"], "report");
}

#[test]
fn report_iid_and_max_ar_are_independent() {
    let doc = json(&extremaldep(&[
        "report",
        "--model",
        "iid_product",
        "--d",
        "3",
        "--partition",
        "1|2,3",
    ]));
    assert_valid("report.schema.json", &doc);
    assert_eq!(doc["verdict_independent"], "yes");
    assert_eq!(doc["pair_epsilon"].as_f64(), Some(1.0));

    let out = extremaldep(&[
        "report",
        "--model",
        "max_ar",
        "--p",
        "2",
        "--q",
        "1",
        "--partition",
        "1,2|3",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["verdict_independent"], "yes");
}

#[test]
fn report_defaults_to_model_split() {
    let doc = json(&extremaldep(&["report", "--model", "ex32"]));
    assert_eq!(doc["partition"], "1,2|3");
    assert_eq!(doc["tau"], serde_json::json!([1.0, 1.0, 1.0]));
}

#[test]
fn report_off_ray_tau_is_undetermined() {
    let out = extremaldep(&["report", "--model", "three_dependent", "--tau", "1,0.5,0.2"]);
    assert_eq!(code(&out), 3);
    let doc = json(&out);
    assert_valid("report.schema.json", &doc);
    assert!(doc["theta"].is_null());
}

#[test]
fn validation_and_usage_errors_exit_2() {
    for args in [
        vec!["report", "--model", "max_ar", "--p", "0", "--q", "1"],
        vec!["report", "--model", "three_dependent", "--partition", "1|1"],
        vec!["report", "--model", "three_dependent", "--tau", "1,1"],
        vec!["report", "--model", "nope"],
        vec!["report"],
        vec!["report", "--bogus"],
        vec!["simulate", "--model", "ex32"],
        vec!["estimate", "blocks", "--model", "ex32", "--reps", "10"],
        vec![
            "estimate", "runs", "--model", "ex32", "--n", "100", "--column", "4",
        ],
        vec!["estimate", "runs", "--n", "100"],
        vec!["verify", "--suite", "everything"],
    ] {
        let out = extremaldep(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn bad_thread_count_exits_2() {
    let out = extremaldep_env(
        &["verify", "--suite", "closed"],
        &[("EXTREMALDEP_THREADS", "zero")],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ex32.csv");
    let out = extremaldep(&[
        "simulate",
        "--model",
        "ex32",
        "--n",
        "1000",
        "--seed",
        "7",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let m = extremaldep::SampleMatrix::read_csv_path(&csv).unwrap();
    assert_eq!((m.nrows(), m.ncols()), (1000, 3));

    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ex32.manifest.json")).unwrap()).unwrap();
    assert_valid("manifest.schema.json", &manifest);
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["n"], 1000);
}

#[test]
fn simulate_ex31_negates_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let args = [
            "simulate", "--model", "ex31", "--p", "1", "--q", "1", "--n", "10", "--seed", "1", "--out",
        ];
        let out = extremaldep(&[&args[..], &[path.to_str().unwrap()]].concat());
        assert_eq!(code(&out), 0);
    }
    let m = extremaldep::SampleMatrix::read_csv_path(&a).unwrap();
    let neg: Vec<f64> = m.column(0).iter().map(|v| -v).collect();
    assert_eq!(m.column(1), neg);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let stdout = extremaldep(&[
        "simulate", "--model", "ex31", "--p", "1", "--q", "1", "--n", "10", "--seed", "1",
    ]);
    assert_eq!(stdout.stdout, fs::read(&a).unwrap());
}

#[test]
fn estimate_blocks_recovers_max_ar_indices() {
    let x = json(&extremaldep(&[
        "estimate", "blocks", "--model", "ex31", "--p", "1", "--q", "1", "--tau", "1,0",
    ]));
    assert_valid("estimate.schema.json", &x);
    assert!(ci_contains(&x, 0.5), "{x}");
    assert_eq!(x["reps"], 10_000);
    assert_eq!(x["block_n"], 1000);

    let neg = json(&extremaldep(&[
        "estimate", "blocks", "--model", "ex31", "--p", "1", "--q", "1", "--tau", "0,1",
    ]));
    assert!(ci_contains(&neg, 1.0), "{neg}");
}

#[test]
fn estimate_output_ignores_thread_count() {
    let args = [
        "estimate",
        "blocks",
        "--model",
        "ex32",
        "--reps",
        "2000",
        "--block-n",
        "500",
        "--seed",
        "3",
    ];
    let one = json(&extremaldep_env(&args, &[("EXTREMALDEP_THREADS", "1")]));
    let four = json(&extremaldep_env(&args, &[("EXTREMALDEP_THREADS", "4")]));
    assert_eq!(without_timing(one), without_timing(four));
}

#[test]
fn estimate_runs_on_row_maxima() {
    let doc = json(&extremaldep(&[
        "estimate", "runs", "--model", "ex32", "--n", "1000000", "--k", "2",
    ]));
    assert_valid("estimate.schema.json", &doc);
    assert!(ci_contains(&doc, 0.3), "{doc}");
    assert_eq!(doc["metadata"]["series"], "row_max");
    assert_eq!(doc["metadata"]["level_source"], "normalized");
}

#[test]
fn estimate_runs_on_max_ar_row_maxima() {
    let doc = json(&extremaldep(&[
        "estimate", "runs", "--model", "ex31", "--p", "2", "--q", "1", "--n", "200000",
    ]));
    assert!(ci_contains(&doc, 0.5), "{doc}");
}

#[test]
fn estimate_runs_reads_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let path = csv.to_str().unwrap();
    let out = extremaldep(&[
        "simulate", "--model", "ex31", "--p", "1", "--q", "1", "--n", "200000", "--out", path,
    ]);
    assert_eq!(code(&out), 0);

    let doc = json(&extremaldep(&[
        "estimate", "runs", "--input", path, "--model", "ex31", "--p", "1", "--q", "1", "--column", "1",
    ]));
    assert!(ci_contains(&doc, 0.5), "{doc}");
    assert_eq!(doc["metadata"]["series"], "column 1");
    assert!(doc["manifest"]["seed"].is_null());

    let explicit = json(&extremaldep(&[
        "estimate", "runs", "--input", path, "--column", "1", "--level", "200",
    ]));
    assert_eq!(explicit["metadata"]["level_source"], "explicit");
    assert_eq!(explicit["metadata"]["level"].as_f64(), Some(200.0));
}

#[test]
fn estimate_gamma_on_iid_sample() {
    let doc = json(&extremaldep(&[
        "estimate", "gamma", "--model", "ex32", "--tau", "1,1,1",
    ]));
    assert_valid("estimate.schema.json", &doc);
    assert!(ci_contains(&doc, 2.5), "{doc}");
    assert_eq!(doc["reps"], 100_000);
}

#[test]
fn verify_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = extremaldep(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["seed"], 7);
    let criteria: std::collections::BTreeSet<u64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["criterion"].as_u64().unwrap())
        .collect();
    assert_eq!(criteria.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn verify_detects_perturbed_theta() {
    let out = extremaldep(&["verify", "--perturb-theta", "0.1"]);
    assert_eq!(code(&out), 1);
    let doc = json(&out);
    assert_valid("verify.schema.json", &doc);
    let failed: Vec<&str> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["passed"] == false)
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"closed.verdicts"), "{failed:?}");
    assert!(failed.contains(&"closed.theta"), "{failed:?}");
}

#[test]
fn verify_suite_filter() {
    let doc = json(&extremaldep(&["verify", "--suite", "props"]));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows
        .iter()
        .all(|r| r["id"].as_str().unwrap().starts_with("props.")));
    assert!(rows.iter().all(|r| r["criterion"] == 5));
}

#[test]
fn perturb_flag_is_hidden() {
    let help = extremaldep(&["verify", "--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("--suite"));
    assert!(!text.contains("perturb"));
}
