//! End-to-end runs of the `jointboost` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jointboost::commands::load_data;
use jointboost_core::boosting::initialize;
use jointboost_core::BoostingConfig;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jointboost")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_reference_setting_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["simulate", "--seed", "11", "--out", s(&a)]);
    ok(&["simulate", "--seed", "11", "--out", s(&b)]);
    for file in ["longitudinal.csv", "survival.csv", "truth.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let data = load_data(&a.join("longitudinal.csv"), &a.join("survival.csv")).unwrap();
    assert_eq!(data.n_individuals(), 500);
    assert!(data.n_observations() <= 2500);
    let truth: serde_json::Value = serde_json::from_slice(&fs::read(a.join("truth.json")).unwrap()).unwrap();
    assert_eq!(truth["informative_s"], serde_json::json!(["s_1", "s_2", "s_3"]));
    assert_eq!(truth["config"]["seed"], 11);
    assert_eq!(truth["config"]["simulation"]["n_i"], 5);
}

#[test]
fn invalid_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let config = write_config(dir.path(), "seed = 1\n[simulation]\nn_i = 1\n");
    let res = run(&["simulate", "--config", &config, "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("n_i"));

    let res = run(&["simulate", "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("seed"));

    let config = write_config(dir.path(), "[boosting]\nlearning_rate = 0.1\n");
    let res = run(&["simulate", "--config", &config, "--seed", "1", "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("learning_rate"));

    let long = dir.path().join("long.csv");
    let surv = dir.path().join("surv.csv");
    fs::write(&long, "id,time,y\n1,0,1\n1,0.5,oops\n").unwrap();
    fs::write(&surv, "id,time,status\n1,0.7,1\n").unwrap();
    let res = run(&["fit", "--long", s(&long), "--surv", s(&surv), "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&res.stderr);
    assert!(msg.contains("row 2") && msg.contains("column y"), "{msg}");

    // rows violating the data invariants
    fs::write(&long, "id,time,y\n1,0.5,1\n1,0,2\n").unwrap();
    let res = run(&["fit", "--long", s(&long), "--surv", s(&surv), "--out", s(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("unsorted"));
}

#[test]
fn fit_with_zero_stops_reports_the_initialization() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    let fit_dir = dir.path().join("fit");
    let config = write_config(dir.path(), "seed = 3\n[simulation]\nn = 40\n[boosting]\nm_stop_l = 0\nm_stop_s = 0\nm_stop_ls = 0\n");
    ok(&["simulate", "--config", &config, "--out", s(&data_dir)]);
    let (long, surv) = (data_dir.join("longitudinal.csv"), data_dir.join("survival.csv"));
    ok(&["fit", "--long", s(&long), "--surv", s(&surv), "--config", &config, "--out", s(&fit_dir)]);

    let data = load_data(&long, &surv).unwrap();
    let init = initialize(&data, &BoostingConfig::default()).unwrap();
    let coefficients = csv_rows(&fit_dir.join("coefficients.csv"));
    let value = |name: &str| -> f64 { coefficients.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap() };
    assert_eq!(value("beta0"), init.beta0);
    assert_eq!(value("lambda0"), init.lambda0);
    assert_eq!(value("sigma2"), init.sigma2);
    assert_eq!(value("alpha"), init.alpha);
    assert!(coefficients.iter().filter(|r| r[0].starts_with("l_") || r[0].starts_with("s_")).all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    assert!(csv_rows(&fit_dir.join("selection.csv")).is_empty());
    assert_eq!(csv_rows(&fit_dir.join("paths.csv")).len(), 1);
    assert_eq!(csv_rows(&fit_dir.join("risk_trace.csv")).len(), 1);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(fit_dir.join("fit.json")).unwrap()).unwrap();
    // effective configuration with defaults expanded
    assert_eq!(report["config"]["boosting"]["nu_s"], 0.3);
    assert_eq!(report["config"]["tuning"]["folds"], 10);
}

#[test]
fn tune_writes_surface_and_refit() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("data");
    let tune_dir = dir.path().join("tune");
    let config = write_config(
        dir.path(),
        "seed = 5\nthreads = 2\n[simulation]\nn = 60\n[tuning]\nm_l = [40]\nm_s = [20]\nm_ls = [30]\nfolds = 3\n",
    );
    ok(&["simulate", "--config", &config, "--out", s(&data_dir)]);
    let (long, surv) = (data_dir.join("longitudinal.csv"), data_dir.join("survival.csv"));
    let out = ok(&["tune", "--long", s(&long), "--surv", s(&surv), "--config", &config, "--out", s(&tune_dir)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("(40, 20, 30)"));
    let surface = csv_rows(&tune_dir.join("surface.csv"));
    assert_eq!(surface.len(), 3);
    assert!(surface.iter().enumerate().all(|(f, r)| r[..4] == ["40", "20", "30", &(f + 1).to_string()]));
    let refit: serde_json::Value = serde_json::from_slice(&fs::read(tune_dir.join("refit/fit.json")).unwrap()).unwrap();
    assert_eq!(refit["stopping_iterations"], serde_json::json!([40, 20, 30]));
}
