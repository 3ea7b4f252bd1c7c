use std::path::PathBuf;
use std::process::{Command, Output};

use plab::{Experiment, ExperimentConfig, FileConfig, Grid, Params};
use serde_json::Value;

fn plab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plab"))
        .args(args)
        .env_remove("PLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn catalan_check_example() {
    let out = plab(&["catalan-check", "--n-max", "14"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["experiment"], "catalan-check");
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["criterion"] == 1));
}

#[test]
fn sv_pressure_example() {
    let out = plab(&["sv-pressure", "--lambda", "0.5", "--t", "0.9"]);
    assert!(out.status.success());
    let v = json(&out);
    let pt = &v["results"]["points"][0];
    let u0 = pt["u0"].as_f64().unwrap();
    assert!((u0 - 0.1 * 4f64.ln()).abs() < 1e-6, "{u0}");
    assert_eq!(pt["kind"], "Abscissa");
}

#[test]
fn relation_example() {
    let out = plab(&["relation", "--beta", "0.5", "--psi", "log", "--s-grid", "1e-5:1e-2:25"]);
    assert!(out.status.success());
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    let slope = checks.iter().find(|c| c["name"] == "slope at β = 0.5").unwrap();
    assert_eq!(slope["pass"], true);
    assert_eq!(v["parameters"]["s_grid"].as_array().unwrap().len(), 25);
    let rows = &v["results"]["models"][0]["report"]["points"];
    assert_eq!(rows.as_array().unwrap().len(), 25);
}

#[test]
fn config_errors_exit_with_two() {
    let out = plab(&["sv-pressure", "--lambda", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("plab: configuration error: λ = 0.7"), "{err}");
    assert!(out.stdout.is_empty());
    // malformed grids are rejected by the argument parser
    assert_eq!(plab(&["relation", "--s-grid", "1e-5:1e-2"]).status.code(), Some(2));
    assert_eq!(plab(&["relation", "--s-grid", "-1:1:3"]).status.code(), Some(2));
    assert_eq!(plab(&["renewal", "--threads", "0"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = scratch("numerical");
    let out = plab(&["correlation", "--beta", "0.5", "--s", "1e-3", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["status"], "numerical");
    assert!(v["reason"].as_str().unwrap().contains("transient"));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("diagnostic.json")).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn out_dir_receives_report_and_tables() {
    let dir = scratch("files");
    let out = plab(&["catalan-check", "--n-max", "10", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("catalan-check.json")).unwrap()).unwrap();
    assert_eq!(report, json(&out));
    let csv = std::fs::read_to_string(dir.join("catalan-check_counts.csv")).unwrap();
    assert!(csv.lines().count() > 10);
}

#[test]
fn config_file_precedence() {
    let dir = scratch("toml");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("plab.toml");
    std::fs::write(&path, "n_max = 9\nlambda = [0.42]\n\n[catalan-check]\nn_max = 11\n").unwrap();
    let p = path.to_str().unwrap();
    let from_section = json(&plab(&["catalan-check", "--config", p]));
    assert_eq!(from_section["parameters"]["n_max"], 11);
    let from_cli = json(&plab(&["catalan-check", "--config", p, "--n-max", "12"]));
    assert_eq!(from_cli["parameters"]["n_max"], 12);

    let file = FileConfig::parse("n_max = 9\nthreads = 2\nout_dir = \"x\"\n[sv-tails]\nlambda = [0.45]\n").unwrap();
    assert_eq!(file.threads, Some(2));
    assert_eq!(file.out_dir, Some(PathBuf::from("x")));
    let sv = file.params_for(Experiment::SvTails);
    assert_eq!((sv.n_max, sv.lambda.clone()), (Some(9), Some(vec![0.45])));
    assert_eq!(file.params_for(Experiment::FibTails).lambda, None);
    let cli = Params { n_max: Some(30), ..Params::default() };
    let cfg = ExperimentConfig::new(Experiment::SvTails).with(sv).with(cli);
    assert_eq!(cfg.params.n_max, Some(30));
    assert_eq!(cfg.params.lambda, Some(vec![0.45]));

    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(plab(&["catalan-check", "--config", p]).status.code(), Some(2));
    assert_eq!(plab(&["catalan-check", "--config", "/nonexistent/plab.toml"]).status.code(), Some(2));
    assert!(FileConfig::parse("threads = 0").is_err());
    assert!(FileConfig::parse("[relation]\ns_grid = \"1:2\"\n").is_err());
}

#[test]
fn grid_syntax() {
    let g: Grid = "1e-3:1e-1:3".parse().unwrap();
    assert_eq!(g.0.len(), 3);
    assert_eq!((g.0[0], g.0[2]), (1e-3, 1e-1));
    assert!((g.0[1] - 1e-2).abs() < 1e-16);
    let l: Grid = "0.3, 0.1,0.2".parse().unwrap();
    assert_eq!(l.0, vec![0.1, 0.2, 0.3]);
    assert!("1:2".parse::<Grid>().is_err());
    assert!("0:1:5".parse::<Grid>().is_err());
    assert!("1e-3:1e-1:0".parse::<Grid>().is_err());
    assert!("a,b".parse::<Grid>().is_err());
    let file = FileConfig::parse("s_grid = [0.2, 0.1]\nu_grid = \"1e-4:1e-2:3\"\n").unwrap();
    assert_eq!(file.shared.s_grid.unwrap().0, vec![0.1, 0.2]);
    assert_eq!(file.shared.u_grid.unwrap().0.len(), 3);
}

#[test]
fn output_is_independent_of_threads() {
    let args = ["arcsine", "--n", "2000", "--trials", "4000", "--seed", "5"];
    let dirs: Vec<PathBuf> = ["t1", "t3"].iter().map(|d| scratch(d)).collect();
    let run = |threads: &str, dir: &PathBuf| {
        let mut a = args.to_vec();
        a.extend(["--threads", threads, "--out-dir", dir.to_str().unwrap()]);
        plab(&a)
    };
    let one = run("1", &dirs[0]);
    let three = run("3", &dirs[1]);
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);
    let csv = |d: &PathBuf| std::fs::read(d.join("arcsine_sample.csv")).unwrap();
    assert_eq!(csv(&dirs[0]), csv(&dirs[1]));
    // the environment variable is honoured too
    let env = Command::new(env!("CARGO_BIN_EXE_plab"))
        .args(args)
        .env("PLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(env.stdout, one.stdout);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["relation", "--beta", "0.75", "--s-grid", "1e-4:1e-2:7"];
    assert_eq!(plab(&args).stdout, plab(&args).stdout);
}

#[test]
fn every_experiment_has_help() {
    for name in Experiment::ALL.iter().map(|e| e.name()) {
        let out = plab(&[name, "--help"]);
        assert!(out.status.success(), "{name}");
    }
}
