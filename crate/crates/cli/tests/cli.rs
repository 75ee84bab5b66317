use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ergolab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .current_dir(dir)
        .env_remove("ERGOLAB_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_identities_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergolab(dir.path(), &["verify-identities"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify-identities.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["seed"], 1);
}

#[test]
fn ld_csv_is_byte_stable_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ld", "--n", "500,2000", "--samples", "4000", "--max-spread", "1", "--ratio-band", "0.5"];
    let mut outputs = Vec::new();
    for workers in ["1", "2", "2"] {
        let out = dir.path().join(format!("w{workers}-{}", outputs.len()));
        let mut full = vec!["--workers", workers, "--out", out.to_str().unwrap()];
        full.extend(args);
        let o = ergolab(dir.path(), &full);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        outputs.push(fs::read(out.join("ld.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn config_hash_ignores_workers_and_tracks_seed() {
    let dir = tempfile::tempdir().unwrap();
    let header = |extra: &[&str]| {
        let mut args = vec!["simulate", "--x0", "0.3", "--n", "10"];
        args.extend(extra);
        assert!(ergolab(dir.path(), &args).status.success());
        let csv = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
        csv.lines().next().unwrap().to_string()
    };
    let a = header(&[]);
    assert_eq!(a, header(&["--workers", "3"]));
    assert_ne!(a, header(&["--seed", "2"]));
}

#[test]
fn thaler_wandering_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergolab(dir.path(), &["--map", "thaler", "wandering"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no closed-form invariant density"), "{}", stderr(&o));
}

#[test]
fn bad_config_value_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "seed = 3\n\n[ld]\ntheta = 1.5\n").unwrap();
    let o = ergolab(dir.path(), &["--config", "run.toml", "ld"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("theta") && err.contains("line 4"), "{err}");
}

#[test]
fn config_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "[simulate]\nx0 = [0.3]\nn = [10]\n").unwrap();
    let o = ergolab(dir.path(), &["--config", "run.toml", "simulate", "--n", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("0.3,20,"), "{csv}");
}

#[test]
fn failed_check_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergolab(dir.path(), &["dk", "--n", "500", "--samples", "500", "--max-ks", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let json = fs::read_to_string(dir.path().join("dk.json")).unwrap();
    assert!(json.contains("\"passed\": false"), "{json}");
}

#[test]
fn dump_cdf_and_plot_script_write_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ergolab(dir.path(), &["dump-cdf", "--law", "lamperti", "--alpha", "0.5", "--b", "0.5"]).status.success());
    let csv = fs::read_to_string(dir.path().join("dump-cdf.csv")).unwrap();
    assert!(csv.lines().count() > 10);
    assert!(ergolab(dir.path(), &["plot-script"]).status.success());
    assert!(fs::read_to_string(dir.path().join("plot_results.py")).unwrap().starts_with("#!/usr/bin/env python3"));
}

#[test]
fn out_of_range_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["ld", "--theta", "0"][..], &["--partition", "0.9,0.1", "verify-identities"], &["--map", "thaler", "--p", "1", "simulate", "--x0", "0.5", "--n", "5"]] {
        let o = ergolab(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}
