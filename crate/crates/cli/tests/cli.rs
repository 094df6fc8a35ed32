use std::path::Path;
use std::process::{Command, Output};

fn thetaflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetaflux")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SHORT_WAVE: &str = "\
[run]
scenario = density_wave
end_time = 0.02
cfl = 0.5

[mesh]
cells = 16
";

#[test]
fn run_writes_artifacts_and_prints_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SHORT_WAVE);
    let out_dir = dir.path().join("out");
    let out = thetaflux(&["run", "--config", &config, "--out", out_dir.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["scenario"], "density_wave");
    for file in ["config.txt", "diagnostics.csv", "summary.json", "state.bin"] {
        assert!(out_dir.join(file).is_file(), "{file} missing");
    }
    let echoed = std::fs::read_to_string(out_dir.join("config.txt")).unwrap();
    assert!(echoed.contains("seed = 3"), "{echoed}");
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    assert_eq!(thetaflux(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let unknown_key = write_config(dir.path(), "[run]\nscenario = density_wave\nwarp_speed = 9\n");
    let out = thetaflux(&["run", "--config", &unknown_key]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warp_speed"));

    let negative = write_config(dir.path(), "[run]\nscenario = density_wave\nend_time = -1\n");
    assert_eq!(thetaflux(&["run", "--config", &negative]).status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_with_two() {
    let out = thetaflux(&["verify", "--suite", "astrology"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("means"));
}

#[test]
fn a_passing_suite_reports_json() {
    let out = thetaflux(&["verify", "--suite", "means", "--seed", "11"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report = stdout_json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 11);
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);
}

#[test]
fn a_flipped_gravity_jump_fails_the_balance_suite() {
    let out = thetaflux(&["verify", "--suite", "balance", "--inject-flipped-jump"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["passed"], false);
}

#[test]
fn convergence_prints_a_table() {
    let out = thetaflux(&[
        "convergence", "--scenario", "density_wave", "--levels", "2", "--degree", "2", "--cells", "4", "--end-time", "0.1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = stdout_json(&out);
    let levels = table["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 2);
    assert!(levels[0]["eoc"].is_null());
    assert!(levels[1]["eoc"].as_f64().unwrap() > 2.0);
}

#[test]
fn convergence_rejects_scenarios_without_exact_solutions() {
    let out = thetaflux(&["convergence", "--scenario", "taylor_green", "--levels", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
