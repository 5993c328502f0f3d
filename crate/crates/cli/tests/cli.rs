use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_hydrocast");

const SYNTHETIC: &str = r#"
length = 1600
burn_in = 500
ar = [0.5]
ar_form = "regression"
arch = [0.3]

[mean]
level = 10.0
daily_step = 3.0
daily_step_hour = 8
"#;

const STUDY: &str = r#"
output_dir = "out"
calibration_hours = 1200
n_origins = 2
horizon = 12
ensemble_size = 50
reference = "fm"

[data]
path = "demand.csv"
holidays = "none"

[[models]]
name = "arx"
kind = "arx"
lags = { mean = [1, 24], variance = [1], interaction = [] }

[[models]]
name = "fm"
kind = "naive_fm"

[storage]
capacity = 0.0
window = 6
"#;

fn hydrocast(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().unwrap()
}

fn setup(study: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("synth.toml"), SYNTHETIC).unwrap();
    std::fs::write(dir.path().join("study.toml"), study).unwrap();
    let out = hydrocast(
        dir.path(),
        &["simulate-data", "--config", "synth.toml", "--seed", "3", "--out", "demand.csv"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn study_scores_every_model_at_every_origin() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let per_origin = read(&dir.path().join("out/per_origin.csv"));
    assert_eq!(per_origin.lines().count(), 1 + 2 * 2);
    let per_horizon = read(&dir.path().join("out/per_horizon.csv"));
    assert_eq!(per_horizon.lines().count(), 1 + 2 * 12);
    let manifest: serde_json::Value = serde_json::from_str(&read(&dir.path().join("out/manifest.json"))).unwrap();
    assert_eq!(manifest["complete"], true);
    assert_eq!(manifest["seed"], 1);
    let summary = read(&dir.path().join("out/summary.csv"));
    let fm = summary.lines().find(|l| l.starts_with("fm,")).unwrap();
    assert_eq!(fm.split(',').nth(7), Some("0"));
}

#[test]
fn repeated_studies_are_byte_identical() {
    let dir = setup(STUDY);
    for out in ["a", "b"] {
        let o = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "8", "--output", out]);
        assert!(o.status.success());
    }
    for file in ["per_origin.csv", "summary.csv", "dm.csv", "aggregate.json", "manifest.json", "plots/fan.csv"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(file)).unwrap(),
            std::fs::read(dir.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
    let o = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "9", "--output", "c"]);
    assert!(o.status.success());
    assert_ne!(read(&dir.path().join("a/per_origin.csv")), read(&dir.path().join("c/per_origin.csv")));
}

#[test]
fn study_requires_a_seed() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["study", "--config", "study.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn configuration_errors_exit_before_fitting() {
    let dir = setup(&STUDY.replace("reference = \"fm\"", "reference = \"missing\""));
    let out = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
    assert!(!dir.path().join("out").exists());

    let dir = setup(&STUDY.replace("n_origins = 2", "n_origins = 2\nbogus = 1"));
    let out = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_data_is_a_data_error() {
    let dir = setup(&STUDY.replace("demand.csv", "absent.csv"));
    let out = hydrocast(dir.path(), &["study", "--config", "study.toml", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_capacity_is_always_exceeded() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["storage", "--config", "study.toml", "--seed", "1", "--model", "arx"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("out/storage.csv"));
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert!(row.ends_with(",1"), "{row}");
    }
}

#[test]
fn storage_window_beyond_horizon_is_rejected() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["storage", "--config", "study.toml", "--seed", "1", "--window", "13"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fit_and_forecast_write_their_reports() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["fit", "--config", "study.toml", "--model", "arx", "--out", "fit"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["window_end"], 1200);
    for file in ["mean_coefficients.csv", "variance_coefficients.csv", "model.json", "fit.json"] {
        assert!(dir.path().join("fit").join(file).exists(), "{file}");
    }
    let out = hydrocast(
        dir.path(),
        &["forecast", "--config", "study.toml", "--model", "fm", "--seed", "2", "--mode", "comonotone", "--out", "fc"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&dir.path().join("fc/ensemble.csv")).lines().count(), 1 + 50 * 12);
    assert_eq!(read(&dir.path().join("fc/quantiles.csv")).lines().count(), 1 + 12);
}

#[test]
fn score_command_reproduces_hand_computed_scores() {
    let dir = tempfile::tempdir().unwrap();
    // origin 0: two paths {0, 2} against 1 at one hour; origin 5: one
    // path at distance 5 from the realized pair
    std::fs::write(
        dir.path().join("ens.csv"),
        "origin,path,h,value\n0,1,1,0\n0,2,1,2\n5,1,1,4\n5,1,2,2\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("act.csv"), "origin,h,value\n0,1,1\n5,1,1\n5,2,-2\n").unwrap();
    let out = hydrocast(dir.path(), &["score", "--ensemble", "ens.csv", "--actuals", "act.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[0][1]), ("0", "0.5"));
    assert_eq!((rows[1][0], rows[1][1]), ("5", "5"));
    assert_eq!(rows[1][3], "3.5");

    std::fs::write(dir.path().join("act.csv"), "origin,h,value\n0,1,1\n").unwrap();
    let out = hydrocast(dir.path(), &["score", "--ensemble", "ens.csv", "--actuals", "act.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ingest_reports_the_grid() {
    let dir = setup(STUDY);
    let out = hydrocast(dir.path(), &["ingest", "--data", "demand.csv"]);
    assert!(out.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["hours"], 1600);
    assert_eq!(summary["missing"], 0);
    let out = hydrocast(dir.path(), &["ingest", "--data", "demand.csv", "--demand-column", "load"]);
    assert_eq!(out.status.code(), Some(2));
}
