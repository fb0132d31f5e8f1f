use bmk_cli::{columns, emit_report, run_experiment, sidecar_path, CliError, Experiment, ExperimentConfig, Format, Verdict};
use std::process::Command;

fn config(e: Experiment, extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml(&format!("experiment = \"{}\"\n{extra}", e.name())).unwrap()
}

fn bmk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bmk"))
}

#[test]
fn cauchy_formula_verification_passes() {
    let r = run_experiment(&config(Experiment::BmkVerify, "f = \"z1^2\"\npoints = 6")).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.rows.len(), 6 * 3);
    let finest: Vec<f64> = r.rows.iter().filter(|row| row[0] == "2").map(|row| row[3].parse().unwrap()).collect();
    assert!(finest.iter().all(|v| *v < 1e-8), "{finest:?}");
}

#[test]
fn same_seed_gives_identical_rows() {
    for e in [Experiment::BmkVerify, Experiment::YoungScan] {
        let a = run_experiment(&config(e, "seed = 7")).unwrap();
        let b = run_experiment(&config(e, "seed = 7")).unwrap();
        let c = run_experiment(&config(e, "seed = 8")).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_ne!(a.rows, c.rows, "{e}");
        let mut wa = Vec::new();
        let mut wb = Vec::new();
        a.write_csv(&mut wa).unwrap();
        b.write_csv(&mut wb).unwrap();
        assert_eq!(wa, wb);
    }
}

#[test]
fn thresholds_change_the_verdict_only() {
    let loose = run_experiment(&config(Experiment::GreenStokes, "")).unwrap();
    let strict = run_experiment(&config(Experiment::GreenStokes, "[thresholds]\ngreen_stokes = 0.0")).unwrap();
    assert_eq!(loose.verdict, Verdict::Pass);
    assert_eq!(strict.verdict, Verdict::Fail);
    assert_eq!(loose.rows, strict.rows);
}

#[test]
fn column_order_is_fixed() {
    for e in [Experiment::GreenStokes, Experiment::YoungScan, Experiment::BmkVerify] {
        let a = run_experiment(&config(e, "seed = 3")).unwrap();
        let b = run_experiment(&config(e, "seed = 4")).unwrap();
        assert_eq!(a.columns, b.columns);
        assert_eq!(a.columns, columns(e));
        assert!(a.rows.iter().all(|r| r.len() == a.columns.len()));
    }
}

#[test]
fn empty_rows_give_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = run_experiment(&config(Experiment::GreenStokes, "")).unwrap();
    r.rows.clear();
    let path = dir.path().join("out.csv");
    let written = emit_report(&r, Format::Csv, &path).unwrap();
    assert_eq!(written, vec![path.clone(), sidecar_path(&path)]);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert_eq!(csv.trim_end(), columns(Experiment::GreenStokes).join(","));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&path)).unwrap()).unwrap();
    assert_eq!(side["row_count"], 0);
    assert_eq!(side["verdict"], "pass");
}

#[test]
fn unwritable_path_is_an_error() {
    let r = run_experiment(&config(Experiment::GreenStokes, "")).unwrap();
    let err = emit_report(&r, Format::Json, std::path::Path::new("/nonexistent-dir/x/out.json")).unwrap_err();
    assert!(matches!(err, CliError::Io(_)));
}

#[test]
fn invalid_config_names_the_key() {
    match ExperimentConfig::from_toml("grd = 3") {
        Err(CliError::Usage(msg)) => assert!(msg.contains("grd"), "{msg}"),
        other => panic!("{other:?}"),
    }
    match run_experiment(&config(Experiment::Mollify, "eps = [0.1, -0.2]")) {
        Err(e @ CliError::Usage(_)) => {
            assert!(e.to_string().contains("eps"));
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("{other:?}"),
    }
    assert!("bmk-nothing".parse::<Experiment>().is_err());
}

#[test]
fn unknown_subcommand_exits_with_usage_status() {
    let out = bmk().arg("bmk-nothing").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bmk().args(["green-stokes", "--level", "many"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_status_mirrors_the_json_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let strict = dir.path().join("strict.toml");
    std::fs::write(&strict, "[thresholds]\ngreen_stokes = 0.0\n").unwrap();
    for (cfg, code, verdict) in [(None, 0, "pass"), (Some(&strict), 1, "fail")] {
        let out_path = dir.path().join(format!("gs{code}.json"));
        let mut cmd = bmk();
        cmd.args(["green-stokes", "--format", "json", "--level", "1", "--out"]).arg(&out_path);
        if let Some(c) = cfg {
            cmd.arg("--config").arg(c);
        }
        let out = cmd.output().unwrap();
        assert_eq!(out.status.code(), Some(code));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
        assert_eq!(v["verdict"], verdict);
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "seed = 5\nlevel = 0\n").unwrap();
    let out_path = dir.path().join("o.csv");
    let out = bmk()
        .args(["green-stokes", "--level", "1", "--seed", "9", "--out"])
        .arg(&out_path)
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let side: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(&out_path)).unwrap()).unwrap();
    let echo: ExperimentConfig = ExperimentConfig::from_toml(side["metadata"]["config"].as_str().unwrap()).unwrap();
    assert_eq!((echo.level, echo.seed), (Some(1), 9));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap().lines().count(), 3);
}
