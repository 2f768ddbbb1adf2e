use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use anm_cli::{cli_main, EXIT_FAILURE, EXIT_USAGE};
use anm_core::Direction;

fn anm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anm")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cli_main(["anm", "--help"]), 0);
    assert_eq!(cli_main(["anm", "--version"]), 0);
    assert_eq!(cli_main(["anm", "infer", "--help"]), 0);
}

#[test]
fn usage_errors_exit_64() {
    let out = anm(&[]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(cli_main(["anm", "infer"]), EXIT_USAGE);
    assert_eq!(cli_main(["anm", "frobnicate"]), EXIT_USAGE);
    assert_eq!(
        cli_main([
            "anm",
            "simulate",
            "--generator",
            "custom",
            "--n",
            "5",
            "--seed",
            "1",
            "--out",
            "x.csv"
        ]),
        EXIT_USAGE
    );
    assert_eq!(
        cli_main([
            "anm",
            "simulate",
            "--generator",
            "cubic",
            "--n",
            "-5",
            "--seed",
            "1",
            "--out",
            "x.csv"
        ]),
        EXIT_USAGE
    );
}

#[test]
fn sweep_with_missing_spec_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let out = anm(&["sweep", "--spec", "/nonexistent/sweep.cfg", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn infer_on_cubic_sample_points_forward() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cubic.csv");
    let sim = [
        "anm",
        "simulate",
        "--generator",
        "cubic",
        "--b",
        "1",
        "--q",
        "1",
        "--n",
        "2000",
        "--seed",
        "1",
        "--out",
        path(&csv),
    ];
    assert_eq!(cli_main(sim), 0);
    let out = anm(&["infer", "--data", path(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l == "decision=XtoY"), "{stdout}");
    for key in ["h_x", "h_y", "h_res_fwd", "h_res_bwd", "c_xy", "c_yx", "gap", "tau"] {
        let line = stdout.lines().find(|l| l.starts_with(&format!("{key}="))).unwrap();
        assert!(line[key.len() + 1..].parse::<f64>().unwrap().is_finite());
    }
}

#[test]
fn infer_reports_config_warnings_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lin.csv");
    assert_eq!(
        cli_main([
            "anm",
            "simulate",
            "--generator",
            "linear-gaussian",
            "--n",
            "300",
            "--seed",
            "2",
            "--out",
            path(&csv)
        ]),
        0
    );
    let cfg = dir.path().join("gauss.cfg");
    fs::write(&cfg, "entropy_kernel = gaussian\nentropy_bandwidth = fixed:0.3\n").unwrap();
    let out = anm(&["infer", "--data", path(&csv), "--config", path(&cfg)]);
    assert!(matches!(out.status.code(), Some(0..=2)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = anm(&["infer", "--data", path(&csv), "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(EXIT_FAILURE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0,abc\n").unwrap();
    assert_eq!(anm(&["infer", "--data", path(&bad)]).status.code(), Some(EXIT_FAILURE));
}

#[test]
fn simulate_custom_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("model.cfg");
    fs::write(
        &spec,
        "x_dist = uniform(-1,1)\nf = table(-1:0,0:1,1:0)\nnoise = laplace(0.1)\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "anm",
        "simulate",
        "--generator",
        "custom",
        "--spec",
        path(&spec),
        "--n",
        "50",
        "--seed",
        "4",
        "--out",
        path(&csv),
    ];
    assert_eq!(cli_main(args), 0);
    let sample = anm_core::ingest_csv(&csv).unwrap();
    assert_eq!(sample.len(), 50);
    assert!(sample.xs().iter().all(|x| (-1.0..1.0).contains(x)));
}

#[test]
fn sweep_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("s.cfg");
    fs::write(
        &spec,
        "axis = sample-size\naxis_values = 100\nrepetitions = 2\ncompare_modes = true\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        cli_main([
            "anm",
            "sweep",
            "--spec",
            path(&spec),
            "--out",
            path(&out),
            "--jobs",
            "2"
        ]),
        0
    );
    let rows = fs::read_to_string(out.join("rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4);
    assert_eq!(
        fs::read_to_string(out.join("aggregates.csv")).unwrap().lines().count(),
        1 + 2
    );
}

#[test]
fn verify_lemma1_passes() {
    let out = anm(&["verify", "--lemma1"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
}

#[test]
fn exit_codes_are_distinct() {
    let codes: Vec<i32> = [Direction::XtoY, Direction::YtoX, Direction::Abstain]
        .iter()
        .map(|d| d.exit_code())
        .collect();
    assert_eq!(codes, vec![0, 1, 2]);
}
