use std::path::{Path, PathBuf};
use std::process::Command as Process;

use normsq_cli::commands::{run_verify_with_components, EXIT_CHECK, EXIT_INPUT, EXIT_OK};
use normsq_cli::{run, Command, Options, SpecDocument};
use normsq_core::critical::enumerate_critical_components;
use normsq_core::exactlin::RatVec;

fn spec_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn write_spec(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const EMPTY: &str = r#"{"rank": 2, "weights": [], "shift": ["1/2", "-1"]}"#;
const BAD_SHIFT: &str =
    r#"{"rank": 2, "weights": [{"weight": [1, 0], "multiplicity": 1}], "shift": ["1/0", "1"]}"#;

/// Rows of the table printed after the `spec:` header, keyed by column.
fn table_rows(stdout: &str) -> Vec<Vec<String>> {
    stdout
        .lines()
        .skip_while(|l| !l.starts_with("alpha"))
        .skip(1)
        .take_while(|l| !l.contains(':'))
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect()
}

#[test]
fn analyze_c3_rows() {
    let out = run(Command::Analyze, &spec_path("c3.json"), &Options::default());
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let rows = table_rows(&out.stdout);
    assert_eq!(rows.len(), 4);
    let mut pairs: Vec<(String, String)> =
        rows.iter().map(|r| (r[0].clone(), r[2].clone())).collect();
    pairs.sort();
    let mut expected = vec![
        ("(-3,1)".to_string(), "4".to_string()),
        ("(0,1)".into(), "2".into()),
        ("(-1,-1)".into(), "4".into()),
        ("(0,0)".into(), "0".into()),
    ];
    expected.sort();
    assert_eq!(pairs, expected);
    assert!(out.stdout.lines().any(|l| l.starts_with("f-values: ")));
}

#[test]
fn analyze_empty_weights_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, "empty.json", EMPTY);
    let out = run(Command::Analyze, &path, &Options::default());
    assert_eq!(out.code, EXIT_OK);
    let rows = table_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "(1/2,-1)");
    assert_eq!(rows[0][2], "0");
}

#[test]
fn malformed_rational_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, "bad.json", BAD_SHIFT);
    for command in [
        Command::Analyze,
        Command::Poincare,
        Command::Verify,
        Command::Flow,
        Command::Plot,
    ] {
        let out = run(command, &path, &Options::default());
        assert_eq!(out.code, EXIT_INPUT);
        assert!(out.stderr.contains("shift[0]"), "{}", out.stderr);
    }
}

#[test]
fn missing_file_and_bad_target_are_input_errors() {
    let out = run(
        Command::Analyze,
        Path::new("/nonexistent/spec.json"),
        &Options::default(),
    );
    assert_eq!(out.code, EXIT_INPUT);
    let opts = Options {
        target: Some("1,2,3".into()),
        ..Options::default()
    };
    let out = run(Command::Poincare, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("target"), "{}", out.stderr);
}

fn verdict_line(stdout: &str) -> &str {
    stdout
        .lines()
        .find(|l| !l.starts_with("spec:") && !l.starts_with("warning:"))
        .unwrap()
}

#[test]
fn poincare_lines() {
    let out = run(
        Command::Poincare,
        &spec_path("c3.json"),
        &Options::default(),
    );
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(
        verdict_line(&out.stdout),
        "regular; P = 1 + t^2; betti = [1,0,1]"
    );

    let out = run(
        Command::Poincare,
        &spec_path("projective_plane.json"),
        &Options::default(),
    );
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(
        verdict_line(&out.stdout),
        "regular; P = 1 + t^2 + t^4; betti = [1,0,1,0,1]"
    );

    let out = run(
        Command::Poincare,
        &spec_path("opposite.json"),
        &Options::default(),
    );
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(verdict_line(&out.stdout), "singular; P = 1/(1 - t^2)^1");
}

#[test]
fn poincare_target_flag_overrides_document() {
    let opts = Options {
        target: Some("(-10,-10)".into()),
        ..Options::default()
    };
    let out = run(Command::Poincare, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(verdict_line(&out.stdout), "regular; P = 0; empty level");
}

#[test]
fn verify_c3_passes() {
    let opts = Options {
        seed: Some(42),
        samples: Some(500),
        ..Options::default()
    };
    let out = run(Command::Verify, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.ends_with("verdict: pass\n"));
    assert_eq!(out.stdout.matches("condition1 ok").count(), 4);
}

#[test]
fn verify_opposite_weights_passes() {
    let out = run(
        Command::Verify,
        &spec_path("opposite.json"),
        &Options::default(),
    );
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("(0) f=0 index=0"), "{}", out.stdout);
}

#[test]
fn verify_corrupted_table_fails() {
    let doc = SpecDocument::read(&spec_path("c3.json")).unwrap();
    let loaded = doc.load(None).unwrap();
    let mut comps = enumerate_critical_components(&loaded.spec, &loaded.target).unwrap();
    let c = comps
        .iter_mut()
        .find(|c| c.value == RatVec::from_ints(&[0, 1]))
        .unwrap();
    c.index = 4;
    let out = run_verify_with_components(&loaded, &comps, &Options::default()).unwrap();
    assert_eq!(out.code, EXIT_CHECK);
    assert!(out.stdout.contains("verdict: FAIL"));
    assert!(
        out.stdout.contains("worst witness: (0,1)"),
        "{}",
        out.stdout
    );
}

#[test]
fn verify_rejects_bad_parameters() {
    let opts = Options {
        radius: Some(-1.0),
        ..Options::default()
    };
    assert_eq!(
        run(Command::Verify, &spec_path("c3.json"), &opts).code,
        EXIT_INPUT
    );
    let opts = Options {
        samples: Some(0),
        ..Options::default()
    };
    assert_eq!(
        run(Command::Verify, &spec_path("c3.json"), &opts).code,
        EXIT_INPUT
    );
}

#[test]
fn flow_c3_all_strata() {
    let opts = Options {
        points: Some(200),
        seed: Some(7),
        ..Options::default()
    };
    let out = run(Command::Flow, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    let rows = table_rows(&out.stdout);
    let mut alphas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    alphas.sort();
    assert_eq!(alphas, ["(-1,-1)", "(-3,1)", "(0,0)", "(0,1)"]);
    assert!(out.stdout.contains("\nunmatched: 0\n"));
    assert!(out.stdout.contains("frontier: pass"));
}

#[test]
fn flow_warns_when_not_polarized() {
    let out = run(
        Command::Flow,
        &spec_path("opposite.json"),
        &Options::default(),
    );
    let warning = out
        .stdout
        .lines()
        .find(|l| l.starts_with("warning:"))
        .unwrap();
    assert!(warning.contains("properness not certified"), "{warning}");
}

#[test]
fn flow_with_no_points() {
    let opts = Options {
        points: Some(0),
        ..Options::default()
    };
    let out = run(Command::Flow, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_OK);
    assert!(table_rows(&out.stdout).is_empty());
    assert!(out.stdout.contains("unmatched: 0"));
}

#[test]
fn plot_c3_elements() {
    let out = run(Command::Plot, &spec_path("c3.json"), &Options::default());
    assert_eq!(out.code, EXIT_OK);
    let svg = out.stdout;
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("id=\"momentum-image\"").count(), 1);
    assert_eq!(svg.matches("id=\"critical-ray-").count(), 3);
    assert_eq!(svg.matches("id=\"critical-dot-").count(), 4);
    assert!(!svg.contains("<script"));
}

#[test]
fn plot_empty_weights_and_rank_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, "empty.json", EMPTY);
    let out = run(Command::Plot, &path, &Options::default());
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout.matches("id=\"critical-dot-").count(), 1);
    assert_eq!(out.stdout.matches("id=\"critical-ray-").count(), 0);

    let out = run(Command::Plot, &spec_path("rank3.json"), &Options::default());
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("rank 3"));
}

#[test]
fn plot_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("c3.svg");
    let opts = Options {
        out: Some(svg.clone()),
        ..Options::default()
    };
    let out = run(Command::Plot, &spec_path("c3.json"), &opts);
    assert_eq!(out.code, EXIT_OK);
    let inline = run(Command::Plot, &spec_path("c3.json"), &Options::default()).stdout;
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), inline);
}

/// Runs a command twice into separate files and returns (stdout, csv, json).
fn outputs(
    command: Command,
    spec: &Path,
    dir: &Path,
    tag: &str,
    opts: &Options,
) -> (String, String, String) {
    let csv = dir.join(format!("{tag}.csv"));
    let json = dir.join(format!("{tag}.json"));
    let opts = Options {
        csv: Some(csv.clone()),
        out: Some(json.clone()),
        ..opts.clone()
    };
    let out = run(command, spec, &opts);
    assert_eq!(out.code, EXIT_OK, "{}{}", out.stdout, out.stderr);
    (
        out.stdout,
        std::fs::read_to_string(csv).unwrap(),
        std::fs::read_to_string(json).unwrap(),
    )
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec_path("c3.json");
    let opts = Options {
        seed: Some(3),
        samples: Some(100),
        points: Some(40),
        ..Options::default()
    };
    for command in [Command::Analyze, Command::Verify, Command::Flow] {
        let a = outputs(command, &spec, dir.path(), "a", &opts);
        let b = outputs(command, &spec, dir.path(), "b", &opts);
        assert_eq!(a, b, "{}", command.name());
    }
    let a = run(Command::Plot, &spec, &Options::default());
    let b = run(Command::Plot, &spec, &Options::default());
    assert_eq!(a, b);
}

#[test]
fn csv_and_report_contents() {
    let dir = tempfile::tempdir().unwrap();
    let (_, csv, json) = outputs(
        Command::Analyze,
        &spec_path("c3.json"),
        dir.path(),
        "c3",
        &Options::default(),
    );
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..3], ["alpha", "f", "index"]);
    assert_eq!(reader.records().count(), 4);

    let report: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(report["command"], "analyze");
    assert_eq!(report["results"]["components"].as_array().unwrap().len(), 4);
    assert!(report["tolerances"]["zero_eigenvalue"].is_number());
    assert!(report["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn echoed_spec_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in [
        "c3.json",
        "projective_plane.json",
        "opposite.json",
        "rank3.json",
    ] {
        let (_, _, json) = outputs(
            Command::Analyze,
            &spec_path(name),
            dir.path(),
            "r",
            &Options::default(),
        );
        let report: serde_json::Value = serde_json::from_str(&json).unwrap();
        let echo = SpecDocument::from_json(&report["spec"].to_string()).unwrap();
        let original = SpecDocument::read(&spec_path(name))
            .unwrap()
            .load(None)
            .unwrap();
        let again = echo.load(None).unwrap();
        assert_eq!(again.spec, original.spec, "{name}");
        assert_eq!(again.target, original.target, "{name}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_normsq");
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(&dir, "bad.json", BAD_SHIFT);
    let code =
        |args: &[&std::ffi::OsStr]| Process::new(bin).args(args).output().unwrap().status.code();

    let c3 = spec_path("c3.json");
    assert_eq!(code(&["poincare".as_ref(), c3.as_os_str()]), Some(0));
    assert_eq!(code(&["analyze".as_ref(), bad.as_os_str()]), Some(1));
    assert_eq!(code(&["frobnicate".as_ref(), c3.as_os_str()]), Some(1));
    assert_eq!(
        code(&["plot".as_ref(), spec_path("rank3.json").as_os_str()]),
        Some(1)
    );

    let out = Process::new(bin)
        .args([
            "poincare".as_ref(),
            c3.as_os_str(),
            "--target".as_ref(),
            "-10,-10".as_ref(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("P = 0"));
}
