use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gabor-eb"))
        .args(args)
        .output()
        .unwrap()
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, String) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_owned();
    full.extend(["--out", &p]);
    let out = run(&full);
    let text = std::fs::read_to_string(&path).unwrap_or_default();
    (out, text)
}

#[test]
fn hat_samples() {
    let out = run(&["spline", "--rates", "0,0", "--samples", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,value");
    assert_eq!(
        &lines[1..],
        ["0.0,0.0", "0.5,0.5", "1.0,1.0", "1.5,0.5", "2.0,0.0"]
    );
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "dual", "--rates", "1,2,3", "--alpha", "2", "--beta", "0.45", "--format", "json",
    ];
    let (a, first) = run_to(dir.path(), "a.json", &args);
    let (b, second) = run_to(dir.path(), "b.json", &args);
    assert!(a.status.success() && b.status.success());
    assert!(!first.is_empty());
    assert_eq!(first, second);

    let threaded = Command::new(env!("CARGO_BIN_EXE_gabor-eb"))
        .args([
            "zak", "eval", "--lambda", "1", "--alpha", "1", "--grid", "16",
        ])
        .env("GABOR_EB_THREADS", "1")
        .output()
        .unwrap();
    let auto = Command::new(env!("CARGO_BIN_EXE_gabor-eb"))
        .args([
            "zak", "eval", "--lambda", "1", "--alpha", "1", "--grid", "16",
        ])
        .env("GABOR_EB_THREADS", "0")
        .output()
        .unwrap();
    assert!(threaded.status.success());
    assert_eq!(threaded.stdout, auto.stdout);
}

#[test]
fn json_reports_embed_the_config() {
    for args in [
        &["spline", "--rates", "-2,-1,1,2", "--format", "json"][..],
        &["zak", "zero", "--rates", "0,0,0", "--format", "json"],
        &[
            "bounds",
            "formula",
            "--family",
            "eb2",
            "--lambda",
            "1",
            "--beta-frac",
            "40/61",
            "--format",
            "json",
        ],
        &[
            "bounds",
            "optimal",
            "--lambda",
            "1",
            "--beta",
            "0.5",
            "--method",
            "highredundancy",
            "--format",
            "json",
        ],
    ] {
        let out = run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for key in ["config", "result", "residuals"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
        assert_eq!(v["config"]["format"], "json");
    }
}

#[test]
fn zero_locations() {
    let out = run(&["zak", "zero", "--rates", "0,0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["x_zero"], 0.5);
    let out = run(&["zak", "zero", "--rates", "0,0,0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["x_zero"], 0.0);
}

#[test]
fn exit_status_follows_residual_checks() {
    assert!(run(&["zak", "verify", "--lambda", "1", "--alpha", "1"])
        .status
        .success());
    assert!(
        run(&["zak", "factor-check", "--poles", "1,-1", "--alpha", "1.7"])
            .status
            .success()
    );
    // sigma reaches 1e10 here, beyond what float64 resolves to 1e-9
    let out = run(&[
        "dual",
        "--rates",
        "-2,-1,1,2",
        "--alpha",
        "1",
        "--beta",
        "0.86",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(run(&[
        "dual",
        "--rates",
        "-2,-1,1,2",
        "--alpha",
        "1",
        "--beta",
        "0.86",
        "--extra-cols",
        "8"
    ])
    .status
    .success());
}

#[test]
fn invalid_input_is_rejected() {
    assert_eq!(run(&["spline", "--rates", "a,b"]).status.code(), Some(2));
    assert_eq!(
        run(&["bounds", "formula", "--family", "eb2", "--lambda", "1", "--beta", "1.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "bounds",
            "formula",
            "--family",
            "eb2",
            "--lambda",
            "1",
            "--beta-frac",
            "3/0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        run(&["dual", "--rates", "1", "--alpha", "1", "--beta", "0.5"])
            .status
            .code(),
        Some(2)
    );
    let out = run(&[
        "spline",
        "--rates",
        "0,0",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}

#[test]
fn figure3_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (out, text) = run_to(dir.path(), "fig3.csv", &["bounds", "figure3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "panel,k,beta,A_formula,A_opt,B_opt");
    assert_eq!(lines.len(), 61);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        let (a, opt): (f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap());
        assert!(a <= opt, "{line}");
    }
}

#[test]
fn every_csv_has_a_header() {
    for args in [
        &["zak", "eval", "--rates", "1,2", "--grid", "4"][..],
        &["zak", "verify", "--poles", "2,-1"],
        &[
            "dual",
            "--rates",
            "0,0",
            "--alpha",
            "1",
            "--beta-frac",
            "3/5",
        ],
        &[
            "bounds",
            "optimal",
            "--poles",
            "1,-1",
            "--beta-frac",
            "40/61",
            "--grid",
            "32",
            "--max-grid",
            "64",
        ],
    ] {
        let out = run(args);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8(out.stdout).unwrap();
        let header = text.lines().next().unwrap();
        assert!(
            header.chars().any(|c| c.is_ascii_alphabetic())
                && !header.starts_with(|c: char| c.is_ascii_digit()),
            "{args:?}: {header}"
        );
    }
}
