use std::path::Path;
use std::process::{Command, Output};

fn sumprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn compute_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let a123 = write(dir.path(), "a123.txt", "1\n2\n3\n");
    let a12 = write(dir.path(), "a12.txt", "# comment\n1\n2\n");
    let o = sumprod(&["compute", "e+", &a123]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "19\n");
    let o = sumprod(&["compute", "quotientset", &a12]);
    assert_eq!(stdout(&o), "1/2\n1\n2\n");
    let o = sumprod(&["compute", "e×", &a123]);
    assert_eq!(stdout(&o), "15\n");
    let o = sumprod(&["compute", "slice", &a123, "--lambda", "2"]);
    assert_eq!(stdout(&o), "2\n");
    let o = sumprod(&["compute", "sigma", &a123, "--alpha", "1,1,-1"]);
    assert_eq!(stdout(&o), "3\n");
}

#[test]
fn decimals_are_marked() {
    let dir = tempfile::tempdir().unwrap();
    let a12 = write(dir.path(), "a12.txt", "1\n2\n");
    let o = sumprod(&["compute", "quotientset", &a12, "--decimal"]);
    let text = stdout(&o);
    assert!(text.starts_with("1/2\t~0.5"), "{text}");
    assert!(text.contains("approximate"));
    let o = sumprod(&["certify", &a12, "--kind", "d", "--decimal"]);
    assert!(stdout(&o).contains("_approx"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        sumprod(&["compute", "e+", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let bad = write(dir.path(), "bad.txt", "1\nx/2\n");
    assert_eq!(sumprod(&["compute", "e+", &bad]).status.code(), Some(2));
    let zero = write(dir.path(), "zero.txt", "0\n1\n");
    assert_eq!(sumprod(&["compute", "e×", &zero]).status.code(), Some(3));
    assert_eq!(sumprod(&["compute", "e+", &zero]).status.code(), Some(0));
    let big = r#"{"kind":"ap","size":12}"#;
    assert_eq!(
        sumprod(&["compute", "sigma", big, "--sigma-budget", "10"])
            .status
            .code(),
        Some(5)
    );
    let cfg = write(dir.path(), "cfg.json", r#"{"threads": 0}"#);
    assert_eq!(
        sumprod(&["--config", &cfg, "compute", "e+", big])
            .status
            .code(),
        Some(2)
    );
    // the slice search finds nothing at this size: an asserted failure
    assert_eq!(
        sumprod(&["slice-search", "--max-len", "5"]).status.code(),
        Some(4)
    );
}

#[test]
fn verify_writes_passing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sumprod(&[
        "verify",
        "--family",
        "ap",
        "--sizes",
        "8,16,32",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("verify.csv")).unwrap();
    let asserted: Vec<&str> = csv
        .lines()
        .filter(|l| l.contains("asserted-exact"))
        .collect();
    assert!(asserted.len() > 30);
    assert!(asserted.iter().all(|l| l.contains(",true,")));
}

#[test]
fn trace_ends_report_only() {
    let dir = tempfile::tempdir().unwrap();
    let a123 = write(dir.path(), "a123.txt", "1\n2\n3\n");
    let o = sumprod(&["trace", "3", &a123]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "sumprod.trace/1");
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["status"], "report-only");
    let o = sumprod(&["trace", "sumset-ratio", &a123, "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn decompose_reports_the_split() {
    let spec = r#"{"kind":"ap_union_gp","ap_size":24,"gp_size":24}"#;
    let o = sumprod(&["decompose", spec, "--M", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["value"];
    assert_eq!(r["stop_reason"], "threshold");
    let b = r["b"].as_array().unwrap().len();
    let c = r["c"].as_array().unwrap().len();
    assert_eq!(b + c, 48);
    assert_eq!(r["partition_holds"], true);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"decimal": false, "sigma_budget": 10}"#,
    );
    let spec = r#"{"kind":"ap","size":12}"#;
    let o = sumprod(&["--config", &cfg, "compute", "sigma", spec]);
    assert_eq!(o.status.code(), Some(5));
    let o = sumprod(&[
        "--config",
        &cfg,
        "--sigma-budget",
        "100000",
        "compute",
        "sigma",
        spec,
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn batch_scans_keep_spec_order() {
    let dir = tempfile::tempdir().unwrap();
    let batch = write(
        dir.path(),
        "batch.json",
        r#"{"op": "energies", "specs": [
            {"kind": "gp", "size": 5},
            {"kind": "ap", "size": 5},
            {"kind": "convex", "size": 5}
        ]}"#,
    );
    let o = sumprod(&["scan", &batch, "--threads", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let labels: Vec<&str> = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["gp(5)", "ap(5)", "convex(5)"]);
    // {1..5}: E⁺ = 85
    assert_eq!(v["cells"][1]["outcome"]["Ok"]["additive"], "85");
}
