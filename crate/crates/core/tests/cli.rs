//! End-to-end checks of the command-line interface: exit codes, the JSON
//! schema, and bit-identical reports for a fixed seed.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spin7lab"))
}

#[test]
fn example_list_prints_every_name() {
    let out = bin().arg("example-list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "plane",
        "graph",
        "s3xs3",
        "s6",
        "ellipsoid7",
        "helicoid_r3_q4",
        "minimal_r4_q4",
    ] {
        assert!(text.lines().any(|l| l == name), "missing {}", name);
    }
}

#[test]
fn classify_emits_schema_and_is_deterministic() {
    let run = || {
        let out = bin()
            .args([
                "classify",
                "--example",
                "s3xs3",
                "--sigma",
                "1",
                "--gamma",
                "pi/4",
                "--grid",
                "2",
                "--seed",
                "7",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "reports are bit-identical for a fixed seed");
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in ["example", "sigma", "gamma", "points", "aggregate"] {
        assert!(v.get(key).is_some(), "missing top-level field {}", key);
    }
    let p0 = &v["points"][0];
    for key in ["u", "class", "norms", "residuals", "table_rows"] {
        assert!(p0.get(key).is_some(), "missing point field {}", key);
    }
    assert_eq!(p0["class"], serde_json::json!(["W1-", "W3"]));
    assert_eq!(p0["half_flat"], serde_json::json!(true));
    assert_eq!(v["aggregate"]["consensus_class"], serde_json::json!(["W1-", "W3"]));
}

#[test]
fn classify_plane_is_kahler() {
    let out = bin()
        .args(["classify", "--example", "plane", "--grid", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["points"][0]["class"], serde_json::json!([]));
    assert_eq!(v["points"][0]["kahler"], serde_json::json!(true));
    // the totally geodesic table row holds
    let rows = v["points"][0]["table_rows"].as_array().unwrap();
    let w5 = rows
        .iter()
        .find(|r| r["id"] == "totally-geodesic")
        .expect("totally geodesic row present");
    assert_eq!(w5["satisfied"], serde_json::json!(true));
    assert_eq!(w5["contained"], serde_json::json!(true));
}

#[test]
fn gamma_tokens_parse() {
    for (token, _expect) in [("0", 0.0), ("pi/4", std::f64::consts::FRAC_PI_4), ("-3pi/4", -2.356)] {
        let out = bin()
            .args([
                "classify",
                "--example",
                "plane",
                "--grid",
                "1",
                "--gamma",
                token,
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "token {}", token);
    }
    let out = bin()
        .args(["classify", "--example", "plane", "--gamma", "two pies"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_flags_exit_two() {
    let out = bin().args(["classify", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_example_exits_one_with_diagnostic() {
    let out = bin()
        .args(["classify", "--example", "moebius"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stderr).unwrap()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("moebius"));
}

#[test]
fn verify_passes_and_reports_suites() {
    let out = bin().args(["verify", "--tol", "1e-9"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let suites = v.as_array().unwrap();
    assert_eq!(suites.len(), 7);
    for s in suites {
        assert_eq!(s["pass"], serde_json::json!(true), "suite {}", s["name"]);
    }
}

#[test]
fn json_flag_writes_the_report() {
    let dir = std::env::temp_dir().join("spin7lab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let _ = std::fs::remove_file(&path);
    let out = bin()
        .args([
            "classify",
            "--example",
            "s6",
            "--grid",
            "2",
            "--json",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let file = std::fs::read_to_string(&path).unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(file.trim(), stdout.trim());
    let v: serde_json::Value = serde_json::from_str(&file).unwrap();
    assert_eq!(v["example"], serde_json::json!("s6"));
    for p in v["points"].as_array().unwrap() {
        assert_eq!(p["nearly_kahler"], serde_json::json!(true));
    }
}
