use std::path::Path;
use std::process::{Command, Output};

use qcausal::model::{CausalMap, FamilyPoint, Paradigm};
use qcausal::tomography::read_counts_file;
use serde_json::Value;

fn qcausal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcausal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = qcausal(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    qcausal(args).status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn classify_paradigms() {
    for (name, class) in [
        ("Coh", "Coh"),
        ("ProbQ", "ProbQ"),
        ("PhysC", "PhysC"),
        ("ProbC", "ProbC"),
    ] {
        let report = ok_json(&["classify", "--paradigm", name]);
        assert_eq!(report["class"], class);
    }
    let report = ok_json(&["classify"]);
    assert_eq!(report["class"], "Coh");
    assert!((report["c_cd"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((report["neg_cd_plus"].as_f64().unwrap() - 0.10355339059327373).abs() < 1e-9);
}

#[test]
fn classify_family_points() {
    let ce = ok_json(&["classify", "--theta", "0"]);
    assert_eq!(ce["class"], "ProbQ");
    assert_eq!(ce["ce_quantum"], true);
    assert_eq!(ce["cc_quantum"], false);

    let delayed = ok_json(&["classify", "--tau", "1", "--tau-coh", "1"]);
    let q = (-0.5f64).exp();
    assert!((delayed["c_cd"].as_f64().unwrap() - q / 2.0).abs() < 1e-9);
    assert_eq!(delayed["class"], "Coh");
}

#[test]
fn classify_a_map_file_round_tripped_through_dump_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("probc.json");
    let out = qcausal(&[
        "dump-map",
        "--paradigm",
        "ProbC",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let map = CausalMap::read_json(&path).unwrap();
    assert!(map.tau().max_abs_diff(Paradigm::ProbC.build().tau()) < 1e-15);
    let report = ok_json(&["classify", "--map", path.to_str().unwrap()]);
    assert_eq!(report["class"], "ProbC");

    let stdout = ok_json(&["dump-map", "--theta", "1.2", "--p", "0.1"]);
    assert_eq!(stdout["layout"], serde_json::json!(["C", "B", "D"]));

    let report_path = dir.path().join("report.json");
    let out = qcausal(&[
        "classify",
        "--paradigm",
        "PhysC",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(read_json(&report_path)["class"], "PhysC");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // configuration and argument errors
    assert_eq!(code(&["sweep", "--family", "delay", "--steps", "1"]), 2);
    assert_eq!(code(&["sweep", "--family", "bogus"]), 2);
    assert_eq!(code(&["classify", "--q", "1.5"]), 2);
    assert_eq!(code(&["classify", "--epsilon", "0"]), 2);
    assert_eq!(code(&["classify", "--tau", "1"]), 2);
    assert_eq!(code(&["classify", "--paradigm", "Quantum"]), 2);
    assert_eq!(code(&["tomo", "--shots", "10"]), 2);

    // malformed map file
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"layout\": [").unwrap();
    assert_eq!(code(&["classify", "--map", bad.to_str().unwrap()]), 2);

    // well-formed but not a valid causal map
    let mut json = Paradigm::Coh.build().to_json();
    json.re[0][0] = 5.0;
    let invalid = dir.path().join("invalid.json");
    std::fs::write(&invalid, serde_json::to_string(&json).unwrap()).unwrap();
    assert_eq!(code(&["classify", "--map", invalid.to_str().unwrap()]), 3);

    // missing input file
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&["classify", "--map", missing.to_str().unwrap()]), 1);

    let out = qcausal(&["sweep", "--family", "delay", "--steps", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.q"));
}

#[test]
fn sweep_to_stdout_and_file() {
    let out = qcausal(&["sweep", "--family", "delay", "--steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], qcausal::sweep::SWEEP_HEADER);
    assert!(lines[3].ends_with(",Coh"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eta.json");
    let out = qcausal(&[
        "sweep",
        "--family",
        "eta",
        "--steps",
        "2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = read_json(&path);
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn sweep_reads_config_files_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(
        &cfg,
        "family = theta_p\ngrid.theta = 0:3.141592653589793:3\ngrid.p = 0:0.2:2\n",
    )
    .unwrap();
    let out = qcausal(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().lines().count(),
        1 + 6
    );

    let out = qcausal(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "p=0:0.2:4",
    ]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().lines().count(),
        1 + 12
    );
}

#[test]
fn sweep_output_is_byte_deterministic() {
    let args = [
        "sweep",
        "--family",
        "theta_p",
        "--grid",
        "theta=0:3:4",
        "--grid",
        "p=0:0.3:3",
    ];
    assert_eq!(qcausal(&args).stdout, qcausal(&args).stdout);
    let shots = [
        "sweep", "--family", "delay", "--steps", "2", "--shots", "1000", "--seed", "4",
    ];
    assert_eq!(qcausal(&shots).stdout, qcausal(&shots).stdout);
}

#[test]
fn tomo_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = qcausal(&[
        "tomo",
        "--paradigm",
        "Coh",
        "--shots",
        "20000",
        "--seed",
        "3",
        "--resamples",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let records = read_counts_file(&out.join("counts.csv")).unwrap();
    assert_eq!(records.len(), 54);
    assert!(records.iter().all(|r| r.shots == 20000.0));
    let map = CausalMap::read_json(&out.join("map.json")).unwrap();
    let report = read_json(&out.join("report.json"));
    assert_eq!(report["shots"], 20000);
    assert_eq!(report["seed"], 3);
    assert_eq!(report["bootstrap_resamples"], 20);
    let frob = report["frobenius_to_model"].as_f64().unwrap();
    assert!((frob - (map.tau() - Paradigm::Coh.build().tau()).frobenius_norm()).abs() < 1e-12);
    assert!(frob < 0.05);
    assert!((report["theta_hat"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 0.05);

    // the written counts classify the same way when read back
    let again = dir.path().join("again");
    let status = qcausal(&[
        "tomo",
        "--counts",
        out.join("counts.csv").to_str().unwrap(),
        "--seed",
        "3",
        "--resamples",
        "20",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    assert_eq!(
        std::fs::read(out.join("map.json")).unwrap(),
        std::fs::read(again.join("map.json")).unwrap()
    );
    assert_eq!(
        read_json(&again.join("report.json"))["class"],
        report["class"]
    );
}

#[test]
fn tomo_without_shots_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exact");
    let status = qcausal(&[
        "tomo",
        "--theta",
        "1.0",
        "--p",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let map = CausalMap::read_json(&out.join("map.json")).unwrap();
    let model = FamilyPoint::new(1.0, 0.1, 1.0, 0.0).build().unwrap();
    assert!(map.tau().max_abs_diff(model.tau()) < 1e-9);
    let report = read_json(&out.join("report.json"));
    assert!(report["frobenius_to_model"].as_f64().unwrap() < 1e-9);
    assert!((report["theta_hat"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(report.get("bootstrap_resamples").is_none());
    assert_eq!(report["shots"], Value::Null);
}

#[test]
fn tomo_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = qcausal(&[
            "tomo",
            "--paradigm",
            "PhysC",
            "--shots",
            "500",
            "--seed",
            "9",
            "--resamples",
            "10",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
        ["counts.csv", "map.json", "report.json"].map(|f| std::fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}
