use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lindcert"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn params_reference_point() {
    let o = run(&["--seed", "1", "params", "--epsilon", "0.5", "--delta", "0.3679", "--k", "1", "--degree", "1", "--l-bound", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for line in ["epsilon' = 0.05", "m = 19200", "R = 120", "t_max = 20"] {
        assert!(s.lines().any(|l| l == line), "missing {line:?} in\n{s}");
    }
    assert!(s.contains("T_bound = ") && s.contains("Q_bound = "));
}

#[test]
fn spectrum_of_dephasing() {
    let cfg = config("dephasing.toml");
    let o = run(&["--seed", "1", "spectrum", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("re,im"));
    let re: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(re.len(), 4);
    assert!(re[0].abs() < 1e-12 && re[1].abs() < 1e-12);
    assert!((re[2] + 2.0).abs() < 1e-12 && (re[3] + 2.0).abs() < 1e-12);
}

#[test]
fn curve_matches_closed_form_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let cfg = config("dephasing.toml");
    let o = run(&["--seed", "1", "curve", cfg.to_str().unwrap(), "--t-max", "3", "--points", "31", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read(&out).unwrap();
    assert!(text.starts_with(b"t,i_exact,i_twirled,purity\n"));
    let rows = lindcert::report::read_curve_csv(text.as_slice()).unwrap();
    assert_eq!(rows.len(), 31);
    for r in &rows {
        assert!((r.i_exact - (2.0 + 2.0 * (-2.0 * r.t).exp()) / 4.0).abs() <= 1e-9);
    }
    let mut again = Vec::new();
    lindcert::report::write_curve_csv(&mut again, &rows).unwrap();
    assert_eq!(again, text);
}

#[test]
fn curve_needs_two_points() {
    let cfg = config("dephasing.toml");
    let o = run(&["--seed", "1", "curve", cfg.to_str().unwrap(), "--t-max", "3", "--points", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bell_dist_header_and_normalization() {
    let cfg = config("depolarizing.toml");
    let o = run(&["--seed", "1", "bell-dist", cfg.to_str().unwrap(), "--t", "0.7"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let dist = lindcert::report::read_bell_csv(s.as_bytes()).unwrap();
    assert_eq!(dist.len(), 4);
    let total: f64 = dist.iter().map(|(_, q)| q).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let expected_i = (1.0 + 3.0 * (-0.7f64).exp()) / 4.0;
    assert!((dist[0].1 - expected_i).abs() < 1e-12);
}

#[test]
fn strong_dephasing_rejects_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = config("dephasing.toml");
    let o = run(&[
        "--seed", "11", "detect", cfg.to_str().unwrap(), "--epsilon", "0.5", "--delta", "0.1",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("verdict: REJECT"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["verdict"], "REJECT");
    assert_eq!(json["params"]["seed"], 11);
    assert!(json["rounds"][0].get("pauli_frames").is_none());
}

#[test]
fn exit_code_agrees_with_report_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let cfg = config("two_qubit.toml");
    for seed in ["1", "2"] {
        let o = run(&[
            "--seed", seed, "detect", cfg.to_str().unwrap(), "--epsilon", "0.5", "--delta", "0.1",
            "--m", "8", "--rounds", "5", "--frames", "--out", out.to_str().unwrap(),
        ]);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let expected = if json["verdict"] == "ACCEPT" { 0 } else { 2 };
        assert_eq!(o.status.code(), Some(expected));
        assert_eq!(json["m"], 8);
        assert_eq!(json["rounds"][0]["pauli_frames"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn detection_is_reproducible_from_seed_and_thread_count() {
    let cfg = config("two_qubit.toml");
    let args = ["--seed", "99", "detect", cfg.to_str().unwrap(), "--epsilon", "0.5", "--delta", "0.1", "--m", "16", "--rounds", "64"];
    let a = bin().args(args).env("LINDCERT_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("LINDCERT_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn missing_seed_is_drawn_and_printed() {
    let o = run(&["params", "--epsilon", "0.5", "--delta", "0.1", "--k", "1", "--degree", "1", "--l-bound", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    let seed = err.lines().find_map(|l| l.strip_prefix("seed: ")).expect("seed printed");
    seed.parse::<u64>().unwrap();
}

#[test]
fn errors_exit_1() {
    let o = run(&["--seed", "1", "detect", "/nonexistent.toml", "--epsilon", "0.5", "--delta", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let cfg = config("dephasing.toml");
    // epsilon and delta have no defaults.
    let o = run(&["--seed", "1", "detect", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["--seed", "1", "verify", "--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "n = 1\n[[jumps]]\nterms = [{ pauli = \"I\", re = 1.0 }]\n").unwrap();
    let o = run(&["--seed", "1", "spectrum", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("traceless"), "{err}");
}

#[test]
fn verify_suite_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = run(&["--seed", "7", "verify", "--suite", "all", "--trials", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let checks = json.as_array().unwrap();
    assert_eq!(checks.len(), lindcert::oracle::CHECK_NAMES.len());
    assert!(checks.iter().all(|c| c["passed"] == true));
}
