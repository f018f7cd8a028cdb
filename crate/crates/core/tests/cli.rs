use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_winter-nls"));
    c.env_remove("WINTER_NLS_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_config(text: &str) -> Value {
    let line = text.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    serde_json::from_str(line).unwrap()
}

#[test]
fn spectrum_reports_the_bound_state_with_version_and_config() {
    let o = run(&["spectrum", "--a", "1", "--alpha", "-4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["subcommand"], "spectrum");
    assert_eq!(v["config"]["alpha"], -4.0);
    assert_eq!(v["result"]["has_bound_state"], true);
    let e = v["result"]["E"].as_f64().unwrap();
    assert!((e + 3.842953293112).abs() < 1e-10);
}

#[test]
fn spectrum_without_bound_state() {
    let o = run(&["spectrum", "--alpha", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["has_bound_state"], false);
}

#[test]
fn unknown_flags_and_bad_values_exit_with_config_error() {
    assert_eq!(code(&run(&["spectrum", "--bogus", "1"])), 2);
    assert_eq!(code(&run(&["spectrum", "--a", "-1"])), 2);
    assert_eq!(code(&run(&["evolve", "--sigma", "0"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn invalid_thread_cap_is_a_config_error() {
    let o = bin().args(["spectrum"]).env("WINTER_NLS_THREADS", "zero").output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().args(["spectrum"]).env("WINTER_NLS_THREADS", "0").output().unwrap();
    assert_eq!(code(&o), 2);
    let o = bin().args(["spectrum"]).env("WINTER_NLS_THREADS", "1").output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn unwritable_output_is_a_failure_exit() {
    let o = run(&["spectrum", "--output", "/nonexistent-winter-dir/out.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn output_file_is_written_atomically_and_leaves_no_temporaries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let o = run(&["spectrum", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(serde_json::from_str::<Value>(&text).is_ok());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn csv_header_and_seventeen_significant_digits() {
    let o = run(&["evolve", "--eta", "-1", "--t-final", "0.01", "--dt", "1e-3", "--l", "10", "--dx", "0.02"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), format!("# winter-nls {}", env!("CARGO_PKG_VERSION")));
    assert_eq!(lines.next().unwrap(), "# subcommand: evolve");
    let cfg = csv_config(&text);
    assert_eq!(cfg["eta"], -1.0);
    assert_eq!(cfg["dx"], 0.02);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("t,"));
    let row = text.lines().filter(|l| !l.starts_with('#')).nth(1).unwrap();
    for field in row.split(',') {
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "{field}");
        assert!(field.parse::<f64>().is_ok());
    }
}

#[test]
fn key_value_config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "a = 2\nalpha=-0.75\nformat=json\n").unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["a"], 2.0);
    let h = v["result"]["h"].as_f64().unwrap();
    assert!((h - 0.21855436644967927).abs() < 1e-12);
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--alpha", "-2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["alpha"], -2.0);
    std::fs::write(&cfg, "a = 2\nnot_a_key = 1\n").unwrap();
    assert_eq!(code(&run(&["spectrum", "--config", cfg.to_str().unwrap()])), 2);
    std::fs::write(&cfg, "{ broken json").unwrap();
    assert_eq!(code(&run(&["spectrum", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["spectrum", "--config", dir.path().join("missing").to_str().unwrap()])), 2);
}

#[test]
fn output_reproduces_itself_when_fed_back_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = run(&["evolve", "--eta", "-1", "--t-final", "0.01", "--dt", "1e-3", "--l", "10", "--dx", "0.02", "--output", first.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let before = std::fs::read_to_string(&first).unwrap();
    let copy = dir.path().join("copy.csv");
    std::fs::copy(&first, &copy).unwrap();
    std::fs::remove_file(&first).unwrap();
    let o = run(&["evolve", "--config", copy.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&first).unwrap(), before);
    let o = run(&["spectrum", "--alpha", "-2"]);
    let j = dir.path().join("spec.json");
    std::fs::write(&j, stdout(&o)).unwrap();
    let again = run(&["spectrum", "--config", j.to_str().unwrap()]);
    assert_eq!(stdout(&again), stdout(&o));
}

#[test]
fn bifurcation_lists_the_two_reference_points() {
    let o = run(&["bifurcation", "--a", "1", "--alpha", "-4", "--n", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pts = v["result"]["bifurcations"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    let refs = [(-19.354, -6.825), (-81.740, -54.417)];
    for (p, (eta, om)) in pts.iter().zip(refs) {
        assert!((p["eta_n"].as_f64().unwrap() - eta).abs() < 0.02);
        assert!((p["Omega_n"].as_f64().unwrap() - om).abs() < 0.02);
    }
}

#[test]
fn figure1_csv_has_all_labels() {
    let o = run(&["figure1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "branch_label,eta,Omega");
    for label in ["Omega_0,", "Omega_1+,", "Omega_1-,", "Omega_2+,", "Omega_2-,", "bifurcation-1,", "bifurcation-2,"] {
        assert!(text.lines().any(|l| l.starts_with(label)), "{label}");
    }
}

#[test]
fn evolve_blowup_halt_exits_four() {
    let o = run(&[
        "evolve", "--eta", "-50", "--sigma", "3", "--t-final", "0.5", "--dt", "1e-4", "--format", "json",
    ]);
    assert_eq!(code(&o), 4);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["verdict"]["rule"], "Thm3-conditional");
    assert_eq!(v["result"]["verdict"]["numerical_blowup_detected"], true);
    assert!(v["result"]["verdict"]["T_max_estimate"].as_f64().unwrap() > 0.0);
}

#[test]
fn threshold_dispersive_check_needs_opt_in() {
    assert_eq!(code(&run(&["dispersive-check", "--a", "1", "--alpha", "-1"])), 2);
}

#[test]
fn stationary_csv_columns() {
    let o = run(&["stationary", "--regime", "defocusing", "--n-linear", "10", "--n-log", "10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "branch_label,regime,ell,p,lambda_prime,Omega,mu_sq,eta,slope,classification");
    assert!(text.lines().filter(|l| l.contains(",defocusing,2,")).count() > 5);
    assert!(Path::new(env!("CARGO_BIN_EXE_winter-nls")).exists());
}
