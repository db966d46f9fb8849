use std::path::PathBuf;
use std::process::{Command, Output};

fn releq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_releq"))
        .args(args)
        .output()
        .expect("run releq")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("releq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn validate_builtin() {
    let o = releq(&["--builtin", "spherical_pendulum m=1 l=1 g=1", "validate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("validation: ok"));
}

#[test]
fn velocities_of_motivating_example() {
    let o = releq(&["--builtin", "motivating_s1", "velocities"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("root xi = (2.000000)") && out.contains("root xi = (4.000000)"));
}

#[test]
fn verify_exit_codes() {
    let ok = releq(&[
        "--builtin",
        "motivating_s1",
        "verify",
        "--point",
        "0.1,0,0.1,0",
        "--velocity",
        "2",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = releq(&[
        "--builtin",
        "motivating_s1",
        "verify",
        "--point",
        "0.1,0,0.1,0",
        "--velocity",
        "3",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAILED"));
}

#[test]
fn analyze_json_parses_back() {
    let out = std::env::temp_dir().join(format!("releq-analyze-{}.json", std::process::id()));
    let o = releq(&[
        "--builtin",
        "motivating_s1",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "analyze",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let report = releq_core::report::AnalysisReport::from_json(&text).unwrap();
    assert!(report.passed());
    assert_eq!(report.roots.len(), 2);
    assert_eq!(report.roots[0].branches.len(), 1);
}

#[test]
fn branches_table_with_overrides() {
    let o = releq(&[
        "--builtin",
        "spherical_pendulum",
        "--set",
        "phi=0.2",
        "--tol-branch",
        "1e-10",
        "--seed",
        "3",
        "branches",
        "--root",
        "1",
        "--r-max",
        "0.04",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with("0 0 ")).collect();
    assert_eq!(rows.len(), 4);
}

#[test]
fn counts_for_one_root() {
    let o = releq(&["--builtin", "coupled_oscillators", "counts", "--root", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lower bound 1"));
}

#[test]
fn non_antisymmetric_omega_is_rejected() {
    let cfg = scratch(
        "bad_omega.toml",
        r#"
[space]
dim = 2
omega = [[0.0, 1.0], [1.0, 0.0]]
[group]
dim = 1
rank = 1
abelian = true
generators = [[[0.0, 1.0], [-1.0, 0.0]]]
torus = [0]
[hamiltonian]
expression = "(+ (^ v1 2) (^ v2 2))"
"#,
    );
    let o = releq(&["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega_antisymmetry"), "{}", stderr(&o));
}

#[test]
fn parse_error_has_position() {
    let cfg = scratch(
        "broken.toml",
        "[space]\ndim = 2\nomega = [[0.0, 1.0], oops]\n",
    );
    let o = releq(&["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_builtin() {
    let o = releq(&["--builtin", "double_pendulum", "validate"]);
    assert_eq!(o.status.code(), Some(2));
}
