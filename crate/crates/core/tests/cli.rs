use std::path::Path;
use std::process::{Command, Output};

fn agelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CONVERGE: &str = r#"
experiment = "baker-converge"
seed = 11
[baker]
steps = 6
[walsh]
inline = ["F={-3,-1} 1 0", "F={0,2} 0.5 0.5", "F={-2} 0 1"]
"#;

const THEOREM: &str = r#"
experiment = "theorem"
seed = 5
[grid]
nu_max = 16.0
n_nu = 1024
[state]
source = "gaussian"
[schedule]
start = 0.0
step = 1.0
count = 11
"#;

#[test]
fn baker_converge_writes_table_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CONVERGE);
    let out = dir.path().join("run");
    let o = agelab(&[
        "baker",
        "converge",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let table = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert!(table.starts_with("n,minus_norm,plus_norm\n"));
    assert_eq!(table.lines().count(), 8);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "pass");
    assert_eq!(summary["seed"], 11);
}

#[test]
fn theorem_is_deterministic_and_certified() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", THEOREM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = agelab(&["theorem", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["sweep.csv", "checks.csv", "sweep_summary.json"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("sweep_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["certified"], true);
    assert_eq!(summary["seed"], 5);
    assert_eq!(summary["threshold"], 1e-8);
    let header = std::fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert!(header.starts_with("t,plus_mass,minus_mass,hardy_residual\n"));
}

#[test]
fn failing_check_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // A certification threshold this strict cannot be met at t = 3.
    let text = THEOREM.replace("count = 11", "count = 4") + "[thresholds]\ncertification = 1e-30\n";
    let cfg = write(dir.path(), "t.toml", &text);
    let out = dir.path().join("run");
    let o = agelab(&["theorem", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &THEOREM.replace("n_nu = 1024", "n_nu = 1000"));
    let o = agelab(&["theorem", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid.n_nu"));

    let o = agelab(&[
        "baker",
        "verify",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write(dir.path(), "kind.toml", THEOREM);
    let o = agelab(&[
        "packets",
        "evolve",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment"));
}

#[test]
fn window_overflow_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = THEOREM.replace("start = 0.0\nstep = 1.0\ncount = 11", "t = [0.0, 150.0]");
    let cfg = write(dir.path(), "t.toml", &text);
    let o = agelab(&["theorem", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("window overflow"));
}

#[test]
fn report_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", CONVERGE);
    for run in ["r1", "r2"] {
        let out = dir.path().join("runs").join(run);
        assert!(agelab(&[
            "baker",
            "converge",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--quiet"
        ])
        .status
        .success());
    }
    let runs = dir.path().join("runs");
    let o = agelab(&["report", "--out", runs.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(runs.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment_count"], 2);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["experiments"][0]["id"], "baker-converge");
    assert_eq!(report["experiments"][1]["id"], "baker-converge#1");

    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let o = agelab(&["report", "--out", empty.to_str().unwrap()]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(empty.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment_count"], 0);
}

#[test]
fn seed_and_out_are_required_somewhere() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &CONVERGE.replace("seed = 11", ""));
    let o = agelab(&[
        "baker",
        "converge",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
    let o = agelab(&[
        "baker",
        "converge",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
}
