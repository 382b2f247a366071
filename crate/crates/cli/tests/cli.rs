use std::path::Path;
use std::process::{Command, Output};

use fockbound_cli::report::{report_file, Report};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fockbound"));
    cmd.env_remove("FOCKBOUND_OUT");
    cmd
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn read_report(dir: &Path, command: &str) -> Report {
    let bytes = std::fs::read(dir.join(report_file(command))).unwrap();
    serde_json::from_slice(&bytes).unwrap()
}

fn values(csv: &str) -> Vec<(usize, f64)> {
    csv.lines()
        .skip(1)
        .map(|line| {
            let (m, v) = line.split_once(',').unwrap();
            (m.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}

const SMALL: &str = "d = 3\nn_max = 2\nseed = 5\n";

#[test]
fn verify_small_config_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = run(&["verify", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ccr.canonical_commutator PASS"));
    assert!(stdout.lines().last().unwrap().contains("0 failed"));
    let report = read_report(&tmp.path().join("o"), "verify");
    assert!(report.passed);
    assert_eq!(report.config.seed, 5);
    assert!(tmp.path().join("o/verify-timing.json").exists());
}

#[test]
fn quiet_prints_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = run(
        &["verify", "--quiet", "--config", &cfg, "--out", "o"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn zero_tolerances_fail_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d = 3\nn_max = 3\nseed = 2\n[tolerances]\nidentity_rel_tol = 0.0\npsd_eig_tol = 0.0\nbound_slack = 0.0\n",
    );
    let out = run(&["verify", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains(" FAIL "));
    assert!(!read_report(&tmp.path().join("o"), "verify").passed);
}

#[test]
fn delta_plus_without_headroom_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d = 3\nn_max = 2\nseed = 1\n[[converge]]\nname = \"x\"\nfamily = \"delta-plus\"\nstate = { kind = \"random\", sectors = [1] }\n",
    );
    let out = run(&["converge", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn truncation_below_two_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "d = 3\nn_max = 1\nseed = 1\n");
    let out = run(&["verify", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_and_bad_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--config", "nope.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--config", "nope.toml", "--bogus"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let cfg = write_config(tmp.path(), "d = 3\nn_max = 2\nseed = 1\nextra = 4\n");
    let out = run(&["verify", "--config", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn converge_output_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d = 8\nn_max = 2\nseed = 9\n[[converge]]\nname = \"g\"\nfamily = \"dgamma\"\nprofile = { kind = \"random\" }\nstate = { kind = \"random\", sectors = [1, 2] }\n",
    );
    for dir in ["a", "b"] {
        let out = run(
            &["converge", "--quiet", "--config", &cfg, "--out", dir],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    for file in ["converge-g.csv", "converge-report.json"] {
        let a = std::fs::read(tmp.path().join("a").join(file)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let csv = std::fs::read_to_string(tmp.path().join("a/converge-g.csv")).unwrap();
    let rows = values(&csv);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0].0, 0);
    assert!(rows[8].1 <= 1e-12);
    let report = read_report(&tmp.path().join("a"), "converge");
    assert_eq!(report.convergence[0].curve.errors.len(), 9);
}

#[test]
fn seed_flag_changes_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d = 6\nn_max = 2\nseed = 1\n[[converge]]\nname = \"g\"\nfamily = \"delta\"\nprofile = { kind = \"random\" }\nstate = { kind = \"random\", sectors = [2] }\n",
    );
    run(
        &["converge", "--quiet", "--config", &cfg, "--out", "a"],
        tmp.path(),
    );
    run(
        &[
            "converge", "--quiet", "--config", &cfg, "--out", "b", "--seed", "2",
        ],
        tmp.path(),
    );
    let a = read_report(&tmp.path().join("a"), "converge");
    let b = read_report(&tmp.path().join("b"), "converge");
    assert_eq!(b.config.seed, 2);
    assert_ne!(a.convergence[0].curve.errors, b.convergence[0].curve.errors);
}

#[test]
fn diverge_matches_closed_forms() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"d = 2
n_max = 2
seed = 1

[[diverge]]
name = "a"
family = "a"
m_grid = [1, 2, 4, 8]

[[diverge]]
name = "c"
family = "c"
m_grid = [1, 2, 4, 8]

[[diverge]]
name = "b"
family = "b"
profile = { kind = "diagonal", exponent = 1.0 }
m_grid = [1, 2, 4, 8]
"#,
    );
    let out = run(
        &["diverge", "--quiet", "--config", &cfg, "--out", "o"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let read = |name: &str| {
        values(&std::fs::read_to_string(tmp.path().join(format!("o/diverge-{name}.csv"))).unwrap())
    };
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y;
    for (m, v) in read("a") {
        assert!(close(v, (2.0 * m as f64).sqrt()), "a at {m}: {v}");
    }
    for (m, v) in read("c") {
        assert!(close(v, 2.0 * m as f64), "c at {m}: {v}");
    }
    for (m, v) in read("b") {
        assert!(close(v, m as f64), "b at {m}: {v}");
    }
    let text = std::fs::read_to_string(tmp.path().join("o/diverge-a.csv")).unwrap();
    assert!(text.starts_with("M,value\n1,1.4142135623730951e0\n2,"));
}

#[test]
fn environment_sets_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = bin()
        .args(["verify", "--quiet", "--config", &cfg])
        .current_dir(tmp.path())
        .env("FOCKBOUND_OUT", tmp.path().join("from-env"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from-env/verify-report.json").exists());
    let out = bin()
        .args(["verify", "--quiet", "--config", &cfg, "--out", "flag"])
        .current_dir(tmp.path())
        .env("FOCKBOUND_OUT", tmp.path().join("ignored"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("flag/verify-report.json").exists());
    assert!(!tmp.path().join("ignored").exists());
}

#[test]
fn shipped_config_runs_every_command() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    let cfg = cfg.to_string_lossy();
    for command in ["converge", "diverge"] {
        let out = run(
            &[command, "--quiet", "--config", &cfg, "--out", "o"],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{command}");
        assert!(read_report(&tmp.path().join("o"), command).passed);
    }
    assert!(tmp.path().join("o/diverge-a-identity.csv").exists());
    assert!(tmp.path().join("o/converge-dgamma-inverse.csv").exists());
}
