use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ermakov-qosc");

/// A quick stationary run: few states, no convergence studies.
const QUICK: &str = r#"
[scenario]
preset = "stationary"
t_end = 2.0

[grid]
N = 256

[checks]
n_max = 3
tdse_n_max = 2
conservation_states = 1
tdse_slope = false
splitstep_slope = false
splitstep_dt = 0.001
splitstep_t_end = 1.0

[output]
wavefunction_n = [0, 2]
"#;

fn run_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.current_dir(dir)
        .args(args)
        .env_remove("ERMAKOV_QOSC_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn small_grid_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[scenario]\npreset = \"stationary\"\n[grid]\nN = 8\n",
    );
    let out = run_in(tmp.path(), &["verify", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N ≥ 16 required"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[scenario]\npreset = \"stationary\"\n[grid]\nresolution = 3\n",
    );
    let out = run_in(tmp.path(), &["solve", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resolution"));
}

#[test]
fn dry_run_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let out = run_in(
        tmp.path(),
        &["verify", "--config", &cfg, "--out", "result", "--dry-run"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let printed = String::from_utf8(out.stdout).unwrap();
    assert!(printed.contains("preset = \"stationary\""));
    assert!(printed.contains("dir = \"result\""));
    assert_eq!(listing(tmp.path()), vec!["run.toml"]);
}

#[test]
fn solve_and_wavefunction_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let out = run_in(tmp.path(), &["solve", "--config", &cfg, "--out", "a"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let traj = fs::read_to_string(tmp.path().join("a/trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next(), Some("t,q1,q2,sigma,gamma,tau,xi"));
    assert_eq!(lines.next(), Some("0,1,0,1,0,0,0"));
    assert_eq!(traj.lines().count(), 2002);

    let out = run_in(
        tmp.path(),
        &["wavefunctions", "--config", &cfg, "--out", "b"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let names = listing(&tmp.path().join("b"));
    assert_eq!(names.len(), 10);
    assert!(names.contains(&"psi_n2_t1.4.csv".to_string()), "{names:?}");
    let psi = fs::read_to_string(tmp.path().join("b/psi_n0_t0.2.csv")).unwrap();
    assert_eq!(psi.lines().next(), Some("x,re_psi,im_psi"));
    assert_eq!(psi.lines().count(), 257);
}

#[test]
fn verify_exit_status_follows_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let ok = run_in(
        tmp.path(),
        &["verify", "--config", &cfg, "--out", "good"],
        &[],
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let report = fs::read_to_string(tmp.path().join("good/report.csv")).unwrap();
    assert_eq!(
        report.lines().next(),
        Some("name,metric,tolerance,pass,context")
    );
    assert!(report.lines().skip(1).all(|l| l.contains(",true,")));
    assert!(fs::read_to_string(tmp.path().join("good/report.txt"))
        .unwrap()
        .contains("stationary: PASS"));

    let bad = run_in(
        tmp.path(),
        &[
            "verify",
            "--config",
            &cfg,
            "--out",
            "bad",
            "--inject-fault",
            "sigma-scale=1.01",
        ],
        &[],
    );
    assert_eq!(bad.status.code(), Some(1));
    let report = fs::read_to_string(tmp.path().join("bad/report.csv")).unwrap();
    for name in ["ermakov_residual", "eigen_residual", "tdse_residual"] {
        assert!(
            report
                .lines()
                .any(|l| l.starts_with(name) && l.contains(",false,")),
            "{name}"
        );
    }

    let garbled = run_in(
        tmp.path(),
        &[
            "verify",
            "--config",
            &cfg,
            "--inject-fault",
            "sigma-scale=x",
        ],
        &[],
    );
    assert_eq!(garbled.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    for (dir, threads) in [("r1", "1"), ("r2", "1"), ("r3", "3")] {
        let out = run_in(
            tmp.path(),
            &["verify", "--config", &cfg, "--out", dir],
            &[("ERMAKOV_QOSC_THREADS", threads)],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let names = listing(&tmp.path().join("r1"));
    assert_eq!(names, listing(&tmp.path().join("r2")));
    assert_eq!(names, listing(&tmp.path().join("r3")));
    for name in &names {
        let a = fs::read(tmp.path().join("r1").join(name)).unwrap();
        assert_eq!(
            a,
            fs::read(tmp.path().join("r2").join(name)).unwrap(),
            "{name}"
        );
        assert_eq!(
            a,
            fs::read(tmp.path().join("r3").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn bad_thread_count_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["solve", "--out", "x"],
        &[("ERMAKOV_QOSC_THREADS", "zero")],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ERMAKOV_QOSC_THREADS"));
}
