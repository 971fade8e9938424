use std::fs;
use std::process::{Command, Output};

fn cuprite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuprite")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn report_prints_reference_comparisons() {
    let out = cuprite(&["report"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("reference 2 GHz"));
    assert!(text.contains("reference 0.007"));
    assert_eq!(text.matches("g2(0) = ").count(), 4);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "# six micron crystal\ngeometry.side = 6\nmodel.variant = eq7\n").unwrap();
    let sites = |extra: &[&str]| {
        let mut args = vec!["props", "--config", config.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = cuprite(&args);
        assert_eq!(out.status.code(), Some(0));
        let text = stdout(&out);
        text.lines().nth(1).unwrap().split(',').nth(11).unwrap().to_string()
    };
    assert_eq!(sites(&[]), "27");
    assert_eq!(sites(&["--set", "geometry.side=4"]), "8");
    assert_eq!(sites(&["--set", "level.n=25"]), "8");
}

#[test]
fn config_errors_exit_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "\nlevel.n = 0\n").unwrap();
    let out = cuprite(&["steady", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("n ≥ 1"), "{err}");
    assert_eq!(cuprite(&["steady", "--set", "drive.bogus=1"]).status.code(), Some(1));
    assert_eq!(cuprite(&["steady", "--config", "/nonexistent/x.conf"]).status.code(), Some(1));
    assert_eq!(cuprite(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let out = cuprite(&["g2", "--method", "numeric", "--set", "drive.rabi=0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_optimization_exits_three() {
    let out = cuprite(&["optimize", "--set", "sweep.side_min=0.5", "--set", "sweep.side_max=1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("side"));
}

#[test]
fn sweep_writes_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = cuprite(&["sweep", "--set", "sweep.values=1,2,3", "-o", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("sweep_value,N,omega_collective_GHz,ratio,rho_ee,rate_GHz,P_rr,g2_zero,error"));
}

#[test]
fn json_outputs() {
    let out = cuprite(&["report", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"inputs\"") && text.contains("\"derived\"") && text.contains("\"sensitivity\""));
    let out = cuprite(&["blockade", "--format", "json"]);
    assert!(stdout(&out).contains("\"pair_terms\""));
}

#[test]
fn emitter_commands_run() {
    let out = cuprite(&["g2", "--points", "11"]);
    assert_eq!(stdout(&out).lines().count(), 12);
    let out = cuprite(&["spectrum"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stderr).unwrap().matches("peak at").count(), 3);
    let out = cuprite(&["steady", "--set", "drive.detuning=5"]);
    assert_eq!(out.status.code(), Some(0));
}
