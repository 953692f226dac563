use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netkin")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn snapshot_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn coupling_coefficient_is_printed() {
    let out = netkin(&["coupling-coeff", "--coupling", "maxwell"]);
    assert_eq!(stdout(&out).trim(), "6.66666667e-1");
    let out = netkin(&["coupling-coeff", "--coupling", "full_moment-unbounded", "--a", "1"]);
    assert_eq!(stdout(&out).trim(), "2.65961520e-1");
}

#[test]
fn extrapolation_table() {
    let out = netkin(&["extrapolation", "--method", "maxwell"]);
    assert_eq!(stdout(&out), "method,a,lambda\nmaxwell,5.77350269e-1,6.66666667e-1\n");
}

#[test]
fn simulate_writes_requested_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = netkin(&[
        "simulate",
        "--scenario",
        "tripod",
        "--cells",
        "20",
        "--t-end",
        "0.5",
        "--snapshots",
        "0,0.25",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    stdout(&out);
    assert_eq!(
        snapshot_files(&out_dir),
        ["entropy.csv", "snapshot_000_t0.000000.csv", "snapshot_001_t0.250000.csv", "snapshot_002_t0.500000.csv"]
    );
    let last = fs::read_to_string(out_dir.join("snapshot_002_t0.500000.csv")).unwrap();
    assert_eq!(last.lines().count(), 61);
}

#[test]
fn kinetic_run_dumps_distribution_and_halfmoment_run_writes_hat_moments() {
    let dir = tempfile::tempdir().unwrap();
    let kin = dir.path().join("kinetic");
    let args = ["--scenario", "tripod", "--cells", "10", "--vcells", "8", "--t-end", "0.1"];
    let mut cmd = vec!["simulate", "--model", "kinetic", "--kinetic-dump", "--out", kin.to_str().unwrap()];
    cmd.extend(args);
    stdout(&netkin(&cmd));
    let dump = fs::read_to_string(kin.join("kinetic_000_t0.100000.csv")).unwrap();
    assert!(dump.starts_with("edge,x,v,f\n"));
    assert_eq!(dump.lines().count(), 1 + 3 * 10 * 8);

    let half = dir.path().join("half");
    let mut cmd = vec!["simulate", "--model", "half_moment", "--out", half.to_str().unwrap()];
    cmd.extend(args);
    stdout(&netkin(&cmd));
    let snap = fs::read_to_string(half.join("snapshot_000_t0.100000.csv")).unwrap();
    assert!(snap.starts_with("edge,x,rho,q,rho_hat,q_hat\n"));
}

#[test]
fn sweep_writes_one_row_per_epsilon() {
    let out = netkin(&[
        "sweep-epsilon",
        "--scenario",
        "tripod",
        "--model",
        "half_moment",
        "--cells",
        "20",
        "--t-end",
        "0.5",
        "--epsilons",
        "0.1,0.01",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,distance,density_distance");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1.00000000e-1,"));
}

#[test]
fn errors_are_reported_with_nonzero_exit() {
    let out = netkin(&["simulate", "--scenario", "no_such_scenario"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));

    let out = netkin(&["coupling-coeff", "--coupling", "kinetic"]);
    assert!(!out.status.success());

    let out = netkin(&["simulate", "--scenario", "tripod", "--t-end", "0.1", "--snapshots", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("snapshot time"));
}
