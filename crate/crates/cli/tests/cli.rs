use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_conewedge"));
    cmd.args(args).env_remove("CONEWEDGE_THREADS");
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd.output().expect("binary runs")
}

fn summary(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

fn csv_rows(dir: &Path, name: &str) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join(format!("{name}.csv"))).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn greens_free_space_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["greens", "--beta", "1", "--point", "2,0,0"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path(), "greens");
    let v = s["results"]["value"].as_f64().unwrap();
    assert!((v - 0.0795775).abs() < 1e-7);
    assert_eq!(s["provenance"]["field"]["method"], "reflection");
    assert!(s["provenance"]["git_describe"].is_string());
    // the summary also goes to stdout
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, s);
}

#[test]
fn energy_check_at_half() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["energy", "--beta", "0.5", "--method", "reflection", "--check"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path(), "energy");
    assert!((s["results"]["target"].as_f64().unwrap() - 59.2176).abs() < 1e-4);
    assert!(s["results"]["flux"]["rel_err"].as_f64().unwrap() <= 1e-3);
    assert_eq!(s["passed"], true);
}

#[test]
fn decay_table_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["decay", "--beta", "0.7", "--rho-min", "50", "--rho-max", "2000"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(dir.path(), "decay");
    assert_eq!(rows.len(), 10);
    assert_eq!(&rows[0][0], "50.0");
    assert_eq!(&rows[9][0], "2000.0");
    let slope = summary(dir.path(), "decay")["results"]["metric_fit"]["slope"].as_f64().unwrap();
    assert!(slope <= -2.0 / 0.7 + 0.25, "{slope}");
}

#[test]
fn csv_bodies_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["chart", "forward", "--beta", "0.5", "--samples", "30", "--seed", "7"];
    run(&args, Some(a.path()));
    let o = Command::new(env!("CARGO_BIN_EXE_conewedge"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("CONEWEDGE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let read = |d: &Path| fs::read(d.join("chart-forward.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(summary(b.path(), "chart-forward")["provenance"]["threads"], 2);
    // a different seed gives a different grid
    let c = tempfile::tempdir().unwrap();
    run(&["chart", "forward", "--beta", "0.5", "--samples", "30", "--seed", "8"], Some(c.path()));
    assert_ne!(read(a.path()), read(c.path()));
}

#[test]
fn tolerance_breach_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["models", "eh", "--potential", "unweighted", "--samples", "5", "--check"];
    let o = run(&args, Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(summary(dir.path(), "models-eh")["passed"], false);
    // without --check the same run succeeds
    let o = run(&args[..6], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        &["greens", "--beta", "1.5"][..],
        &["greens", "--bogus"],
        &["energy", "--beta", "0.7", "--method", "reflection"],
        &["greens", "--point", "1,2"],
        &["models", "quotient", "--beta", "0.7"],
        &["greens", "--tol", "-1"],
        &[],
    ] {
        let o = run(args, None);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    let o = run(&["greens", "--out", "/definitely/not/here"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
}

#[test]
fn stdout_carries_csv_without_out() {
    let o = run(&["bogomolony", "--beta", "0.25", "--samples", "4"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,theta,s,residual"));
    assert_eq!(lines.count(), 4);
    let s: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(s["results"]["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn subcommands_pass_their_checks() {
    let dir = tempfile::tempdir().unwrap();
    for (args, name) in [
        (&["identities", "--beta", "0.333333333333333333", "--samples", "10"][..], "identities"),
        (&["metric", "--beta", "0.5", "--samples", "10"], "metric"),
        (&["chart", "invert", "--beta", "0.5", "--z", "0.3,0.2", "--w", "0.5,-0.4"], "chart-invert"),
        (&["chart", "volcheck", "--beta", "0.5", "--samples", "10"], "chart-volcheck"),
        (&["chart", "conecoef", "--beta", "0.5"], "chart-conecoef"),
        (&["curvature", "--beta", "1", "--samples", "10"], "curvature"),
        (&["curvature", "--beta", "0.25", "--samples", "10"], "curvature"),
        (&["modes", "--beta", "0.5", "--k", "1,2"], "modes"),
        (&["models", "taubnut", "--tn-c", "0.3", "--samples", "5"], "models-taubnut"),
        (&["models", "quotient", "--beta", "0.5", "--samples", "5"], "models-quotient"),
        (&["greens", "--beta", "0.6", "--method", "flat", "--samples", "5"], "greens"),
    ] {
        let mut a = args.to_vec();
        a.push("--check");
        let o = run(&a, Some(dir.path()));
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(summary(dir.path(), name)["passed"], true, "{args:?}");
    }
}
