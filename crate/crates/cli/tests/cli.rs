use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rank2-toda"))
}

fn run(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut c = bin();
    c.args(args).arg("--out").arg(dir.join("out"));
    if let Some(text) = config {
        let p = dir.join("run.cfg");
        fs::write(&p, text).unwrap();
        c.arg("--config").arg(p);
    }
    c.output().unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reps_dumps_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["reps"], Some("p = 3\n"), d.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for j in [1, 2] {
        let name = format!("out/reps/p3_j{j}.txt");
        let x = fs::read(a.path().join(&name)).unwrap();
        assert_eq!(x, fs::read(b.path().join(&name)).unwrap());
    }
    let dump = fs::read_to_string(a.path().join("out/reps/p3_j2.txt")).unwrap();
    assert!(dump.starts_with("# G2 fundamental representation j=2 dim=14"));
    assert!(dump.contains("/1"), "entries are written as num/den");
    let m = json(a.path().join("out/manifest.json"));
    assert_eq!(m["details"]["dims"], serde_json::json!([7, 14]));
}

#[test]
fn identities_csv_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = "p = 2\nseeds = 5\n";
    for d in [&a, &b] {
        let o = run(&["identities", "--seed", "9"], Some(cfg), d.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let x = fs::read_to_string(a.path().join("out/identities.csv")).unwrap();
    assert_eq!(x, fs::read_to_string(b.path().join("out/identities.csv")).unwrap());
    assert!(x.starts_with("p,seed,sample_seed,family,check,residual,zero\n"));
    assert!(!x.contains(",false\n"));
}

#[test]
fn solve_verify_a2_defaults() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["solve-verify"], None, d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = json(d.path().join("out/residual.json"));
    assert_eq!(r["case"], "A2_10");
    for e in r["equations"].as_array().unwrap() {
        if e["role"] == "certified" {
            assert!(e["residuals"][2].as_f64().unwrap() < 1e-6, "{e}");
        }
    }
    let csv = fs::read_to_string(d.path().join("out/field.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 65 * 65);
    let m = json(d.path().join("out/manifest.json"));
    assert_eq!(m["config"]["command"], "solve-verify");
    assert_eq!(m["config"]["tol"], 1e-12);
}

#[test]
fn zero_coefficients_sit_at_the_floor() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        &["solve-verify"],
        Some("p = 2\ngrading = 0,1\ncoefficients = zero\n"),
        d.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let r = json(d.path().join("out/residual.json"));
    for e in r["equations"].as_array().unwrap() {
        assert_eq!(e["order"]["kind"], "saturated");
        assert!(e["residuals"][2].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn g2_10_gauge_closes() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "p = 3\ngrading = 1,0\namplitude = 0.25\nseed = 2\n";
    let o = run(&["solve-verify", "--grid", "17"], Some(cfg), d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let summary = fs::read_to_string(d.path().join("out/residual.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().ends_with(",true"), "{summary}");
}

#[test]
fn unverifiable_run_exits_one() {
    let d = tempfile::tempdir().unwrap();
    // one level gives no order and the threshold cannot be met
    let o = run(
        &["solve-verify", "--stencil", "2"],
        Some("levels = 1\nthreshold = 1e-30\n"),
        d.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(d.path().join("out/manifest.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["reps"], Some("colour = red\n"), d.path()).status.code(), Some(2));
    assert_eq!(run(&["reps"], Some("p = 4\n"), d.path()).status.code(), Some(2));
    assert_eq!(
        run(&["solve-verify", "--stencil", "3"], None, d.path()).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"], None, d.path()).status.code(), Some(2));
    let o = run(&["solve-verify"], Some("p = 1\nzero = d^2\n"), d.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn report_confirms_calibration() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["report"], Some("calibration_seeds = 1, 2, 3\n"), d.path());
    assert_eq!(o.status.code(), Some(0));
    let c = json(d.path().join("out/calibration.json"));
    let f = c["findings"].as_array().unwrap();
    assert_eq!(f[0]["closing"], serde_json::json!(["X = c1cb1"]));
    assert_eq!(f[1]["closing"], serde_json::json!(["(T111,T112,T122,T222)"]));
    assert!(fs::read_to_string(d.path().join("out/report.txt"))
        .unwrap()
        .contains("stable true"));
}
