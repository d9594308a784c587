use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatcone")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_octagon() {
    let o = run(&["validate", fixture("octagon.fsf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("genus 2"));
    assert!(out.contains("cone 0 angle 6pi"));
}

#[test]
fn validate_rejects_unglued_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fsf");
    std::fs::write(&path, "polygon 0\nv 0 0\nv 1 0\nv 1 1\nv 0 1\nglue 0.0 0.2 translation\n").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn torus_entropy_csv_has_gauss_circle_count() {
    let o = run(&["entropy", fixture("torus.fsf").to_str().unwrap(), "--rmax", "20", "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("R,N,logN\n"));
    assert!(out.lines().any(|l| l.starts_with("1,5,")));
    assert!(out.lines().any(|l| l.starts_with("2,13,")));
    assert!(out.lines().last().unwrap().starts_with("20,1257,"));
}

#[test]
fn budget_limited_entropy_is_partial() {
    let o = run(&["entropy", fixture("octagon.fsf").to_str().unwrap(), "--rmax", "40", "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cylinders_and_packing() {
    let o = run(&["cylinders", fixture("torus.fsf").to_str().unwrap(), "--max-circ", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "0,1,1,1,true"));
    let o = run(&["packing", fixture("octagon.fsf").to_str().unwrap(), "--tol", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let rho: f64 = stdout(&o).lines().next().unwrap().strip_prefix("rho ").unwrap().parse().unwrap();
    assert!((0.55..0.65).contains(&rho));
}

#[test]
fn packing_without_cone_points_fails() {
    let o = run(&["packing", fixture("torus.fsf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn slit_cover_writes_surface_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cover.fsf");
    let o = run(&[
        "cover",
        "slit",
        fixture("octagon.fsf").to_str().unwrap(),
        "--seg",
        "-0.05,0,0.05,0",
        "--sheets",
        "3",
        "--tol",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    assert!(report.contains("lambda 5"));
    assert!(report.contains("l_b 0.1"));
    assert!(!report.contains("FAIL"));
    let v = run(&["validate", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("area 3"));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let base = fixture("one_cylinder.fsf");
    let args =
        ["sweep", base.to_str().unwrap(), "--lambdas", "1,2", "--rmax", "1", "--out", out.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,l0,rho,delta_lo,delta_hi,e_hat,two_curve_bound,hdim_lo,hdim_hi,exhaustive")
    );
    assert!(lines.next().unwrap().starts_with("1,0.577350269,"));
    assert!(lines.next().unwrap().starts_with("2,0.288675135,"));
    // byte-stable across runs
    run(&args);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), csv);
}

#[test]
fn bad_arguments_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["entropy", fixture("torus.fsf").to_str().unwrap()]).status.code(), Some(64));
    let o = run(&["entropy", fixture("torus.fsf").to_str().unwrap(), "--rmax", "0", "--grid", "0.5"]);
    assert_eq!(o.status.code(), Some(64));
    assert_eq!(run(&["sweep", fixture("one_cylinder.fsf").to_str().unwrap(), "--lambdas", "0.5", "--rmax", "1", "--out", "/dev/null"]).status.code(), Some(64));
}
