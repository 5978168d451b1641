use std::io::Write;
use std::process::{Command, Output};

use asymtop::spectra::TopParams;
use asymtop::wavefunctions::psi_eval;
use asymtop::{ComplexQ, EulerAngles};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymtop")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Parsed CSV rows without the header.
fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn level_energies(o: &Output, j: u32) -> Vec<f64> {
    rows(o).iter().filter(|r| r[0] == j.to_string()).map(|r| r[3].parse().unwrap()).collect()
}

#[test]
fn levels_header_and_spin_one() {
    let o = run(&["levels", "--A", "3", "--B", "2", "--C", "1", "--jmax", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "j,s,class,E_wigner,E_lambda,E_lame,max_disagreement");
    assert_eq!(rows(&o).len(), 4);
    assert!(level_energies(&o, 0)[0].abs() < 1e-12);
    for r in rows(&o).iter().filter(|r| r[0] == "1") {
        for cell in &r[3..6] {
            let e: f64 = cell.parse().unwrap();
            assert!([3.0, 4.0, 5.0].iter().any(|w| (e - w).abs() < 1e-10), "{e}");
        }
    }
}

#[test]
fn levels_spin_two() {
    let o = run(&["levels", "--jmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = 2.0 * 3f64.sqrt();
    let want = [12.0 - r, 9.0, 12.0, 15.0, 12.0 + r];
    for (x, w) in level_energies(&o, 2).iter().zip(want) {
        assert!((x - w).abs() < 1e-10, "{x} vs {w}");
    }
    let cells = stdout(&o);
    let first_float = cells.lines().nth(1).unwrap().split(',').nth(3).unwrap();
    assert_eq!(first_float.split('e').next().unwrap().len(), 18);
}

#[test]
fn degenerate_top_leaves_lame_empty() {
    let o = run(&["levels", "--A", "2", "--B", "2", "--C", "1", "--jmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    for r in rows(&o) {
        assert_eq!(r[2], "");
        assert_eq!(r[5], "");
        assert!(!r[3].is_empty() && !r[4].is_empty());
    }
}

#[test]
fn invalid_parameters_exit_3() {
    assert_eq!(run(&["levels", "--A", "1", "--B", "2", "--C", "0.5"]).status.code(), Some(3));
    assert_eq!(run(&["levels", "--routes", "nope"]).status.code(), Some(3));
    assert_eq!(run(&["verify", "--tol-casimir", "-1"]).status.code(), Some(3));
    assert_eq!(run(&["levels", "--jmax", "x"]).status.code(), Some(3));
}

#[test]
fn disagreement_exit_2() {
    let o = run(&["levels", "--jmax", "3", "--tol-route-agreement", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn route_subset_fills_selected_columns() {
    let o = run(&["levels", "--jmax", "1", "--routes", "lame,wigner"]);
    assert_eq!(o.status.code(), Some(0));
    for r in rows(&o) {
        assert!(!r[3].is_empty() && r[4].is_empty() && !r[5].is_empty());
    }
}

#[test]
fn verify_default_passes() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let body = rows(&o);
    assert_eq!(body.len(), 11);
    assert!(body.iter().all(|r| r[1] == "PASS"));
}

#[test]
fn unreachable_tolerance_fails() {
    let o = run(&["verify", "--tol-all", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(rows(&o).iter().any(|r| r[1] == "FAIL"));
}

#[test]
fn verify_jmax_zero() {
    let o = run(&["verify", "--jmax", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_json() {
    let o = run(&["verify", "--jmax", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 11);
    assert!(v[0]["passed"].as_bool().unwrap());
}

#[test]
fn wave_grid_and_spin_zero() {
    let o = run(&["wave", "--j", "0", "--s", "0", "--q-re", "0.4", "--q-im", "0.3", "--grid-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let body = rows(&o);
    assert_eq!(body.len(), 27);
    for r in &body {
        let theta: f64 = r[1].parse().unwrap();
        assert!(theta > 0.0 && theta < std::f64::consts::PI);
        assert!((r[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-14);
        assert!(r[4].parse::<f64>().unwrap().abs() < 1e-14);
    }
}

#[test]
fn wave_matches_library() {
    let o = run(&["wave", "--j", "1", "--s", "1", "--q-re", "0.7", "--q-im", "-0.2", "--grid-n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = TopParams::new(3.0, 2.0, 1.0).unwrap();
    for row in v.as_array().unwrap() {
        let f = |k: &str| row[k].as_f64().unwrap();
        let g = EulerAngles::new(f("phi"), f("theta"), f("psi"));
        let want = psi_eval(ComplexQ::new(0.7, -0.2), 1, 1, &p, &g).unwrap();
        assert!((want.re - f("re")).abs() < 1e-12 && (want.im - f("im")).abs() < 1e-12);
    }
}

#[test]
fn wave_rejects_bad_input() {
    assert_eq!(run(&["wave", "--j", "1", "--s", "-2", "--q-re", "0.1"]).status.code(), Some(3));
    assert_eq!(run(&["wave", "--j", "1", "--s", "0", "--q-re", "0.1", "--grid-n", "1"]).status.code(), Some(3));
}

#[test]
fn kernel_identity_check() {
    let o = run(&["kernel", "--j", "3", "--q-re", "0.3", "--q-im", "0.2", "--qp-re", "1.1", "--qp-im", "-0.4", "--phi", "0.5", "--theta", "1.0", "--psi", "2.0", "--check-identity", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = |k: &str| (v[k]["re"].as_f64().unwrap(), v[k]["im"].as_f64().unwrap());
    let (a, b) = (c("kernel_identity"), c("delta_j"));
    assert!((a.0 - b.0).abs() < 1e-12 * b.0.abs().max(1.0) && (a.1 - b.1).abs() < 1e-12 * b.0.abs().max(1.0));
    assert!(v["identity_defect"].as_f64().unwrap() < 1e-12);
    assert!(v["conj_symmetry_defect"].as_f64().unwrap() < 1e-12);
}

#[test]
fn kernel_spin_zero_is_one() {
    let o = run(&["kernel", "--j", "0", "--q-re", "0.3", "--qp-re", "2.0", "--qp-im", "0.5", "--theta", "0.8"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.starts_with("kernel,")).unwrap().to_string();
    let cells: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert!((cells[0] - 1.0).abs() < 1e-15 && cells[1].abs() < 1e-15);
    assert!(stdout(&o).contains("conj_symmetry_defect"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["levels", "--jmax", "6"],
        vec!["verify", "--seed", "7", "--jmax", "3"],
        vec!["wave", "--j", "2", "--s", "-1", "--q-re", "0.2", "--grid-n", "5"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn config_file_and_flag_override() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# top\nA = 5\nB=2\nC=1\njmax=1\nformat=json\ntol-route-agreement=1e-9").unwrap();
    let path = f.path().to_str().unwrap();
    let o = run(&["levels", "--config", path]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let es: Vec<f64> = v.as_array().unwrap().iter().filter(|r| r["j"] == 1).map(|r| r["E_wigner"].as_f64().unwrap()).collect();
    for (x, w) in es.iter().zip([3.0, 6.0, 7.0]) {
        assert!((x - w).abs() < 1e-10);
    }
    let o = run(&["levels", "--config", path, "--A", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(level_energies(&o, 1).iter().map(|x| x.round() as i64).collect::<Vec<_>>(), [3, 4, 5]);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "colour=blue").unwrap();
    assert_eq!(run(&["levels", "--config", bad.path().to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(run(&["levels", "--config", "/nonexistent/file"]).status.code(), Some(3));
}
