use std::process::{Command, Output};

use toric_calabi::cli::{RunReport, EXIT_QUADRATURE, EXIT_UNWRITABLE, EXIT_VALIDATION};
use toric_calabi::{compute_invariants, cyclic_resolution, validate_parameter};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-calabi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn compute_cyclic_three() {
    let o = run(&["compute", "--cyclic", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.command, "compute");
    assert!((report.report.calabi_energy - 12.0).abs() < 1e-8);
    assert_eq!(report.edge_limits, report.report.edge_limits);
}

#[test]
fn json_round_trips_bit_for_bit() {
    let o = run(&["compute", "--cyclic", "4", "--nu", "1,-2", "--tol", "1e-11"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    let p = cyclic_resolution(4, 1.0).unwrap();
    let nu = validate_parameter(&p, [1.0, -2.0]).unwrap();
    let direct = compute_invariants(&p, &nu, 1e-11).unwrap();
    assert_eq!(report.report, direct);
    assert_eq!(report.parameter, nu);
}

#[test]
fn input_file_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let out = dir.path().join("out.json");
    std::fs::write(
        &input,
        r#"{"normals": [[0, 1], [1, 0], [3, -1]], "a": [1, 2], "nu": [1, -1]}"#,
    )
    .unwrap();
    let o = run(&[
        "compute",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let report: RunReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((report.report.pontryagin - 18.0).abs() < 1e-9);
    assert!((report.report.calabi_energy - 17.5).abs() < 1e-9);
}

#[test]
fn nu_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    std::fs::write(
        &input,
        r#"{"normals": [[0, 1], [1, 0]], "a": [0], "nu": [1, -1]}"#,
    )
    .unwrap();
    let o = run(&["compute", "--input", input.to_str().unwrap(), "--nu", "0,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report.parameter.is_ale());
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(
        &input,
        r#"{"normals": [[0, 1], [1, 0], [0, -1]], "a": [0, 1]}"#,
    )
    .unwrap();
    let o = run(&["compute", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
    assert!(
        stderr(&o).starts_with("error: ParallelUnboundedEdges"),
        "{}",
        stderr(&o)
    );

    std::fs::write(&input, r#"{"normals": [[0, 1], [0, 1]], "a": [0]}"#).unwrap();
    let o = run(&["compute", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
    assert!(
        stderr(&o).starts_with("error: ParallelUnboundedEdges"),
        "{}",
        stderr(&o)
    );

    let o = run(&["compute", "--cyclic", "3", "--nu", "1,1"]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
    assert!(
        stderr(&o).starts_with("error: NotAdmissible"),
        "{}",
        stderr(&o)
    );

    let o = run(&["compute", "--cyclic", "3", "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));

    let o = run(&["compute"]);
    assert_eq!(o.status.code(), Some(EXIT_VALIDATION));
}

#[test]
fn quadrature_failure_exits_3() {
    let o = run(&[
        "compute", "--cyclic", "3", "--nu", "1,-2", "--tol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_QUADRATURE));
    assert!(
        stderr(&o).starts_with("error: QuadratureFailure"),
        "{}",
        stderr(&o)
    );
    assert!(o.stdout.is_empty());
}

#[test]
fn unwritable_path_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/report.json");
    let o = run(&[
        "compute",
        "--cyclic",
        "2",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_UNWRITABLE));
    assert!(
        stderr(&o).starts_with("error: UnwritablePath"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn verify_passes_all_checks() {
    let o = run(&["verify", "--cyclic", "3", "--nu", "1,-2", "--samples", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    let v = report.verification.unwrap();
    assert!(v.passed, "{:?}", v.checks);
    assert_eq!(v.residuals.interior_samples, 20);
}

#[test]
fn profile_csv_for_ale_cyclic_has_zero_c1_density() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let arcs = dir.path().join("arcs.csv");
    let o = run(&[
        "profile",
        "--cyclic",
        "3",
        "--csv",
        csv.to_str().unwrap(),
        "--arc-csv",
        arcs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("H,G_over_V2,VH_over_V2,T_line\n"));
    let g = csv_column(&text, "G_over_V2");
    assert!(g.len() > 300);
    assert!(g.iter().all(|x| x.abs() < 1e-13));
    let arcs = std::fs::read_to_string(&arcs).unwrap();
    assert_eq!(
        csv_column(&arcs, "R"),
        vec![25.0, 50.0, 100.0, 200.0, 400.0]
    );
    assert!(csv_column(&arcs, "arc_c1").iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn profile_csv_for_two_edges_has_zero_line_t() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let o = run(&[
        "profile",
        "--cyclic",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--samples",
        "101",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = csv_column(&std::fs::read_to_string(&csv).unwrap(), "T_line");
    assert!(t.len() >= 100);
    assert!(t.iter().all(|x| x.abs() < 1e-12));
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "profile", "--cyclic", "4", "--nu", "1,-1.5", "--radii", "30,60",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("compute"));
}
