//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run alone with `cargo test --test acceptance`.

use std::path::Path;
use std::process::Command;

use toric_calabi::cli::verification_checks;
use toric_calabi::invariants::{boundary_terms, BoundaryProfile};
use toric_calabi::quadrature::limit_at_infinity;
use toric_calabi::verify::{run_verification, NEGATIVE_CONTROL, NEGATIVE_CONTROL_POINT};
use toric_calabi::{
    arc_integral, build_polytope, compute_invariants, cyclic_closed_form, cyclic_resolution,
    decay_profile, edge_limits, line_integrand_t, one_sided_limit, pontryagin_from_line_t,
    scalar_curvature_detuned, validate_parameter, ArcForm, DecayQuantity, LimitSide, PolytopeData,
    Side, TaubNutParameter,
};

const TOL: f64 = 1e-11;

struct Member {
    name: String,
    p: PolytopeData,
    nu: TaubNutParameter,
}

/// Admissible parameters `(1, β)` for the cyclic polygon with `d` edges.
/// The first has `α = −β`.
fn cyclic_parameters(d: usize) -> [[f64; 2]; 3] {
    [
        [1.0, -1.0],
        [1.0, -2.0],
        [1.0, -1.0 + 0.5 / (d as f64 - 1.0)],
    ]
}

fn non_cyclic() -> PolytopeData {
    build_polytope(&[[0, 1], [1, 0], [3, -1]], &[1.0, 2.0]).unwrap()
}

/// Cyclic `d = 2..=5` with `ν = 0` and one `ν ≠ 0`, plus the non-cyclic
/// polygon with `ν = 0` and two `ν ≠ 0`.
fn fleet() -> Vec<Member> {
    let mut out = Vec::new();
    for d in 2..=5 {
        let p = cyclic_resolution(d, 1.0).unwrap();
        for nu in [[0.0, 0.0], cyclic_parameters(d)[2]] {
            out.push(Member {
                name: format!("cyclic d={d} nu=({}, {})", nu[0], nu[1]),
                nu: validate_parameter(&p, nu).unwrap(),
                p: p.clone(),
            });
        }
    }
    let p = non_cyclic();
    for nu in [[0.0, 0.0], [1.0, -1.0], [1.0, -0.5]] {
        out.push(Member {
            name: format!("non-cyclic nu=({}, {})", nu[0], nu[1]),
            nu: validate_parameter(&p, nu).unwrap(),
            p: p.clone(),
        });
    }
    out
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1.0)
}

/// `Ok` carries a summary of the worst observed error, `Err` what failed.
type Outcome = Result<String, String>;

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Outcome {
    let mut worst_e: f64 = 0.0;
    let mut worst_c1: f64 = 0.0;
    for d in 2..=6 {
        let p = cyclic_resolution(d, 1.0).map_err(|e| e.to_string())?;
        let nu = validate_parameter(&p, [0.0, 0.0]).map_err(|e| e.to_string())?;
        let r = compute_invariants(&p, &nu, TOL).map_err(|e| e.to_string())?;
        let m = (d - 1) as f64;
        let expected = 8.0 * m - 8.0 / m;
        let err = if d == 2 {
            r.calabi_energy.abs()
        } else {
            (r.calabi_energy - expected).abs() / expected
        };
        if d == 2 && err > 1e-10 || d > 2 && err > 1e-8 || r.c1_squared.abs() > 1e-10 {
            return Err(format!(
                "d={d}: calabi {} vs {expected}, c1² {}",
                r.calabi_energy, r.c1_squared
            ));
        }
        worst_e = worst_e.max(err);
        worst_c1 = worst_c1.max(r.c1_squared.abs());
    }
    Ok(format!(
        "energy rel err {worst_e:.1e}, |c1²| {worst_c1:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        let p = cyclic_resolution(d, 1.0).map_err(|e| e.to_string())?;
        for (k, nu) in cyclic_parameters(d).into_iter().enumerate() {
            let par = validate_parameter(&p, nu).map_err(|e| e.to_string())?;
            let r = compute_invariants(&p, &par, TOL).map_err(|e| e.to_string())?;
            let c = cyclic_closed_form(d, nu).map_err(|e| e.to_string())?;
            // Relative to max(|exact|, 1): c₁² vanishes exactly when α = −β.
            let errs = [
                rel(r.c1_squared, c.c1_squared),
                rel(r.pontryagin, c.pontryagin),
                rel(r.calabi_energy, c.calabi_energy),
            ];
            let e = errs.iter().fold(0.0_f64, |m, x| m.max(*x));
            if e > 1e-8 {
                return Err(format!("d={d} nu={nu:?}: {r:?} vs {c:?}"));
            }
            if k == 0 {
                let target = 8.0 * (d - 1) as f64;
                if rel(r.calabi_energy, target) > 1e-8 {
                    return Err(format!(
                        "d={d} alpha=-beta: calabi {} vs {target}",
                        r.calabi_energy
                    ));
                }
            }
            worst = worst.max(e);
        }
    }
    Ok(format!("12 metrics, worst rel err {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut worst_arc: f64 = 0.0;
    let mut worst_line: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for normals in [[[0, 1], [1, 0]], [[0, 1], [3, -2]], [[2, 1], [1, -1]]] {
        let p = build_polytope(&normals, &[0.0]).map_err(|e| e.to_string())?;
        let nu = validate_parameter(&p, [0.0, 0.0]).map_err(|e| e.to_string())?;
        for radius in [10.0, 100.0] {
            let t = arc_integral(&p, &nu, radius, ArcForm::T, 1e-13).map_err(|e| e.to_string())?;
            worst_arc = worst_arc.max(t.abs());
        }
        for k in 0..100 {
            let h = -20.0 + 40.0 * (k as f64 + 0.5) / 100.0;
            let t = line_integrand_t(&p, &nu, h).map_err(|e| e.to_string())?;
            worst_line = worst_line.max(t.abs());
        }
        let r = compute_invariants(&p, &nu, TOL).map_err(|e| e.to_string())?;
        worst_p = worst_p.max(r.pontryagin.abs());
    }
    check(
        worst_arc <= 1e-10 && worst_line <= 1e-12 && worst_p <= 1e-10,
        format!("|arc T| {worst_arc:.1e}, |line T| {worst_line:.1e}, |p| {worst_p:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    let p = non_cyclic();
    let nu = validate_parameter(&p, [1.0, -1.0]).map_err(|e| e.to_string())?;
    let assembled = compute_invariants(&p, &nu, TOL).map_err(|e| e.to_string())?;
    let direct = pontryagin_from_line_t(&p, &nu, TOL).map_err(|e| e.to_string())?;
    let err = (assembled.pontryagin - direct.pontryagin).abs() / assembled.pontryagin.abs();
    check(
        err <= 1e-6,
        format!(
            "p = {:.12} vs {:.12}, rel err {err:.1e}",
            assembled.pontryagin, direct.pontryagin
        ),
    )
}

/// Runs the pointwise checks once; criteria 5 and 6 read different fields.
fn verification_runs() -> Result<Vec<(String, toric_calabi::verify::VerificationReport)>, String> {
    let members = fleet();
    let per_member = 1000usize.div_ceil(members.len()).max(50);
    members
        .into_iter()
        .map(|m| {
            run_verification(&m.p, &m.nu, per_member)
                .map(|v| (m.name, v))
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn criterion_5(runs: &[(String, toric_calabi::verify::VerificationReport)]) -> Outcome {
    let mut total = 0;
    let mut worst = [0.0_f64; 5];
    for (name, v) in runs {
        let ok = v.min_v > 0.0
            && v.max_det_hess_residual <= 1e-10
            && v.max_cauchy_riemann_residual <= 1e-12
            && v.max_laplace_residual <= 1e-10
            && v.max_trace_rmr_squared_residual <= 1e-10
            && v.max_trace_mh_rmr_residual <= 1e-10;
        if !ok {
            return Err(format!("{name}: {v:?}"));
        }
        total += v.interior_samples;
        for (w, x) in worst.iter_mut().zip([
            v.max_det_hess_residual,
            v.max_cauchy_riemann_residual,
            v.max_laplace_residual,
            v.max_trace_rmr_squared_residual,
            v.max_trace_mh_rmr_residual,
        ]) {
            *w = w.max(x);
        }
    }
    check(
        total >= 1000,
        format!(
            "{total} points; det {:.1e}, CR {:.1e}, laplace {:.1e}, traces {:.1e}/{:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn criterion_6(runs: &[(String, toric_calabi::verify::VerificationReport)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut weakest_control = f64::INFINITY;
    for (name, v) in runs {
        if v.interior_samples < 50 || v.max_abs_scalar_curvature > 1e-8 {
            return Err(format!("{name}: |s| = {:e}", v.max_abs_scalar_curvature));
        }
        worst = worst.max(v.max_abs_scalar_curvature);
        weakest_control = weakest_control.min(v.detuned_scalar_curvature.abs());
        if !verification_checks(v)["negative_control"] {
            return Err(format!(
                "{name}: control s = {:e}",
                v.detuned_scalar_curvature
            ));
        }
    }
    let p = cyclic_resolution(3, 1.0).map_err(|e| e.to_string())?;
    let nu = validate_parameter(&p, [0.0, 0.0]).map_err(|e| e.to_string())?;
    let s = scalar_curvature_detuned(&p, &nu, NEGATIVE_CONTROL_POINT, NEGATIVE_CONTROL)
        .map_err(|e| e.to_string())?;
    check(
        s.abs() > 1e-3 && weakest_control > 1e-3,
        format!("max |s| {worst:.1e}, weakest control |s| {weakest_control:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let radii = [25.0, 50.0, 100.0, 200.0, 400.0];
    let mut worst_exp = f64::NEG_INFINITY;
    let mut worst_scaled: f64 = 0.0;
    for m in fleet().into_iter().filter(|m| !m.nu.is_ale()) {
        let fit = decay_profile(&m.p, &m.nu, DecayQuantity::C1ArcIntegrandSup, &radii)
            .map_err(|e| e.to_string())?;
        let exp = fit
            .fitted_exponent
            .ok_or_else(|| format!("{}: c1 form vanishes on arcs", m.name))?;
        if exp > -1.9 {
            return Err(format!("{}: exponent {exp}", m.name));
        }
        worst_exp = worst_exp.max(exp);
        // O(1/R): R·|∫c₁| stays bounded by its value at the smallest radius.
        let scaled: Vec<f64> = radii
            .iter()
            .map(|&r| arc_integral(&m.p, &m.nu, r, ArcForm::C1, 1e-13).map(|v| r * v.abs()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let bound = 2.0 * scaled[0] + 1e-9;
        if scaled.iter().any(|&s| s > bound) {
            return Err(format!("{}: R|arc c1| = {scaled:?}", m.name));
        }
        worst_scaled = worst_scaled.max(scaled.iter().fold(0.0_f64, |a, b| a.max(*b)));
    }
    Ok(format!(
        "largest exponent {worst_exp:.3}, max R|arc c1| {worst_scaled:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in fleet() {
        let profile = BoundaryProfile::new(&m.p, &m.nu);
        let f = |h: f64| profile.vh_over_v2(h);
        let limits = edge_limits(&m.p, &m.nu);
        for l in &limits {
            let numeric = match (l.h, l.side) {
                (Some(h), LimitSide::Left) => one_sided_limit(f, h, Side::Left),
                (Some(h), LimitSide::Right) => one_sided_limit(f, h, Side::Right),
                (None, LimitSide::Right) => limit_at_infinity(f, Side::Left),
                (None, LimitSide::Left) => limit_at_infinity(f, Side::Right),
            }
            .map_err(|e| format!("{} {}: {e}", m.name, l.label))?;
            let err = (numeric - l.value).abs();
            if err > 1e-6 {
                return Err(format!("{} {}: {} vs {numeric}", m.name, l.label, l.value));
            }
            worst = worst.max(err);
        }
        if m.name.starts_with("cyclic") {
            let exact = limits
                .iter()
                .filter(|l| l.h.is_some())
                .all(|l| match l.side {
                    LimitSide::Left => l.value == 2.0,
                    LimitSide::Right => l.value == -2.0,
                });
            if !exact {
                return Err(format!("{}: {limits:?}", m.name));
            }
        }
        let terms = boundary_terms(&limits);
        if terms.len() != m.p.edges() {
            return Err(format!("{}: {} boundary terms", m.name, terms.len()));
        }
    }
    Ok(format!("worst |closed form - extrapolation| {worst:.1e}"))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_toric-calabi"))
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), format!("{args:?} exited with {status}")).map(|_| ())
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("input.json");
    std::fs::write(
        &input,
        r#"{"normals": [[0, 1], [1, 0], [3, -1]], "a": [1.0, 2.0], "nu": [1.0, -1.0]}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let file = |name: &str| dir.path().join(format!("{name}{run}"));
        let (report, csv, arcs, verify) =
            (file("report"), file("csv"), file("arcs"), file("verify"));
        let input = input.to_str().unwrap();
        run_cli(&[
            "profile",
            "--input",
            input,
            "--out",
            report.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
            "--arc-csv",
            arcs.to_str().unwrap(),
        ])?;
        run_cli(&[
            "verify",
            "--cyclic",
            "4",
            "--nu",
            "1,-2",
            "--out",
            verify.to_str().unwrap(),
        ])?;
        outputs.push([read(&report)?, read(&csv)?, read(&arcs)?, read(&verify)?]);
    }
    let same = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(Vec::len).sum();
    check(
        same,
        format!("2 runs x 4 files, {bytes} bytes each, identical: {same}"),
    )
}

fn main() {
    let runs = verification_runs();
    let results: Vec<(&str, Outcome)> = vec![
        ("cyclic ALE family", criterion_1()),
        ("cyclic Taub-NUT family", criterion_2()),
        ("two-edge ALE vanishing", criterion_3()),
        ("non-cyclic pipeline cross-check", criterion_4()),
        (
            "pointwise identities",
            runs.as_ref()
                .map_err(Clone::clone)
                .and_then(|r| criterion_5(r)),
        ),
        (
            "scalar-flatness",
            runs.as_ref()
                .map_err(Clone::clone)
                .and_then(|r| criterion_6(r)),
        ),
        ("decay rates", criterion_7()),
        ("edge limits", criterion_8()),
        ("determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(msg) => println!("PASS criterion {} ({name}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
