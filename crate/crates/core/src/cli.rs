//! Command-line front end.
//!
//! Every verb reads one polygon (a JSON file or the `--cyclic D` family),
//! runs its task and writes a single JSON document to `--out` or stdout.
//! Failures are reported on stderr as `error: <Name>: ...` and classified by
//! exit code only.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::invariants::{
    compute_invariants, line_integrand_t, BoundaryProfile, CurvatureReport, EdgeLimit,
};
use crate::polytope::{
    build_polytope, cyclic_resolution, validate_parameter, Normal, PolytopeData, TaubNutParameter,
};
use crate::verify::{
    arc_table_row, decay_profile, run_verification, DecayFit, DecayQuantity, VerificationReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_QUADRATURE: i32 = 3;
pub const EXIT_UNWRITABLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "toric-calabi",
    version,
    about = "Curvature integrals of scalar-flat toric Kähler metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute ∫c₁², ∫p, ∫c₂ and ∫|R|².
    Compute(Common),
    /// Check the pointwise identities and scalar-flatness on sample points.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Number of quasi-random interior points.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Write boundary profiles and arc-decay tables.
    Profile {
        #[command(flatten)]
        common: Common,
        /// CSV of H, G/V², V_H/V² and the line density of T.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// CSV of half-circle integrals of c₁ and T.
        #[arg(long)]
        arc_csv: Option<PathBuf>,
        /// Number of rows in the boundary profile.
        #[arg(long, default_value_t = 401)]
        samples: usize,
        /// Radii for the arc table and decay fits.
        #[arg(long, value_delimiter = ',', default_values_t = [25.0, 50.0, 100.0, 200.0, 400.0])]
        radii: Vec<f64>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with keys "normals", "a" and "nu".
    #[arg(long, conflicts_with = "cyclic", required_unless_present = "cyclic")]
    pub input: Option<PathBuf>,
    /// Minimal resolution of C²/Z_{D−1} with unit spacing.
    #[arg(long)]
    pub cyclic: Option<usize>,
    /// Taub-NUT parameter `A,B`; overrides "nu" from the input file.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub nu: Option<[f64; 2]>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected A,B, got {s:?}"));
    }
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([parse(parts[0])?, parse(parts[1])?])
}

/// Input document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDoc {
    pub normals: Vec<Normal>,
    pub a: Vec<f64>,
    #[serde(default)]
    pub nu: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// Pass/fail summary of the verification thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSection {
    pub residuals: VerificationReport,
    pub checks: std::collections::BTreeMap<String, bool>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSection {
    pub decay: Vec<NamedFit>,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub quantity: DecayQuantity,
    pub fit: DecayFit,
}

/// The document every verb writes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: ToolInfo,
    pub command: String,
    pub input: InputDoc,
    pub parameter: TaubNutParameter,
    pub tol: f64,
    pub report: CurvatureReport,
    pub edge_limits: Vec<EdgeLimit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSection>,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Unwritable(PathBuf, std::io::Error),
    BadInput(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(
                Error::QuadratureFailure { .. }
                | Error::NonFiniteSample { .. }
                | Error::NoConvergence(_),
            ) => EXIT_QUADRATURE,
            CliError::Core(_) | CliError::BadInput(_) => EXIT_VALIDATION,
            CliError::Unwritable(..) => EXIT_UNWRITABLE,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Unwritable(p, e) => format!("UnwritablePath: {}: {e}", p.display()),
            CliError::BadInput(m) => format!("InvalidInput: {m}"),
        }
    }
}

/// Parses `args` (including the program name), runs the verb and returns
/// the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<(InputDoc, PolytopeData, TaubNutParameter), CliError> {
    let mut doc = match (&common.input, common.cyclic) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<InputDoc>(&text)
                .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?
        }
        (None, Some(d)) => {
            let p = cyclic_resolution(d, 1.0)?;
            InputDoc {
                normals: p.normals().to_vec(),
                a: p.a().to_vec(),
                nu: [0.0, 0.0],
            }
        }
        (None, None) => {
            return Err(CliError::BadInput(
                "one of --input or --cyclic is required".into(),
            ))
        }
    };
    if let Some(nu) = common.nu {
        doc.nu = nu;
    }
    if !(common.tol > 0.0 && common.tol.is_finite()) {
        return Err(CliError::BadInput(format!(
            "--tol {} must be positive",
            common.tol
        )));
    }
    let p = build_polytope(&doc.normals, &doc.a)?;
    let nu = validate_parameter(&p, doc.nu)?;
    Ok((doc, p, nu))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Unwritable(path.to_path_buf(), e))
}

fn emit(out: &Option<PathBuf>, report: &RunReport) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Fixed thresholds the `verify` verb reports against.
pub fn verification_checks(v: &VerificationReport) -> std::collections::BTreeMap<String, bool> {
    let mut c = std::collections::BTreeMap::new();
    c.insert("v_positive".into(), v.min_v > 0.0);
    c.insert("scalar_flat".into(), v.max_abs_scalar_curvature <= 1e-8);
    c.insert("det_hess_times_r2".into(), v.max_det_hess_residual <= 1e-10);
    c.insert("hess_symmetric".into(), v.max_hess_asymmetry <= 1e-12);
    c.insert(
        "hess_factorization".into(),
        v.max_hess_factorization_residual <= 1e-12,
    );
    c.insert(
        "cauchy_riemann".into(),
        v.max_cauchy_riemann_residual <= 1e-12,
    );
    c.insert("xi_harmonic".into(), v.max_laplace_residual <= 1e-10);
    c.insert(
        "trace_rmr_squared".into(),
        v.max_trace_rmr_squared_residual <= 1e-10,
    );
    c.insert("trace_mh_rmr".into(), v.max_trace_mh_rmr_residual <= 1e-10);
    c.insert(
        "negative_control".into(),
        v.detuned_scalar_curvature.abs() > 1e-3,
    );
    c.insert("polygon_edges".into(), v.max_edge_residual <= 1e-10);
    c
}

/// Number formatting used in every CSV: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Boundary profile rows on a midpoint grid spanning 5 units beyond the
/// outermost singular points. Rows closer than `1e-9` to a singular point
/// are dropped.
pub fn profile_csv(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    samples: usize,
) -> Result<(String, usize), Error> {
    let prof = BoundaryProfile::new(p, nu);
    let b = p.breakpoints();
    let lo = b[0] - 5.0;
    let hi = b[b.len() - 1] + 5.0;
    let mut out = String::from("H,G_over_V2,VH_over_V2,T_line\n");
    let mut rows = 0;
    for j in 0..samples {
        let h = lo + (j as f64 + 0.5) * (hi - lo) / samples as f64;
        if b.iter().any(|x| (h - x).abs() < 1e-9) {
            continue;
        }
        let t = line_integrand_t(p, nu, h)?;
        writeln!(
            out,
            "{},{},{},{}",
            fmt_float(h),
            fmt_float(prof.c1_density(h)),
            fmt_float(prof.vh_over_v2(h)),
            fmt_float(t)
        )
        .expect("write to string");
        rows += 1;
    }
    Ok((out, rows))
}

pub fn arc_csv(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    radii: &[f64],
    tol: f64,
) -> Result<String, Error> {
    let mut out = String::from("R,arc_c1,arc_T\n");
    for &r in radii {
        let (c1, t) = arc_table_row(p, nu, r, tol)?;
        writeln!(out, "{},{},{}", fmt_float(r), fmt_float(c1), fmt_float(t))
            .expect("write to string");
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (common, name) = match &cli.command {
        Command::Compute(c) => (c, "compute"),
        Command::Verify { common, .. } => (common, "verify"),
        Command::Profile { common, .. } => (common, "profile"),
    };
    let (doc, p, nu) = load(common)?;
    let report = compute_invariants(&p, &nu, common.tol)?;
    let mut run = RunReport {
        tool: ToolInfo::default(),
        command: name.into(),
        input: doc,
        parameter: nu,
        tol: common.tol,
        edge_limits: report.edge_limits.clone(),
        report,
        verification: None,
        profile: None,
    };
    match &cli.command {
        Command::Compute(_) => {}
        Command::Verify { samples, .. } => {
            let residuals = run_verification(&p, &nu, *samples)?;
            let checks = verification_checks(&residuals);
            let passed = checks.values().all(|&ok| ok);
            run.verification = Some(VerificationSection {
                residuals,
                checks,
                passed,
            });
        }
        Command::Profile {
            csv,
            arc_csv: arc_path,
            samples,
            radii,
            ..
        } => {
            let (text, rows) = profile_csv(&p, &nu, *samples)?;
            if let Some(path) = csv {
                write_file(path, &text)?;
            }
            if let Some(path) = arc_path {
                write_file(path, &arc_csv(&p, &nu, radii, common.tol)?)?;
            }
            let mut decay = Vec::new();
            for quantity in [
                DecayQuantity::C1ArcIntegrandSup,
                DecayQuantity::TArcIntegrandSup,
                DecayQuantity::VHOverV2,
            ] {
                decay.push(NamedFit {
                    quantity,
                    fit: decay_profile(&p, &nu, quantity, radii)?,
                });
            }
            run.profile = Some(ProfileSection { decay, rows });
        }
    }
    emit(&common.out, &run)
}
