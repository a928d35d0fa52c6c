//! Independent checks of the metric data.
//!
//! The scalar curvature is computed from scratch: the metric in
//! `(H, r, θ₁, θ₂)` is `V(dH² + dr²) + (Hess u)⁻¹` on the torus directions,
//! its first and second partial derivatives come from nested dual numbers,
//! and the Ricci scalar is contracted from Christoffel symbols. Nothing in
//! that path uses a Kähler identity, so it tests the field formulas end to
//! end.

use serde::{Deserialize, Serialize};

use crate::dual::{hyper_parts, hyper_seed, HyperDual};
use crate::error::{Error, Result};
use crate::fields::{Detuning, FieldModel, FieldPoint};
use crate::invariants::{c1_form, t_form, ArcForm, BoundaryProfile};
use crate::linalg::*;
use crate::polytope::{PolytopeData, TaubNutParameter};
use crate::quadrature::integrate_interval;

type M4 = [[f64; 4]; 4];

/// Metric components and their derivatives in `H` (index 0) and `r`
/// (index 1); the torus directions carry no dependence.
struct MetricJet {
    g: M4,
    dg: [M4; 2],
    ddg: [[M4; 2]; 2],
}

fn metric_block(model: &FieldModel, h: HyperDual, r: HyperDual) -> [[HyperDual; 4]; 4] {
    let (v, w) = model.torus_block(h, r);
    let zero = hyper_seed(0.0, 0.0, 0.0);
    let mut g = [[zero; 4]; 4];
    g[0][0] = v;
    g[1][1] = v;
    for i in 0..2 {
        for j in 0..2 {
            g[2 + i][2 + j] = w[i][j];
        }
    }
    g
}

fn metric_jet(model: &FieldModel, pt: FieldPoint) -> MetricJet {
    let along_h = metric_block(
        model,
        hyper_seed(pt.h, 1.0, 1.0),
        hyper_seed(pt.r, 0.0, 0.0),
    );
    let along_r = metric_block(
        model,
        hyper_seed(pt.h, 0.0, 0.0),
        hyper_seed(pt.r, 1.0, 1.0),
    );
    let mixed = metric_block(
        model,
        hyper_seed(pt.h, 1.0, 0.0),
        hyper_seed(pt.r, 0.0, 1.0),
    );
    let mut jet = MetricJet {
        g: [[0.0; 4]; 4],
        dg: [[[0.0; 4]; 4]; 2],
        ddg: [[[[0.0; 4]; 4]; 2]; 2],
    };
    for i in 0..4 {
        for j in 0..4 {
            let (v, gh, _, ghh) = hyper_parts(along_h[i][j]);
            let (_, gr, _, grr) = hyper_parts(along_r[i][j]);
            let (_, _, _, ghr) = hyper_parts(mixed[i][j]);
            jet.g[i][j] = v;
            jet.dg[0][i][j] = gh;
            jet.dg[1][i][j] = gr;
            jet.ddg[0][0][i][j] = ghh;
            jet.ddg[1][1][i][j] = grr;
            jet.ddg[0][1][i][j] = ghr;
            jet.ddg[1][0][i][j] = ghr;
        }
    }
    jet
}

fn block_inverse(g: &M4) -> M4 {
    let mut inv = [[0.0; 4]; 4];
    inv[0][0] = 1.0 / g[0][0];
    inv[1][1] = 1.0 / g[1][1];
    let w = inverse([[g[2][2], g[2][3]], [g[3][2], g[3][3]]]);
    for i in 0..2 {
        for j in 0..2 {
            inv[2 + i][2 + j] = w[i][j];
        }
    }
    inv
}

/// Ricci scalar of the metric at `pt`.
pub fn scalar_curvature(p: &PolytopeData, nu: &TaubNutParameter, pt: FieldPoint) -> Result<f64> {
    scalar_curvature_model(&FieldModel::new(p, nu), pt)
}

/// As [`scalar_curvature`] with deliberately altered fields.
pub fn scalar_curvature_detuned(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    pt: FieldPoint,
    detuning: Detuning,
) -> Result<f64> {
    scalar_curvature_model(&FieldModel::new(p, nu).with_detuning(detuning), pt)
}

pub(crate) fn scalar_curvature_model(model: &FieldModel, pt: FieldPoint) -> Result<f64> {
    if !(pt.r > 0.0) {
        return Err(Error::InvalidInput("scalar curvature needs r > 0".into()));
    }
    model.check_point(pt)?;
    let v = model.kernel(pt.h, pt.r).v();
    if !(v > 0.0) {
        return Err(Error::NonPositiveV {
            h: pt.h,
            r: pt.r,
            v,
        });
    }
    let jet = metric_jet(model, pt);
    let ginv = block_inverse(&jet.g);
    let zero = [[0.0; 4]; 4];
    let dg = |m: usize| if m < 2 { &jet.dg[m] } else { &zero };
    let ddg = |m: usize, n: usize| -> &M4 {
        if m < 2 && n < 2 {
            &jet.ddg[m][n]
        } else {
            &zero
        }
    };

    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let mut dginv = [[[0.0; 4]; 4]; 2];
    for (m, out) in dginv.iter_mut().enumerate() {
        for k in 0..4 {
            for l in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        s -= ginv[k][a] * dg(m)[a][b] * ginv[b][l];
                    }
                }
                out[k][l] = s;
            }
        }
    }

    // Γ^k_ij and ∂_m Γ^k_ij for m ∈ {H, r}.
    let mut gamma = [[[0.0; 4]; 4]; 4];
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 2];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                let mut ds = [0.0; 2];
                for l in 0..4 {
                    let lower = dg(i)[j][l] + dg(j)[i][l] - dg(l)[i][j];
                    s += ginv[k][l] * lower;
                    for m in 0..2 {
                        let dlower = ddg(m, i)[j][l] + ddg(m, j)[i][l] - ddg(m, l)[i][j];
                        ds[m] += dginv[m][k][l] * lower + ginv[k][l] * dlower;
                    }
                }
                gamma[k][i][j] = 0.5 * s;
                for m in 0..2 {
                    dgamma[m][k][i][j] = 0.5 * ds[m];
                }
            }
        }
    }
    let d_gamma = |m: usize, k: usize, i: usize, j: usize| {
        if m < 2 {
            dgamma[m][k][i][j]
        } else {
            0.0
        }
    };

    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if ginv[i][j] == 0.0 {
                continue;
            }
            let mut ricci = 0.0;
            for k in 0..4 {
                ricci += d_gamma(k, k, i, j) - d_gamma(j, k, i, k);
                for l in 0..4 {
                    ricci += gamma[k][k][l] * gamma[l][i][j] - gamma[k][j][l] * gamma[l][i][k];
                }
            }
            s += ginv[i][j] * ricci;
        }
    }
    Ok(s)
}

/// Quantities whose decay in `R` can be measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayQuantity {
    /// Largest norm of the coefficients of `c₁` on the half circle.
    C1ArcIntegrandSup,
    /// Largest norm of the coefficients of `T` on the half circle.
    TArcIntegrandSup,
    /// `V_H/V²` at `(R, 0)`.
    VHOverV2,
}

/// Values of a quantity at increasing radii and the least-squares slope of
/// `log|value|` against `log R`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `None` when some value is at or below [`DECAY_FLOOR`].
    pub fitted_exponent: Option<f64>,
}

/// Values this small are treated as exact zeros and not fitted.
pub const DECAY_FLOOR: f64 = 1e-12;

/// Number of arc samples behind each supremum.
pub const ARC_SAMPLES: usize = 256;

pub fn decay_profile(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    which: DecayQuantity,
    radii: &[f64],
) -> Result<DecayFit> {
    let model = FieldModel::new(p, nu);
    let reach = p.a().iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "radii must be strictly increasing".into(),
        ));
    }
    if radii[0] <= reach + 1.0 {
        return Err(Error::InvalidInput(format!(
            "radii must exceed max|a_i| + 1 = {}",
            reach + 1.0
        )));
    }
    let profile = BoundaryProfile::from_model(&model);
    let mut values = Vec::with_capacity(radii.len());
    for &radius in radii {
        let value = match which {
            DecayQuantity::VHOverV2 => profile.vh_over_v2(radius),
            DecayQuantity::C1ArcIntegrandSup | DecayQuantity::TArcIntegrandSup => {
                let mut sup: f64 = 0.0;
                for j in 0..ARC_SAMPLES {
                    let phi = (j as f64 + 0.5) * std::f64::consts::PI / ARC_SAMPLES as f64;
                    let (s, c) = phi.sin_cos();
                    let pt = FieldPoint {
                        h: radius * c,
                        r: radius * s,
                    };
                    let w = if which == DecayQuantity::C1ArcIntegrandSup {
                        c1_form(&model, pt)?
                    } else {
                        t_form(&model, pt)?
                    };
                    sup = sup.max(w[0].hypot(w[1]));
                }
                sup
            }
        };
        if !value.is_finite() {
            return Err(Error::NonFiniteSample { at: radius, value });
        }
        values.push(value);
    }
    let fitted_exponent = if values.iter().all(|v| v.abs() > DECAY_FLOOR) && radii.len() >= 2 {
        Some(log_log_slope(radii, &values))
    } else {
        None
    };
    Ok(DecayFit {
        radii: radii.to_vec(),
        values,
        fitted_exponent,
    })
}

/// Least-squares slope of `log|y|` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// A bounded edge of the moment polygon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedEdge {
    /// One-based index `k` of the normal `ν_k` of this edge.
    pub normal_index: usize,
    /// `∫ f^⊥ dH` over the interval where `f = ν_k`.
    pub vector: [f64; 2],
    /// `(a_k − a_{k−1}) ν_k^⊥`.
    pub closed_form: [f64; 2],
}

/// Bounded edges of the moment polygon, from the interval `(−a_2, −a_1)`
/// leftwards. Along `r = 0` the moment map moves with velocity `f^⊥`, and
/// `f` is the normal of the edge being traced.
pub fn reconstruct_polygon(
    p: &PolytopeData,
    nu: &TaubNutParameter,
) -> Result<Vec<ReconstructedEdge>> {
    let model = FieldModel::new(p, nu);
    let a = p.a();
    let mut out = Vec::new();
    for i in 1..a.len() {
        let (lo, hi) = (-a[i], -a[i - 1]);
        let mut vector = [0.0; 2];
        for (c, slot) in vector.iter_mut().enumerate() {
            let q = integrate_interval(|h| perp(model.kernel(h, 0.0).f)[c], lo, hi, 1e-13)?;
            *slot = q.value;
        }
        let normal = p.normal_f64(i);
        out.push(ReconstructedEdge {
            normal_index: i + 1,
            vector,
            closed_form: scale(a[i] - a[i - 1], perp(normal)),
        });
    }
    Ok(out)
}

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut x = 0.0;
    while index > 0 {
        f /= base as f64;
        x += f * (index % base) as f64;
        index /= base;
    }
    x
}

/// `n` quasi-random interior points in a box around the singular points:
/// `H` within 3 of the outermost `−a_i`, `r ∈ [0.05, 4]`.
pub fn interior_samples(p: &PolytopeData, n: usize) -> Vec<FieldPoint> {
    let b = p.breakpoints();
    let lo = b[0] - 3.0;
    let hi = b[b.len() - 1] + 3.0;
    (1..=n as u64)
        .map(|k| FieldPoint {
            h: lo + (hi - lo) * halton(k, 2),
            r: 0.05 + 3.95 * halton(k, 3),
        })
        .collect()
}

/// `n` abscissas on `r = 0` spread over the same range, none closer than
/// `1e-3` to a singular point.
pub fn boundary_samples(p: &PolytopeData, n: usize) -> Vec<f64> {
    let b = p.breakpoints();
    let lo = b[0] - 3.0;
    let hi = b[b.len() - 1] + 3.0;
    (1..=n as u64)
        .map(|k| lo + (hi - lo) * halton(k, 5))
        .filter(|h| b.iter().all(|x| (h - x).abs() > 1e-3))
        .collect()
}

/// Worst residuals of every pointwise identity over a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub interior_samples: usize,
    pub boundary_samples: usize,
    pub min_v: f64,
    pub max_abs_scalar_curvature: f64,
    /// `|det(Hess u)·r² − 1|`.
    pub max_det_hess_residual: f64,
    pub max_hess_asymmetry: f64,
    /// `|Hess u − Dξ Dξᵀ/V|`, relative.
    pub max_hess_factorization_residual: f64,
    /// `|f_H − r g_r|` and `|f_r + r g_H|`, relative.
    pub max_cauchy_riemann_residual: f64,
    pub max_laplace_residual: f64,
    /// `|Tr((rM_r)²) − 4|` on `r = 0`.
    pub max_trace_rmr_squared_residual: f64,
    /// `|Tr(M_H rM_r) − 2Det(g_H, f)/V|` on `r = 0`.
    pub max_trace_mh_rmr_residual: f64,
    /// Scalar curvature with `g` given an extra `H·(0.1, 0)`.
    pub detuned_scalar_curvature: f64,
    pub polygon_edges: Vec<ReconstructedEdge>,
    pub max_edge_residual: f64,
}

/// Runs every pointwise check on `samples` interior points and 100
/// boundary points.
pub fn run_verification(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    samples: usize,
) -> Result<VerificationReport> {
    let model = FieldModel::new(p, nu);
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
    let mut rep = VerificationReport {
        interior_samples: 0,
        boundary_samples: 0,
        min_v: f64::INFINITY,
        max_abs_scalar_curvature: 0.0,
        max_det_hess_residual: 0.0,
        max_hess_asymmetry: 0.0,
        max_hess_factorization_residual: 0.0,
        max_cauchy_riemann_residual: 0.0,
        max_laplace_residual: 0.0,
        max_trace_rmr_squared_residual: 0.0,
        max_trace_mh_rmr_residual: 0.0,
        detuned_scalar_curvature: 0.0,
        polygon_edges: Vec::new(),
        max_edge_residual: 0.0,
    };
    let points = interior_samples(p, samples);
    for &pt in &points {
        let e = model.eval(pt)?;
        rep.min_v = rep.min_v.min(e.v);
        let hess = e.hess_u.expect("interior point");
        let dxi = e.dxi.expect("interior point");
        rep.max_det_hess_residual = rep
            .max_det_hess_residual
            .max((mat_det(hess) * pt.r * pt.r - 1.0).abs());
        rep.max_hess_asymmetry = rep.max_hess_asymmetry.max((hess[0][1] - hess[1][0]).abs());
        let factored = mat_scale(1.0 / e.v, mat_mul(dxi, transpose(dxi)));
        rep.max_hess_factorization_residual = rep
            .max_hess_factorization_residual
            .max(max_abs_diff(hess, factored) / max_abs(hess).max(1.0));
        for c in 0..2 {
            let cr = rel(e.f_h[c], pt.r * e.g_r[c]).max(rel(e.f_r[c], -pt.r * e.g_h[c]));
            rep.max_cauchy_riemann_residual = rep.max_cauchy_riemann_residual.max(cr);
        }
        let lap = model.laplace_residual(pt, None)?;
        rep.max_laplace_residual = rep.max_laplace_residual.max(lap[0].abs()).max(lap[1].abs());
        let s = scalar_curvature_model(&model, pt)?;
        rep.max_abs_scalar_curvature = rep.max_abs_scalar_curvature.max(s.abs());
    }
    rep.interior_samples = points.len();

    let hs = boundary_samples(p, 100);
    for &h in &hs {
        let pt = FieldPoint { h, r: 0.0 };
        let e = model.eval(pt)?;
        let m = model.matrices(pt)?;
        rep.max_trace_rmr_squared_residual = rep
            .max_trace_rmr_squared_residual
            .max((trace_mul(m.r_m_r, m.r_m_r) - 4.0).abs());
        let expected = 2.0 * det(e.g_h, e.f) / e.v;
        rep.max_trace_mh_rmr_residual = rep
            .max_trace_mh_rmr_residual
            .max(rel(trace_mul(m.m_h, m.r_m_r), expected));
    }
    rep.boundary_samples = hs.len();

    let detuned = model.clone().with_detuning(NEGATIVE_CONTROL);
    rep.detuned_scalar_curvature = scalar_curvature_model(&detuned, NEGATIVE_CONTROL_POINT)?;

    rep.polygon_edges = reconstruct_polygon(p, nu)?;
    rep.max_edge_residual = rep.polygon_edges.iter().fold(0.0, |m, e| {
        m.max((e.vector[0] - e.closed_form[0]).abs())
            .max((e.vector[1] - e.closed_form[1]).abs())
    });
    Ok(rep)
}

/// Detuning behind [`VerificationReport::detuned_scalar_curvature`].
pub const NEGATIVE_CONTROL: Detuning = Detuning {
    g_offset: [0.0, 0.0],
    g_slope: [0.1, 0.0],
};

/// Where the negative control is evaluated.
pub const NEGATIVE_CONTROL_POINT: FieldPoint = FieldPoint { h: 0.0, r: 1.0 };

/// Half-circle integrals `(∫c₁, ∫T)` at one radius.
pub fn arc_table_row(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    radius: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let model = FieldModel::new(p, nu);
    let c1 = crate::invariants::arc_integral_model(&model, radius, ArcForm::C1, tol)?;
    let t = crate::invariants::arc_integral_model(&model, radius, ArcForm::T, tol)?;
    Ok((c1, t))
}
