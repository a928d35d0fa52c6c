//! Global curvature integrals from data on the boundary line `r = 0`.
//!
//! With `G = Det(g_H, g)` restricted to `r = 0` the four integrals are
//!
//! ```text
//! ∫c₁²   = ∫_ℝ G/V² dH
//! ∫p     = Σ_intervals [2 V_H/V²] + 4 ∫_ℝ G/V² dH
//! ∫c₂    = (∫c₁² − ∫p) / 2
//! ∫|R|²  = ∫p − ∫c₁²
//! ```
//!
//! where the bracket is the jump of `2V_H/V²` between the two ends of each
//! interval cut out by the singular points `−a_i`. Those end values are
//! known in closed form, see [`edge_limits`].
//!
//! The module also evaluates the one-forms `c₁ = Det(dg, g)/V²` and `T`
//! whose exterior derivatives are the `c₁²` and Pontryagin densities, so the
//! line formulas above can be checked against arc integrals over half
//! circles `H = R cos φ`, `r = R sin φ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldModel, FieldPoint};
use crate::linalg::*;
use crate::polytope::{
    cyclic_resolution, idet, validate_parameter, PolytopeData, TaubNutParameter,
};
use crate::quadrature::{integrate_interval, integrate_line, richardson_extrapolate};

/// `V`, `V_H`, `V_HH` and `G` on `r = 0` in closed form. Every function
/// returns a non-finite value exactly at a singular point `−a_i`.
#[derive(Clone, Debug)]
pub struct BoundaryProfile {
    a: Vec<f64>,
    deltas: Vec<[f64; 2]>,
    nu: [f64; 2],
    nu1: [f64; 2],
}

impl BoundaryProfile {
    pub fn new(p: &PolytopeData, nu: &TaubNutParameter) -> Self {
        BoundaryProfile::from_model(&FieldModel::new(p, nu))
    }

    pub(crate) fn from_model(m: &FieldModel) -> Self {
        BoundaryProfile {
            a: m.a().to_vec(),
            deltas: m.deltas().to_vec(),
            nu: m.nu(),
            nu1: m.nu1(),
        }
    }

    fn offsets(&self, h: f64) -> impl Iterator<Item = (f64, [f64; 2])> + '_ {
        self.a
            .iter()
            .zip(&self.deltas)
            .map(move |(ai, d)| (h + ai, *d))
    }

    pub fn v_at(&self, h: f64) -> f64 {
        let mut v = det(self.nu, self.nu1);
        for (hi, di) in self.offsets(h) {
            let si = hi.signum();
            v += det(di, self.nu1) / (2.0 * hi.abs());
            v += 0.5 * (1.0 - si) * det(self.nu, di);
            for (hj, dj) in self.offsets(h) {
                let sj = hj.signum();
                v += 0.25 * (1.0 - sj) * det(di, dj) / hi.abs();
            }
        }
        v
    }

    pub fn v_h_at(&self, h: f64) -> f64 {
        let mut v = 0.0;
        for (hi, di) in self.offsets(h) {
            let si = hi.signum();
            v += 0.5 * si / (hi * hi) * det(self.nu1, di);
            for (hj, dj) in self.offsets(h) {
                let sj = hj.signum();
                v += 0.25 * sj / (hj * hj) * (1.0 - si) * det(di, dj);
            }
        }
        v
    }

    pub fn v_hh_at(&self, h: f64) -> f64 {
        let mut v = 0.0;
        for (hi, di) in self.offsets(h) {
            let si = hi.signum();
            v -= det(self.nu1, di) / hi.abs().powi(3);
            for (hj, dj) in self.offsets(h) {
                v -= 0.5 * (1.0 - si) * det(di, dj) / hj.abs().powi(3);
            }
        }
        v
    }

    pub fn g_at(&self, h: f64) -> f64 {
        let mut v = 0.0;
        for (hi, di) in self.offsets(h) {
            let si = hi.signum();
            v += 0.5 * si / (hi * hi) * det(self.nu, di);
            for (hj, dj) in self.offsets(h) {
                v += 0.25 * si / (hi * hi * hj.abs()) * det(dj, di);
            }
        }
        v
    }

    /// Integrand of `∫c₁²`.
    pub fn c1_density(&self, h: f64) -> f64 {
        let v = self.v_at(h);
        self.g_at(h) / (v * v)
    }

    /// `V_H / V²`, whose jumps make up the boundary terms of `∫p`.
    pub fn vh_over_v2(&self, h: f64) -> f64 {
        let v = self.v_at(h);
        self.v_h_at(h) / (v * v)
    }
}

/// Where a one-sided limit is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitSide {
    Left,
    Right,
}

/// One-sided limit of `V_H/V²` on `r = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLimit {
    /// `"-inf"`, `"+inf"` or `"-a_i"`.
    pub label: String,
    /// Position on the line; `None` at infinity.
    pub h: Option<f64>,
    /// Side of the point from which it is approached.
    pub side: LimitSide,
    pub value: f64,
}

/// Closed-form limits of `V_H/V²`, ordered by increasing `H`: `−∞`, then
/// both sides of every `−a_i`, then `+∞`.
///
/// Near `−a_i` the field `f` is the normal `ν_side` of the adjacent edge and
/// `V ≈ Det(Δ_i, ν_side)/(2|H_i|)`, so the limit is
/// `−2 sign(H_i)/Det(Δ_i, ν_side)`; both determinants equal
/// `Det(ν_{i+1}, ν_i)`. At infinity the limit is `0` unless `ν = 0`, in which
/// case `V ≈ Det(ν_d, ν_1)/(2|H|)`.
pub fn edge_limits(p: &PolytopeData, nu: &TaubNutParameter) -> Vec<EdgeLimit> {
    let n = p.normals();
    let d = n.len();
    let far = if nu.is_ale() {
        2.0 / idet(n[d - 1], n[0]) as f64
    } else {
        0.0
    };
    let mut out = vec![EdgeLimit {
        label: "-inf".into(),
        h: None,
        side: LimitSide::Right,
        value: far,
    }];
    for i in (0..d - 1).rev() {
        let c = idet(n[i + 1], n[i]) as f64;
        let h = -p.a()[i];
        let label = format!("-a_{}", i + 1);
        out.push(EdgeLimit {
            label: label.clone(),
            h: Some(h),
            side: LimitSide::Left,
            value: 2.0 / c,
        });
        out.push(EdgeLimit {
            label,
            h: Some(h),
            side: LimitSide::Right,
            value: -2.0 / c,
        });
    }
    out.push(EdgeLimit {
        label: "+inf".into(),
        h: None,
        side: LimitSide::Left,
        value: 0.0 - far,
    });
    out
}

/// Jumps `[2V_H/V²]` over each interval, left to right.
pub fn boundary_terms(limits: &[EdgeLimit]) -> Vec<f64> {
    // Limits alternate: right-of-start, then left-of-end, per interval.
    limits
        .chunks(2)
        .map(|pair| 2.0 * (pair[1].value - pair[0].value))
        .collect()
}

/// All global quantities for one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub c1_squared: f64,
    pub pontryagin: f64,
    pub c2: f64,
    pub calabi_energy: f64,
    /// `[2V_H/V²]` per interval, by increasing `H`.
    pub boundary_terms: Vec<f64>,
    /// `∫ G/V² dH` per interval, by increasing `H`.
    pub interval_integrals: Vec<f64>,
    pub edge_limits: Vec<EdgeLimit>,
    /// Error estimate of the single quadrature behind `c1_squared`.
    pub quadrature_error: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Sample abscissas on `r = 0` away from the singular points: the midpoint
/// of every bounded interval and two points in each tail.
fn probe_abscissas(breakpoints: &[f64]) -> Vec<f64> {
    let first = breakpoints[0];
    let last = breakpoints[breakpoints.len() - 1];
    let mut hs = vec![first - 10.0, first - 0.5];
    hs.extend(breakpoints.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    hs.extend([last + 0.5, last + 10.0]);
    hs
}

fn check_positivity(model: &FieldModel, breakpoints: &[f64]) -> Result<f64> {
    let mut vmin = f64::INFINITY;
    for h in probe_abscissas(breakpoints) {
        for r in [0.0, 1.0] {
            let pt = FieldPoint { h, r };
            let v = model.kernel(h, r).v();
            if !(v > 0.0) {
                return Err(Error::NonPositiveV {
                    h: pt.h,
                    r: pt.r,
                    v,
                });
            }
            vmin = vmin.min(v);
        }
    }
    Ok(vmin)
}

/// Assembles [`CurvatureReport`] from one line quadrature and the
/// closed-form edge limits. `tol` bounds the absolute quadrature error of
/// `c1_squared`.
pub fn compute_invariants(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    tol: f64,
) -> Result<CurvatureReport> {
    validate_parameter(p, nu.vector())?;
    let model = FieldModel::new(p, nu);
    let breakpoints = p.breakpoints();
    let vmin = check_positivity(&model, &breakpoints)?;
    let profile = BoundaryProfile::from_model(&model);

    let limits = edge_limits(p, nu);
    let boundary = boundary_terms(&limits);
    let quad = integrate_line(|h| profile.c1_density(h), &breakpoints, tol)?;

    let c1_squared = quad.value;
    let jump: f64 = boundary.iter().sum();
    let pontryagin = jump + 4.0 * c1_squared;
    let c2 = (c1_squared - pontryagin) / 2.0;
    let calabi_energy = pontryagin - c1_squared;

    let mut diagnostics = BTreeMap::new();
    let mut g_gap: f64 = 0.0;
    for h in probe_abscissas(&breakpoints) {
        let k = model.kernel(h, 0.0);
        g_gap = g_gap.max((profile.g_at(h) - det(k.g_h, k.g)).abs());
    }
    diagnostics.insert("G_minus_Det_gH_g_max".into(), g_gap);
    diagnostics.insert("V_min_sampled".into(), vmin);
    diagnostics.insert("quadrature_panels".into(), quad.panels as f64);
    let interval_sum: f64 = quad.segment_values.iter().sum();
    diagnostics.insert(
        "calabi_assembly_residual".into(),
        calabi_energy - (jump + 3.0 * interval_sum),
    );

    Ok(CurvatureReport {
        c1_squared,
        pontryagin,
        c2,
        calabi_energy,
        boundary_terms: boundary,
        interval_integrals: quad.segment_values,
        edge_limits: limits,
        quadrature_error: quad.abs_error_estimate,
        diagnostics,
    })
}

/// Closed-form values for the minimal resolution of `ℂ²/ℤ_{d−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub c1_squared: f64,
    pub pontryagin: f64,
    pub calabi_energy: f64,
}

/// Exact integrals for [`cyclic_resolution`]`(d, 1)`. With
/// `X = (α+β)(1/(α − (α+β)(d−1)) − 1/α)` they are `(X, 8(d−1) + 4X,
/// 8(d−1) + 3X)`, and `(0, 8(d−1) − 8/(d−1), 8(d−1) − 8/(d−1))` for `ν = 0`.
pub fn cyclic_closed_form(d: usize, nu: [f64; 2]) -> Result<ClosedForm> {
    let p = cyclic_resolution(d, 1.0)?;
    let nu = validate_parameter(&p, nu)?;
    let m = (d - 1) as f64;
    if nu.is_ale() {
        let e = 8.0 * m - 8.0 / m;
        return Ok(ClosedForm {
            c1_squared: 0.0,
            pontryagin: e,
            calabi_energy: e,
        });
    }
    let (alpha, beta) = (nu.alpha, nu.beta);
    let s = alpha + beta;
    let x = s * (1.0 / (alpha - s * m) - 1.0 / alpha);
    Ok(ClosedForm {
        c1_squared: x,
        pontryagin: 8.0 * m + 4.0 * x,
        calabi_energy: 8.0 * m + 3.0 * x,
    })
}

/// `dH`-coefficient of `T` on `r = 0`:
/// `4G/V² + 2(V_HH/V² − 2V_H²/V³)`.
pub fn line_integrand_t(p: &PolytopeData, nu: &TaubNutParameter, h: f64) -> Result<f64> {
    let model = FieldModel::new(p, nu);
    model.check_point(FieldPoint { h, r: 0.0 })?;
    Ok(simplified_line_t(&BoundaryProfile::from_model(&model), h))
}

fn simplified_line_t(profile: &BoundaryProfile, h: f64) -> f64 {
    let v = profile.v_at(h);
    let v_h = profile.v_h_at(h);
    let v_hh = profile.v_hh_at(h);
    4.0 * profile.g_at(h) / (v * v) + 2.0 * (v_hh / (v * v) - 2.0 * v_h * v_h / (v * v * v))
}

/// Same quantity as [`line_integrand_t`], assembled from the connection
/// blocks through the general one-form [`t_form`].
pub fn line_integrand_t_assembled(p: &PolytopeData, nu: &TaubNutParameter, h: f64) -> Result<f64> {
    Ok(t_form(&FieldModel::new(p, nu), FieldPoint { h, r: 0.0 })?[0])
}

/// Components `(ω_H, ω_r)` of `c₁ = Det(dg, g)/V²`.
pub fn c1_form(model: &FieldModel, pt: FieldPoint) -> Result<[f64; 2]> {
    model.check_point(pt)?;
    let k = model.kernel(pt.h, pt.r);
    let v = k.v();
    if !(v > 0.0) {
        return Err(Error::NonPositiveV {
            h: pt.h,
            r: pt.r,
            v,
        });
    }
    Ok([det(k.g_h, k.g) / (v * v), det(k.g_r, k.g) / (v * v)])
}

/// Components `(T_H, T_r)` of the one-form
///
/// ```text
/// T = [Tr(M_H²) Det(df,f) − Tr(rM_r M_H)(Det(dg,f) + Det(df,g))
///      + Tr(r²M_r²) Det(dg,g)] / V²  +  Tr(rM_r dM_H − M_H d(rM_r)) / V
/// ```
pub fn t_form(model: &FieldModel, pt: FieldPoint) -> Result<[f64; 2]> {
    let mx = model.matrices(pt)?;
    let k = model.kernel(pt.h, pt.r);
    let v = k.v();
    let (p, q) = (mx.m_h, mx.r_m_r);
    let pp = trace_mul(p, p);
    let qp = trace_mul(q, p);
    let qq = trace_mul(q, q);
    let component = |fx: [f64; 2], gx: [f64; 2], dp: Mat2<f64>, dq: Mat2<f64>| {
        let algebraic = pp * det(fx, k.f) - qp * (det(gx, k.f) + det(fx, k.g)) + qq * det(gx, k.g);
        algebraic / (v * v) + (trace_mul(q, dp) - trace_mul(p, dq)) / v
    };
    Ok([
        component(k.f_h, k.g_h, mx.dm_h_dh, mx.dr_m_r_dh),
        component(k.f_r, k.g_r, mx.dm_h_dr, mx.dr_m_r_dr),
    ])
}

/// The matrices `A = (f_b M_H − g_b rM_r)/V` and `B = −(f_a M_H − g_a rM_r)/V`
/// and their derivatives along `(dh, dr)`.
#[cfg(test)]
pub(crate) fn torus_connection(
    model: &FieldModel,
    pt: FieldPoint,
    dh: f64,
    dr: f64,
) -> (Mat2<f64>, Mat2<f64>, Mat2<f64>, Mat2<f64>) {
    use crate::dual::{Dual, Real};
    use crate::fields::connection_blocks;
    let h = Dual::new(pt.h, dh);
    let r = Dual::new(pt.r, dr);
    let k = model.kernel(h, r);
    let (m_h, rm_r) = connection_blocks(&k, r);
    let inv_v = k.v().recip();
    let a = mat_scale(
        inv_v,
        mat_sub(mat_scale(k.f[1], m_h), mat_scale(k.g[1], rm_r)),
    );
    let b = mat_scale(
        -inv_v,
        mat_sub(mat_scale(k.f[0], m_h), mat_scale(k.g[0], rm_r)),
    );
    let parts = |m: Mat2<Dual<f64>>| {
        (
            [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]],
            [[m[0][0].eps, m[0][1].eps], [m[1][0].eps, m[1][1].eps]],
        )
    };
    let (a0, da) = parts(a);
    let (b0, db) = parts(b);
    (a0, da, b0, db)
}

/// Which one-form an arc integral pulls back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcForm {
    C1,
    T,
}

/// Pull-back of `ω = ω_H dH + ω_r dr` to `H = R cos φ`, `r = R sin φ`.
pub(crate) fn arc_density(
    model: &FieldModel,
    radius: f64,
    phi: f64,
    which: ArcForm,
) -> Result<f64> {
    let (s, c) = phi.sin_cos();
    let pt = FieldPoint {
        h: radius * c,
        r: radius * s,
    };
    let w = match which {
        ArcForm::C1 => c1_form(model, pt)?,
        ArcForm::T => t_form(model, pt)?,
    };
    Ok(-w[0] * radius * s + w[1] * radius * c)
}

/// `∫_{C_R} ω` over the half circle of radius `R`, traversed from `(R, 0)`
/// to `(−R, 0)`.
pub fn arc_integral(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    radius: f64,
    which: ArcForm,
    tol: f64,
) -> Result<f64> {
    arc_integral_model(&FieldModel::new(p, nu), radius, which, tol)
}

pub(crate) fn arc_integral_model(
    model: &FieldModel,
    radius: f64,
    which: ArcForm,
    tol: f64,
) -> Result<f64> {
    let reach = model.a().iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if !(radius > reach + 1.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "arc radius {radius} must exceed max|a_i| + 1 = {}",
            reach + 1.0
        )));
    }
    let mut failure = None;
    let q = integrate_interval(
        |phi| match arc_density(model, radius, phi, which) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        std::f64::consts::PI,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(q?.value)
}

/// `∫p` recomputed without edge limits: quadrature of the line density of
/// `T` plus the `R → ∞` extrapolation of its arc integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineTCheck {
    pub line_integral: f64,
    pub arc_radii: Vec<f64>,
    pub arc_values: Vec<f64>,
    pub arc_limit: f64,
    pub pontryagin: f64,
}

pub fn pontryagin_from_line_t(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    tol: f64,
) -> Result<LineTCheck> {
    let model = FieldModel::new(p, nu);
    let profile = BoundaryProfile::from_model(&model);
    let line = integrate_line(|h| simplified_line_t(&profile, h), &p.breakpoints(), tol)?;
    let reach = p.a().iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let r0 = 8.0 * (reach + 1.0);
    let arc_radii: Vec<f64> = (0..6).map(|k| r0 * 2f64.powi(k)).collect();
    let arc_values = arc_radii
        .iter()
        .map(|&r| arc_integral_model(&model, r, ArcForm::T, tol))
        .collect::<Result<Vec<_>>>()?;
    let arc_limit = richardson_extrapolate(&arc_values)?.value;
    Ok(LineTCheck {
        line_integral: line.value,
        arc_radii,
        arc_values,
        arc_limit,
        pontryagin: line.value + arc_limit,
    })
}
