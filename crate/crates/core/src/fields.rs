//! Pointwise field evaluation on the closed half-plane `{(H, r) : r ≥ 0}`.
//!
//! Everything is driven by the two vector fields
//!
//! ```text
//! f = ν_1 + ½ Σ (1 − H_i/ρ_i) Δ_i        g = ν + Σ Δ_i / (2ρ_i)
//! ```
//!
//! with `H_i = H + a_i`, `ρ_i = √(r² + H_i²)` and `Δ_i = ν_{i+1} − ν_i`.
//! The columns of `Dξ` are `g` and `f/r`, and `V = Det(g, f) = r·det Dξ`.
//!
//! The kernel is written once over [`Real`], so the same code yields
//! values (`f64`), first derivatives ([`Dual`]) and second derivatives
//! ([`HyperDual`](crate::dual::HyperDual)). Quantities that carry explicit
//! `1/r` or `1/r²` factors are assembled from the smooth combinations
//! `f_H/r²` and `f_r/r`, so the same formulas hold on `r = 0`.

use crate::dual::{hyper_parts, hyper_seed, Dual, Real};
use crate::error::{Error, Result};
use crate::linalg::*;
use crate::polytope::{PolytopeData, TaubNutParameter};

/// Points closer than this to some `(−a_i, 0)` are refused.
pub const SINGULAR_RADIUS: f64 = 1e-12;

/// A point of the closed upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    pub h: f64,
    pub r: f64,
}

impl FieldPoint {
    pub fn new(h: f64, r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidPoint(r));
        }
        if !h.is_finite() {
            return Err(Error::InvalidInput(format!("H = {h} is not finite")));
        }
        Ok(FieldPoint { h, r })
    }
}

/// Deliberate changes to `g`, used to build negative controls for the
/// verification suite. The default is the untouched model.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Detuning {
    /// Constant added to `g`. Equivalent to replacing `ν` by `ν + offset`.
    pub g_offset: [f64; 2],
    /// `g` gains `H·g_slope`; `ξ` is then no longer harmonic.
    pub g_slope: [f64; 2],
}

impl Detuning {
    pub fn is_none(&self) -> bool {
        *self == Detuning::default()
    }
}

/// Values of `f`, `g` and their first derivatives at one point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Kernel<T> {
    pub f: Vec2<T>,
    pub g: Vec2<T>,
    pub f_h: Vec2<T>,
    pub f_r: Vec2<T>,
    pub g_h: Vec2<T>,
    pub g_r: Vec2<T>,
    /// `f_H / r²`, smooth up to `r = 0`.
    pub f_h_over_r2: Vec2<T>,
    /// `f_r / r`, smooth up to `r = 0` where it equals `−g_H`.
    pub f_r_over_r: Vec2<T>,
}

impl<T: Real> Kernel<T> {
    pub fn v(&self) -> T {
        det(self.g, self.f)
    }
}

/// Polygon and parameter bound together for evaluation.
#[derive(Clone, Debug)]
pub struct FieldModel {
    a: Vec<f64>,
    deltas: Vec<[f64; 2]>,
    nu1: [f64; 2],
    nu: [f64; 2],
    detuning: Detuning,
}

impl FieldModel {
    pub fn new(p: &PolytopeData, nu: &TaubNutParameter) -> Self {
        FieldModel {
            a: p.a().to_vec(),
            deltas: p.deltas(),
            nu1: p.normal_f64(0),
            nu: nu.vector(),
            detuning: Detuning::default(),
        }
    }

    pub fn with_detuning(mut self, detuning: Detuning) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn detuning(&self) -> Detuning {
        self.detuning
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn deltas(&self) -> &[[f64; 2]] {
        &self.deltas
    }

    pub fn nu(&self) -> [f64; 2] {
        self.nu
    }

    pub fn nu1(&self) -> [f64; 2] {
        self.nu1
    }

    pub fn check_point(&self, pt: FieldPoint) -> Result<()> {
        for &ai in &self.a {
            if (pt.h + ai).hypot(pt.r) < SINGULAR_RADIUS {
                return Err(Error::SingularPoint { h: pt.h, r: pt.r });
            }
        }
        Ok(())
    }

    pub(crate) fn kernel<T: Real>(&self, h: T, r: T) -> Kernel<T> {
        let zero = [T::cst(0.0); 2];
        let mut f = lift(self.nu1);
        let mut g = lift(self.nu);
        let mut f_h_over_r2 = zero;
        let mut f_r_over_r = zero;
        let mut g_h = zero;
        let mut g_r = zero;
        let r2 = r * r;
        for (&ai, &delta) in self.a.iter().zip(&self.deltas) {
            let delta: Vec2<T> = lift(delta);
            let hi = h + ai;
            let rho = (r2 + hi * hi).sqrt();
            // 1 − H_i/ρ_i without cancellation on either side of −a_i.
            let one_minus = if hi.value() > 0.0 {
                r2 / (rho * (rho + hi))
            } else {
                (rho - hi) / rho
            };
            let inv_rho3 = (rho * rho * rho).recip();
            f = add(f, scale(one_minus * 0.5, delta));
            g = add(g, scale(rho.recip() * 0.5, delta));
            f_h_over_r2 = add(f_h_over_r2, scale(inv_rho3 * -0.5, delta));
            f_r_over_r = add(f_r_over_r, scale(hi * inv_rho3 * 0.5, delta));
            g_h = add(g_h, scale(hi * inv_rho3 * -0.5, delta));
            g_r = add(g_r, scale(r * inv_rho3 * -0.5, delta));
        }
        if !self.detuning.is_none() {
            let slope: Vec2<T> = lift(self.detuning.g_slope);
            g = add(g, lift(self.detuning.g_offset));
            g = add(g, scale(h, slope));
            g_h = add(g_h, slope);
        }
        Kernel {
            f,
            g,
            f_h: scale(r2, f_h_over_r2),
            f_r: scale(r, f_r_over_r),
            g_h,
            g_r,
            f_h_over_r2,
            f_r_over_r,
        }
    }

    /// `ξ = ν_1 log r + ½ Σ Δ_i log(H_i + ρ_i) + ν H`, for `r > 0`.
    pub(crate) fn xi<T: Real>(&self, h: T, r: T, log_detuning: Option<LogTermDetuning>) -> Vec2<T> {
        let log_r = r.ln();
        let mut xi = scale(log_r, lift(self.nu1));
        xi = add(xi, scale(h, lift(self.nu)));
        if !self.detuning.is_none() {
            xi = add(xi, scale(h, lift(self.detuning.g_offset)));
            xi = add(xi, scale(h * h * 0.5, lift(self.detuning.g_slope)));
        }
        for (i, (&ai, &delta)) in self.a.iter().zip(&self.deltas).enumerate() {
            let hi = h + ai;
            let rho = (r * r + hi * hi).sqrt();
            let (coef, dist) = match log_detuning {
                Some(t) if t.term == i => (t.coefficient_scale, t.distance_scale),
                _ => (1.0, 1.0),
            };
            let log_term = if dist != 1.0 {
                (hi + rho * dist).ln()
            } else if hi.value() > 0.0 {
                (hi + rho).ln()
            } else {
                // H_i + ρ_i = r² / (ρ_i − H_i)
                log_r * 2.0 - (rho - hi).ln()
            };
            xi = add(xi, scale(log_term * (0.5 * coef), lift(delta)));
        }
        xi
    }
}

/// Alters one `log(H_i + ρ_i)` term of `ξ` to `c·log(H_i + k·ρ_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogTermDetuning {
    /// Zero-based term index `i − 1`.
    pub term: usize,
    pub coefficient_scale: f64,
    pub distance_scale: f64,
}

/// Pointwise field values.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldEval {
    /// `None` on `r = 0`, where `ν_1 log r` diverges.
    pub xi: Option<[f64; 2]>,
    pub f: [f64; 2],
    pub g: [f64; 2],
    pub f_h: [f64; 2],
    pub f_r: [f64; 2],
    pub g_h: [f64; 2],
    pub g_r: [f64; 2],
    pub v: f64,
    pub rho: Vec<f64>,
    /// Columns `g` and `f/r`; `None` on `r = 0`.
    pub dxi: Option<Mat2<f64>>,
    /// `(g gᵀ + f fᵀ/r²) / V`; `None` on `r = 0`.
    pub hess_u: Option<Mat2<f64>>,
}

/// Connection blocks `M_H`, `r·M_r` and their partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixEval {
    pub m_h: Mat2<f64>,
    pub r_m_r: Mat2<f64>,
    pub dm_h_dh: Mat2<f64>,
    pub dm_h_dr: Mat2<f64>,
    pub dr_m_r_dh: Mat2<f64>,
    pub dr_m_r_dr: Mat2<f64>,
}

pub fn eval_fields(p: &PolytopeData, nu: &TaubNutParameter, pt: FieldPoint) -> Result<FieldEval> {
    FieldModel::new(p, nu).eval(pt)
}

pub fn eval_matrices(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    pt: FieldPoint,
) -> Result<MatrixEval> {
    FieldModel::new(p, nu).matrices(pt)
}

/// Axisymmetric Laplacian `ξ_HH + ξ_rr + ξ_r/r` of `ξ`, componentwise.
pub fn laplace_residual(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    pt: FieldPoint,
) -> Result<[f64; 2]> {
    FieldModel::new(p, nu).laplace_residual(pt, None)
}

/// As [`laplace_residual`] with one logarithmic term of `ξ` altered.
pub fn laplace_residual_detuned(
    p: &PolytopeData,
    nu: &TaubNutParameter,
    pt: FieldPoint,
    detuning: LogTermDetuning,
) -> Result<[f64; 2]> {
    FieldModel::new(p, nu).laplace_residual(pt, Some(detuning))
}

/// A vector field on the half-plane, viewed as an axisymmetric function on
/// `ℝ³` with `r` the distance to the axis.
pub trait AxisymmetricField {
    fn eval<T: Real>(&self, h: T, r: T) -> Vec2<T>;
}

/// `φ_HH + φ_rr + φ_r/r` by exact second-order forward differentiation.
pub fn axisymmetric_laplacian<F: AxisymmetricField>(field: &F, h: f64, r: f64) -> [f64; 2] {
    let along_h = field.eval(hyper_seed(h, 1.0, 1.0), hyper_seed(r, 0.0, 0.0));
    let along_r = field.eval(hyper_seed(h, 0.0, 0.0), hyper_seed(r, 1.0, 1.0));
    let mut out = [0.0; 2];
    for k in 0..2 {
        let (_, _, _, xi_hh) = hyper_parts(along_h[k]);
        let (_, xi_r, _, xi_rr) = hyper_parts(along_r[k]);
        out[k] = xi_hh + xi_rr + xi_r / r;
    }
    out
}

struct XiField<'a> {
    model: &'a FieldModel,
    log_detuning: Option<LogTermDetuning>,
}

impl AxisymmetricField for XiField<'_> {
    fn eval<T: Real>(&self, h: T, r: T) -> Vec2<T> {
        self.model.xi(h, r, self.log_detuning)
    }
}

/// `M_H` and `r·M_r` assembled from the rank-one sums.
pub(crate) fn connection_blocks<T: Real>(k: &Kernel<T>, r: T) -> (Mat2<T>, Mat2<T>) {
    let (f, g) = (k.f, k.g);
    let fp = perp(f);
    let gp = perp(g);
    let v = k.v();
    let inv_v = v.recip();
    let inv_v2 = inv_v * inv_v;
    let r2 = r * r;

    let gf = outer(g, fp);
    let gg = outer(g, gp);
    let fg = outer(f, gp);
    let ff = outer(f, fp);

    // M_H
    let det_gh_f = det(k.g_h, f);
    let det_g_fh = det(g, k.f_h);
    let mut m_h = mat_scale(v, outer(k.g_h, fp));
    m_h = mat_add(m_h, mat_scale(r2 * det(k.g_h, g), gg));
    m_h = mat_add(m_h, mat_scale(det_gh_f, gf));
    m_h = mat_sub(m_h, mat_scale(v, outer(k.f_h, gp)));
    m_h = mat_sub(m_h, mat_scale(det_g_fh, fg));
    m_h = mat_add(m_h, mat_scale(det(k.f_h_over_r2, f), ff));
    m_h = mat_scale(inv_v2, m_h);
    m_h = mat_sub(m_h, mat_scale((det_gh_f + det_g_fh) * inv_v, identity()));

    // r·M_r
    let det_gr_f = det(k.g_r, f);
    let det_g_fr = det(g, k.f_r);
    let mut rm_r = mat_scale(r * v, outer(k.g_r, fp));
    rm_r = mat_add(rm_r, mat_scale(r2 * r * det(k.g_r, g), gg));
    rm_r = mat_add(rm_r, mat_scale(r * det_gr_f, gf));
    rm_r = mat_sub(rm_r, mat_scale(r * v, outer(k.f_r, gp)));
    rm_r = mat_sub(rm_r, mat_scale(r * det_g_fr, fg));
    rm_r = mat_add(rm_r, mat_scale(det(k.f_r_over_r, f), ff));
    rm_r = mat_add(rm_r, mat_scale(v * 2.0, fg));
    rm_r = mat_scale(inv_v2, rm_r);
    rm_r = mat_sub(
        rm_r,
        mat_scale(r * (det_gr_f + det_g_fr) * inv_v, identity()),
    );

    (m_h, rm_r)
}

fn split<T: Real>(m: Mat2<Dual<T>>) -> (Mat2<T>, Mat2<T>) {
    (
        [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]],
        [[m[0][0].eps, m[0][1].eps], [m[1][0].eps, m[1][1].eps]],
    )
}

impl FieldModel {
    /// All pointwise field values at `pt`.
    pub fn eval(&self, pt: FieldPoint) -> Result<FieldEval> {
        self.check_point(pt)?;
        let k = self.kernel(pt.h, pt.r);
        let v = k.v();
        if !(v > 0.0) {
            return Err(Error::NonPositiveV {
                h: pt.h,
                r: pt.r,
                v,
            });
        }
        let rho = self.a.iter().map(|ai| (pt.h + ai).hypot(pt.r)).collect();
        let (xi, dxi, hess_u) = if pt.r > 0.0 {
            let dxi = [[k.g[0], k.f[0] / pt.r], [k.g[1], k.f[1] / pt.r]];
            let r2 = pt.r * pt.r;
            let hess = mat_scale(
                1.0 / v,
                mat_add(outer(k.g, k.g), mat_scale(1.0 / r2, outer(k.f, k.f))),
            );
            (Some(self.xi(pt.h, pt.r, None)), Some(dxi), Some(hess))
        } else {
            (None, None, None)
        };
        Ok(FieldEval {
            xi,
            f: k.f,
            g: k.g,
            f_h: k.f_h,
            f_r: k.f_r,
            g_h: k.g_h,
            g_r: k.g_r,
            v,
            rho,
            dxi,
            hess_u,
        })
    }

    pub fn matrices(&self, pt: FieldPoint) -> Result<MatrixEval> {
        self.check_point(pt)?;
        let kh = self.kernel(Dual::var(pt.h), Dual::constant(pt.r));
        let v = kh.v().re;
        if !(v > 0.0) {
            return Err(Error::NonPositiveV {
                h: pt.h,
                r: pt.r,
                v,
            });
        }
        let (m_h, r_m_r) = connection_blocks(&kh, Dual::constant(pt.r));
        let (m_h, dm_h_dh) = split(m_h);
        let (r_m_r, dr_m_r_dh) = split(r_m_r);

        let r_dir = Dual::var(pt.r);
        let kr = self.kernel(Dual::constant(pt.h), r_dir);
        let (m_h_r, r_m_r_r) = connection_blocks(&kr, r_dir);
        let (_, dm_h_dr) = split(m_h_r);
        let (_, dr_m_r_dr) = split(r_m_r_r);

        Ok(MatrixEval {
            m_h,
            r_m_r,
            dm_h_dh,
            dm_h_dr,
            dr_m_r_dh,
            dr_m_r_dr,
        })
    }

    pub fn laplace_residual(
        &self,
        pt: FieldPoint,
        log_detuning: Option<LogTermDetuning>,
    ) -> Result<[f64; 2]> {
        self.check_point(pt)?;
        if !(pt.r > 0.0) {
            return Err(Error::InvalidInput(
                "the Laplace residual needs r > 0".into(),
            ));
        }
        Ok(axisymmetric_laplacian(
            &XiField {
                model: self,
                log_detuning,
            },
            pt.h,
            pt.r,
        ))
    }

    /// `V`, `V_H` and `V_HH` on `r = 0`, by differentiating `Det(g, f)`.
    pub fn boundary_v_jet(&self, h: f64) -> Result<(f64, f64, f64)> {
        self.check_point(FieldPoint { h, r: 0.0 })?;
        let k = self.kernel(hyper_seed(h, 1.0, 1.0), hyper_seed(0.0, 0.0, 0.0));
        let (v, v_h, _, v_hh) = hyper_parts(k.v());
        Ok((v, v_h, v_hh))
    }

    /// Inverse Hessian of the symplectic potential,
    /// `(r² g^⊥ g^⊥ᵀ + f^⊥ f^⊥ᵀ) / V`, the torus block of the metric.
    pub(crate) fn torus_block<T: Real>(&self, h: T, r: T) -> (T, Mat2<T>) {
        let k = self.kernel(h, r);
        let v = k.v();
        let gp = perp(k.g);
        let fp = perp(k.f);
        let w = mat_add(mat_scale(r * r, outer(gp, gp)), outer(fp, fp));
        (v, mat_scale(v.recip(), w))
    }
}
