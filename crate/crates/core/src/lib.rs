//! Curvature integrals of complete scalar-flat Kähler toric metrics on
//! strictly unbounded toric 4-orbifolds.
//!
//! A metric is fixed by the edge normals `ν_1 … ν_d` of its moment polygon,
//! the positions `−a_i` of the singular points on the boundary of the
//! half-plane `{(H, r) : r ≥ 0}`, and a parameter `ν = (α, β)` (`ν = 0` is
//! the ALE metric). From these the crate computes `∫c₁²`, `∫p`, `∫c₂` and
//! the Calabi energy `∫|R|²` by one-dimensional quadrature along `r = 0`
//! plus closed-form limits at the singular points.
//!
//! ```
//! use toric_calabi::{compute_invariants, cyclic_resolution, validate_parameter};
//!
//! let p = cyclic_resolution(3, 1.0)?;
//! let nu = validate_parameter(&p, [0.0, 0.0])?;
//! let report = compute_invariants(&p, &nu, 1e-10)?;
//! assert!((report.calabi_energy - 12.0).abs() < 1e-8);
//! # Ok::<(), toric_calabi::Error>(())
//! ```
//!
//! Modules, bottom-up:
//!
//! * [`polytope`] validates the combinatorial input.
//! * [`fields`] evaluates `f`, `g`, `V`, `Hess u` and the connection blocks
//!   at any point of the closed half-plane.
//! * [`quadrature`] integrates along the line and extrapolates limits.
//! * [`invariants`] assembles the global integrals.
//! * [`verify`] checks scalar-flatness, decay rates and the polygon.
//! * [`cli`] is the `toric-calabi` binary.

// `!(x > 0.0)` is how NaN is rejected; quadrature tables keep all digits;
// tensor contractions read best as index loops.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::needless_range_loop
)]

pub mod cli;
pub mod dual;
pub mod error;
pub mod fields;
pub mod invariants;
pub mod linalg;
pub mod polytope;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{
    eval_fields, eval_matrices, laplace_residual, laplace_residual_detuned, Detuning, FieldEval,
    FieldModel, FieldPoint, LogTermDetuning, MatrixEval,
};
pub use invariants::{
    arc_integral, compute_invariants, cyclic_closed_form, edge_limits, line_integrand_t,
    line_integrand_t_assembled, pontryagin_from_line_t, ArcForm, BoundaryProfile, ClosedForm,
    CurvatureReport, EdgeLimit, LimitSide,
};
pub use polytope::{
    build_polytope, cyclic_resolution, validate_parameter, ParameterKind, PolytopeData,
    TaubNutParameter,
};
pub use quadrature::{integrate_line, one_sided_limit, QuadratureResult, Side};
pub use verify::{
    decay_profile, reconstruct_polygon, scalar_curvature, scalar_curvature_detuned, DecayFit,
    DecayQuantity,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polygons.md")]
    mod polygons {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
