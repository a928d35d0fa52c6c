//! Combinatorial input: edge normals of the moment polygon, the abscissas
//! `a_i` of the singular points on the boundary of the half-plane, and the
//! generalized Taub-NUT parameter `ν = (α, β)`.
//!
//! Normals are listed in boundary order, `ν_1` and `ν_d` being the normals of
//! the two unbounded edges. The abscissas only need to be strictly
//! increasing; every downstream formula is invariant under the simultaneous
//! shift `H → H + c`, `a_i → a_i − c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer edge normal.
pub type Normal = [i64; 2];

/// `Det(u, v)` for integer vectors.
#[inline]
pub fn idet(u: Normal, v: Normal) -> i64 {
    u[0] * v[1] - u[1] * v[0]
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Validated polygon data. Construct with [`build_polytope`] or
/// [`cyclic_resolution`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolytopeData {
    normals: Vec<Normal>,
    a: Vec<f64>,
}

impl PolytopeData {
    pub fn normals(&self) -> &[Normal] {
        &self.normals
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Number of edges `d`.
    pub fn edges(&self) -> usize {
        self.normals.len()
    }

    /// Edge differences `Δ_i = ν_{i+1} − ν_i`, as reals.
    pub fn deltas(&self) -> Vec<[f64; 2]> {
        self.normals
            .windows(2)
            .map(|w| [(w[1][0] - w[0][0]) as f64, (w[1][1] - w[0][1]) as f64])
            .collect()
    }

    pub fn normal_f64(&self, i: usize) -> [f64; 2] {
        [self.normals[i][0] as f64, self.normals[i][1] as f64]
    }

    /// Singular points `−a_i` on the line `r = 0`, sorted increasingly.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.a.iter().rev().map(|x| -x).collect()
    }

    /// Same polygon with every abscissa moved by `shift`.
    pub fn translated(&self, shift: f64) -> PolytopeData {
        PolytopeData {
            normals: self.normals.clone(),
            a: self.a.iter().map(|x| x + shift).collect(),
        }
    }

    /// Sign shared by all consecutive determinants `Det(ν_i, ν_{i+1})`.
    pub fn orientation(&self) -> i64 {
        idet(self.normals[0], self.normals[1]).signum()
    }
}

/// Validates raw normals and abscissas.
pub fn build_polytope(normals: &[Normal], a: &[f64]) -> Result<PolytopeData> {
    let d = normals.len();
    if d < 2 {
        return Err(Error::TooFewEdges(d));
    }
    for (index, n) in normals.iter().enumerate() {
        if gcd(n[0], n[1]) != 1 {
            return Err(Error::NonPrimitiveNormal {
                index: index + 1,
                x: n[0],
                y: n[1],
            });
        }
    }
    if let Some(x) = a.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("abscissa {x} is not finite")));
    }
    for (i, w) in a.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NonIncreasingAbscissas {
                prev_index: i + 1,
                index: i + 2,
                prev: w[0],
                next: w[1],
            });
        }
    }
    if a.len() != d - 1 {
        return Err(Error::AbscissaCountMismatch {
            edges: d,
            expected: d - 1,
            found: a.len(),
        });
    }
    if idet(normals[0], normals[d - 1]) == 0 {
        return Err(Error::ParallelUnboundedEdges);
    }
    let sign = idet(normals[0], normals[1]).signum();
    for (i, w) in normals.windows(2).enumerate() {
        let det = idet(w[0], w[1]);
        if det == 0 || det.signum() != sign {
            return Err(Error::NonConvexOrdering {
                index: i + 1,
                next: i + 2,
                det,
            });
        }
    }
    Ok(PolytopeData {
        normals: normals.to_vec(),
        a: a.to_vec(),
    })
}

/// Minimal resolution of the cyclic singularity `ℂ²/ℤ_{d−1}`: normals
/// `ν_k = (k−1, −(k−2))` and abscissas `a_i = i·spacing`.
pub fn cyclic_resolution(d: usize, spacing: f64) -> Result<PolytopeData> {
    if d < 2 {
        return Err(Error::TooFewEdges(d));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "spacing {spacing} must be positive"
        )));
    }
    let normals: Vec<Normal> = (1..=d as i64).map(|k| [k - 1, -(k - 2)]).collect();
    let a: Vec<f64> = (1..d).map(|i| i as f64 * spacing).collect();
    build_polytope(&normals, &a)
}

/// Which family of metrics a parameter selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    /// `ν = 0`.
    Ale,
    /// `Det(ν, ν_1) > 0` and `Det(ν, ν_d) > 0`.
    GeneralizedTaubNut,
}

/// Taub-NUT parameter validated against a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaubNutParameter {
    pub alpha: f64,
    pub beta: f64,
    pub kind: ParameterKind,
}

impl TaubNutParameter {
    pub fn vector(&self) -> [f64; 2] {
        [self.alpha, self.beta]
    }

    pub fn is_ale(&self) -> bool {
        self.kind == ParameterKind::Ale
    }
}

/// Checks `Det(ν, ν_1) > 0` and `Det(ν, ν_d) > 0` unless `ν = 0`.
pub fn validate_parameter(p: &PolytopeData, nu: [f64; 2]) -> Result<TaubNutParameter> {
    if !(nu[0].is_finite() && nu[1].is_finite()) {
        return Err(Error::InvalidInput(format!(
            "parameter ({}, {}) is not finite",
            nu[0], nu[1]
        )));
    }
    if nu == [0.0, 0.0] {
        return Ok(TaubNutParameter {
            alpha: 0.0,
            beta: 0.0,
            kind: ParameterKind::Ale,
        });
    }
    let d = p.edges();
    let first = p.normal_f64(0);
    let last = p.normal_f64(d - 1);
    let det_first = nu[0] * first[1] - nu[1] * first[0];
    if det_first <= 0.0 {
        return Err(Error::NotAdmissible {
            which: "Det(nu, nu_1)".into(),
            value: det_first,
        });
    }
    let det_last = nu[0] * last[1] - nu[1] * last[0];
    if det_last <= 0.0 {
        return Err(Error::NotAdmissible {
            which: "Det(nu, nu_d)".into(),
            value: det_last,
        });
    }
    Ok(TaubNutParameter {
        alpha: nu[0],
        beta: nu[1],
        kind: ParameterKind::GeneralizedTaubNut,
    })
}
