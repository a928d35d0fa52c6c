//! Adaptive Gauss–Kronrod quadrature on the real line and Richardson
//! extrapolation of one-sided limits.
//!
//! [`integrate_line`] cuts `ℝ` at the given breakpoints into open segments
//! that are integrated independently, so the integrand is allowed to jump
//! across a breakpoint and is never sampled on one. The two unbounded
//! segments are mapped onto `(0, 1]` with `H = c ∓ (1 − t)/t`, which turns
//! an `O(1/H²)` tail into a bounded integrand.
//!
//! Refinement is global: the panel with the largest error estimate is
//! bisected until the summed estimate drops below the tolerance. Ties are
//! broken by creation order and the final sum runs over panels sorted by
//! position, so results are bit-for-bit reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Bisection stops with [`Error::QuadratureFailure`] beyond this many panels.
pub const PANEL_BUDGET: usize = 10_000;

// Kronrod abscissae, descending; odd entries and the centre are Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum of `|K15 − G7|` over the final panels.
    pub abs_error_estimate: f64,
    pub panels: usize,
    /// Contribution of each segment between consecutive breakpoints, left
    /// to right. The two tails are the first and last entries.
    pub segment_values: Vec<f64>,
}

/// Direction of approach for [`one_sided_limit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Identity,
    /// `H = c − (1 − t)/t`, covering `(−∞, c]`.
    LeftTail(f64),
    /// `H = c + (1 − t)/t`, covering `[c, ∞)`.
    RightTail(f64),
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    map: Map,
}

impl Segment {
    fn sample<F: FnMut(f64) -> f64>(&self, f: &mut F, x: f64) -> Result<f64> {
        let (at, y) = match self.map {
            Map::Identity => (x, f(x)),
            Map::LeftTail(c) => {
                let h = c - (1.0 - x) / x;
                (h, f(h) / (x * x))
            }
            Map::RightTail(c) => {
                let h = c + (1.0 - x) / x;
                (h, f(h) / (x * x))
            }
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteSample { at, value: y })
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    segment: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    id: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Max-heap: largest error first, then the older panel.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, seg: &Segment, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = seg.sample(f, centre)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = seg.sample(f, centre - dx)? + seg.sample(f, centre + dx)?;
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Ok((k * half, ((k - g) * half).abs()))
}

fn integrate_segments<F: FnMut(f64) -> f64>(
    mut f: F,
    segments: &[Segment],
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let mut heap = BinaryHeap::new();
    // Panels too narrow to bisect further; their error still counts.
    let mut frozen = Vec::new();
    let mut next_id = 0u64;
    let mut total_error = 0.0;
    for (s, seg) in segments.iter().enumerate() {
        let (value, error) = kronrod(&mut f, seg, seg.lo, seg.hi)?;
        total_error += error;
        heap.push(Panel {
            segment: s,
            lo: seg.lo,
            hi: seg.hi,
            value,
            error,
            id: next_id,
        });
        next_id += 1;
    }

    while total_error > tol && heap.len() + frozen.len() < PANEL_BUDGET {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            frozen.push(worst);
            continue;
        }
        let seg = &segments[worst.segment];
        total_error -= worst.error;
        for (lo, hi) in [(worst.lo, mid), (mid, worst.hi)] {
            let (value, error) = kronrod(&mut f, seg, lo, hi)?;
            total_error += error;
            heap.push(Panel {
                segment: worst.segment,
                lo,
                hi,
                value,
                error,
                id: next_id,
            });
            next_id += 1;
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|a, b| a.segment.cmp(&b.segment).then(a.lo.total_cmp(&b.lo)));
    let mut segment_values = vec![0.0; segments.len()];
    let mut value = 0.0;
    let mut error = 0.0;
    for p in &panels {
        segment_values[p.segment] += p.value;
        value += p.value;
        error += p.error;
    }
    if !(error <= tol) {
        return Err(Error::QuadratureFailure {
            estimate: error,
            tol,
            panels: panels.len(),
        });
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        panels: panels.len(),
        segment_values,
    })
}

/// `∫_ℝ f(H) dH` for `f` smooth between the sorted `breakpoints` and
/// `O(1/H²)` at both ends.
pub fn integrate_line<F: FnMut(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "breakpoints must be finite and strictly increasing".into(),
        ));
    }
    let cuts: Vec<f64> = if breakpoints.is_empty() {
        vec![0.0]
    } else {
        breakpoints.to_vec()
    };
    let first = cuts[0];
    let last = cuts[cuts.len() - 1];
    let mut segments = vec![
        Segment {
            lo: 0.0,
            hi: 1.0,
            map: Map::LeftTail(first - 1.0),
        },
        Segment {
            lo: first - 1.0,
            hi: first,
            map: Map::Identity,
        },
    ];
    for w in cuts.windows(2) {
        segments.push(Segment {
            lo: w[0],
            hi: w[1],
            map: Map::Identity,
        });
    }
    segments.push(Segment {
        lo: last,
        hi: last + 1.0,
        map: Map::Identity,
    });
    segments.push(Segment {
        lo: 0.0,
        hi: 1.0,
        map: Map::RightTail(last + 1.0),
    });
    let mut out = integrate_segments(f, &segments, tol)?;
    // Report one value per interval between breakpoints.
    let n = out.segment_values.len();
    let sv = &out.segment_values;
    let mut merged = vec![sv[0] + sv[1]];
    merged.extend_from_slice(&sv[2..n - 2]);
    merged.push(sv[n - 2] + sv[n - 1]);
    if breakpoints.is_empty() {
        merged = vec![merged.iter().sum()];
    }
    out.segment_values = merged;
    Ok(out)
}

/// `∫_lo^hi f(x) dx` over a finite interval. The endpoints are never sampled.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
    }
    integrate_segments(
        f,
        &[Segment {
            lo,
            hi,
            map: Map::Identity,
        }],
        tol,
    )
}

/// An extrapolated value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
}

/// Richardson extrapolation of `samples[k] ≈ L + c₁ h_k + c₂ h_k² + …` with
/// `h_k = h₀·2^{−k}`. Returns the tableau entry with the smallest error
/// estimate.
pub fn richardson_extrapolate(samples: &[f64]) -> Result<Extrapolation> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample {
            at: f64::NAN,
            value: bad,
        });
    }
    let n = samples.len();
    let mut prev: Vec<f64> = vec![samples[0]];
    let mut best = Extrapolation {
        value: samples[n - 1],
        error: f64::INFINITY,
    };
    for (k, &s) in samples.iter().enumerate().skip(1) {
        let mut row = vec![s];
        let mut factor = 1.0;
        for j in 1..=k {
            factor *= 2.0;
            let t = row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0);
            let error = (t - row[j - 1]).abs().max((t - prev[j - 1]).abs());
            if error < best.error {
                best = Extrapolation { value: t, error };
            }
            row.push(t);
        }
        prev = row;
    }
    Ok(best)
}

/// Offsets used by [`one_sided_limit`]: `1e-2 · 2^{−k}`, `k = 0..=10`.
pub fn limit_offsets() -> [f64; 11] {
    std::array::from_fn(|k| 1e-2 * 0.5f64.powi(k as i32))
}

/// Accepted extrapolation error, relative to `max(1, |limit|)`.
pub const LIMIT_TOLERANCE: f64 = 1e-7;

fn accept(e: Extrapolation) -> Result<f64> {
    if e.error <= LIMIT_TOLERANCE * e.value.abs().max(1.0) {
        Ok(e.value)
    } else {
        Err(Error::NoConvergence(e.error))
    }
}

/// `lim f(x)` as `x → point` from `side`, for `f` analytic on that side up
/// to `point`.
pub fn one_sided_limit<F: FnMut(f64) -> f64>(mut f: F, point: f64, side: Side) -> Result<f64> {
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let mut samples = Vec::with_capacity(11);
    for eps in limit_offsets() {
        let x = point + sign * eps;
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteSample { at: x, value: y });
        }
        samples.push(y);
    }
    accept(richardson_extrapolate(&samples)?)
}

/// `lim f(H)` as `H → +∞` (`Side::Right`) or `−∞` (`Side::Left`), for `f`
/// analytic in `1/H` there. Extrapolates in `t = 1/|H|` over the same
/// offsets as [`one_sided_limit`].
pub fn limit_at_infinity<F: FnMut(f64) -> f64>(mut f: F, side: Side) -> Result<f64> {
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    one_sided_limit(|t| f(sign / t), 0.0, Side::Right)
}
