use thiserror::Error;

/// Everything that can go wrong between reading polygon data and writing a
/// report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("TooFewEdges: need at least 2 edges, got {0}")]
    TooFewEdges(usize),

    #[error("AbscissaCountMismatch: {edges} edges need {expected} abscissas, got {found}")]
    AbscissaCountMismatch {
        edges: usize,
        expected: usize,
        found: usize,
    },

    #[error("NonPrimitiveNormal: normal {index} = ({x}, {y}) is not a primitive integer vector")]
    NonPrimitiveNormal { index: usize, x: i64, y: i64 },

    #[error(
        "NonIncreasingAbscissas: a[{index}] = {next} does not exceed a[{prev_index}] = {prev}"
    )]
    NonIncreasingAbscissas {
        prev_index: usize,
        index: usize,
        prev: f64,
        next: f64,
    },

    #[error("ParallelUnboundedEdges: Det(nu_1, nu_d) = 0")]
    ParallelUnboundedEdges,

    #[error("NonConvexOrdering: Det(nu_{index}, nu_{next}) = {det} breaks the common sign")]
    NonConvexOrdering { index: usize, next: usize, det: i64 },

    #[error("NotAdmissible: {which} = {value} must be > 0")]
    NotAdmissible { which: String, value: f64 },

    #[error("SingularPoint: (H, r) = ({h}, {r}) is a singular point of the fields")]
    SingularPoint { h: f64, r: f64 },

    #[error("InvalidPoint: r = {0} must be non-negative and finite")]
    InvalidPoint(f64),

    #[error("NonPositiveV: V = {v} at (H, r) = ({h}, {r})")]
    NonPositiveV { h: f64, r: f64, v: f64 },

    #[error("QuadratureFailure: error estimate {estimate:e} exceeds tolerance {tol:e} after {panels} panels")]
    QuadratureFailure {
        estimate: f64,
        tol: f64,
        panels: usize,
    },

    #[error("NonFiniteSample: integrand returned {value} at {at}")]
    NonFiniteSample { at: f64, value: f64 },

    #[error("NoConvergence: extrapolation did not settle (best error {0:e})")]
    NoConvergence(f64),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Variant name as printed on the first line of CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::TooFewEdges(_) => "TooFewEdges",
            Error::AbscissaCountMismatch { .. } => "AbscissaCountMismatch",
            Error::NonPrimitiveNormal { .. } => "NonPrimitiveNormal",
            Error::NonIncreasingAbscissas { .. } => "NonIncreasingAbscissas",
            Error::ParallelUnboundedEdges => "ParallelUnboundedEdges",
            Error::NonConvexOrdering { .. } => "NonConvexOrdering",
            Error::NotAdmissible { .. } => "NotAdmissible",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::InvalidPoint(_) => "InvalidPoint",
            Error::NonPositiveV { .. } => "NonPositiveV",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::NonFiniteSample { .. } => "NonFiniteSample",
            Error::NoConvergence(_) => "NoConvergence",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
