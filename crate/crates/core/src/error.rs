//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible scalars: dimension {0} vs {1}")]
    ScalarDimMismatch(usize, usize),

    #[error("unsupported scalar dimension {0} (must be 1, 2, 4 or 8)")]
    BadScalarDim(usize),

    #[error("unsupported rank: {family} requires n = {expected}, got {got}")]
    UnsupportedRank {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid algebra parameter: {0}")]
    BadAlgebra(String),

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("coordinate vector has length {got}, algebra dimension is {want}")]
    BadCoordinateLength { got: usize, want: usize },

    #[error("point is not interior to the cone (margin {0:.3e})")]
    NotInterior(f64),

    #[error("chart directions are not linearly independent (Gram determinant {0:.3e})")]
    DegenerateChart(f64),

    #[error("ill-conditioned chart: condition number {0:.3e} exceeds limit")]
    IllConditioned(f64),

    #[error("evaluation left the cone interior")]
    LeftInterior,

    #[error("metric is singular and cannot be inverted")]
    SingularMetric,

    #[error("derivative order {0} unsupported (must be 1..=4)")]
    BadOrder(usize),

    #[error("closed-form log-det oracle not available for {0}")]
    UnsupportedOracle(String),

    #[error("Lie bracket not realized for the octonionic family")]
    UnsupportedBracket,

    #[error("Monte Carlo integral supported only for ambient dimension <= 3, got {0}")]
    UnsupportedMcDimension(usize),

    #[error("parameter vector has length {got}, flat dimension is {want}")]
    BadFlatParams { got: usize, want: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
