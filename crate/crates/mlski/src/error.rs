//! Crate-wide error type.

use thiserror::Error;

use crate::grids::MultiIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape parameter must be positive and finite, got {0}")]
    InvalidShape(f64),

    #[error("radial kernels are defined for r >= 0, got r = {0}")]
    NegativeRadius(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} is not supported (supported: 1..=4)")]
    UnsupportedDimension(usize),

    #[error("{family} kernel is not positive definite in dimension {dim}")]
    KernelNotPositiveDefinite { family: &'static str, dim: usize },

    #[error("level must be at least {min}, got {got}")]
    InvalidLevel { min: u32, got: u32 },

    #[error("level range is empty or inverted: {min}..={max}")]
    InvalidLevelRange { min: u32, max: u32 },

    #[error("grid of {0} points exceeds the supported capacity")]
    Capacity(u128),

    #[error("full grid with {requested} centers exceeds the solver cap of {cap}")]
    CenterCapExceeded { requested: usize, cap: usize },

    #[error("need at least two distinct points, got {0}")]
    TooFewPoints(usize),

    #[error("degenerate data: duplicate points")]
    DuplicatePoints,

    #[error("no data value for grid node {0:?}")]
    MissingNodeValue(Vec<f64>),

    #[error("kernel system is numerically singular{}", sub_grid_suffix(.index))]
    IllConditioned { index: Option<MultiIndex> },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn sub_grid_suffix(index: &Option<MultiIndex>) -> String {
    match index {
        Some(l) => format!(" on sub-grid {l}"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches the multi-index of the sub-grid problem that produced a
    /// solver error, for diagnostics.
    pub(crate) fn with_sub_grid(self, index: &MultiIndex) -> Self {
        match self {
            Error::IllConditioned { index: None } => Error::IllConditioned {
                index: Some(index.clone()),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
