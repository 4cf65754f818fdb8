//! Multilevel sparse kernel-based interpolation.
//!
//! This crate interpolates functions on `[0,1]^d` (d = 1..4) from structured
//! grid data using radial kernels. Four methods are provided:
//!
//! - **RBF**: classical kernel interpolation on a uniform full grid.
//! - **MLRBF**: the multilevel variant of RBF, interpolating residuals on
//!   progressively finer full grids.
//! - **SKI**: sparse kernel interpolation. The sparse grid of level `n` is a
//!   union of anisotropic tensor-product sub-grids; each sub-grid problem is
//!   solved with a kernel scaled per direction, and the sub-grid interpolants
//!   are linearly combined with alternating binomial coefficients.
//! - **MLSKI**: the multilevel variant of SKI, summing sparse-grid residual
//!   corrections from a coarse level up to the target level.
//!
//! Sub-grid problems within a level are independent and solved in parallel;
//! all evaluation paths are deterministic (bit-identical across thread
//! counts).
//!
//! The [`harness`] module supplies benchmark test functions, error metrics,
//! and an experiment runner emitting per-level records as CSV/JSON/SVG; the
//! `mlski` binary wraps it in a CLI.

pub mod baselines;
pub mod error;
pub mod grids;
pub mod harness;
pub mod kernels;
pub mod mlski;
pub mod ski;
pub mod solver;

pub use error::{Error, Result};
pub use grids::{MultiIndex, Points, SparseGrid, TensorGrid};
pub use kernels::{KernelFamily, KernelSpec, ScalingDiagonal};
pub use solver::{FitReport, KernelMatrix};
