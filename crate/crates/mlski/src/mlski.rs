//! Multilevel driver: a residual-correction cascade of sparse interpolants
//! from a coarse level up to the target level.
//!
//! The first correction interpolates the data at the coarsest level; each
//! later correction interpolates, on the next sparse grid, the residual of
//! everything fitted so far. The total interpolant is the plain sum of the
//! corrections. Levels are inherently sequential; within a level the
//! sub-grid fits and residual evaluations parallelize.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grids::{self, Points};
use crate::kernels::KernelSpec;
use crate::ski::{self, DataSource, FitOptions, NodeValueTable, SparseInterpolant};

/// Per-level diagnostics of a multilevel fit.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub level: u32,
    /// Number of sparse grid nodes carrying data at this level.
    pub node_count: usize,
    /// Shape parameter used for the level's sub-grid kernels.
    pub shape: f64,
    /// Largest sub-grid condition number, when requested.
    pub max_condition: Option<f64>,
    /// Largest sub-grid node residual of this level's solves.
    pub max_residual_inf: f64,
    /// Whether any sub-grid solve needed the diagonal-shift fallback.
    pub diagonal_shifted: bool,
    /// Wall time of residual computation plus fitting, in seconds.
    pub fit_time: f64,
}

/// Ordered residual corrections whose sum is the multilevel interpolant.
#[derive(Debug, Clone)]
pub struct MultilevelInterpolant {
    n0: u32,
    dim: usize,
    corrections: Vec<SparseInterpolant>,
    reports: Vec<LevelReport>,
}

impl MultilevelInterpolant {
    /// Coarsest level of the cascade.
    pub fn coarsest_level(&self) -> u32 {
        self.n0
    }

    /// Finest level of the cascade.
    pub fn finest_level(&self) -> u32 {
        self.n0 + self.corrections.len() as u32 - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Corrections in level order, coarsest first.
    pub fn corrections(&self) -> &[SparseInterpolant] {
        &self.corrections
    }

    pub fn reports(&self) -> &[LevelReport] {
        &self.reports
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.corrections.iter().map(|c| c.eval_point(x)).sum()
    }
}

/// Incremental cascade construction; lets callers record per-level results
/// and survive a failure at one level with all completed levels intact.
pub struct MultilevelBuilder {
    n0: u32,
    dim: usize,
    opts: FitOptions,
    corrections: Vec<SparseInterpolant>,
    reports: Vec<LevelReport>,
}

impl MultilevelBuilder {
    pub fn new(n0: u32, dim: usize, opts: FitOptions) -> Self {
        Self {
            n0,
            dim,
            opts,
            corrections: Vec::new(),
            reports: Vec::new(),
        }
    }

    /// Level the next [`add_level`](Self::add_level) call will fit.
    pub fn next_level(&self) -> u32 {
        self.n0 + self.corrections.len() as u32
    }

    pub fn corrections(&self) -> &[SparseInterpolant] {
        &self.corrections
    }

    pub fn reports(&self) -> &[LevelReport] {
        &self.reports
    }

    /// Fits the next correction: interpolates `f` minus all prior
    /// corrections on the next sparse grid. Timing covers residual
    /// computation and fitting.
    pub fn add_level(
        &mut self,
        f: &(dyn Fn(&[f64]) -> f64 + Sync),
        spec: KernelSpec,
    ) -> Result<&LevelReport> {
        let level = self.next_level();
        let started = Instant::now();

        let nodes = grids::sparse_grid(level, self.dim)?.into_points();
        let residuals = residual_values(f, &self.corrections, &nodes)?;
        let table = NodeValueTable::from_values(&nodes, &residuals)?;
        let delta = ski::ski_fit(level, self.dim, &DataSource::Table(&table), spec, self.opts)?;

        let report = LevelReport {
            level,
            node_count: nodes.len(),
            shape: spec.shape(),
            max_condition: delta.max_condition(),
            max_residual_inf: delta.max_residual_inf(),
            diagonal_shifted: delta.any_diagonal_shifted(),
            fit_time: started.elapsed().as_secs_f64(),
        };
        self.corrections.push(delta);
        self.reports.push(report);
        Ok(self.reports.last().unwrap())
    }

    pub fn finish(self) -> Result<MultilevelInterpolant> {
        if self.corrections.is_empty() {
            return Err(Error::EmptyInput("multilevel fit has no corrections"));
        }
        Ok(MultilevelInterpolant {
            n0: self.n0,
            dim: self.dim,
            corrections: self.corrections,
            reports: self.reports,
        })
    }
}

/// `f(node) - sum_j delta_j(node)` at every node, with the prior corrections
/// evaluated exactly at the nodes.
fn residual_values(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    corrections: &[SparseInterpolant],
    nodes: &Points,
) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = nodes.iter().map(|p| f(p)).collect();
    for correction in corrections {
        let predicted = ski::ski_eval(correction, nodes)?;
        for (v, p) in values.iter_mut().zip(&predicted) {
            *v -= p;
        }
    }
    Ok(values)
}

/// Fits the multilevel sparse kernel interpolant from level `n0` through
/// `n`, with a per-level kernel specification.
pub fn mlski_fit(
    n0: u32,
    n: u32,
    d: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    spec_for_level: &dyn Fn(u32) -> Result<KernelSpec>,
    opts: FitOptions,
) -> Result<MultilevelInterpolant> {
    if n0 < 1 || n0 > n {
        return Err(Error::InvalidLevelRange { min: n0, max: n });
    }
    let mut builder = MultilevelBuilder::new(n0, d, opts);
    for level in n0..=n {
        builder.add_level(f, spec_for_level(level)?)?;
    }
    builder.finish()
}

/// Evaluates the multilevel interpolant at many points: the componentwise
/// sum of the corrections, accumulated in level order.
pub fn mlski_eval(interp: &MultilevelInterpolant, points: &Points) -> Result<Vec<f64>> {
    if points.dim() != interp.dim {
        return Err(Error::DimensionMismatch {
            expected: interp.dim,
            got: points.dim(),
        });
    }
    let mut total = vec![0.0f64; points.len()];
    for correction in &interp.corrections {
        let values = ski::ski_eval(correction, points)?;
        for (t, v) in total.iter_mut().zip(&values) {
            *t += v;
        }
    }
    Ok(total)
}
