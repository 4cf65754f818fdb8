//! Classical full-grid kernel interpolation (RBF) and its multilevel
//! variant (MLRBF), for comparison against the sparse-grid methods.
//!
//! Full-grid fits solve one dense isotropic kernel system on the uniform
//! grid of a level. The dense solve limits feasible problem sizes, so fits
//! are guarded by a configurable center cap (default 20,000).

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grids::{self, Points};
use crate::kernels::{KernelSpec, ScalingDiagonal};
use crate::ski::{check_fit_dimension, FitOptions};
use crate::solver::{self, FitReport};

/// Default upper bound on full-grid centers for a dense solve.
pub const DEFAULT_CENTER_CAP: usize = 20_000;

/// One solved isotropic kernel problem on a uniform full grid.
#[derive(Debug, Clone)]
pub struct FullGridInterpolant {
    level: u32,
    centers: Points,
    coefficients: Vec<f64>,
    spec: KernelSpec,
    report: FitReport,
}

impl FullGridInterpolant {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn report(&self) -> &FitReport {
        &self.report
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        let dim = self.centers.dim();
        let mut acc = 0.0;
        for (j, center) in self.centers.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..dim {
                let t = x[k] - center[k];
                s += t * t;
            }
            acc += self.coefficients[j] * self.spec.eval_radial(s.sqrt());
        }
        acc
    }
}

/// Interpolates `f` on the level-`n` full grid with an isotropic kernel.
pub fn rbf_fit(
    n: u32,
    d: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    spec: KernelSpec,
    center_cap: usize,
    opts: FitOptions,
) -> Result<FullGridInterpolant> {
    check_fit_dimension(&spec, d)?;
    let requested = checked_full_grid_size(n, d);
    if requested > center_cap {
        return Err(Error::CenterCapExceeded {
            requested,
            cap: center_cap,
        });
    }
    let started = Instant::now();
    let centers = grids::full_grid(n, d)?.into_points();
    let rhs: Vec<f64> = centers.iter().map(|p| f(p)).collect();
    let matrix = solver::assemble(&centers, &spec, &ScalingDiagonal::identity(d))?;
    let solution = solver::factor_solve(&matrix, &rhs)?;
    let condition_2norm = opts
        .compute_condition
        .then(|| solver::condition_2norm(&matrix));
    let report = FitReport {
        condition_2norm,
        solve_residual_inf: solution.residual_inf,
        wall_time: started.elapsed().as_secs_f64(),
        diagonal_shifted: solution.diagonal_shifted,
    };
    Ok(FullGridInterpolant {
        level: n,
        centers,
        coefficients: solution.coefficients,
        spec,
        report,
    })
}

fn checked_full_grid_size(n: u32, d: usize) -> usize {
    let per_axis = (1u128 << n.min(63)) + 1;
    let mut total: u128 = 1;
    for _ in 0..d {
        total = total.saturating_mul(per_axis);
    }
    total.min(usize::MAX as u128) as usize
}

/// Evaluates a full-grid interpolant at many points.
pub fn rbf_eval(interp: &FullGridInterpolant, points: &Points) -> Result<Vec<f64>> {
    if points.dim() != interp.centers.dim() {
        return Err(Error::DimensionMismatch {
            expected: interp.centers.dim(),
            got: points.dim(),
        });
    }
    Ok(points
        .flat()
        .par_chunks(points.dim())
        .map(|x| interp.eval_point(x))
        .collect())
}

/// Multilevel full-grid interpolant: residual corrections on progressively
/// finer full grids.
#[derive(Debug, Clone)]
pub struct MultilevelFullGrid {
    n0: u32,
    dim: usize,
    corrections: Vec<FullGridInterpolant>,
}

impl MultilevelFullGrid {
    pub fn coarsest_level(&self) -> u32 {
        self.n0
    }

    pub fn finest_level(&self) -> u32 {
        self.n0 + self.corrections.len() as u32 - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn corrections(&self) -> &[FullGridInterpolant] {
        &self.corrections
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.corrections.iter().map(|c| c.eval_point(x)).sum()
    }
}

/// Incremental MLRBF construction, mirroring the sparse multilevel builder.
pub struct FullGridBuilder {
    n0: u32,
    dim: usize,
    center_cap: usize,
    opts: FitOptions,
    corrections: Vec<FullGridInterpolant>,
    fit_times: Vec<f64>,
}

impl FullGridBuilder {
    pub fn new(n0: u32, dim: usize, center_cap: usize, opts: FitOptions) -> Self {
        Self {
            n0,
            dim,
            center_cap,
            opts,
            corrections: Vec::new(),
            fit_times: Vec::new(),
        }
    }

    pub fn next_level(&self) -> u32 {
        self.n0 + self.corrections.len() as u32
    }

    pub fn corrections(&self) -> &[FullGridInterpolant] {
        &self.corrections
    }

    /// Wall time (residual + fit) of each completed level, in seconds.
    pub fn fit_times(&self) -> &[f64] {
        &self.fit_times
    }

    pub fn add_level(
        &mut self,
        f: &(dyn Fn(&[f64]) -> f64 + Sync),
        spec: KernelSpec,
    ) -> Result<&FullGridInterpolant> {
        let level = self.next_level();
        let started = Instant::now();
        let prior: &[FullGridInterpolant] = &self.corrections;
        let residual = |x: &[f64]| f(x) - prior.iter().map(|c| c.eval_point(x)).sum::<f64>();
        let fitted = rbf_fit(level, self.dim, &residual, spec, self.center_cap, self.opts)?;
        self.corrections.push(fitted);
        self.fit_times.push(started.elapsed().as_secs_f64());
        Ok(self.corrections.last().unwrap())
    }

    pub fn finish(self) -> Result<MultilevelFullGrid> {
        if self.corrections.is_empty() {
            return Err(Error::EmptyInput("multilevel fit has no corrections"));
        }
        Ok(MultilevelFullGrid {
            n0: self.n0,
            dim: self.dim,
            corrections: self.corrections,
        })
    }
}

/// Fits the multilevel full-grid interpolant from level `n0` through `n`.
pub fn mlrbf_fit(
    n0: u32,
    n: u32,
    d: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    spec_for_level: &dyn Fn(u32) -> Result<KernelSpec>,
    center_cap: usize,
    opts: FitOptions,
) -> Result<MultilevelFullGrid> {
    if n0 > n {
        return Err(Error::InvalidLevelRange { min: n0, max: n });
    }
    let mut builder = FullGridBuilder::new(n0, d, center_cap, opts);
    for level in n0..=n {
        builder.add_level(f, spec_for_level(level)?)?;
    }
    builder.finish()
}

/// Evaluates a multilevel full-grid interpolant at many points.
pub fn mlrbf_eval(interp: &MultilevelFullGrid, points: &Points) -> Result<Vec<f64>> {
    if points.dim() != interp.dim {
        return Err(Error::DimensionMismatch {
            expected: interp.dim,
            got: points.dim(),
        });
    }
    Ok(points
        .flat()
        .par_chunks(points.dim())
        .map(|x| interp.eval_point(x))
        .collect())
}
