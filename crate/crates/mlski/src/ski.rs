//! Sparse kernel interpolation: fits the anisotropic sub-grid problems of a
//! level and evaluates their linear combination.
//!
//! For level `n` in `d` dimensions, every multi-index with `l_j >= 1` and
//! `|l|_1 = n + (d-1) - q` (for `q = 0..d-1`) yields one anisotropic kernel
//! interpolation problem on its tensor grid, scaled by
//! `diag(2^{l_1}, ..., 2^{l_d})`. The sub-grid interpolants enter the total
//! with coefficient `(-1)^q * C(d-1, q)`.
//!
//! All sub-grid problems interpolate the *same* underlying data, pulled from
//! a unified node-to-value map keyed by exact dyadic coordinates. Sub-grid
//! fits are independent and run on the rayon pool; the accumulation order is
//! fixed, so results are bit-identical across thread counts.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grids::{self, MultiIndex, Points};
use crate::kernels::{KernelSpec, ScalingDiagonal};
use crate::solver::{self, FitReport};

/// Fit-time switches shared by all interpolation drivers.
#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions {
    /// Compute the 2-norm condition number of every kernel matrix. Off by
    /// default: it dominates the runtime of large fits.
    pub compute_condition: bool,
}

/// Exact node-to-value map keyed by coordinate bit patterns. Sound for grid
/// data because all node coordinates are dyadic rationals.
#[derive(Debug, Clone)]
pub struct NodeValueTable {
    dim: usize,
    map: HashMap<Vec<u64>, f64>,
}

impl NodeValueTable {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            map: HashMap::new(),
        }
    }

    /// Builds a table from parallel point/value lists.
    pub fn from_values(points: &Points, values: &[f64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let mut table = Self::new(points.dim());
        for (p, &v) in points.iter().zip(values) {
            table.insert(p, v);
        }
        Ok(table)
    }

    pub fn insert(&mut self, point: &[f64], value: f64) {
        debug_assert_eq!(point.len(), self.dim);
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        self.map.insert(key, value);
    }

    pub fn get(&self, point: &[f64]) -> Option<f64> {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        self.map.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Data feeding a fit: either a callable target or a node-indexed table
/// covering the grid.
pub enum DataSource<'a> {
    Function(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
    Table(&'a NodeValueTable),
}

impl DataSource<'_> {
    /// Materializes values at the given nodes; a table missing a node is an
    /// incomplete-data error naming that node.
    fn values_at(&self, nodes: &Points) -> Result<Vec<f64>> {
        match self {
            DataSource::Function(f) => Ok(nodes.iter().map(|p| f(p)).collect()),
            DataSource::Table(t) => nodes
                .iter()
                .map(|p| t.get(p).ok_or_else(|| Error::MissingNodeValue(p.to_vec())))
                .collect(),
        }
    }
}

/// One solved anisotropic kernel problem on a tensor sub-grid.
#[derive(Debug, Clone)]
pub struct SubGridInterpolant {
    index: MultiIndex,
    centers: Points,
    coefficients: Vec<f64>,
    scaling: ScalingDiagonal,
    spec: KernelSpec,
    report: FitReport,
}

impl SubGridInterpolant {
    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn centers(&self) -> &Points {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn scaling(&self) -> &ScalingDiagonal {
        &self.scaling
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn report(&self) -> &FitReport {
        &self.report
    }

    /// `S_A(x) = sum_j c_j phi(||A (x - x_j)||)`, summed in center order.
    pub fn eval_point(&self, x: &[f64]) -> f64 {
        let dim = self.centers.dim();
        let a = self.scaling.entries();
        let mut acc = 0.0;
        for (j, center) in self.centers.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..dim {
                let t = a[k] * (x[k] - center[k]);
                s += t * t;
            }
            acc += self.coefficients[j] * self.spec.eval_radial(s.sqrt());
        }
        acc
    }
}

/// The level-`n` sparse kernel interpolant: combination-weighted sub-grid
/// interpolants.
#[derive(Debug, Clone)]
pub struct SparseInterpolant {
    level: u32,
    dim: usize,
    node_count: usize,
    spec: KernelSpec,
    terms: Vec<(f64, SubGridInterpolant)>,
}

impl SparseInterpolant {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct sparse grid nodes carrying the fitted data.
    pub fn data_node_count(&self) -> usize {
        self.node_count
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Combination coefficient / sub-grid pairs in the fixed fitting order.
    pub fn terms(&self) -> &[(f64, SubGridInterpolant)] {
        &self.terms
    }

    /// Largest condition number over the sub-grid systems, if computed.
    pub fn max_condition(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|(_, s)| s.report().condition_2norm)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// Largest node residual over the sub-grid solves.
    pub fn max_residual_inf(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, s)| s.report().solve_residual_inf)
            .fold(0.0, f64::max)
    }

    /// Whether any sub-grid solve needed the diagonal-shift fallback.
    pub fn any_diagonal_shifted(&self) -> bool {
        self.terms.iter().any(|(_, s)| s.report().diagonal_shifted)
    }

    /// Total fit wall time over all sub-grid problems, in seconds.
    pub fn total_fit_time(&self) -> f64 {
        self.terms.iter().map(|(_, s)| s.report().wall_time).sum()
    }

    pub fn eval_point(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(coeff, s)| coeff * s.eval_point(x))
            .sum()
    }
}

pub(crate) fn check_fit_dimension(spec: &KernelSpec, d: usize) -> Result<()> {
    if d < 1 || d > 4 {
        return Err(Error::UnsupportedDimension(d));
    }
    if d > spec.family().max_positive_definite_dim() {
        return Err(Error::KernelNotPositiveDefinite {
            family: spec.family().name(),
            dim: d,
        });
    }
    Ok(())
}

fn fit_sub_grid(
    index: &MultiIndex,
    table: &NodeValueTable,
    spec: KernelSpec,
    opts: FitOptions,
) -> Result<SubGridInterpolant> {
    let started = Instant::now();
    let centers = grids::tensor_grid(index)?.into_points();
    let rhs = DataSource::Table(table).values_at(&centers)?;
    let scaling = ScalingDiagonal::from_levels(index);
    let matrix = solver::assemble(&centers, &spec, &scaling)?;
    let solution = solver::factor_solve(&matrix, &rhs).map_err(|e| e.with_sub_grid(index))?;
    let condition_2norm = opts
        .compute_condition
        .then(|| solver::condition_2norm(&matrix));
    let report = FitReport {
        condition_2norm,
        solve_residual_inf: solution.residual_inf,
        wall_time: started.elapsed().as_secs_f64(),
        diagonal_shifted: solution.diagonal_shifted,
    };
    Ok(SubGridInterpolant {
        index: index.clone(),
        centers,
        coefficients: solution.coefficients,
        scaling,
        spec,
        report,
    })
}

/// Fits the level-`n` sparse kernel interpolant in `d` dimensions.
///
/// Every sub-grid problem of the combination formula (all `q` levels, not
/// only the finest) interpolates the same data. When `data` is a callable it
/// is evaluated once per sparse-grid node; sub-grids then read from the
/// resulting node table, so shared nodes see identical values. Sub-grid fits
/// run in parallel.
pub fn ski_fit(
    n: u32,
    d: usize,
    data: &DataSource<'_>,
    spec: KernelSpec,
    opts: FitOptions,
) -> Result<SparseInterpolant> {
    check_fit_dimension(&spec, d)?;
    if n < 1 {
        return Err(Error::InvalidLevel { min: 1, got: n });
    }

    let nodes = grids::sparse_grid(n, d)?.into_points();
    let owned_table;
    let table: &NodeValueTable = match data {
        DataSource::Function(_) => {
            let values = data.values_at(&nodes)?;
            owned_table = NodeValueTable::from_values(&nodes, &values)?;
            &owned_table
        }
        DataSource::Table(t) => {
            if t.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: t.dim(),
                });
            }
            t
        }
    };

    let jobs: Vec<(f64, MultiIndex)> = grids::combination_index_sets(n, d)
        .into_iter()
        .flat_map(|term| {
            let coefficient = term.coefficient as f64;
            term.indices
                .into_iter()
                .map(move |index| (coefficient, index))
        })
        .collect();

    let terms: Vec<(f64, SubGridInterpolant)> = jobs
        .into_par_iter()
        .map(|(coeff, index)| fit_sub_grid(&index, table, spec, opts).map(|s| (coeff, s)))
        .collect::<Result<_>>()?;

    Ok(SparseInterpolant {
        level: n,
        dim: d,
        node_count: nodes.len(),
        spec,
        terms,
    })
}

/// Evaluates a sparse interpolant at many points, in parallel over the
/// points with a fixed per-point accumulation order.
pub fn ski_eval(interp: &SparseInterpolant, points: &Points) -> Result<Vec<f64>> {
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
