//! Dense symmetric linear algebra for kernel systems: assembly,
//! positive-definite factorization, solve, and 2-norm condition numbers.
//!
//! Storage is dense throughout; compactly supported kernels get no sparse
//! treatment. Each routine is single-threaded and reentrant, so independent
//! sub-grid problems can run concurrently.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grids::Points;
use crate::kernels::{KernelSpec, ScalingDiagonal};

/// Order above which the condition number switches from a full symmetric
/// eigendecomposition to power/inverse iteration.
const DENSE_EIGEN_MAX_ORDER: usize = 1024;
/// Relative tolerance and iteration cap of the power/inverse iterations.
const ITER_TOL: f64 = 1e-6;
const ITER_MAX: usize = 500;
/// Relative diagonal shift applied once when the factorization breaks down.
const BREAKDOWN_SHIFT: f64 = 1e-12;

/// Dense symmetric kernel matrix with entries `phi(||A (x_i - x_j)||)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    order: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    /// Wraps a row-major buffer; it must be square and exactly symmetric.
    pub fn from_parts(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 || data.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                got: data.len(),
            });
        }
        for i in 0..order {
            for j in (i + 1)..order {
                if data[i * order + j].to_bits() != data[j * order + i].to_bits() {
                    return Err(Error::EmptyInput("matrix is not symmetric"));
                }
            }
        }
        Ok(Self { order, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.entry(i, i)).sum()
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let n = self.order;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut s = 0.0;
            for j in 0..n {
                s += row[j] * x[j];
            }
            out[i] = s;
        }
    }
}

/// Diagnostics of one solved kernel system.
#[derive(Debug, Clone)]
pub struct FitReport {
    /// Largest over smallest eigenvalue of the kernel matrix; computed only
    /// on demand, `None` otherwise.
    pub condition_2norm: Option<f64>,
    /// `max_i |(Phi c - y)_i|` against the unshifted matrix.
    pub solve_residual_inf: f64,
    /// Wall time of assembly + factorization + solve, in seconds.
    pub wall_time: f64,
    /// Whether the factorization needed the diagonal-shift fallback.
    pub diagonal_shifted: bool,
}

/// Result of [`factor_solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    pub residual_inf: f64,
    pub diagonal_shifted: bool,
}

/// Assembles the kernel matrix for a center set. Only the upper triangle is
/// computed; the lower triangle mirrors it, so the result is exactly
/// symmetric. Duplicate centers are rejected before any factorization.
pub fn assemble(
    centers: &Points,
    spec: &KernelSpec,
    scaling: &ScalingDiagonal,
) -> Result<KernelMatrix> {
    let n = centers.len();
    if n == 0 {
        return Err(Error::EmptyInput("no centers"));
    }
    if centers.dim() != scaling.dim() {
        return Err(Error::DimensionMismatch {
            expected: scaling.dim(),
            got: centers.dim(),
        });
    }
    let mut data = vec![0.0f64; n * n];
    let phi0 = spec.family().phi_zero();
    for i in 0..n {
        data[i * n + i] = phi0;
        let pi = centers.point(i);
        for j in (i + 1)..n {
            let r = scaling.scaled_distance(pi, centers.point(j));
            if r == 0.0 {
                return Err(Error::DuplicatePoints);
            }
            let v = spec.eval_radial(r);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    Ok(KernelMatrix { order: n, data })
}

/// In-place lower Cholesky factorization of a row-major buffer.
/// Returns `Err(j)` on a non-positive (or non-finite) pivot at column `j`.
fn cholesky_in_place(a: &mut [f64], n: usize) -> std::result::Result<(), usize> {
    for i in 0..n {
        let (head, tail) = a.split_at_mut(i * n);
        let row_i = &mut tail[..n];
        for j in 0..i {
            let row_j = &head[j * n..j * n + j];
            let mut s = 0.0;
            for k in 0..j {
                s += row_i[k] * row_j[k];
            }
            row_i[j] = (row_i[j] - s) / head[j * n + j];
        }
        let mut s = 0.0;
        for k in 0..i {
            s += row_i[k] * row_i[k];
        }
        let d = row_i[i] - s;
        if !(d > 0.0) || !d.is_finite() {
            return Err(i);
        }
        row_i[i] = d.sqrt();
    }
    Ok(())
}

fn forward_solve(l: &[f64], n: usize, rhs: &[f64], out: &mut [f64]) {
    // L z = rhs
    for i in 0..n {
        let mut s = rhs[i];
        let row = &l[i * n..i * n + i];
        for k in 0..i {
            s -= row[k] * out[k];
        }
        out[i] = s / l[i * n + i];
    }
}

/// `L^T c = z` in place, with `lt` the row-major transpose of `l`.
fn back_solve_transposed(lt: &[f64], n: usize, z: &mut [f64]) {
    for i in (0..n).rev() {
        let row = &lt[i * n..(i + 1) * n];
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= row[k] * z[k];
        }
        z[i] = s / row[i];
    }
}

fn forward_back_solve(l: &[f64], n: usize, rhs: &[f64], out: &mut [f64]) {
    forward_solve(l, n, rhs, out);
    // L^T c = z
    for i in (0..n).rev() {
        let mut s = out[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * out[k];
        }
        out[i] = s / l[i * n + i];
    }
}

struct Factor {
    l: Vec<f64>,
    shifted: bool,
}

fn factor(matrix: &KernelMatrix) -> Result<Factor> {
    let n = matrix.order;
    let mut l = matrix.data.clone();
    if cholesky_in_place(&mut l, n).is_ok() {
        return Ok(Factor { l, shifted: false });
    }
    // one retry with a small diagonal shift, flagged in the report
    let shift = BREAKDOWN_SHIFT * matrix.trace() / n as f64;
    l.copy_from_slice(&matrix.data);
    for i in 0..n {
        l[i * n + i] += shift;
    }
    if cholesky_in_place(&mut l, n).is_ok() {
        Ok(Factor { l, shifted: true })
    } else {
        Err(Error::IllConditioned { index: None })
    }
}

/// Solves `Phi c = y` with an unpivoted symmetric positive-definite
/// factorization. On a factorization breakdown the solve is retried once
/// with a diagonal shift of `1e-12 * trace / N` and flagged; a second
/// breakdown is an error.
pub fn factor_solve(matrix: &KernelMatrix, rhs: &[f64]) -> Result<Solution> {
    let n = matrix.order;
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let fac = factor(matrix)?;
    let mut coefficients = vec![0.0f64; n];
    forward_back_solve(&fac.l, n, rhs, &mut coefficients);

    let mut residual = vec![0.0f64; n];
    matrix.matvec(&coefficients, &mut residual);
    let residual_inf = residual
        .iter()
        .zip(rhs)
        .map(|(a, y)| (a - y).abs())
        .fold(0.0f64, f64::max);

    Ok(Solution {
        coefficients,
        residual_inf,
        diagonal_shifted: fac.shifted,
    })
}

/// 2-norm condition number `lambda_max / lambda_min` of the symmetric
/// matrix: full eigendecomposition up to order 1024, power/inverse
/// iteration (relative tolerance 1e-6, at most 500 iterations) above.
///
/// Returns `f64::INFINITY` when the matrix is numerically singular
/// (`lambda_min <= 0` within tolerance, or factorization breakdown).
pub fn condition_2norm(matrix: &KernelMatrix) -> f64 {
    let n = matrix.order;
    if n == 1 {
        return 1.0;
    }
    if n <= DENSE_EIGEN_MAX_ORDER {
        let m = DMatrix::from_row_slice(n, n, &matrix.data);
        let eig = SymmetricEigen::new(m);
        let mut lambda_max = f64::NEG_INFINITY;
        let mut lambda_min = f64::INFINITY;
        for &v in eig.eigenvalues.iter() {
            lambda_max = lambda_max.max(v);
            lambda_min = lambda_min.min(v);
        }
        if lambda_min <= 0.0 || lambda_min <= lambda_max * 1e-16 {
            return f64::INFINITY;
        }
        lambda_max / lambda_min
    } else {
        let lambda_max = power_iteration_max(matrix);
        let Some(lambda_min) = inverse_iteration_min(matrix) else {
            return f64::INFINITY;
        };
        if lambda_min <= 0.0 || lambda_min <= lambda_max * 1e-16 {
            return f64::INFINITY;
        }
        lambda_max / lambda_min
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn power_iteration_max(matrix: &KernelMatrix) -> f64 {
    let n = matrix.order;
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0f64; n];
    let mut lambda = 0.0f64;
    for _ in 0..ITER_MAX {
        matrix.matvec(&v, &mut w);
        // Rayleigh quotient with a unit v
        let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
        if (next - lambda).abs() <= ITER_TOL * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

fn inverse_iteration_min(matrix: &KernelMatrix) -> Option<f64> {
    let n = matrix.order;
    let mut l = matrix.data.clone();
    if cholesky_in_place(&mut l, n).is_err() {
        return None;
    }
    // transposed factor keeps the backward substitution row-contiguous,
    // which dominates the iteration cost at these orders
    let mut lt = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            lt[j * n + i] = l[i * n + j];
        }
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0f64; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..ITER_MAX {
        forward_solve(&l, n, &v, &mut w);
        back_solve_transposed(&lt, n, &mut w);
        let norm = normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
        // w = Phi^{-1} v had norm `norm`, so the smallest eigenvalue of Phi
        // is approached by 1 / norm
        let next = 1.0 / norm;
        if (next - lambda).abs() <= ITER_TOL * next.abs() {
            return Some(next);
        }
        lambda = next;
    }
    Some(lambda)
}
