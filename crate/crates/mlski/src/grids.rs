//! Grid construction: multi-index enumeration, tensor-product sub-grids,
//! sparse grid assembly, combination coefficients, and Halton evaluation
//! points.
//!
//! All grids live on the unit cube `[0,1]^d`. A multi-index `l` describes a
//! tensor grid with per-axis spacing `2^-l_j`; the sparse grid of level `n`
//! is the union of the tensor grids with `|l|_1 = n + (d-1)` and `l_j >= 1`.
//! Every coordinate is a dyadic rational `i * 2^-l`, exactly representable in
//! binary floating point, so grids are deduplicated by exact comparison.

use crate::error::{Error, Result};

/// Largest number of points a single grid may hold.
const MAX_GRID_POINTS: u128 = 1 << 26;

/// Prime bases backing [`halton_points`], one per supported dimension.
const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

/// A flat, row-major list of `d`-dimensional points.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, count: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * count),
        }
    }

    /// Wraps a flat coordinate buffer; its length must be a multiple of `dim`.
    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.dim);
        self.data.extend_from_slice(point);
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.data
    }

    /// Sorts points lexicographically by coordinates and removes exact
    /// duplicates. Sound here because all grid coordinates are dyadic.
    fn sort_dedup(&mut self) {
        let dim = self.dim;
        let mut index: Vec<usize> = (0..self.len()).collect();
        index.sort_unstable_by(|&a, &b| {
            let pa = &self.data[a * dim..(a + 1) * dim];
            let pb = &self.data[b * dim..(b + 1) * dim];
            pa.iter()
                .zip(pb)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut out = Vec::with_capacity(self.data.len());
        let mut last: Option<usize> = None;
        for &i in &index {
            let p = &self.data[i * dim..(i + 1) * dim];
            if let Some(j) = last {
                if self.data[j * dim..(j + 1) * dim] == *p {
                    continue;
                }
            }
            out.extend_from_slice(p);
            last = Some(i);
        }
        self.data = out;
    }
}

/// Level vector `l` with one entry per dimension; component `l_j` gives the
/// per-axis spacing `2^-l_j` of the associated tensor grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    levels: Vec<u32>,
}

impl MultiIndex {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// `|l|_1`, the sum of the components.
    pub fn l1_norm(&self) -> u32 {
        self.levels.iter().sum()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A tensor-product grid on `[0,1]^d` with per-axis spacing `2^-l_j`.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    index: MultiIndex,
    points: Points,
}

impl TensorGrid {
    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn into_points(self) -> Points {
        self.points
    }
}

/// The sparse grid of level `n` in `d` dimensions: the deduplicated union of
/// the tensor grids with `|l|_1 = n + (d-1)`, sorted lexicographically.
#[derive(Debug, Clone)]
pub struct SparseGrid {
    level: u32,
    dim: usize,
    points: Points,
}

impl SparseGrid {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn into_points(self) -> Points {
        self.points
    }
}

/// One term of the combination formula: sign/binomial coefficient and the
/// multi-indices of the sub-grids it covers.
#[derive(Debug, Clone)]
pub struct CombinationTerm {
    pub q: u32,
    pub coefficient: i64,
    pub indices: Vec<MultiIndex>,
}

/// Builds the tensor grid for a multi-index. Points are ordered
/// lexicographically by index tuple (first axis slowest).
pub fn tensor_grid(index: &MultiIndex) -> Result<TensorGrid> {
    let d = index.dim();
    let mut count: u128 = 1;
    for &l in index.levels() {
        if l >= 48 {
            return Err(Error::Capacity(u128::MAX));
        }
        count *= (1u128 << l) + 1;
        if count > MAX_GRID_POINTS {
            return Err(Error::Capacity(count));
        }
    }

    let axes: Vec<Vec<f64>> = index
        .levels()
        .iter()
        .map(|&l| {
            let h = 0.5f64.powi(l as i32);
            (0..=(1u64 << l)).map(|i| i as f64 * h).collect()
        })
        .collect();

    let mut points = Points::with_capacity(d, count as usize);
    let mut digits = vec![0usize; d];
    let mut coords = vec![0.0f64; d];
    'outer: loop {
        for j in 0..d {
            coords[j] = axes[j][digits[j]];
        }
        points.push(&coords);
        // odometer with the last axis fastest
        for j in (0..d).rev() {
            digits[j] += 1;
            if digits[j] < axes[j].len() {
                continue 'outer;
            }
            digits[j] = 0;
        }
        break;
    }

    Ok(TensorGrid {
        index: index.clone(),
        points,
    })
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// All multi-indices with `l_j >= 1` and `|l|_1 = total`, in lexicographic
/// order.
fn compositions(total: u32, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if d == 0 || (total as usize) < d {
        return out;
    }
    let mut current = vec![1u32; d];
    fn rec(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        let d = current.len();
        if pos == d - 1 {
            current[pos] = remaining;
            out.push(MultiIndex {
                levels: current.clone(),
            });
            return;
        }
        let slots_after = (d - pos - 1) as u32;
        for v in 1..=(remaining - slots_after) {
            current[pos] = v;
            rec(current, pos + 1, remaining - v, out);
        }
    }
    rec(&mut current, 0, total, &mut out);
    out
}

/// The index sets of the combination formula at level `n`: for each
/// `q = 0..d-1`, the coefficient `(-1)^q * C(d-1, q)` together with every
/// multi-index satisfying `l_j >= 1` and `|l|_1 = n + (d-1) - q`. Inner
/// lists may be empty when the target sum is below `d`.
pub fn combination_index_sets(n: u32, d: usize) -> Vec<CombinationTerm> {
    assert!(n >= 1, "combination_index_sets requires level >= 1");
    assert!(d >= 1, "combination_index_sets requires dimension >= 1");
    (0..d as u32)
        .map(|q| {
            let sign = if q % 2 == 0 { 1 } else { -1 };
            let coefficient = sign * binomial(d as u32 - 1, q);
            let total = n + (d as u32 - 1) - q;
            CombinationTerm {
                q,
                coefficient,
                indices: compositions(total, d),
            }
        })
        .collect()
}

/// Builds the sparse grid of level `n` in `d` dimensions.
pub fn sparse_grid(n: u32, d: usize) -> Result<SparseGrid> {
    if n < 1 {
        return Err(Error::InvalidLevel { min: 1, got: n });
    }
    if d < 1 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut points = Points::new(d);
    for index in compositions(n + (d as u32 - 1), d) {
        let grid = tensor_grid(&index)?;
        points.data.extend_from_slice(grid.points.flat());
        if (points.data.len() / d) as u128 > 4 * MAX_GRID_POINTS {
            return Err(Error::Capacity((points.data.len() / d) as u128));
        }
    }
    points.sort_dedup();
    Ok(SparseGrid {
        level: n,
        dim: d,
        points,
    })
}

/// Builds the uniform full grid of level `n`: `(2^n + 1)^d` points.
pub fn full_grid(n: u32, d: usize) -> Result<TensorGrid> {
    if d < 1 {
        return Err(Error::UnsupportedDimension(d));
    }
    tensor_grid(&MultiIndex::new(vec![n; d])?)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f *= inv;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The first `count` Halton points in `[0,1)^d`, using prime bases 2, 3, 5, 7
/// and starting at index 1 (the all-zeros point at index 0 is skipped).
/// Deterministic and prefix-stable.
pub fn halton_points(count: usize, d: usize) -> Result<Points> {
    if d < 1 || d > HALTON_BASES.len() {
        return Err(Error::UnsupportedDimension(d));
    }
    if count < 1 {
        return Err(Error::EmptyInput("halton point count must be >= 1"));
    }
    let mut points = Points::with_capacity(d, count);
    let mut coords = vec![0.0f64; d];
    for i in 1..=count as u64 {
        for (j, &base) in HALTON_BASES[..d].iter().enumerate() {
            coords[j] = radical_inverse(i, base);
        }
        points.push(&coords);
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn idx(levels: &[u32]) -> MultiIndex {
        MultiIndex::new(levels.to_vec()).unwrap()
    }

    #[test]
    fn tensor_grid_counts() {
        assert_eq!(tensor_grid(&idx(&[1, 1])).unwrap().count(), 9);
        assert_eq!(tensor_grid(&idx(&[4, 1])).unwrap().count(), 51);
        assert_eq!(tensor_grid(&idx(&[1, 1, 1])).unwrap().count(), 27);
    }

    #[test]
    fn tensor_grid_points_are_lexicographic_and_dyadic() {
        let g = tensor_grid(&idx(&[1, 2])).unwrap();
        let pts: Vec<&[f64]> = g.points().iter().collect();
        assert_eq!(pts[0], &[0.0, 0.0]);
        assert_eq!(pts[1], &[0.0, 0.25]);
        assert_eq!(pts[4], &[0.0, 1.0]);
        assert_eq!(pts[5], &[0.5, 0.0]);
        assert_eq!(pts.last().unwrap(), &&[1.0, 1.0][..]);
    }

    #[test]
    fn tensor_grid_accepts_level_zero_axis() {
        let g = tensor_grid(&idx(&[0, 1])).unwrap();
        assert_eq!(g.count(), 6);
        assert_eq!(g.points().point(0), &[0.0, 0.0]);
    }

    #[test]
    fn tensor_grid_capacity_error() {
        assert!(matches!(
            tensor_grid(&idx(&[40, 40])),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn combination_sets_match_level4_2d() {
        let terms = combination_index_sets(4, 2);
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].coefficient, 1);
        assert_eq!(
            terms[0].indices,
            vec![idx(&[1, 4]), idx(&[2, 3]), idx(&[3, 2]), idx(&[4, 1])]
        );
        assert_eq!(terms[1].coefficient, -1);
        assert_eq!(
            terms[1].indices,
            vec![idx(&[1, 3]), idx(&[2, 2]), idx(&[3, 1])]
        );
    }

    #[test]
    fn combination_sets_collapse_in_1d() {
        let terms = combination_index_sets(3, 1);
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].coefficient, 1);
        assert_eq!(terms[0].indices, vec![idx(&[3])]);
    }

    #[test]
    fn combination_sets_level1_3d_has_empty_tails() {
        let terms = combination_index_sets(1, 3);
        assert_eq!(terms[0].coefficient, 1);
        assert_eq!(terms[0].indices, vec![idx(&[1, 1, 1])]);
        assert_eq!(terms[1].coefficient, -2);
        assert!(terms[1].indices.is_empty());
        assert_eq!(terms[2].coefficient, 1);
        assert!(terms[2].indices.is_empty());
    }

    #[test]
    fn sparse_grid_counts_small() {
        assert_eq!(sparse_grid(1, 2).unwrap().count(), 9);
        assert_eq!(sparse_grid(4, 2).unwrap().count(), 113);
        assert_eq!(sparse_grid(4, 3).unwrap().count(), 593);
        assert_eq!(sparse_grid(2, 4).unwrap().count(), 297);
    }

    #[test]
    fn sparse_grid_union_is_exact() {
        // every sparse grid point lies in at least one q=0 tensor grid and
        // vice versa
        let sg = sparse_grid(3, 2).unwrap();
        let mut union: HashSet<(u64, u64)> = HashSet::new();
        for index in compositions(4, 2) {
            for p in tensor_grid(&index).unwrap().points().iter() {
                union.insert((p[0].to_bits(), p[1].to_bits()));
            }
        }
        assert_eq!(union.len(), sg.count());
        for p in sg.points().iter() {
            assert!(union.contains(&(p[0].to_bits(), p[1].to_bits())));
        }
    }

    #[test]
    fn sparse_grid_points_sorted_without_duplicates() {
        let sg = sparse_grid(3, 2).unwrap();
        let pts: Vec<&[f64]> = sg.points().iter().collect();
        for w in pts.windows(2) {
            assert!(w[0] < w[1], "points must be strictly increasing");
        }
    }

    #[test]
    fn full_grid_counts() {
        assert_eq!(full_grid(1, 2).unwrap().count(), 9);
        assert_eq!(full_grid(3, 2).unwrap().count(), 81);
        assert_eq!(full_grid(2, 3).unwrap().count(), 125);
        assert_eq!(full_grid(0, 3).unwrap().count(), 8);
    }

    #[test]
    fn halton_1d_prefix() {
        let pts = halton_points(3, 1).unwrap();
        assert_eq!(pts.flat(), &[0.5, 0.25, 0.75]);
    }

    #[test]
    fn halton_2d_prefix() {
        let pts = halton_points(2, 2).unwrap();
        assert_eq!(pts.point(0), &[0.5, 1.0 / 3.0]);
        assert_eq!(pts.point(1), &[0.25, 2.0 / 3.0]);
    }

    #[test]
    fn halton_is_prefix_stable_and_distinct() {
        let short = halton_points(100, 3).unwrap();
        let long = halton_points(1000, 3).unwrap();
        assert_eq!(short.flat(), &long.flat()[..300]);

        let big = halton_points(25_600, 2).unwrap();
        let distinct: HashSet<(u64, u64)> = big
            .iter()
            .map(|p| (p[0].to_bits(), p[1].to_bits()))
            .collect();
        assert_eq!(distinct.len(), 25_600);
        assert!(big.iter().all(|p| p.iter().all(|&x| (0.0..1.0).contains(&x))));
    }

    #[test]
    fn halton_rejects_unsupported_dimension() {
        assert!(matches!(
            halton_points(10, 5),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(matches!(
            halton_points(10, 0),
            Err(Error::UnsupportedDimension(0))
        ));
    }

    #[test]
    fn sparse_grids_are_nested() {
        for d in [2usize, 3] {
            for n in 1..=4u32 {
                let coarse = sparse_grid(n, d).unwrap();
                let fine = sparse_grid(n + 1, d).unwrap();
                let fine_set: HashSet<Vec<u64>> = fine
                    .points()
                    .iter()
                    .map(|p| p.iter().map(|x| x.to_bits()).collect())
                    .collect();
                for p in coarse.points().iter() {
                    let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
                    assert!(fine_set.contains(&key));
                }
            }
        }
    }
}
