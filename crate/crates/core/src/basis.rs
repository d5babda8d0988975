//! Fundamental sequences of basis functions.
//!
//! Every sequence starts with the constant function `phi_1 == 1` and is
//! evaluable at any covariate point for any truncation `J <= max_j`.
//! Spline and partition families place their knots at empirical quantiles of
//! the training covariates; polynomial and trigonometric families need no
//! knots and are capped at [`UNBOUNDED_CAP`] functions.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Truncation cap for families whose sequence is in principle unbounded.
pub const UNBOUNDED_CAP: usize = 512;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum BasisError {
    #[error("invalid basis specification: {0}")]
    InvalidSpec(String),

    #[error(
        "degenerate knots in dimension {dim}: {distinct} distinct training values, {requested} knots requested"
    )]
    DegenerateKnots {
        dim: usize,
        distinct: usize,
        requested: usize,
    },

    #[error("truncation {j} outside the valid range 1..={max_j}")]
    TruncationOutOfRange { j: usize, max_j: usize },

    #[error("point dimension mismatch: basis expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("knot placement requires a nonempty training sample")]
    EmptyTrainingSet,
}

/// Basis family. Spline degrees are at least 1; partition order is the local
/// polynomial degree within each cell (0 gives a histogram basis).
#[derive(Debug, Clone, PartialEq)]
pub enum BasisFamily {
    Polynomial,
    Trigonometric,
    BSpline { degree: usize },
    NaturalSpline,
    PiecewisePartition { order: usize },
}

/// How a multivariate basis is assembled from per-coordinate sub-bases.
#[derive(Debug, Clone, PartialEq)]
pub enum MultivariateMode {
    /// Round-robin allocation of the truncation across coordinates.
    Additive,
    /// Graded tensor products, capped at `cap` total functions.
    Tensor { cap: usize },
}

#[derive(Debug, Clone)]
pub struct BasisSpec {
    pub family: BasisFamily,
    /// Closed interval per covariate dimension; points outside are clipped.
    pub domain: Vec<(f64, f64)>,
    pub dim: usize,
    pub mode: MultivariateMode,
    /// Number of internal knots requested per dimension (spline/partition
    /// families only; ignored otherwise).
    pub internal_knots: usize,
}

impl BasisSpec {
    /// A one-dimensional spec on the given interval with additive defaults.
    pub fn univariate(family: BasisFamily, lower: f64, upper: f64) -> Self {
        BasisSpec {
            family,
            domain: vec![(lower, upper)],
            dim: 1,
            mode: MultivariateMode::Additive,
            internal_knots: 9,
        }
    }

    pub fn with_internal_knots(mut self, internal_knots: usize) -> Self {
        self.internal_knots = internal_knots;
        self
    }

    fn validate(&self) -> Result<(), BasisError> {
        if self.dim == 0 {
            return Err(BasisError::InvalidSpec("dim must be at least 1".into()));
        }
        if self.domain.len() != self.dim {
            return Err(BasisError::InvalidSpec(format!(
                "domain has {} intervals for dim {}",
                self.domain.len(),
                self.dim
            )));
        }
        for (i, &(a, b)) in self.domain.iter().enumerate() {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(BasisError::InvalidSpec(format!(
                    "degenerate domain interval [{a}, {b}] in dimension {i}"
                )));
            }
        }
        match self.family {
            BasisFamily::BSpline { degree } if degree < 1 => {
                return Err(BasisError::InvalidSpec(
                    "B-spline degree must be at least 1".into(),
                ));
            }
            _ => {}
        }
        if let MultivariateMode::Tensor { cap } = self.mode {
            if cap < 1 {
                return Err(BasisError::InvalidSpec("tensor cap must be positive".into()));
            }
        }
        Ok(())
    }

    fn needs_knots(&self) -> bool {
        matches!(
            self.family,
            BasisFamily::BSpline { .. }
                | BasisFamily::NaturalSpline
                | BasisFamily::PiecewisePartition { .. }
        )
    }
}

/// One coordinate's sub-sequence. Element `k >= 1` of a sub-basis is
/// 1-indexed and element 1 is always the constant function.
#[derive(Debug, Clone)]
enum SubBasis {
    Polynomial,
    /// Fourier sieve after an affine map of [a, b] onto [-1, 1].
    Trigonometric { a: f64, b: f64 },
    /// Padded knot vector (boundary knots repeated degree+1 times).
    BSpline { degree: usize, padded: Vec<f64> },
    /// All knots including the two boundary knots.
    Natural { knots: Vec<f64> },
    /// Cell edges including the two boundary edges.
    Partition { order: usize, edges: Vec<f64> },
}

impl SubBasis {
    /// Number of functions in the sub-sequence, `None` when unbounded.
    fn count(&self) -> Option<usize> {
        match self {
            SubBasis::Polynomial | SubBasis::Trigonometric { .. } => None,
            SubBasis::BSpline { degree, padded } => Some(padded.len() - degree - 1),
            SubBasis::Natural { knots } => Some(knots.len()),
            SubBasis::Partition { order, edges } => Some((edges.len() - 1) * (order + 1)),
        }
    }

    /// Evaluate elements 1..=len at a (clipped) scalar point.
    fn eval_prefix(&self, len: usize, x: f64, out: &mut [f64]) {
        debug_assert!(out.len() >= len);
        if len == 0 {
            return;
        }
        out[0] = 1.0;
        match self {
            SubBasis::Polynomial => {
                for k in 1..len {
                    out[k] = out[k - 1] * x;
                }
            }
            SubBasis::Trigonometric { a, b } => {
                // Sequence after the constant: cos(pi u), sin(pi u), cos(2 pi u), ...
                let u = 2.0 * (x - a) / (b - a) - 1.0;
                for k in 1..len {
                    let freq = ((k + 1) / 2) as f64;
                    let angle = freq * std::f64::consts::PI * u;
                    out[k] = if k % 2 == 1 { angle.cos() } else { angle.sin() };
                }
            }
            SubBasis::BSpline { degree, padded } => {
                let all = bspline_all(x, *degree, padded);
                // Intercept handling: keep the constant, drop the first spline.
                for k in 1..len {
                    out[k] = all[k];
                }
            }
            SubBasis::Natural { knots } => {
                let kk = knots.len();
                let last = knots[kk - 1];
                let d = |j: usize| -> f64 {
                    let num = cube_plus(x - knots[j]) - cube_plus(x - last);
                    num / (last - knots[j])
                };
                for k in 1..len {
                    out[k] = match k {
                        1 => x,
                        // d_{k-1}(x) - d_{K-1}(x), 1-based over internal+left knots
                        _ => d(k - 2) - d(kk - 2),
                    };
                }
            }
            SubBasis::Partition { order, edges } => {
                let cells = edges.len() - 1;
                let cell = locate_cell(x, edges);
                // Sequence: constant, then cell-major scaled powers with the
                // first cell's constant dropped to keep full rank.
                for k in 1..len {
                    // Global position among (cell, power) pairs, skipping (0, 0).
                    let pos = k; // pos in 1..(cells*(order+1))
                    let (c, p) = (pos / (order + 1), pos % (order + 1));
                    debug_assert!(c < cells);
                    out[k] = if c == cell {
                        let center = 0.5 * (edges[c] + edges[c + 1]);
                        let half = 0.5 * (edges[c + 1] - edges[c]);
                        let u = (x - center) / half;
                        u.powi(p as i32)
                    } else {
                        0.0
                    };
                }
            }
        }
    }
}

fn cube_plus(t: f64) -> f64 {
    if t > 0.0 {
        t * t * t
    } else {
        0.0
    }
}

/// Index of the half-open cell [e_i, e_{i+1}) containing x; the last cell is
/// closed on the right.
fn locate_cell(x: f64, edges: &[f64]) -> usize {
    let cells = edges.len() - 1;
    for c in 0..cells {
        if x < edges[c + 1] {
            return c;
        }
    }
    cells - 1
}

/// All B-spline values of the given degree at x for a padded knot vector.
/// Cox–de Boor recursion over the full triangle; the right boundary is
/// treated as closed so the partition of unity holds on the whole domain.
fn bspline_all(x: f64, degree: usize, padded: &[f64]) -> Vec<f64> {
    let m = padded.len();
    let n_basis = m - degree - 1;
    let mut level = vec![0.0f64; m - 1];
    for (i, v) in level.iter_mut().enumerate() {
        if padded[i] <= x && x < padded[i + 1] {
            *v = 1.0;
        }
    }
    if x >= padded[m - 1] {
        for i in (0..m - 1).rev() {
            if padded[i] < padded[i + 1] {
                level[i] = 1.0;
                break;
            }
        }
    }
    for k in 1..=degree {
        for i in 0..m - k - 1 {
            let left_den = padded[i + k] - padded[i];
            let right_den = padded[i + k + 1] - padded[i + 1];
            let left = if left_den > 0.0 {
                (x - padded[i]) / left_den * level[i]
            } else {
                0.0
            };
            let right = if right_den > 0.0 {
                (padded[i + k + 1] - x) / right_den * level[i + 1]
            } else {
                0.0
            };
            level[i] = left + right;
        }
    }
    level.truncate(n_basis);
    level
}

/// An immutable, concurrently readable basis sequence.
#[derive(Debug, Clone)]
pub struct BasisSequence {
    spec: BasisSpec,
    subs: Vec<SubBasis>,
    /// Internal knots per dimension (empty for knot-free families).
    knots: Vec<Vec<f64>>,
    max_j: usize,
    /// Additive mode: global index j (0-based, j >= 1) -> (dim, sub index >= 2).
    additive_layout: Vec<(usize, usize)>,
    /// Tensor mode: 1-based multi-index per global function.
    tensor_layout: Vec<Vec<usize>>,
}

/// Builds a basis sequence, placing knots at empirical quantiles of the
/// training covariates for spline and partition families.
pub fn make_basis(spec: &BasisSpec, training: &DMatrix<f64>) -> Result<BasisSequence, BasisError> {
    spec.validate()?;
    if spec.needs_knots() && training.nrows() == 0 {
        return Err(BasisError::EmptyTrainingSet);
    }
    if spec.needs_knots() && training.ncols() != spec.dim {
        return Err(BasisError::DimensionMismatch {
            expected: spec.dim,
            got: training.ncols(),
        });
    }

    let mut subs = Vec::with_capacity(spec.dim);
    let mut knots = Vec::with_capacity(spec.dim);
    for dim in 0..spec.dim {
        let (a, b) = spec.domain[dim];
        let internal = if spec.needs_knots() {
            let mut values: Vec<f64> = (0..training.nrows())
                .map(|i| training[(i, dim)].clamp(a, b))
                .collect();
            values.sort_by(|p, q| p.partial_cmp(q).unwrap());
            values.dedup();
            if values.len() < spec.internal_knots {
                return Err(BasisError::DegenerateKnots {
                    dim,
                    distinct: values.len(),
                    requested: spec.internal_knots,
                });
            }
            let placed = quantile_knots(&values, spec.internal_knots, a, b);
            if placed.len() < spec.internal_knots {
                return Err(BasisError::DegenerateKnots {
                    dim,
                    distinct: placed.len(),
                    requested: spec.internal_knots,
                });
            }
            placed
        } else {
            Vec::new()
        };

        let sub = match spec.family {
            BasisFamily::Polynomial => SubBasis::Polynomial,
            BasisFamily::Trigonometric => SubBasis::Trigonometric { a, b },
            BasisFamily::BSpline { degree } => {
                let mut padded = Vec::with_capacity(internal.len() + 2 * (degree + 1));
                padded.extend(std::iter::repeat(a).take(degree + 1));
                padded.extend(internal.iter().copied());
                padded.extend(std::iter::repeat(b).take(degree + 1));
                SubBasis::BSpline { degree, padded }
            }
            BasisFamily::NaturalSpline => {
                let mut all = Vec::with_capacity(internal.len() + 2);
                all.push(a);
                all.extend(internal.iter().copied());
                all.push(b);
                SubBasis::Natural { knots: all }
            }
            BasisFamily::PiecewisePartition { order } => {
                let mut edges = Vec::with_capacity(internal.len() + 2);
                edges.push(a);
                edges.extend(internal.iter().copied());
                edges.push(b);
                SubBasis::Partition { order, edges }
            }
        };
        subs.push(sub);
        knots.push(internal);
    }

    let (max_j, additive_layout, tensor_layout) = match spec.mode {
        MultivariateMode::Additive => {
            let layout = additive_layout(&subs, UNBOUNDED_CAP);
            (1 + layout.len(), layout, Vec::new())
        }
        MultivariateMode::Tensor { cap } => {
            let layout = tensor_layout(&subs, cap.min(UNBOUNDED_CAP));
            (layout.len(), Vec::new(), layout)
        }
    };

    Ok(BasisSequence {
        spec: spec.clone(),
        subs,
        knots,
        max_j,
        additive_layout,
        tensor_layout,
    })
}

/// Strictly increasing interior quantiles of a sorted, deduplicated sample.
fn quantile_knots(sorted_distinct: &[f64], count: usize, a: f64, b: f64) -> Vec<f64> {
    let n = sorted_distinct.len();
    let mut placed = Vec::with_capacity(count);
    for i in 1..=count {
        let q = i as f64 / (count + 1) as f64;
        let pos = q * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let frac = pos - lo as f64;
        let v = if lo + 1 < n {
            sorted_distinct[lo] * (1.0 - frac) + sorted_distinct[lo + 1] * frac
        } else {
            sorted_distinct[lo]
        };
        placed.push(v.clamp(a, b));
    }
    placed.dedup_by(|p, q| *p <= *q + 1e-14);
    placed.retain(|v| *v > a && *v < b);
    placed
}

/// Round-robin assignment of global indices 2.. to per-dimension functions.
fn additive_layout(subs: &[SubBasis], cap: usize) -> Vec<(usize, usize)> {
    let d = subs.len();
    let mut next: Vec<usize> = vec![2; d];
    let mut layout = Vec::new();
    loop {
        let mut advanced = false;
        for (dim, sub) in subs.iter().enumerate() {
            if 1 + layout.len() >= cap {
                return layout;
            }
            let available = sub.count().map_or(true, |c| next[dim] <= c);
            if available {
                layout.push((dim, next[dim]));
                next[dim] += 1;
                advanced = true;
            }
        }
        if !advanced {
            return layout;
        }
    }
}

/// Graded (total index, then lexicographic) tensor multi-indices.
fn tensor_layout(subs: &[SubBasis], cap: usize) -> Vec<Vec<usize>> {
    let d = subs.len();
    let bounds: Vec<usize> = subs
        .iter()
        .map(|s| s.count().unwrap_or(cap).min(cap))
        .collect();
    let mut layout: Vec<Vec<usize>> = Vec::with_capacity(cap);
    let max_total: usize = bounds.iter().sum();
    let mut prefix = vec![1usize; d];
    for total in d..=max_total {
        if layout.len() >= cap {
            break;
        }
        compositions(total, 0, &bounds, &mut prefix, &mut layout, cap);
    }
    layout
}

/// Lexicographic enumeration of compositions of `remaining` into parts
/// 1..=bounds[pos..], appended to `layout` until `cap` is reached.
fn compositions(
    remaining: usize,
    pos: usize,
    bounds: &[usize],
    prefix: &mut Vec<usize>,
    layout: &mut Vec<Vec<usize>>,
    cap: usize,
) {
    if layout.len() >= cap {
        return;
    }
    let tail = bounds.len() - pos - 1;
    if pos == bounds.len() - 1 {
        if remaining >= 1 && remaining <= bounds[pos] {
            prefix[pos] = remaining;
            layout.push(prefix.clone());
        }
        return;
    }
    let tail_max: usize = bounds[pos + 1..].iter().sum();
    let lo = remaining.saturating_sub(tail_max).max(1);
    let hi = bounds[pos].min(remaining.saturating_sub(tail));
    for k in lo..=hi {
        prefix[pos] = k;
        compositions(remaining - k, pos + 1, bounds, prefix, layout, cap);
        if layout.len() >= cap {
            return;
        }
    }
}

impl BasisSequence {
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    /// Largest truncation this sequence supports.
    pub fn max_j(&self) -> usize {
        self.max_j
    }

    /// Internal knots per dimension (empty vectors for knot-free families).
    pub fn knots(&self) -> &[Vec<f64>] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    fn clip(&self, dim: usize, x: f64) -> f64 {
        let (a, b) = self.spec.domain[dim];
        x.clamp(a, b)
    }

    /// Evaluates the first `j` basis functions at a point.
    pub fn evaluate(&self, j: usize, x: &[f64]) -> Result<DVector<f64>, BasisError> {
        let mut out = DVector::zeros(j);
        self.evaluate_into(j, x, out.as_mut_slice())?;
        Ok(out)
    }

    pub(crate) fn evaluate_into(&self, j: usize, x: &[f64], out: &mut [f64]) -> Result<(), BasisError> {
        if j < 1 || j > self.max_j {
            return Err(BasisError::TruncationOutOfRange {
                j,
                max_j: self.max_j,
            });
        }
        if x.len() != self.spec.dim {
            return Err(BasisError::DimensionMismatch {
                expected: self.spec.dim,
                got: x.len(),
            });
        }
        match self.spec.mode {
            MultivariateMode::Additive => {
                out[0] = 1.0;
                if j == 1 {
                    return Ok(());
                }
                // Evaluate each dimension's needed prefix once.
                let mut prefix_len = vec![0usize; self.spec.dim];
                for &(dim, k) in &self.additive_layout[..j - 1] {
                    prefix_len[dim] = prefix_len[dim].max(k);
                }
                let mut scratch: Vec<Vec<f64>> = prefix_len.iter().map(|&l| vec![0.0; l]).collect();
                for dim in 0..self.spec.dim {
                    if prefix_len[dim] > 0 {
                        let xv = self.clip(dim, x[dim]);
                        self.subs[dim].eval_prefix(prefix_len[dim], xv, &mut scratch[dim]);
                    }
                }
                for (g, &(dim, k)) in self.additive_layout[..j - 1].iter().enumerate() {
                    out[g + 1] = scratch[dim][k - 1];
                }
            }
            MultivariateMode::Tensor { .. } => {
                let mut prefix_len = vec![0usize; self.spec.dim];
                for idx in &self.tensor_layout[..j] {
                    for (dim, &k) in idx.iter().enumerate() {
                        prefix_len[dim] = prefix_len[dim].max(k);
                    }
                }
                let mut scratch: Vec<Vec<f64>> = prefix_len.iter().map(|&l| vec![0.0; l]).collect();
                for dim in 0..self.spec.dim {
                    let xv = self.clip(dim, x[dim]);
                    self.subs[dim].eval_prefix(prefix_len[dim], xv, &mut scratch[dim]);
                }
                for (g, idx) in self.tensor_layout[..j].iter().enumerate() {
                    let mut prod = 1.0;
                    for (dim, &k) in idx.iter().enumerate() {
                        prod *= scratch[dim][k - 1];
                    }
                    out[g] = prod;
                }
            }
        }
        Ok(())
    }

    /// Row-wise evaluation over an n x d covariate matrix.
    pub fn evaluate_matrix(&self, j: usize, xs: &DMatrix<f64>) -> Result<DMatrix<f64>, BasisError> {
        if xs.ncols() != self.spec.dim {
            return Err(BasisError::DimensionMismatch {
                expected: self.spec.dim,
                got: xs.ncols(),
            });
        }
        let n = xs.nrows();
        let mut out = DMatrix::zeros(n, j);
        let mut point = vec![0.0; self.spec.dim];
        let mut row = vec![0.0; j];
        for i in 0..n {
            for d in 0..self.spec.dim {
                point[d] = xs[(i, d)];
            }
            self.evaluate_into(j, &point, &mut row)?;
            for (c, &v) in row.iter().enumerate() {
                out[(i, c)] = v;
            }
        }
        Ok(out)
    }

    /// Full underlying B-spline basis at a scalar point (including the
    /// function dropped by the intercept handling). Test and diagnostic aid;
    /// only meaningful for the B-spline family.
    pub fn raw_bspline_values(&self, dim: usize, x: f64) -> Option<Vec<f64>> {
        match &self.subs[dim] {
            SubBasis::BSpline { degree, padded } => {
                Some(bspline_all(self.clip(dim, x), *degree, padded))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_training(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn polynomial_needs_no_knots_and_caps_at_512() {
        let spec = BasisSpec::univariate(BasisFamily::Polynomial, -1.0, 1.0);
        let basis = make_basis(&spec, &DMatrix::zeros(0, 1)).unwrap();
        assert!(basis.knots()[0].is_empty());
        assert_eq!(basis.max_j(), UNBOUNDED_CAP);
    }

    #[test]
    fn polynomial_evaluation_is_monomial() {
        let spec = BasisSpec::univariate(BasisFamily::Polynomial, -1.0, 1.0);
        let basis = make_basis(&spec, &DMatrix::zeros(0, 1)).unwrap();
        let v = basis.evaluate(3, &[0.5]).unwrap();
        assert_eq!(v.as_slice(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn trigonometric_at_zero() {
        let spec = BasisSpec::univariate(BasisFamily::Trigonometric, -1.0, 1.0);
        let basis = make_basis(&spec, &DMatrix::zeros(0, 1)).unwrap();
        let v = basis.evaluate(3, &[0.0]).unwrap();
        assert_abs_diff_eq!(v[0], 1.0);
        assert_abs_diff_eq!(v[1], 1.0); // cos(0)
        assert_abs_diff_eq!(v[2], 0.0); // sin(0)
    }

    #[test]
    fn bspline_decile_knots_strictly_increasing() {
        let training = DMatrix::from_fn(100, 1, |i, _| -1.0 + 2.0 * (i as f64) / 99.0);
        let spec = BasisSpec::univariate(BasisFamily::BSpline { degree: 3 }, -1.0, 1.0)
            .with_internal_knots(9);
        let basis = make_basis(&spec, &training).unwrap();
        let ks = &basis.knots()[0];
        assert_eq!(ks.len(), 9);
        for w in ks.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(ks.iter().all(|&k| k > -1.0 && k < 1.0));
    }

    #[test]
    fn degenerate_knots_error() {
        let training = DMatrix::from_fn(20, 1, |i, _| if i % 2 == 0 { -0.3 } else { 0.4 });
        let spec = BasisSpec::univariate(BasisFamily::BSpline { degree: 3 }, -1.0, 1.0)
            .with_internal_knots(10);
        match make_basis(&spec, &training) {
            Err(BasisError::DegenerateKnots { distinct: 2, requested: 10, .. }) => {}
            other => panic!("expected degenerate-knots error, got {other:?}"),
        }
    }

    #[test]
    fn bspline_partition_of_unity() {
        let training = uniform_training(200, 3);
        let spec = BasisSpec::univariate(BasisFamily::BSpline { degree: 3 }, -1.0, 1.0)
            .with_internal_knots(7);
        let basis = make_basis(&spec, &training).unwrap();
        for i in 0..=50 {
            let x = -1.0 + 2.0 * (i as f64) / 50.0;
            let raw = basis.raw_bspline_values(0, x).unwrap();
            let sum: f64 = raw.iter().sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
            assert!(raw.iter().all(|&v| v >= -1e-14));
        }
    }

    #[test]
    fn bspline_continuity_at_knots() {
        let training = uniform_training(500, 11);
        for degree in [2usize, 3] {
            let spec = BasisSpec::univariate(BasisFamily::BSpline { degree }, -1.0, 1.0)
                .with_internal_knots(6);
            let basis = make_basis(&spec, &training).unwrap();
            let j = basis.max_j();
            for &k in &basis.knots()[0].clone() {
                let lo = basis.evaluate(j, &[k - 1e-8]).unwrap();
                let hi = basis.evaluate(j, &[k + 1e-8]).unwrap();
                for c in 0..j {
                    assert!(
                        (lo[c] - hi[c]).abs() <= 1e-5,
                        "degree {degree} discontinuous at knot {k}: component {c}"
                    );
                }
            }
        }
    }

    #[test]
    fn first_function_is_one_for_every_family() {
        let training = uniform_training(100, 5);
        let families = [
            BasisFamily::Polynomial,
            BasisFamily::Trigonometric,
            BasisFamily::BSpline { degree: 3 },
            BasisFamily::NaturalSpline,
            BasisFamily::PiecewisePartition { order: 1 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for family in families {
            let spec =
                BasisSpec::univariate(family, -1.0, 1.0).with_internal_knots(5);
            let basis = make_basis(&spec, &training).unwrap();
            for _ in 0..20 {
                let x = rng.random_range(-1.5..1.5);
                let v = basis.evaluate(basis.max_j().min(8), &[x]).unwrap();
                assert_eq!(v[0], 1.0);
            }
        }
    }

    #[test]
    fn evaluate_matrix_shape_and_values() {
        let spec = BasisSpec::univariate(BasisFamily::Polynomial, -1.0, 1.0);
        let basis = make_basis(&spec, &DMatrix::zeros(0, 1)).unwrap();
        let xs = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let m = basis.evaluate_matrix(2, &xs).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 2));
        assert_eq!(m[(0, 0)], 1.0);
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m[(1, 0)], 1.0);
        assert_eq!(m[(1, 1)], 1.0);
    }

    #[test]
    fn evaluate_matrix_agrees_with_per_row_evaluate() {
        let training = uniform_training(150, 9);
        let spec = BasisSpec::univariate(BasisFamily::BSpline { degree: 3 }, -1.0, 1.0)
            .with_internal_knots(4);
        let basis = make_basis(&spec, &training).unwrap();
        let j = basis.max_j();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs = DMatrix::from_fn(100, 1, |_, _| rng.random_range(-1.2..1.2));
        let m = basis.evaluate_matrix(j, &xs).unwrap();
        for i in 0..xs.nrows() {
            let row = basis.evaluate(j, &[xs[(i, 0)]]).unwrap();
            for c in 0..j {
                assert_eq!(m[(i, c)], row[c], "row {i} col {c}");
            }
        }
    }

    #[test]
    fn truncation_out_of_range() {
        let training = uniform_training(60, 1);
        let spec = BasisSpec::univariate(BasisFamily::BSpline { degree: 2 }, -1.0, 1.0)
            .with_internal_knots(3);
        let basis = make_basis(&spec, &training).unwrap();
        assert!(matches!(
            basis.evaluate(basis.max_j() + 1, &[0.0]),
            Err(BasisError::TruncationOutOfRange { .. })
        ));
        assert!(matches!(
            basis.evaluate(0, &[0.0]),
            Err(BasisError::TruncationOutOfRange { .. })
        ));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let training = uniform_training(80, 21);
        let spec = BasisSpec::univariate(BasisFamily::NaturalSpline, -1.0, 1.0)
            .with_internal_knots(4);
        let basis = make_basis(&spec, &training).unwrap();
        let a = basis.evaluate(basis.max_j(), &[0.37]).unwrap();
        let b = basis.evaluate(basis.max_j(), &[0.37]).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
    }

    #[test]
    fn points_outside_domain_are_clipped() {
        let spec = BasisSpec::univariate(BasisFamily::Trigonometric, -1.0, 1.0);
        let basis = make_basis(&spec, &DMatrix::zeros(0, 1)).unwrap();
        let inside = basis.evaluate(5, &[1.0]).unwrap();
        let outside = basis.evaluate(5, &[3.7]).unwrap();
        assert_eq!(inside.as_slice(), outside.as_slice());
    }

    #[test]
    fn additive_mode_separates_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let spec = BasisSpec {
            family: BasisFamily::Polynomial,
            domain: vec![(-1.0, 1.0), (-1.0, 1.0)],
            dim: 2,
            mode: MultivariateMode::Additive,
            internal_knots: 0,
        };
        let basis = make_basis(&spec, &DMatrix::zeros(0, 2)).unwrap();
        let j = 7;
        // Global index layout: 1, x0, x1, x0^2, x1^2, ...
        for _ in 0..25 {
            let x0 = rng.random_range(-1.0..1.0);
            let x1a = rng.random_range(-1.0..1.0);
            let x1b = rng.random_range(-1.0..1.0);
            let va = basis.evaluate(j, &[x0, x1a]).unwrap();
            let vb = basis.evaluate(j, &[x0, x1b]).unwrap();
            // Coordinate-0 functions unaffected by coordinate 1.
            assert_eq!(va[1], vb[1]);
            assert_eq!(va[3], vb[3]);
            assert_eq!(va[1], x0);
            assert_eq!(va[3], x0 * x0);
        }
    }

    #[test]
    fn tensor_mode_caps_total_functions() {
        let spec = BasisSpec {
            family: BasisFamily::Polynomial,
            domain: vec![(-1.0, 1.0), (-1.0, 1.0)],
            dim: 2,
            mode: MultivariateMode::Tensor { cap: 10 },
            internal_knots: 0,
        };
        let basis = make_basis(&spec, &DMatrix::zeros(0, 2)).unwrap();
        assert_eq!(basis.max_j(), 10);
        let v = basis.evaluate(10, &[0.5, -0.25]).unwrap();
        assert_eq!(v[0], 1.0);
        // Graded order: after the constant come the two linear terms.
        assert_eq!(v[1], -0.25);
        assert_eq!(v[2], 0.5);
    }

    #[test]
    fn partition_order_zero_is_histogram() {
        let training = uniform_training(100, 2);
        let spec = BasisSpec::univariate(BasisFamily::PiecewisePartition { order: 0 }, -1.0, 1.0)
            .with_internal_knots(3);
        let basis = make_basis(&spec, &training).unwrap();
        assert_eq!(basis.max_j(), 4);
        let v = basis.evaluate(4, &[-0.99]).unwrap();
        assert_eq!(v[0], 1.0);
        // First cell's indicator is the dropped one.
        assert_eq!(v.as_slice()[1..].iter().filter(|&&x| x != 0.0).count(), 0);
    }
}
