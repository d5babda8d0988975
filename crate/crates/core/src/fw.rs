//! The Forster–Warmuth series estimator and its least-squares baseline.
//!
//! For a truncation `J`, basis map `phi`, and fitted sufficient statistics
//! `G = sum_i phi(X_i) phi(X_i)^T` and `m = sum_i phi(X_i) Y_i`, the
//! prediction at `x` is
//!
//! ```text
//! (1 - h(x)) * phi(x)^T (G + phi(x) phi(x)^T)^- m
//! h(x) = phi(x)^T (G + phi(x) phi(x)^T)^- phi(x)  in [0, 1]
//! ```
//!
//! where `^-` is a symmetric eigendecomposition pseudo-solve, so every
//! operation is total even for singular Gram matrices. Equivalently the
//! estimator is least squares on the sample augmented with the artificial
//! observation `(x, 0)`, scaled by `1 - h(x)`; `h` is the leverage score of
//! that artificial observation and shrinks predictions far from the data.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::basis::{BasisError, BasisSequence};
use crate::derive_seed;

/// Relative eigenvalue cutoff of the pseudo-solve.
const PSEUDO_SOLVE_RTOL: f64 = 1e-10;
/// Absolute floor for the largest eigenvalue entering the cutoff.
const PSEUDO_SOLVE_FLOOR: f64 = 1e-300;
/// Leverage excursions beyond [0, 1] larger than this raise an error.
const LEVERAGE_SLACK: f64 = 1e-10;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum FwError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("numerical consistency violated: leverage {leverage} outside [0, 1]")]
    NumericalConsistency { leverage: f64 },

    #[error("split leaves an empty validation part (n = {n}, fit = {fit})")]
    EmptyValidationSplit { n: usize, fit: usize },

    #[error("invalid cross-validation setup: {0}")]
    InvalidCv(String),

    #[error("fold {fold} too small ({len} records)")]
    FoldTooSmall { fold: usize, len: usize },

    #[error("no truncation within cap {cap} satisfies the balance inequality")]
    TruncationCap { cap: usize },

    #[error("pseudo-outcome plan failed: {0}")]
    Plan(String),

    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Symmetric pseudo-solver: eigenvalues below
/// `PSEUDO_SOLVE_RTOL * max(|lambda|_max, PSEUDO_SOLVE_FLOOR)` are treated as
/// null directions, yielding minimum-norm solutions.
pub(crate) struct SymSolver {
    vectors: DMatrix<f64>,
    inv_values: DVector<f64>,
}

impl SymSolver {
    pub(crate) fn new(matrix: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(matrix);
        let max_abs = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(PSEUDO_SOLVE_FLOOR);
        let cutoff = PSEUDO_SOLVE_RTOL * max_abs;
        let inv_values = eig.eigenvalues.map(|v| if v.abs() > cutoff { 1.0 / v } else { 0.0 });
        SymSolver {
            vectors: eig.eigenvectors,
            inv_values,
        }
    }

    pub(crate) fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut coords = self.vectors.tr_mul(rhs);
        coords.component_mul_assign(&self.inv_values);
        &self.vectors * coords
    }

    /// Quadratic form `b^T A^- b`.
    pub(crate) fn quad(&self, b: &DVector<f64>) -> f64 {
        let coords = self.vectors.tr_mul(b);
        coords
            .iter()
            .zip(self.inv_values.iter())
            .map(|(c, iv)| c * c * iv)
            .sum()
    }
}

/// Sufficient statistics of one Forster–Warmuth regression at truncation `j`.
/// No solve happens at fit time; predictions are lazy.
#[derive(Debug, Clone)]
pub struct FwFit {
    j: usize,
    gram: DMatrix<f64>,
    moment: DVector<f64>,
    n: usize,
    response_second_moment: f64,
}

impl FwFit {
    /// Accumulates Gram matrix and moment vector from an n x J design.
    /// An empty design (n = 0) is allowed and yields zero sums.
    pub fn fit(design: &DMatrix<f64>, responses: &[f64]) -> Result<Self, FwError> {
        if design.nrows() != responses.len() {
            return Err(FwError::ShapeMismatch(format!(
                "design has {} rows but {} responses",
                design.nrows(),
                responses.len()
            )));
        }
        if design.ncols() == 0 {
            return Err(FwError::ShapeMismatch("design must have J >= 1 columns".into()));
        }
        let y = DVector::from_column_slice(responses);
        let gram = design.tr_mul(design);
        let moment = design.tr_mul(&y);
        let n = responses.len();
        let response_second_moment = if n == 0 {
            0.0
        } else {
            responses.iter().map(|v| v * v).sum::<f64>() / n as f64
        };
        Ok(FwFit {
            j: design.ncols(),
            gram,
            moment,
            n,
            response_second_moment,
        })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    /// `(1/n) sum Y_i^2`; zero for an empty fit.
    pub fn response_second_moment(&self) -> f64 {
        self.response_second_moment
    }

    fn check_phi(&self, phi: &DVector<f64>) -> Result<(), FwError> {
        if phi.len() != self.j {
            return Err(FwError::ShapeMismatch(format!(
                "phi has length {} but the fit uses J = {}",
                phi.len(),
                self.j
            )));
        }
        Ok(())
    }

    fn augmented_solver(&self, phi: &DVector<f64>) -> SymSolver {
        let mut augmented = self.gram.clone();
        augmented.ger(1.0, phi, phi, 1.0);
        SymSolver::new(augmented)
    }

    fn clamp_leverage(raw: f64) -> Result<f64, FwError> {
        if raw < -LEVERAGE_SLACK || raw > 1.0 + LEVERAGE_SLACK {
            return Err(FwError::NumericalConsistency { leverage: raw });
        }
        Ok(raw.clamp(0.0, 1.0))
    }

    /// Leverage score of the artificial observation at `phi`, in [0, 1].
    pub fn leverage(&self, phi: &DVector<f64>) -> Result<f64, FwError> {
        self.check_phi(phi)?;
        let solver = self.augmented_solver(phi);
        Self::clamp_leverage(solver.quad(phi))
    }

    /// Forster–Warmuth prediction at `phi`.
    pub fn predict(&self, phi: &DVector<f64>) -> Result<f64, FwError> {
        Ok(self.predict_with_leverage(phi)?.0)
    }

    /// Prediction together with the leverage score (one decomposition).
    pub fn predict_with_leverage(&self, phi: &DVector<f64>) -> Result<(f64, f64), FwError> {
        self.check_phi(phi)?;
        let solver = self.augmented_solver(phi);
        let h = Self::clamp_leverage(solver.quad(phi))?;
        let value = (1.0 - h) * phi.dot(&solver.solve(&self.moment));
        Ok((value, h))
    }

    /// Least-squares series prediction (minimum-norm on rank deficiency).
    pub fn predict_ls(&self, phi: &DVector<f64>) -> Result<f64, FwError> {
        self.check_phi(phi)?;
        let solver = SymSolver::new(self.gram.clone());
        Ok(phi.dot(&solver.solve(&self.moment)))
    }

    /// Series variance `l(x) * sigma2` with `l(x) = phi^T G^- phi`, plus the
    /// 95% confidence half-width `1.96 sqrt(variance)`.
    pub fn pointwise_variance(
        &self,
        phi: &DVector<f64>,
        sigma2_pseudo: f64,
    ) -> Result<(f64, f64), FwError> {
        self.check_phi(phi)?;
        if sigma2_pseudo < 0.0 {
            return Err(FwError::ShapeMismatch(
                "pseudo-outcome variance must be nonnegative".into(),
            ));
        }
        let solver = SymSolver::new(self.gram.clone());
        let variance = solver.quad(phi).max(0.0) * sigma2_pseudo;
        Ok((variance, 1.96 * variance.sqrt()))
    }

    /// Batch prediction engine reusing one decomposition of the Gram matrix.
    pub fn predictor(&self) -> FwPredictor<'_> {
        let eig = SymmetricEigen::new(self.gram.clone());
        let max_abs = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(PSEUDO_SOLVE_FLOOR);
        let cutoff = PSEUDO_SOLVE_RTOL * max_abs;
        let range_inv: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|&v| if v.abs() > cutoff { 1.0 / v } else { 0.0 })
            .collect();
        let null_mask: Vec<bool> = eig.eigenvalues.iter().map(|&v| v.abs() <= cutoff).collect();
        let moment_coords = eig.eigenvectors.tr_mul(&self.moment);
        FwPredictor {
            fit: self,
            vectors: eig.eigenvectors,
            gram_lambda_max: max_abs,
            range_inv,
            null_mask,
            moment_coords,
        }
    }
}

/// Shared-decomposition predictor. Splitting `phi` into Gram range and null
/// components gives the rank-one-update identities
/// `h = l/(1+l)` and `fw = ls/(1+l)^2` on the range, and exactly `h = 1`,
/// `fw = 0` when `phi` has a non-negligible null component.
pub struct FwPredictor<'a> {
    fit: &'a FwFit,
    vectors: DMatrix<f64>,
    gram_lambda_max: f64,
    range_inv: Vec<f64>,
    null_mask: Vec<bool>,
    moment_coords: DVector<f64>,
}

impl FwPredictor<'_> {
    /// Returns `(fw_prediction, leverage, ls_prediction)`.
    pub fn predict(&self, phi: &DVector<f64>) -> Result<(f64, f64, f64), FwError> {
        if phi.len() != self.fit.j {
            return Err(FwError::ShapeMismatch(format!(
                "phi has length {} but the fit uses J = {}",
                phi.len(),
                self.fit.j
            )));
        }
        let coords = self.vectors.tr_mul(phi);
        let mut null_norm2 = 0.0;
        let mut ell = 0.0;
        let mut ls = 0.0;
        for i in 0..coords.len() {
            let c = coords[i];
            if self.null_mask[i] {
                null_norm2 += c * c;
            } else {
                ell += c * c * self.range_inv[i];
                ls += c * self.moment_coords[i] * self.range_inv[i];
            }
        }
        // Mirror the augmented-matrix cutoff: its largest eigenvalue is at
        // most lambda_max(G) + |phi|^2.
        let cutoff = PSEUDO_SOLVE_RTOL * (self.gram_lambda_max + phi.norm_squared()).max(PSEUDO_SOLVE_FLOOR);
        if null_norm2 > cutoff {
            return Ok((0.0, 1.0, ls));
        }
        let h = ell / (1.0 + ell);
        let fw = ls / ((1.0 + ell) * (1.0 + ell));
        Ok((fw, h, ls))
    }
}

/// A Forster–Warmuth regression bound to a basis sequence.
#[derive(Clone)]
pub struct FwModel {
    basis: Arc<BasisSequence>,
    fit: FwFit,
}

impl FwModel {
    pub fn fit(
        basis: Arc<BasisSequence>,
        j: usize,
        xs: &DMatrix<f64>,
        ys: &[f64],
    ) -> Result<Self, FwError> {
        let design = basis.evaluate_matrix(j, xs)?;
        let fit = FwFit::fit(&design, ys)?;
        Ok(FwModel { basis, fit })
    }

    pub fn j(&self) -> usize {
        self.fit.j
    }

    pub fn fit_stats(&self) -> &FwFit {
        &self.fit
    }

    pub fn basis(&self) -> &Arc<BasisSequence> {
        &self.basis
    }

    pub fn predict_at(&self, x: &[f64]) -> Result<f64, FwError> {
        let phi = self.basis.evaluate(self.fit.j, x)?;
        self.fit.predict(&phi)
    }

    pub fn leverage_at(&self, x: &[f64]) -> Result<f64, FwError> {
        let phi = self.basis.evaluate(self.fit.j, x)?;
        self.fit.leverage(&phi)
    }

    pub fn predict_ls_at(&self, x: &[f64]) -> Result<f64, FwError> {
        let phi = self.basis.evaluate(self.fit.j, x)?;
        self.fit.predict_ls(&phi)
    }

    pub fn variance_at(&self, x: &[f64], sigma2_pseudo: f64) -> Result<(f64, f64), FwError> {
        let phi = self.basis.evaluate(self.fit.j, x)?;
        self.fit.pointwise_variance(&phi, sigma2_pseudo)
    }
}

/// Which series predictor the cross-validation loop scores and returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    ForsterWarmuth,
    LeastSquares,
}

#[derive(Debug, Clone)]
pub struct CvConfig {
    /// Candidate truncations; defaults to 1..=min(fit_size/2, max_j).
    pub j_grid: Option<Vec<usize>>,
    /// Number of random split repeats (K).
    pub repeats: usize,
    /// Fraction of the data used for fitting within each repeat.
    pub split_fraction: f64,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            j_grid: None,
            repeats: 5,
            split_fraction: 0.5,
            seed: 0,
        }
    }
}

/// One repeat of split-sample cross-validation.
pub struct CvRepeat {
    pub selected_j: usize,
    pub validation_mse: f64,
    pub model: FwModel,
}

/// Averaged predictor over the selected models of each repeat.
pub struct CvSelection {
    kind: SeriesKind,
    pub repeats: Vec<CvRepeat>,
}

impl CvSelection {
    pub fn selected_js(&self) -> Vec<usize> {
        self.repeats.iter().map(|r| r.selected_j).collect()
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    /// Median of the selected truncations (lower median for even counts).
    pub fn median_j(&self) -> usize {
        let mut js = self.selected_js();
        js.sort_unstable();
        js[(js.len() - 1) / 2]
    }

    pub fn predict_at(&self, x: &[f64]) -> Result<f64, FwError> {
        let mut total = 0.0;
        for repeat in &self.repeats {
            let value = match self.kind {
                SeriesKind::ForsterWarmuth => repeat.model.predict_at(x)?,
                SeriesKind::LeastSquares => repeat.model.predict_ls_at(x)?,
            };
            total += value;
        }
        Ok(total / self.repeats.len() as f64)
    }
}

/// Split-sample cross-validation for the Forster–Warmuth truncation level:
/// each repeat randomly splits the data, fits every candidate `J` on the fit
/// part, scores squared error on the validation part (against the provided
/// responses, which in counterfactual settings are pseudo-outcomes), and
/// keeps the minimizing model. Ties break toward the smallest `J`. The final
/// predictor averages the selected models across repeats.
pub fn select_j_cv(
    basis: Arc<BasisSequence>,
    xs: &DMatrix<f64>,
    ys: &[f64],
    config: &CvConfig,
) -> Result<CvSelection, FwError> {
    series_cv(basis, xs, ys, config, SeriesKind::ForsterWarmuth)
}

/// Same protocol with the least-squares series baseline.
pub fn series_cv(
    basis: Arc<BasisSequence>,
    xs: &DMatrix<f64>,
    ys: &[f64],
    config: &CvConfig,
    kind: SeriesKind,
) -> Result<CvSelection, FwError> {
    let n = xs.nrows();
    if n != ys.len() {
        return Err(FwError::ShapeMismatch(format!(
            "{n} covariate rows but {} responses",
            ys.len()
        )));
    }
    if config.repeats < 1 {
        return Err(FwError::InvalidCv("repeats must be at least 1".into()));
    }
    if !(config.split_fraction > 0.0 && config.split_fraction < 1.0) {
        return Err(FwError::InvalidCv(
            "split fraction must lie strictly between 0 and 1".into(),
        ));
    }
    let fit_size = ((n as f64) * config.split_fraction).floor() as usize;
    if fit_size == 0 || fit_size >= n {
        return Err(FwError::EmptyValidationSplit { n, fit: fit_size });
    }
    let grid: Vec<usize> = match &config.j_grid {
        Some(grid) => {
            if grid.is_empty() {
                return Err(FwError::InvalidCv("empty truncation grid".into()));
            }
            for &j in grid {
                if j < 1 || j > basis.max_j() {
                    return Err(FwError::Basis(BasisError::TruncationOutOfRange {
                        j,
                        max_j: basis.max_j(),
                    }));
                }
            }
            grid.clone()
        }
        None => (1..=(fit_size / 2).max(1).min(basis.max_j())).collect(),
    };
    let j_max = *grid.iter().max().unwrap();

    let mut repeats = Vec::with_capacity(config.repeats);
    for k in 0..config.repeats {
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[k as u64]));
        order.shuffle(&mut rng);
        let (fit_idx, val_idx) = order.split_at(fit_size);

        let fit_xs = select_rows(xs, fit_idx);
        let fit_ys: Vec<f64> = fit_idx.iter().map(|&i| ys[i]).collect();
        let design_max = basis.evaluate_matrix(j_max, &fit_xs)?;
        let full = FwFit::fit(&design_max, &fit_ys)?;

        let val_xs = select_rows(xs, val_idx);
        let val_phi_max = basis.evaluate_matrix(j_max, &val_xs)?;

        let mut best: Option<(usize, f64)> = None;
        for &j in &grid {
            let sub = truncate_fit(&full, j);
            let predictor = sub.predictor();
            let mut sse = 0.0;
            for (row, &i) in val_idx.iter().enumerate() {
                let phi = DVector::from_fn(j, |c, _| val_phi_max[(row, c)]);
                let (fw, _, ls) = predictor.predict(&phi)?;
                let value = match kind {
                    SeriesKind::ForsterWarmuth => fw,
                    SeriesKind::LeastSquares => ls,
                };
                let err = value - ys[i];
                sse += err * err;
            }
            let mse = sse / val_idx.len() as f64;
            let better = match best {
                None => true,
                Some((best_j, best_mse)) => mse < best_mse || (mse == best_mse && j < best_j),
            };
            if better {
                best = Some((j, mse));
            }
        }
        let (selected_j, validation_mse) = best.expect("grid is nonempty");
        let model = FwModel {
            basis: Arc::clone(&basis),
            fit: truncate_fit(&full, selected_j),
        };
        repeats.push(CvRepeat {
            selected_j,
            validation_mse,
            model,
        });
    }
    Ok(CvSelection { kind, repeats })
}

/// Leading-submatrix restriction of a fit to a smaller truncation. Valid
/// because every basis sequence here is prefix-nested.
fn truncate_fit(full: &FwFit, j: usize) -> FwFit {
    FwFit {
        j,
        gram: full.gram.view((0, 0), (j, j)).into_owned(),
        moment: full.moment.rows(0, j).into_owned(),
        n: full.n,
        response_second_moment: full.response_second_moment,
    }
}

pub(crate) fn select_rows(xs: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), xs.ncols(), |r, c| xs[(idx[r], c)])
}

/// Supplies covariates and split-dependent pseudo-outcomes to [`crossfit`].
/// Implementations fit their nuisances on `nuisance_idx` and return one
/// pseudo-outcome per entry of `target_idx`.
pub trait CrossfitPlan {
    fn len(&self) -> usize;
    fn covariate(&self, index: usize) -> &[f64];
    fn pseudo_outcomes(
        &self,
        nuisance_idx: &[usize],
        target_idx: &[usize],
    ) -> Result<Vec<f64>, FwError>;
}

/// Fold-averaged Forster–Warmuth predictor.
pub struct CrossfitModel {
    pub folds: Vec<FwModel>,
}

impl CrossfitModel {
    pub fn predict_at(&self, x: &[f64]) -> Result<f64, FwError> {
        let mut total = 0.0;
        for fold in &self.folds {
            total += fold.predict_at(x)?;
        }
        Ok(total / self.folds.len() as f64)
    }
}

/// Cross-fitting: for each fold, nuisances are fitted on the complement,
/// pseudo-outcomes are built on the fold, and a Forster–Warmuth regression is
/// fitted on the fold. The returned predictor averages the per-fold fits.
pub fn crossfit(
    plan: &dyn CrossfitPlan,
    basis: Arc<BasisSequence>,
    j: usize,
    n_folds: usize,
    seed: u64,
) -> Result<CrossfitModel, FwError> {
    if n_folds < 2 {
        return Err(FwError::InvalidCv("cross-fitting needs at least 2 folds".into()));
    }
    let n = plan.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (pos, &record) in order.iter().enumerate() {
        assignment[record] = pos % n_folds;
    }
    crossfit_with_folds(plan, basis, j, &assignment)
}

/// Cross-fitting with an explicit fold assignment (`assignment[i]` is record
/// i's fold).
pub fn crossfit_with_folds(
    plan: &dyn CrossfitPlan,
    basis: Arc<BasisSequence>,
    j: usize,
    assignment: &[usize],
) -> Result<CrossfitModel, FwError> {
    let n = plan.len();
    if assignment.len() != n {
        return Err(FwError::ShapeMismatch(format!(
            "{} fold labels for {} records",
            assignment.len(),
            n
        )));
    }
    let n_folds = assignment.iter().copied().max().map_or(0, |m| m + 1);
    if n_folds < 2 {
        return Err(FwError::InvalidCv("cross-fitting needs at least 2 folds".into()));
    }
    let mut folds = Vec::with_capacity(n_folds);
    for fold in 0..n_folds {
        let target_idx: Vec<usize> = (0..n).filter(|&i| assignment[i] == fold).collect();
        let nuisance_idx: Vec<usize> = (0..n).filter(|&i| assignment[i] != fold).collect();
        if target_idx.is_empty() {
            return Err(FwError::FoldTooSmall { fold, len: 0 });
        }
        if nuisance_idx.is_empty() {
            return Err(FwError::FoldTooSmall { fold, len: 0 });
        }
        let pseudo = plan.pseudo_outcomes(&nuisance_idx, &target_idx)?;
        if pseudo.len() != target_idx.len() {
            return Err(FwError::Plan(format!(
                "plan returned {} pseudo-outcomes for {} targets",
                pseudo.len(),
                target_idx.len()
            )));
        }
        let dim = plan.covariate(0).len();
        let xs = DMatrix::from_fn(target_idx.len(), dim, |r, c| plan.covariate(target_idx[r])[c]);
        folds.push(FwModel::fit(Arc::clone(&basis), j, &xs, &pseudo)?);
    }
    Ok(CrossfitModel { folds })
}

/// Inputs of the finite-sample risk bound.
#[derive(Debug, Clone)]
pub struct RiskBoundInputs {
    /// Almost-sure bound on `E[Y^2 | X]`.
    pub sigma2: f64,
    /// Bound on the covariate density.
    pub kappa: f64,
    /// Approximation error bound `gamma_J` at the chosen truncation.
    pub gamma_j: f64,
    pub j: usize,
    pub n: usize,
}

/// `2 sigma^2 J / n + kappa gamma_J^2`.
pub fn risk_bound(inputs: &RiskBoundInputs) -> Result<f64, FwError> {
    if inputs.sigma2 < 0.0 || inputs.kappa < 0.0 || inputs.gamma_j < 0.0 {
        return Err(FwError::ShapeMismatch(
            "risk bound inputs must be nonnegative".into(),
        ));
    }
    if inputs.j < 1 || inputs.n < 1 {
        return Err(FwError::ShapeMismatch("risk bound needs J >= 1 and n >= 1".into()));
    }
    Ok(2.0 * inputs.sigma2 * inputs.j as f64 / inputs.n as f64
        + inputs.kappa * inputs.gamma_j * inputs.gamma_j)
}

/// Smallest `k` with `gamma(k)^2 <= sigma^2 k / n`, scanning up to `cap`.
/// `gamma` must be nonincreasing.
pub fn optimal_j(
    sigma2: f64,
    n: usize,
    gamma: impl Fn(usize) -> f64,
    cap: usize,
) -> Result<usize, FwError> {
    for k in 1..=cap {
        let g = gamma(k);
        if g * g <= sigma2 * k as f64 / n as f64 {
            return Ok(k);
        }
    }
    Err(FwError::TruncationCap { cap })
}
