//! Group-LASSO-penalized logistic regression with one group per view.
//!
//! Minimizes (1/N)·logistic loss + λ Σ_m √D_m ‖w^(m)‖₂ by block coordinate
//! descent, each block taking a majorize-minimize step under the quadratic
//! bound with Hessian constant ¼. The step is a group soft-threshold, so
//! whole views are zeroed out. Features are standardized internally;
//! reported coefficients are on the original scale.

use nalgebra::{DMatrix, DVector};
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::math::{log1pexp, sigmoid};

/// Per-view feature standardization (mean 0, sd 1) captured at fit time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<DVector<f64>>,
    pub sds: Vec<DVector<f64>>,
}

impl Standardizer {
    fn fit(views: &[DMatrix<f64>]) -> Self {
        let n = views[0].nrows() as f64;
        let mut means = Vec::with_capacity(views.len());
        let mut sds = Vec::with_capacity(views.len());
        for v in views {
            let mean = v.row_mean().transpose();
            let mut sd = DVector::zeros(v.ncols());
            for j in 0..v.ncols() {
                let col = v.column(j);
                let var = col.iter().map(|x| (x - mean[j]).powi(2)).sum::<f64>() / n;
                sd[j] = var.sqrt();
            }
            means.push(mean);
            sds.push(sd);
        }
        Self { means, sds }
    }

    fn apply(&self, views: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        views
            .iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(v, (mean, sd))| {
                DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| {
                    if sd[j] > 1e-12 {
                        (v[(i, j)] - mean[j]) / sd[j]
                    } else {
                        0.0
                    }
                })
            })
            .collect()
    }
}

/// Fitted group-LASSO logistic model.
///
/// `intercept` and `weights` are on the original feature scale. The path,
/// CV curve, per-path active-group counts and the block-update objective
/// trace of the final solve are retained for diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GLassoModel {
    pub intercept: f64,
    pub weights: Vec<DVector<f64>>,
    pub lambda_selected: f64,
    pub lambda_path: Vec<f64>,
    /// Mean validation log-loss per path point (empty when CV was skipped).
    pub cv_curve: Vec<f64>,
    pub scaler: Standardizer,
    /// Penalized objective after every block update of the final solve at
    /// `lambda_selected`; non-increasing by construction of the MM step.
    pub objective_trace: Vec<f64>,
    /// Active-group count per path point at the final all-data refit.
    pub path_active_counts: Vec<usize>,
}

/// KKT residuals of the fitted solution in the standardized problem.
#[derive(Debug, Clone)]
pub struct KktReport {
    /// max(0, ‖∇_m loss‖₂ − λ√D_m) per zero group (0.0 for active groups).
    pub zero_group_excess: Vec<f64>,
    /// ‖∇_m loss + λ√D_m w_m/‖w_m‖‖₂ per active group (0.0 for zero groups).
    pub active_group_residual: Vec<f64>,
    /// |mean(σ(η) − r)| for the unpenalized intercept.
    pub intercept_residual: f64,
    pub active: Vec<bool>,
}

struct Problem {
    xs: Vec<DMatrix<f64>>,
    r: DVector<f64>,
    /// Majorization constants σ_max(X_mᵀX_m)/(4N) per group.
    lips: Vec<f64>,
    penalty_scale: Vec<f64>,
    n: usize,
}

impl Problem {
    fn new(views: &[DMatrix<f64>], labels: &[u8], scaler: &Standardizer) -> Self {
        let xs = scaler.apply(views);
        let n = views[0].nrows();
        let lips = xs
            .iter()
            .map(|x| {
                let gram = x.transpose() * x;
                let eig = gram.symmetric_eigenvalues();
                eig.iter().cloned().fold(0.0, f64::max) / (4.0 * n as f64)
            })
            .collect();
        let penalty_scale = xs.iter().map(|x| (x.ncols() as f64).sqrt()).collect();
        let r = DVector::from_iterator(n, labels.iter().map(|&l| l as f64));
        Self { xs, r, lips, penalty_scale, n }
    }

    fn linear_scores(&self, sol: &Solution) -> DVector<f64> {
        let mut eta = DVector::from_element(self.n, sol.intercept);
        for (x, w) in self.xs.iter().zip(&sol.weights) {
            eta += x * w;
        }
        eta
    }

    fn mean_log_loss(&self, eta: &DVector<f64>) -> f64 {
        let mut loss = 0.0;
        for i in 0..self.n {
            loss += log1pexp(eta[i]) - self.r[i] * eta[i];
        }
        loss / self.n as f64
    }

    fn objective(&self, sol: &Solution, eta: &DVector<f64>, lambda: f64) -> f64 {
        let penalty: f64 = sol
            .weights
            .iter()
            .zip(&self.penalty_scale)
            .map(|(w, s)| s * w.norm())
            .sum();
        self.mean_log_loss(eta) + lambda * penalty
    }

    fn group_gradient(&self, m: usize, eta: &DVector<f64>) -> DVector<f64> {
        let probs = DVector::from_iterator(self.n, eta.iter().map(|&e| sigmoid(e)));
        self.xs[m].transpose() * (probs - &self.r) / self.n as f64
    }

    fn kkt_residual(&self, sol: &Solution, eta: &DVector<f64>, lambda: f64) -> f64 {
        let probs = DVector::from_iterator(self.n, eta.iter().map(|&e| sigmoid(e)));
        let res = probs - &self.r;
        let mut worst: f64 = (res.sum() / self.n as f64).abs();
        for m in 0..self.xs.len() {
            let g = self.xs[m].transpose() * &res / self.n as f64;
            let w = &sol.weights[m];
            let bound = lambda * self.penalty_scale[m];
            let r_m = if w.norm() == 0.0 {
                (g.norm() - bound).max(0.0)
            } else {
                (g + w * (bound / w.norm())).norm()
            };
            worst = worst.max(r_m);
        }
        worst
    }

    /// λ at which every group is zero at the optimal empty-model intercept.
    fn lambda_max(&self) -> f64 {
        let p_bar = self.r.sum() / self.n as f64;
        let res = DVector::from_element(self.n, p_bar) - &self.r;
        let mut lam: f64 = 0.0;
        for (x, scale) in self.xs.iter().zip(&self.penalty_scale) {
            let g = x.transpose() * &res / self.n as f64;
            lam = lam.max(g.norm() / scale);
        }
        lam
    }
}

#[derive(Debug, Clone)]
struct Solution {
    intercept: f64,
    weights: Vec<DVector<f64>>,
}

impl Solution {
    fn zeros(dims: &[usize]) -> Self {
        Self {
            intercept: 0.0,
            weights: dims.iter().map(|&d| DVector::zeros(d)).collect(),
        }
    }
}

const KKT_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 2_000;

/// Block coordinate descent at one λ; warm-starts from `sol`.
///
/// Stops on the KKT residual, or once the objective stalls at floating-point
/// resolution (separable subproblems at tiny λ drift forever otherwise).
fn solve(
    prob: &Problem,
    lambda: f64,
    sol: &mut Solution,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<()> {
    let mut eta = prob.linear_scores(sol);
    if let Some(t) = trace.as_deref_mut() {
        t.push(prob.objective(sol, &eta, lambda));
    }
    let mut prev_obj = f64::INFINITY;
    let mut stalled = 0usize;
    for _sweep in 0..MAX_SWEEPS {
        // Intercept: unpenalized MM step with curvature bound 1/4.
        let probs = DVector::from_iterator(prob.n, eta.iter().map(|&e| sigmoid(e)));
        let g0 = (probs - &prob.r).sum() / prob.n as f64;
        let delta = -4.0 * g0;
        if delta != 0.0 {
            sol.intercept += delta;
            eta.add_scalar_mut(delta);
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(prob.objective(sol, &eta, lambda));
        }

        for m in 0..prob.xs.len() {
            let lip = prob.lips[m];
            if lip <= 0.0 {
                continue; // constant view, gradient identically zero
            }
            let g = prob.group_gradient(m, &eta);
            let u = &sol.weights[m] - g / lip;
            let threshold = lambda * prob.penalty_scale[m] / lip;
            let u_norm = u.norm();
            let new_w = if u_norm <= threshold * (1.0 + 1e-12) {
                DVector::zeros(u.len())
            } else {
                &u * (1.0 - threshold / u_norm)
            };
            let diff = &new_w - &sol.weights[m];
            if diff.norm_squared() > 0.0 {
                eta += &prob.xs[m] * &diff;
                sol.weights[m] = new_w;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(prob.objective(sol, &eta, lambda));
            }
        }

        if prob.kkt_residual(sol, &eta, lambda) <= KKT_TOL {
            return Ok(());
        }
        if eta.iter().any(|e| !e.is_finite()) {
            return Err(Error::Numerical("non-finite loss during group-LASSO descent".into()));
        }
        let obj = prob.objective(sol, &eta, lambda);
        if (prev_obj - obj).abs() <= 1e-15 * obj.abs().max(1.0) {
            stalled += 1;
            if stalled >= 3 {
                return Ok(());
            }
        } else {
            stalled = 0;
        }
        prev_obj = obj;
    }
    // Accept the last iterate; the KKT tolerance is far below the
    // reporting tolerance, so near-misses are still usable fits.
    log::debug!("group-LASSO solver hit the sweep limit at lambda = {lambda}");
    Ok(())
}

fn log_spaced_path(lambda_max: f64, n_lambda: usize) -> Vec<f64> {
    if n_lambda == 1 {
        return vec![lambda_max];
    }
    let lo = lambda_max * 1e-3;
    (0..n_lambda)
        .map(|i| {
            let f = i as f64 / (n_lambda - 1) as f64;
            (lambda_max.ln() * (1.0 - f) + lo.ln() * f).exp()
        })
        .collect()
}

/// Stratified fold ids (round-robin within each class after a seeded
/// shuffle); every fold contains both classes because the fold count never
/// exceeds the minority class count.
fn stratified_folds(labels: &[u8], n_folds: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut fold_of = vec![0usize; labels.len()];
    for class in [0u8, 1u8] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold_of[i] = pos % n_folds;
        }
    }
    fold_of
}

/// Fits the group-LASSO baseline: λ path from λ_max down by 1e-3,
/// stratified cross-validation on mean validation log-loss, final refit on
/// all data at the selected λ.
pub fn fit_glasso(
    dataset: &MultiViewDataset,
    n_lambda: usize,
    cv_folds: usize,
    seed: u64,
) -> Result<GLassoModel> {
    let labels = dataset.require_labels()?;
    if n_lambda == 0 || cv_folds == 0 {
        return Err(Error::InvalidData("need n_lambda ≥ 1 and cv_folds ≥ 1".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidData("group-LASSO training needs both classes".into()));
    }

    let scaler = Standardizer::fit(dataset.views());
    let prob = Problem::new(dataset.views(), labels, &scaler);
    let lambda_max = prob.lambda_max().max(1e-300);
    let path = log_spaced_path(lambda_max, n_lambda);

    // Cross-validation; the fold count is capped by the minority class so
    // stratification is always feasible. With fewer than two usable folds,
    // CV is impossible and the fully shrunk model is selected.
    let folds = cv_folds.min(n_pos).min(n_neg);
    let cv_curve: Vec<f64> = if folds >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fold_of = stratified_folds(labels, folds, &mut rng);
        let mut curve = vec![0.0; path.len()];
        for f in 0..folds {
            let train_idx: Vec<usize> = (0..labels.len()).filter(|&i| fold_of[i] != f).collect();
            let val_idx: Vec<usize> = (0..labels.len()).filter(|&i| fold_of[i] == f).collect();
            let train = dataset.subset(&train_idx)?;
            let val = dataset.subset(&val_idx)?;
            let fold_scaler = Standardizer::fit(train.views());
            let fold_prob = Problem::new(train.views(), train.require_labels()?, &fold_scaler);
            let val_xs = fold_scaler.apply(val.views());
            let val_r: Vec<f64> = val.require_labels()?.iter().map(|&l| l as f64).collect();
            let mut sol = Solution::zeros(&train.view_dims());
            for (j, &lam) in path.iter().enumerate() {
                solve(&fold_prob, lam, &mut sol, None)?;
                let mut eta = DVector::from_element(val.n_samples(), sol.intercept);
                for (x, w) in val_xs.iter().zip(&sol.weights) {
                    eta += x * w;
                }
                let loss: f64 = (0..val.n_samples())
                    .map(|i| log1pexp(eta[i]) - val_r[i] * eta[i])
                    .sum::<f64>()
                    / val.n_samples() as f64;
                curve[j] += loss / folds as f64;
            }
        }
        curve
    } else {
        Vec::new()
    };

    let selected_idx = if cv_curve.is_empty() {
        0
    } else {
        let mut best = 0;
        for (j, &v) in cv_curve.iter().enumerate() {
            if v < cv_curve[best] {
                best = j;
            }
        }
        best
    };

    // Final path refit on all data, keeping the solution at the selected λ.
    let mut sol = Solution::zeros(&dataset.view_dims());
    let mut path_active_counts = Vec::with_capacity(path.len());
    let mut objective_trace = Vec::new();
    let mut selected_sol = None;
    for (j, &lam) in path.iter().enumerate() {
        let trace = if j == selected_idx { Some(&mut objective_trace) } else { None };
        solve(&prob, lam, &mut sol, trace)?;
        path_active_counts.push(sol.weights.iter().filter(|w| w.norm() > 0.0).count());
        if j == selected_idx {
            selected_sol = Some(sol.clone());
        }
    }
    let sol = selected_sol.expect("selected index visited");

    // Coefficients back on the original scale.
    let mut intercept = sol.intercept;
    let weights: Vec<DVector<f64>> = sol
        .weights
        .iter()
        .zip(scaler.means.iter().zip(&scaler.sds))
        .map(|(w, (mean, sd))| {
            let mut orig = DVector::zeros(w.len());
            for j in 0..w.len() {
                if sd[j] > 1e-12 {
                    orig[j] = w[j] / sd[j];
                    intercept -= w[j] * mean[j] / sd[j];
                }
            }
            orig
        })
        .collect();

    Ok(GLassoModel {
        intercept,
        weights,
        lambda_selected: path[selected_idx],
        lambda_path: path,
        cv_curve,
        scaler,
        objective_trace,
        path_active_counts,
    })
}

/// Solves the penalized problem at one fixed λ (no CV, cold start).
pub fn fit_glasso_at_lambda(dataset: &MultiViewDataset, lambda: f64) -> Result<GLassoModel> {
    let labels = dataset.require_labels()?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidData(format!("lambda must be ≥ 0, got {lambda}")));
    }
    let scaler = Standardizer::fit(dataset.views());
    let prob = Problem::new(dataset.views(), labels, &scaler);
    let mut sol = Solution::zeros(&dataset.view_dims());
    let mut trace = Vec::new();
    solve(&prob, lambda, &mut sol, Some(&mut trace))?;

    let mut intercept = sol.intercept;
    let weights: Vec<DVector<f64>> = sol
        .weights
        .iter()
        .zip(scaler.means.iter().zip(&scaler.sds))
        .map(|(w, (mean, sd))| {
            let mut orig = DVector::zeros(w.len());
            for j in 0..w.len() {
                if sd[j] > 1e-12 {
                    orig[j] = w[j] / sd[j];
                    intercept -= w[j] * mean[j] / sd[j];
                }
            }
            orig
        })
        .collect();
    Ok(GLassoModel {
        intercept,
        weights,
        lambda_selected: lambda,
        lambda_path: vec![lambda],
        cv_curve: Vec::new(),
        scaler,
        objective_trace: trace,
        path_active_counts: vec![sol.weights.iter().filter(|w| w.norm() > 0.0).count()],
    })
}

/// σ(intercept + Σ_m x^(m)·w^(m)) per sample, on the original scale.
pub fn predict_glasso(model: &GLassoModel, data: &MultiViewDataset) -> Result<Vec<f64>> {
    if data.view_dims() != model.weights.iter().map(|w| w.len()).collect::<Vec<_>>() {
        return Err(Error::ShapeMismatch(format!(
            "data views {:?} do not match model weight dims {:?}",
            data.view_dims(),
            model.weights.iter().map(|w| w.len()).collect::<Vec<_>>()
        )));
    }
    let n = data.n_samples();
    let mut eta = DVector::from_element(n, model.intercept);
    for (x, w) in data.views().iter().zip(&model.weights) {
        eta += x * w;
    }
    Ok(eta.iter().map(|&e| sigmoid(e)).collect())
}

/// Reconstructs the standardized-space solution of a fitted model.
fn standardized_solution(model: &GLassoModel) -> Solution {
    let mut intercept = model.intercept;
    let weights: Vec<DVector<f64>> = model
        .weights
        .iter()
        .zip(model.scaler.means.iter().zip(&model.scaler.sds))
        .map(|(w, (mean, sd))| {
            let mut std_w = DVector::zeros(w.len());
            for j in 0..w.len() {
                std_w[j] = w[j] * sd[j];
                intercept += w[j] * mean[j];
            }
            std_w
        })
        .collect();
    Solution { intercept, weights }
}

/// The penalized objective the solver descends, evaluated for `model`'s
/// coefficients on `dataset` in the model's standardized feature space.
pub fn glasso_objective(model: &GLassoModel, dataset: &MultiViewDataset, lambda: f64) -> Result<f64> {
    let labels = dataset.require_labels()?;
    let prob = Problem::new(dataset.views(), labels, &model.scaler);
    let sol = standardized_solution(model);
    let eta = prob.linear_scores(&sol);
    Ok(prob.objective(&sol, &eta, lambda))
}

/// KKT residuals of the model's solution on `dataset` at its selected λ.
pub fn kkt_residuals(model: &GLassoModel, dataset: &MultiViewDataset) -> Result<KktReport> {
    let labels = dataset.require_labels()?;
    let prob = Problem::new(dataset.views(), labels, &model.scaler);
    let sol = standardized_solution(model);
    let eta = prob.linear_scores(&sol);
    let lambda = model.lambda_selected;
    let probs = DVector::from_iterator(prob.n, eta.iter().map(|&e| sigmoid(e)));
    let res = probs - &prob.r;
    let intercept_residual = (res.sum() / prob.n as f64).abs();
    let mut zero_group_excess = Vec::new();
    let mut active_group_residual = Vec::new();
    let mut active = Vec::new();
    for m in 0..prob.xs.len() {
        let g = prob.xs[m].transpose() * &res / prob.n as f64;
        let w = &sol.weights[m];
        let bound = lambda * prob.penalty_scale[m];
        if w.norm() == 0.0 {
            zero_group_excess.push((g.norm() - bound).max(0.0));
            active_group_residual.push(0.0);
            active.push(false);
        } else {
            zero_group_excess.push(0.0);
            active_group_residual.push((g + w * (bound / w.norm())).norm());
            active.push(true);
        }
    }
    Ok(KktReport {
        zero_group_excess,
        active_group_residual,
        intercept_residual,
        active,
    })
}
