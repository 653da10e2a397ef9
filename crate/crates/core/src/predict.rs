//! Prediction for unseen samples and cluster-specific reconstruction.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::inference::TrainedModel;
use crate::math::{log_sum_exp, LN_2PI};

/// Per-sample cluster responsibilities and class-1 probabilities for a
/// test set.
#[derive(Debug, Clone)]
pub struct PredictionResult {
    /// N_test × S row-stochastic matrix.
    pub responsibilities: DMatrix<f64>,
    /// P(r = 1) per test sample.
    pub prob_class1: Vec<f64>,
}

/// Scores unseen samples against each cluster's marginal Gaussian.
///
/// Loadings and noise precisions enter at their posterior means; the latent
/// is integrated out exactly under those point parameters, giving
/// log p(x | c) in closed form through the (K+K̂)-dimensional precision
/// Λ_c = I + Σ_m τ̂ W̃ᵀW̃. The label term is omitted (labels are unknown at
/// test time); responsibilities are the softmax of log π̄_c + log p(x | c)
/// and P(r=1) = Σ_c resp_c E[γ_c].
pub fn predict(model: &TrainedModel, new_data: &MultiViewDataset) -> Result<PredictionResult> {
    if new_data.view_dims() != model.view_dims {
        return Err(Error::ShapeMismatch(format!(
            "test views {:?} do not match model views {:?}",
            new_data.view_dims(),
            model.view_dims
        )));
    }
    let state = &model.state;
    let s = state.n_clusters();
    let t = state.total_factors();
    let n = new_data.n_samples();
    let m_views = new_data.n_views();
    let d_tot: f64 = model.view_dims.iter().sum::<usize>() as f64;

    let log_pi_bar: Vec<f64> = state.mean_pi().iter().map(|p| p.ln()).collect();
    let e_gamma: Vec<f64> = state.q_gamma.iter().map(|g| g.mean()).collect();

    // Per cluster: precision Λ_c, its Cholesky, log det Σ_x, and the
    // τ-scaled loading means for the information vector.
    struct ClusterScore {
        chol: Option<Cholesky<f64, nalgebra::Dyn>>,
        log_det_term: f64,
        tau: Vec<f64>,
        loadings: Vec<DMatrix<f64>>,
    }
    let mut per_cluster = Vec::with_capacity(s);
    for c in 0..s {
        let mut prec = DMatrix::identity(t, t);
        let mut tau = Vec::with_capacity(m_views);
        let mut loadings = Vec::with_capacity(m_views);
        let mut log_det_noise = 0.0;
        for m in 0..m_views {
            let tau_cm = state.q_tau[c][m].mean();
            let w = state.loading_mean_concat(c, m);
            prec += w.transpose() * &w * tau_cm;
            log_det_noise -= model.view_dims[m] as f64 * tau_cm.ln();
            tau.push(tau_cm);
            loadings.push(w);
        }
        let chol = if t > 0 {
            Some(
                Cholesky::new(prec)
                    .ok_or_else(|| Error::Numerical("predictive precision not PD".into()))?,
            )
        } else {
            None
        };
        // log det Σ_x = log det Λ_c − Σ_m D_m log τ̂_cm
        let log_det_lambda = chol
            .as_ref()
            .map(|ch| 2.0 * ch.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
            .unwrap_or(0.0);
        per_cluster.push(ClusterScore {
            chol,
            log_det_term: log_det_lambda + log_det_noise,
            tau,
            loadings,
        });
    }

    let mut responsibilities = DMatrix::zeros(n, s);
    let mut prob_class1 = Vec::with_capacity(n);
    let mut scores = vec![0.0; s];
    for i in 0..n {
        for (c, cs) in per_cluster.iter().enumerate() {
            let mut x_sq = 0.0;
            let mut info = DVector::zeros(t);
            for m in 0..m_views {
                let x = new_data.view(m).row(i).transpose();
                x_sq += cs.tau[m] * x.norm_squared();
                if t > 0 {
                    info += cs.loadings[m].transpose() * x * cs.tau[m];
                }
            }
            let quad = match &cs.chol {
                Some(ch) => x_sq - info.dot(&ch.solve(&info)),
                None => x_sq,
            };
            scores[c] = log_pi_bar[c] - 0.5 * (d_tot * LN_2PI + cs.log_det_term + quad);
        }
        let norm = log_sum_exp(&scores);
        if !norm.is_finite() {
            return Err(Error::Numerical(format!(
                "predictive score for sample {i} is not finite"
            )));
        }
        let mut row_sum = 0.0;
        for c in 0..s {
            responsibilities[(i, c)] = (scores[c] - norm).exp();
            row_sum += responsibilities[(i, c)];
        }
        let mut p = 0.0;
        for c in 0..s {
            responsibilities[(i, c)] /= row_sum;
            p += responsibilities[(i, c)] * e_gamma[c];
        }
        prob_class1.push(p.clamp(0.0, 1.0));
    }

    Ok(PredictionResult { responsibilities, prob_class1 })
}

/// Reconstruction X̂^(m) = E[Z] E[W_c^(m)]ᵀ per view for the training
/// samples, optionally adding the shared block E[Ẑ] E[Ŵ^(m)]ᵀ.
pub fn reconstruct(
    model: &TrainedModel,
    cluster: usize,
    with_shared: bool,
) -> Result<Vec<DMatrix<f64>>> {
    let state = &model.state;
    if cluster >= state.n_clusters() {
        return Err(Error::ShapeMismatch(format!(
            "cluster index {cluster} out of range for {} clusters",
            state.n_clusters()
        )));
    }
    let z_spec = state.q_z.mean.columns(0, state.k);
    let z_shared = state.q_z.mean.columns(state.k, state.k_hat);
    let out = (0..state.n_views())
        .map(|m| {
            let mut x = z_spec * state.q_w[cluster][m].mean.transpose();
            if with_shared {
                x += z_shared * state.q_what[m].mean.transpose();
            }
            x
        })
        .collect();
    Ok(out)
}

/// The shared-block reconstruction E[Ẑ] E[Ŵ^(m)]ᵀ per view.
pub fn reconstruct_shared(model: &TrainedModel) -> Vec<DMatrix<f64>> {
    let state = &model.state;
    let z_shared = state.q_z.mean.columns(state.k, state.k_hat);
    (0..state.n_views())
        .map(|m| z_shared * state.q_what[m].mean.transpose())
        .collect()
}

/// Arithmetic mean over the masked rows, per view.
pub fn trial_average(recon: &[DMatrix<f64>], trial_mask: &[bool]) -> Result<Vec<DVector<f64>>> {
    let selected: Vec<usize> = trial_mask
        .iter()
        .enumerate()
        .filter_map(|(i, &keep)| keep.then_some(i))
        .collect();
    if selected.is_empty() {
        return Err(Error::InvalidData("trial mask selects no trials".into()));
    }
    recon
        .iter()
        .map(|x| {
            if x.nrows() != trial_mask.len() {
                return Err(Error::ShapeMismatch(format!(
                    "mask length {} does not match {} trials",
                    trial_mask.len(),
                    x.nrows()
                )));
            }
            let mut mean = DVector::zeros(x.ncols());
            for &i in &selected {
                mean += x.row(i).transpose();
            }
            Ok(mean / selected.len() as f64)
        })
        .collect()
}
