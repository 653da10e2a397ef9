//! Coordinate-ascent updates for every mean-field factor.
//!
//! Each update sets its factor to the exact optimizer of the evidence lower
//! bound given all other factors, so the bound is non-decreasing across any
//! update. The β-weighted label likelihood enters the responsibility and
//! label-probability updates, matching the objective in `elbo`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparameters;
use crate::math::{log_sum_exp, LN_2PI};

use super::state::{BetaQ, GammaQ, VariationalState};

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn spd_inverse(mut prec: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    symmetrize(&mut prec);
    let chol = Cholesky::new(prec)
        .ok_or_else(|| Error::Numerical(format!("non-positive-definite {what} precision")))?;
    let mut cov = chol.inverse();
    symmetrize(&mut cov);
    Ok(cov)
}

/// q([z; ẑ]) per sample: Gaussian with precision
/// I + Σ_c q_c[n,c] Σ_m E[τ] E[W̃ᵀW̃] and matching mean.
pub fn update_latents(state: &mut VariationalState, data: &MultiViewDataset) -> Result<()> {
    let n = state.n_samples();
    let s = state.n_clusters();
    let t = state.total_factors();
    if t == 0 {
        return Ok(());
    }
    // H_c = Σ_m E[τ_cm] E[W̃ᵀW̃]; Y_c[n,:] = Σ_m E[τ_cm] x_n^(m)ᵀ E[W̃_cm]
    let mut h = vec![DMatrix::zeros(t, t); s];
    let mut y = vec![DMatrix::zeros(n, t); s];
    for c in 0..s {
        for m in 0..data.n_views() {
            let etau = state.q_tau[c][m].mean();
            h[c] += state.loading_second_moment(c, m) * etau;
            y[c] += data.view(m) * state.loading_mean_concat(c, m) * etau;
        }
    }
    for i in 0..n {
        let mut prec = DMatrix::identity(t, t);
        let mut b = DVector::zeros(t);
        for c in 0..s {
            let q = state.q_c[(i, c)];
            if q > 0.0 {
                prec += &h[c] * q;
                b += y[c].row(i).transpose() * q;
            }
        }
        symmetrize(&mut prec);
        let chol = Cholesky::new(prec)
            .ok_or_else(|| Error::Numerical("non-positive-definite latent precision".into()))?;
        let mu = chol.solve(&b);
        let mut cov = chol.inverse();
        symmetrize(&mut cov);
        state.q_z.mean.row_mut(i).copy_from(&mu.transpose());
        state.q_z.cov[i] = cov;
    }
    Ok(())
}

/// q(W_c^(m)) and q(Ŵ^(m)) row updates; all cluster-specific blocks first,
/// then the shared blocks, each using the freshest other factors.
pub fn update_loadings(state: &mut VariationalState, data: &MultiViewDataset) -> Result<()> {
    let s_tt = weighted_latent_moments(state);
    update_cluster_loadings(state, data, &s_tt)?;
    update_shared_loadings(state, data, &s_tt)
}

/// Σ_n q_c[n,c] E[t_n t_nᵀ] per cluster.
pub(crate) fn weighted_latent_moments(state: &VariationalState) -> Vec<DMatrix<f64>> {
    let n = state.n_samples();
    let s = state.n_clusters();
    let t = state.total_factors();
    let mut s_tt: Vec<DMatrix<f64>> = vec![DMatrix::zeros(t, t); s];
    for i in 0..n {
        let ett = state.q_z.second_moment(i);
        for c in 0..s {
            let q = state.q_c[(i, c)];
            if q > 0.0 {
                s_tt[c] += &ett * q;
            }
        }
    }
    s_tt
}

pub(crate) fn update_cluster_loadings(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    s_tt: &[DMatrix<f64>],
) -> Result<()> {
    let n = state.n_samples();
    let s = state.n_clusters();
    let m_views = data.n_views();
    let (k, k_hat) = (state.k, state.k_hat);

    let e_z = state.q_z.mean.columns(0, k).into_owned();

    if k > 0 {
        for c in 0..s {
            let s_zz = s_tt[c].view((0, 0), (k, k)).into_owned();
            let s_z_zhat = s_tt[c].view((0, k), (k, k_hat)).into_owned();
            // Σ_n q_c[n,c] x_n E[z_n]ᵀ, batched as X_mᵀ (q ⊙ E[Z]).
            let mut weighted_z = e_z.clone();
            for i in 0..n {
                let q = state.q_c[(i, c)];
                let mut row = weighted_z.row_mut(i);
                row *= q;
            }
            for m in 0..m_views {
                let etau = state.q_tau[c][m].mean();
                let e_alpha =
                    DVector::from_iterator(k, state.q_alpha[c][m].iter().map(GammaQ::mean));
                let prec = DMatrix::from_diagonal(&e_alpha) + &s_zz * etau;
                let cov = spd_inverse(prec, "loading")?;
                let mut rhs = data.view(m).transpose() * &weighted_z;
                if k_hat > 0 {
                    rhs -= &state.q_what[m].mean * s_z_zhat.transpose();
                }
                let mean = rhs * &cov * etau;
                state.q_w[c][m].mean = mean;
                state.q_w[c][m].row_cov = cov;
            }
        }
    }

    Ok(())
}

pub(crate) fn update_shared_loadings(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    s_tt: &[DMatrix<f64>],
) -> Result<()> {
    let n = state.n_samples();
    let s = state.n_clusters();
    let m_views = data.n_views();
    let (k, k_hat) = (state.k, state.k_hat);

    let e_zhat = state.q_z.mean.columns(k, k_hat).into_owned();

    if k_hat > 0 {
        for m in 0..m_views {
            let e_alpha_hat =
                DVector::from_iterator(k_hat, state.q_alpha_hat[m].iter().map(GammaQ::mean));
            let mut prec = DMatrix::from_diagonal(&e_alpha_hat);
            let d_m = data.view(m).ncols();
            let mut rhs = DMatrix::zeros(d_m, k_hat);
            // Per-sample weight Σ_c q_c[n,c] E[τ_cm] folds the mixture into
            // one pass over the data.
            let mut w_n = vec![0.0; n];
            for c in 0..s {
                let etau = state.q_tau[c][m].mean();
                for i in 0..n {
                    w_n[i] += state.q_c[(i, c)] * etau;
                }
                prec += s_tt[c].view((k, k), (k_hat, k_hat)) * etau;
                if k > 0 {
                    let s_z_zhat = s_tt[c].view((0, k), (k, k_hat)).into_owned();
                    rhs -= &state.q_w[c][m].mean * s_z_zhat * etau;
                }
            }
            let mut weighted_zhat = e_zhat.clone();
            for i in 0..n {
                let mut row = weighted_zhat.row_mut(i);
                row *= w_n[i];
            }
            rhs += data.view(m).transpose() * weighted_zhat;
            let cov = spd_inverse(prec, "shared loading")?;
            let mean = rhs * &cov;
            state.q_what[m].mean = mean;
            state.q_what[m].row_cov = cov;
        }
    }
    Ok(())
}

/// Conjugate ARD updates for both loading blocks.
pub fn update_ard(state: &mut VariationalState, hyper: &Hyperparameters) {
    for c in 0..state.n_clusters() {
        for m in 0..state.n_views() {
            let d_m = state.q_w[c][m].mean.nrows() as f64;
            for k in 0..state.k {
                let sq = state.q_w[c][m].column_sq_norm(k);
                state.q_alpha[c][m][k] =
                    GammaQ::new(hyper.ard_shape + 0.5 * d_m, hyper.ard_rate + 0.5 * sq);
            }
        }
    }
    for m in 0..state.n_views() {
        let d_m = state.q_what[m].mean.nrows() as f64;
        for k in 0..state.k_hat {
            let sq = state.q_what[m].column_sq_norm(k);
            state.q_alpha_hat[m][k] = GammaQ::new(
                hyper.shared_ard_shape + 0.5 * d_m,
                hyper.shared_ard_rate + 0.5 * sq,
            );
        }
    }
}

/// Conjugate noise-precision updates with responsibility-weighted residuals.
pub fn update_noise(state: &mut VariationalState, data: &MultiViewDataset, hyper: &Hyperparameters) {
    let resid = state.expected_sq_residuals(data.views());
    let n = state.n_samples();
    for c in 0..state.n_clusters() {
        let n_c: f64 = state.q_c.column(c).sum();
        for (m, r) in resid.iter().enumerate() {
            let d_m = data.view(m).ncols() as f64;
            let mut sum = 0.0;
            for i in 0..n {
                sum += state.q_c[(i, c)] * r[(i, c)];
            }
            state.q_tau[c][m] =
                GammaQ::new(hyper.noise_shape + 0.5 * d_m * n_c, hyper.noise_rate + 0.5 * sum);
        }
    }
}

/// Responsibility update: softmax over expected log joint per cluster with
/// the β-weighted label term; rows normalized by log-sum-exp.
pub fn update_assignments(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
) -> Result<()> {
    let labels = data.require_labels()?;
    let n = state.n_samples();
    let s = state.n_clusters();
    let beta = hyper.beta_weight;
    let e_log_pi = state.mean_log_pi();
    let e_log_gamma: Vec<f64> = state.q_gamma.iter().map(BetaQ::mean_log).collect();
    let e_log_1m_gamma: Vec<f64> = state.q_gamma.iter().map(BetaQ::mean_log_comp).collect();
    let resid = state.expected_sq_residuals(data.views());

    let mut log_rho = vec![0.0; s];
    for i in 0..n {
        for (c, lr) in log_rho.iter_mut().enumerate() {
            let label_term = if labels[i] == 1 {
                e_log_gamma[c]
            } else {
                e_log_1m_gamma[c]
            };
            let mut ll = 0.0;
            for (m, r) in resid.iter().enumerate() {
                let d_m = data.view(m).ncols() as f64;
                let tau = &state.q_tau[c][m];
                ll += 0.5 * d_m * (tau.mean_log() - LN_2PI) - 0.5 * tau.mean() * r[(i, c)];
            }
            *lr = e_log_pi[c] + beta * label_term + ll;
        }
        let norm = log_sum_exp(&log_rho);
        if !norm.is_finite() {
            return Err(Error::Numerical(format!(
                "responsibility normalizer for sample {i} is not finite"
            )));
        }
        for (c, lr) in log_rho.iter().enumerate() {
            state.q_c[(i, c)] = (lr - norm).exp();
        }
        // Renormalize in linear space so each row sums to 1 exactly.
        let row_sum: f64 = state.q_c.row(i).sum();
        for c in 0..s {
            state.q_c[(i, c)] /= row_sum;
        }
    }
    Ok(())
}

/// Dirichlet update from responsibility counts.
pub fn update_mixture_weights(state: &mut VariationalState, hyper: &Hyperparameters) {
    for c in 0..state.n_clusters() {
        state.q_pi[c] = hyper.dirichlet_conc + state.q_c.column(c).sum();
    }
}

/// Beta updates for the per-cluster label probabilities with β-weighted
/// responsibility counts.
pub fn update_label_probs(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
) -> Result<()> {
    let labels = data.require_labels()?;
    let beta = hyper.beta_weight;
    for c in 0..state.n_clusters() {
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (i, &r) in labels.iter().enumerate() {
            let q = state.q_c[(i, c)];
            if r == 1 {
                pos += q;
            } else {
                neg += q;
            }
        }
        state.q_gamma[c] = BetaQ {
            a: hyper.beta_a + beta * pos,
            b: hyper.beta_b + beta * neg,
        };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::testutil::blank_state;
    use nalgebra::DMatrix;

    fn dataset_1d(xs: &[f64], labels: Option<Vec<u8>>) -> MultiViewDataset {
        let v = DMatrix::from_column_slice(xs.len(), 1, xs);
        MultiViewDataset::with_default_names(vec![v], labels).unwrap()
    }

    fn default_hyper(k: usize, k_hat: usize, s: usize) -> Hyperparameters {
        Hyperparameters::default_for(k, k_hat, s).unwrap()
    }

    // Gaussian conditioning oracle: z | x ~ N(τwx/(1+τw²), (1+τw²)⁻¹).
    #[test]
    fn latent_update_matches_scalar_conditioning() {
        let data = dataset_1d(&[2.0], Some(vec![1]));
        let mut state = blank_state(1, &[1], 1, 0, 1);
        state.q_w[0][0].mean[(0, 0)] = 1.0;
        state.q_w[0][0].row_cov[(0, 0)] = 0.0; // E[w²] = 1
        state.q_tau[0][0] = GammaQ::new(3.0, 3.0); // mean 1
        update_latents(&mut state, &data).unwrap();
        assert!((state.q_z.cov[0][(0, 0)] - 0.5).abs() < 1e-10);
        assert!((state.q_z.mean[(0, 0)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn latent_update_recovers_prior_with_zero_loadings() {
        let data = dataset_1d(&[2.0, -1.0, 0.3], Some(vec![1, 0, 1]));
        let mut state = blank_state(3, &[1], 1, 1, 2);
        for c in 0..2 {
            state.q_w[c][0].row_cov[(0, 0)] = 0.0;
        }
        state.q_what[0].row_cov[(0, 0)] = 0.0;
        update_latents(&mut state, &data).unwrap();
        for i in 0..3 {
            assert!(state.q_z.mean.row(i).norm() < 1e-14);
            assert!((state.q_z.cov[i].clone() - DMatrix::identity(2, 2)).norm() < 1e-14);
        }
    }

    // Conjugate Bayesian linear-regression oracle for a single weight.
    #[test]
    fn loading_update_matches_regression_oracle() {
        // N=3, x_n = 1 each, E[z_n] = 1, E[z_n²] = 1: precision 1+3, mean 3/4.
        let data = dataset_1d(&[1.0, 1.0, 1.0], Some(vec![1, 0, 1]));
        let mut state = blank_state(3, &[1], 1, 0, 1);
        state.q_z.mean.fill(1.0);
        for cov in &mut state.q_z.cov {
            cov.fill(0.0);
        }
        state.q_alpha[0][0][0] = GammaQ::new(2.0, 2.0); // mean 1
        state.q_tau[0][0] = GammaQ::new(5.0, 5.0); // mean 1
        update_loadings(&mut state, &data).unwrap();
        assert!((state.q_w[0][0].row_cov[(0, 0)] - 0.25).abs() < 1e-10);
        assert!((state.q_w[0][0].mean[(0, 0)] - 0.75).abs() < 1e-10);
    }

    #[test]
    fn loading_update_shrinks_under_huge_ard() {
        let data = dataset_1d(&[5.0, -4.0, 3.0], Some(vec![1, 0, 1]));
        let mut state = blank_state(3, &[1], 1, 0, 1);
        state.q_z.mean.fill(1.0);
        state.q_alpha[0][0][0] = GammaQ::new(1e16, 1.0); // E[α] → ∞
        update_loadings(&mut state, &data).unwrap();
        assert!(state.q_w[0][0].mean.column(0).norm() < 1e-6);
    }

    // Conjugate Gamma update oracle for the ARD factors.
    #[test]
    fn ard_update_oracle_values() {
        let hyper = default_hyper(1, 1, 1);
        let mut state = blank_state(2, &[2, 4], 1, 1, 1);
        // View 0: E[‖w‖²] = 2 via mean column (1,1) and zero row covariance.
        state.q_w[0][0].mean.fill(1.0);
        state.q_w[0][0].row_cov[(0, 0)] = 0.0;
        // View 1 (D=4): shared column with E[‖ŵ‖²] = 0.1.
        state.q_what[1].mean.fill((0.1f64 / 4.0).sqrt());
        state.q_what[1].row_cov[(0, 0)] = 0.0;
        update_ard(&mut state, &hyper);

        let a = &state.q_alpha[0][0][0];
        assert!((a.shape - (1e-14 + 1.0)).abs() < 1e-15);
        assert!((a.rate - (1e-14 + 1.0)).abs() < 1e-12);
        assert!((a.mean() - 1.0).abs() < 1e-10);

        let ah = &state.q_alpha_hat[1][0];
        assert!((ah.shape - 32.0).abs() < 1e-12);
        assert!((ah.rate - 1.05).abs() < 1e-12);
    }

    #[test]
    fn ard_update_zero_moment_limit() {
        let hyper = default_hyper(1, 0, 1);
        let mut state = blank_state(2, &[3], 1, 0, 1);
        state.q_w[0][0].mean.fill(0.0);
        state.q_w[0][0].row_cov[(0, 0)] = 0.0;
        update_ard(&mut state, &hyper);
        let a = &state.q_alpha[0][0][0];
        let want = (hyper.ard_shape + 1.5) / hyper.ard_rate;
        assert!((a.mean() - want).abs() <= 1e-6 * want);
    }

    // Conjugate Gamma update oracle for the noise precision.
    #[test]
    fn noise_update_oracle_values() {
        let hyper = default_hyper(1, 0, 1);
        let x = 2.0f64.sqrt();
        let data = dataset_1d(&[x, x, x, x, x], Some(vec![1, 0, 1, 0, 1]));
        let mut state = blank_state(5, &[1], 1, 0, 1);
        state.q_w[0][0].row_cov[(0, 0)] = 0.0; // zero loadings, zero moments
        update_noise(&mut state, &data, &hyper);
        let tau = &state.q_tau[0][0];
        assert!((tau.shape - (hyper.noise_shape + 2.5)).abs() < 1e-12);
        assert!((tau.rate - (hyper.noise_rate + 5.0)).abs() < 1e-10);
    }

    #[test]
    fn noise_update_empty_cluster_keeps_prior() {
        let hyper = default_hyper(1, 0, 2);
        let data = dataset_1d(&[1.0, 2.0], Some(vec![1, 0]));
        let mut state = blank_state(2, &[1], 1, 0, 2);
        state.q_c.column_mut(0).fill(1.0);
        state.q_c.column_mut(1).fill(0.0);
        update_noise(&mut state, &data, &hyper);
        let tau = &state.q_tau[1][0];
        assert_eq!(tau.shape, hyper.noise_shape);
        assert_eq!(tau.rate, hyper.noise_rate);
    }

    #[test]
    fn assignments_symmetric_clusters_give_half() {
        let hyper = default_hyper(1, 0, 2);
        let data = dataset_1d(&[0.7, -0.2, 1.4], Some(vec![1, 0, 1]));
        let mut state = blank_state(3, &[1], 1, 0, 2);
        update_assignments(&mut state, &data, &hyper).unwrap();
        for i in 0..3 {
            assert_eq!(state.q_c[(i, 0)], 0.5);
            assert_eq!(state.q_c[(i, 1)], 0.5);
        }
    }

    // Softmax oracle: equal likelihood and π terms, label gap
    // E[log γ_1] − E[log γ_2] = 0.5 with β = 20 gives odds e¹⁰ : 1.
    #[test]
    fn assignments_beta_weighted_label_pull() {
        let mut hyper = default_hyper(1, 0, 2);
        hyper.beta_weight = 20.0;
        let data = dataset_1d(&[0.0], Some(vec![1]));
        let mut state = blank_state(1, &[1], 1, 0, 2);
        // zero loadings, equal τ: likelihood identical across clusters
        for c in 0..2 {
            state.q_w[c][0].row_cov[(0, 0)] = 0.0;
        }
        state.q_gamma[0] = BetaQ { a: 2.0, b: 1.0 }; // ψ(2) − ψ(3) = −1/2
        state.q_gamma[1] = BetaQ { a: 1.0, b: 1.0 }; // ψ(1) − ψ(2) = −1
        update_assignments(&mut state, &data, &hyper).unwrap();
        let want = 1.0 / (1.0 + (-10.0f64).exp());
        assert!(
            (state.q_c[(0, 0)] - want).abs() < 1e-12,
            "{} vs {want}",
            state.q_c[(0, 0)]
        );
        assert!((state.q_c.row(0).sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn assignments_rows_sum_to_one() {
        let hyper = default_hyper(1, 1, 3);
        let data = dataset_1d(&[0.3, -0.8, 0.1, 2.0], Some(vec![1, 0, 0, 1]));
        let mut state = blank_state(4, &[1], 1, 1, 3);
        state.q_gamma[0] = BetaQ { a: 5.0, b: 1.0 };
        state.q_tau[1][0] = GammaQ::new(2.0, 1.0);
        update_assignments(&mut state, &data, &hyper).unwrap();
        for i in 0..4 {
            assert!((state.q_c.row(i).sum() - 1.0).abs() <= 1e-12);
            assert!(state.q_c.row(i).iter().all(|&q| q >= 0.0));
        }
    }

    // Conjugate count-update oracle for the Dirichlet factor.
    #[test]
    fn mixture_weights_count_update() {
        let hyper = default_hyper(1, 0, 2);
        let mut state = blank_state(10, &[1], 1, 0, 2);
        state.q_c.column_mut(0).fill(0.3);
        state.q_c.column_mut(1).fill(0.7);
        update_mixture_weights(&mut state, &hyper);
        assert!((state.q_pi[0] - 4.0).abs() < 1e-12);
        assert!((state.q_pi[1] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_weights_no_data_keeps_prior() {
        let hyper = default_hyper(1, 0, 2);
        let mut state = blank_state(1, &[1], 1, 0, 2);
        state.q_c = DMatrix::zeros(0, 2);
        state.q_z.mean = DMatrix::zeros(0, 1);
        state.q_z.cov.clear();
        update_mixture_weights(&mut state, &hyper);
        assert_eq!(state.q_pi, vec![hyper.dirichlet_conc; 2]);
    }

    #[test]
    fn mixture_weights_permutation_equivariant() {
        let hyper = default_hyper(1, 0, 3);
        let mut state = blank_state(6, &[1], 1, 0, 3);
        for i in 0..6 {
            state.q_c[(i, 0)] = 0.5;
            state.q_c[(i, 1)] = 0.2;
            state.q_c[(i, 2)] = 0.3;
        }
        update_mixture_weights(&mut state, &hyper);
        let base = state.q_pi.clone();
        // Permute the responsibility columns (0 1 2) -> (2 0 1).
        let mut permuted = blank_state(6, &[1], 1, 0, 3);
        for i in 0..6 {
            permuted.q_c[(i, 2)] = 0.5;
            permuted.q_c[(i, 0)] = 0.2;
            permuted.q_c[(i, 1)] = 0.3;
        }
        update_mixture_weights(&mut permuted, &hyper);
        assert_eq!(permuted.q_pi[2], base[0]);
        assert_eq!(permuted.q_pi[0], base[1]);
        assert_eq!(permuted.q_pi[1], base[2]);
    }

    // Weighted conjugate count oracle for the Beta factors.
    #[test]
    fn label_probs_weighted_counts() {
        let hyper = default_hyper(1, 0, 2);
        let data = dataset_1d(&[0.5], Some(vec![1]));
        let mut state = blank_state(1, &[1], 1, 0, 2);
        state.q_c[(0, 0)] = 1.0;
        state.q_c[(0, 1)] = 0.0;
        update_label_probs(&mut state, &data, &hyper).unwrap();
        assert!((state.q_gamma[0].a - 100.5).abs() < 1e-12);
        assert!((state.q_gamma[0].b - 0.5).abs() < 1e-12);
        // No mass in cluster 2: prior recovered.
        assert_eq!(state.q_gamma[1].a, 0.5);
        assert_eq!(state.q_gamma[1].b, 0.5);
    }

    #[test]
    fn label_probs_swap_symmetry() {
        let hyper = default_hyper(1, 0, 2);
        let labels = vec![1, 0, 1, 1];
        let flipped: Vec<u8> = labels.iter().map(|&r| 1 - r).collect();
        let xs = [0.1, 0.2, 0.3, 0.4];
        let data = dataset_1d(&xs, Some(labels));
        let data_flipped = dataset_1d(&xs, Some(flipped));
        let mut state = blank_state(4, &[1], 1, 0, 2);
        state.q_c.column_mut(0).fill(0.25);
        state.q_c.column_mut(1).fill(0.75);
        let mut state_flipped = state.clone();
        update_label_probs(&mut state, &data, &hyper).unwrap();
        update_label_probs(&mut state_flipped, &data_flipped, &hyper).unwrap();
        for c in 0..2 {
            assert!((state.q_gamma[c].a - state_flipped.q_gamma[c].b).abs() < 1e-12);
            assert!((state.q_gamma[c].b - state_flipped.q_gamma[c].a).abs() < 1e-12);
        }
    }
}
