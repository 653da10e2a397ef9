//! State initialization and the coordinate-ascent fit loop.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparameters;

use super::elbo::elbo;
use super::prune::prune_factors;
use super::state::{BetaQ, GammaQ, LatentBlock, LoadingBlock, VariationalState};
use super::updates::{
    update_ard, update_assignments, update_label_probs, update_latents, update_loadings,
    update_mixture_weights, update_noise,
};

/// A fitted model: hyperparameters (post-pruning), converged state, trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedModel {
    pub hyper: Hyperparameters,
    pub state: VariationalState,
    pub elbo_trace: Vec<f64>,
    pub n_iterations: usize,
    pub converged: bool,
    pub view_dims: Vec<usize>,
}

fn standardize_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / n).sqrt();
        if sd > 1e-12 {
            col /= sd;
        } else {
            col.fill(0.0);
        }
    }
    out
}

fn count_distinct_rows(x: &DMatrix<f64>) -> usize {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for i in 0..x.nrows() {
        seen.insert(x.row(i).iter().map(|v| v.to_bits()).collect());
    }
    seen.len()
}

/// k-means++ seeding followed by a few Lloyd rounds; returns assignments.
fn kmeans_assign(x: &DMatrix<f64>, s: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = x.nrows();
    if s == 1 {
        return vec![0; n];
    }
    let mut centers: Vec<DVector<f64>> = Vec::with_capacity(s);
    centers.push(x.row(rng.random_range(0..n)).transpose());
    let mut d2 = vec![0.0f64; n];
    while centers.len() < s {
        for (i, d) in d2.iter_mut().enumerate() {
            *d = centers
                .iter()
                .map(|c| (x.row(i).transpose() - c).norm_squared())
                .fold(f64::INFINITY, f64::min);
        }
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                u -= d;
                if u <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(x.row(idx).transpose());
    }
    let mut assign = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let assign_step = |centers: &[DVector<f64>], assign: &mut [usize], dist: &mut [f64]| {
        for i in 0..n {
            let mut best = (f64::INFINITY, 0usize);
            for (c, center) in centers.iter().enumerate() {
                let d = (x.row(i).transpose() - center).norm_squared();
                if d < best.0 {
                    best = (d, c);
                }
            }
            assign[i] = best.1;
            dist[i] = best.0;
        }
    };
    for _round in 0..10 {
        assign_step(&centers, &mut assign, &mut dist);
        for c in 0..s {
            let members: Vec<usize> = (0..n).filter(|&i| assign[i] == c).collect();
            if members.is_empty() {
                // Re-seed an empty cluster on the currently worst-fit point.
                let far = (0..n)
                    .max_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap())
                    .unwrap();
                centers[c] = x.row(far).transpose();
                assign[far] = c;
                dist[far] = 0.0;
            } else {
                let mut mean = DVector::zeros(x.ncols());
                for &i in &members {
                    mean += x.row(i).transpose();
                }
                centers[c] = mean / members.len() as f64;
            }
        }
    }
    assign_step(&centers, &mut assign, &mut dist);
    assign
}

/// Deterministic initial state: k-means++ responsibilities (0.9 winner),
/// truncated-SVD latent means, small random loading means, priors elsewhere.
pub fn initialize(
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
    seed: u64,
) -> Result<VariationalState> {
    hyper.validate()?;
    data.require_labels()?;
    let n = data.n_samples();
    let s = hyper.s;
    let (k, k_hat) = (hyper.k, hyper.k_hat);
    let t = k + k_hat;
    let dims = data.view_dims();

    let xs = standardize_columns(&data.concat_views());
    let distinct = count_distinct_rows(&xs);
    if distinct < s {
        return Err(Error::InvalidData(format!(
            "fewer distinct samples ({distinct}) than clusters ({s})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assign = kmeans_assign(&xs, s, &mut rng);
    let off = if s > 1 { 0.1 / (s - 1) as f64 } else { 0.0 };
    let mut q_c = DMatrix::from_element(n, s, off);
    for (i, &a) in assign.iter().enumerate() {
        q_c[(i, a)] = if s > 1 { 0.9 } else { 1.0 };
    }

    // Latent means from the leading right factors of the standardized data.
    // The top factors go to the shared block: shared factors model the
    // dominant structure common to all clusters, so they must start on it.
    let mut z_mean = DMatrix::zeros(n, t);
    if t > 0 {
        let mut svd = xs.clone().svd(true, false);
        svd.sort_by_singular_values();
        let u = svd.u.as_ref().expect("svd with u requested");
        let r = svd.singular_values.len().min(t);
        for j in 0..r {
            let col = if j < k_hat { k + j } else { j - k_hat };
            let sv = svd.singular_values[j];
            for i in 0..n {
                z_mean[(i, col)] = u[(i, j)] * sv;
            }
        }
        for j in 0..t {
            let rms = (z_mean.column(j).norm_squared() / n as f64).sqrt();
            if rms > 1e-12 {
                let mut col = z_mean.column_mut(j);
                col /= rms;
            }
        }
    }
    let q_z = LatentBlock {
        mean: z_mean,
        cov: vec![DMatrix::identity(t, t); n],
    };

    let mut small_block = |d: usize, cols: usize| LoadingBlock {
        mean: DMatrix::from_fn(d, cols, |_, _| {
            let draw: f64 = StandardNormal.sample(&mut rng);
            0.01 * draw
        }),
        row_cov: DMatrix::identity(cols, cols),
    };
    let q_w: Vec<Vec<LoadingBlock>> = (0..s)
        .map(|_| dims.iter().map(|&d| small_block(d, k)).collect())
        .collect();
    let q_what: Vec<LoadingBlock> = dims.iter().map(|&d| small_block(d, k_hat)).collect();

    let state = VariationalState {
        k,
        k_hat,
        q_z,
        q_w,
        q_what,
        q_alpha: vec![vec![vec![GammaQ::new(hyper.ard_shape, hyper.ard_rate); k]; dims.len()]; s],
        q_alpha_hat: vec![
            vec![GammaQ::new(hyper.shared_ard_shape, hyper.shared_ard_rate); k_hat];
            dims.len()
        ],
        q_tau: vec![vec![GammaQ::new(hyper.noise_shape, hyper.noise_rate); dims.len()]; s],
        q_pi: vec![hyper.dirichlet_conc; s],
        q_gamma: vec![BetaQ { a: hyper.beta_a, b: hyper.beta_b }; s],
        q_c,
    };
    Ok(state)
}

/// Fits the shared-only submodel (loadings, latents, shared ARD, noise)
/// from the SVD-initialized latents before the main loop. The shared block
/// must own the pooled structure first: without this, the first latent
/// update erases the initialization and the vaguely-regularized cluster
/// blocks win the pooled variance, collapsing the shared block entirely.
/// Skipped when the model has no shared factors.
fn warm_up_shared_block(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
) -> Result<()> {
    if state.k_hat == 0 {
        return Ok(());
    }
    for _ in 0..20 {
        let s_tt = super::updates::weighted_latent_moments(state);
        super::updates::update_shared_loadings(state, data, &s_tt)?;
        update_latents(state, data)?;
        update_ard(state, hyper);
        update_noise(state, data, hyper);
    }
    Ok(())
}

/// Runs one full coordinate-ascent cycle in the fixed order and returns the
/// bound after the cycle.
pub fn fit_cycle(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
) -> Result<f64> {
    update_latents(state, data)?;
    update_loadings(state, data)?;
    update_ard(state, hyper);
    update_noise(state, data, hyper);
    update_assignments(state, data, hyper)?;
    update_mixture_weights(state, hyper);
    update_label_probs(state, data, hyper)?;
    elbo(state, data, hyper)
}

/// Full fit: initialize, iterate cycles until the relative ELBO change drops
/// below tolerance or `max_iter` is reached. Non-convergence is reported via
/// the `converged` flag, never as an error. When pruning is enabled it runs
/// every 10 cycles and the convergence check skips the following cycle.
pub fn fit(data: &MultiViewDataset, hyper: &Hyperparameters, seed: u64) -> Result<TrainedModel> {
    let mut run_hyper = hyper.clone();
    let mut state = initialize(data, hyper, seed)?;
    warm_up_shared_block(&mut state, data, hyper)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut skip_check = false;

    for it in 0..hyper.max_iter {
        let bound = fit_cycle(&mut state, data, &run_hyper)?;
        trace.push(bound);

        let mut pruned = false;
        if run_hyper.prune_threshold.is_some() && (it + 1) % 10 == 0 {
            let outcome = prune_factors(&state, &run_hyper);
            if !outcome.removed_specific.is_empty() || !outcome.removed_shared.is_empty() {
                state = outcome.state;
                run_hyper.k = state.k;
                run_hyper.k_hat = state.k_hat;
                pruned = true;
            }
        }

        if !skip_check && it > 0 {
            let prev = trace[it - 1];
            if (bound - prev).abs() <= hyper.elbo_rel_tol * prev.abs() {
                converged = true;
            }
        }
        skip_check = pruned;
        if converged {
            break;
        }
    }

    Ok(TrainedModel {
        hyper: run_hyper,
        state,
        n_iterations: trace.len(),
        elbo_trace: trace,
        converged,
        view_dims: data.view_dims(),
    })
}
