//! Shared helpers for the integration suites.

use gfamix::inference::{
    elbo, update_ard, update_assignments, update_label_probs, update_latents, update_loadings,
    update_mixture_weights, update_noise, VariationalState,
};
use gfamix::{GenerativeParams, Hyperparameters, MultiViewDataset};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Adjusted Rand index between two hard clusterings.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ka = a.iter().max().map_or(0, |&m| m + 1);
    let kb = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |n: usize| (n * n.saturating_sub(1)) as f64 / 2.0;
    let sum_ij: f64 = table.iter().flatten().map(|&n| choose2(n)).sum();
    let sum_a: f64 = table.iter().map(|row| choose2(row.iter().sum())).sum();
    let sum_b: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum()))
        .sum();
    let total = choose2(a.len());
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if (max - expected).abs() < 1e-12 {
        return 1.0;
    }
    (sum_ij - expected) / (max - expected)
}

/// A random generative problem within the acceptance-criterion ranges.
pub fn random_problem(seed: u64) -> (GenerativeParams, Hyperparameters, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(20..=100);
    let m = rng.random_range(2..=6);
    let (mut k, mut k_hat) = (rng.random_range(0..=3), rng.random_range(0..=5));
    if k + k_hat == 0 {
        k = 1;
        k_hat = 1;
    }
    let mut hyper = Hyperparameters::default_for(k, k_hat, 2).unwrap();
    hyper.max_iter = 50;
    let mut normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    let dims: Vec<usize> = (0..m).map(|_| rng.random_range(2..=8)).collect();
    let spec_scale = rng.random_range(0.05..1.0);
    let shared_scale = rng.random_range(0.05..1.5);
    let w = (0..2)
        .map(|_| {
            dims.iter()
                .map(|&d| DMatrix::from_fn(d, k, |_, _| spec_scale * normal(&mut rng)))
                .collect()
        })
        .collect();
    let w_hat = dims
        .iter()
        .map(|&d| DMatrix::from_fn(d, k_hat, |_, _| shared_scale * normal(&mut rng)))
        .collect();
    let tau = (0..2)
        .map(|_| (0..m).map(|_| rng.random_range(0.5..20.0)).collect())
        .collect();
    let params = GenerativeParams {
        w,
        w_hat,
        tau,
        pi: vec![0.5, 0.5],
        gamma: vec![0.85, 0.2],
    };
    (params, hyper, n)
}

pub const UPDATE_NAMES: [&str; 7] = [
    "latents",
    "loadings",
    "ard",
    "noise",
    "assignments",
    "mixture_weights",
    "label_probs",
];

/// Applies update `idx` of the fixed cycle order.
pub fn apply_update(
    idx: usize,
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
) {
    match idx {
        0 => update_latents(state, data).unwrap(),
        1 => update_loadings(state, data).unwrap(),
        2 => update_ard(state, hyper),
        3 => update_noise(state, data, hyper),
        4 => update_assignments(state, data, hyper).unwrap(),
        5 => update_mixture_weights(state, hyper),
        6 => update_label_probs(state, data, hyper).unwrap(),
        _ => unreachable!(),
    }
}

/// Drives full cycles with an ELBO probe after every single update,
/// asserting the per-update monotonicity bound.
pub fn assert_per_update_monotone(
    state: &mut VariationalState,
    data: &MultiViewDataset,
    hyper: &Hyperparameters,
    cycles: usize,
    label: &str,
) {
    let mut prev = elbo(state, data, hyper).unwrap();
    for cycle in 0..cycles {
        for (idx, name) in UPDATE_NAMES.iter().enumerate() {
            apply_update(idx, state, data, hyper);
            let e = elbo(state, data, hyper).unwrap();
            assert!(
                e >= prev - 1e-8 * prev.abs(),
                "{label}: ELBO fell across {name} in cycle {cycle}: {prev} -> {e}"
            );
            prev = e;
        }
    }
}

/// Natural-parameter perturbations of the factor touched by update `idx`.
/// Magnitude ±1e-3, direction driven by `rng`.
pub fn perturb_factor(idx: usize, state: &mut VariationalState, rng: &mut ChaCha8Rng) {
    let sign = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { 1e-3 } else { -1e-3 };
    let scale_gamma = |g: &mut gfamix::inference::GammaQ, rng: &mut ChaCha8Rng| {
        g.shape *= 1.0 + sign(rng);
        g.rate *= 1.0 + sign(rng);
    };
    match idx {
        0 => {
            // One random sample's Gaussian: scale the information vector
            // entrywise or rescale the precision.
            let n = rng.random_range(0..state.n_samples());
            if state.total_factors() == 0 {
                return;
            }
            if rng.random::<bool>() {
                let factor = 1.0 + sign(rng);
                for j in 0..state.total_factors() {
                    state.q_z.mean[(n, j)] *= factor;
                }
            } else {
                let c = 1.0 + sign(rng);
                state.q_z.cov[n] /= c;
                for j in 0..state.total_factors() {
                    state.q_z.mean[(n, j)] /= c;
                }
            }
        }
        1 => {
            let c = rng.random_range(0..state.n_clusters());
            let m = rng.random_range(0..state.n_views());
            let shared = state.k == 0 || (state.k_hat > 0 && rng.random::<bool>());
            let block = if shared {
                &mut state.q_what[m]
            } else {
                &mut state.q_w[c][m]
            };
            if block.mean.ncols() == 0 {
                return;
            }
            if rng.random::<bool>() {
                let factor = 1.0 + sign(rng);
                block.mean *= factor;
            } else {
                let factor = 1.0 + sign(rng);
                block.row_cov /= factor;
                block.mean /= factor;
            }
        }
        2 => {
            let c = rng.random_range(0..state.n_clusters());
            let m = rng.random_range(0..state.n_views());
            if state.k > 0 {
                let k = rng.random_range(0..state.k);
                scale_gamma(&mut state.q_alpha[c][m][k], rng);
            }
            if state.k_hat > 0 {
                let k = rng.random_range(0..state.k_hat);
                scale_gamma(&mut state.q_alpha_hat[m][k], rng);
            }
        }
        3 => {
            let c = rng.random_range(0..state.n_clusters());
            let m = rng.random_range(0..state.n_views());
            scale_gamma(&mut state.q_tau[c][m], rng);
        }
        4 => {
            // Responsibilities: perturb the logits and renormalize.
            let n = rng.random_range(0..state.n_samples());
            let s = state.n_clusters();
            let mut logits: Vec<f64> = (0..s)
                .map(|c| state.q_c[(n, c)].max(1e-300).ln() + sign(rng))
                .collect();
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = logits.iter_mut().map(|l| { *l = (*l - max).exp(); *l }).sum();
            for c in 0..s {
                state.q_c[(n, c)] = logits[c] / total;
            }
        }
        5 => {
            for c in 0..state.n_clusters() {
                state.q_pi[c] *= 1.0 + sign(rng);
            }
        }
        6 => {
            for g in &mut state.q_gamma {
                g.a *= 1.0 + sign(rng);
                g.b *= 1.0 + sign(rng);
            }
        }
        _ => unreachable!(),
    }
}
