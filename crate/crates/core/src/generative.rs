//! Ground-truth parameters and exact sampling from the generative model.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::hyper::Hyperparameters;

fn std_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Ground-truth loadings, noise precisions and label probabilities.
///
/// `w[c][m]` is the D_m×K cluster-specific loading matrix, `w_hat[m]` the
/// D_m×K̂ shared loading matrix, `tau[c][m]` the per-cluster per-view noise
/// precision, `pi` the cluster prior and `gamma[c] = P(r = 1 | c)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerativeParams {
    pub w: Vec<Vec<DMatrix<f64>>>,
    pub w_hat: Vec<DMatrix<f64>>,
    pub tau: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl GenerativeParams {
    /// Checks internal consistency against the counts in `hyper`.
    pub fn validate(&self, hyper: &Hyperparameters) -> Result<()> {
        let s = hyper.s;
        if self.w.len() != s || self.tau.len() != s || self.pi.len() != s || self.gamma.len() != s {
            return Err(Error::ShapeMismatch(format!(
                "expected {s} clusters, got w:{} tau:{} pi:{} gamma:{}",
                self.w.len(),
                self.tau.len(),
                self.pi.len(),
                self.gamma.len()
            )));
        }
        let m_views = self.w_hat.len();
        let sum: f64 = self.pi.iter().sum();
        if (sum - 1.0).abs() > 1e-12 || self.pi.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidData(format!("pi must be a probability vector, sums to {sum}")));
        }
        if self.gamma.iter().any(|&g| !(0.0..=1.0).contains(&g)) {
            return Err(Error::InvalidData("gamma entries must lie in [0,1]".into()));
        }
        for (c, (wc, tc)) in self.w.iter().zip(&self.tau).enumerate() {
            if wc.len() != m_views || tc.len() != m_views {
                return Err(Error::ShapeMismatch(format!(
                    "cluster {c}: expected {m_views} views, got w:{} tau:{}",
                    wc.len(),
                    tc.len()
                )));
            }
            for (m, w) in wc.iter().enumerate() {
                if w.ncols() != hyper.k {
                    return Err(Error::ShapeMismatch(format!(
                        "w[{c}][{m}] has {} columns, expected K={}",
                        w.ncols(),
                        hyper.k
                    )));
                }
                if w.nrows() != self.w_hat[m].nrows() {
                    return Err(Error::ShapeMismatch(format!(
                        "w[{c}][{m}] and w_hat[{m}] disagree on D_m"
                    )));
                }
            }
            if tc.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
                return Err(Error::InvalidData(format!("cluster {c}: tau must be > 0")));
            }
        }
        for (m, wh) in self.w_hat.iter().enumerate() {
            if wh.ncols() != hyper.k_hat {
                return Err(Error::ShapeMismatch(format!(
                    "w_hat[{m}] has {} columns, expected K̂={}",
                    wh.ncols(),
                    hyper.k_hat
                )));
            }
        }
        Ok(())
    }
}

/// Latent variables drawn alongside a sampled dataset.
///
/// Cluster indices are 0-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatentRecord {
    pub z: DMatrix<f64>,
    pub z_hat: DMatrix<f64>,
    pub c: Vec<usize>,
    pub r: Vec<u8>,
}

/// Draws N samples from the generative model; deterministic given `seed`.
///
/// Per sample: c ~ Multinomial(pi), z and ẑ standard normal,
/// x^(m) ~ N(W_c^(m) z + Ŵ^(m) ẑ, τ_c^(m)⁻¹ I), r ~ Bernoulli(γ_c).
pub fn sample_generative(
    params: &GenerativeParams,
    hyper: &Hyperparameters,
    n: usize,
    seed: u64,
) -> Result<(MultiViewDataset, LatentRecord)> {
    if n == 0 {
        return Err(Error::InvalidData("need N ≥ 1 samples".into()));
    }
    params.validate(hyper)?;
    let m_views = params.w_hat.len();
    let dims: Vec<usize> = params.w_hat.iter().map(|w| w.nrows()).collect();
    let (k, k_hat) = (hyper.k, hyper.k_hat);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut z = DMatrix::zeros(n, k);
    let mut z_hat = DMatrix::zeros(n, k_hat);
    let mut c = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut views: Vec<DMatrix<f64>> = dims.iter().map(|&d| DMatrix::zeros(n, d)).collect();

    for i in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut ci = hyper.s - 1;
        for (cand, &p) in params.pi.iter().enumerate() {
            acc += p;
            if u < acc {
                ci = cand;
                break;
            }
        }
        c.push(ci);
        for j in 0..k {
            z[(i, j)] = std_normal(&mut rng);
        }
        for j in 0..k_hat {
            z_hat[(i, j)] = std_normal(&mut rng);
        }
        for m in 0..m_views {
            let sd = params.tau[ci][m].sqrt().recip();
            let w = &params.w[ci][m];
            let wh = &params.w_hat[m];
            for d in 0..dims[m] {
                let mut mean = 0.0;
                for j in 0..k {
                    mean += w[(d, j)] * z[(i, j)];
                }
                for j in 0..k_hat {
                    mean += wh[(d, j)] * z_hat[(i, j)];
                }
                let eps = std_normal(&mut rng);
                views[m][(i, d)] = mean + sd * eps;
            }
        }
        let gamma = params.gamma[ci];
        let coin: f64 = rng.random();
        r.push(u8::from(coin < gamma));
    }

    let dataset = MultiViewDataset::with_default_names(views, Some(r.clone()))?;
    Ok((dataset, LatentRecord { z, z_hat, c, r }))
}

/// Knobs for the synthetic weak-signal benchmark.
///
/// Shared loadings are `signal_ratio` times larger than cluster-specific
/// ones, so the discriminative signal is a small perturbation on top of a
/// dominant label-independent structure.
#[derive(Debug, Clone)]
pub struct WeakSignalConfig {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub seed: u64,
    /// Shared-to-specific loading scale ratio.
    pub signal_ratio: f64,
    pub k_specific: usize,
    pub k_shared: usize,
    pub specific_scale: f64,
    pub noise_precision: f64,
    /// Per-cluster, per-view noise contrast. In even views cluster 1 has
    /// precision `noise_precision * noise_contrast` and cluster 2
    /// `noise_precision / noise_contrast`; odd views swap the roles, so
    /// neither cluster is globally noisier. Part of the weak signal;
    /// 1.0 makes the clusters homoscedastic.
    pub noise_contrast: f64,
    /// Geometric decay of the shared-factor scales. Factor j has entry
    /// scale `decay^j` relative to the leading one; the scales are then
    /// normalized so the root-mean-square shared scale stays at
    /// `signal_ratio` times `specific_scale`.
    pub shared_decay: f64,
}

impl WeakSignalConfig {
    pub fn new(n: usize, m: usize, d: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            d,
            seed,
            signal_ratio: 5.0,
            k_specific: 2,
            k_shared: 4,
            specific_scale: 0.04,
            noise_precision: 300.0,
            noise_contrast: 4.0,
            shared_decay: 0.55,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 8 || self.n % 2 != 0 {
            return Err(Error::InvalidData(format!("benchmark needs even N ≥ 8, got {}", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidData(format!("benchmark needs M ≥ 2 views, got {}", self.m)));
        }
        if self.d < 2 {
            return Err(Error::InvalidData(format!("benchmark needs D ≥ 2, got {}", self.d)));
        }
        if !(self.signal_ratio.is_finite() && self.signal_ratio > 0.0) {
            return Err(Error::InvalidData("signal_ratio must be > 0".into()));
        }
        if !(self.noise_contrast.is_finite() && self.noise_contrast > 0.0) {
            return Err(Error::InvalidData("noise_contrast must be > 0".into()));
        }
        if !(self.shared_decay.is_finite() && 0.0 < self.shared_decay && self.shared_decay <= 1.0) {
            return Err(Error::InvalidData("shared_decay must be in (0, 1]".into()));
        }
        Ok(())
    }

    /// Generates the benchmark: two equiprobable clusters with deterministic
    /// labels (γ = (1, 0)) and shared loadings dominating the
    /// cluster-specific ones.
    pub fn generate(&self) -> Result<(GenerativeParams, MultiViewDataset, LatentRecord)> {
        self.validate()?;
        let mut hyper = Hyperparameters::default_for(self.k_specific, self.k_shared, 2)?;
        hyper.max_iter = 1; // counts are all sample_generative consumes

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1));
        // Per-factor shared scales: geometric decay, normalized so the RMS
        // scale is signal_ratio : 1 against the specific scale.
        let rms_raw = (0..self.k_shared)
            .map(|j| self.shared_decay.powi(2 * j as i32))
            .sum::<f64>()
            / self.k_shared as f64;
        let lead = self.specific_scale * self.signal_ratio / rms_raw.sqrt();
        let shared_scales: Vec<f64> = (0..self.k_shared)
            .map(|j| lead * self.shared_decay.powi(j as i32))
            .collect();

        let mut w = Vec::with_capacity(2);
        for _ in 0..2 {
            let mut per_view = Vec::with_capacity(self.m);
            for _ in 0..self.m {
                per_view.push(DMatrix::from_fn(self.d, self.k_specific, |_, _| {
                    self.specific_scale * std_normal(&mut rng)
                }));
            }
            w.push(per_view);
        }
        let w_hat: Vec<DMatrix<f64>> = (0..self.m)
            .map(|_| {
                DMatrix::from_fn(self.d, self.k_shared, |_, j| shared_scales[j] * std_normal(&mut rng))
            })
            .collect();

        let params = GenerativeParams {
            w,
            w_hat,
            tau: vec![
                (0..self.m)
                    .map(|m| {
                        let c = if m % 2 == 0 { self.noise_contrast } else { 1.0 / self.noise_contrast };
                        self.noise_precision * c
                    })
                    .collect(),
                (0..self.m)
                    .map(|m| {
                        let c = if m % 2 == 0 { 1.0 / self.noise_contrast } else { self.noise_contrast };
                        self.noise_precision * c
                    })
                    .collect(),
            ],
            pi: vec![0.5, 0.5],
            gamma: vec![1.0, 0.0],
        };
        let (dataset, latents) = sample_generative(&params, &hyper, self.n, self.seed)?;
        Ok((params, dataset, latents))
    }
}

/// Default two-cluster weak-signal benchmark (ratio 5:1, γ = (1,0)).
pub fn make_weak_signal_benchmark(
    n: usize,
    m: usize,
    d: usize,
    seed: u64,
) -> Result<(GenerativeParams, MultiViewDataset, LatentRecord)> {
    WeakSignalConfig::new(n, m, d, seed).generate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_params(m: usize, d: usize, k: usize, k_hat: usize, s: usize) -> (GenerativeParams, Hyperparameters) {
        let hyper = Hyperparameters::default_for(k, k_hat, s).unwrap();
        let params = GenerativeParams {
            w: vec![vec![DMatrix::zeros(d, k); m]; s],
            w_hat: vec![DMatrix::zeros(d, k_hat); m],
            tau: vec![vec![1.0; m]; s],
            pi: {
                let mut p = vec![0.0; s];
                p[0] = 1.0;
                p
            },
            gamma: vec![0.5; s],
        };
        (params, hyper)
    }

    #[test]
    fn noise_only_sample_variance_matches_tau() {
        // All loadings zero, tau = 1: per-coordinate variance should be ~1.
        let (params, hyper) = zero_params(1, 2, 1, 1, 1);
        let (ds, _) = sample_generative(&params, &hyper, 10_000, 7).unwrap();
        for j in 0..2 {
            let col = ds.view(0).column(j);
            let mean = col.sum() / 10_000.0;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 9_999.0;
            assert!((0.95..=1.05).contains(&var), "variance {var}");
        }
    }

    #[test]
    fn noise_only_covariance_close_to_identity() {
        let (params, hyper) = zero_params(2, 3, 1, 1, 1);
        let (ds, _) = sample_generative(&params, &hyper, 10_000, 11).unwrap();
        for m in 0..2 {
            let x = ds.view(m);
            let mu = x.row_mean();
            let mut cov = DMatrix::zeros(3, 3);
            for i in 0..x.nrows() {
                let d = x.row(i) - &mu;
                cov += d.transpose() * &d;
            }
            cov /= (x.nrows() - 1) as f64;
            let err = (cov - DMatrix::identity(3, 3)).norm();
            assert!(err < 0.1, "Frobenius error {err}");
        }
    }

    #[test]
    fn degenerate_gamma_makes_labels_deterministic() {
        let (mut params, hyper) = zero_params(1, 2, 1, 1, 2);
        params.pi = vec![0.5, 0.5];
        params.gamma = vec![1.0, 0.0];
        let (ds, lat) = sample_generative(&params, &hyper, 200, 3).unwrap();
        for (i, &c) in lat.c.iter().enumerate() {
            assert_eq!(lat.r[i], u8::from(c == 0));
        }
        assert_eq!(ds.labels().unwrap(), lat.r.as_slice());
    }

    #[test]
    fn degenerate_pi_pins_clusters() {
        let (params, hyper) = zero_params(1, 2, 1, 1, 2);
        let (_, lat) = sample_generative(&params, &hyper, 100, 5).unwrap();
        assert!(lat.c.iter().all(|&c| c == 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let (params, hyper) = zero_params(2, 2, 1, 2, 2);
        let (a, la) = sample_generative(&params, &hyper, 50, 42).unwrap();
        let (b, lb) = sample_generative(&params, &hyper, 50, 42).unwrap();
        assert_eq!(a.view(0), b.view(0));
        assert_eq!(a.view(1), b.view(1));
        assert_eq!(la.c, lb.c);
        assert_eq!(la.z, lb.z);
    }

    #[test]
    fn benchmark_shapes_and_determinism() {
        let (params, ds, _) = make_weak_signal_benchmark(60, 4, 5, 1).unwrap();
        assert_eq!(ds.n_samples(), 60);
        assert_eq!(ds.n_views(), 4);
        assert!(ds.view_dims().iter().all(|&d| d == 5));
        assert!(ds.labels().is_some());
        assert_eq!(params.pi, vec![0.5, 0.5]);
        assert_eq!(params.gamma, vec![1.0, 0.0]);

        let (_, ds2, _) = make_weak_signal_benchmark(60, 4, 5, 1).unwrap();
        for m in 0..4 {
            assert_eq!(ds.view(m), ds2.view(m));
        }
    }

    #[test]
    fn benchmark_shared_norm_dominates() {
        let (params, _, _) = make_weak_signal_benchmark(60, 4, 5, 1).unwrap();
        let shared: f64 = params.w_hat.iter().map(|w| w.norm_squared()).sum::<f64>().sqrt();
        for c in 0..2 {
            let spec: f64 = params.w[c].iter().map(|w| w.norm_squared()).sum::<f64>().sqrt();
            assert!(shared / spec >= 3.0, "ratio {}", shared / spec);
        }
    }

    #[test]
    fn benchmark_preconditions() {
        assert!(make_weak_signal_benchmark(7, 4, 5, 1).is_err());
        assert!(make_weak_signal_benchmark(10, 1, 5, 1).is_err());
        assert!(make_weak_signal_benchmark(10, 2, 1, 1).is_err());
    }
}
