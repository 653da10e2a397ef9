//! Mean-field variational state and its sufficient statistics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::digamma;

/// Gamma(shape, rate) variational factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaQ {
    pub shape: f64,
    pub rate: f64,
}

impl GammaQ {
    pub fn new(shape: f64, rate: f64) -> Self {
        Self { shape, rate }
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn mean_log(&self) -> f64 {
        digamma(self.shape) - self.rate.ln()
    }
}

/// Beta(a, b) variational factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaQ {
    pub a: f64,
    pub b: f64,
}

impl BetaQ {
    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn mean_log(&self) -> f64 {
        digamma(self.a) - digamma(self.a + self.b)
    }

    pub fn mean_log_comp(&self) -> f64 {
        digamma(self.b) - digamma(self.a + self.b)
    }
}

/// Gaussian over the rows of one loading matrix.
///
/// Every row shares the same precision, so a single row covariance is stored
/// per (cluster, view) block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadingBlock {
    /// D_m × K row means.
    pub mean: DMatrix<f64>,
    /// K × K covariance common to all rows.
    pub row_cov: DMatrix<f64>,
}

impl LoadingBlock {
    /// E[WᵀW] = MᵀM + D·Σ_row.
    pub fn second_moment(&self) -> DMatrix<f64> {
        let d = self.mean.nrows() as f64;
        self.mean.transpose() * &self.mean + &self.row_cov * d
    }

    /// E[‖column k‖²] = ‖μ_k‖² + D·Σ_row[k,k].
    pub fn column_sq_norm(&self, k: usize) -> f64 {
        let d = self.mean.nrows() as f64;
        self.mean.column(k).norm_squared() + d * self.row_cov[(k, k)]
    }
}

/// Joint Gaussian over the concatenated latent [z; ẑ] per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentBlock {
    /// N × (K+K̂) posterior means.
    pub mean: DMatrix<f64>,
    /// Per-sample (K+K̂) × (K+K̂) covariance.
    pub cov: Vec<DMatrix<f64>>,
}

impl LatentBlock {
    /// E[t tᵀ] for sample n.
    pub fn second_moment(&self, n: usize) -> DMatrix<f64> {
        let mu = self.mean.row(n).transpose();
        &self.cov[n] + &mu * mu.transpose()
    }
}

/// All mean-field factors of the model posterior.
///
/// Indexing convention: `q_w[c][m]`, `q_alpha[c][m][k]`, `q_what[m]`,
/// `q_alpha_hat[m][k̂]`, `q_tau[c][m]`; `q_c` is the N×S responsibility
/// matrix and `q_pi` the Dirichlet concentration vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalState {
    pub k: usize,
    pub k_hat: usize,
    pub q_z: LatentBlock,
    pub q_w: Vec<Vec<LoadingBlock>>,
    pub q_what: Vec<LoadingBlock>,
    pub q_alpha: Vec<Vec<Vec<GammaQ>>>,
    pub q_alpha_hat: Vec<Vec<GammaQ>>,
    pub q_tau: Vec<Vec<GammaQ>>,
    pub q_pi: Vec<f64>,
    pub q_gamma: Vec<BetaQ>,
    pub q_c: DMatrix<f64>,
}

impl VariationalState {
    pub fn n_samples(&self) -> usize {
        self.q_z.mean.nrows()
    }

    pub fn n_clusters(&self) -> usize {
        self.q_pi.len()
    }

    pub fn n_views(&self) -> usize {
        self.q_what.len()
    }

    pub fn total_factors(&self) -> usize {
        self.k + self.k_hat
    }

    pub fn view_dims(&self) -> Vec<usize> {
        self.q_what.iter().map(|b| b.mean.nrows()).collect()
    }

    /// E[log π_c] under the Dirichlet factor.
    pub fn mean_log_pi(&self) -> Vec<f64> {
        let total: f64 = self.q_pi.iter().sum();
        let d_total = digamma(total);
        self.q_pi.iter().map(|&a| digamma(a) - d_total).collect()
    }

    /// Posterior mean of π.
    pub fn mean_pi(&self) -> Vec<f64> {
        let total: f64 = self.q_pi.iter().sum();
        self.q_pi.iter().map(|&a| a / total).collect()
    }

    /// [E W_c^(m), E Ŵ^(m)]: the D_m × (K+K̂) concatenated loading mean.
    pub fn loading_mean_concat(&self, c: usize, m: usize) -> DMatrix<f64> {
        let d = self.q_what[m].mean.nrows();
        let t = self.total_factors();
        let mut out = DMatrix::zeros(d, t);
        if self.k > 0 {
            out.view_mut((0, 0), (d, self.k)).copy_from(&self.q_w[c][m].mean);
        }
        if self.k_hat > 0 {
            out.view_mut((0, self.k), (d, self.k_hat)).copy_from(&self.q_what[m].mean);
        }
        out
    }

    /// E[W̃ᵀW̃] for the concatenated loading block of (c, m).
    ///
    /// The diagonal blocks carry the row-covariance corrections; the cross
    /// block is the product of means because q(W) and q(Ŵ) are independent.
    pub fn loading_second_moment(&self, c: usize, m: usize) -> DMatrix<f64> {
        let t = self.total_factors();
        let mut g = DMatrix::zeros(t, t);
        if self.k > 0 {
            g.view_mut((0, 0), (self.k, self.k))
                .copy_from(&self.q_w[c][m].second_moment());
        }
        if self.k_hat > 0 {
            g.view_mut((self.k, self.k), (self.k_hat, self.k_hat))
                .copy_from(&self.q_what[m].second_moment());
        }
        if self.k > 0 && self.k_hat > 0 {
            let cross = self.q_w[c][m].mean.transpose() * &self.q_what[m].mean;
            g.view_mut((0, self.k), (self.k, self.k_hat)).copy_from(&cross);
            g.view_mut((self.k, 0), (self.k_hat, self.k))
                .copy_from(&cross.transpose());
        }
        g
    }

    /// E‖x_n^(m) − W̃_c^(m) t_n‖² for every (n, c), one N×S matrix per view.
    ///
    /// Expanded with all second moments of both the loadings and the latents.
    pub fn expected_sq_residuals(&self, views: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        let n = self.n_samples();
        let s = self.n_clusters();
        let t = self.total_factors();
        let e_tt: Vec<DMatrix<f64>> = (0..n).map(|i| self.q_z.second_moment(i)).collect();
        views
            .iter()
            .enumerate()
            .map(|(m, x)| {
                let mut out = DMatrix::zeros(n, s);
                for c in 0..s {
                    let w_mean = self.loading_mean_concat(c, m);
                    let g = self.loading_second_moment(c, m);
                    // x·(E[W̃]μ) per sample, batched: (N×D)(D×T) → N×T
                    let proj = x * &w_mean; // N×T would be x * w_mean only if shapes agree: (N×D)(D×T)
                    for i in 0..n {
                        let xi = x.row(i);
                        let mut cross = 0.0;
                        for j in 0..t {
                            cross += proj[(i, j)] * self.q_z.mean[(i, j)];
                        }
                        let mut quad = 0.0;
                        let ett = &e_tt[i];
                        for a in 0..t {
                            for b in 0..t {
                                quad += g[(a, b)] * ett[(b, a)];
                            }
                        }
                        out[(i, c)] = xi.norm_squared() - 2.0 * cross + quad;
                    }
                }
                out
            })
            .collect()
    }

    /// Responsibility column sums Σ_n q_c[n,c].
    pub fn cluster_weights(&self) -> Vec<f64> {
        (0..self.n_clusters())
            .map(|c| self.q_c.column(c).sum())
            .collect()
    }

    /// Structural and numerical invariants of the state.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_samples();
        let s = self.n_clusters();
        let t = self.total_factors();
        if self.q_c.nrows() != n || self.q_c.ncols() != s {
            return Err(Error::ShapeMismatch("q_c shape disagrees with state".into()));
        }
        for i in 0..n {
            let row = self.q_c.row(i);
            if row.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidData(format!("q_c row {i} has a negative entry")));
            }
            if (row.sum() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidData(format!("q_c row {i} sums to {}", row.sum())));
            }
            if self.q_z.cov[i].nrows() != t {
                return Err(Error::ShapeMismatch(format!("latent covariance {i} has wrong size")));
            }
            spd_check(&self.q_z.cov[i], "latent covariance")?;
        }
        for blocks in self.q_w.iter().chain(std::iter::once(&self.q_what)) {
            for b in blocks {
                if b.row_cov.nrows() > 0 {
                    spd_check(&b.row_cov, "loading row covariance")?;
                }
            }
        }
        let positive = |g: &GammaQ| g.shape > 0.0 && g.rate > 0.0 && g.shape.is_finite() && g.rate.is_finite();
        if !self.q_alpha.iter().flatten().flatten().all(positive)
            || !self.q_alpha_hat.iter().flatten().all(positive)
            || !self.q_tau.iter().flatten().all(positive)
        {
            return Err(Error::InvalidData("gamma factor with non-positive parameters".into()));
        }
        if self.q_pi.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidData("dirichlet concentration must be positive".into()));
        }
        if self.q_gamma.iter().any(|g| !(g.a > 0.0 && g.b > 0.0)) {
            return Err(Error::InvalidData("beta factor with non-positive parameters".into()));
        }
        Ok(())
    }
}

fn spd_check(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.nrows() == 0 {
        return Ok(());
    }
    let sym_err = (m - m.transpose()).norm();
    if sym_err > 1e-8 * m.norm().max(1.0) {
        return Err(Error::InvalidData(format!("{what} is not symmetric")));
    }
    if nalgebra::Cholesky::new(m.clone()).is_none() {
        return Err(Error::InvalidData(format!("{what} is not positive definite")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_moments() {
        let g = GammaQ::new(2.0, 4.0);
        assert!((g.mean() - 0.5).abs() < 1e-15);
        // E[log x] = ψ(2) − ln 4
        assert!((g.mean_log() - (0.422_784_335_098_467_134 - 4.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn beta_moments() {
        let b = BetaQ { a: 0.5, b: 0.5 };
        assert!((b.mean() - 0.5).abs() < 1e-15);
        assert!((b.mean_log() - b.mean_log_comp()).abs() < 1e-15);
    }

    #[test]
    fn loading_second_moment_includes_row_cov() {
        let block = LoadingBlock {
            mean: DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
            row_cov: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.25])),
        };
        let g = block.second_moment();
        // MᵀM = [[2,1],[1,2]]; plus 3·diag(0.5,0.25)
        assert!((g[(0, 0)] - 3.5).abs() < 1e-14);
        assert!((g[(1, 1)] - 2.75).abs() < 1e-14);
        assert!((g[(0, 1)] - 1.0).abs() < 1e-14);
        assert!((block.column_sq_norm(0) - (2.0 + 1.5)).abs() < 1e-14);
    }
}
