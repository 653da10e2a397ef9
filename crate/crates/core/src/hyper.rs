//! Model hyperparameters and their defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts, prior parameters and convergence controls for the mixture model.
///
/// `k` cluster-specific and `k_hat` shared factors, `s` mixture components.
/// The cluster-specific ARD prior is deliberately non-informative while the
/// shared-factor ARD prior carries a large shape so that shared factors are
/// a-priori weaker and the model keeps cluster-specific structure alive.
/// `beta_weight` multiplies the label likelihood so that clusters track the
/// class labels during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub k: usize,
    pub k_hat: usize,
    pub s: usize,
    pub ard_shape: f64,
    pub ard_rate: f64,
    pub shared_ard_shape: f64,
    pub shared_ard_rate: f64,
    pub noise_shape: f64,
    pub noise_rate: f64,
    pub beta_weight: f64,
    pub dirichlet_conc: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub max_iter: usize,
    pub elbo_rel_tol: f64,
    /// Factors whose expected loading variance E[α]⁻¹ falls below this in
    /// every view are removed at a fixed cadence during fitting. `None`
    /// disables pruning.
    pub prune_threshold: Option<f64>,
}

impl Hyperparameters {
    /// Default hyperparameters for the given factor and cluster counts.
    pub fn default_for(k: usize, k_hat: usize, s: usize) -> Result<Self> {
        let h = Self {
            k,
            k_hat,
            s,
            ard_shape: 1e-14,
            ard_rate: 1e-14,
            shared_ard_shape: 30.0,
            shared_ard_rate: 1.0,
            noise_shape: 1e-14,
            noise_rate: 1e-14,
            beta_weight: 100.0,
            dirichlet_conc: 1.0,
            beta_a: 0.5,
            beta_b: 0.5,
            max_iter: 500,
            elbo_rel_tol: 1e-8,
            prune_threshold: None,
        };
        h.validate()?;
        Ok(h)
    }

    /// Total latent dimensionality K + K̂.
    pub fn total_factors(&self) -> usize {
        self.k + self.k_hat
    }

    pub fn validate(&self) -> Result<()> {
        if self.k + self.k_hat == 0 {
            return Err(Error::InvalidHyper("K + K̂ must be at least 1".into()));
        }
        if self.s == 0 {
            return Err(Error::InvalidHyper("S must be at least 1".into()));
        }
        let positives = [
            ("ard_shape", self.ard_shape),
            ("ard_rate", self.ard_rate),
            ("shared_ard_shape", self.shared_ard_shape),
            ("shared_ard_rate", self.shared_ard_rate),
            ("noise_shape", self.noise_shape),
            ("noise_rate", self.noise_rate),
            ("beta_weight", self.beta_weight),
            ("dirichlet_conc", self.dirichlet_conc),
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
            ("elbo_rel_tol", self.elbo_rel_tol),
        ];
        for (name, v) in positives {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidHyper(format!("{name} must be strictly positive, got {v}")));
            }
        }
        if let Some(t) = self.prune_threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidHyper(format!(
                    "prune_threshold must be strictly positive when set, got {t}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidHyper("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}
