//! Mean-field coordinate-ascent variational inference for the mixture model.

mod elbo;
mod fit;
mod prune;
mod state;
#[cfg(test)]
mod testutil;
mod updates;

pub use elbo::elbo;
pub use fit::{fit, fit_cycle, initialize, TrainedModel};
pub use prune::{prune_factors, PruneOutcome};
pub use state::{BetaQ, GammaQ, LatentBlock, LoadingBlock, VariationalState};
pub use updates::{
    update_ard, update_assignments, update_label_probs, update_latents, update_loadings,
    update_mixture_weights, update_noise,
};
