//! Hand-constructible states for oracle tests.

use nalgebra::DMatrix;

use super::state::{BetaQ, GammaQ, LatentBlock, LoadingBlock, VariationalState};

/// A structurally valid state with neutral values: zero latent/loading
/// means, identity covariances, unit gamma factors, uniform
/// responsibilities. Tests overwrite the pieces they pin down.
pub(crate) fn blank_state(
    n: usize,
    dims: &[usize],
    k: usize,
    k_hat: usize,
    s: usize,
) -> VariationalState {
    let t = k + k_hat;
    VariationalState {
        k,
        k_hat,
        q_z: LatentBlock {
            mean: DMatrix::zeros(n, t),
            cov: vec![DMatrix::identity(t, t); n],
        },
        q_w: vec![
            dims.iter()
                .map(|&d| LoadingBlock {
                    mean: DMatrix::zeros(d, k),
                    row_cov: DMatrix::identity(k, k),
                })
                .collect();
            s
        ],
        q_what: dims
            .iter()
            .map(|&d| LoadingBlock {
                mean: DMatrix::zeros(d, k_hat),
                row_cov: DMatrix::identity(k_hat, k_hat),
            })
            .collect(),
        q_alpha: vec![vec![vec![GammaQ::new(1.0, 1.0); k]; dims.len()]; s],
        q_alpha_hat: vec![vec![GammaQ::new(1.0, 1.0); k_hat]; dims.len()],
        q_tau: vec![vec![GammaQ::new(1.0, 1.0); dims.len()]; s],
        q_pi: vec![1.0; s],
        q_gamma: vec![BetaQ { a: 0.5, b: 0.5 }; s],
        q_c: DMatrix::from_element(n, s, 1.0 / s as f64),
    }
}
