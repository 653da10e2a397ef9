//! ARD-driven factor pruning.

use nalgebra::DMatrix;

use crate::hyper::Hyperparameters;

use super::state::VariationalState;

/// Result of a pruning pass. `refused` is set when pruning would have
/// removed every factor; in that case `state` is the unchanged input.
#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub state: VariationalState,
    pub removed_specific: Vec<usize>,
    pub removed_shared: Vec<usize>,
    pub refused: bool,
}

fn select_sub(m: &DMatrix<f64>, rows: Option<&[usize]>, cols: &[usize]) -> DMatrix<f64> {
    let row_idx: Vec<usize> = match rows {
        Some(r) => r.to_vec(),
        None => (0..m.nrows()).collect(),
    };
    DMatrix::from_fn(row_idx.len(), cols.len(), |i, j| m[(row_idx[i], cols[j])])
}

/// Removes factors whose expected loading variance E[α]⁻¹ has collapsed
/// below the threshold in every view (and, for cluster-specific factors,
/// in every cluster). All dependent blocks shrink consistently. Refuses to
/// prune the model down to zero factors.
pub fn prune_factors(state: &VariationalState, hyper: &Hyperparameters) -> PruneOutcome {
    let unchanged = |refused: bool| PruneOutcome {
        state: state.clone(),
        removed_specific: Vec::new(),
        removed_shared: Vec::new(),
        refused,
    };
    let Some(threshold) = hyper.prune_threshold else {
        return unchanged(false);
    };

    let dead_specific = |k: usize| {
        state
            .q_alpha
            .iter()
            .flatten()
            .all(|per_view| 1.0 / per_view[k].mean() < threshold)
    };
    let dead_shared = |k: usize| {
        state
            .q_alpha_hat
            .iter()
            .all(|per_view| 1.0 / per_view[k].mean() < threshold)
    };

    let keep_specific: Vec<usize> = (0..state.k).filter(|&k| !dead_specific(k)).collect();
    let keep_shared: Vec<usize> = (0..state.k_hat).filter(|&k| !dead_shared(k)).collect();
    if keep_specific.len() == state.k && keep_shared.len() == state.k_hat {
        return unchanged(false);
    }
    if keep_specific.is_empty() && keep_shared.is_empty() {
        log::warn!("pruning refused: every factor fell below the threshold");
        return unchanged(true);
    }

    let removed_specific: Vec<usize> = (0..state.k).filter(|&k| dead_specific(k)).collect();
    let removed_shared: Vec<usize> = (0..state.k_hat).filter(|&k| dead_shared(k)).collect();

    // Kept columns of the concatenated latent [z; ẑ].
    let keep_t: Vec<usize> = keep_specific
        .iter()
        .copied()
        .chain(keep_shared.iter().map(|&k| state.k + k))
        .collect();

    let mut new_state = state.clone();
    new_state.k = keep_specific.len();
    new_state.k_hat = keep_shared.len();
    new_state.q_z.mean = select_sub(&state.q_z.mean, None, &keep_t);
    new_state.q_z.cov = state
        .q_z
        .cov
        .iter()
        .map(|cov| select_sub(cov, Some(&keep_t), &keep_t))
        .collect();
    for c in 0..state.n_clusters() {
        for m in 0..state.n_views() {
            let block = &state.q_w[c][m];
            new_state.q_w[c][m].mean = select_sub(&block.mean, None, &keep_specific);
            new_state.q_w[c][m].row_cov =
                select_sub(&block.row_cov, Some(&keep_specific), &keep_specific);
            new_state.q_alpha[c][m] = keep_specific
                .iter()
                .map(|&k| state.q_alpha[c][m][k])
                .collect();
        }
    }
    for m in 0..state.n_views() {
        let block = &state.q_what[m];
        new_state.q_what[m].mean = select_sub(&block.mean, None, &keep_shared);
        new_state.q_what[m].row_cov = select_sub(&block.row_cov, Some(&keep_shared), &keep_shared);
        new_state.q_alpha_hat[m] = keep_shared
            .iter()
            .map(|&k| state.q_alpha_hat[m][k])
            .collect();
    }

    PruneOutcome {
        state: new_state,
        removed_specific,
        removed_shared,
        refused: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::testutil::blank_state;
    use crate::inference::GammaQ;
    use crate::Hyperparameters;

    #[test]
    fn no_threshold_or_no_dead_factor_is_a_no_op() {
        let state = blank_state(4, &[2, 3], 2, 1, 2);
        let hyper = Hyperparameters::default_for(2, 1, 2).unwrap();
        let out = prune_factors(&state, &hyper);
        assert_eq!(out.state, state);
        assert!(!out.refused);

        let mut with_threshold = Hyperparameters::default_for(2, 1, 2).unwrap();
        with_threshold.prune_threshold = Some(1e-8);
        // E[α] = 1 everywhere: E[α]⁻¹ = 1 is above threshold, keep all.
        let out = prune_factors(&state, &with_threshold);
        assert_eq!(out.state, state);
        assert!(out.removed_specific.is_empty() && out.removed_shared.is_empty());
    }

    #[test]
    fn dead_shared_factor_is_removed_consistently() {
        let mut state = blank_state(4, &[2, 3], 1, 2, 2);
        let mut hyper = Hyperparameters::default_for(1, 2, 2).unwrap();
        hyper.prune_threshold = Some(1e-8);
        // Shared factor 1 dead in every view: E[α]⁻¹ = 1e-12.
        for m in 0..2 {
            state.q_alpha_hat[m][1] = GammaQ::new(1e12, 1.0);
        }
        let out = prune_factors(&state, &hyper);
        assert_eq!(out.removed_shared, vec![1]);
        assert!(out.removed_specific.is_empty());
        let s = &out.state;
        assert_eq!(s.k, 1);
        assert_eq!(s.k_hat, 1);
        assert_eq!(s.q_z.mean.ncols(), 2);
        assert_eq!(s.q_z.cov[0].nrows(), 2);
        assert_eq!(s.q_what[0].mean.ncols(), 1);
        assert_eq!(s.q_what[0].row_cov.nrows(), 1);
        assert_eq!(s.q_alpha_hat[0].len(), 1);
        s.validate().unwrap();
    }

    #[test]
    fn factor_alive_in_one_view_survives() {
        let mut state = blank_state(4, &[2, 3], 1, 1, 2);
        let mut hyper = Hyperparameters::default_for(1, 1, 2).unwrap();
        hyper.prune_threshold = Some(1e-8);
        state.q_alpha_hat[0][0] = GammaQ::new(1e12, 1.0); // dead in view 0
        state.q_alpha_hat[1][0] = GammaQ::new(1.0, 1.0); // alive in view 1
        let out = prune_factors(&state, &hyper);
        assert!(out.removed_shared.is_empty());
    }

    #[test]
    fn refuses_to_remove_everything() {
        let mut state = blank_state(4, &[2], 1, 1, 2);
        let mut hyper = Hyperparameters::default_for(1, 1, 2).unwrap();
        hyper.prune_threshold = Some(1e-8);
        for c in 0..2 {
            state.q_alpha[c][0][0] = GammaQ::new(1e12, 1.0);
        }
        state.q_alpha_hat[0][0] = GammaQ::new(1e12, 1.0);
        let out = prune_factors(&state, &hyper);
        assert!(out.refused);
        assert_eq!(out.state, state);
    }
}
