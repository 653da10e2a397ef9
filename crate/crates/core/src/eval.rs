//! AUC scoring and the resampling evaluation harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::MultiViewDataset;
use crate::error::{Error, Result};
use crate::glasso::{fit_glasso, predict_glasso};
use crate::hyper::Hyperparameters;
use crate::inference::fit;
use crate::predict::predict;

/// Area under the ROC curve via the rank-sum (Mann-Whitney) formulation
/// with half credit for ties.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidData("AUC requires both classes present".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidData("AUC scores must be finite".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // Tie-averaged ranks (1-based).
    let mut rank = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            rank[idx] = avg;
        }
        i = j + 1;
    }
    let rank_sum_pos: f64 = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .map(|(i, _)| rank[i])
        .sum();
    let n_pos = n_pos as f64;
    Ok((rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg as f64))
}

/// Train/test index sets of one resampling draw.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// AUC-versus-training-size report produced by [`resample_eval`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub train_sizes: Vec<usize>,
    /// Mean AUC per training size.
    pub auc_mean: Vec<f64>,
    /// Per-size, per-repeat AUC values.
    pub auc_per_draw: Vec<Vec<f64>>,
    pub n_repeats: usize,
    pub seed: u64,
    /// The exact index draws, per size and repeat; fixed by the seed alone,
    /// so evaluations with a shared seed are paired across classifiers.
    pub draws: Vec<Vec<DrawIndices>>,
}

/// A fit/predict pair scored by the harness.
pub trait Classifier: Sync {
    fn name(&self) -> &str;
    /// Fits on `train` (labels present) and returns class-1 scores for
    /// `test` (labels absent).
    fn scores(&self, train: &MultiViewDataset, test: &MultiViewDataset, seed: u64) -> Result<Vec<f64>>;
}

/// The mixture model as a harness classifier.
pub struct GfaMixClassifier {
    pub hyper: Hyperparameters,
}

impl Classifier for GfaMixClassifier {
    fn name(&self) -> &str {
        if self.hyper.k_hat == 0 { "gfamix-noshared" } else { "gfamix" }
    }

    fn scores(&self, train: &MultiViewDataset, test: &MultiViewDataset, seed: u64) -> Result<Vec<f64>> {
        let model = fit(train, &self.hyper, seed)?;
        Ok(predict(&model, test)?.prob_class1)
    }
}

/// The group-LASSO logistic baseline as a harness classifier.
pub struct GLassoClassifier {
    pub n_lambda: usize,
    pub cv_folds: usize,
}

impl Default for GLassoClassifier {
    fn default() -> Self {
        Self { n_lambda: 30, cv_folds: 5 }
    }
}

impl Classifier for GLassoClassifier {
    fn name(&self) -> &str {
        "glasso"
    }

    fn scores(&self, train: &MultiViewDataset, test: &MultiViewDataset, seed: u64) -> Result<Vec<f64>> {
        let model = fit_glasso(train, self.n_lambda, self.cv_folds, seed)?;
        predict_glasso(&model, test)
    }
}

fn mix_seed(seed: u64, size_idx: usize, repeat: usize, tag: u64) -> u64 {
    // splitmix64 over the packed identifiers
    let mut z = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((size_idx as u64) << 32)
        .wrapping_add(repeat as u64)
        .wrapping_add(tag.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn has_both_classes(labels: &[u8], idx: &[usize]) -> bool {
    let mut saw = [false, false];
    for &i in idx {
        saw[labels[i] as usize] = true;
    }
    saw[0] && saw[1]
}

/// Draws the train/test index plan for every (size, repeat) pair.
///
/// Each draw picks `size + test_size` distinct indices uniformly at random
/// and redraws (up to 100 times) until both classes appear in the training
/// and the test portion.
fn resample_plan(
    labels: &[u8],
    n: usize,
    train_sizes: &[usize],
    test_size: usize,
    n_repeats: usize,
    seed: u64,
) -> Result<Vec<Vec<DrawIndices>>> {
    let mut plan = Vec::with_capacity(train_sizes.len());
    for (si, &size) in train_sizes.iter().enumerate() {
        let mut per_size = Vec::with_capacity(n_repeats);
        for rep in 0..n_repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, si, rep, 0xD0A7));
            let mut found = None;
            for _attempt in 0..100 {
                let mut pool: Vec<usize> = (0..n).collect();
                for i in 0..(size + test_size) {
                    let j = rng.random_range(i..n);
                    pool.swap(i, j);
                }
                let train = pool[..size].to_vec();
                let test = pool[size..size + test_size].to_vec();
                if has_both_classes(labels, &train) && has_both_classes(labels, &test) {
                    found = Some(DrawIndices { train, test });
                    break;
                }
            }
            let draw = found.ok_or_else(|| {
                Error::InvalidData(format!(
                    "could not draw both classes into train and test (size {size}) in 100 attempts"
                ))
            })?;
            per_size.push(draw);
        }
        plan.push(per_size);
    }
    Ok(plan)
}

/// Resampling evaluation: for each training size and repeat, draw disjoint
/// train/test sets, fit the classifier, and score test AUC. Deterministic
/// given the seed; repeats run in parallel with per-repeat derived seeds.
pub fn resample_eval(
    dataset: &MultiViewDataset,
    classifier: &dyn Classifier,
    train_sizes: &[usize],
    test_size: usize,
    n_repeats: usize,
    seed: u64,
) -> Result<EvalReport> {
    let labels = dataset.require_labels()?;
    let n = dataset.n_samples();
    if train_sizes.is_empty() || n_repeats == 0 || test_size == 0 {
        return Err(Error::InvalidData("need at least one size, repeat and test sample".into()));
    }
    let max_size = *train_sizes.iter().max().unwrap();
    if max_size + test_size > n {
        return Err(Error::InvalidData(format!(
            "infeasible sizes: train {max_size} + test {test_size} exceeds N = {n}"
        )));
    }
    if train_sizes.iter().any(|&s| s < 2) {
        return Err(Error::InvalidData("training sizes must be at least 2".into()));
    }

    let plan = resample_plan(labels, n, train_sizes, test_size, n_repeats, seed)?;

    let auc_per_draw: Vec<Vec<f64>> = plan
        .par_iter()
        .enumerate()
        .map(|(si, per_size)| {
            per_size
                .par_iter()
                .enumerate()
                .map(|(rep, draw)| {
                    let train = dataset.subset(&draw.train)?;
                    let test_full = dataset.subset(&draw.test)?;
                    let scores = classifier.scores(
                        &train,
                        &test_full.without_labels(),
                        mix_seed(seed, si, rep, 0xF17),
                    )?;
                    auc(&scores, test_full.require_labels()?)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let auc_mean = auc_per_draw
        .iter()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        .collect();

    Ok(EvalReport {
        train_sizes: train_sizes.to_vec(),
        auc_mean,
        auc_per_draw,
        n_repeats,
        seed,
        draws: plan,
    })
}
