// Diagnose test-time cluster scoring against a dense-covariance oracle.

use gfamix::{fit, make_weak_signal_benchmark, predict, Hyperparameters};
use nalgebra::{Cholesky, DMatrix, DVector};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_train: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(42);
    let specific: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let noise_prec: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let k_shared: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(4);
    let mut cfg = gfamix::WeakSignalConfig::new(60, 4, 5, 1);
    cfg.specific_scale = specific;
    cfg.noise_precision = noise_prec;
    cfg.k_shared = k_shared;
    let (_, data, latents) = cfg.generate().unwrap();
    // pick a train set with both classes, alternating to balance
    let mut train_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();
    let labels_all = data.labels().unwrap().to_vec();
    let (mut n1, mut n0) = (0usize, 0usize);
    for i in 0..60 {
        if labels_all[i] == 1 && n1 < n_train / 2 { train_idx.push(i); n1 += 1; }
        else if labels_all[i] == 0 && n0 < n_train - n_train / 2 { train_idx.push(i); n0 += 1; }
        else { test_idx.push(i); }
    }
    let test_idx: Vec<usize> = test_idx.into_iter().take(18).collect();
    let train = data.subset(&train_idx).unwrap();
    let test = data.subset(&test_idx).unwrap();

    let hyper = Hyperparameters::default_for(2, 4, 2).unwrap();
    let model = fit(&train, &hyper, 7).unwrap();
    let _ = &latents;
    println!("converged={} iters={}", model.converged, model.n_iterations);
    println!("gamma means: {:?}", model.state.q_gamma.iter().map(|g| g.mean()).collect::<Vec<_>>());
    println!("pi bar: {:?}", model.state.mean_pi());
    for c in 0..2 {
        let taus: Vec<f64> = (0..4).map(|m| model.state.q_tau[c][m].mean()).collect();
        println!("tau[{c}]: {taus:?}");
        let wnorm: f64 = (0..4).map(|m| model.state.q_w[c][m].mean.norm_squared()).sum::<f64>().sqrt();
        println!("  |W_{c}|_F = {wnorm:.3}");
    }
    let whatnorm: f64 = (0..4).map(|m| model.state.q_what[m].mean.norm_squared()).sum::<f64>().sqrt();
    println!("|What|_F = {whatnorm:.3}");

    // training-cluster alignment with labels
    let labels_train = train.labels().unwrap();
    let mut cross = [[0usize; 2]; 2];
    for i in 0..train.n_samples() {
        let hard = if model.state.q_c[(i, 0)] >= 0.5 { 0 } else { 1 };
        cross[hard][labels_train[i] as usize] += 1;
    }
    println!("train cluster x label table: {cross:?}");

    // our predict
    let pred = predict(&model, &test.without_labels()).unwrap();

    // oracle: dense marginal likelihood per cluster with the same point params
    let d_tot: usize = model.view_dims.iter().sum();
    let mut scores_oracle = DMatrix::zeros(test.n_samples(), 2);
    for c in 0..2 {
        // stack loadings and noise
        let mut w_full = DMatrix::zeros(d_tot, model.state.total_factors());
        let mut noise = DMatrix::zeros(d_tot, d_tot);
        let mut row = 0;
        for m in 0..4 {
            let w = model.state.loading_mean_concat(c, m);
            w_full.view_mut((row, 0), (w.nrows(), w.ncols())).copy_from(&w);
            let tau = model.state.q_tau[c][m].mean();
            for d in 0..w.nrows() {
                noise[(row + d, row + d)] = 1.0 / tau;
            }
            row += w.nrows();
        }
        let sigma = &w_full * w_full.transpose() + noise;
        let chol = Cholesky::new(sigma).unwrap();
        let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        for i in 0..test.n_samples() {
            let mut x = DVector::zeros(d_tot);
            let mut r0 = 0;
            for m in 0..4 {
                let v = test.view(m);
                for d in 0..v.ncols() {
                    x[r0 + d] = v[(i, d)];
                }
                r0 += v.ncols();
            }
            let quad = x.dot(&chol.solve(&x));
            scores_oracle[(i, c)] =
                -0.5 * (d_tot as f64 * (2.0 * std::f64::consts::PI).ln() + logdet + quad);
        }
    }

    let labels_test = test.labels().unwrap();
    let mut correct_ours = 0;
    let mut correct_oracle = 0;
    let verbose = std::env::var("VERBOSE").is_ok();
    for i in 0..test.n_samples() {
        let truth_cluster = latents.c[test_idx[i]];
        let odiff = scores_oracle[(i, 0)] - scores_oracle[(i, 1)];
        if verbose {
            println!(
                "{:2}  c={} r={}   {:+.4}   {:+.2}",
                i, truth_cluster, labels_test[i], pred.prob_class1[i], odiff
            );
        }
        let _ = truth_cluster;
        // which fitted cluster corresponds to label1? via gamma
        let label1_cluster = if model.state.q_gamma[0].mean() > 0.5 { 0 } else { 1 };
        let ours_pick = if pred.responsibilities[(i, 0)] >= 0.5 { 0 } else { 1 };
        let oracle_pick = if odiff >= 0.0 { 0 } else { 1 };
        let truth_fitted = if labels_test[i] == 1 { label1_cluster } else { 1 - label1_cluster };
        if ours_pick == truth_fitted {
            correct_ours += 1;
        }
        if oracle_pick == truth_fitted {
            correct_oracle += 1;
        }
    }
    println!("ours correct: {correct_ours}/18, dense-oracle correct: {correct_oracle}/18");
}
