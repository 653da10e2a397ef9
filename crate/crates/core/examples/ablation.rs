// Scratch ablation run: gfamix vs gfamix-noshared vs glasso on the
// weak-signal benchmark, mirroring the comparison pipeline.

use gfamix::{
    resample_eval, Classifier, GLassoClassifier, GfaMixClassifier, Hyperparameters,
};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let data_seed: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1);
    let eval_seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(11);
    let specific: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let noise_prec: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.0);
        let k_shared: usize = std::env::args().nth(5).map(|s| s.parse().unwrap()).unwrap_or(4);
    let mut cfg = gfamix::WeakSignalConfig::new(60, 4, 5, data_seed);
    cfg.k_shared = k_shared;
    if let Some(c) = std::env::args().nth(6) { cfg.noise_contrast = c.parse().unwrap(); }
    if let Some(c) = std::env::args().nth(7) { cfg.shared_decay = c.parse().unwrap(); }
    cfg.specific_scale = specific;
    cfg.noise_precision = noise_prec;
    let (_, data, _) = cfg.generate().unwrap();
    let sizes = [4usize, 8, 16, 28, 42];

    let k: usize = std::env::args().nth(8).map(|s| s.parse().unwrap()).unwrap_or(2);
    let k_hat: usize = std::env::args().nth(9).map(|s| s.parse().unwrap()).unwrap_or(4);
    let gfamix = GfaMixClassifier { hyper: Hyperparameters::default_for(k, k_hat, 2).unwrap() };
    let noshared = GfaMixClassifier { hyper: Hyperparameters::default_for(k + k_hat, 0, 2).unwrap() };
    let glasso = GLassoClassifier::default();

    let t0 = std::time::Instant::now();
    let classifiers: [&dyn Classifier; 3] = [&gfamix, &noshared, &glasso];
    let mut means = Vec::new();
    for c in classifiers {
        let t = std::time::Instant::now();
        let report = resample_eval(&data, c, &sizes, 10, 10, eval_seed).unwrap();
        println!("{:<16} {:?}  ({:?})", c.name(), report.auc_mean.iter().map(|&m| (m * 1000.0).round() / 1000.0).collect::<Vec<_>>(), t.elapsed());
        means.push(report.auc_mean.clone());
    }
    let gap: f64 = means[0]
        .iter()
        .zip(&means[1])
        .map(|(a, b)| a - b)
        .sum::<f64>()
        / sizes.len() as f64;
    println!("mean gap gfamix - noshared: {gap:.4}");
    println!("gfamix >= glasso at sizes <= 16: {:?}", (0..3).map(|i| means[0][i] >= means[2][i]).collect::<Vec<_>>());
    println!("total: {:?}", t0.elapsed());
}
