// Watch the shared-vs-specific loading race across simulator settings.

use gfamix::inference::fit_cycle;
use gfamix::{initialize, Hyperparameters, WeakSignalConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let specific: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let noise_prec: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let n: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(42);

        let k_shared: usize = std::env::args().nth(5).map(|s| s.parse().unwrap()).unwrap_or(4);
    let mut cfg = WeakSignalConfig::new(60, 4, 5, 1);
    cfg.k_shared = k_shared;
    cfg.specific_scale = specific;
    cfg.noise_precision = noise_prec;
    let (_, data, _) = cfg.generate().unwrap();
    let data = data.subset(&(0..n).collect::<Vec<_>>()).unwrap();

    let hyper = Hyperparameters::default_for(2, 4, 2).unwrap();
    let mut state = initialize(&data, &hyper, 7).unwrap();
    gfamix::inference::update_loadings(&mut state, &data).unwrap();
    println!("cycle |W0|_F |W1|_F |What|_F   mean_tau0 mean_tau1  elbo");
    for it in 0..200 {
        let e = fit_cycle(&mut state, &data, &hyper).unwrap();
        if it < 10 || (it + 1) % 20 == 0 {
            let w0: f64 = (0..4).map(|m| state.q_w[0][m].mean.norm_squared()).sum::<f64>().sqrt();
            let w1: f64 = (0..4).map(|m| state.q_w[1][m].mean.norm_squared()).sum::<f64>().sqrt();
            let wh: f64 = (0..4).map(|m| state.q_what[m].mean.norm_squared()).sum::<f64>().sqrt();
            let t0: f64 = (0..4).map(|m| state.q_tau[0][m].mean()).sum::<f64>() / 4.0;
            let t1: f64 = (0..4).map(|m| state.q_tau[1][m].mean()).sum::<f64>() / 4.0;
            println!("{it:4} {w0:8.3} {w1:8.3} {wh:8.3}  {t0:9.4} {t1:9.4}  {e:.2}");
        }
    }
}
