// Scratch driver for eyeballing fit behavior during development.

use gfamix::{fit, make_weak_signal_benchmark, Hyperparameters};

fn main() {
    let (_, data, latents) = make_weak_signal_benchmark(60, 4, 5, 1).unwrap();
    let hyper = Hyperparameters::default_for(2, 4, 2).unwrap();
    let t0 = std::time::Instant::now();
    let model = fit(&data, &hyper, 7).unwrap();
    println!(
        "iters={} converged={} elapsed={:?}",
        model.n_iterations,
        model.converged,
        t0.elapsed()
    );
    let trace = &model.elbo_trace;
    println!("first elbos: {:?}", &trace[..trace.len().min(5)]);
    println!("last elbo: {:?}", trace.last());
    let mut worst: f64 = 0.0;
    for w in trace.windows(2) {
        let slack = (w[0] - w[1]) / w[0].abs().max(1.0);
        worst = worst.max(slack);
    }
    println!("worst per-cycle decrease (relative): {worst:e}");

    // cluster agreement vs truth
    let mut agree = 0;
    let n = data.n_samples();
    for i in 0..n {
        let hard = if model.state.q_c[(i, 0)] >= 0.5 { 0 } else { 1 };
        if hard == latents.c[i] {
            agree += 1;
        }
    }
    let frac = agree.max(n - agree) as f64 / n as f64;
    println!("cluster agreement (up to permutation): {frac}");
}
