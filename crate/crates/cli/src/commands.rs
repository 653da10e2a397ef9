//! Subcommand implementations.

use std::path::Path;

use gfamix::io::{format_f64, write_dataset, write_ground_truth};
use gfamix::serialize::{load_model, save_model};
use gfamix::{
    fit, predict as predict_model, reconstruct as reconstruct_model, reconstruct_shared,
    resample_eval, trial_average, Classifier, Error, EvalReport, GLassoClassifier,
    GfaMixClassifier, Hyperparameters, Result, WeakSignalConfig,
};

use crate::report::{compare_rows, draw_rows, eval_rows, trace_rows, write_csv};
use crate::{EvalArgs, HyperArgs};

pub fn simulate(out: &Path, n: usize, m: usize, d: usize, seed: u64, ratio: Option<f64>) -> Result<()> {
    let mut cfg = WeakSignalConfig::new(n, m, d, seed);
    if let Some(r) = ratio {
        cfg.signal_ratio = r;
    }
    let (params, dataset, latents) = cfg.generate()?;
    let manifest = write_dataset(out, &dataset)?;
    write_ground_truth(out, &params, &latents)?;
    println!("wrote {}", manifest.display());
    Ok(())
}

pub fn train(data: &Path, model_out: &Path, trace_out: &Path, seed: u64, hyper: &HyperArgs) -> Result<()> {
    let dataset = gfamix::io::read_dataset(data)?;
    dataset.require_labels()?;
    let hyper = hyper.build()?;
    let model = fit(&dataset, &hyper, seed)?;
    if !model.converged {
        eprintln!(
            "warning: not converged after {} iterations (relative tolerance {})",
            model.n_iterations, hyper.elbo_rel_tol
        );
    }
    save_model(&model, model_out)?;
    write_csv(trace_out, &["iteration", "elbo"], &trace_rows(&model.elbo_trace))?;
    println!(
        "trained: {} iterations, converged = {}, final elbo = {}",
        model.n_iterations,
        model.converged,
        model.elbo_trace.last().map(|e| format_f64(*e)).unwrap_or_default()
    );
    Ok(())
}

pub fn predict(data: &Path, model_path: &Path, out: &Path) -> Result<()> {
    let dataset = gfamix::io::read_dataset(data)?;
    let model = load_model(model_path)?;
    let pred = predict_model(&model, &dataset)?;
    let s = pred.responsibilities.ncols();
    let mut header: Vec<String> = vec!["sample".into(), "prob_class1".into()];
    header.extend((1..=s).map(|c| format!("resp_{c}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..dataset.n_samples())
        .map(|i| {
            let mut row = vec![(i + 1).to_string(), format_f64(pred.prob_class1[i])];
            row.extend((0..s).map(|c| format_f64(pred.responsibilities[(i, c)])));
            row
        })
        .collect();
    write_csv(out, &header_refs, &rows)
}

fn make_classifier(name: &str, hyper: &Hyperparameters) -> Result<Box<dyn Classifier>> {
    match name {
        "gfamix" => Ok(Box::new(GfaMixClassifier { hyper: hyper.clone() })),
        "gfamix-noshared" => {
            // Shared factors removed, cluster factors increased by the same
            // amount: the total factor budget is held fixed.
            let mut h = hyper.clone();
            h.k += h.k_hat;
            h.k_hat = 0;
            h.validate()?;
            Ok(Box::new(GfaMixClassifier { hyper: h }))
        }
        "glasso" => Ok(Box::new(GLassoClassifier::default())),
        other => Err(Error::InvalidData(format!(
            "unknown classifier {other:?}; valid names: gfamix, gfamix-noshared, glasso"
        ))),
    }
}

pub fn evaluate(data: &Path, out: &Path, seed: u64, eval: &EvalArgs, hyper: &HyperArgs) -> Result<()> {
    let dataset = gfamix::io::read_dataset(data)?;
    let hyper = hyper.build()?;
    let classifier = make_classifier(&eval.classifier, &hyper)?;
    let report = resample_eval(
        &dataset,
        classifier.as_ref(),
        &eval.train_sizes,
        eval.test_size,
        eval.repeats,
        seed,
    )?;
    write_csv(out, &["train_size", "repeat", "auc"], &eval_rows(&report))?;
    for (si, &size) in report.train_sizes.iter().enumerate() {
        println!("size {size}: mean AUC {}", report.auc_mean[si]);
    }
    Ok(())
}

pub fn reconstruct(model_path: &Path, out: &Path) -> Result<()> {
    let model = load_model(model_path)?;
    let s = model.state.n_clusters();
    let n = model.state.n_samples();
    std::fs::create_dir_all(out)?;

    // Trials are attributed to the cluster with the highest responsibility.
    let assign: Vec<usize> = (0..n)
        .map(|i| {
            (0..s)
                .max_by(|&a, &b| {
                    model.state.q_c[(i, a)]
                        .partial_cmp(&model.state.q_c[(i, b)])
                        .unwrap()
                })
                .unwrap()
        })
        .collect();

    let write_vectors = |name: &str, vectors: &[Vec<f64>]| -> Result<()> {
        for (m, v) in vectors.iter().enumerate() {
            let header: Vec<String> = (1..=v.len()).map(|d| format!("dim_{d}")).collect();
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let row = vec![v.iter().map(|&x| format_f64(x)).collect::<Vec<_>>()];
            write_csv(&out.join(format!("{name}_view{}.csv", m + 1)), &header_refs, &row)?;
        }
        Ok(())
    };

    let mut cluster_means: Vec<Option<Vec<Vec<f64>>>> = Vec::with_capacity(s);
    for c in 0..s {
        let recon = reconstruct_model(&model, c, false)?;
        let mask: Vec<bool> = assign.iter().map(|&a| a == c).collect();
        if mask.iter().any(|&b| b) {
            let means: Vec<Vec<f64>> = trial_average(&recon, &mask)?
                .into_iter()
                .map(|v| v.iter().cloned().collect())
                .collect();
            write_vectors(&format!("cluster{}", c + 1), &means)?;
            cluster_means.push(Some(means));
        } else {
            eprintln!("notice: no trials assigned to cluster {}; skipping its panel", c + 1);
            cluster_means.push(None);
        }
    }

    let shared = reconstruct_shared(&model);
    let all_mask = vec![true; n];
    let shared_means: Vec<Vec<f64>> = trial_average(&shared, &all_mask)?
        .into_iter()
        .map(|v| v.iter().cloned().collect())
        .collect();
    write_vectors("shared", &shared_means)?;

    if s < 2 {
        eprintln!("notice: difference panel needs at least two clusters; skipped");
    } else if let (Some(a), Some(b)) = (&cluster_means[0], &cluster_means[1]) {
        let diff: Vec<Vec<f64>> = a
            .iter()
            .zip(b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
            .collect();
        write_vectors("diff", &diff)?;
    } else {
        eprintln!("notice: difference panel skipped (an empty cluster has no average)");
    }
    Ok(())
}

pub fn compare(data: &Path, out: &Path, seed: u64, eval: &EvalArgs, hyper: &HyperArgs) -> Result<()> {
    let dataset = gfamix::io::read_dataset(data)?;
    let hyper = hyper.build()?;
    let names = ["gfamix", "gfamix-noshared", "glasso"];
    let mut reports: Vec<(String, EvalReport)> = Vec::new();
    for name in names {
        let classifier = make_classifier(name, &hyper)?;
        let report = resample_eval(
            &dataset,
            classifier.as_ref(),
            &eval.train_sizes,
            eval.test_size,
            eval.repeats,
            seed,
        )?;
        reports.push((name.to_string(), report));
    }
    // The draws depend only on the seed and sizes, so the comparison is
    // paired by construction; a mismatch means the harness is broken.
    for (name, r) in &reports[1..] {
        if r.draws != reports[0].1.draws {
            return Err(Error::Numerical(format!(
                "draws for {name} diverged from gfamix: the comparison is no longer paired"
            )));
        }
    }

    let mut header: Vec<String> = vec!["train_size".into(), "classifier".into(), "mean_auc".into()];
    header.extend((1..=eval.repeats).map(|r| format!("auc_{r}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for (name, report) in &reports {
        rows.extend(compare_rows(name, report));
        for (si, &size) in report.train_sizes.iter().enumerate() {
            println!("{name} size {size}: mean AUC {}", report.auc_mean[si]);
        }
    }
    write_csv(out, &header_refs, &rows)?;

    let draws_path = match (out.parent(), out.file_stem()) {
        (Some(dir), Some(stem)) => dir.join(format!("{}_draws.csv", stem.to_string_lossy())),
        _ => return Err(Error::InvalidData(format!("not a file path: {}", out.display()))),
    };
    write_csv(
        &draws_path,
        &["train_size", "repeat", "train_indices", "test_indices"],
        &draw_rows(&reports[0].1),
    )
}
