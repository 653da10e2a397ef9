//! Command-line pipeline: simulate, train, predict, evaluate, reconstruct,
//! compare.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gfamix", version, about = "Classifying mixture of group factor analyzers with shared factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct HyperArgs {
    /// Cluster-specific factor count.
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    /// Shared factor count.
    #[arg(long = "K-hat", default_value_t = 4)]
    k_hat: usize,
    /// Mixture component count.
    #[arg(long = "S", default_value_t = 2)]
    s: usize,
    /// Label-likelihood weight β.
    #[arg(long)]
    beta_weight: Option<f64>,
    /// Shape of the shared-factor ARD prior.
    #[arg(long)]
    shared_ard_shape: Option<f64>,
    /// Maximum coordinate-ascent cycles.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative ELBO change declaring convergence.
    #[arg(long)]
    tol: Option<f64>,
    /// Enable ARD factor pruning below this expected loading variance.
    #[arg(long)]
    prune_threshold: Option<f64>,
}

impl HyperArgs {
    fn build(&self) -> gfamix::Result<gfamix::Hyperparameters> {
        let mut h = gfamix::Hyperparameters::default_for(self.k, self.k_hat, self.s)?;
        if let Some(v) = self.beta_weight {
            h.beta_weight = v;
        }
        if let Some(v) = self.shared_ard_shape {
            h.shared_ard_shape = v;
        }
        if let Some(v) = self.max_iter {
            h.max_iter = v;
        }
        if let Some(v) = self.tol {
            h.elbo_rel_tol = v;
        }
        h.prune_threshold = self.prune_threshold;
        h.validate()?;
        Ok(h)
    }
}

#[derive(Args, Debug, Clone)]
struct EvalArgs {
    /// Classifier: gfamix, gfamix-noshared, or glasso.
    #[arg(long, default_value = "gfamix")]
    classifier: String,
    /// Training-set sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 8, 16, 28, 42])]
    train_sizes: Vec<usize>,
    /// Held-out test samples per draw.
    #[arg(long, default_value_t = 10)]
    test_size: usize,
    /// Independent train/test draws per size.
    #[arg(long, default_value_t = 10)]
    repeats: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic weak-signal benchmark dataset.
    Simulate {
        /// Output directory for the manifest, CSVs and ground truth.
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        #[arg(long = "D", default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Shared-to-specific loading scale ratio.
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Fit the mixture model and write the model file plus an ELBO trace.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Output path for the serialized model.
        #[arg(long)]
        model: PathBuf,
        /// Output path for the ELBO trace CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Score unseen samples with a trained model.
    Predict {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Output CSV of responsibilities and class-1 probabilities.
        #[arg(long)]
        out: PathBuf,
    },
    /// Resampling AUC evaluation of one classifier.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        eval: EvalArgs,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Per-cluster, shared and difference reconstructions as CSVs.
    Reconstruct {
        #[arg(long)]
        model: PathBuf,
        /// Output directory for the reconstruction CSVs.
        #[arg(long)]
        out: PathBuf,
    },
    /// Paired comparison of gfamix, gfamix-noshared and glasso.
    Compare {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        eval: EvalArgs,
        #[command(flatten)]
        hyper: HyperArgs,
    },
}

fn exit_code_for(err: &gfamix::Error) -> u8 {
    match err {
        gfamix::Error::InvalidData(_) | gfamix::Error::InvalidHyper(_) | gfamix::Error::ShapeMismatch(_) => 2,
        gfamix::Error::Io(_) | gfamix::Error::Serialization(_) => 3,
        gfamix::Error::Numerical(_) => 4,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { out, n, m, d, seed, ratio } => commands::simulate(&out, n, m, d, seed, ratio),
        Command::Train { data, model, out, seed, hyper } => commands::train(&data, &model, &out, seed, &hyper),
        Command::Predict { data, model, out } => commands::predict(&data, &model, &out),
        Command::Evaluate { data, out, seed, eval, hyper } => commands::evaluate(&data, &out, seed, &eval, &hyper),
        Command::Reconstruct { model, out } => commands::reconstruct(&model, &out),
        Command::Compare { data, out, seed, eval, hyper } => commands::compare(&data, &out, seed, &eval, &hyper),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
