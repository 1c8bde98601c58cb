use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use wold_lab::experiments::{self, ConfigPatch, ExperimentConfig, ExperimentError};

/// Seeded operator-topology experiments; every run writes summary.json,
/// trials.csv and meta.json under <out>/<scenario>/.
#[derive(Parser)]
#[command(name = "wold-lab", version, about)]
struct Cli {
    /// One of: metrics-selftest, witness-scan, lemma3, wold, density-sot,
    /// density-wot, embed-roots, nowhere-density, sample-survey, pw-explore
    scenario: String,
    /// Base seed for all sampled operators
    #[arg(long)]
    seed: Option<u64>,
    /// Window dimension of sampled operators
    #[arg(long)]
    dim: Option<usize>,
    /// Test family: basis_first or staged_dyadic
    #[arg(long)]
    family: Option<String>,
    /// Metric truncation depth (leading family vectors)
    #[arg(long)]
    prefix: Option<usize>,
    /// Power truncation depth for the power-weak metric
    #[arg(long)]
    trunc: Option<usize>,
    /// Accuracy target where a scenario needs one
    #[arg(long)]
    eps: Option<f64>,
    /// Number of sampled trials
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (scenario subdirectory is created inside)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which data files to write: json, csv or both
    #[arg(long)]
    format: Option<String>,
    /// JSON file with partial settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file_patch = match &cli.config {
        Some(path) => match experiments::load_patch(path) {
            Ok(p) => Some(p),
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let cli_patch = ConfigPatch {
        seed: cli.seed,
        dim: cli.dim,
        family: cli.family,
        prefix: cli.prefix,
        trunc: cli.trunc,
        eps: cli.eps,
        trials: cli.trials,
        out: cli.out.map(|p| p.to_string_lossy().into_owned()),
        format: cli.format,
    };
    let cfg = match ExperimentConfig::build(&cli.scenario, file_patch.as_ref(), &cli_patch) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    match experiments::execute(&cfg) {
        Ok(artifacts) => {
            println!("ok: {}", artifacts.dir.display());
            ExitCode::SUCCESS
        }
        Err(ExperimentError::Assertion(msg)) => {
            eprintln!("scenario checks failed:\n{msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
