//! Command-line entry point. Set GWP_SCREEN_LOG (e.g. `info`, `debug`) to
//! control logging verbosity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gwp_screen::cli::{cmd_analyze, cmd_featurize, cmd_predict, cmd_train, CmdError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "gwp-screen", version, about = "GWP100 screening of refrigerant candidates from SMILES")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the descriptor matrix for a CSV of molecules
    Featurize {
        /// Input CSV with header id,smiles[,...]
        #[arg(long)]
        input: PathBuf,
        /// Output CSV for the descriptor matrix
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the auto-tuning search and save the best ensemble
    Train {
        /// Experiment configuration (TOML)
        #[arg(long)]
        config: PathBuf,
        /// Override the RNG seed from the config
        #[arg(long)]
        seed: Option<u64>,
        /// Override the trial budget from the config
        #[arg(long)]
        budget: Option<usize>,
        /// Override the ensemble size from the config
        #[arg(long)]
        k: Option<usize>,
        /// Override the worker-thread count from the config
        #[arg(long)]
        workers: Option<usize>,
        /// Override the output directory from the config
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Predict GWP100 for a CSV of molecules with a trained ensemble
    Predict {
        /// Trained ensemble artifact (ensemble.json)
        #[arg(long)]
        ensemble: PathBuf,
        /// Input CSV with header id,smiles[,...]
        #[arg(long)]
        input: PathBuf,
        /// Output CSV for predictions
        #[arg(long)]
        output: PathBuf,
    },
    /// Report test metrics, PC sensitivity, loadings and histograms
    Analyze {
        /// Trained ensemble artifact (ensemble.json)
        #[arg(long)]
        ensemble: PathBuf,
        /// The dataset the ensemble was trained on
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory for the reports
        #[arg(long)]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Featurize { input, output } => cmd_featurize(&input, &output),
        Command::Train {
            config,
            seed,
            budget,
            k,
            workers,
            output,
        } => {
            let bytes = std::fs::read(&config)
                .map_err(|e| CmdError::Environment(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::load(&config).map_err(|e| match e {
                gwp_screen::cli::ConfigError::Io { .. } => CmdError::Environment(e.to_string()),
                _ => CmdError::Domain(e.to_string()),
            })?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(b) = budget {
                cfg.budget = b;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(o) = output {
                cfg.output_dir = o;
            }
            cfg.validate()
                .map_err(|e| CmdError::Domain(e.to_string()))?;
            cmd_train(&cfg, &bytes)
        }
        Command::Predict {
            ensemble,
            input,
            output,
        } => cmd_predict(&ensemble, &input, &output),
        Command::Analyze {
            ensemble,
            dataset,
            output,
        } => cmd_analyze(&ensemble, &dataset, &output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("GWP_SCREEN_LOG")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
