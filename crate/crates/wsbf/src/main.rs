use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use wsbf::commands;
use wsbf::config::RunConfig;
use wsbf_core::learners::ModelKind;

#[derive(Parser)]
#[command(name = "wsbf", version, about = "Monthly electricity consumption forecasting with the weaker separator booster")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics of the consumption series.
    Stats(Common),
    /// Correlograms plus KPSS, Mann-Kendall and Kruskal-Wallis tests.
    Diagnose(Common),
    /// SHAP-ranked backward feature elimination.
    SelectFeatures(Common),
    /// GA/PSO hyperparameter search with k-fold CV.
    Tune {
        #[command(flatten)]
        common: Common,
        /// Learner to tune: lstm, rf, svr, gbt or esn.
        #[arg(long)]
        model: ModelKind,
    },
    /// Holdout forecasts, WSB combination and metrics.
    Evaluate(Common),
    /// SHAP attributions for the tree learners.
    Explain(Common),
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Stats(c) => commands::stats::run(&load(&c)?),
        Command::Diagnose(c) => commands::diagnose::run(&load(&c)?),
        Command::SelectFeatures(c) => commands::select_features::run(&load(&c)?),
        Command::Tune { common, model } => commands::tune::run(&load(&common)?, model),
        Command::Evaluate(c) => commands::evaluate::run(&load(&c)?),
        Command::Explain(c) => commands::explain::run(&load(&c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
