//! `alstlf`: appliance-level short-term load forecasting.
//!
//! Subcommands cover the whole workflow: `synth` generates reproducible
//! smart-meter-style data, `preprocess` runs the cleaning pipeline, `train`
//! fits the LSTM plus error corrector, `evaluate` reports one-step accuracy
//! against naive baselines, and `forecast` produces recursive multi-step
//! predictions.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod bundle;
mod commands;
mod config;
mod io;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "alstlf", version, about = "Appliance-level short-term load forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Synth(commands::synth::SynthArgs),
    Preprocess(commands::preprocess::PreprocessArgs),
    Train(commands::train::TrainArgs),
    Evaluate(commands::evaluate::EvaluateArgs),
    Forecast(commands::forecast::ForecastArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::Preprocess(args) => commands::preprocess::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Forecast(args) => commands::forecast::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
