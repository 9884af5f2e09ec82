use std::path::PathBuf;

use alstlf_core::pipeline::synth::synth_generate;
use alstlf_core::Rng;
use anyhow::Result;
use clap::Args;

use crate::config::ConfigFile;
use crate::io::{raw_table_to_csv, write_atomic};

/// Generate a synthetic minute-level raw CSV for one appliance profile.
#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Appliance profile
    #[arg(long, value_parser = ["ac", "ev", "lights", "fridge"])]
    pub profile: String,

    /// Number of days to generate
    #[arg(long)]
    pub days: Option<usize>,

    /// Number of households
    #[arg(long)]
    pub households: Option<usize>,

    /// Uniform noise amplitude in kW (0 disables noise)
    #[arg(long)]
    pub noise: Option<f64>,

    /// RNG seed; flags beat ALSTLF_SEED, which beats the config file
    #[arg(long, env = "ALSTLF_SEED")]
    pub seed: Option<u64>,

    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,

    /// key=value config file with defaults for omitted flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: SynthArgs) -> Result<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let days = cfg.resolve(args.days, "days", 7)?;
    let households = cfg.resolve(args.households, "households", 10)?;
    let noise = cfg.resolve(args.noise, "noise", 0.02)?;
    let seed = cfg.resolve(args.seed, "seed", 42)?;

    let mut rng = Rng::new(seed);
    let table = synth_generate(&args.profile, days, households, noise, &mut rng)?;
    write_atomic(&args.out, &raw_table_to_csv(&table))?;
    eprintln!(
        "wrote {} ({} rows, profile {}, seed {seed})",
        args.out.display(),
        table.rows.len(),
        args.profile
    );
    Ok(())
}
