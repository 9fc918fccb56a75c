//! `jointboost` command-line tool.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jointboost::commands::{effective_config, fit_to, load_data, replicate_to, simulate_to, tune_to};
use jointboost::Result;

#[derive(Parser)]
#[command(name = "jointboost", version, about = "Boosting for joint models of longitudinal and time-to-event data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; every field is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed, overriding the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for tuning (0 uses every core).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Inputs {
    /// Longitudinal CSV (id, time, y, l_*, ls_*).
    #[arg(long)]
    long: PathBuf,
    /// Survival CSV (id, time, status, s_*).
    #[arg(long)]
    surv: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset pair with its truth sidecar.
    Simulate(Common),
    /// Fit at the configured stopping iterations.
    Fit {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        common: Common,
    },
    /// Grid-search the stopping iterations.
    Tune {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        common: Common,
    },
    /// Repeated simulate, tune and refit with aggregate tables.
    Replicate(Common),
}

fn run(cli: Cli) -> Result<()> {
    let config = |c: &Common| effective_config(c.config.as_ref(), c.seed, c.threads);
    match cli.command {
        Command::Simulate(c) => {
            simulate_to(&config(&c)?, &c.out)?;
        }
        Command::Fit { inputs, common } => {
            let data = load_data(&inputs.long, &inputs.surv)?;
            fit_to(&data, &config(&common)?, &common.out)?;
        }
        Command::Tune { inputs, common } => {
            let data = load_data(&inputs.long, &inputs.surv)?;
            let result = tune_to(&data, &config(&common)?, &common.out)?;
            let (m_l, m_s, m_ls) = result.best_triple;
            println!("best triple ({m_l}, {m_s}, {m_ls}), risk {}", result.best_risk);
        }
        Command::Replicate(c) => {
            let report = replicate_to(&config(&c)?, &c.out)?;
            for p in &report.parameters {
                println!("{:<10} truth {:>8.3}  mean {:>8.3}  sd {:>7.3}", p.name, p.truth, p.mean, p.sd);
            }
            for s in &report.selection {
                println!("{:<13} TP {:.3}  FP {:.3}", s.predictor, s.tp_rate, s.fp_rate);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
