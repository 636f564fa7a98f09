use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orbitsum::config::load_config;
use orbitsum::scenario::{fraction_zero_traces, nominal_energies, run_scenario, Scenario, ScenarioName, ScenarioOptions};
use orbitsum::specdet::PolyMode;
use orbitsum::Error;

#[derive(Parser)]
#[command(name = "orbitsum", version, about = "Periodic-orbit resummation scenarios for the quadratic ring map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts under <out>/<scenario>/.
    Run {
        scenario: ScenarioName,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// raw, bottom-up, top-down or truncated
        #[arg(long)]
        mode: Option<PolyMode>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        im_fraction: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        e_ref: Option<f64>,
        /// Use the free determinant exp(i det_phase) instead of the exact one.
        #[arg(long, allow_hyphen_values = true)]
        det_phase: Option<f64>,
    },
    /// Oracle-closure and random-polynomial checks.
    Selftest {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Zero-trace fraction of a case (ii) ring.
    Fraction {
        #[arg(long)]
        config: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        2
    } else if e.is_io() {
        1
    } else {
        3
    }
}

fn run(cli: Cli) -> orbitsum::Result<()> {
    match cli.command {
        Command::Run { scenario, config, out, seed, mode, eta, im_fraction, grid, e_ref, det_phase } => {
            let cfg = config.as_deref().map(load_config).transpose()?;
            let options = ScenarioOptions { seed, mode, eta, im_fraction, grid, e_ref, det_phase };
            let rep = run_scenario(&Scenario::new(scenario, cfg, options)?, &out)?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
        }
        Command::Selftest { out, seed } => {
            let sc = Scenario::new(ScenarioName::SolverSelftest, None, ScenarioOptions { seed, ..Default::default() })?;
            let rep = run_scenario(&sc, &out)?;
            for (k, ok) in &rep.checks {
                println!("{} {k}", if *ok { "pass" } else { "FAIL" });
            }
        }
        Command::Fraction { config } => {
            let cfg = load_config(&config)?;
            let (lo, hi) = nominal_energies(&cfg);
            let f = fraction_zero_traces(&cfg, lo, hi)?;
            println!("{}", serde_json::to_string_pretty(&f)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
