mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Failure;
use config::{GridDefault, Params, RunConfig};

/// Resonance-frequency metrology with sech pi-pulses and phase-alternated
/// pulse trains.
#[derive(Debug, Parser)]
#[command(name = "resmetro", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground and excited populations across the drive-frequency grid
    Profile(Params),
    /// Classical and quantum Fisher information across the grid
    Fisher(Params),
    /// Full width at half depth of the resonance dip
    Fwhm(Params),
    /// Monte Carlo frequency scans with argmin and maximum-likelihood estimators
    Montecarlo(Params),
    /// Cross-check analytic, closed-form and ODE evaluations
    Verify(Params),
}

const CONFIG_ERROR: u8 = 2;
const VERIFICATION_FAILURE: u8 = 1;

fn grid_default(name: &str) -> GridDefault {
    match name {
        "fwhm" => GridDefault {
            half_span: 4.0,
            points: 401,
            scale_with_pulses: true,
        },
        "montecarlo" => GridDefault {
            half_span: 3.0,
            points: 21,
            scale_with_pulses: false,
        },
        "verify" => GridDefault {
            half_span: 6.0,
            points: 25,
            scale_with_pulses: false,
        },
        _ => GridDefault {
            half_span: 6.0,
            points: 241,
            scale_with_pulses: false,
        },
    }
}

fn write(config: &RunConfig, text: &str) -> Result<(), Failure> {
    output::emit(config, text).map_err(|e| Failure::Config(format!("cannot write output: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, params) = match cli.command {
        Command::Profile(p) => ("profile", p),
        Command::Fisher(p) => ("fisher", p),
        Command::Fwhm(p) => ("fwhm", p),
        Command::Montecarlo(p) => ("montecarlo", p),
        Command::Verify(p) => ("verify", p),
    };
    let config = RunConfig::resolve(name, params, grid_default(name)).map_err(Failure::Config)?;
    let text = match name {
        "profile" => commands::profile(&config)?,
        "fisher" => commands::fisher(&config)?,
        "fwhm" => commands::width(&config)?,
        "montecarlo" => commands::montecarlo(&config)?,
        _ => {
            let (summary, report, passed) = commands::verify(&config);
            print!("{summary}");
            if config.out.is_some() {
                write(&config, &report)?;
            }
            return if passed {
                Ok(())
            } else {
                Err(Failure::Verification)
            };
        }
    };
    write(&config, &text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(CONFIG_ERROR)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(VERIFICATION_FAILURE)
        }
    }
}
