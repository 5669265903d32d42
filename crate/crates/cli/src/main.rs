//! `clines`: compute and export clines of step-weight Neumann problems.
//!
//! Exit codes: 0 ok, 1 hypotheses not met, 2 config or I/O error,
//! 3 blow-up, 4 nothing found.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "clines",
    version,
    about = "Shooting-method solver for clines of indefinite-weight Neumann problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output directory (default: $CLINE_SEED_DIR, else ./out)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Integration {
    /// Target RK4 step
    #[arg(long, default_value_t = 1e-4)]
    step: f64,
    /// Abort a trajectory once |u| or |v| exceeds this
    #[arg(long, default_value_t = 1e3)]
    blowup_bound: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structural hypotheses of a problem
    CheckF {
        config: PathBuf,
        #[arg(long, default_value_t = cline_core::DEFAULT_GRID_SIZE)]
        grid_size: usize,
        /// Print the reports as JSON
        #[arg(long)]
        json: bool,
    },
    /// Integrate from (r, 0) and write the trajectory
    Shoot {
        config: PathBuf,
        #[arg(long)]
        r: f64,
        /// Keep every n-th sample in the CSV
        #[arg(long, default_value_t = 1)]
        decimate: usize,
        #[command(flatten)]
        integration: Integration,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the image of the segment {0 <= u <= 1, v = 0}
    Gamma {
        config: PathBuf,
        #[arg(long, default_value_t = cline_core::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[command(flatten)]
        integration: Integration,
        #[command(flatten)]
        output: Output,
    },
    /// Locate all clines
    Find {
        config: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, default_value_t = 1)]
        decimate: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run both published instances and compare with the reference values
    Reproduce {
        #[command(flatten)]
        search: SearchArgs,
        /// Print the comparison reports as JSON
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = cline_core::DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol_r: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol_v: f64,
    #[command(flatten)]
    integration: Integration,
}

impl Output {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("CLINE_SEED_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

impl Integration {
    fn config(&self) -> cline_core::IntegratorConfig {
        cline_core::IntegratorConfig {
            target_step: self.step,
            blowup_bound: self.blowup_bound,
        }
    }
}

impl SearchArgs {
    fn tolerances(&self) -> cline_core::Tolerances {
        cline_core::Tolerances {
            tol_r: self.tol_r,
            tol_v: self.tol_v,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CheckF {
            config,
            grid_size,
            json,
        } => commands::check_f(&config, grid_size, json),
        Command::Shoot {
            config,
            r,
            decimate,
            integration,
            output,
        } => commands::shoot(&config, r, decimate, &integration.config(), &output.dir()),
        Command::Gamma {
            config,
            resolution,
            integration,
            output,
        } => commands::gamma(&config, resolution, &integration.config(), &output.dir()),
        Command::Find {
            config,
            search,
            decimate,
            output,
        } => commands::find(
            &config,
            search.resolution,
            &search.tolerances(),
            &search.integration.config(),
            decimate,
            &output.dir(),
        ),
        Command::Reproduce { search, json } => commands::reproduce(
            search.resolution,
            &search.tolerances(),
            &search.integration.config(),
            json,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
