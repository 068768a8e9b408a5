//! Thin command-line front end; all logic lives in the library.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use vortex_ring::cli::{self, CliOptions};

#[derive(Parser)]
#[command(
    name = "vring",
    version,
    about = "Closed vortex filament in a cylinder: dynamics, drum spectra and circulation levels"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the mode frequencies omega_n = n sqrt(n^2 - 1).
    Dispersion {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        n_min: i32,
        #[arg(long, default_value_t = 8, allow_negative_numbers = true)]
        n_max: i32,
        /// Write dispersion.csv here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Evolve the configured filament (nonlinear or linearized).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
    /// Dirichlet spectrum of the configured cross-section.
    Eigen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the grid solver even when a closed form exists.
        #[arg(long)]
        force_grid: bool,
        /// Grid cell size for disk/rectangle sections (units of R0).
        #[arg(long)]
        grid_h: Option<f64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Circulation level table and peak histogram.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force_grid: bool,
        #[arg(long)]
        grid_h: Option<f64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Check a config file without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Dispersion {
            n_min,
            n_max,
            out,
            quiet,
        } => cli::run_dispersion(n_min, n_max, out.as_deref(), quiet).map(|_| ()),
        Command::Simulate { config, out, quiet } => {
            let opts = CliOptions {
                out,
                quiet,
                ..Default::default()
            };
            cli::run_simulate(&config, &opts).map(|_| ())
        }
        Command::Eigen {
            config,
            out,
            force_grid,
            grid_h,
            quiet,
        } => {
            let opts = CliOptions {
                out,
                force_grid,
                grid_h,
                quiet,
            };
            cli::run_eigen(&config, &opts).map(|_| ())
        }
        Command::Spectrum {
            config,
            out,
            force_grid,
            grid_h,
            quiet,
        } => {
            let opts = CliOptions {
                out,
                force_grid,
                grid_h,
                quiet,
            };
            cli::run_spectrum(&config, &opts).map(|_| ())
        }
        Command::Validate { config, quiet } => cli::run_validate(&config, quiet).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
