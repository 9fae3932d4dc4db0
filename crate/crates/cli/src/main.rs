use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rde5_cli::commands::{self, CliError, EXIT_CONFIG};
use rde5_cli::config::{Backend, FileConfig, IndexForm, Merged};

/// Simulate, solve in closed form, and cross-verify the fifth-order rational
/// difference equation
/// `x[n+1] = x[n]x[n-2]x[n-4] / (x[n-1]x[n-3](a[n] + b[n]x[n]x[n-2]x[n-4]))`.
#[derive(Parser)]
#[command(name = "rde5", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file supplying any of the other options; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Five comma-separated seeds x[-4]..x[0] (equivalently u[0]..u[4]),
    /// e.g. "1/5,9,5,7,2"; decimals are exact in rational mode
    #[arg(long, allow_hyphen_values = true)]
    ic: Option<String>,
    /// Coefficient rule for a[n]: a value, "periodic:v1,v2,...", or
    /// "explicit:v1,v2,..."
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Coefficient rule for b[n], same syntax as --a
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Arithmetic backend (default: rational)
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Index labeling: x (from x[-4]) or u (from u[0]) (default: x)
    #[arg(long, value_enum)]
    form: Option<IndexForm>,
    /// Largest index to compute (default: 120 for orbits, 6000 for converge)
    #[arg(long)]
    n_max: Option<usize>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for float-backend comparisons (default: 1e-9)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the recurrence and write the orbit as CSV
    Simulate(CommonArgs),
    /// Evaluate the closed-form solution against iteration index by index
    Compare(CommonArgs),
    /// Verify the linearized symmetry condition at seeded random points
    Symcheck {
        /// TOML config file; explicit flags win
        #[arg(long)]
        config: Option<PathBuf>,
        /// RNG seed (default: 42)
        #[arg(long)]
        seed: Option<u64>,
        /// Number of sample points per characteristic (default: 1000)
        #[arg(long)]
        samples: Option<usize>,
        /// Also evaluate the planted non-symmetry, which must fail
        #[arg(long)]
        negative_control: bool,
    },
    /// Detect the smallest period of the orbit
    Period {
        #[command(flatten)]
        common: CommonArgs,
        /// Longest period to search for (default: 24)
        #[arg(long)]
        max_period: Option<usize>,
        /// Exit nonzero unless the detected period equals this
        #[arg(long)]
        expect: Option<usize>,
    },
    /// Decay diagnostics for the a = 1 regime (float backend)
    Converge(CommonArgs),
}

fn merged_from(common: CommonArgs, max_period: Option<usize>) -> Result<Merged, CliError> {
    let file = common.config.as_deref().map(FileConfig::load).transpose()?;
    let flags = Merged {
        ic: common.ic,
        a: common.a,
        b: common.b,
        backend: common.backend,
        form: common.form,
        n_max: common.n_max,
        out: common.out,
        tol: common.tol,
        max_period,
        seed: None,
        samples: None,
    };
    Ok(Merged::new(flags, file)?)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Simulate(common) => commands::simulate(&merged_from(common, None)?, out),
        Command::Compare(common) => commands::compare(&merged_from(common, None)?, out),
        Command::Symcheck { config, seed, samples, negative_control } => {
            let file = config.as_deref().map(FileConfig::load).transpose()?;
            let flags = Merged { seed, samples, ..Default::default() };
            commands::symcheck(&Merged::new(flags, file)?, negative_control, out)
        }
        Command::Period { common, max_period, expect } => {
            commands::period(&merged_from(common, max_period)?, expect, out)
        }
        Command::Converge(common) => commands::converge(&merged_from(common, None)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
