use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod svg;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "cesaro",
    version,
    about = "Norm lower bounds for the shifted Cesaro operator on H^p of the upper half-plane"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Numerical tolerance, between 1e-12 and 1e-3
    #[arg(long, global = true, default_value = "1e-8", value_parser = parse_tolerance)]
    pub tol: f64,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Objective evaluations per search restart
    #[arg(long, global = true, default_value_t = 400, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the numerical verification suite
    Verify,
    /// Emit Φ(p) and Φ'(p) on a uniform grid
    #[command(allow_negative_numbers = true)]
    PhiCurve {
        #[arg(long, default_value_t = 1.05)]
        p_min: f64,
        #[arg(long, default_value_t = 10.0)]
        p_max: f64,
        #[arg(long, default_value_t = 896)]
        steps: usize,
    },
    /// Exact norm ratio of a single kernel
    #[command(allow_negative_numbers = true)]
    Ratio {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Search kernel combinations for a larger norm ratio
    #[command(allow_negative_numbers = true)]
    Search {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        kernels: usize,
    },
    /// Compare numeric and closed-form C f_t and V f_t at a point
    #[command(allow_negative_numbers = true)]
    CesaroEval {
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        z_re: f64,
        #[arg(long, default_value_t = 1.0)]
        z_im: f64,
    },
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (1e-12..=1e-3).contains(&tol) {
        Ok(tol)
    } else {
        Err(format!("tolerance must lie in [1e-12, 1e-3], got {s}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.run;
    let result = match cli.command {
        Command::Verify => commands::verify(&config),
        Command::PhiCurve {
            p_min,
            p_max,
            steps,
        } => commands::phi_curve(p_min, p_max, steps, &config),
        Command::Ratio { p, t } => commands::ratio(p, t, &config),
        Command::Search { p, kernels } => commands::search(p, kernels, &config),
        Command::CesaroEval { t, p, z_re, z_im } => {
            commands::cesaro_eval(t, p, z_re, z_im, &config)
        }
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}
