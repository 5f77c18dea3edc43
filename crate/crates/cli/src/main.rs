//! `beamspec`: batch driver for spectra, determinants, asymptotics, perturbation and inverse problems.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use output::Format;

#[derive(Debug)]
pub enum CliError {
    /// malformed configuration or arguments: exit 1
    Config(String),
    /// numerical failure: exit 2
    Numerical(beamspec::Error),
    Io(String),
    /// the self-test ran but some criteria failed
    Failed(String),
}

impl From<beamspec::Error> for CliError {
    fn from(e: beamspec::Error) -> Self {
        use beamspec::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            E::NonReal(_) | E::Smoothness { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
            CliError::Failed(_) => "selftest",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Failed(m) => m.clone(),
            CliError::Numerical(e) => e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "beamspec",
    version,
    about = "Spectra of fourth-order and Euler-Bernoulli beam operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// JSON experiment configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// write the table here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// index range `A..B` (inclusive)
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// Newton tolerance on |δz|
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// the free operator `∂⁴` (p = q = 0)
    #[arg(long, global = true)]
    pub free: bool,
    /// a worked example: 1, 2, 3, 4.1, 4.2 or 4.3
    #[arg(long, global = true)]
    pub example: Option<String>,
    /// coefficient shorthand for the example, e.g. `sin:1` or `sin:1:0.3+cos:2:0.1`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// point-mass strength for examples 1 and 2
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    /// point-mass location for example 1
    #[arg(long, global = true, default_value_t = 0.3)]
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    Lambda,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Known {
    Alpha,
    Beta,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// eigenvalues of H or of a beam
    Spectrum,
    /// the characteristic determinant on a grid
    Det {
        #[arg(long, value_enum, default_value_t = Grid::Lambda)]
        grid: Grid,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        end: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// constant imaginary part of the grid variable
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        imag: f64,
    },
    /// asymptotic predictions and residuals against computed eigenvalues
    Predict {
        /// predictions only
        #[arg(long)]
        no_compute: bool,
    },
    /// the transformed coefficients p, q, V on a uniform t-grid
    Transform {
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// eigenvalue derivatives at ε = 0: first-order formula against finite differences
    Perturb {
        #[arg(long)]
        eps: Option<f64>,
    },
    /// recover β (or α) from eigenvalue derivatives
    Recover {
        /// CSV of `n, derivative` rows
        #[arg(long)]
        derivs: PathBuf,
        /// which coefficient is known (taken from the config or `--alpha`)
        #[arg(long, value_enum, default_value_t = Known::Alpha)]
        known: Known,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// also evaluate the literal reconstruction formula
        #[arg(long)]
        verbatim: bool,
    },
    /// argument-principle zero counts on the circles enclosing the first N roots
    Count,
    /// run the acceptance suite
    Selftest {
        /// run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// determinant spectrum side by side with the Galerkin oracle
    Oracle {
        #[arg(long, default_value_t = 64)]
        basis: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return report(name, CliError::Config("--jobs must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            return report(name, CliError::Config(e.to_string()));
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(name, e),
    }
}

fn report(command: &str, e: CliError) -> ExitCode {
    if matches!(e, CliError::Config(_)) {
        eprintln!("error: {}", e.message());
    } else {
        let diag = json!({ "status": "error", "command": command, "kind": e.kind(), "message": e.message() });
        eprintln!("{diag}");
    }
    ExitCode::from(e.exit_code())
}
