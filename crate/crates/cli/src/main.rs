//! `assouad-lab`: command-line front end.
//!
//! Exit codes: 0 success, 1 failed verdict, 2 usage error, 3 invalid input.

mod commands;
mod config;
mod spaces;

use std::path::PathBuf;
use std::process::ExitCode;

use assouad_lab::metric::DEFAULT_TOL_METRIC;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "assouad-lab", version, about = "Finite metric spaces: GH distances, covers and Assouad-type exponents")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    /// Read the subcommand and its flags from a TOML or JSON config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "ASSOUAD_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Triangle-inequality tolerance for input validation.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_METRIC)]
    pub tol: f64,
    /// Include wall-clock runtimes in reports (output is then not byte-stable).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Also write `<command>.json` and `<command>.tsv` into this directory.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GhMode {
    Auto,
    Exact,
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimMethod {
    Subsets,
    Covering,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoverModeArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    All,
    Cantor,
    Grid,
    Ball,
    Concentric,
    Lemmas,
    Precompact,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a distance matrix is a metric.
    Validate {
        #[arg(long = "in")]
        input: String,
    },
    /// Gromov–Hausdorff distance between two spaces.
    Ghdist {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum, default_value_t = GhMode::Auto)]
        mode: GhMode,
        #[arg(long, default_value_t = assouad_lab::gh::DEFAULT_GH_EXACT_LIMIT)]
        exact_limit: usize,
        /// Also extract and verify an approximation pair from the witness.
        #[arg(long)]
        approximation: bool,
    },
    /// Empirical Assouad-type exponent of a sample.
    Dim {
        #[arg(long = "in")]
        input: String,
        #[arg(long, value_enum, default_value_t = DimMethod::Subsets)]
        method: DimMethod,
        #[arg(long, default_value_t = assouad_lab::dimension::DEFAULT_RHO_MIN)]
        rho_min: f64,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 0)]
        random_subsets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Covering number of a subset, a separated set, or the doubling constant.
    Cover {
        #[arg(long = "in")]
        input: String,
        /// Block diameter.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_enum, default_value_t = CoverModeArg::Greedy)]
        mode: CoverModeArg,
        /// Comma-separated indices of the subset to cover (default: all).
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        /// Report a maximal r-separated subset instead of a cover.
        #[arg(long)]
        separated: bool,
        /// Report the empirical doubling constant instead of a cover.
        #[arg(long)]
        doubling: bool,
        #[arg(long, default_value_t = assouad_lab::covering::DEFAULT_EXACT_COVER_LIMIT)]
        exact_limit: usize,
    },
    /// Build a telescope over the given components (block i at level 2^-i).
    Telescope {
        #[arg(long, required = true)]
        component: Vec<String>,
        #[arg(long)]
        rescale: bool,
        #[arg(long, default_value = "inf")]
        infinity_label: String,
        /// Write the resulting distance matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted-block example space and its lemma checks.
    Asymcone {
        /// Ambient sample (default: {0, 1/4, ..., 3} on the line).
        #[arg(long)]
        ambient: Option<String>,
        #[arg(long, default_value_t = 0)]
        base_point: usize,
        #[arg(long, default_value_t = 5)]
        truncation: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Write the materialised distance matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run experiment scenarios and report per-step checks.
    Experiment {
        #[arg(long, value_enum, default_value_t = ScenarioArg::All)]
        scenario: ScenarioArg,
        #[arg(long, default_value_t = assouad_lab::experiments::DEFAULT_CONVERGENCE_TOL)]
        convergence_tol: f64,
        #[arg(long, default_value_t = assouad_lab::experiments::DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Overrides the per-scenario dimension slack.
        #[arg(long)]
        slack: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fréchet embedding into l_inf.
    Embed {
        #[arg(long = "in")]
        input: String,
    },
    /// Write a generated sample (e.g. `cantor:10`) as a distance file.
    Generate {
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse(argv: Vec<String>) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(&argv).map_err(|e| {
        let _ = e.print();
        ExitCode::from(if e.use_stderr() { 2 } else { 0 })
    })
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let mut cli = match parse(argv.clone()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(path) = cli.config.clone() {
        if cli.command.is_some() {
            eprintln!("{}", CliError::Usage("--config replaces the subcommand; give one or the other".into()));
            return ExitCode::from(2);
        }
        let mut args = match config::to_args(&path) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(e.code());
            }
        };
        // Global flags given on the command line still apply.
        let mut full = vec![argv[0].clone()];
        let mut rest = argv[1..].iter();
        while let Some(a) = rest.next() {
            if a == "--config" {
                rest.next();
            } else if !a.starts_with("--config=") {
                full.push(a.clone());
            }
        }
        full.append(&mut args);
        cli = match parse(full) {
            Ok(c) => c,
            Err(code) => return code,
        };
    }
    let Some(command) = cli.command else {
        eprintln!("{}", CliError::Usage("a subcommand or --config is required".into()));
        return ExitCode::from(2);
    };
    if let Err(e) = configure_threads(cli.global.threads) {
        eprintln!("{e}");
        return ExitCode::from(e.code());
    }
    match commands::run(&command, &cli.global) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
