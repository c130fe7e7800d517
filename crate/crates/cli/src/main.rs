//! `qtail` — estimate left-tail probabilities of positive Gaussian quadratic
//! forms and reproduce threshold sweeps, run-count planning curves, baseline
//! comparisons and timing tables as CSV/JSON.

mod commands;
mod config;
mod output;
mod problem_file;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{ExperimentConfig, MethodName};

#[derive(Debug)]
pub enum CliError {
    /// User or configuration error; exits with status 2.
    User(String),
    /// Internal numerical or I/O failure; exits with status 1.
    Numeric(String),
}

impl CliError {
    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }
    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }
}

#[derive(Parser)]
#[command(name = "qtail", version, about = "Left-tail probabilities of Gaussian quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate P(X^T S X <= gamma0) across a threshold grid; CSV output.
    Sweep(GridArgs),
    /// Plan run counts for a fixed relative-error target; CSV output.
    Plan(GridArgs),
    /// Compare methods and timings across dimensions at one threshold.
    Compare(GridArgs),
    /// Estimate a single problem from a file; JSON output.
    Estimate(EstimateArgs),
}

#[derive(Args)]
struct GridArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Toeplitz base of the form matrix.
    #[arg(long)]
    xi: Option<f64>,
    /// Toeplitz base of the covariance.
    #[arg(long)]
    rho: Option<f64>,
    /// Constant mean value.
    #[arg(long)]
    mu: Option<f64>,
    /// Thresholds in dB, comma separated.
    #[arg(long = "gamma-db", value_delimiter = ',', allow_hyphen_values = true)]
    gamma_db: Option<Vec<f64>>,
    /// Methods: is, mc, imhof, spa, bounds.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Importance-sampling sample count.
    #[arg(long = "samples-is")]
    samples_is: Option<u64>,
    /// Naive Monte Carlo sample count.
    #[arg(long = "samples-mc")]
    samples_mc: Option<u64>,
    /// Relative-error target for planning.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Pilot sample count for IS planning.
    #[arg(long)]
    pilot: Option<u64>,
    /// Timed repetitions per cell in compare.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Problem file (implies a single-problem family).
    #[arg(long)]
    problem: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Problem file: N, then N rows of Sigma_X, N rows of Sigma, one row mu.
    #[arg(long)]
    problem: PathBuf,
    /// Threshold in dB.
    #[arg(long = "gamma-db", allow_negative_numbers = true)]
    gamma_db: Option<f64>,
    /// Threshold on the linear scale.
    #[arg(long = "gamma-linear")]
    gamma_linear: Option<f64>,
    /// is or mc.
    #[arg(long, default_value = "is")]
    method: String,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn merge_config(args: &GridArgs) -> Result<(ExperimentConfig, Option<Vec<MethodName>>), CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = &args.n {
        cfg.n_values = n.clone();
    }
    if let Some(v) = args.xi {
        cfg.xi = v;
    }
    if let Some(v) = args.rho {
        cfg.rho = v;
    }
    if let Some(v) = args.mu {
        cfg.mu_value = v;
    }
    if let Some(g) = &args.gamma_db {
        cfg.gamma_db = g.clone();
    }
    if let Some(v) = args.samples_is {
        cfg.samples_is = v;
    }
    if let Some(v) = args.samples_mc {
        cfg.samples_mc = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.pilot {
        cfg.pilot = v;
    }
    if let Some(v) = args.reps {
        cfg.repetitions = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(p) = &args.out {
        cfg.output_path = Some(p.clone());
    }
    if let Some(p) = &args.problem {
        cfg.problem_path = Some(p.clone());
        cfg.family = config::Family::File;
    }
    let methods_override = match &args.methods {
        Some(names) => Some(
            names
                .iter()
                .map(|s| MethodName::parse(s))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    cfg.validate()?;
    Ok((cfg, methods_override))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let (cfg, methods) = merge_config(&args)?;
            let methods = methods.unwrap_or_else(|| cfg.methods.clone());
            if methods.is_empty() {
                return Err(CliError::user("methods must not be empty"));
            }
            let lines = commands::cmd_sweep(&cfg, &methods)?;
            output::write_lines(cfg.output_path.as_deref(), &lines)
        }
        Command::Plan(args) => {
            let (cfg, _) = merge_config(&args)?;
            let lines = commands::cmd_plan(&cfg)?;
            output::write_lines(cfg.output_path.as_deref(), &lines)
        }
        Command::Compare(args) => {
            let (mut cfg, methods) = merge_config(&args)?;
            if args.config.is_none() && args.gamma_db.is_none() {
                cfg.gamma_db = vec![5.0];
            }
            if args.n.is_none() && args.config.is_none() {
                cfg.n_values = vec![10, 20, 40, 60, 80, 100];
            }
            let methods = methods
                .unwrap_or_else(|| vec![MethodName::Is, MethodName::Imhof, MethodName::Spa]);
            let (lines, timing) = commands::cmd_compare(&cfg, &methods)?;
            output::write_lines(cfg.output_path.as_deref(), &lines)?;
            eprint!("{timing}");
            Ok(())
        }
        Command::Estimate(args) => {
            let gamma0 = match (args.gamma_db, args.gamma_linear) {
                (Some(db), None) => qtail::db_to_linear(db),
                (None, Some(lin)) => lin,
                (Some(_), Some(_)) => {
                    return Err(CliError::user(
                        "give either --gamma-db or --gamma-linear, not both",
                    ))
                }
                (None, None) => {
                    return Err(CliError::user("a threshold is required: --gamma-db or --gamma-linear"))
                }
            };
            if !(gamma0 > 0.0) {
                return Err(CliError::user(format!(
                    "threshold must be positive, got {gamma0}"
                )));
            }
            let method = MethodName::parse(&args.method)?;
            let json = commands::cmd_estimate(&commands::EstimateRequest {
                problem: &args.problem,
                gamma0,
                method,
                samples: args.samples,
                seed: args.seed,
            })?;
            output::write_lines(args.out.as_deref(), &[json])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
