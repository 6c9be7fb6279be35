//! Command-line interface for the desirable-measurement calculus.
//!
//! Queries run against a JSON problem file naming operators, subspaces,
//! assessments and densities. Exit codes: 0 success or affirmative answer,
//! 1 definite negative answer, 2 boundary, 3 input error, 4 solver stall.

mod commands;
mod output;
mod problem;
mod reproduce;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Usage(String),
    Core(desq_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Validation(_) | CliError::Usage(_) => 3,
            CliError::Core(desq_core::Error::SolverStall { .. }) => 4,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "desq",
    about = "Desirability calculus over quantum measurements: consistency, membership, previsions and conditioning"
)]
struct Cli {
    /// Path to the JSON problem file (not needed by reproduce-paper).
    #[arg(long, global = true)]
    problem: Option<std::path::PathBuf>,

    /// Seed recorded into machine output for reproducibility.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override of the strict-positivity margin.
    #[arg(long, global = true)]
    eps: Option<f64>,

    /// Tolerance overrides as key=value (repeatable), e.g. --tol eig=1e-8.
    #[arg(long, global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,

    /// Output format.
    #[arg(long, global = true, default_value = "human", value_parser = parse_format)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an assessment for consistency (absence of sure loss).
    CheckConsistency {
        #[arg(long)]
        assessment: String,
    },
    /// Test natural-extension membership of a target measurement.
    Member {
        #[arg(long)]
        assessment: String,
        #[arg(long)]
        target: String,
    },
    /// Lower and upper previsions of a target measurement.
    LowerPrevision {
        #[arg(long)]
        assessment: String,
        #[arg(long)]
        target: String,
    },
    /// Condition an assessment on a subspace or a family of mutually
    /// orthogonal subspaces (comma-separated names).
    Condition {
        #[arg(long)]
        assessment: String,
        #[arg(long)]
        event: String,
        /// Report the conditional prevision of this operator.
        #[arg(long)]
        target: Option<String>,
        /// Report updated-model membership of this operator.
        #[arg(long)]
        probe: Option<String>,
    },
    /// Condition a density operator on an event.
    UpdateDensity {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        event: String,
    },
    /// Law-of-total-probability decomposition of a family update.
    Ltp {
        #[arg(long)]
        rho: String,
        #[arg(long)]
        event: String,
    },
    /// Re-run the built-in two-spin worked example and diff against the
    /// expected values.
    ReproducePaper,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("invalid tolerance value in `{s}`: {e}"))?;
    Ok((key.to_string(), value))
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "human" => Ok(Format::Human),
        "machine" => Ok(Format::Machine),
        other => Err(format!("unknown format `{other}` (use human or machine)")),
    }
}

fn load_problem(cli: &Cli) -> Result<problem::Problem, CliError> {
    let path = cli
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Usage("--problem <path> is required for this command".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file = problem::parse_problem(&text)?;
    problem::compile_problem(&file, cli.eps, &cli.tol, cli.seed)
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::ReproducePaper => {
            let (results, exit_code) = reproduce::reproduce()?;
            for r in results {
                emit(&ensure_newline(r.render(cli.format)));
            }
            Ok(exit_code)
        }
        command => {
            let problem = load_problem(cli)?;
            let mut result = match command {
                Command::CheckConsistency { assessment } => {
                    commands::check_consistency(&problem, assessment)?
                }
                Command::Member { assessment, target } => {
                    commands::member(&problem, assessment, target)?
                }
                Command::LowerPrevision { assessment, target } => {
                    commands::lower_prevision_cmd(&problem, assessment, target)?
                }
                Command::Condition {
                    assessment,
                    event,
                    target,
                    probe,
                } => commands::condition(
                    &problem,
                    assessment,
                    event,
                    target.as_deref(),
                    probe.as_deref(),
                )?,
                Command::UpdateDensity { rho, event } => {
                    commands::update_density_cmd(&problem, rho, event)?
                }
                Command::Ltp { rho, event } => commands::ltp(&problem, rho, event)?,
                Command::ReproducePaper => unreachable!(),
            };
            result.record["seed"] = serde_json::json!(problem.seed);
            emit(&ensure_newline(result.render(cli.format)));
            Ok(result.exit_code)
        }
    }
}

fn ensure_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Writes to stdout, treating a closed pipe as a normal early exit.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if let Err(e) = out.write_all(text.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            match cli.format {
                Format::Machine => {
                    let record = serde_json::json!({
                        "status": "error",
                        "error": e.to_string(),
                        "exit": e.exit_code(),
                    });
                    emit(&format!("{record}\n"));
                }
                Format::Human => eprintln!("error: {e}"),
            }
            std::process::exit(e.exit_code());
        }
    }
}
