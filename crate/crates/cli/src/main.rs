//! `cxa`: runs scenario files through the complexity-aversion toolkit.
//!
//! Exit status: 0 on success, 2 when the scenario fails validation, 3 when
//! the computation itself fails.

mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scenario::{Kind, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("computation error: {0}")]
    Computation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Computation(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "cxa", version, about = "Complexity-averse decision toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Directory for report.json and CSV files.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Also write CSV tables (into --output, or the current directory).
    #[arg(long, global = true)]
    csv: bool,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest state count for Bell enumeration.
    #[arg(long, global = true, env = "CXA_CAP", default_value_t = cxa_core::statespace::DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Numeric tolerance, as a float or a rational such as 1/1000000000.
    #[arg(long, global = true)]
    tolerance: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate acts ex ante.
    Eval { file: PathBuf },
    /// Conditional evaluation after an event.
    Update { file: PathBuf },
    /// Run the axiom checks.
    Axioms { file: PathBuf },
    /// Solve the wage-design problem.
    Contract { file: PathBuf },
    /// Simulate attention reallocation.
    Attention { file: PathBuf },
    /// Solve for standard and complexity-averse equilibria.
    Equilibrium { file: PathBuf },
    /// Check a scenario against its schema without running it.
    Validate { file: PathBuf },
    /// Run a scenario of any kind.
    Run { file: PathBuf },
}

fn parse_tolerance(text: &str) -> Result<f64, CliError> {
    let value = match text.parse::<f64>() {
        Ok(v) => v,
        Err(_) => cxa_core::rational::parse_rational(text)
            .map(|r| cxa_core::rational::to_f64(&r))
            .map_err(|e| CliError::Validation(format!("--tolerance: {e}")))?,
    };
    if !(value.is_finite() && value > 0.0) {
        return Err(CliError::Validation("--tolerance must be positive".into()));
    }
    Ok(value)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (file, expected) = match &cli.command {
        Command::Eval { file } => (file, Some(Kind::Eval)),
        Command::Update { file } => (file, Some(Kind::Update)),
        Command::Axioms { file } => (file, Some(Kind::Axioms)),
        Command::Contract { file } => (file, Some(Kind::Contract)),
        Command::Attention { file } => (file, Some(Kind::Attention)),
        Command::Equilibrium { file } => (file, Some(Kind::Equilibrium)),
        Command::Validate { file } | Command::Run { file } => (file, None),
    };
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", file.display())))?;
    let s = scenario::parse(&text)?;
    if let Some(k) = expected {
        if k != s.kind {
            return Err(CliError::Validation(format!("kind: scenario is {}, command expects {k}", s.kind)));
        }
    }
    if matches!(cli.command, Command::Validate { .. }) {
        println!("{}: valid {} scenario", file.display(), s.kind);
        return Ok(());
    }
    let opts = RunOptions {
        seed: cli.global.seed.unwrap_or(s.seed),
        cap: cli.global.cap,
        tolerance: cli.global.tolerance.as_deref().map(parse_tolerance).transpose()?,
    };
    let report = s.run(&opts)?;
    print!("{}", report.text);
    if cli.global.output.is_some() || cli.global.csv {
        let dir = cli.global.output.clone().unwrap_or_else(|| PathBuf::from("."));
        report
            .write(&dir, cli.global.csv)
            .map_err(|e| CliError::Computation(format!("writing to {}: {e}", dir.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cxa: {e}");
            ExitCode::from(e.code())
        }
    }
}
