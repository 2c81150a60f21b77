use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kbcp::oracle::OracleLimits;
use kbcp::{parse_beta, parse_rational, BudgetMode, Direction, GenConfig};
use kbcp_cli::{check_report, generate, oracle_report, read_instance, solve, CliError, SolveOptions, SolveReport};

#[derive(Parser)]
#[command(name = "kbcp", version, about = "k disjoint paths under cost and delay budgets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and print a JSON report.
    Solve(SolveArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Exhaustive answers for a small instance, as JSON.
    Oracle(OracleArgs),
    /// Re-verify a solve report against its instance.
    Check(CheckArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// cost2, balanced, strict or an exact p/q.
    #[arg(long, default_value = "cost2")]
    beta: String,
    #[arg(long, value_enum, default_value = "delay")]
    direction: DirectionArg,
    /// Round costs to multiples of eps * C / n before solving.
    #[arg(long)]
    scale: Option<String>,
    /// Charge reversed arcs a tiny cost in the ratio search.
    #[arg(long)]
    epsilon_mode: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Override the number of paths.
    #[arg(short = 'k')]
    k: Option<usize>,
    /// Record wall time (makes the report non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Auto,
    Delay,
    Cost,
}

#[derive(Clone, Copy, ValueEnum)]
enum BudgetArg {
    Tight,
    Loose,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 4)]
    routes: usize,
    #[arg(long = "extra", default_value_t = 0)]
    extra_arcs: usize,
    #[arg(long, default_value_t = 8)]
    max_cost: i64,
    #[arg(long, default_value_t = 8)]
    max_delay: i64,
    #[arg(long = "k", short = 'k', default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "tight")]
    budget: BudgetArg,
    #[arg(long, default_value_t = 1)]
    inner_min: usize,
    #[arg(long, default_value_t = 1)]
    inner_max: usize,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(short = 'k')]
    k: Option<usize>,
    #[arg(long, default_value_t = 12)]
    max_vertices: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    #[arg(short = 'r', long = "report")]
    report: PathBuf,
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(a) => {
            let inst = read_instance(&a.input)?;
            let beta = parse_beta(&a.beta).map_err(|e| CliError::Usage(e.to_string()))?;
            let scale = match &a.scale {
                Some(s) => Some(
                    parse_rational(s).ok_or_else(|| CliError::Usage(format!("bad --scale {s:?}")))?,
                ),
                None => None,
            };
            let opts = SolveOptions {
                beta,
                direction: match a.direction {
                    DirectionArg::Auto => Direction::Auto,
                    DirectionArg::Delay => Direction::Delay,
                    DirectionArg::Cost => Direction::Cost,
                },
                scale,
                epsilon_mode: a.epsilon_mode,
                threads: a.threads,
                k: a.k,
                timing: a.timing,
            };
            let json = solve(&inst, &opts)?.to_json();
            match a.json {
                Some(path) => fs::write(path, json)?,
                None => emit(&json)?,
            }
        }
        Command::Gen(a) => {
            let cfg = GenConfig {
                routes: a.routes,
                extra_arcs: a.extra_arcs,
                max_cost: a.max_cost,
                max_delay: a.max_delay,
                k: a.k,
                seed: a.seed,
                budget_mode: match a.budget {
                    BudgetArg::Tight => BudgetMode::OracleTight,
                    BudgetArg::Loose => BudgetMode::Loose,
                },
                inner_min: a.inner_min,
                inner_max: a.inner_max,
            };
            let text = generate(&cfg)?;
            match a.output {
                Some(path) => fs::write(path, text)?,
                None => emit(&text)?,
            }
        }
        Command::Oracle(a) => {
            let mut inst = read_instance(&a.input)?;
            if let Some(k) = a.k {
                inst = inst.with_k(k).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let limits = OracleLimits { max_vertices: a.max_vertices, ..Default::default() };
            let report = oracle_report(&inst, &limits)?;
            emit(&(serde_json::to_string_pretty(&report).expect("serializes") + "\n"))?;
        }
        Command::Check(a) => {
            let inst = read_instance(&a.input)?;
            let text = fs::read_to_string(&a.report)?;
            let report: SolveReport = serde_json::from_str(&text).map_err(|e| CliError::Parse {
                path: a.report.display().to_string(),
                message: e.to_string(),
            })?;
            let summary = check_report(&inst, &report, &OracleLimits::default())?;
            let mut text = format!("ok: {}\n", summary.checks.join(", "));
            match summary.oracle_feasible {
                Some(true) => {}
                Some(false) => text.push_str("note: budgets are infeasible, bounds not asserted\n"),
                None => text.push_str("note: instance too large for the oracle, bounds not asserted\n"),
            }
            emit(&text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kbcp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
