//! `chairs`: simulate, verify, evaluate, and demonstrate the circular
//! seating process.
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or parameter error,
//! 3 infeasible process (more players than chairs), 4 budget exceeded.

mod commands;
mod document;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use chairs::enumeration::{Check, DEFAULT_BUDGET};
use chairs::seating::Process;
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Exit, Failure, FormulaMode, Outcome};
use document::Timings;

#[derive(Debug, Parser)]
#[command(name = "chairs", version)]
#[command(about = "Musical chairs on a circle: linear-probing rejections, counted and matched")]
struct Cli {
    /// Fill the document's timings field (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProcessArg {
    Sequential,
    Blocks,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Tree,
    Table,
}

#[derive(Debug, clap::Args)]
struct SampleArgs {
    /// Number of players.
    #[arg(long)]
    n: usize,
    /// Number of chairs.
    #[arg(long)]
    m: usize,
    /// Initial chairs as base-m digits (0-9, a-z), player 0 first.
    #[arg(long, conflicts_with = "sample_list")]
    sample: Option<String>,
    /// Initial chairs as comma-separated decimals, for any m.
    #[arg(long)]
    sample_list: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seat one sample and list final seats, losses and rejections.
    Simulate {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, value_enum, default_value = "blocks")]
        process: ProcessArg,
        #[arg(long, value_enum, default_value = "tree")]
        format: Format,
    },
    /// Exhaustively check every claim at one (n, m).
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Maximum number of samples to enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Comma-separated subset of: formula, processes, bijection, lemmas.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
    },
    /// Evaluate the closed-form rejection count.
    Formula {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value = "total")]
        mode: FormulaMode,
    },
    /// Walk one rejection through the bijection and back.
    Demo {
        #[command(flatten)]
        sample: SampleArgs,
        /// Index into the block-process rejection list.
        #[arg(long)]
        rejection: usize,
    },
    /// Estimate the average rejection count by random sampling.
    Montecarlo {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn sample_of(args: &SampleArgs) -> Result<chairs::Sample, Failure> {
    commands::parse_sample(args.n, args.m, args.sample.as_deref(), args.sample_list.as_deref())
}

fn run(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Simulate { sample, process, format } => {
            let process = match process {
                ProcessArg::Sequential => Process::Sequential,
                ProcessArg::Blocks => Process::Blocks,
            };
            commands::simulate_cmd(&sample_of(sample)?, process, matches!(format, Format::Table))
        }
        Command::Verify { n, m, budget, checks } => {
            let checks = if checks.is_empty() {
                Check::ALL.to_vec()
            } else {
                checks
                    .iter()
                    .map(|c| Check::parse(c.trim()).ok_or_else(|| Failure::usage(format!("unknown check '{c}'"))))
                    .collect::<Result<Vec<_>, _>>()?
            };
            commands::verify_cmd(*n, *m, *budget, &checks)
        }
        Command::Formula { n, m, mode } => commands::formula_cmd(*n, *m, *mode),
        Command::Demo { sample, rejection } => commands::demo_cmd(&sample_of(sample)?, *rejection),
        Command::Montecarlo { n, m, trials, seed } => {
            commands::montecarlo_cmd(*n, *m, *trials, *seed).map_err(|f| match f.exit {
                // the estimator has no infeasible state; n > m is a bad argument here
                Exit::Infeasible => Failure::usage(f.message),
                _ => f,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    let began = Instant::now();
    match run(&cli.command) {
        Ok(mut outcome) => {
            if cli.timings {
                outcome.document.timings = Some(Timings { elapsed_ms: began.elapsed().as_secs_f64() * 1e3 });
            }
            let text = outcome.table.take().unwrap_or_else(|| outcome.document.render());
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(Exit::Usage as u8);
            }
            if outcome.exit != Exit::Success {
                eprintln!("chairs: one or more checks failed");
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(f) => {
            eprintln!("chairs: {}", f.message);
            ExitCode::from(f.exit as u8)
        }
    }
}
