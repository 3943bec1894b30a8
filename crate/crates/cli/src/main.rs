use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use mils_cli::commands::{self, SparsifyArgs, SparsifyMethod};
use mils_cli::estimator::EstimatorSpec;
use mils_cli::eval::RunOptions;
use mils_cli::UsageError;
use mils_core::bdm::Method;
use mils_core::ctm::{BlankTape, MissingPolicy};
use mils_core::mils::{Execution, Neutrality};

#[derive(Parser)]
#[command(name = "mils", version, about = "Algorithmic-complexity estimation and minimal-information-loss sparsification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate 2-symbol Turing machines and write a CTM string table.
    CtmGen {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        states: u32,
        #[arg(long)]
        max_steps: u64,
        #[arg(long, value_enum, default_value_t = Blank::Both)]
        blank: Blank,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the complexity of a binary string or matrix file, in bits.
    Complexity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Bdm)]
        method: MethodArg,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Reduce the edge set of a graph.
    Sparsify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        method: MethodName,
        /// Edges to keep (mils, mils-seq, random).
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::MinLoss)]
        mode: Mode,
        /// Tie tolerance in bits for neutral elements.
        #[arg(long, default_value_t = 0.0)]
        tie_epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spectral approximation parameter.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        workers: Workers,
    },
    /// Run an experiment config and write a report.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        /// Record runtimes in the report (makes it run-dependent).
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        workers: Workers,
    },
    /// Simulate an elementary cellular automaton from a single 1.
    Eca {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=255))]
        rule: u32,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        steps: usize,
        /// Region size and retained fraction, e.g. `8,0.6`.
        #[arg(long, value_parser = parse_coarse)]
        coarse_grain: Option<(usize, f64)>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        workers: Workers,
    },
}

#[derive(clap::Args)]
struct TableArgs {
    /// CTM table files (default: $MILS_TABLE_PATH, then the bundled tables).
    #[arg(long = "table", num_args = 1..)]
    tables: Vec<PathBuf>,
    /// Charge missing blocks the largest value of their shape plus one bit.
    #[arg(long)]
    fallback: bool,
}

impl TableArgs {
    fn spec(&self, method: Method) -> EstimatorSpec {
        EstimatorSpec {
            method,
            tables: self.tables.clone(),
            missing: if self.fallback { MissingPolicy::MaxPlusOne } else { MissingPolicy::Error },
        }
    }
}

#[derive(clap::Args)]
struct Workers {
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
}

impl Workers {
    fn execution(&self) -> Execution {
        if self.workers > 1 {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Blank {
    Zero,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Bdm,
    Entropy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    MinLoss,
    LogTarget,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Mils,
    MilsSeq,
    Random,
    SpanningTree,
    Transitive,
    Spectral,
}

fn parse_coarse(s: &str) -> Result<(usize, f64), String> {
    let (b, r) = s.split_once(',').ok_or("expected SIZE,FRACTION")?;
    let b = b.trim().parse().map_err(|_| format!("bad region size {b:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad fraction {r:?}"))?;
    Ok((b, r))
}

fn with_workers<T: Send>(workers: u16, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers as usize).build()?;
    Ok(pool.install(f))
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::CtmGen { states, max_steps, blank, out } => {
            let blank = match blank {
                Blank::Zero => BlankTape::Zero,
                Blank::Both => BlankTape::Both,
            };
            commands::ctm_gen(states, max_steps, blank, &out)
        }
        Command::Complexity { input, method, tables } => {
            let m = match method {
                MethodArg::Bdm => Method::Bdm,
                MethodArg::Entropy => Method::BlockEntropy,
            };
            let spec = tables.spec(m);
            commands::complexity(&input, m, spec.tables, spec.missing)
        }
        Command::Sparsify {
            graph,
            method,
            target,
            mode,
            tie_epsilon,
            seed,
            epsilon,
            out,
            tables,
            workers,
        } => {
            let args = SparsifyArgs {
                graph,
                method: match method {
                    MethodName::Mils => SparsifyMethod::Mils,
                    MethodName::MilsSeq => SparsifyMethod::MilsSeq,
                    MethodName::Random => SparsifyMethod::Random,
                    MethodName::SpanningTree => SparsifyMethod::SpanningTree,
                    MethodName::Transitive => SparsifyMethod::Transitive,
                    MethodName::Spectral => SparsifyMethod::Spectral,
                },
                target,
                mode: match mode {
                    Mode::MinLoss => Neutrality::MinLoss,
                    Mode::LogTarget => Neutrality::LogTarget,
                },
                tie_epsilon,
                seed,
                epsilon,
                out,
                estimator: tables.spec(Method::Bdm),
                execution: workers.execution(),
            };
            with_workers(workers.workers, || commands::sparsify(&args))?
        }
        Command::Evaluate { config, timings, workers } => {
            let opts = RunOptions {
                execution: workers.execution(),
                timings,
            };
            with_workers(workers.workers, || commands::evaluate(&config, opts))?
        }
        Command::Eca {
            rule,
            width,
            steps,
            coarse_grain,
            out,
            tables,
            workers,
        } => {
            let spec = tables.spec(Method::Bdm);
            let exec = workers.execution();
            with_workers(workers.workers, || commands::eca(rule, width, steps, coarse_grain, &spec, exec, &out))?
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
