//! `rbperm`: sampling, exact laws, permuton distances and timing for
//! record-biased random permutations.
//!
//! Exit codes: 0 on success, 1 when verification fails or a run breaks,
//! 2 on invalid arguments.

mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rbperm::analytic::StatisticId;
use rbperm::{RecordBias, SamplerKind};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "rbperm", version, about = "Record-biased random permutations")]
struct Cli {
    /// Worker threads for batch work (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Seed; falls back to RBPERM_SEED, then 0.
    #[arg(long, env = "RBPERM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw permutations, one per line as space-separated values.
    Sample {
        #[arg(long)]
        n: usize,
        /// fixed:<theta>, linear:<lambda> or power:<exponent>.
        #[arg(long, default_value = "fixed:1")]
        theta: RecordBias,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value = "slots")]
        sampler: SamplerKind,
        #[command(flatten)]
        seed: SeedArg,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical law of a statistic next to its exact law when available.
    Law {
        /// records, descents, inversions or first.
        #[arg(long)]
        stat: StatisticId,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "fixed:1")]
        theta: RecordBias,
        #[arg(long, default_value_t = 10_000)]
        count: u64,
        #[arg(long, default_value = "slots")]
        sampler: SamplerKind,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: Output,
    },
    /// Distance between empirical permutons and the limit permuton (theta = lambda n).
    Permuton {
        /// Sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        lambda: f64,
        /// Replicates per size; replicate k uses seed + k.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value = "slots")]
        sampler: SamplerKind,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: Output,
    },
    /// Matrix of counts of sigma(i) = j over a batch.
    Heatmap {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "fixed:1")]
        theta: RecordBias,
        #[arg(long, default_value_t = 10_000)]
        count: u64,
        #[arg(long, default_value = "slots")]
        sampler: SamplerKind,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: Output,
    },
    /// Check closed forms and samplers against exhaustive enumeration.
    Verify {
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        thetas: Vec<f64>,
    },
    /// Exact expectation of a statistic and its asymptotic equivalent.
    Expect {
        #[arg(long)]
        stat: StatisticId,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "fixed:1")]
        theta: RecordBias,
        #[command(flatten)]
        output: Output,
    },
    /// Time single draws at several sizes.
    Bench {
        #[arg(long, default_value = "slots")]
        sampler: SamplerKind,
        #[arg(long, value_delimiter = ',', default_values_t = [1_000_000usize, 2_000_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value = "fixed:1")]
        theta: RecordBias,
        /// Repetitions per size; the median time is reported.
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        output: Output,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(anyhow::Error),
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(1),
    }
}
