use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use smh_core::exact::{DpConfig, DEFAULT_TERMINAL_CAP};
use smh_core::generator::GeneratorConfig;
use smh_core::merge::MergeConfig;

/// Steiner tree solution merging: build a pool of locally optimal trees and
/// solve the instance restricted to a width-bounded union of them exactly.
///
/// Every option can also be set through an environment variable with the
/// `SMH_` prefix, e.g. `SMH_POOL=32` or `SMH_FORMAT=json`.
#[derive(Debug, Parser)]
#[command(name = "smh", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a pool and merge it
    Solve {
        /// SteinLib .stp file
        instance: PathBuf,
        #[command(flatten)]
        generator: GeneratorArgs,
        #[command(flatten)]
        merge: MergeArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Base seed of generation and ranking
        #[arg(long, env = "SMH_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads for pool generation (1 runs sequentially)
        #[arg(long, env = "SMH_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Wall-clock budget in seconds for generation and merging together
        #[arg(long, env = "SMH_TIME_LIMIT")]
        time_limit: Option<f64>,
    },
    /// Generate a pool and write it as a pool file
    Generate {
        instance: PathBuf,
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Write the pool here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Base seed of generation and ranking
        #[arg(long, env = "SMH_SEED", default_value_t = 0)]
        seed: u64,
        /// Worker threads for pool generation (1 runs sequentially)
        #[arg(long, env = "SMH_JOBS", default_value_t = 1)]
        jobs: usize,
        #[arg(long, env = "SMH_TIME_LIMIT")]
        time_limit: Option<f64>,
    },
    /// Merge a previously generated pool
    Merge {
        instance: PathBuf,
        /// Pool file written by `generate`
        pool: PathBuf,
        #[command(flatten)]
        merge: MergeArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Base seed of generation and ranking
        #[arg(long, env = "SMH_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "SMH_TIME_LIMIT")]
        time_limit: Option<f64>,
    },
    /// Solve exactly with Dreyfus-Wagner (small terminal sets only)
    Oracle {
        instance: PathBuf,
        /// Refuse instances with more terminals than this
        #[arg(long, env = "SMH_ORACLE_CAP", default_value_t = DEFAULT_TERMINAL_CAP)]
        oracle_cap: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check a tree decomposition of the instance graph
    ValidateTd {
        instance: PathBuf,
        /// PACE .td file; without it the GreedyDegree decomposition and its
        /// nice refinement are built and checked
        td: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full pipeline on every .stp file of a directory
    Bench {
        /// Directory of .stp files
        dir: PathBuf,
        /// Side file with `name,value` best-known values
        #[arg(long, env = "SMH_BEST_KNOWN")]
        best_known: Option<PathBuf>,
        /// Leave out instances whose best known value GRASP already reaches
        #[arg(long, env = "SMH_DROP_SOLVED")]
        drop_solved: bool,
        /// Instances solved concurrently
        #[arg(long, env = "SMH_JOBS", default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        generator: GeneratorArgs,
        #[command(flatten)]
        merge: MergeArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Base seed of generation and ranking
        #[arg(long, env = "SMH_SEED", default_value_t = 0)]
        seed: u64,
        /// Per-instance wall-clock budget in seconds
        #[arg(long, env = "SMH_TIME_LIMIT")]
        time_limit: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    /// Independent multistart runs, one pool tree each
    #[arg(long = "pool", env = "SMH_POOL", default_value_t = 16)]
    pub pool_size: usize,
    /// Iterations per run
    #[arg(long, env = "SMH_GRASP_ITERS", default_value_t = 8)]
    pub grasp_iters: usize,
    /// Weight perturbation strength in [0, 1)
    #[arg(long, env = "SMH_PERTURB", default_value_t = 0.2)]
    pub perturb: f64,
}

impl GeneratorArgs {
    pub fn config(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            pool_size: self.pool_size,
            iterations_per_run: self.grasp_iters,
            perturbation_strength: self.perturb,
            seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MergeArgs {
    /// Width cap of the final union
    #[arg(long, env = "SMH_MAX_WIDTH", default_value_t = 10)]
    pub max_width: usize,
    /// Width cap of the ranking unions
    #[arg(long, env = "SMH_RANK_WIDTH", default_value_t = 8)]
    pub rank_width: usize,
    /// Ranking iterations
    #[arg(long, env = "SMH_RANK_ITERS", default_value_t = 20)]
    pub rank_iters: usize,
    /// Report only the final union's optimum (or the best pool tree)
    #[arg(long, env = "SMH_NO_KEEP_BEST")]
    pub no_keep_best: bool,
    /// DP table budget per union, in entries
    #[arg(long, env = "SMH_MAX_ENTRIES", default_value_t = DpConfig::default().max_entries)]
    pub max_entries: usize,
}

impl MergeArgs {
    pub fn config(&self, seed: u64, deadline: Option<Instant>) -> MergeConfig {
        MergeConfig {
            m: self.max_width,
            k: self.rank_width,
            r: self.rank_iters,
            keep_best: !self.no_keep_best,
            seed,
            max_entries: self.max_entries,
            deadline,
            check_decompositions: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, env = "SMH_FORMAT", default_value_t = Format::Table)]
    pub format: Format,
    /// Include wall-clock times in machine output (makes it nondeterministic)
    #[arg(long, env = "SMH_TIMINGS")]
    pub timings: bool,
}

pub fn deadline(limit: Option<f64>) -> anyhow::Result<Option<Instant>> {
    match limit {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Some(Instant::now() + Duration::from_secs_f64(s))),
        Some(s) => anyhow::bail!(crate::UsageError(format!(
            "--time-limit must be a nonnegative number, got {s}"
        ))),
    }
}
