use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convlab::convergence::Mode;

/// Convergence checks, achievability and simulations for finite-state
/// inference methods.
#[derive(Debug, Parser)]
#[command(name = "convlab", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. Each can also be set through a
/// `CONVLAB_` environment variable or a JSON config file; flags win over
/// the environment, which wins over the file.
#[derive(Debug, Args)]
pub struct Common {
    /// Master seed for stochastic runs.
    #[arg(long, global = true, env = "CONVLAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "CONVLAB_REPLICATES")]
    pub replicates: Option<u64>,
    #[arg(long, global = true, env = "CONVLAB_EPSILON")]
    pub epsilon: Option<String>,
    #[arg(long, global = true, env = "CONVLAB_DELTA")]
    pub delta: Option<String>,
    /// Test threshold for progressiveness, credence threshold for bayes.
    #[arg(long, global = true, env = "CONVLAB_THRESHOLD")]
    pub threshold: Option<String>,
    /// Output directory [default: convlab-out].
    #[arg(long, global = true, env = "CONVLAB_OUT")]
    pub out: Option<PathBuf>,
    /// Comma-separated output formats.
    #[arg(long, global = true, env = "CONVLAB_FORMAT", value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// JSON file with the same keys as the long flags (underscores for dashes).
    #[arg(long, global = true, env = "CONVLAB_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check methods against modes of convergence.
    Check {
        /// `.cvl` files with problems and methods.
        files: Vec<PathBuf>,
        /// Method to check: a name from the files or a built-in such as
        /// `ordinary_induction` or `occasional_counterinduction:1,3`.
        /// Defaults to every method in the files.
        #[arg(long = "method", short = 'm')]
        methods: Vec<String>,
        /// Modes to check [default: all].
        #[arg(long = "mode", value_delimiter = ',', env = "CONVLAB_MODE")]
        modes: Vec<Mode>,
    },
    /// Report the highest achievable mode of convergence for a problem.
    Achieve {
        /// A `.cvl` file or the name of a built-in problem.
        target: String,
        /// Restrict to one problem of the file.
        #[arg(long)]
        problem: Option<String>,
    },
    /// Run a simulation and certify its threshold.
    Simulate {
        #[command(subcommand)]
        kind: SimulateKind,
    },
    /// Merge simulation reports into one CSV and an SVG chart.
    Report {
        /// JSON reports written by `simulate`, all of one kind.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimulateKind {
    /// Coverage of a point estimator over the deciles of p.
    Consistency {
        /// Sample size, or `auto` for the Hoeffding bound.
        #[arg(long, env = "CONVLAB_N")]
        n: Option<String>,
        /// `frequency` or `true_proportion`.
        #[arg(long, env = "CONVLAB_ESTIMATOR")]
        estimator: Option<String>,
        /// Allowance for sampling error below `1 - delta` [default: 0.01].
        #[arg(long, env = "CONVLAB_MARGIN")]
        margin: Option<f64>,
    },
    /// Chance that a test answers truly, as the sample grows.
    Progressiveness {
        /// `frequency_threshold`, `always_true` or `odd_adversary`.
        #[arg(long, env = "CONVLAB_TEST")]
        test: Option<String>,
        /// Proportion of white balls in the urn [default: 0.6].
        #[arg(long, env = "CONVLAB_P")]
        p: Option<String>,
        /// Sample sizes as `start:stop:step` or a comma list [default: 10:200:10].
        #[arg(long, env = "CONVLAB_N_GRID")]
        n_grid: Option<String>,
        #[arg(long, env = "CONVLAB_DROP_TOLERANCE")]
        drop_tolerance: Option<f64>,
    },
    /// Posterior credence in the truth on the raven problem.
    Bayes {
        /// `geometric:K`, `uniform:K` or a JSON prior file [default: geometric:64].
        #[arg(long, env = "CONVLAB_PRIOR")]
        prior: Option<String>,
        /// Evidence length at which the threshold must hold [default: 10].
        #[arg(long, env = "CONVLAB_HORIZON")]
        horizon: Option<usize>,
        #[arg(long, env = "CONVLAB_MAX_PREFIX")]
        max_prefix: Option<usize>,
        #[arg(long, env = "CONVLAB_MAX_PERIOD")]
        max_period: Option<usize>,
        /// Trace the worlds with a first counterexample at 1..=K [default: 8].
        #[arg(long, env = "CONVLAB_CX_MAX")]
        cx_max: Option<usize>,
    },
}
