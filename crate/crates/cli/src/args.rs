use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "cubelab", version, about = "L1-Poincare constants on the Hamming cube")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Wall-clock budget in seconds for the search-based commands.
    #[arg(long, global = true, default_value_t = 60.0)]
    pub budget: f64,
    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long, global = true, env = "CUBELAB_SEED", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dual constant C_dual,n by multistart alternating ascent.
    Dual(DualArgs),
    /// Exact kernel table m_{i,z} for one n.
    Kernel(KernelArgs),
    /// Biased Khintchine constants: lower bounds and certificates per p.
    Khintchine(KhintchineArgs),
    /// Paley-Zygmund certificate q(p) <= q_upper < 1.
    Certify(CertifyArgs),
    /// Improved upper bound on the L1-Poincare constant.
    Bound(BoundArgs),
    /// Pointwise profile inequalities and Bellman constants.
    Bellman(BellmanArgs),
    /// Exact sequences and their limits.
    Series(SeriesArgs),
    /// Run every invariant group and print the constant table.
    Verify(VerifyArgs),
}

/// `a..b`, `a..=b` or a single `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad integer {t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 {
        return Err("n must be at least 1".into());
    }
    if hi < lo {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

#[derive(Debug, Args)]
pub struct DualArgs {
    /// Dimension range, e.g. `2..8` (inclusive).
    #[arg(long, value_parser = parse_range, default_value = "1..8")]
    pub n: RangeInclusive<usize>,
    /// Random restarts per n (default 200 + 50n).
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Skip coordinate, uniform and padded starts.
    #[arg(long)]
    pub no_structured: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct KhintchineArgs {
    /// One or more p in [1/2, 1), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Dimension for the lower-bound ascent.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Concentrated-branch threshold on max λ_k².
    #[arg(long, default_value_t = 0.99)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// One or more p in (1/2, 1), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 0.99)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Number of cells on the angle grid.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.99)]
    pub theta: f64,
    /// Use the trivial bound 1 everywhere.
    #[arg(long)]
    pub no_certify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BellmanCheck {
    TwoPoint,
    Curvature,
    Mb,
    TwoValue,
    Bobkov,
    SymmetricSets,
}

#[derive(Debug, Args)]
pub struct BellmanArgs {
    #[arg(long, value_enum)]
    pub check: BellmanCheck,
    /// Grid points per axis (two-point), or grid size for the one-dimensional scans.
    #[arg(long, default_value_t = 2001)]
    pub grid: usize,
    /// Two-point constant (default √(2π)).
    #[arg(long)]
    pub k: Option<f64>,
    /// Curvature weight for the curvature scan.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Emit every grid point of the two-point scan instead of the minimum.
    #[arg(long)]
    pub emit_grid: bool,
    /// Random functions for the Bobkov check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Series name, or `all`.
    #[arg(long)]
    pub name: String,
    #[arg(long, default_value_t = 10_000)]
    pub n_max: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random samples for the randomized groups.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}
