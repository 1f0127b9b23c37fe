use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pinchlab::campaign::SourceKind;
use pinchlab::estimates::SamplerKind;
use pinchlab::{Arithmetic, Exact};
use pinchlab_cli::{emit, persist, run, CliError, Command, Format, RunConfig};

/// Verification campaigns for pointwise sectional-curvature pinching
/// estimates on four-dimensional gradient shrinking Ricci solitons.
#[derive(Debug, Parser)]
#[command(name = "pinchlab", version)]
struct Cli {
    command: Option<Command>,
    /// Model name for `model`, e.g. `cp2`, `sphere(4,1)`, `s3xr`.
    name: Option<String>,
    /// Campaign seed; equal seeds give equal reports.
    #[arg(long, env = "PINCHLAB_SEED")]
    seed: Option<u64>,
    /// `rational` (exact) or `float`.
    #[arg(long)]
    arithmetic: Option<Arithmetic>,
    /// Dimensions; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Pinching constants as `p/q` or decimals; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Vec<Exact>,
    /// Convex weights in [0, 1].
    #[arg(long, value_delimiter = ',')]
    s: Vec<Exact>,
    /// Samples per (n, eps) block.
    #[arg(long)]
    count: Option<usize>,
    /// Coefficient vectors per model for `expand-fsq`.
    #[arg(long)]
    coeff_count: Option<usize>,
    /// Draw eigenvalue profiles directly or from random tensors.
    #[arg(long)]
    source: Option<SourceKind>,
    /// Sampler for eigenvalue profiles.
    #[arg(long)]
    distribution: Option<SamplerKind>,
    /// Shift margin for tensor-sourced pinched samples.
    #[arg(long)]
    margin: Option<Exact>,
    /// Multistart grid points per axis for `optimize-q2`.
    #[arg(long)]
    grid: Option<usize>,
    /// Half-width of the search box for `optimize-q2`.
    #[arg(long = "box")]
    half_width: Option<f64>,
    /// Tolerance on the optimizer's maximum.
    #[arg(long)]
    tol: Option<f64>,
    /// `a1,a2,b1,b2,b3`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Random planes for the float minimum-sectional-curvature cross-check.
    #[arg(long)]
    oracle_samples: Option<usize>,
    /// Print the model comparison table.
    #[arg(long)]
    table: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the JSON report into this directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output format (default json).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shift the first estimate's coefficient by this amount.
    #[arg(long, allow_hyphen_values = true)]
    fault_rhs1: Option<Exact>,
}

impl Cli {
    fn into_config(self) -> (Option<PathBuf>, RunConfig) {
        let cfg = RunConfig {
            command: self.command,
            seed: self.seed,
            arithmetic: self.arithmetic,
            n: some_vec(self.n),
            eps: some_vec(self.eps),
            s: some_vec(self.s),
            count: self.count,
            coeff_count: self.coeff_count,
            source: self.source,
            distribution: self.distribution,
            margin: self.margin,
            grid: self.grid,
            half_width: self.half_width,
            tol: self.tol,
            coeffs: self.coeffs,
            model: self.name,
            oracle_samples: self.oracle_samples,
            table: self.table.then_some(true),
            threads: self.threads,
            out_dir: self.out_dir,
            format: self.format,
            fault_rhs1_coefficient: self.fault_rhs1,
        };
        (self.config, cfg)
    }
}

fn some_vec<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

fn main_inner() -> Result<i32, CliError> {
    let (file, flags) = Cli::parse().into_config();
    let config = match file {
        Some(path) => RunConfig::from_json_file(&path)?.overlay(flags),
        None => flags,
    };
    if let Some(t) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let report = run(&config)?;
    let format = report.config.format.unwrap_or_default();
    if let Some(dir) = &report.config.out_dir {
        let path = persist(&report, dir)?;
        eprintln!("report written to {}", path.display());
    }
    std::io::stdout().write_all(&emit::emit(&report, format))?;
    Ok(report.exit_status)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("pinchlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
