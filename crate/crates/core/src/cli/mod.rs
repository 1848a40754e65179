//! The `hitset` command line.
//!
//! Every report is a pure function of the instance, the flags and the seed.
//! Wall-clock times only appear with `--timing`.

mod bench;
mod solve;
mod stats;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cells::{vc_dimension_exact, SccFamily, MAX_UNCAPPED_VC_POINTS};
use crate::geom::{
    all_contiguous_intervals, gen_instance, scc_family, GenParams, ShapeClass, RANDOM_PHI_C,
};
use crate::instance::Instance;
use crate::netfinder::{DEFAULT_BETA, DEFAULT_GAMMA};

pub use bench::BenchArgs;
pub use solve::SolveArgs;
pub use stats::StatsArgs;
pub use verify::VerifyArgs;

#[derive(Debug, Parser)]
#[command(
    name = "hitset",
    version,
    about = "LP-guided hitting sets and packing-lemma checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a geometric or random instance.
    Gen(GenArgs),
    /// Compute a hitting set (or the LP relaxation).
    Solve(SolveArgs),
    /// Check a packing inequality on an instance.
    Verify(VerifyArgs),
    /// Report VC dimension and shallow cell counts.
    Stats(StatsArgs),
    /// Run solvers over many seeds and write CSV.
    Bench(BenchArgs),
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(args) => gen(&args),
        Command::Solve(args) => solve::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Stats(args) => stats::run(&args),
        Command::Bench(args) => bench::run(&args),
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SeedArg {
    /// Root seed; trial `i` uses stream `i` of it.
    #[arg(long, env = "HITSET_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// Output path; stdout when absent.
#[derive(Debug, Clone, Args)]
pub struct OutArg {
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

impl OutArg {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }

    fn emit_json(&self, report: &impl Serialize) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(report)?;
        text.push('\n');
        self.emit(&text)
    }
}

/// Netfinder parameters shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    #[arg(long, default_value_t = DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA)]
    pub gamma: f64,
    /// VC-dimension bound. Defaults to the shape-class bound, else the exact
    /// VC dimension (at most 24 points).
    #[arg(long)]
    pub d: Option<usize>,
    /// Shallow cell complexity `c·l^a·k^b` given as `a,b,c`.
    #[arg(long, value_parser = parse_phi)]
    pub phi: Option<SccFamily>,
    #[arg(long, default_value_t = 1.0)]
    pub prob_scale: f64,
    #[arg(long)]
    pub max_oracle_calls: Option<u64>,
}

pub(crate) fn parse_phi(text: &str) -> Result<SccFamily, String> {
    SccFamily::parse(text).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub(crate) enum Source {
    Flag,
    ShapeClass,
    VcDimension,
    SauerFallback,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub(crate) struct Dims {
    pub d: usize,
    pub d_source: Source,
    pub phi: SccFamily,
    pub phi_source: Source,
}

/// Order of preference when `d` is not given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Prefer {
    ClassBound,
    ExactVc,
}

fn exact_vc(instance: &Instance) -> anyhow::Result<Option<usize>> {
    let m = instance.system.num_points();
    if m > MAX_UNCAPPED_VC_POINTS {
        return Ok(None);
    }
    let vc = vc_dimension_exact(&instance.system, None)?;
    Ok(vc.exact())
}

pub(crate) fn resolve_dims(
    instance: &Instance,
    d: Option<usize>,
    phi: Option<SccFamily>,
    prefer: Prefer,
) -> anyhow::Result<Dims> {
    let class = instance.class();
    let class_d = class.map(|c| c.vc_bound(instance.system.num_ranges()));
    let (d, d_source) = match (d, prefer) {
        (Some(d), _) => (d, Source::Flag),
        (None, Prefer::ClassBound) if class_d.is_some() => (class_d.unwrap(), Source::ShapeClass),
        (None, _) => match exact_vc(instance)? {
            Some(v) => (v.max(1), Source::VcDimension),
            None => match class_d {
                Some(v) => (v, Source::ShapeClass),
                None => bail!(
                    "instance has {} points; exact VC dimension needs at most {MAX_UNCAPPED_VC_POINTS}, pass --d",
                    instance.system.num_points()
                ),
            },
        },
    };
    if d == 0 {
        bail!("--d must be at least 1");
    }
    let (phi, phi_source) = match (phi, class) {
        (Some(p), _) => (p, Source::Flag),
        (None, Some(c)) => (scc_family(c, d), Source::ShapeClass),
        (None, None) => (
            SccFamily::new(1.0, d as f64, RANDOM_PHI_C),
            Source::SauerFallback,
        ),
    };
    Ok(Dims {
        d,
        d_source,
        phi,
        phi_source,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub(crate) struct Stat {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        Some(Self {
            mean: sorted.iter().sum::<f64>() / n as f64,
            median,
            max: sorted[n - 1],
        })
    }
}

pub(crate) fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::read(path).with_context(|| format!("reading instance {}", path.display()))
}

pub(crate) fn thread_pool(jobs: usize) -> anyhow::Result<rayon::ThreadPool> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// discs, rects, halfplanes, intervals or random.
    pub class: ShapeClass,
    /// Number of points.
    #[arg(long)]
    pub m: usize,
    /// Number of ranges.
    #[arg(long, required_unless_present = "all_contiguous")]
    pub n: Option<usize>,
    /// Intervals only: evenly spaced points with every contiguous interval.
    #[arg(long)]
    pub all_contiguous: bool,
    #[arg(long)]
    pub radius_min: Option<f64>,
    #[arg(long)]
    pub radius_max: Option<f64>,
    #[arg(long)]
    pub side_min: Option<f64>,
    #[arg(long)]
    pub side_max: Option<f64>,
    #[arg(long)]
    pub interval_min: Option<f64>,
    #[arg(long)]
    pub interval_max: Option<f64>,
    /// Point inclusion probability for the random class.
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub retry_cap: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

impl GenArgs {
    fn params(&self) -> GenParams {
        let d = GenParams::default();
        GenParams {
            radius: (
                self.radius_min.unwrap_or(d.radius.0),
                self.radius_max.unwrap_or(d.radius.1),
            ),
            side: (
                self.side_min.unwrap_or(d.side.0),
                self.side_max.unwrap_or(d.side.1),
            ),
            interval_len: (
                self.interval_min.unwrap_or(d.interval_len.0),
                self.interval_max.unwrap_or(d.interval_len.1),
            ),
            density: self.density.unwrap_or(d.density),
            retry_cap: self.retry_cap.unwrap_or(d.retry_cap),
        }
    }
}

fn gen(args: &GenArgs) -> anyhow::Result<()> {
    let instance = if args.all_contiguous {
        if args.class != ShapeClass::Intervals {
            bail!("--all-contiguous only applies to intervals");
        }
        Instance::from_geometry(all_contiguous_intervals(args.m)?, None, None)
    } else {
        let n = args.n.context("--n is required")?;
        let params = args.params();
        let geo = gen_instance(args.class, args.m, n, args.seed.seed, &params)?;
        Instance::from_geometry(geo, Some(args.seed.seed), Some(params))
    };
    args.out.emit(&instance.to_json())
}
