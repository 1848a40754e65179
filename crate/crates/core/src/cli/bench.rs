use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Args;
use rayon::prelude::*;

use super::solve::{algo_config, Algo};
use super::{read_instance, resolve_dims, thread_pool, AlgoArgs, OutArg, Prefer};
use crate::baselines::{exact_hitting_set, greedy_hitting_set};
use crate::error::Error;
use crate::geom::{gen_instance, GenParams, ShapeClass};
use crate::instance::Instance;
use crate::lp::{solve_lp, DEFAULT_PIVOT_TOL};
use crate::netfinder::run_trial;

pub const CSV_HEADER: &str = "seed,algo,hitting_set_size,oracle_calls,z_star,wall_ms,ratio_to_opt";

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Fixed instance; seeds then only drive the netfinder.
    #[arg(long, conflicts_with = "class")]
    pub instance: Option<PathBuf>,
    /// Generate one instance per seed from this class.
    #[arg(long, requires_all = ["m", "n"])]
    pub class: Option<ShapeClass>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Inclusive range `A..B` or a comma-separated list.
    #[arg(long, default_value = "1..10")]
    pub seeds: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Netfinder, Algo::Greedy, Algo::Exact])]
    pub algos: Vec<Algo>,
    #[command(flatten)]
    pub algo_args: AlgoArgs,
    #[arg(long, default_value_t = 30)]
    pub size_cap: usize,
    /// Skip the exact optimum (leaves `ratio_to_opt` empty).
    #[arg(long)]
    pub no_opt: bool,
    /// Fill the `wall_ms` column.
    #[arg(long)]
    pub timing: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: OutArg,
}

pub fn parse_seeds(text: &str) -> anyhow::Result<Vec<u64>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad seed range '{text}'"))?;
        let hi: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad seed range '{text}'"))?;
        if lo > hi {
            bail!("empty seed range '{text}'");
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .with_context(|| format!("bad seed '{s}'"))
        })
        .collect()
}

struct Row {
    seed: u64,
    algo: Algo,
    size: usize,
    oracle_calls: Option<u64>,
    z_star: f64,
    wall_ms: Option<f64>,
    opt: Option<usize>,
}

fn algo_name(algo: Algo) -> &'static str {
    match algo {
        Algo::Netfinder => "netfinder",
        Algo::Greedy => "greedy",
        Algo::Exact => "exact",
        Algo::Lp => "lp",
    }
}

fn rows_for_seed(
    args: &BenchArgs,
    fixed: Option<&Instance>,
    seed: u64,
) -> anyhow::Result<Vec<Row>> {
    let generated;
    let instance = match fixed {
        Some(inst) => inst,
        None => {
            let class = args.class.context("--class or --instance is required")?;
            let params = GenParams::default();
            let geo = gen_instance(
                class,
                args.m.unwrap_or(0),
                args.n.unwrap_or(0),
                seed,
                &params,
            )?;
            generated = Instance::from_geometry(geo, Some(seed), Some(params));
            &generated
        }
    };
    let system = &instance.system;
    let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
    let wants_exact = args.algos.contains(&Algo::Exact);
    let exact_start = Instant::now();
    let exact = if args.no_opt && !wants_exact {
        None
    } else {
        match exact_hitting_set(system, args.size_cap) {
            Ok(h) => Some(h.len()),
            Err(Error::SizeCapExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    };
    let exact_ms = exact_start.elapsed().as_secs_f64() * 1e3;
    let opt = if args.no_opt { None } else { exact };
    let mut rows = Vec::with_capacity(args.algos.len());
    for &algo in &args.algos {
        let start = Instant::now();
        let (size, oracle_calls) = match algo {
            Algo::Netfinder => {
                let dims = resolve_dims(
                    instance,
                    args.algo_args.d,
                    args.algo_args.phi,
                    Prefer::ClassBound,
                )?;
                let cfg = algo_config(&args.algo_args, &dims, seed)?;
                let run = run_trial(system, &lp, &cfg, 0)?;
                (run.hitting_set.len(), Some(run.oracle_calls))
            }
            Algo::Greedy => (greedy_hitting_set(system)?.len(), None),
            // Rows are omitted when the optimum exceeds the size cap.
            Algo::Exact => match exact {
                Some(size) => (size, None),
                None => continue,
            },
            Algo::Lp => bail!("lp is not a hitting-set algorithm; use solve --algo lp"),
        };
        rows.push(Row {
            seed,
            algo,
            size,
            oracle_calls,
            z_star: lp.z_star,
            wall_ms: args.timing.then(|| match algo {
                Algo::Exact => exact_ms,
                _ => start.elapsed().as_secs_f64() * 1e3,
            }),
            opt,
        });
    }
    Ok(rows)
}

pub(super) fn run(args: &BenchArgs) -> anyhow::Result<()> {
    let seeds = parse_seeds(&args.seeds)?;
    let fixed = match &args.instance {
        Some(path) => Some(read_instance(path)?),
        None if args.class.is_some() => None,
        None => bail!("one of --instance or --class is required"),
    };
    let pool = thread_pool(args.jobs)?;
    let per_seed: Vec<Vec<Row>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| rows_for_seed(args, fixed.as_ref(), seed))
            .collect::<anyhow::Result<_>>()
    })?;

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for row in per_seed.iter().flatten() {
        let opt_ratio = row.opt.map(|o| row.size as f64 / o as f64);
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            row.seed,
            algo_name(row.algo),
            row.size,
            row.oracle_calls.map(|c| c.to_string()).unwrap_or_default(),
            row.z_star,
            row.wall_ms.map(|w| format!("{w:.3}")).unwrap_or_default(),
            opt_ratio.map(|r| r.to_string()).unwrap_or_default(),
        )?;
    }
    args.out.emit(&csv)
}
