use std::path::PathBuf;
use std::time::Instant;

use anyhow::bail;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    read_instance, resolve_dims, thread_pool, AlgoArgs, Dims, OutArg, Prefer, SeedArg, Stat,
};
use crate::baselines::{exact_hitting_set, greedy_hitting_set};
use crate::lp::{solve_lp, LpSolution, DEFAULT_PIVOT_TOL};
use crate::netfinder::{run_trial, AlgoConfig, RunReport};
use crate::system::SetSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Netfinder,
    Greedy,
    Exact,
    Lp,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Netfinder)]
    pub algo: Algo,
    #[command(flatten)]
    pub algo_args: AlgoArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Worker threads for independent trials. Does not change the output.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Largest hitting set the exact solver will look for.
    #[arg(long, default_value_t = 30)]
    pub size_cap: usize,
    /// Include wall-clock times (makes reports non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Serialize)]
struct LpReport<'a> {
    algo: Algo,
    #[serde(flatten)]
    lp: &'a LpSolution,
}

#[derive(Serialize)]
struct SetReport {
    algo: Algo,
    #[serde(skip_serializing_if = "Option::is_none")]
    size_cap: Option<usize>,
    z_star: f64,
    hitting_set_size: usize,
    hitting_set: Vec<usize>,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

#[derive(Serialize)]
pub(crate) struct ResolvedConfig {
    #[serde(flatten)]
    pub algo: AlgoConfig,
    pub d_source: super::Source,
    pub phi_source: super::Source,
    pub trials: u64,
}

#[derive(Serialize)]
struct RunEntry {
    hitting_set_size: usize,
    valid: bool,
    #[serde(flatten)]
    run: RunReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    all_valid: bool,
    hitting_set_size: Stat,
    oracle_calls: Stat,
}

#[derive(Serialize)]
struct NetfinderReport {
    algo: Algo,
    config: ResolvedConfig,
    z_star: f64,
    eps_star: f64,
    /// `24·48 / (β(3/2 − β − γ)) · z*`.
    oracle_call_bound: f64,
    summary: Summary,
    runs: Vec<RunEntry>,
}

pub(crate) fn algo_config(args: &AlgoArgs, dims: &Dims, seed: u64) -> anyhow::Result<AlgoConfig> {
    let cfg = AlgoConfig {
        beta: args.beta,
        gamma: args.gamma,
        d: dims.d,
        phi: dims.phi,
        seed,
        prob_scale: args.prob_scale,
        max_oracle_calls: args.max_oracle_calls,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub(super) fn run(args: &SolveArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let system = &instance.system;
    let start = Instant::now();
    match args.algo {
        Algo::Lp => {
            let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
            args.out.emit_json(&LpReport {
                algo: Algo::Lp,
                lp: &lp,
            })
        }
        Algo::Greedy | Algo::Exact => {
            let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
            let (hitting_set, size_cap) = if args.algo == Algo::Greedy {
                (greedy_hitting_set(system)?, None)
            } else {
                (
                    exact_hitting_set(system, args.size_cap)?,
                    Some(args.size_cap),
                )
            };
            let wall_ms = args.timing.then(|| millis(start));
            args.out.emit_json(&SetReport {
                algo: args.algo,
                size_cap,
                z_star: lp.z_star,
                hitting_set_size: hitting_set.len(),
                valid: system.is_hitting_set(&hitting_set),
                hitting_set,
                wall_ms,
            })
        }
        Algo::Netfinder => netfinder(args, system, &instance),
    }
}

fn netfinder(
    args: &SolveArgs,
    system: &SetSystem,
    instance: &crate::instance::Instance,
) -> anyhow::Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let a = &args.algo_args;
    let dims = resolve_dims(instance, a.d, a.phi, Prefer::ClassBound)?;
    let mut cfg = algo_config(a, &dims, args.seed.seed)?;
    let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
    cfg.max_oracle_calls = Some(cfg.oracle_cap(lp.z_star));

    let pool = thread_pool(args.jobs)?;
    let runs: Vec<RunReport> = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|t| run_trial(system, &lp, &cfg, t))
            .collect::<crate::Result<_>>()
    })?;

    let runs: Vec<RunEntry> = runs
        .into_iter()
        .map(|run| RunEntry {
            hitting_set_size: run.hitting_set.len(),
            valid: system.is_hitting_set(&run.hitting_set),
            wall_ms: args.timing.then(|| run.wall_time.as_secs_f64() * 1e3),
            run,
        })
        .collect();
    let sizes: Vec<f64> = runs.iter().map(|r| r.hitting_set_size as f64).collect();
    let calls: Vec<f64> = runs.iter().map(|r| r.run.oracle_calls as f64).collect();
    let summary = Summary {
        all_valid: runs.iter().all(|r| r.valid),
        hitting_set_size: Stat::of(&sizes).expect("at least one trial"),
        oracle_calls: Stat::of(&calls).expect("at least one trial"),
    };
    args.out.emit_json(&NetfinderReport {
        algo: Algo::Netfinder,
        oracle_call_bound: cfg.expected_oracle_call_bound(lp.z_star),
        config: ResolvedConfig {
            algo: cfg,
            d_source: dims.d_source,
            phi_source: dims.phi_source,
            trials: args.trials,
        },
        z_star: lp.z_star,
        eps_star: lp.eps_star,
        summary,
        runs,
    })
}
