use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use rand::{Rng, RngCore};
use serde::Serialize;

use super::{parse_phi, read_instance, resolve_dims, Dims, OutArg, Prefer, SeedArg};
use crate::cells::{vc_dimension_exact, SccFamily};
use crate::instance::Instance;
use crate::lp::{solve_lp, DEFAULT_PIVOT_TOL};
use crate::packing::{
    build_unit_distance_graph, check_edge_bound, check_total_weight_bound, greedy_maximal_packing,
    monte_carlo_packing_lemma, shallow_packing_bound, DEFAULT_LEMMA_TRIALS,
};
use crate::rng::stream_rng;
use crate::system::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `|P| <= (24d/δ)·φ(8d/δ, 48dk/δ)` for greedy maximal packings.
    Shallow,
    /// `|P| <= 2·E|P|_Y|` by Monte Carlo.
    Packing,
    /// `|E| <= d·|V|` on unit-distance graphs of random projections.
    Edges,
    /// `W <= 2d·|P|` on the same graphs.
    Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Uniform,
    Lp,
    Instance,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub lemma: Lemma,
    /// Packing depth bound.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Packing separation. Required for `shallow` and `packing`; for
    /// `edges` and `weight` it switches the family from all ranges to a
    /// greedy packing.
    #[arg(long)]
    pub delta: Option<f64>,
    /// VC dimension. Defaults to the exact value (of each projection for
    /// `edges` and `weight`).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_parser = parse_phi)]
    pub phi: Option<SccFamily>,
    /// Monte-Carlo samples per packing.
    #[arg(long, default_value_t = DEFAULT_LEMMA_TRIALS)]
    pub trials: usize,
    /// Number of seeded greedy packings.
    #[arg(long, default_value_t = 100)]
    pub packings: usize,
    /// Number of random projections.
    #[arg(long, default_value_t = 500)]
    pub pairs: usize,
    /// Defaults to the instance weights when present, else uniform.
    #[arg(long, value_enum)]
    pub weights: Option<WeightSource>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Serialize)]
struct Verdict<T: Serialize> {
    lemma: Lemma,
    weights: WeightSource,
    k: f64,
    delta: Option<f64>,
    seed: u64,
    holds: Option<bool>,
    #[serde(flatten)]
    details: T,
}

#[derive(Serialize)]
struct ShallowDetails {
    dims: Dims,
    bound: f64,
    max_size: usize,
    sizes: Vec<usize>,
}

#[derive(Serialize)]
struct PackingEntry {
    size: usize,
    mean_projection: f64,
    stderr: f64,
    holds: bool,
}

#[derive(Serialize)]
struct PackingDetails {
    d: usize,
    d_source: super::Source,
    sample_size: Option<usize>,
    trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
    packings: Vec<PackingEntry>,
}

#[derive(Serialize)]
struct GraphEntry {
    sample_size: usize,
    family_size: usize,
    d: usize,
    vertices: usize,
    edges: usize,
    total_weight: usize,
    holds: bool,
}

#[derive(Serialize)]
struct GraphDetails {
    pairs: Vec<GraphEntry>,
}

fn weights_for(instance: &Instance, source: WeightSource) -> anyhow::Result<WeightVector> {
    let m = instance.system.num_points();
    Ok(match source {
        WeightSource::Uniform => WeightVector::uniform(m)?,
        WeightSource::Instance => instance
            .weights
            .clone()
            .context("instance has no weights")?,
        WeightSource::Lp => solve_lp(&instance.system, DEFAULT_PIVOT_TOL)?.mu_star,
    })
}

fn need_delta(args: &VerifyArgs) -> anyhow::Result<f64> {
    match args.delta {
        Some(d) if d > 0.0 => Ok(d),
        Some(d) => bail!("--delta must be positive, got {d}"),
        None => bail!("--delta is required for --lemma {:?}", args.lemma),
    }
}

fn verdict<T: Serialize>(
    args: &VerifyArgs,
    weights: WeightSource,
    holds: Option<bool>,
    details: T,
) -> Verdict<T> {
    Verdict {
        lemma: args.lemma,
        weights,
        k: args.k,
        delta: args.delta,
        seed: args.seed.seed,
        holds,
        details,
    }
}

/// Order seed of packing `i`; the same stream's next value seeds its
/// Monte-Carlo run.
fn order_seed(seed: u64, i: usize) -> u64 {
    stream_rng(seed, i as u64).next_u64()
}

pub(super) fn run(args: &VerifyArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let source = args.weights.unwrap_or(if instance.weights.is_some() {
        WeightSource::Instance
    } else {
        WeightSource::Uniform
    });
    let weights = weights_for(&instance, source)?;
    let seed = args.seed.seed;
    match args.lemma {
        Lemma::Shallow => {
            let delta = need_delta(args)?;
            let dims = resolve_dims(&instance, args.d, args.phi, Prefer::ExactVc)?;
            let bound = shallow_packing_bound(dims.d, delta, args.k, &dims.phi);
            let sizes = (0..args.packings)
                .map(|i| {
                    greedy_maximal_packing(
                        &instance.system,
                        &weights,
                        args.k,
                        delta,
                        order_seed(seed, i),
                    )
                    .map(|p| p.len())
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let max_size = sizes.iter().copied().max().unwrap_or(0);
            let holds = sizes.iter().all(|&s| s as f64 <= bound);
            args.out.emit_json(&verdict(
                args,
                source,
                Some(holds),
                ShallowDetails {
                    dims,
                    bound,
                    max_size,
                    sizes,
                },
            ))
        }
        Lemma::Packing => {
            let delta = need_delta(args)?;
            let dims = resolve_dims(&instance, args.d, None, Prefer::ExactVc)?;
            let raw = (8.0 * dims.d as f64 / delta).ceil() - 1.0;
            let mut details = PackingDetails {
                d: dims.d,
                d_source: dims.d_source,
                sample_size: None,
                trials: args.trials,
                skipped: None,
                packings: Vec::new(),
            };
            if raw < 1.0 {
                details.skipped = Some(format!("sample size {raw} < 1"));
                return args.out.emit_json(&verdict(args, source, None, details));
            }
            details.sample_size = Some(raw as usize);
            for i in 0..args.packings {
                let mut rng = stream_rng(seed, i as u64);
                let order = rng.next_u64();
                let packing =
                    greedy_maximal_packing(&instance.system, &weights, args.k, delta, order)?;
                let est = monte_carlo_packing_lemma(&packing, dims.d, args.trials, rng.next_u64())?;
                details.packings.push(PackingEntry {
                    size: est.packing_size,
                    mean_projection: est.mean_projection,
                    stderr: est.stderr,
                    holds: est.holds(),
                });
            }
            let holds = details.packings.iter().all(|p| p.holds);
            args.out
                .emit_json(&verdict(args, source, Some(holds), details))
        }
        Lemma::Edges | Lemma::Weight => {
            let pairs = graph_pairs(args, &instance, &weights)?;
            let holds = pairs.iter().all(|p| p.holds);
            args.out
                .emit_json(&verdict(args, source, Some(holds), GraphDetails { pairs }))
        }
    }
}

fn graph_pairs(
    args: &VerifyArgs,
    instance: &Instance,
    weights: &WeightVector,
) -> anyhow::Result<Vec<GraphEntry>> {
    let system = &instance.system;
    let m = system.num_points();
    let delta = match args.delta {
        Some(_) => Some(need_delta(args)?),
        None => None,
    };
    let mut out = Vec::with_capacity(args.pairs);
    for i in 0..args.pairs {
        let mut rng = stream_rng(args.seed.seed, i as u64);
        let family = match delta {
            Some(delta) => {
                greedy_maximal_packing(system, weights, args.k, delta, rng.next_u64())?.as_system()
            }
            None => system.clone(),
        };
        let sample: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
        let proj = family.project(&sample)?;
        let d = match args.d {
            Some(d) => d,
            None => vc_dimension_exact(&proj.to_system(), Some(sample.len()))?.lower_bound(),
        };
        let graph = build_unit_distance_graph(&proj);
        let holds = match args.lemma {
            Lemma::Edges => check_edge_bound(&graph, d),
            _ => check_total_weight_bound(&graph, d, family.num_ranges()),
        };
        out.push(GraphEntry {
            sample_size: sample.len(),
            family_size: family.num_ranges(),
            d,
            vertices: graph.num_vertices(),
            edges: graph.num_edges(),
            total_weight: graph.total_weight,
            holds,
        });
    }
    Ok(out)
}
