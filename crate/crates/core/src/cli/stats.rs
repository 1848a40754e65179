use std::path::PathBuf;

use anyhow::bail;
use clap::Args;
use serde::Serialize;

use super::{read_instance, OutArg, SeedArg};
use crate::cells::{
    count_shallow_cells, shallow_cell_table, vc_dimension_exact, VcDimension,
    MAX_EXHAUSTIVE_CELL_POINTS,
};
use crate::geom::ShapeClass;

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub instance: PathBuf,
    /// Compute the exact VC dimension (refused above 24 points without
    /// `--vc-cap`).
    #[arg(long)]
    pub vcdim: bool,
    /// Stop once a shattered set larger than this is found.
    #[arg(long)]
    pub vc_cap: Option<usize>,
    /// Count depth-<=k cells of width-<=l column subsets for k = 0..=K.
    #[arg(long)]
    pub cells: bool,
    #[arg(long, default_value_t = 5)]
    pub l: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Random column orders sampled per count.
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    /// Enumerate every column subset instead of sampling (at most 12 points).
    #[arg(long)]
    pub exhaustive: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Serialize)]
struct CellStats {
    l: usize,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Entry `k` counts cells of depth at most `k`.
    counts_by_k: Vec<usize>,
}

#[derive(Serialize)]
struct StatsReport {
    m: usize,
    n: usize,
    nnz: usize,
    distinct_ranges: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    class: Option<ShapeClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vc_dimension: Option<VcDimension>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<CellStats>,
}

pub(super) fn run(args: &StatsArgs) -> anyhow::Result<()> {
    let instance = read_instance(&args.instance)?;
    let system = &instance.system;
    let vc_dimension = if args.vcdim {
        Some(vc_dimension_exact(system, args.vc_cap)?)
    } else {
        None
    };
    let cells = if args.cells {
        if args.l > system.num_points() {
            bail!("--l {} exceeds {} points", args.l, system.num_points());
        }
        Some(if args.exhaustive {
            if system.num_points() > MAX_EXHAUSTIVE_CELL_POINTS {
                bail!("--exhaustive needs at most {MAX_EXHAUSTIVE_CELL_POINTS} points");
            }
            let table = shallow_cell_table(system)?;
            CellStats {
                l: args.l,
                method: "exhaustive",
                trials: None,
                seed: None,
                counts_by_k: (0..=args.k).map(|k| table[args.l][k.min(args.l)]).collect(),
            }
        } else {
            let counts_by_k = (0..=args.k)
                .map(|k| count_shallow_cells(system, None, args.l, k, args.trials, args.seed.seed))
                .collect::<crate::Result<_>>()?;
            CellStats {
                l: args.l,
                method: "sampled",
                trials: Some(args.trials),
                seed: Some(args.seed.seed),
                counts_by_k,
            }
        })
    } else {
        None
    };
    args.out.emit_json(&StatsReport {
        m: system.num_points(),
        n: system.num_ranges(),
        nnz: system.nnz(),
        distinct_ranges: system.num_distinct_ranges(),
        class: instance.class(),
        vc_dimension,
        cells,
    })
}
