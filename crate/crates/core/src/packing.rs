//! Weighted `(k, δ)`-packings, the shallow packing bound, unit-distance
//! graphs over projections and a Monte-Carlo check of the weighted packing
//! lemma `|P| <= 2 E[|P|_Y|]`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::ShallowCellBound;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::system::{Projection, SetSystem, WeightVector};

/// Slack used when comparing weights against `k` and `δ`.
pub const PACKING_TOL: f64 = 1e-12;

/// Standard errors of cushion in the Monte-Carlo lemma check.
pub const LEMMA_SIGMAS: f64 = 3.0;

pub const DEFAULT_LEMMA_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum PackingViolation {
    TooHeavy {
        member: usize,
        weight: f64,
    },
    TooClose {
        first: usize,
        second: usize,
        weight: f64,
    },
}

/// Checks both packing conditions, reporting the first violation in
/// member order (heavy members before close pairs).
pub fn check_packing(
    system: &SetSystem,
    weights: &WeightVector,
    members: &[usize],
    k: f64,
    delta: f64,
) -> Result<Option<PackingViolation>> {
    for &member in members {
        let weight = system.weight_of(weights, member)?;
        if weight > k + PACKING_TOL {
            return Ok(Some(PackingViolation::TooHeavy { member, weight }));
        }
    }
    for (i, &first) in members.iter().enumerate() {
        for &second in &members[i + 1..] {
            let weight = system.sym_diff_weight(weights, first, second)?;
            if weight < delta - PACKING_TOL {
                return Ok(Some(PackingViolation::TooClose {
                    first,
                    second,
                    weight,
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_packing(
    system: &SetSystem,
    weights: &WeightVector,
    members: &[usize],
    k: f64,
    delta: f64,
) -> Result<bool> {
    Ok(check_packing(system, weights, members, k, delta)?.is_none())
}

/// A validated weighted `(k, δ)`-packing drawn from `system`.
#[derive(Debug, Clone)]
pub struct Packing<'a> {
    system: &'a SetSystem,
    weights: &'a WeightVector,
    members: Vec<usize>,
    k: f64,
    delta: f64,
}

impl<'a> Packing<'a> {
    pub fn new(
        system: &'a SetSystem,
        weights: &'a WeightVector,
        members: Vec<usize>,
        k: f64,
        delta: f64,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must be > 0, got {delta}"
            )));
        }
        if let Some(v) = check_packing(system, weights, &members, k, delta)? {
            return Err(Error::InvalidPacking(format!("{v:?}")));
        }
        Ok(Self {
            system,
            weights,
            members,
            k,
            delta,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn weights(&self) -> &'a WeightVector {
        self.weights
    }

    pub fn base(&self) -> &'a SetSystem {
        self.system
    }

    /// The member ranges as their own set system.
    pub fn as_system(&self) -> SetSystem {
        self.system
            .subsystem(&self.members)
            .expect("members were validated")
    }

    /// True iff no range outside the packing could be added.
    pub fn is_maximal(&self) -> Result<bool> {
        for r in 0..self.system.num_ranges() {
            if self.members.contains(&r) {
                continue;
            }
            if addable(
                self.system,
                self.weights,
                &self.members,
                r,
                self.k,
                self.delta,
            )? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn addable(
    system: &SetSystem,
    weights: &WeightVector,
    members: &[usize],
    candidate: usize,
    k: f64,
    delta: f64,
) -> Result<bool> {
    if system.weight_of(weights, candidate)? > k + PACKING_TOL {
        return Ok(false);
    }
    for &m in members {
        if system.sym_diff_weight(weights, candidate, m)? < delta - PACKING_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Scans the ranges in a seeded random order and keeps every range that
/// can join the packing. The result is maximal.
pub fn greedy_maximal_packing<'a>(
    system: &'a SetSystem,
    weights: &'a WeightVector,
    k: f64,
    delta: f64,
    order_seed: u64,
) -> Result<Packing<'a>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    let mut order: Vec<usize> = (0..system.num_ranges()).collect();
    order.shuffle(&mut stream_rng(order_seed, 0));
    let mut members = Vec::new();
    for r in order {
        if addable(system, weights, &members, r, k, delta)? {
            members.push(r);
        }
    }
    Ok(Packing {
        system,
        weights,
        members,
        k,
        delta,
    })
}

/// `(24d/δ) · φ(8d/δ, 48dk/δ)`.
pub fn shallow_packing_bound(d: usize, delta: f64, k: f64, phi: &impl ShallowCellBound) -> f64 {
    let d = d as f64;
    24.0 * d / delta * phi.eval(8.0 * d / delta, 48.0 * d * k / delta)
}

/// Graph on the distinct traces of a projection; edges join traces that
/// differ in exactly one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitDistanceGraph {
    pub vertices: Vec<Vec<usize>>,
    /// Number of projected ranges mapped to each vertex.
    pub vertex_weights: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// `min` of the two endpoint weights.
    pub edge_weights: Vec<usize>,
    pub total_weight: usize,
}

impl UnitDistanceGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Builds the unit-distance graph by toggling each sample point in each
/// trace and looking the result up.
pub fn build_unit_distance_graph(proj: &Projection<'_>) -> UnitDistanceGraph {
    let vertices = proj.traces().to_vec();
    let vertex_weights = proj.multiplicities();
    let index: HashMap<&[usize], usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_slice(), i))
        .collect();
    let mut edges = Vec::new();
    let mut edge_weights = Vec::new();
    let mut toggled = Vec::new();
    for (u, trace) in vertices.iter().enumerate() {
        for &y in proj.sample() {
            toggled.clear();
            match trace.binary_search(&y) {
                Ok(pos) => {
                    toggled.extend_from_slice(&trace[..pos]);
                    toggled.extend_from_slice(&trace[pos + 1..]);
                }
                Err(pos) => {
                    toggled.extend_from_slice(&trace[..pos]);
                    toggled.push(y);
                    toggled.extend_from_slice(&trace[pos..]);
                }
            }
            if let Some(&v) = index.get(toggled.as_slice()) {
                if u < v {
                    edges.push((u, v));
                    edge_weights.push(vertex_weights[u].min(vertex_weights[v]));
                }
            }
        }
    }
    edges.sort_unstable();
    let total_weight = edge_weights.iter().sum();
    // Re-derive weights in sorted edge order.
    let edge_weights = edges
        .iter()
        .map(|&(u, v)| vertex_weights[u].min(vertex_weights[v]))
        .collect();
    UnitDistanceGraph {
        vertices,
        vertex_weights,
        edges,
        edge_weights,
        total_weight,
    }
}

/// `|E| <= d · |V|`.
pub fn check_edge_bound(graph: &UnitDistanceGraph, d: usize) -> bool {
    graph.num_edges() <= d * graph.num_vertices()
}

/// `W <= 2d · |P|`.
pub fn check_total_weight_bound(graph: &UnitDistanceGraph, d: usize, packing_size: usize) -> bool {
    graph.total_weight <= 2 * d * packing_size
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PackingLemmaEstimate {
    pub packing_size: usize,
    pub sample_size: usize,
    pub trials: usize,
    pub mean_projection: f64,
    pub stderr: f64,
}

impl PackingLemmaEstimate {
    /// `|P| <= 2 (mean + 3 · stderr)`.
    pub fn holds(&self) -> bool {
        self.packing_size as f64 <= 2.0 * (self.mean_projection + LEMMA_SIGMAS * self.stderr)
    }
}

/// Draws `s = ⌈8d/δ⌉ − 1` points iid from the packing weights (with
/// replacement, inverse CDF), projects the packing onto the distinct points
/// and averages `|P|_Y|` over `trials` independent samples. Trial `t` uses
/// stream `t` of `seed`, so the result does not depend on thread count.
pub fn monte_carlo_packing_lemma(
    packing: &Packing<'_>,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<PackingLemmaEstimate> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let raw = (8.0 * d as f64 / packing.delta()).ceil() - 1.0;
    if raw < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sample size {raw} < 1 for d={d}, delta={}",
            packing.delta()
        )));
    }
    let sample_size = raw as usize;
    let sub = packing.as_system();
    let cumulative = packing.weights().cumulative();
    let total = *cumulative.last().expect("weights are nonempty");

    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            let sample: Vec<usize> = (0..sample_size)
                .map(|_| {
                    let u = rng.gen::<f64>() * total;
                    cumulative
                        .partition_point(|&c| c <= u)
                        .min(cumulative.len() - 1)
                })
                .collect();
            sub.project(&sample)
                .expect("sample indices are in range")
                .num_traces()
        })
        .collect();

    let n = trials as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(PackingLemmaEstimate {
        packing_size: packing.len(),
        sample_size,
        trials,
        mean_projection: mean,
        stderr: (var / n).sqrt(),
    })
}
