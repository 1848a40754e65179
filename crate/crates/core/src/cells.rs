//! Shattering and shallow cell complexity.
//!
//! A cell is a group of identical rows of a column-restricted incidence
//! matrix and its depth is the number of ones in those rows. Counting is
//! done over column subsets of size `1..=l`, i.e. "at most l columns".

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::system::{SetSystem, WeightVector};

/// Largest point count for which an uncapped VC search is accepted.
pub const MAX_UNCAPPED_VC_POINTS: usize = 24;

/// Largest point count for exhaustive submatrix enumeration.
pub const MAX_EXHAUSTIVE_CELL_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VcDimension {
    Exact(usize),
    /// A set of this size is shattered; larger sizes were not searched.
    AtLeast(usize),
}

impl VcDimension {
    pub fn exact(self) -> Option<usize> {
        match self {
            VcDimension::Exact(d) => Some(d),
            VcDimension::AtLeast(_) => None,
        }
    }

    pub fn lower_bound(self) -> usize {
        match self {
            VcDimension::Exact(d) | VcDimension::AtLeast(d) => d,
        }
    }
}

/// Row membership as packed bitsets, for repeated point lookups.
struct BitRows {
    words: usize,
    bits: Vec<u64>,
    rows: usize,
}

impl BitRows {
    fn new(system: &SetSystem) -> Self {
        let words = system.num_points().div_ceil(64).max(1);
        let mut bits = vec![0u64; words * system.num_ranges()];
        for (r, range) in system.ranges().iter().enumerate() {
            for &p in range {
                bits[r * words + p / 64] |= 1 << (p % 64);
            }
        }
        Self {
            words,
            bits,
            rows: system.num_ranges(),
        }
    }

    #[inline]
    fn contains(&self, row: usize, point: usize) -> bool {
        self.bits[row * self.words + point / 64] >> (point % 64) & 1 == 1
    }

    fn is_shattered(&self, points: &[usize], seen: &mut Vec<bool>) -> bool {
        let needed = 1usize << points.len();
        if self.rows < needed {
            return false;
        }
        seen.clear();
        seen.resize(needed, false);
        let mut distinct = 0;
        for row in 0..self.rows {
            let mut code = 0usize;
            for (bit, &p) in points.iter().enumerate() {
                if self.contains(row, p) {
                    code |= 1 << bit;
                }
            }
            if !seen[code] {
                seen[code] = true;
                distinct += 1;
                if distinct == needed {
                    return true;
                }
            }
        }
        false
    }
}

/// Exact VC dimension by exhaustive shattering checks.
///
/// Shattered sets are grown level by level; a candidate of size `t + 1` is
/// only tested when all of its `t`-subsets are shattered. With `cap`, sizes
/// up to `cap + 1` are searched and a shattered set of size `cap + 1` is
/// reported as [`VcDimension::AtLeast`]. Without `cap` the system may have at
/// most [`MAX_UNCAPPED_VC_POINTS`] points.
pub fn vc_dimension_exact(system: &SetSystem, cap: Option<usize>) -> Result<VcDimension> {
    let m = system.num_points();
    if cap.is_none() && m > MAX_UNCAPPED_VC_POINTS {
        return Err(Error::TooLarge(format!(
            "exact VC dimension on {m} points needs a cap (limit {MAX_UNCAPPED_VC_POINTS} uncapped)"
        )));
    }
    if system.num_ranges() == 0 {
        return Ok(VcDimension::Exact(0));
    }
    let max_size = cap.map_or(m, |c| (c + 1).min(m));
    // Shattering t points needs 2^t distinct rows.
    let row_limit = usize::BITS - 1 - system.num_ranges().leading_zeros();
    let max_size = max_size.min(row_limit as usize);

    let rows = BitRows::new(system);
    let mut seen = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..m)
        .map(|p| vec![p])
        .filter(|s| rows.is_shattered(s, &mut seen))
        .collect();
    let singles: Vec<usize> = level.iter().map(|s| s[0]).collect();
    let mut size = if level.is_empty() { 0 } else { 1 };

    while !level.is_empty() && size < max_size {
        let shattered: HashSet<&[usize]> = level.iter().map(Vec::as_slice).collect();
        let mut next = Vec::new();
        let mut probe = Vec::with_capacity(size + 1);
        for set in &level {
            let last = *set.last().expect("nonempty shattered set");
            for &p in singles.iter().filter(|&&p| p > last) {
                let mut candidate = set.clone();
                candidate.push(p);
                let subsets_ok = (0..size).all(|skip| {
                    probe.clear();
                    probe.extend(
                        candidate
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != skip)
                            .map(|(_, &q)| q),
                    );
                    shattered.contains(probe.as_slice())
                });
                if subsets_ok && rows.is_shattered(&candidate, &mut seen) {
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
        size += 1;
    }

    match cap {
        Some(c) if size > c => Ok(VcDimension::AtLeast(size)),
        _ => Ok(VcDimension::Exact(size)),
    }
}

/// Number of distinct traces of depth at most `k` on the columns `prefix`
/// of a permutation, with each range given by the sorted positions of its
/// points in that permutation.
fn cells_on_prefix(positions: &[Vec<usize>], prefix: usize, k: usize) -> usize {
    let mut cells: HashSet<&[usize]> = HashSet::new();
    for pos in positions {
        let depth = pos.partition_point(|&q| q < prefix);
        if depth <= k {
            cells.insert(&pos[..depth]);
        }
    }
    cells.len()
}

fn max_cells_over_prefixes(system: &SetSystem, order: &[usize], l: usize, k: usize) -> usize {
    let mut rank = vec![usize::MAX; system.num_points()];
    for (i, &p) in order.iter().enumerate() {
        rank[p] = i;
    }
    let positions: Vec<Vec<usize>> = system
        .ranges()
        .iter()
        .map(|range| {
            let mut pos: Vec<usize> = range.iter().map(|&p| rank[p]).collect();
            pos.sort_unstable();
            pos
        })
        .collect();
    (1..=l)
        .map(|prefix| cells_on_prefix(&positions, prefix, k))
        .max()
        .unwrap_or(0)
}

/// Lower-bound estimate of the shallow cell complexity value at `(l, k)`.
///
/// Evaluates the identity column order and `trials` random orders; for each
/// order every prefix of length `1..=l` is a candidate submatrix and the
/// maximum cell count is returned. Orders do not depend on `l` or `k`, so
/// the estimate is nondecreasing in both. With `weights`, random orders
/// favour heavy columns (zero-weight columns go last).
pub fn count_shallow_cells(
    system: &SetSystem,
    weights: Option<&WeightVector>,
    l: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let m = system.num_points();
    if l > m {
        return Err(Error::InvalidArgument(format!(
            "submatrix width {l} exceeds {m} points"
        )));
    }
    if let Some(w) = weights {
        if w.len() != m {
            return Err(Error::WeightLength {
                expected: m,
                got: w.len(),
            });
        }
    }
    let identity: Vec<usize> = (0..m).collect();
    let mut best = max_cells_over_prefixes(system, &identity, l, k);
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let order = match weights {
            None => {
                let mut order = identity.clone();
                order.shuffle(&mut rng);
                order
            }
            Some(w) => weighted_order(w, &mut rng),
        };
        best = best.max(max_cells_over_prefixes(system, &order, l, k));
    }
    Ok(best)
}

/// Weighted random permutation by exponential keys (Efraimidis–Spirakis).
fn weighted_order(weights: &WeightVector, rng: &mut impl Rng) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = weights
        .as_slice()
        .iter()
        .enumerate()
        .map(|(j, &w)| {
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let key = if w > 0.0 {
                u.ln() / w
            } else {
                f64::NEG_INFINITY
            };
            (key, j)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, j)| j).collect()
}

/// All exact shallow-cell values `table[l][k]` for `1 <= k <= l <= m`,
/// enumerating every nonempty column subset. Requires
/// `m <= MAX_EXHAUSTIVE_CELL_POINTS`. Entry `[l][k]` is the maximum over
/// subsets of at most `l` columns; `k = 0` and `l = 0` entries are filled too.
pub fn shallow_cell_table(system: &SetSystem) -> Result<Vec<Vec<usize>>> {
    let m = system.num_points();
    if m > MAX_EXHAUSTIVE_CELL_POINTS {
        return Err(Error::TooLarge(format!(
            "exhaustive cell counting on {m} points (limit {MAX_EXHAUSTIVE_CELL_POINTS})"
        )));
    }
    let masks: Vec<u32> = system
        .ranges()
        .iter()
        .map(|r| r.iter().fold(0u32, |acc, &p| acc | 1 << p))
        .collect();
    // exact[size][k]: best over subsets of exactly `size` columns.
    let mut exact = vec![vec![0usize; m + 1]; m + 1];
    let mut traces: Vec<u32> = Vec::with_capacity(masks.len());
    for subset in 1u32..(1u32 << m) {
        let size = subset.count_ones() as usize;
        traces.clear();
        traces.extend(masks.iter().map(|&r| r & subset));
        traces.sort_unstable();
        traces.dedup();
        let mut by_depth = vec![0usize; size + 1];
        for t in &traces {
            by_depth[t.count_ones() as usize] += 1;
        }
        let mut running = 0;
        for k in 0..=m {
            if k <= size {
                running += by_depth[k];
            }
            exact[size][k] = exact[size][k].max(running);
        }
    }
    let mut table = vec![vec![0usize; m + 1]; m + 1];
    for l in 1..=m {
        for k in 0..=m {
            table[l][k] = table[l - 1][k].max(exact[l][k]);
        }
    }
    Ok(table)
}

/// Exact shallow-cell value at `(l, k)` for small systems.
pub fn count_shallow_cells_exhaustive(system: &SetSystem, l: usize, k: usize) -> Result<usize> {
    let m = system.num_points();
    if l > m {
        return Err(Error::InvalidArgument(format!(
            "submatrix width {l} exceeds {m} points"
        )));
    }
    let table = shallow_cell_table(system)?;
    Ok(table[l][k.min(m)])
}

/// A function φ(l, k) bounding the number of shallow cells. Arguments are
/// real because callers evaluate it at expressions like `8d / (βε)`.
pub trait ShallowCellBound {
    fn eval(&self, l: f64, k: f64) -> f64;
}

/// φ(l, k) = c · l^a · k^b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SccFamily {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SccFamily {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Parses `"a,b,c"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let values: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad phi '{text}': {e}")))?;
        match values.as_slice() {
            &[a, b, c] if values.iter().all(|v| v.is_finite()) => Ok(Self { a, b, c }),
            _ => Err(Error::InvalidArgument(format!(
                "phi must be three finite numbers a,b,c, got '{text}'"
            ))),
        }
    }
}

impl ShallowCellBound for SccFamily {
    fn eval(&self, l: f64, k: f64) -> f64 {
        self.c * l.powf(self.a) * k.powf(self.b)
    }
}

impl std::fmt::Display for SccFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

/// Measured φ from [`shallow_cell_table`]. Real arguments are rounded up
/// and clamped to the instance size, which keeps the value an upper bound
/// of the true cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct SccProfile {
    table: Vec<Vec<usize>>,
}

impl SccProfile {
    pub fn measure(system: &SetSystem) -> Result<Self> {
        Ok(Self {
            table: shallow_cell_table(system)?,
        })
    }

    pub fn num_points(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, l: usize, k: usize) -> usize {
        let m = self.num_points();
        self.table[l.min(m)][k.min(m)]
    }
}

impl ShallowCellBound for SccProfile {
    fn eval(&self, l: f64, k: f64) -> f64 {
        let to_index = |x: f64| -> usize {
            if x.is_nan() || x <= 0.0 {
                0
            } else if x >= usize::MAX as f64 {
                usize::MAX
            } else {
                x.ceil() as usize
            }
        };
        self.get(to_index(l), to_index(k)) as f64
    }
}
