//! LP-guided weighted net finder.
//!
//! One run solves (or reuses) the LP, draws an initial sample with
//! probabilities proportional to `μ*`, then repeatedly asks an oracle for
//! an unhit range and resamples inside it until every range is hit.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::cells::{SccFamily, ShallowCellBound};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpSolution, DEFAULT_PIVOT_TOL};
use crate::rng::{stream_rng, TrialRng};
use crate::system::{SetSystem, WeightVector};

pub const DEFAULT_BETA: f64 = 0.75;
pub const DEFAULT_GAMMA: f64 = 0.01;

/// Multiplier applied to the default oracle-call cap.
pub const ORACLE_CAP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgoConfig {
    pub beta: f64,
    pub gamma: f64,
    /// Upper bound on the VC dimension.
    pub d: usize,
    pub phi: SccFamily,
    pub seed: u64,
    /// Multiplies both sampling multipliers; 1.0 runs the algorithm as stated.
    pub prob_scale: f64,
    /// `None` means `10 · ⌈expected_oracle_call_bound(z*)⌉`.
    pub max_oracle_calls: Option<u64>,
}

impl AlgoConfig {
    pub fn new(d: usize, phi: SccFamily) -> Self {
        Self {
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            d,
            phi,
            seed: 0,
            prob_scale: 1.0,
            max_oracle_calls: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (beta, gamma) = (self.beta, self.gamma);
        if !(beta > 0.0 && gamma > 0.0 && gamma <= 0.25 && beta + gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "need beta > 0, 0 < gamma <= 1/4 and beta + gamma <= 1 (beta={beta}, gamma={gamma})"
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidConfig("VC bound d must be at least 1".into()));
        }
        if !(self.prob_scale > 0.0 && self.prob_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "prob_scale must be positive, got {}",
                self.prob_scale
            )));
        }
        if self.max_oracle_calls == Some(0) {
            return Err(Error::InvalidConfig(
                "max_oracle_calls must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `24·48 / (β(3/2 − β − γ)) · z*`, the bound on expected oracle calls.
    pub fn expected_oracle_call_bound(&self, z_star: f64) -> f64 {
        24.0 * 48.0 / (self.beta * (1.5 - self.beta - self.gamma)) * z_star
    }

    pub fn oracle_cap(&self, z_star: f64) -> u64 {
        self.max_oracle_calls.unwrap_or_else(|| {
            (ORACLE_CAP_FACTOR * self.expected_oracle_call_bound(z_star).ceil()) as u64
        })
    }

    /// Constant part of the initial inclusion probability; point `j` is kept
    /// with probability `min(1, μ*_j · factor)`.
    pub fn initial_factor(&self, eps_star: f64) -> Result<f64> {
        self.validate()?;
        let d = self.d as f64;
        let shrunk = (0.75 - self.beta / 2.0) * eps_star;
        let phi = self
            .phi
            .eval(8.0 * d / (self.beta * eps_star), 48.0 * d / self.beta);
        if !(phi >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "phi evaluates to {phi} < 1 at the initial-sample arguments"
            )));
        }
        let cell_term = clamped_ln(d * d * phi * phi);
        let vc_term = d * clamped_ln(1.0 / shrunk);
        Ok(self.prob_scale * 2.0 / shrunk * cell_term.max(vc_term))
    }

    /// Constant part of the per-range resampling probability; point `j` of
    /// range `R` is kept with probability `min(1, μ*_j / μ*(R) · factor)`.
    pub fn resample_factor(&self) -> f64 {
        let d = self.d as f64;
        let m = std::f64::consts::LN_2.max(d * (1.0 / self.gamma).ln());
        self.prob_scale * 2.0 / self.gamma * m
    }

    /// `2(log 2 / γ + (d/γ) log(1/γ))`, the bound on expected points added
    /// per processed range.
    pub fn expected_additions_bound(&self) -> f64 {
        let d = self.d as f64;
        2.0 * (std::f64::consts::LN_2 / self.gamma + d / self.gamma * (1.0 / self.gamma).ln())
    }
}

/// Natural log with the argument floored at `e`, so the result is >= 1.
fn clamped_ln(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub hitting_set: Vec<usize>,
    pub oracle_calls: u64,
    pub initial_sample_size: usize,
    pub added_per_call: Vec<usize>,
    pub rng_seed: u64,
    pub trial: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Lowest-index unhit range, maintained with per-range hit counters.
///
/// The hitting set only grows, so the lowest unhit index never decreases
/// and a forward cursor finds it in amortized constant time.
#[derive(Debug, Clone)]
pub struct UnhitOracle<'a> {
    system: &'a SetSystem,
    incidence: Vec<Vec<usize>>,
    hits: Vec<u32>,
    in_set: Vec<bool>,
    members: Vec<usize>,
    cursor: usize,
}

impl<'a> UnhitOracle<'a> {
    pub fn new(system: &'a SetSystem) -> Self {
        Self {
            system,
            incidence: system.point_incidence(),
            hits: vec![0; system.num_ranges()],
            in_set: vec![false; system.num_points()],
            members: Vec::new(),
            cursor: 0,
        }
    }

    /// Adds a point; returns false if it was already present.
    pub fn insert(&mut self, point: usize) -> bool {
        if self.in_set[point] {
            return false;
        }
        self.in_set[point] = true;
        self.members.push(point);
        for &r in &self.incidence[point] {
            self.hits[r] += 1;
        }
        true
    }

    pub fn contains(&self, point: usize) -> bool {
        self.in_set[point]
    }

    pub fn next_unhit(&mut self) -> Option<usize> {
        while self.cursor < self.hits.len() && self.hits[self.cursor] > 0 {
            self.cursor += 1;
        }
        (self.cursor < self.hits.len()).then_some(self.cursor)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn system(&self) -> &'a SetSystem {
        self.system
    }

    /// Current set, sorted.
    pub fn hitting_set(&self) -> Vec<usize> {
        let mut out = self.members.clone();
        out.sort_unstable();
        out
    }
}

/// Lowest-index range missed by `points`, if any.
pub fn unhit_oracle(system: &SetSystem, points: &[usize]) -> Option<usize> {
    let mut oracle = UnhitOracle::new(system);
    for &p in points {
        oracle.insert(p);
    }
    oracle.next_unhit()
}

/// The initial weighted sample.
pub fn initial_sample(lp: &LpSolution, cfg: &AlgoConfig, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let factor = cfg.initial_factor(lp.eps_star)?;
    Ok(lp
        .mu_star
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(_, &mu)| {
            let p = (mu * factor).min(1.0);
            rng.gen::<f64>() < p
        })
        .map(|(j, _)| j)
        .collect())
}

/// Independent resample of the members of one (unhit) range.
pub fn resample_set(
    system: &SetSystem,
    lp: &LpSolution,
    cfg: &AlgoConfig,
    range_index: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let range = system.range(range_index)?;
    let range_weight = lp.mu_star.weight_of_set(range);
    if range_weight <= 0.0 {
        return Err(Error::ZeroWeightRange { range: range_index });
    }
    let factor = cfg.resample_factor() / range_weight;
    Ok(range
        .iter()
        .copied()
        .filter(|&j| {
            let p = (lp.mu_star.get(j) * factor).min(1.0);
            rng.gen::<f64>() < p
        })
        .collect())
}

/// Solves the LP and runs trial 0.
pub fn find_hitting_set(system: &SetSystem, cfg: &AlgoConfig) -> Result<RunReport> {
    let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
    run_trial(system, &lp, cfg, 0)
}

/// One run on random stream `trial` of `cfg.seed`.
pub fn run_trial(
    system: &SetSystem,
    lp: &LpSolution,
    cfg: &AlgoConfig,
    trial: u64,
) -> Result<RunReport> {
    cfg.validate()?;
    system.ensure_nonempty_ranges()?;
    if lp.mu_star.len() != system.num_points() {
        return Err(Error::WeightLength {
            expected: system.num_points(),
            got: lp.mu_star.len(),
        });
    }
    let start = Instant::now();
    let mut rng: TrialRng = stream_rng(cfg.seed, trial);
    let cap = cfg.oracle_cap(lp.z_star);

    let mut oracle = UnhitOracle::new(system);
    let initial = initial_sample(lp, cfg, &mut rng)?;
    for &p in &initial {
        oracle.insert(p);
    }

    let mut added_per_call = Vec::new();
    while let Some(range) = oracle.next_unhit() {
        if added_per_call.len() as u64 == cap {
            return Err(Error::OracleCapExceeded { cap });
        }
        let sample = resample_set(system, lp, cfg, range, &mut rng)?;
        let added = sample.into_iter().filter(|&p| oracle.insert(p)).count();
        added_per_call.push(added);
    }

    let hitting_set = oracle.hitting_set();
    if !system.is_hitting_set(&hitting_set) {
        return Err(Error::Internal("returned set misses a range".into()));
    }
    Ok(RunReport {
        hitting_set,
        oracle_calls: added_per_call.len() as u64,
        initial_sample_size: initial.len(),
        added_per_call,
        rng_seed: cfg.seed,
        trial,
        wall_time: start.elapsed(),
    })
}

/// Independent sample that is a weighted ε-net with probability >= 1 − γ
/// when `d` bounds the VC dimension.
pub fn sample_epsilon_net(
    system: &SetSystem,
    weights: &WeightVector,
    eps: f64,
    gamma: f64,
    d: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps {eps} outside (0, 1]")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma {gamma} outside (0, 1)"
        )));
    }
    if weights.len() != system.num_points() {
        return Err(Error::WeightLength {
            expected: system.num_points(),
            got: weights.len(),
        });
    }
    let factor = 2.0 / eps * (1.0 / gamma).ln().max(d as f64 * (1.0 / eps).ln());
    let mut rng = stream_rng(seed, 0);
    Ok(weights
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(_, &mu)| rng.gen::<f64>() < (mu * factor).min(1.0))
        .map(|(j, _)| j)
        .collect())
}

/// Slack when deciding whether a range is ε-heavy.
pub const HEAVY_TOL: f64 = 1e-12;

/// True iff every range of weight at least `eps · μ(X)` meets `points`.
pub fn is_epsilon_net(
    system: &SetSystem,
    weights: &WeightVector,
    eps: f64,
    points: &[usize],
) -> bool {
    let mut member = vec![false; system.num_points()];
    for &p in points {
        member[p] = true;
    }
    let threshold = eps * weights.total() - HEAVY_TOL;
    system
        .ranges()
        .iter()
        .all(|range| weights.weight_of_set(range) < threshold || range.iter().any(|&p| member[p]))
}
