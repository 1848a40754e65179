//! Geometric instance generators.
//!
//! Points are drawn uniformly in the unit square (on the x-axis for
//! intervals) and every range is the closed containment set of one shape.
//! Each class carries a VC-dimension bound and a shallow-cell family
//! `φ(l, k) = c · l^a · k^b` whose constant `c` was calibrated on this
//! generator by exhaustive cell counting (see [`calibrate_scc_constant`]).

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cells::{shallow_cell_table, SccFamily, MAX_EXHAUSTIVE_CELL_POINTS};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::system::SetSystem;

/// Boundary slack for closed containment.
pub const CONTAINMENT_TOL: f64 = 1e-12;

/// Largest `l` used when calibrating and checking φ constants.
pub const CALIBRATION_MAX_WIDTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeClass {
    Discs,
    Rects,
    Halfplanes,
    Intervals,
    Random,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 5] = [
        ShapeClass::Discs,
        ShapeClass::Rects,
        ShapeClass::Halfplanes,
        ShapeClass::Intervals,
        ShapeClass::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeClass::Discs => "discs",
            ShapeClass::Rects => "rects",
            ShapeClass::Halfplanes => "halfplanes",
            ShapeClass::Intervals => "intervals",
            ShapeClass::Random => "random",
        }
    }

    /// Upper bound on the VC dimension of any system this class generates
    /// with `num_ranges` ranges. Random systems cannot shatter more than
    /// `log2(n)` points.
    pub fn vc_bound(self, num_ranges: usize) -> usize {
        match self {
            ShapeClass::Discs | ShapeClass::Halfplanes => 3,
            ShapeClass::Rects => 4,
            ShapeClass::Intervals => 2,
            ShapeClass::Random => (usize::BITS - 1 - num_ranges.max(2).leading_zeros()) as usize,
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown shape class '{s}'")))
    }
}

// Calibrated φ constants. The largest `count / (l^a k^b)` over
// `1 <= k <= l <= 10` on 200 seeds of 12-point, 1500-shape instances with
// default parameters was 16 (discs), 2 (rects), 10.67 (halfplanes) and 5.4
// (intervals). Stored values add headroom; for intervals 6 is the exact
// worst case `(1 + l(l+1)/2) / l` at `l = 10`.
pub const DISC_PHI_C: f64 = 20.0;
pub const RECT_PHI_C: f64 = 3.0;
pub const HALFPLANE_PHI_C: f64 = 12.0;
pub const INTERVAL_PHI_C: f64 = 6.0;
/// Random systems use `(1, d, 2)`: depth-≤k traces on `l` columns number at
/// most `Σ_{i ≤ min(k, d)} C(l, i)`, which is below `2 · l · k^d`.
pub const RANDOM_PHI_C: f64 = 2.0;

/// φ family for a class; `d` is only used by [`ShapeClass::Random`].
pub fn scc_family(class: ShapeClass, d: usize) -> SccFamily {
    match class {
        ShapeClass::Discs => SccFamily::new(0.0, 1.0, DISC_PHI_C),
        ShapeClass::Rects => SccFamily::new(1.0, 2.0, RECT_PHI_C),
        ShapeClass::Intervals => SccFamily::new(1.0, 0.0, INTERVAL_PHI_C),
        ShapeClass::Halfplanes => SccFamily::new(0.0, 1.0, HALFPLANE_PHI_C),
        ShapeClass::Random => SccFamily::new(1.0, d as f64, RANDOM_PHI_C),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disc {
        center: [f64; 2],
        radius: f64,
    },
    Rect {
        min: [f64; 2],
        max: [f64; 2],
    },
    /// `a·x + b·y <= c`.
    Halfplane {
        a: f64,
        b: f64,
        c: f64,
    },
    /// `[lo, hi]` on the x coordinate.
    Interval {
        lo: f64,
        hi: f64,
    },
}

/// Closed containment with [`CONTAINMENT_TOL`] slack on the boundary.
pub fn containment(shape: &Shape, point: [f64; 2]) -> bool {
    let [x, y] = point;
    match *shape {
        Shape::Disc { center, radius } => {
            (x - center[0]).hypot(y - center[1]) <= radius + CONTAINMENT_TOL
        }
        Shape::Rect { min, max } => {
            x >= min[0] - CONTAINMENT_TOL
                && x <= max[0] + CONTAINMENT_TOL
                && y >= min[1] - CONTAINMENT_TOL
                && y <= max[1] + CONTAINMENT_TOL
        }
        Shape::Halfplane { a, b, c } => a * x + b * y <= c + CONTAINMENT_TOL,
        Shape::Interval { lo, hi } => x >= lo - CONTAINMENT_TOL && x <= hi + CONTAINMENT_TOL,
    }
}

/// Distribution parameters shared by all classes; each class reads its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub radius: (f64, f64),
    pub side: (f64, f64),
    pub interval_len: (f64, f64),
    /// Inclusion probability of each point in a random range.
    pub density: f64,
    /// Attempts per range before giving up on drawing a nonempty one.
    pub retry_cap: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            radius: (0.05, 0.3),
            side: (0.05, 0.5),
            interval_len: (0.02, 0.3),
            density: 0.2,
            retry_cap: 1000,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        let span_ok =
            |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi;
        if !span_ok(self.radius) || !span_ok(self.side) || !span_ok(self.interval_len) {
            return Err(Error::InvalidArgument(
                "size ranges must satisfy 0 <= min <= max".into(),
            ));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "density {} outside (0, 1]",
                self.density
            )));
        }
        if self.retry_cap == 0 {
            return Err(Error::InvalidArgument("retry cap must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryInstance {
    pub class: ShapeClass,
    pub points: Vec<[f64; 2]>,
    /// Empty for [`ShapeClass::Random`], whose ranges are not shapes.
    pub shapes: Vec<Shape>,
    pub system: SetSystem,
}

impl GeometryInstance {
    pub fn vc_bound(&self) -> usize {
        self.class.vc_bound(self.system.num_ranges())
    }

    pub fn scc_family(&self) -> SccFamily {
        scc_family(self.class, self.vc_bound())
    }
}

fn uniform_in(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

fn draw_shape(class: ShapeClass, params: &GenParams, rng: &mut impl Rng) -> Shape {
    match class {
        ShapeClass::Discs => Shape::Disc {
            center: [rng.gen(), rng.gen()],
            radius: uniform_in(rng, params.radius),
        },
        ShapeClass::Rects => {
            let min = [rng.gen::<f64>(), rng.gen::<f64>()];
            let w = uniform_in(rng, params.side);
            let h = uniform_in(rng, params.side);
            Shape::Rect {
                min,
                max: [min[0] + w, min[1] + h],
            }
        }
        ShapeClass::Halfplanes => {
            let theta = rng.gen_range(0.0..TAU);
            let (a, b) = (theta.cos(), theta.sin());
            let q = [rng.gen::<f64>(), rng.gen::<f64>()];
            Shape::Halfplane {
                a,
                b,
                c: a * q[0] + b * q[1],
            }
        }
        ShapeClass::Intervals => {
            let lo = rng.gen::<f64>();
            Shape::Interval {
                lo,
                hi: lo + uniform_in(rng, params.interval_len),
            }
        }
        ShapeClass::Random => unreachable!("random ranges are not shapes"),
    }
}

fn contained_points(shape: &Shape, points: &[[f64; 2]]) -> Vec<usize> {
    (0..points.len())
        .filter(|&j| containment(shape, points[j]))
        .collect()
}

/// Generates an instance; the result is a pure function of the arguments.
pub fn gen_instance(
    class: ShapeClass,
    m: usize,
    n: usize,
    seed: u64,
    params: &GenParams,
) -> Result<GeometryInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least one point and one range, got m={m}, n={n}"
        )));
    }
    params.validate()?;
    let mut rng = stream_rng(seed, 0);
    let points: Vec<[f64; 2]> = (0..m)
        .map(|_| match class {
            ShapeClass::Intervals => [rng.gen(), 0.0],
            _ => [rng.gen(), rng.gen()],
        })
        .collect();

    let mut shapes = Vec::with_capacity(n);
    let mut ranges = Vec::with_capacity(n);
    for r in 0..n {
        let mut attempt = 0;
        let range = loop {
            if attempt == params.retry_cap {
                return Err(Error::RetryCapExceeded {
                    range: r,
                    retries: params.retry_cap,
                });
            }
            attempt += 1;
            if class == ShapeClass::Random {
                let range: Vec<usize> = (0..m).filter(|_| rng.gen_bool(params.density)).collect();
                if !range.is_empty() {
                    break range;
                }
            } else {
                let shape = draw_shape(class, params, &mut rng);
                let range = contained_points(&shape, &points);
                if !range.is_empty() {
                    shapes.push(shape);
                    break range;
                }
            }
        };
        ranges.push(range);
    }
    let system = SetSystem::new(m, ranges)?;
    Ok(GeometryInstance {
        class,
        points,
        shapes,
        system,
    })
}

/// Re-derives the set system of explicit shapes.
pub fn derive_system(points: &[[f64; 2]], shapes: &[Shape]) -> Result<SetSystem> {
    SetSystem::new(
        points.len(),
        shapes.iter().map(|s| contained_points(s, points)).collect(),
    )
}

/// `m` evenly spaced points on a line with one interval per contiguous run.
pub fn all_contiguous_intervals(m: usize) -> Result<GeometryInstance> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one point".into()));
    }
    let points: Vec<[f64; 2]> = (0..m).map(|j| [j as f64, 0.0]).collect();
    let mut shapes = Vec::new();
    for lo in 0..m {
        for hi in lo..m {
            shapes.push(Shape::Interval {
                lo: lo as f64,
                hi: hi as f64,
            });
        }
    }
    let system = derive_system(&points, &shapes)?;
    Ok(GeometryInstance {
        class: ShapeClass::Intervals,
        points,
        shapes,
        system,
    })
}

/// Largest `count(l, k) / (l^a · k^b)` over `1 <= k <= l <= max_width`
/// and the given seeds, counting cells exhaustively on `m`-point instances.
pub fn calibrate_scc_constant(
    class: ShapeClass,
    m: usize,
    n: usize,
    seeds: impl IntoIterator<Item = u64>,
    params: &GenParams,
    max_width: usize,
) -> Result<f64> {
    if m > MAX_EXHAUSTIVE_CELL_POINTS {
        return Err(Error::TooLarge(format!(
            "calibration needs m <= {MAX_EXHAUSTIVE_CELL_POINTS}"
        )));
    }
    let mut worst: f64 = 0.0;
    for seed in seeds {
        let inst = gen_instance(class, m, n, seed, params)?;
        let shape = inst.scc_family();
        let table = shallow_cell_table(&inst.system)?;
        for l in 1..=max_width.min(m) {
            for k in 1..=l {
                let denom = (l as f64).powf(shape.a) * (k as f64).powf(shape.b);
                worst = worst.max(table[l][k] as f64 / denom);
            }
        }
    }
    Ok(worst)
}
