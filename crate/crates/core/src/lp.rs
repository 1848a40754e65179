//! Fractional hitting set LP.
//!
//! The covering program `min 1ᵀy  s.t.  Ay ≥ 1, y ≥ 0` is solved through its
//! packing dual `max 1ᵀx  s.t.  Aᵀx ≤ 1, x ≥ 0`, whose all-slack basis is
//! feasible, so no phase one is needed. The covering solution is read off
//! the reduced costs of the slack columns. Pivoting uses Bland's rule.
//!
//! Every returned solution is certified: `y` is covering-feasible, `x` is
//! packing-feasible and both objectives agree, which proves optimality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::system::{SetSystem, WeightVector};

pub const DEFAULT_PIVOT_TOL: f64 = 1e-9;

/// Feasibility slack allowed when certifying a solution.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    /// Optimal fractional hitting set value.
    pub z_star: f64,
    /// `1 / z_star`, the optimum of the normalized max-ε program.
    pub eps_star: f64,
    /// `y_star / z_star`.
    pub mu_star: WeightVector,
    /// Optimal covering solution, one entry per point.
    pub y_star: Vec<f64>,
    /// Optimal packing solution, one entry per range.
    pub range_duals: Vec<f64>,
    pub pivots: usize,
}

impl LpSolution {
    /// μ*(R) for every range.
    pub fn range_weights(&self, system: &SetSystem) -> Vec<f64> {
        system
            .ranges()
            .iter()
            .map(|r| self.mu_star.weight_of_set(r))
            .collect()
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// Row-major, `rows + 1` rows of `cols + 1` entries; the last row holds
    /// reduced costs and the last column the right-hand side.
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    fn objective_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let width = self.cols + 1;
        let inv = 1.0 / self.at(pr, pc);
        for c in 0..width {
            self.data[pr * width + c] *= inv;
        }
        self.data[pr * width + pc] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr * width..(pr + 1) * width].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * width + pc];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[r * width..(r + 1) * width];
            for (cell, &p) in row.iter_mut().zip(&pivot_row) {
                *cell -= factor * p;
            }
            row[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }
}

/// Solves the LP relaxation and converts it to `(ε*, μ*, z*)`.
pub fn solve_lp(system: &SetSystem, tol: f64) -> Result<LpSolution> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "pivot tolerance {tol} outside (0, 1e-3)"
        )));
    }
    if let Some(range) = system.ranges().iter().position(Vec::is_empty) {
        return Err(Error::Infeasible(format!("range {range} is empty")));
    }
    let n = system.num_ranges();
    let m = system.num_points();
    if n == 0 {
        return Err(Error::InvalidArgument("instance has no ranges".into()));
    }

    // Columns: x_0..x_{n-1} (ranges), then slacks s_0..s_{m-1} (points).
    let cols = n + m;
    let width = cols + 1;
    let mut data = vec![0.0; (m + 1) * width];
    for (i, range) in system.ranges().iter().enumerate() {
        for &j in range {
            data[j * width + i] = 1.0;
        }
    }
    for j in 0..m {
        data[j * width + n + j] = 1.0;
        data[j * width + cols] = 1.0;
    }
    // Reduced costs for max 1ᵀx at the slack basis: c̄ = c = 1 on x, 0 on s.
    for i in 0..n {
        data[m * width + i] = 1.0;
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        data,
        basis: (n..n + m).collect(),
    };

    let max_pivots = 50 * (n + m) + 1000;
    let mut pivots = 0;
    loop {
        let obj = tab.objective_row();
        let Some(entering) = (0..cols).find(|&c| tab.at(obj, c) > tol) else {
            break;
        };
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..m {
            let coef = tab.at(r, entering);
            if coef > tol {
                let ratio = tab.at(r, cols) / coef;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= tol * (1.0 + best_ratio.abs());
                        if ratio < best_ratio && !tie || tie && tab.basis[r] < tab.basis[best] {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
        }
        let Some((pr, _)) = leaving else {
            // Cannot happen with nonempty ranges: every x column has a positive entry.
            return Err(Error::Infeasible(format!(
                "packing dual unbounded along range {entering}"
            )));
        };
        tab.pivot(pr, entering);
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numerical(format!(
                "no convergence after {max_pivots} pivots"
            )));
        }
    }

    let obj = tab.objective_row();
    let mut y_star: Vec<f64> = (0..m).map(|j| -tab.at(obj, n + j)).collect();
    let mut range_duals = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            range_duals[b] = tab.at(r, cols);
        }
    }
    certify_and_clean(system, &mut y_star, &mut range_duals)?;

    let z_star: f64 = y_star.iter().sum();
    let mu_star = WeightVector::new(y_star.clone())
        .map_err(|e| Error::Numerical(format!("covering solution not normalizable: {e}")))?;
    Ok(LpSolution {
        z_star,
        eps_star: 1.0 / z_star,
        mu_star,
        y_star,
        range_duals,
        pivots,
    })
}

fn certify_and_clean(system: &SetSystem, y: &mut [f64], x: &mut [f64]) -> Result<()> {
    for (j, v) in y.iter_mut().enumerate() {
        if *v < -FEASIBILITY_TOL || !v.is_finite() {
            return Err(Error::Numerical(format!("y[{j}] = {v} is negative")));
        }
        *v = v.clamp(0.0, 1.0);
    }
    for (i, v) in x.iter_mut().enumerate() {
        if *v < -FEASIBILITY_TOL || !v.is_finite() {
            return Err(Error::Numerical(format!("x[{i}] = {v} is negative")));
        }
        *v = v.max(0.0);
    }
    for (i, range) in system.ranges().iter().enumerate() {
        let cover: f64 = range.iter().map(|&j| y[j]).sum();
        if cover < 1.0 - FEASIBILITY_TOL {
            return Err(Error::Numerical(format!(
                "range {i} covered only {cover} by the LP solution"
            )));
        }
    }
    let mut load = vec![0.0; system.num_points()];
    for (i, range) in system.ranges().iter().enumerate() {
        for &j in range {
            load[j] += x[i];
        }
    }
    if let Some((j, l)) = load
        .iter()
        .enumerate()
        .find(|(_, &l)| l > 1.0 + FEASIBILITY_TOL)
    {
        return Err(Error::Numerical(format!("point {j} overloaded to {l}")));
    }
    let primal: f64 = y.iter().sum();
    let dual: f64 = x.iter().sum();
    if (primal - dual).abs() > FEASIBILITY_TOL * primal.max(1.0) {
        return Err(Error::Numerical(format!(
            "duality gap: covering {primal} vs packing {dual}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(ranges: Vec<Vec<usize>>, m: usize) -> LpSolution {
        solve_lp(&SetSystem::new(m, ranges).unwrap(), DEFAULT_PIVOT_TOL).unwrap()
    }

    #[test]
    fn single_point() {
        let lp = solve(vec![vec![0]], 1);
        assert!((lp.z_star - 1.0).abs() < 1e-12);
        assert!((lp.eps_star - 1.0).abs() < 1e-12);
        assert_eq!(lp.mu_star.as_slice(), &[1.0]);
    }

    #[test]
    fn triangle() {
        // Vertex enumeration of the 3-variable LP: the integral vertices
        // (two coordinates at 1) cost 2, the fractional vertex (½,½,½) costs 1.5.
        let lp = solve(vec![vec![0, 1], vec![1, 2], vec![0, 2]], 3);
        assert!((lp.z_star - 1.5).abs() < 1e-9);
        assert!((lp.eps_star - 2.0 / 3.0).abs() < 1e-9);
        for j in 0..3 {
            assert!((lp.y_star[j] - 0.5).abs() < 1e-9);
            assert!((lp.mu_star.get(j) - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn disjoint_singletons() {
        let lp = solve(vec![vec![0], vec![1]], 2);
        assert!((lp.z_star - 2.0).abs() < 1e-12);
        assert!((lp.eps_star - 0.5).abs() < 1e-12);
        assert_eq!(lp.mu_star.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn duplicate_ranges_leave_value_unchanged() {
        let a = solve(vec![vec![0, 1], vec![1, 2], vec![0, 2]], 3);
        let b = solve(vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![1, 2]], 3);
        assert!((a.z_star - b.z_star).abs() < 1e-9);
    }

    #[test]
    fn unused_points_get_no_weight() {
        let lp = solve(vec![vec![1], vec![1, 2]], 4);
        assert!((lp.z_star - 1.0).abs() < 1e-12);
        assert_eq!(lp.mu_star.support(), vec![1]);
    }

    #[test]
    fn errors() {
        let s = SetSystem::new(2, vec![vec![0], vec![]]).unwrap();
        assert!(matches!(solve_lp(&s, 1e-9), Err(Error::Infeasible(_))));
        let s = SetSystem::new(2, vec![]).unwrap();
        assert!(solve_lp(&s, 1e-9).is_err());
        let s = SetSystem::new(1, vec![vec![0]]).unwrap();
        assert!(solve_lp(&s, 0.0).is_err());
    }
}
