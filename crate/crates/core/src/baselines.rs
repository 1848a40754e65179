//! Reference solvers: classic greedy and an exact branch-and-bound.

use crate::error::{Error, Result};
use crate::lp::{solve_lp, DEFAULT_PIVOT_TOL};
use crate::system::SetSystem;

/// Repeatedly takes the point hitting the most unhit ranges (lowest index
/// on ties). Returns the chosen points sorted.
pub fn greedy_hitting_set(system: &SetSystem) -> Result<Vec<usize>> {
    system.ensure_nonempty_ranges()?;
    let incidence = system.point_incidence();
    let mut gain: Vec<usize> = incidence.iter().map(Vec::len).collect();
    let mut hit = vec![false; system.num_ranges()];
    let mut remaining = system.num_ranges();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let (best, _) =
            gain.iter().enumerate().fold(
                (usize::MAX, 0),
                |acc, (j, &g)| if g > acc.1 { (j, g) } else { acc },
            );
        chosen.push(best);
        for &r in &incidence[best] {
            if !hit[r] {
                hit[r] = true;
                remaining -= 1;
                for &p in &system.ranges()[r] {
                    gain[p] -= 1;
                }
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

struct Search<'a> {
    system: &'a SetSystem,
    incidence: Vec<Vec<usize>>,
    hits: Vec<u32>,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    /// Only solutions strictly smaller than this are of interest.
    limit: usize,
    /// No solution is smaller than this; reaching it ends the search.
    floor: usize,
    marks: Vec<bool>,
}

impl Search<'_> {
    fn available(&self, range: usize) -> impl Iterator<Item = usize> + '_ {
        self.system.ranges()[range]
            .iter()
            .copied()
            .filter(|&p| !self.excluded[p])
    }

    fn select(&mut self, p: usize) {
        self.chosen.push(p);
        for &r in &self.incidence[p] {
            self.hits[r] += 1;
        }
    }

    fn deselect(&mut self) {
        let p = self.chosen.pop().expect("deselect without select");
        for &r in &self.incidence[p] {
            self.hits[r] -= 1;
        }
    }

    /// Disjoint unhit ranges each need their own point.
    fn packing_bound(&mut self, unhit: &[(usize, usize)]) -> usize {
        self.marks.iter_mut().for_each(|m| *m = false);
        let mut count = 0;
        for &(_, r) in unhit {
            let range = &self.system.ranges()[r];
            if range.iter().all(|&p| self.excluded[p] || !self.marks[p]) {
                for &p in range {
                    self.marks[p] = true;
                }
                count += 1;
            }
        }
        count
    }

    fn run(&mut self) {
        let mut unhit: Vec<(usize, usize)> = (0..self.system.num_ranges())
            .filter(|&r| self.hits[r] == 0)
            .map(|r| (self.available(r).count(), r))
            .collect();
        if unhit.is_empty() {
            let mut solution = self.chosen.clone();
            solution.sort_unstable();
            self.limit = solution.len();
            self.best = Some(solution);
            return;
        }
        if unhit.iter().any(|&(size, _)| size == 0) {
            return;
        }
        unhit.sort_unstable();
        if self.chosen.len() + self.packing_bound(&unhit) >= self.limit {
            return;
        }
        let branch_range = unhit[0].1;
        let candidates: Vec<usize> = self.available(branch_range).collect();
        let mut newly_excluded = Vec::new();
        for p in candidates {
            self.select(p);
            self.run();
            self.deselect();
            // Later branches never use p again.
            self.excluded[p] = true;
            newly_excluded.push(p);
            if self.limit <= self.floor || self.chosen.len() + 1 >= self.limit {
                break;
            }
        }
        for p in newly_excluded {
            self.excluded[p] = false;
        }
    }
}

/// Minimum-cardinality hitting set by branch-and-bound.
///
/// Branches on the unhit range with the fewest available points (lowest
/// index on ties), each branch excluding the points tried before it. The
/// greedy solution is the initial incumbent, the LP value bounds the root
/// and a disjoint-range packing bounds every node. Fails with
/// [`Error::SizeCapExceeded`] when no hitting set of size `<= size_cap` exists.
pub fn exact_hitting_set(system: &SetSystem, size_cap: usize) -> Result<Vec<usize>> {
    system.ensure_nonempty_ranges()?;
    if system.num_ranges() == 0 {
        return Ok(Vec::new());
    }
    let lp = solve_lp(system, DEFAULT_PIVOT_TOL)?;
    let root_bound = (lp.z_star - 1e-6).ceil() as usize;
    if root_bound > size_cap {
        return Err(Error::SizeCapExceeded { cap: size_cap });
    }
    let greedy = greedy_hitting_set(system)?;
    if greedy.len() <= root_bound {
        return Ok(greedy);
    }
    let (best, limit) = if greedy.len() <= size_cap {
        (Some(greedy.clone()), greedy.len())
    } else {
        (None, size_cap + 1)
    };
    let mut search = Search {
        system,
        incidence: system.point_incidence(),
        hits: vec![0; system.num_ranges()],
        excluded: vec![false; system.num_points()],
        chosen: Vec::new(),
        best,
        limit,
        floor: root_bound,
        marks: vec![false; system.num_points()],
    };
    search.run();
    search.best.ok_or(Error::SizeCapExceeded { cap: size_cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SetSystem {
        SetSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_hitting_set(&triangle()).unwrap().len(), 2);
        let singletons = SetSystem::new(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(greedy_hitting_set(&singletons).unwrap(), vec![0, 1]);
        let single = SetSystem::new(3, vec![vec![1, 2]]).unwrap();
        assert_eq!(greedy_hitting_set(&single).unwrap(), vec![1]);
        let empty = SetSystem::new(2, vec![vec![0], vec![]]).unwrap();
        assert_eq!(
            greedy_hitting_set(&empty),
            Err(Error::EmptyRange { range: 1 })
        );
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_hitting_set(&triangle(), 5).unwrap().len(), 2);
        let chain: Vec<Vec<usize>> = (0..6).map(|i| vec![2 * i, 2 * i + 1]).collect();
        let chain = SetSystem::new(12, chain).unwrap();
        assert_eq!(exact_hitting_set(&chain, 10).unwrap().len(), 6);
        assert_eq!(
            exact_hitting_set(&chain, 5),
            Err(Error::SizeCapExceeded { cap: 5 })
        );
    }

    #[test]
    fn exact_beats_greedy_where_greedy_is_suboptimal() {
        // Point 2 hits four ranges, so greedy takes it first and then still
        // needs points 0 and 1; {0, 1} alone hits everything.
        let s = SetSystem::new(
            3,
            vec![
                vec![0, 2],
                vec![0, 2],
                vec![0],
                vec![1, 2],
                vec![1, 2],
                vec![1],
            ],
        )
        .unwrap();
        assert_eq!(greedy_hitting_set(&s).unwrap(), vec![0, 1, 2]);
        assert_eq!(exact_hitting_set(&s, 5).unwrap(), vec![0, 1]);
    }

    #[test]
    fn cap_between_optimum_and_greedy() {
        // Optimum 3 (three disjoint pairs), so cap 3 succeeds and cap 2 fails.
        let s = SetSystem::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        assert_eq!(exact_hitting_set(&s, 3).unwrap().len(), 3);
        assert!(exact_hitting_set(&s, 2).is_err());
    }
}
