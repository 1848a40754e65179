//! Sparse point/range incidence structure, point weights and projections.
//!
//! A [`SetSystem`] stores the rows of the incidence matrix as sorted lists
//! of point indices. Intersections and symmetric differences are computed
//! by merging sorted rows.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a [`WeightVector`].
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    num_points: usize,
    ranges: Vec<Vec<usize>>,
}

impl SetSystem {
    /// Builds a system from rows that must already be strictly increasing.
    pub fn new(num_points: usize, ranges: Vec<Vec<usize>>) -> Result<Self> {
        for (r, range) in ranges.iter().enumerate() {
            if range.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsortedRange { range: r });
            }
            if let Some(&last) = range.last() {
                if last >= num_points {
                    return Err(Error::PointOutOfBounds {
                        index: last,
                        num_points,
                    });
                }
            }
        }
        Ok(Self { num_points, ranges })
    }

    /// Sorts and deduplicates every row before validating it.
    pub fn from_unsorted(num_points: usize, mut ranges: Vec<Vec<usize>>) -> Result<Self> {
        for range in &mut ranges {
            range.sort_unstable();
            range.dedup();
        }
        Self::new(num_points, ranges)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_ranges(&self) -> usize {
        self.ranges.len()
    }

    pub fn ranges(&self) -> &[Vec<usize>] {
        &self.ranges
    }

    pub fn range(&self, index: usize) -> Result<&[usize]> {
        self.ranges
            .get(index)
            .map(Vec::as_slice)
            .ok_or(Error::RangeOutOfBounds {
                index,
                num_ranges: self.ranges.len(),
            })
    }

    /// Number of nonzeros of the incidence matrix.
    pub fn nnz(&self) -> usize {
        self.ranges.iter().map(Vec::len).sum()
    }

    /// Solver entry points call this; construction does not.
    pub fn ensure_nonempty_ranges(&self) -> Result<()> {
        match self.ranges.iter().position(Vec::is_empty) {
            Some(range) => Err(Error::EmptyRange { range }),
            None => Ok(()),
        }
    }

    /// For every point, the indices of the ranges containing it.
    pub fn point_incidence(&self) -> Vec<Vec<usize>> {
        let mut incidence = vec![Vec::new(); self.num_points];
        for (r, range) in self.ranges.iter().enumerate() {
            for &p in range {
                incidence[p].push(r);
            }
        }
        incidence
    }

    pub fn num_distinct_ranges(&self) -> usize {
        let mut rows: Vec<&[usize]> = self.ranges.iter().map(Vec::as_slice).collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len()
    }

    /// True iff every range intersects `points`.
    pub fn is_hitting_set(&self, points: &[usize]) -> bool {
        let mut member = vec![false; self.num_points];
        for &p in points {
            if p < self.num_points {
                member[p] = true;
            }
        }
        self.ranges
            .iter()
            .all(|range| range.iter().any(|&p| member[p]))
    }

    /// Σ_{j∈R} μ_j for range `range_index`.
    pub fn weight_of(&self, weights: &WeightVector, range_index: usize) -> Result<f64> {
        self.check_weights(weights)?;
        Ok(weights.weight_of_set(self.range(range_index)?))
    }

    /// Weight of the symmetric difference of two ranges.
    pub fn sym_diff_weight(&self, weights: &WeightVector, i: usize, j: usize) -> Result<f64> {
        self.check_weights(weights)?;
        let (a, b) = (self.range(i)?, self.range(j)?);
        let mut total = 0.0;
        merge_walk(a, b, |p, side| {
            if side != Side::Both {
                total += weights.get(p);
            }
        });
        Ok(total)
    }

    /// Weight of the intersection of two ranges.
    pub fn intersection_weight(&self, weights: &WeightVector, i: usize, j: usize) -> Result<f64> {
        self.check_weights(weights)?;
        let (a, b) = (self.range(i)?, self.range(j)?);
        let mut total = 0.0;
        merge_walk(a, b, |p, side| {
            if side == Side::Both {
                total += weights.get(p);
            }
        });
        Ok(total)
    }

    /// Traces of every range on `sample`, deduplicated.
    pub fn project(&self, sample: &[usize]) -> Result<Projection<'_>> {
        let mut in_sample = vec![false; self.num_points];
        for &p in sample {
            if p >= self.num_points {
                return Err(Error::PointOutOfBounds {
                    index: p,
                    num_points: self.num_points,
                });
            }
            in_sample[p] = true;
        }
        let mut sorted_sample: Vec<usize> = sample.to_vec();
        sorted_sample.sort_unstable();
        sorted_sample.dedup();

        let mut traces: Vec<Vec<usize>> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
        for (r, range) in self.ranges.iter().enumerate() {
            let trace: Vec<usize> = range.iter().copied().filter(|&p| in_sample[p]).collect();
            match lookup.get(&trace) {
                Some(&t) => members[t].push(r),
                None => {
                    lookup.insert(trace.clone(), traces.len());
                    traces.push(trace);
                    members.push(vec![r]);
                }
            }
        }
        Ok(Projection {
            base: self,
            sample: sorted_sample,
            traces,
            members,
        })
    }

    /// Sub-system made of the listed ranges over the same points.
    pub fn subsystem(&self, range_indices: &[usize]) -> Result<SetSystem> {
        let ranges = range_indices
            .iter()
            .map(|&r| self.range(r).map(<[usize]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        Ok(SetSystem {
            num_points: self.num_points,
            ranges,
        })
    }

    fn check_weights(&self, weights: &WeightVector) -> Result<()> {
        if weights.len() != self.num_points {
            return Err(Error::WeightLength {
                expected: self.num_points,
                got: weights.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Both,
}

fn merge_walk(a: &[usize], b: &[usize], mut visit: impl FnMut(usize, Side)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                visit(a[i], Side::Left);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                visit(b[j], Side::Right);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                visit(a[i], Side::Both);
                i += 1;
                j += 1;
            }
        }
    }
    a[i..].iter().for_each(|&p| visit(p, Side::Left));
    b[j..].iter().for_each(|&p| visit(p, Side::Right));
}

/// Nonnegative point weights normalized to total mass one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    /// Normalizes any nonnegative vector with positive finite sum.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if let Some((j, w)) = raw
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidWeights(format!(
                "entry {j} is {w}, weights must be finite and nonnegative"
            )));
        }
        let total: f64 = raw.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidWeights(format!(
                "weights must have a positive finite sum, got {total}"
            )));
        }
        let weights = raw.into_iter().map(|w| w / total).collect();
        Ok(Self { weights })
    }

    pub fn uniform(num_points: usize) -> Result<Self> {
        Self::new(vec![1.0; num_points])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, point: usize) -> f64 {
        self.weights[point]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// μ(S) for a set of point indices.
    pub fn weight_of_set(&self, points: &[usize]) -> f64 {
        points.iter().map(|&p| self.weights[p]).sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Points with strictly positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&j| self.weights[j] > 0.0)
            .collect()
    }

    /// Running sums used for inverse-CDF sampling.
    pub fn cumulative(&self) -> Vec<f64> {
        self.weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }
}

/// The traced system `R|_Y`, with a multiplicity map back to the base ranges.
#[derive(Debug, Clone)]
pub struct Projection<'a> {
    base: &'a SetSystem,
    sample: Vec<usize>,
    traces: Vec<Vec<usize>>,
    members: Vec<Vec<usize>>,
}

impl<'a> Projection<'a> {
    pub fn base(&self) -> &'a SetSystem {
        self.base
    }

    pub fn sample(&self) -> &[usize] {
        &self.sample
    }

    /// Distinct traces, in order of the first range producing each.
    pub fn traces(&self) -> &[Vec<usize>] {
        &self.traces
    }

    /// Base range indices mapped to each trace.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn num_traces(&self) -> usize {
        self.traces.len()
    }

    /// The traces as a set system over the base point set.
    pub fn to_system(&self) -> SetSystem {
        SetSystem {
            num_points: self.base.num_points,
            ranges: self.traces.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[track_caller]
    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} != {b}");
    }

    fn triangle() -> SetSystem {
        SetSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        assert_eq!(
            SetSystem::new(3, vec![vec![1, 0]]),
            Err(Error::UnsortedRange { range: 0 })
        );
        assert_eq!(
            SetSystem::new(3, vec![vec![0, 0]]),
            Err(Error::UnsortedRange { range: 0 })
        );
        assert!(matches!(
            SetSystem::new(2, vec![vec![0, 2]]),
            Err(Error::PointOutOfBounds { index: 2, .. })
        ));
        let s = SetSystem::from_unsorted(3, vec![vec![2, 0, 2]]).unwrap();
        assert_eq!(s.ranges(), &[vec![0, 2]]);
    }

    #[test]
    fn empty_ranges_allowed_until_solving() {
        let s = SetSystem::new(2, vec![vec![0], vec![]]).unwrap();
        assert_eq!(
            s.ensure_nonempty_ranges(),
            Err(Error::EmptyRange { range: 1 })
        );
    }

    #[test]
    fn weights_normalize() {
        let w = WeightVector::new(vec![2.0, 1.0, 1.0]).unwrap();
        assert_close(w.get(0), 0.5);
        assert_close(w.total(), 1.0);
        assert!(WeightVector::new(vec![0.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![1.0, -0.1]).is_err());
        assert!(WeightVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn weight_of_examples() {
        let s = SetSystem::new(3, vec![vec![0, 1], vec![0, 2]]).unwrap();
        let uniform = WeightVector::uniform(3).unwrap();
        assert_close(s.weight_of(&uniform, 0).unwrap(), 2.0 / 3.0);
        let w = WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_close(s.weight_of(&w, 1).unwrap(), 0.7);
        let zero_on_range = WeightVector::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert_close(s.weight_of(&zero_on_range, 0).unwrap(), 0.0);
        assert!(matches!(
            s.weight_of(&w, 5),
            Err(Error::RangeOutOfBounds { index: 5, .. })
        ));
        assert!(matches!(
            s.weight_of(&WeightVector::uniform(2).unwrap(), 0),
            Err(Error::WeightLength { .. })
        ));
    }

    #[test]
    fn sym_diff_examples() {
        let s = triangle();
        let uniform = WeightVector::uniform(3).unwrap();
        assert_close(s.sym_diff_weight(&uniform, 0, 1).unwrap(), 2.0 / 3.0);
        assert_close(s.sym_diff_weight(&uniform, 2, 2).unwrap(), 0.0);

        let s = SetSystem::new(3, vec![vec![0], vec![1, 2]]).unwrap();
        let w = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_close(s.sym_diff_weight(&w, 0, 1).unwrap(), 1.0);
        assert!(s.sym_diff_weight(&w, 0, 9).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = triangle();
        let p = s.project(&[0]).unwrap();
        // {0,1}->{0}, {1,2}->{}, {0,2}->{0}
        assert_eq!(p.traces(), &[vec![0], vec![]]);
        assert_eq!(p.multiplicities(), vec![2, 1]);
        assert_eq!(p.members(), &[vec![0, 2], vec![1]]);

        let full = s.project(&[0, 1, 2]).unwrap();
        assert_eq!(full.num_traces(), 3);

        let empty = s.project(&[]).unwrap();
        assert_eq!(empty.traces(), &[Vec::<usize>::new()]);
        assert_eq!(empty.multiplicities(), vec![3]);

        assert!(s.project(&[3]).is_err());
    }

    #[test]
    fn duplicate_ranges_share_a_trace() {
        let s = SetSystem::new(2, vec![vec![0, 1], vec![0, 1], vec![1]]).unwrap();
        assert_eq!(s.num_ranges(), 3);
        assert_eq!(s.num_distinct_ranges(), 2);
        let p = s.project(&[0, 1]).unwrap();
        assert_eq!(p.multiplicities(), vec![2, 1]);
    }

    #[test]
    fn hitting_set_check() {
        let s = triangle();
        assert!(!s.is_hitting_set(&[0]));
        assert!(s.is_hitting_set(&[0, 1]));
    }
}
