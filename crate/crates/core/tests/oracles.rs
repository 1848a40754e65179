mod support;

use hitset::baselines::{exact_hitting_set, greedy_hitting_set};
use hitset::cells::{vc_dimension_exact, VcDimension};
use hitset::geom::all_contiguous_intervals;
use hitset::lp::{solve_lp, DEFAULT_PIVOT_TOL};
use hitset::system::SetSystem;

use support::*;

const LP_MATCH_TOL: f64 = 1e-6;

#[test]
fn oracle_values_on_classic_systems() {
    // Hand-derived: the triangle and 5-cycle have all-halves optimal covers,
    // the Fano plane is covered fractionally by 1/3 on every point.
    assert!((lp_value_by_vertices(&triangle()) - 1.5).abs() < 1e-12);
    assert!((lp_value_by_vertices(&five_cycle()) - 2.5).abs() < 1e-12);
    assert!((lp_value_by_vertices(&fano()) - 7.0 / 3.0).abs() < 1e-12);
    assert!((lp_value_by_vertices(&singletons(4)) - 4.0).abs() < 1e-12);
    assert_eq!(min_hitting_set_by_subsets(&triangle()), 2);
    assert_eq!(min_hitting_set_by_subsets(&five_cycle()), 3);
    assert_eq!(min_hitting_set_by_subsets(&fano()), 3);
    assert_eq!(min_hitting_set_by_subsets(&singletons(4)), 4);
    let intervals = all_contiguous_intervals(4).unwrap();
    assert_eq!(vc_by_subsets(&intervals.system), 2);
    let power: Vec<Vec<usize>> = (0u32..8)
        .map(|mask| (0..3).filter(|&j| mask >> j & 1 == 1).collect())
        .collect();
    assert_eq!(vc_by_subsets(&SetSystem::new(3, power).unwrap()), 3);
}

#[test]
fn lp_matches_vertex_enumeration() {
    for inst in small_suite() {
        let lp = solve_lp(&inst.system, DEFAULT_PIVOT_TOL).unwrap();
        let oracle = lp_value_by_vertices(&inst.system);
        assert!(
            (lp.z_star - oracle).abs() <= LP_MATCH_TOL,
            "{}: simplex {} vs vertices {oracle}",
            inst.name,
            lp.z_star
        );
    }
}

#[test]
fn exact_matches_subset_scan() {
    for inst in small_suite() {
        let exact = exact_hitting_set(&inst.system, 15).unwrap();
        assert!(inst.system.is_hitting_set(&exact), "{}", inst.name);
        assert_eq!(
            exact.len(),
            min_hitting_set_by_subsets(&inst.system),
            "{}",
            inst.name
        );
    }
    for seed in 0..6 {
        let inst = generated(hitset::geom::ShapeClass::Random, 15, 25, seed);
        let exact = exact_hitting_set(&inst.system, 15).unwrap();
        assert_eq!(
            exact.len(),
            min_hitting_set_by_subsets(&inst.system),
            "{}",
            inst.name
        );
    }
}

#[test]
fn vc_dimension_matches_subset_scan() {
    for inst in small_suite() {
        assert_eq!(
            vc_dimension_exact(&inst.system, None).unwrap(),
            VcDimension::Exact(vc_by_subsets(&inst.system)),
            "{}",
            inst.name
        );
    }
}

/// `H(Δ)` where `Δ` is the largest number of ranges through one point.
fn greedy_guarantee(system: &SetSystem) -> f64 {
    let max_degree = system
        .point_incidence()
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0);
    (1..=max_degree).map(|i| 1.0 / i as f64).sum()
}

#[test]
fn greedy_within_harmonic_factor_of_optimum() {
    for inst in small_suite() {
        let greedy = greedy_hitting_set(&inst.system).unwrap();
        let opt = min_hitting_set_by_subsets(&inst.system);
        assert!(inst.system.is_hitting_set(&greedy));
        assert!(opt <= greedy.len());
        assert!(
            greedy.len() as f64 <= opt as f64 * greedy_guarantee(&inst.system) + 1e-9,
            "{}",
            inst.name
        );
    }
}

#[test]
fn greedy_can_exceed_one_plus_ln_m() {
    // Two rows of 2^(k+1) - 2 cells cover everything with two points; the
    // columns of width 2, 4, ..., 2^k tempt greedy into k picks. With k = 10
    // there are only 12 points, so greedy = 10 > 2(1 + ln 12) ≈ 6.97.
    let k = 10;
    let cells = (1usize << (k + 1)) - 2;
    let mut ranges = Vec::with_capacity(cells);
    let mut start = 0;
    for col in 0..k {
        let width = 2usize << col;
        for c in start..start + width {
            let row = if c - start < width / 2 { k } else { k + 1 };
            ranges.push(vec![col, row]);
        }
        start += width;
    }
    let system = SetSystem::new(k + 2, ranges).unwrap();
    let greedy = greedy_hitting_set(&system).unwrap();
    assert_eq!(exact_hitting_set(&system, 15).unwrap().len(), 2);
    assert_eq!(greedy.len(), k);
    assert!(greedy.len() as f64 > 2.0 * (1.0 + ((k + 2) as f64).ln()));
    assert!(greedy.len() as f64 <= 2.0 * greedy_guarantee(&system));
}
