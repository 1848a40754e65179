mod support;

use proptest::prelude::*;

use hitset::baselines::{exact_hitting_set, greedy_hitting_set};
use hitset::cells::{count_shallow_cells, vc_dimension_exact, SccFamily};
use hitset::lp::{solve_lp, DEFAULT_PIVOT_TOL, FEASIBILITY_TOL};
use hitset::netfinder::{run_trial, AlgoConfig, UnhitOracle};
use hitset::packing::{
    build_unit_distance_graph, check_edge_bound, check_total_weight_bound, greedy_maximal_packing,
    is_packing,
};
use hitset::system::{SetSystem, WeightVector};

use support::{lp_value_by_vertices, min_hitting_set_by_subsets};

/// Systems of up to 8 points and 10 nonempty ranges.
fn system() -> impl Strategy<Value = SetSystem> {
    (1usize..=8).prop_flat_map(|m| {
        prop::collection::vec(1u32..(1 << m), 1..=10).prop_map(move |masks| {
            let ranges = masks
                .into_iter()
                .map(|mask| (0..m).filter(|&j| mask >> j & 1 == 1).collect())
                .collect();
            SetSystem::new(m, ranges).unwrap()
        })
    })
}

fn system_with_weights() -> impl Strategy<Value = (SetSystem, WeightVector)> {
    system().prop_flat_map(|s| {
        let m = s.num_points();
        (
            Just(s),
            prop::collection::vec(0.0f64..1.0, m)
                .prop_filter_map("positive total", |raw| WeightVector::new(raw).ok()),
        )
    })
}

fn subset_of(m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<bool>(), m).prop_map(|bits| {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
            .collect()
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sym_diff_identity((s, w) in system_with_weights(), i in 0usize..10, j in 0usize..10) {
        let (i, j) = (i % s.num_ranges(), j % s.num_ranges());
        let lhs = s.sym_diff_weight(&w, i, j).unwrap();
        let rhs = s.weight_of(&w, i).unwrap() + s.weight_of(&w, j).unwrap()
            - 2.0 * s.intersection_weight(&w, i, j).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!(lhs >= 0.0);
    }

    #[test]
    fn projection_is_idempotent(
        s in system(),
        bits in prop::collection::vec(any::<bool>(), 8),
    ) {
        let y: Vec<usize> = (0..s.num_points()).filter(|&j| bits[j]).collect();
        let proj = s.project(&y).unwrap();
        let traced = proj.to_system();
        let again = traced.project(&y).unwrap();
        prop_assert_eq!(proj.traces(), again.traces());
        prop_assert_eq!(proj.multiplicities().iter().sum::<usize>(), s.num_ranges());
    }

    #[test]
    fn sauer_shelah_bound(s in system(), bits in prop::collection::vec(any::<bool>(), 8)) {
        let d = vc_dimension_exact(&s, None).unwrap().exact().unwrap();
        let y: Vec<usize> = (0..s.num_points()).filter(|&j| bits[j]).collect();
        let traces = s.project(&y).unwrap().num_traces();
        let bound: usize = (0..=d.min(y.len())).map(|i| binomial(y.len(), i)).sum();
        prop_assert!(traces <= bound, "{traces} traces > {bound} with d = {d}");
    }

    #[test]
    fn shallow_cells_monotone(s in system(), seed in any::<u64>()) {
        let m = s.num_points();
        let mut previous_row: Vec<usize> = vec![0; m + 1];
        for l in 1..=m {
            let mut previous = 0;
            for k in 0..=m {
                let c = count_shallow_cells(&s, None, l, k, 4, seed).unwrap();
                prop_assert!(c >= previous, "not monotone in k at l={l}, k={k}");
                prop_assert!(c >= previous_row[k], "not monotone in l at l={l}, k={k}");
                previous = c;
                previous_row[k] = c;
            }
        }
    }

    #[test]
    fn lp_certificate(s in system()) {
        let lp = solve_lp(&s, DEFAULT_PIVOT_TOL).unwrap();
        prop_assert!((lp.eps_star * lp.z_star - 1.0).abs() <= 1e-9);
        prop_assert!((lp.mu_star.total() - 1.0).abs() <= 1e-9);
        prop_assert!(lp.z_star >= 1.0 - 1e-9);
        for (r, range) in s.ranges().iter().enumerate() {
            let cover: f64 = range.iter().map(|&p| lp.y_star[p]).sum();
            prop_assert!(cover >= 1.0 - FEASIBILITY_TOL, "range {r} covered {cover}");
            prop_assert!(s.weight_of(&lp.mu_star, r).unwrap() >= lp.eps_star - FEASIBILITY_TOL);
        }
        prop_assert!((lp.z_star - lp_value_by_vertices(&s)).abs() <= 1e-6);
        let duplicated = {
            let mut ranges = s.ranges().to_vec();
            ranges.push(ranges[0].clone());
            SetSystem::new(s.num_points(), ranges).unwrap()
        };
        let again = solve_lp(&duplicated, DEFAULT_PIVOT_TOL).unwrap();
        prop_assert!((again.z_star - lp.z_star).abs() <= 1e-9);
    }

    #[test]
    fn solvers_respect_lp_and_optimum(s in system()) {
        let lp = solve_lp(&s, DEFAULT_PIVOT_TOL).unwrap();
        let opt = min_hitting_set_by_subsets(&s);
        let exact = exact_hitting_set(&s, 8).unwrap();
        let greedy = greedy_hitting_set(&s).unwrap();
        prop_assert_eq!(exact.len(), opt);
        prop_assert!(s.is_hitting_set(&exact) && s.is_hitting_set(&greedy));
        prop_assert!(exact.len() >= (lp.z_star - 1e-6).ceil() as usize);
        prop_assert!(greedy.len() >= exact.len());
    }

    #[test]
    fn netfinder_always_hits(
        s in system(),
        seed in any::<u64>(),
        scale in prop::sample::select(vec![1.0, 1e-2, 1e-4]),
        d in 1usize..4,
    ) {
        let lp = solve_lp(&s, DEFAULT_PIVOT_TOL).unwrap();
        let mut cfg = AlgoConfig::new(d, SccFamily::new(1.0, d as f64, 2.0));
        cfg.seed = seed;
        cfg.prob_scale = scale;
        let run = run_trial(&s, &lp, &cfg, 0).unwrap();
        prop_assert!(s.is_hitting_set(&run.hitting_set));
        prop_assert_eq!(run.oracle_calls as usize, run.added_per_call.len());
        prop_assert_eq!(
            run.initial_sample_size + run.added_per_call.iter().sum::<usize>(),
            run.hitting_set.len()
        );
        prop_assert!(run.hitting_set.len() as f64 >= lp.z_star - 1e-6);
        for &p in &run.hitting_set {
            prop_assert!(lp.mu_star.get(p) > 0.0, "point {p} has zero LP weight");
        }
        let again = run_trial(&s, &lp, &cfg, 0).unwrap();
        prop_assert_eq!(&run.hitting_set, &again.hitting_set);
        prop_assert_eq!(&run.added_per_call, &again.added_per_call);
    }

    #[test]
    fn oracle_progress_is_monotone(s in system(), order in prop::collection::vec(0usize..8, 0..12)) {
        let mut oracle = UnhitOracle::new(&s);
        let mut last = 0;
        for p in order.into_iter().filter(|&p| p < s.num_points()) {
            oracle.insert(p);
            match oracle.next_unhit() {
                Some(r) => {
                    prop_assert!(r >= last);
                    prop_assert!(s.ranges()[r].iter().all(|&q| !oracle.contains(q)));
                    last = r;
                }
                None => prop_assert!(s.is_hitting_set(&oracle.hitting_set())),
            }
        }
    }

    #[test]
    fn greedy_packings_are_maximal(
        (s, w) in system_with_weights(),
        k in 0.0f64..1.0,
        delta in 0.01f64..1.0,
        seed in any::<u64>(),
    ) {
        let p = greedy_maximal_packing(&s, &w, k, delta, seed).unwrap();
        prop_assert!(is_packing(&s, &w, p.members(), k, delta).unwrap());
        prop_assert!(p.is_maximal().unwrap());
    }

    #[test]
    fn unit_distance_graph_bounds(s in system(), y in subset_of(8)) {
        let y: Vec<usize> = y.into_iter().filter(|&j| j < s.num_points()).collect();
        let proj = s.project(&y).unwrap();
        let d = vc_dimension_exact(&proj.to_system(), None).unwrap().exact().unwrap();
        let g = build_unit_distance_graph(&proj);
        for &(u, v) in &g.edges {
            let (a, b) = (&g.vertices[u], &g.vertices[v]);
            let diff = a.iter().filter(|x| !b.contains(x)).count()
                + b.iter().filter(|x| !a.contains(x)).count();
            prop_assert_eq!(diff, 1);
        }
        let w: usize = g.edges.iter().map(|&(u, v)| g.vertex_weights[u].min(g.vertex_weights[v])).sum();
        prop_assert_eq!(w, g.total_weight);
        prop_assert!(check_edge_bound(&g, d));
        prop_assert!(check_total_weight_bound(&g, d, s.num_ranges()));
    }
}
