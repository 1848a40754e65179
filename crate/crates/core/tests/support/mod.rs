//! Independent oracles and fixtures shared by the integration tests.
//!
//! The oracles deliberately avoid the library's solvers: the LP value comes
//! from enumerating vertices of the covering polyhedron and the optimum
//! hitting set from scanning every subset of points.

#![allow(dead_code)]

use hitset::geom::{gen_instance, GenParams, ShapeClass};
use hitset::system::SetSystem;

pub const LP_ORACLE_MAX_POINTS: usize = 10;
pub const BRUTE_FORCE_MAX_POINTS: usize = 15;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[row][k] -= f * a[col][k];
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Next `k`-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Optimal value of `min 1ᵀy, Ay >= 1, y >= 0` by trying every basis:
/// every choice of `m` constraints among the `n` cover rows and the `m`
/// nonnegativity rows is made tight, and the best feasible solution wins.
pub fn lp_value_by_vertices(system: &SetSystem) -> f64 {
    let m = system.num_points();
    assert!(
        m <= LP_ORACLE_MAX_POINTS,
        "vertex oracle is for tiny systems"
    );
    let mut rows: Vec<(Vec<f64>, f64)> = system
        .ranges()
        .iter()
        .map(|r| {
            let mut a = vec![0.0; m];
            for &p in r {
                a[p] = 1.0;
            }
            (a, 1.0)
        })
        .collect();
    for j in 0..m {
        let mut a = vec![0.0; m];
        a[j] = 1.0;
        rows.push((a, 0.0));
    }
    let total = rows.len();
    let mut best = f64::INFINITY;
    let mut choice: Vec<usize> = (0..m).collect();
    loop {
        let a = choice.iter().map(|&i| rows[i].0.clone()).collect();
        let b = choice.iter().map(|&i| rows[i].1).collect();
        if let Some(y) = solve_square(a, b) {
            let feasible = rows
                .iter()
                .all(|(a, rhs)| a.iter().zip(&y).map(|(x, y)| x * y).sum::<f64>() >= rhs - 1e-9);
            if feasible {
                best = best.min(y.iter().sum());
            }
        }
        if !next_combination(&mut choice, total) {
            break;
        }
    }
    best
}

/// Size of a minimum hitting set, scanning all `2^m` point subsets.
pub fn min_hitting_set_by_subsets(system: &SetSystem) -> usize {
    let m = system.num_points();
    assert!(
        m <= BRUTE_FORCE_MAX_POINTS,
        "subset scan is for small systems"
    );
    let masks: Vec<u32> = system
        .ranges()
        .iter()
        .map(|r| r.iter().fold(0, |acc, &p| acc | 1 << p))
        .collect();
    (0u32..1 << m)
        .filter(|h| masks.iter().all(|r| r & h != 0))
        .map(u32::count_ones)
        .min()
        .expect("the full point set hits every nonempty range") as usize
}

/// Brute-force VC dimension: the largest point set whose traces are all
/// of its subsets.
pub fn vc_by_subsets(system: &SetSystem) -> usize {
    let m = system.num_points();
    assert!(m <= BRUTE_FORCE_MAX_POINTS);
    let masks: Vec<u32> = system
        .ranges()
        .iter()
        .map(|r| r.iter().fold(0, |acc, &p| acc | 1 << p))
        .collect();
    let mut best = 0;
    for y in 0u32..1 << m {
        let size = y.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut traces: Vec<u32> = masks.iter().map(|r| r & y).collect();
        traces.sort_unstable();
        traces.dedup();
        if traces.len() == 1 << size {
            best = size;
        }
    }
    best
}

pub fn triangle() -> SetSystem {
    SetSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
}

pub fn singletons(m: usize) -> SetSystem {
    SetSystem::new(m, (0..m).map(|j| vec![j]).collect()).unwrap()
}

/// Edges of the 5-cycle: fractional cover 5/2, integral cover 3.
pub fn five_cycle() -> SetSystem {
    SetSystem::new(
        5,
        (0..5)
            .map(|i| {
                let mut e = vec![i, (i + 1) % 5];
                e.sort_unstable();
                e
            })
            .collect(),
    )
    .unwrap()
}

/// Lines of the Fano plane: fractional cover 7/3, integral cover 3.
pub fn fano() -> SetSystem {
    SetSystem::new(
        7,
        vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ],
    )
    .unwrap()
}

pub struct Named {
    pub name: String,
    pub system: SetSystem,
    pub class: Option<ShapeClass>,
}

pub fn generated(class: ShapeClass, m: usize, n: usize, seed: u64) -> Named {
    let geo = gen_instance(class, m, n, seed, &GenParams::default()).unwrap();
    Named {
        name: format!("{class} m={m} n={n} seed={seed}"),
        system: geo.system,
        class: Some(class),
    }
}

fn plain(name: &str, system: SetSystem) -> Named {
    Named {
        name: name.into(),
        system,
        class: None,
    }
}

/// Discs and rects with 100 points and 80 ranges, intervals with 40 points
/// and 60 ranges, the triangle and 4 singletons.
pub fn standard_suite() -> Vec<Named> {
    vec![
        generated(ShapeClass::Discs, 100, 80, 1),
        generated(ShapeClass::Rects, 100, 80, 1),
        generated(ShapeClass::Intervals, 40, 60, 1),
        plain("triangle", triangle()),
        plain("singletons", singletons(4)),
    ]
}

/// Instances small enough for the exact solver and the subset oracles.
pub fn small_suite() -> Vec<Named> {
    let mut out = vec![
        plain("triangle", triangle()),
        plain("singletons", singletons(4)),
        plain("five-cycle", five_cycle()),
        plain("fano", fano()),
    ];
    for class in ShapeClass::ALL {
        for seed in 0..4 {
            out.push(generated(class, 8, 10, seed));
        }
        out.push(generated(class, 10, 10, 4));
    }
    out
}
