//! Independent oracles and instance generators shared by the integration
//! suites. Nothing here calls into the solvers under test.

#![allow(dead_code)]

use ftopt_core::simplex::{LinearProgram, Relation, Sense, Status};
use ftopt_core::transport::TransportInstance;
use ftopt_core::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub status: Status,
    pub value: f64,
}

struct Row {
    a: Vec<f64>,
    rel: Relation,
    rhs: f64,
}

fn rows_with_bounds(lp: &LinearProgram, extra: &[Row]) -> Vec<Row> {
    let n = lp.num_vars();
    let mut rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| Row {
            a: c.coefficients.clone(),
            rel: c.relation,
            rhs: c.rhs,
        })
        .collect();
    rows.extend(extra.iter().map(|r| Row {
        a: r.a.clone(),
        rel: r.rel,
        rhs: r.rhs,
    }));
    for j in 0..n {
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        rows.push(Row {
            a,
            rel: Relation::Ge,
            rhs: 0.0,
        });
    }
    rows
}

fn satisfies(rows: &[Row], x: &[f64]) -> bool {
    rows.iter().all(|r| {
        let lhs: f64 = r.a.iter().zip(x).map(|(a, b)| a * b).sum();
        let tol = 1e-9 * (1.0 + r.rhs.abs() + lhs.abs());
        match r.rel {
            Relation::Le => lhs <= r.rhs + tol,
            Relation::Ge => lhs >= r.rhs - tol,
            Relation::Eq => (lhs - r.rhs).abs() <= tol,
        }
    })
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, len, k, &mut Vec::new(), &mut out);
    out
}

/// Best objective over all feasible vertices, or `None` when no vertex is
/// feasible. `maximize` picks the direction.
fn best_vertex(rows: &[Row], objective: &[f64], maximize: bool) -> Option<f64> {
    let n = objective.len();
    let mut best: Option<f64> = None;
    for combo in combinations(rows.len(), n) {
        let a = combo.iter().map(|&i| rows[i].a.clone()).collect();
        let b = combo.iter().map(|&i| rows[i].rhs).collect();
        let Some(x) = solve_square(a, b) else { continue };
        if !satisfies(rows, &x) {
            continue;
        }
        let v: f64 = objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        best = Some(match best {
            None => v,
            Some(b) if maximize => b.max(v),
            Some(b) => b.min(v),
        });
    }
    best
}

/// Vertex enumeration for small LPs with `x >= 0`.
///
/// A nonempty feasible set always has a vertex here, so "no feasible vertex"
/// means infeasible. Unboundedness is decided on the recession cone: the LP
/// is unbounded iff some direction `d >= 0` with `A d (rel) 0` and
/// `sum d <= 1` improves the objective.
pub fn vertex_oracle(lp: &LinearProgram) -> OracleResult {
    let n = lp.num_vars();
    let maximize = lp.sense == Sense::Maximize;
    let rows = rows_with_bounds(lp, &[]);
    let Some(value) = best_vertex(&rows, &lp.objective, maximize) else {
        return OracleResult {
            status: Status::Infeasible,
            value: f64::NAN,
        };
    };

    let mut cone = LinearProgram::new(lp.sense, lp.objective.clone());
    for c in &lp.constraints {
        cone.add_constraint(c.coefficients.clone(), c.relation, 0.0);
    }
    let normalizer = Row {
        a: vec![1.0; n],
        rel: Relation::Le,
        rhs: 1.0,
    };
    let cone_rows = rows_with_bounds(&cone, &[normalizer]);
    let improvement = best_vertex(&cone_rows, &lp.objective, maximize).unwrap_or(0.0);
    let improving = if maximize { improvement > 1e-9 } else { improvement < -1e-9 };
    if improving {
        OracleResult {
            status: Status::Unbounded,
            value: if maximize { f64::INFINITY } else { f64::NEG_INFINITY },
        }
    } else {
        OracleResult {
            status: Status::Optimal,
            value,
        }
    }
}

/// Random LP with up to 3 variables and 4 constraints, small integer data.
pub fn random_small_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=4);
    let sense = if rng.random_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
    let objective = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    let mut lp = LinearProgram::new(sense, objective);
    let boxed = rng.random_bool(0.6);
    for k in 0..m {
        if boxed && k == 0 {
            lp.add_constraint(vec![1.0; n], Relation::Le, rng.random_range(1..=10) as f64);
            continue;
        }
        let coeffs = (0..n).map(|_| rng.random_range(-4..=5) as f64).collect();
        let rel = match rng.random_range(0..6) {
            0..=3 => Relation::Le,
            4 => Relation::Ge,
            _ => Relation::Eq,
        };
        lp.add_constraint(coeffs, rel, rng.random_range(-3..=10) as f64);
    }
    lp
}

/// Balanced random instance with integer supplies, demands and costs.
pub fn random_balanced(rng: &mut ChaCha8Rng, max_dim: usize) -> TransportInstance {
    let m = rng.random_range(1..=max_dim);
    let n = rng.random_range(1..=max_dim);
    let supplies: Vec<f64> = (0..m).map(|_| rng.random_range(1..=50) as f64).collect();
    let total: f64 = supplies.iter().sum();
    // random split of the total into n nonnegative integer demands
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0..=total as u32) as f64).collect();
    cuts.sort_by(f64::total_cmp);
    let mut demands = Vec::with_capacity(n);
    let mut prev = 0.0;
    for c in cuts {
        demands.push(c - prev);
        prev = c;
    }
    demands.push(total - prev);
    let costs = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(1..=20) as f64).collect())
        .collect();
    TransportInstance::new(supplies, demands, costs).unwrap()
}

/// `P(x >= y)` for independent uniforms on `a` and `b`, estimated from
/// `draws` paired samples.
pub fn prob_geq_monte_carlo(a: &Interval, b: &Interval, draws: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        let x = a.lo() + a.width() * r.random::<f64>();
        let y = b.lo() + b.width() * r.random::<f64>();
        if x >= y {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

/// Random nondegenerate interval pairs with overlapping and disjoint cases.
pub fn random_interval_pairs(count: usize, seed: u64) -> Vec<(Interval, Interval)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let mut one = || {
                let lo = r.random_range(-10.0..10.0);
                let w = r.random_range(0.01..8.0);
                Interval::new(lo, lo + w).unwrap()
            };
            (one(), one())
        })
        .collect()
}

/// Maximum over pairs of the deviation between `f` and the Monte Carlo oracle.
pub fn max_oracle_deviation(pairs: &[(Interval, Interval)], draws: usize, f: impl Fn(&Interval, &Interval) -> f64 + Sync) -> f64 {
    pairs
        .par_iter()
        .enumerate()
        .map(|(k, (a, b))| (f(a, b) - prob_geq_monte_carlo(a, b, draws, 1_000 + k as u64)).abs())
        .reduce(|| 0.0, f64::max)
}
