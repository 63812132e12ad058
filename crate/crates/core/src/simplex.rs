//! Dense two-phase primal simplex.
//!
//! Pivoting uses Dantzig's rule until the solver stalls on degenerate
//! pivots for `2 * (n + m)` consecutive iterations, after which Bland's rule
//! takes over for the rest of the phase.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOL: f64 = 1e-9;
/// Constraint residual tolerance for a solution to count as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;

const MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `sense c·x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        Self {
            sense,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn with_constraint(mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.add_constraint(coefficients, relation, rhs);
        self
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("objective".into()));
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if con.coefficients.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {k} has {} coefficients, objective has {n}",
                    con.coefficients.len()
                )));
            }
            if !con.rhs.is_finite() || con.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("constraint {k}")));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Largest violation of any constraint or sign bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x.iter().map(|&v| (-v).max(0.0));
        let rows = self.constraints.iter().map(|con| {
            let lhs = dot(&con.coefficients, x);
            match con.relation {
                Relation::Le => (lhs - con.rhs).max(0.0),
                Relation::Ge => (con.rhs - lhs).max(0.0),
                Relation::Eq => (lhs - con.rhs).abs(),
            }
        });
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSolution {
    pub status: Status,
    /// Primal values; meaningful only when optimal.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl SimplexSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

/// Tableau with the reduced-cost row stored separately.
///
/// `cost_row[j]` holds `z_j - c_j` for the internal maximization; the last
/// entry of every row is the right-hand side.
struct Tableau {
    rows: Vec<Vec<f64>>,
    cost_row: Vec<f64>,
    basis: Vec<usize>,
    num_structural: usize,
    first_artificial: usize,
    num_cols: usize,
    iterations: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        // normalize every row to a nonnegative right-hand side
        let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|con| {
                if con.rhs < 0.0 {
                    let flipped = match con.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (con.coefficients.iter().map(|v| -v).collect(), flipped, -con.rhs)
                } else {
                    (con.coefficients.clone(), con.relation, con.rhs)
                }
            })
            .collect();

        let num_slack = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        let num_artificial = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let first_artificial = n + num_slack;
        let num_cols = first_artificial + num_artificial;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_artificial = first_artificial;
        for (coeffs, rel, rhs) in normalized {
            let mut row = vec![0.0; num_cols + 1];
            row[..n].copy_from_slice(&coeffs);
            row[num_cols] = rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }

        Self {
            rows,
            cost_row: vec![0.0; num_cols + 1],
            basis,
            num_structural: n,
            first_artificial,
            num_cols,
            iterations: 0,
        }
    }

    fn rhs(&self, row: usize) -> f64 {
        self.rows[row][self.num_cols]
    }

    /// Installs `cost` (internal maximization, one entry per column) and
    /// prices out the current basis.
    fn set_costs(&mut self, cost: &[f64]) {
        self.cost_row = cost.iter().map(|c| -c).collect();
        self.cost_row.push(0.0);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dst, src) in self.cost_row.iter_mut().zip(&self.rows[r]) {
                    *dst += cb * src;
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (r, other) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = other[col];
            if factor != 0.0 {
                for (dst, src) in other.iter_mut().zip(&pivot_row) {
                    *dst -= factor * src;
                }
                other[col] = 0.0;
            }
        }
        let factor = self.cost_row[col];
        if factor != 0.0 {
            for (dst, src) in self.cost_row.iter_mut().zip(&pivot_row) {
                *dst -= factor * src;
            }
            self.cost_row[col] = 0.0;
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    fn run_phase(&mut self, phase: Phase, cost_tol: f64) -> Result<PhaseOutcome> {
        let enterable = match phase {
            Phase::One => self.num_cols,
            Phase::Two => self.first_artificial,
        };
        let stall_limit = 2 * (self.num_structural + self.rows.len());
        let mut stalled = 0usize;
        let mut bland = false;

        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::IterationLimit(MAX_ITERATIONS));
            }
            let candidates = (0..enterable)
                .filter(|&j| self.cost_row[j] < -cost_tol && !self.basis.contains(&j));
            let entering = if bland {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| self.cost_row[a].total_cmp(&self.cost_row[b]))
            };
            let Some(col) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            // ratio test; ties go to the lowest basic variable index
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                        if ratio < best_ratio && !tie
                            || tie && self.basis[r] < self.basis[best]
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((row, ratio)) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };

            if ratio <= 1e-12 {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            } else {
                stalled = 0;
            }
            self.pivot(row, col);
        }
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn purge_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.first_artificial {
                r += 1;
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
            match replacement {
                Some(col) => {
                    self.pivot(r, col);
                    self.iterations -= 1;
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.num_structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_structural {
                x[b] = self.rhs(r).max(0.0);
            }
        }
        x
    }
}

/// Solves `lp` with the two-phase simplex method.
pub fn solve(lp: &LinearProgram) -> Result<SimplexSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut tableau = Tableau::build(lp);

    let rhs_scale = 1.0
        + lp
            .constraints
            .iter()
            .map(|c| c.rhs.abs())
            .fold(0.0, f64::max);

    if tableau.first_artificial < tableau.num_cols {
        let mut phase_one = vec![0.0; tableau.num_cols];
        for c in phase_one.iter_mut().skip(tableau.first_artificial) {
            *c = -1.0;
        }
        tableau.set_costs(&phase_one);
        // phase one is bounded below by zero, so it cannot report unbounded
        tableau.run_phase(Phase::One, PIVOT_TOL)?;
        let infeasibility = -tableau.cost_row[tableau.num_cols];
        if infeasibility > FEASIBILITY_TOL * rhs_scale {
            return Ok(SimplexSolution {
                status: Status::Infeasible,
                x: vec![0.0; n],
                objective_value: f64::NAN,
                iterations: tableau.iterations,
            });
        }
        tableau.purge_artificials();
    }

    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let mut cost = vec![0.0; tableau.num_cols];
    for (c, &o) in cost.iter_mut().zip(&lp.objective) {
        *c = sign * o;
    }
    tableau.set_costs(&cost);
    let cost_scale = 1.0 + lp.objective.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let outcome = tableau.run_phase(Phase::Two, PIVOT_TOL * cost_scale)?;

    let x = tableau.primal();
    Ok(match outcome {
        PhaseOutcome::Optimal => SimplexSolution {
            status: Status::Optimal,
            objective_value: lp.evaluate(&x),
            x,
            iterations: tableau.iterations,
        },
        PhaseOutcome::Unbounded => SimplexSolution {
            status: Status::Unbounded,
            objective_value: sign * f64::INFINITY,
            x,
            iterations: tableau.iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_corner() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0])
            .with_constraint(vec![1.0, 0.0], Relation::Le, 1.0)
            .with_constraint(vec![0.0, 1.0], Relation::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-12);
        assert_eq!(sol.x, vec![1.0, 1.0]);
    }

    #[test]
    fn infeasible_against_sign_bound() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0])
            .with_constraint(vec![1.0], Relation::Le, -1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn unbounded() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 0.0])
            .with_constraint(vec![0.0, 1.0], Relation::Le, 3.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn minimize_with_ge_and_eq() {
        // min 2x + 3y, x + y >= 4, x - y = 1 -> x = 2.5, y = 1.5
        let lp = LinearProgram::new(Sense::Minimize, vec![2.0, 3.0])
            .with_constraint(vec![1.0, 1.0], Relation::Ge, 4.0)
            .with_constraint(vec![1.0, -1.0], Relation::Eq, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective_value - 9.5).abs() < 1e-9);
        assert!(lp.max_violation(&sol.x) < FEASIBILITY_TOL);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 2.0])
            .with_constraint(vec![1.0, 1.0], Relation::Eq, 2.0)
            .with_constraint(vec![2.0, 2.0], Relation::Eq, 4.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective_value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0])
            .with_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve(&lp), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // classic instance that cycles under the textbook Dantzig rule
        let lp = LinearProgram::new(Sense::Maximize, vec![0.75, -150.0, 0.02, -6.0])
            .with_constraint(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .with_constraint(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .with_constraint(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective_value - 0.05).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let lp = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0, 1.0])
            .with_constraint(vec![1.0, 1.0, 0.0], Relation::Le, 1.0)
            .with_constraint(vec![0.0, 1.0, 1.0], Relation::Le, 1.0);
        assert_eq!(solve(&lp).unwrap(), solve(&lp).unwrap());
    }
}
