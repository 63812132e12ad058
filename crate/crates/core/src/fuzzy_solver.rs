//! α-cut solution of the fuzzy distributor model.
//!
//! Each α level turns every fuzzy parameter into an interval. The optimal
//! benefit is nondecreasing in supplies, demands and profits and
//! nonincreasing in the contracted minimums, so two crisp LPs at the
//! extreme corners of the parameter box bound it: the optimistic corner
//! gives the upper end and the pessimistic corner the lower end.
//!
//! Shipment intervals are envelopes of the two corner solutions. They are
//! not the exact range of optimal shipments over the box.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fuzzy::{AlphaGrid, Trapezoid};
use crate::interval::{Interval, ENDPOINT_TOL};
use crate::model::{CrispInstance, CrispSolution, DistributionProblem};

/// Which contracted minimums were clipped to the matching capacity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Repair {
    pub min_purchase: Vec<usize>,
    pub min_sale: Vec<usize>,
}

impl Repair {
    pub fn is_repaired(&self) -> bool {
        !self.min_purchase.is_empty() || !self.min_sale.is_empty()
    }
}

/// Optimistic and pessimistic crisp corners of the α-cut parameter box.
pub fn corner_instances(problem: &DistributionProblem, alpha: f64) -> Result<(CrispInstance, CrispInstance)> {
    problem.validate()?;
    let cut = |t: &Trapezoid| t.alpha_cut(alpha);
    let ends = |v: &[Trapezoid]| -> Result<(Vec<f64>, Vec<f64>)> {
        let cuts = v.iter().map(cut).collect::<Result<Vec<Interval>>>()?;
        Ok((cuts.iter().map(Interval::lo).collect(), cuts.iter().map(Interval::hi).collect()))
    };
    let (supply_lo, supply_hi) = ends(&problem.supply)?;
    let (demand_lo, demand_hi) = ends(&problem.demand)?;
    let (purchase_lo, purchase_hi) = ends(&problem.min_purchase)?;
    let (sale_lo, sale_hi) = ends(&problem.min_sale)?;
    let (k_lo, k_hi) = ends(&problem.purchase_price)?;
    let (r_lo, r_hi) = ends(&problem.sale_price)?;
    let mut c_lo = Vec::with_capacity(problem.transport_cost.len());
    let mut c_hi = Vec::with_capacity(problem.transport_cost.len());
    for row in &problem.transport_cost {
        let (lo, hi) = ends(row)?;
        c_lo.push(lo);
        c_hi.push(hi);
    }

    // highest profit r - k - c pairs the upper sale price with the lower costs
    let optimistic = CrispInstance {
        supply: supply_hi,
        demand: demand_hi,
        min_purchase: purchase_lo,
        min_sale: sale_lo,
        purchase_price: k_lo,
        sale_price: r_hi,
        transport_cost: c_lo,
    };
    let pessimistic = CrispInstance {
        supply: supply_lo,
        demand: demand_lo,
        min_purchase: purchase_hi,
        min_sale: sale_hi,
        purchase_price: k_hi,
        sale_price: r_lo,
        transport_cost: c_hi,
    };
    Ok((optimistic, pessimistic))
}

/// Clips `p_i` to `a_i` and `q_j` to `b_j`.
pub fn repair_bounds(inst: &CrispInstance) -> (CrispInstance, Repair) {
    let mut fixed = inst.clone();
    let mut repair = Repair::default();
    for (i, (p, &a)) in fixed.min_purchase.iter_mut().zip(&inst.supply).enumerate() {
        if *p > a {
            *p = a;
            repair.min_purchase.push(i);
        }
    }
    for (j, (q, &b)) in fixed.min_sale.iter_mut().zip(&inst.demand).enumerate() {
        if *q > b {
            *q = b;
            repair.min_sale.push(j);
        }
    }
    (fixed, repair)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSolution {
    pub alpha: f64,
    pub feasible: bool,
    /// Benefit interval `[pessimistic, optimistic]`; absent when infeasible.
    pub benefit: Option<Interval>,
    pub shipments: Option<Vec<Vec<Interval>>>,
    pub optimistic_repair: Repair,
    pub pessimistic_repair: Repair,
    /// Raw corner optima before nesting is enforced.
    pub optimistic_benefit: Option<f64>,
    pub pessimistic_benefit: Option<f64>,
}

impl LevelSolution {
    pub fn repaired(&self) -> bool {
        self.optimistic_repair.is_repaired() || self.pessimistic_repair.is_repaired()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzySolution {
    pub grid: AlphaGrid,
    pub wholesalers: usize,
    pub consumers: usize,
    /// One entry per grid level, in grid order.
    pub levels: Vec<LevelSolution>,
    /// Whether [`enforce_nesting`] had to widen any interval.
    pub nesting_widened: bool,
}

/// Quantity of a [`FuzzySolution`] to report on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Benefit,
    Shipment(usize, usize),
}

impl FuzzySolution {
    pub fn interval(&self, level: usize, quantity: Quantity) -> Option<Interval> {
        let lvl = &self.levels[level];
        match quantity {
            Quantity::Benefit => lvl.benefit,
            Quantity::Shipment(i, j) => lvl.shipments.as_ref().map(|x| x[i][j]),
        }
    }

    pub fn any_repaired(&self) -> bool {
        self.levels.iter().any(LevelSolution::repaired)
    }
}

fn solve_level(problem: &DistributionProblem, alpha: f64) -> Result<LevelSolution> {
    let (optimistic, pessimistic) = corner_instances(problem, alpha)?;
    let (optimistic, optimistic_repair) = repair_bounds(&optimistic);
    let (pessimistic, pessimistic_repair) = repair_bounds(&pessimistic);
    let best = optimistic.solve()?;
    let worst = pessimistic.solve()?;

    let mut level = LevelSolution {
        alpha,
        feasible: false,
        benefit: None,
        shipments: None,
        optimistic_repair,
        pessimistic_repair,
        optimistic_benefit: best.is_optimal().then_some(best.benefit),
        pessimistic_benefit: worst.is_optimal().then_some(worst.benefit),
    };
    if best.is_optimal() && worst.is_optimal() {
        level.feasible = true;
        level.benefit = Some(Interval::spanning(worst.benefit, best.benefit));
        level.shipments = Some(envelope(&worst, &best));
    }
    Ok(level)
}

fn envelope(a: &CrispSolution, b: &CrispSolution) -> Vec<Vec<Interval>> {
    a.shipments
        .iter()
        .zip(&b.shipments)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| Interval::spanning(x, y)).collect())
        .collect()
}

/// Solves every α level (in parallel), then enforces nesting.
///
/// Infeasible levels are reported in the result rather than as errors.
pub fn solve_fuzzy(problem: &DistributionProblem, grid: &AlphaGrid) -> Result<FuzzySolution> {
    problem.validate()?;
    let levels = grid
        .levels()
        .par_iter()
        .map(|&alpha| solve_level(problem, alpha))
        .collect::<Result<Vec<_>>>()?;
    let sol = FuzzySolution {
        grid: grid.clone(),
        wholesalers: problem.wholesalers(),
        consumers: problem.consumers(),
        levels,
        nesting_widened: false,
    };
    Ok(enforce_nesting(sol))
}

/// Sweeps from α = 1 downward, widening each feasible level to the hull of
/// itself and the nearest feasible level above it.
pub fn enforce_nesting(mut sol: FuzzySolution) -> FuzzySolution {
    let mut above: Option<(Interval, Vec<Vec<Interval>>)> = None;
    let mut widened = false;
    for level in sol.levels.iter_mut().rev() {
        let (Some(benefit), Some(shipments)) = (level.benefit.as_mut(), level.shipments.as_mut()) else {
            continue;
        };
        if let Some((upper_benefit, upper_shipments)) = &above {
            widened |= widen(benefit, upper_benefit);
            for (row, upper_row) in shipments.iter_mut().zip(upper_shipments) {
                for (x, upper) in row.iter_mut().zip(upper_row) {
                    widened |= widen(x, upper);
                }
            }
        }
        above = Some((*benefit, shipments.clone()));
    }
    sol.nesting_widened |= widened;
    sol
}

fn widen(target: &mut Interval, inner: &Interval) -> bool {
    let hull = target.hull(inner);
    let changed = hull.lo() < target.lo() - ENDPOINT_TOL || hull.hi() > target.hi() + ENDPOINT_TOL;
    *target = hull;
    changed
}

/// Trapezoid read off the α = 0 (support) and α = 1 (core) intervals.
pub fn fit_trapezoid(sol: &FuzzySolution, quantity: Quantity) -> Result<Trapezoid> {
    let last = sol.levels.len() - 1;
    let support = sol
        .interval(0, quantity)
        .ok_or_else(|| Error::Infeasible("the α = 0 level is infeasible".into()))?;
    let core = sol
        .interval(last, quantity)
        .ok_or_else(|| Error::Infeasible("the α = 1 level is infeasible".into()))?;
    Trapezoid::from_cuts(support, core)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preference {
    /// The first operand is preferred.
    First,
    Second,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ranking {
    /// `P(first >= second)`, averaged over the grid.
    pub probability: f64,
    pub preference: Preference,
}

/// Ranks `a` against `b`; a probability above 0.5 prefers `a`.
pub fn rank_fuzzy(a: &Trapezoid, b: &Trapezoid, grid: &AlphaGrid) -> Ranking {
    let probability = a.prob_geq(b, grid);
    let preference = if (probability - 0.5).abs() <= ENDPOINT_TOL {
        Preference::Tie
    } else if probability > 0.5 {
        Preference::First
    } else {
        Preference::Second
    };
    Ranking {
        probability,
        preference,
    }
}
