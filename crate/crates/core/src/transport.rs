//! Classical transportation problem: initial basic plans and MODI
//! optimization.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{LinearProgram, Relation, Sense};

/// Zero threshold for remaining supply/demand and for reduced costs.
const TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 10_000;

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportInstance {
    pub supplies: Vec<f64>,
    pub demands: Vec<f64>,
    /// `costs[i][j]` per unit shipped from source `i` to destination `j`.
    pub costs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub shipments: Vec<Vec<f64>>,
    pub basis: BTreeSet<Cell>,
}

impl TransportInstance {
    pub fn new(supplies: Vec<f64>, demands: Vec<f64>, costs: Vec<Vec<f64>>) -> Result<Self> {
        let inst = Self {
            supplies,
            demands,
            costs,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn rows(&self) -> usize {
        self.supplies.len()
    }

    pub fn cols(&self) -> usize {
        self.demands.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.rows(), self.cols());
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch("need at least one source and one destination".into()));
        }
        if self.costs.len() != m || self.costs.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("cost matrix must be {m}x{n}")));
        }
        let all = self.supplies.iter().chain(&self.demands).chain(self.costs.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("transportation instance".into()));
        }
        if self.supplies.iter().chain(&self.demands).any(|&v| v < 0.0) {
            return Err(Error::InvalidData("supplies and demands must be nonnegative".into()));
        }
        Ok(())
    }

    /// Whether total supply equals total demand (relative tolerance 1e-9).
    pub fn is_balanced(&self) -> bool {
        let (s, d) = self.totals();
        (s - d).abs() <= 1e-9 * s.abs().max(d.abs()).max(1.0)
    }

    fn totals(&self) -> (f64, f64) {
        (self.supplies.iter().sum(), self.demands.iter().sum())
    }

    fn require_balanced(&self) -> Result<()> {
        self.validate()?;
        if !self.is_balanced() {
            let (supply, demand) = self.totals();
            return Err(Error::Unbalanced { supply, demand });
        }
        Ok(())
    }

    pub fn cost_of(&self, plan: &TransportPlan) -> f64 {
        self.costs
            .iter()
            .flatten()
            .zip(plan.shipments.iter().flatten())
            .map(|(c, x)| c * x)
            .sum()
    }

    /// The equality-constrained LP form; variable `(i, j)` sits at `i * N + j`.
    pub fn to_lp(&self, sense: Sense) -> LinearProgram {
        let (m, n) = (self.rows(), self.cols());
        let mut lp = LinearProgram::new(sense, self.costs.iter().flatten().copied().collect());
        for i in 0..m {
            let mut row = vec![0.0; m * n];
            row[i * n..(i + 1) * n].fill(1.0);
            lp.add_constraint(row, Relation::Eq, self.supplies[i]);
        }
        for j in 0..n {
            let mut col = vec![0.0; m * n];
            for i in 0..m {
                col[i * n + j] = 1.0;
            }
            lp.add_constraint(col, Relation::Eq, self.demands[j]);
        }
        lp
    }
}

pub fn check_balance(inst: &TransportInstance) -> bool {
    inst.is_balanced()
}

impl TransportPlan {
    fn empty(m: usize, n: usize) -> Self {
        Self {
            shipments: vec![vec![0.0; n]; m],
            basis: BTreeSet::new(),
        }
    }

    pub fn positive_cells(&self) -> usize {
        self.shipments.iter().flatten().filter(|&&x| x > TOL).count()
    }

    /// Largest row/column sum deviation from the instance's supplies and demands.
    pub fn max_imbalance(&self, inst: &TransportInstance) -> f64 {
        let rows = self
            .shipments
            .iter()
            .zip(&inst.supplies)
            .map(|(row, a)| (row.iter().sum::<f64>() - a).abs());
        let cols = inst.demands.iter().enumerate().map(|(j, b)| {
            (self.shipments.iter().map(|row| row[j]).sum::<f64>() - b).abs()
        });
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Greedy top-left allocation. When a row and a column run out together the
/// rule steps right, leaving a zero basic cell so the basis keeps `M + N - 1`
/// cells.
pub fn north_west_corner(inst: &TransportInstance) -> Result<TransportPlan> {
    inst.require_balanced()?;
    let (m, n) = (inst.rows(), inst.cols());
    let mut supply = inst.supplies.clone();
    let mut demand = inst.demands.clone();
    let mut plan = TransportPlan::empty(m, n);
    let (mut i, mut j) = (0, 0);
    while i < m && j < n {
        let q = supply[i].min(demand[j]);
        plan.shipments[i][j] = q;
        plan.basis.insert((i, j));
        supply[i] -= q;
        demand[j] -= q;
        let column_done = demand[j] <= TOL * (1.0 + inst.demands[j]);
        if column_done && j + 1 < n {
            j += 1;
        } else {
            i += 1;
        }
    }
    Ok(plan)
}

/// Vogel's approximation method.
///
/// Penalty ties go to the lowest row, then the lowest column; within a line
/// the cheapest cell with the lowest index wins.
pub fn vogel_approximation(inst: &TransportInstance) -> Result<TransportPlan> {
    inst.require_balanced()?;
    let (m, n) = (inst.rows(), inst.cols());
    let mut supply = inst.supplies.clone();
    let mut demand = inst.demands.clone();
    let mut row_open = vec![true; m];
    let mut col_open = vec![true; n];
    let mut plan = TransportPlan::empty(m, n);
    let scale = 1.0 + supply.iter().chain(&demand).fold(0.0f64, |acc, v| acc.max(v.abs()));

    loop {
        let open_rows: Vec<usize> = (0..m).filter(|&i| row_open[i]).collect();
        let open_cols: Vec<usize> = (0..n).filter(|&j| col_open[j]).collect();
        if open_rows.is_empty() || open_cols.is_empty() {
            break;
        }

        let penalty = |costs: &mut Vec<f64>| -> f64 {
            costs.sort_by(f64::total_cmp);
            if costs.len() >= 2 {
                costs[1] - costs[0]
            } else {
                costs[0]
            }
        };
        let mut best: Option<(f64, Line)> = None;
        for &i in &open_rows {
            let mut costs: Vec<f64> = open_cols.iter().map(|&j| inst.costs[i][j]).collect();
            let p = penalty(&mut costs);
            if best.is_none_or(|(bp, _)| p > bp) {
                best = Some((p, Line::Row(i)));
            }
        }
        for &j in &open_cols {
            let mut costs: Vec<f64> = open_rows.iter().map(|&i| inst.costs[i][j]).collect();
            let p = penalty(&mut costs);
            if best.is_none_or(|(bp, _)| p > bp) {
                best = Some((p, Line::Col(j)));
            }
        }
        let (_, line) = best.expect("open lines exist");

        let (i, j) = match line {
            Line::Row(i) => {
                let j = cheapest(open_cols.iter().map(|&j| (j, inst.costs[i][j])));
                (i, j)
            }
            Line::Col(j) => {
                let i = cheapest(open_rows.iter().map(|&i| (i, inst.costs[i][j])));
                (i, j)
            }
        };

        let q = supply[i].min(demand[j]);
        plan.shipments[i][j] = q;
        plan.basis.insert((i, j));
        supply[i] -= q;
        demand[j] -= q;
        let row_done = supply[i] <= TOL * scale;
        let col_done = demand[j] <= TOL * scale;

        // close exactly one line per step, except for the final cell
        let last_row = open_rows.len() == 1;
        let last_col = open_cols.len() == 1;
        match (row_done, col_done) {
            (true, true) if last_row && last_col => {
                row_open[i] = false;
                col_open[j] = false;
            }
            (true, true) if last_row => col_open[j] = false,
            (true, true) if last_col => row_open[i] = false,
            (true, true) => match line {
                Line::Row(_) => row_open[i] = false,
                Line::Col(_) => col_open[j] = false,
            },
            (true, false) => row_open[i] = false,
            (false, true) => col_open[j] = false,
            (false, false) => unreachable!("allocation exhausts a row or a column"),
        }
        if row_done {
            supply[i] = 0.0;
        }
        if col_done {
            demand[j] = 0.0;
        }
    }
    Ok(plan)
}

#[derive(Debug, Clone, Copy)]
enum Line {
    Row(usize),
    Col(usize),
}

fn cheapest(cells: impl Iterator<Item = (usize, f64)>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in cells {
        if best.is_none_or(|(_, bc)| c < bc) {
            best = Some((k, c));
        }
    }
    best.expect("nonempty line").0
}

/// Whether the ordered cells form a closed loop: at least four cells,
/// consecutive cells (cyclically) share a row or a column, alternating
/// between the two, so no three consecutive cells share a line.
pub fn detect_loop(cells: &[Cell]) -> bool {
    let k = cells.len();
    if k < 4 {
        return false;
    }
    let mut links = Vec::with_capacity(k);
    for t in 0..k {
        let (a, b) = (cells[t], cells[(t + 1) % k]);
        if a == b {
            return false;
        }
        match (a.0 == b.0, a.1 == b.1) {
            (true, false) => links.push(true),
            (false, true) => links.push(false),
            _ => return false,
        }
    }
    (0..k).all(|t| links[t] != links[(t + 1) % k])
}

/// Whether `cells` contain no loop, viewing each cell as an edge between its
/// row node and its column node.
pub fn is_loop_free(cells: &BTreeSet<Cell>, m: usize, n: usize) -> bool {
    let mut forest = DisjointSets::new(m + n);
    cells.iter().all(|&(i, j)| forest.union(i, m + j))
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(size: usize) -> Self {
        Self {
            parent: (0..size).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Improves a basic feasible plan to optimality with the potentials method.
///
/// Maximization negates the costs internally. Bases with fewer than
/// `M + N - 1` cells are completed with zero-shipment cells, taking the
/// lexicographically smallest cell that keeps the basis loop-free.
pub fn modi_optimize(inst: &TransportInstance, start: &TransportPlan, sense: Sense) -> Result<TransportPlan> {
    inst.require_balanced()?;
    let (m, n) = (inst.rows(), inst.cols());
    if start.shipments.len() != m || start.shipments.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("plan must be {m}x{n}")));
    }
    if start.basis.iter().any(|&(i, j)| i >= m || j >= n) {
        return Err(Error::DimensionMismatch("basis cell outside the table".into()));
    }
    if !is_loop_free(&start.basis, m, n) {
        return Err(Error::NotBasic("basis contains a loop".into()));
    }
    for (i, row) in start.shipments.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x < -TOL {
                return Err(Error::NotBasic(format!("negative shipment at ({i}, {j})")));
            }
            if x > TOL && !start.basis.contains(&(i, j)) {
                return Err(Error::NotBasic(format!("positive shipment at nonbasic cell ({i}, {j})")));
            }
        }
    }
    let scale = 1.0 + inst.supplies.iter().fold(0.0f64, |a, v| a.max(*v));
    if start.max_imbalance(inst) > 1e-7 * scale {
        return Err(Error::NotBasic("plan does not meet supplies and demands".into()));
    }

    let sign = match sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let cost: Vec<Vec<f64>> = inst
        .costs
        .iter()
        .map(|row| row.iter().map(|c| sign * c).collect())
        .collect();
    let cost_tol = TOL * (1.0 + cost.iter().flatten().fold(0.0f64, |a, c| a.max(c.abs())));

    let mut plan = start.clone();
    complete_basis(&mut plan.basis, m, n);

    let stall_limit = 2 * (m * n + m + n);
    let mut stalled = 0;
    for _ in 0..MAX_PIVOTS {
        let (u, v) = potentials(&plan.basis, &cost, m, n);
        let mut entering: Option<(Cell, f64)> = None;
        for i in 0..m {
            for j in 0..n {
                if plan.basis.contains(&(i, j)) {
                    continue;
                }
                let reduced = cost[i][j] - u[i] - v[j];
                if reduced >= -cost_tol {
                    continue;
                }
                // after a long degenerate stall take the first improving cell
                let better = match entering {
                    None => true,
                    Some(_) if stalled > stall_limit => false,
                    Some((_, best)) => reduced < best,
                };
                if better {
                    entering = Some(((i, j), reduced));
                }
            }
        }
        let Some((cell, _)) = entering else {
            return Ok(plan);
        };

        let cycle = basis_cycle(&plan.basis, cell, m, n);
        // odd positions give up flow
        let (leaving, theta) = cycle
            .iter()
            .skip(1)
            .step_by(2)
            .map(|&(i, j)| ((i, j), plan.shipments[i][j]))
            .fold(None, |acc: Option<(Cell, f64)>, (c, x)| match acc {
                Some((_, bx)) if bx <= x => acc,
                _ => Some((c, x)),
            })
            .expect("cycle has donor cells");
        let theta = theta.max(0.0);
        stalled = if theta <= TOL { stalled + 1 } else { 0 };
        for (k, &(i, j)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                plan.shipments[i][j] += theta;
            } else {
                plan.shipments[i][j] -= theta;
            }
        }
        plan.shipments[leaving.0][leaving.1] = 0.0;
        plan.basis.remove(&leaving);
        plan.basis.insert(cell);
    }
    Err(Error::IterationLimit(MAX_PIVOTS))
}

fn complete_basis(basis: &mut BTreeSet<Cell>, m: usize, n: usize) {
    let target = m + n - 1;
    'fill: while basis.len() < target {
        for i in 0..m {
            for j in 0..n {
                if basis.contains(&(i, j)) {
                    continue;
                }
                basis.insert((i, j));
                if is_loop_free(basis, m, n) {
                    continue 'fill;
                }
                basis.remove(&(i, j));
            }
        }
        unreachable!("a spanning tree always exists on the complete bipartite graph");
    }
}

/// Solves `u_i + v_j = cost_ij` over a spanning-tree basis with `u_0 = 0`.
fn potentials(basis: &BTreeSet<Cell>, cost: &[Vec<f64>], m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![None; m];
    let mut v = vec![None; n];
    u[0] = Some(0.0);
    let mut queue = VecDeque::from([Node::Row(0)]);
    while let Some(node) = queue.pop_front() {
        for &(i, j) in basis {
            match node {
                Node::Row(r) if r == i && v[j].is_none() => {
                    v[j] = Some(cost[i][j] - u[i].unwrap());
                    queue.push_back(Node::Col(j));
                }
                Node::Col(c) if c == j && u[i].is_none() => {
                    u[i] = Some(cost[i][j] - v[j].unwrap());
                    queue.push_back(Node::Row(i));
                }
                _ => {}
            }
        }
    }
    let unwrap = |p: Vec<Option<f64>>| p.into_iter().map(|x| x.expect("spanning basis")).collect();
    (unwrap(u), unwrap(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Row(usize),
    Col(usize),
}

/// The loop closed by adding `entering` to the basis tree, starting at
/// `entering`. Cells alternate between receiving (even) and giving (odd).
fn basis_cycle(basis: &BTreeSet<Cell>, entering: Cell, m: usize, n: usize) -> Vec<Cell> {
    // node ids: rows 0..m, columns m..m+n; search from the entering column
    // to the entering row through basis edges
    let (ei, ej) = entering;
    let mut via: Vec<Option<(usize, Cell)>> = vec![None; m + n];
    let start = m + ej;
    let goal = ei;
    let mut seen = vec![false; m + n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        for &(i, j) in basis {
            let next = if node < m && i == node {
                m + j
            } else if node >= m && j == node - m {
                i
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                via[next] = Some((node, (i, j)));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut node = goal;
    while node != start {
        let (prev, cell) = via[node].expect("basis spans every node");
        path.push(cell);
        node = prev;
    }
    // path runs row ei -> ... -> column ej; prepend the entering cell
    let mut cycle = vec![entering];
    cycle.extend(path);
    cycle
}
