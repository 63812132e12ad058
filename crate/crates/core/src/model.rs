//! The distributor-benefit model.
//!
//! A distributor buys from `M` wholesalers and sells to `N` consumers. Each
//! unit shipped on route `(i, j)` earns `z_ij = r_j - k_i - c_ij`; row sums
//! sit between the contracted purchase `p_i` and the supply `a_i`, column
//! sums between the contracted sale `q_j` and the demand `b_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Trapezoid;
use crate::simplex::{self, LinearProgram, Relation, Sense, SimplexSolution, Status};

/// Fuzzy distributor model. Crisp values are degenerate trapezoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionProblem {
    /// `a_i`, maximal supply of wholesaler `i`.
    pub supply: Vec<Trapezoid>,
    /// `b_j`, maximal demand of consumer `j`.
    pub demand: Vec<Trapezoid>,
    /// `p_i`, contracted minimal purchase from wholesaler `i`.
    pub min_purchase: Vec<Trapezoid>,
    /// `q_j`, contracted minimal sale to consumer `j`.
    pub min_sale: Vec<Trapezoid>,
    /// `k_i`, reduced purchase price.
    pub purchase_price: Vec<Trapezoid>,
    /// `r_j`, reduced sale price.
    pub sale_price: Vec<Trapezoid>,
    /// `c_ij`, transport cost per unit.
    pub transport_cost: Vec<Vec<Trapezoid>>,
    /// `t_i`, contract purchase price. Not part of the objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract_purchase_price: Option<Vec<Trapezoid>>,
    /// `s_j`, contract sale price. Not part of the objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract_sale_price: Option<Vec<Trapezoid>>,
}

/// A real-valued snapshot of the model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrispInstance {
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
    pub min_purchase: Vec<f64>,
    pub min_sale: Vec<f64>,
    pub purchase_price: Vec<f64>,
    pub sale_price: Vec<f64>,
    pub transport_cost: Vec<Vec<f64>>,
}

fn check_dims(
    what: &str,
    m: usize,
    n: usize,
    row_lens: [usize; 3],
    col_lens: [usize; 3],
    matrix: impl ExactSizeIterator<Item = usize>,
) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("{what}: need M >= 1 and N >= 1")));
    }
    if row_lens.iter().any(|&l| l != m) {
        return Err(Error::DimensionMismatch(format!(
            "{what}: supply, min purchase and purchase price must have length M = {m}"
        )));
    }
    if col_lens.iter().any(|&l| l != n) {
        return Err(Error::DimensionMismatch(format!(
            "{what}: demand, min sale and sale price must have length N = {n}"
        )));
    }
    let rows = matrix.len();
    let mut matrix = matrix;
    if rows != m || matrix.any(|l| l != n) {
        return Err(Error::DimensionMismatch(format!(
            "{what}: transport cost must be {m}x{n}"
        )));
    }
    Ok(())
}

impl DistributionProblem {
    pub fn wholesalers(&self) -> usize {
        self.supply.len()
    }

    pub fn consumers(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.wholesalers(), self.consumers());
        check_dims(
            "problem",
            m,
            n,
            [self.supply.len(), self.min_purchase.len(), self.purchase_price.len()],
            [self.demand.len(), self.min_sale.len(), self.sale_price.len()],
            self.transport_cost.iter().map(Vec::len),
        )?;
        if self.contract_purchase_price.as_ref().is_some_and(|t| t.len() != m) {
            return Err(Error::DimensionMismatch("contract purchase price must have length M".into()));
        }
        if self.contract_sale_price.as_ref().is_some_and(|s| s.len() != n) {
            return Err(Error::DimensionMismatch("contract sale price must have length N".into()));
        }
        Ok(())
    }

    /// `z_ij = r_j - k_i - c_ij` as exact trapezoids.
    pub fn profit_coefficients(&self) -> Vec<Vec<Trapezoid>> {
        self.transport_cost
            .iter()
            .zip(&self.purchase_price)
            .map(|(row, &k)| {
                row.iter()
                    .zip(&self.sale_price)
                    .map(|(&c, &r)| r - k - c)
                    .collect()
            })
            .collect()
    }

    /// Snapshot taking every parameter at its core midpoint.
    pub fn core_midpoint_instance(&self) -> CrispInstance {
        let mid = |v: &[Trapezoid]| v.iter().map(Trapezoid::core_midpoint).collect();
        CrispInstance {
            supply: mid(&self.supply),
            demand: mid(&self.demand),
            min_purchase: mid(&self.min_purchase),
            min_sale: mid(&self.min_sale),
            purchase_price: mid(&self.purchase_price),
            sale_price: mid(&self.sale_price),
            transport_cost: self.transport_cost.iter().map(|row| mid(row)).collect(),
        }
    }

    pub fn is_crisp(&self) -> bool {
        let vectors = [
            &self.supply,
            &self.demand,
            &self.min_purchase,
            &self.min_sale,
            &self.purchase_price,
            &self.sale_price,
        ];
        vectors.iter().flat_map(|v| v.iter()).all(Trapezoid::is_crisp)
            && self.transport_cost.iter().flatten().all(Trapezoid::is_crisp)
    }
}

impl CrispInstance {
    pub fn wholesalers(&self) -> usize {
        self.supply.len()
    }

    pub fn consumers(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.wholesalers(), self.consumers());
        check_dims(
            "crisp instance",
            m,
            n,
            [self.supply.len(), self.min_purchase.len(), self.purchase_price.len()],
            [self.demand.len(), self.min_sale.len(), self.sale_price.len()],
            self.transport_cost.iter().map(Vec::len),
        )?;
        let all = self
            .supply
            .iter()
            .chain(&self.demand)
            .chain(&self.min_purchase)
            .chain(&self.min_sale)
            .chain(&self.purchase_price)
            .chain(&self.sale_price)
            .chain(self.transport_cost.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("crisp instance".into()));
        }
        Ok(())
    }

    pub fn profit_coefficients(&self) -> Vec<Vec<f64>> {
        self.transport_cost
            .iter()
            .zip(&self.purchase_price)
            .map(|(row, k)| {
                row.iter()
                    .zip(&self.sale_price)
                    .map(|(c, r)| r - k - c)
                    .collect()
            })
            .collect()
    }

    /// Builds the benefit-maximization LP with variable `(i, j)` at index
    /// `i * N + j`. Constraint order: supply caps, demand caps, purchase
    /// minimums, sale minimums.
    pub fn to_lp(&self) -> Result<LinearProgram> {
        self.validate()?;
        let (m, n) = (self.wholesalers(), self.consumers());
        let objective = self.profit_coefficients().into_iter().flatten().collect();
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        let row_sum = |i: usize| {
            let mut v = vec![0.0; m * n];
            v[i * n..(i + 1) * n].fill(1.0);
            v
        };
        let col_sum = |j: usize| {
            let mut v = vec![0.0; m * n];
            for i in 0..m {
                v[i * n + j] = 1.0;
            }
            v
        };
        for i in 0..m {
            lp.add_constraint(row_sum(i), Relation::Le, self.supply[i]);
        }
        for j in 0..n {
            lp.add_constraint(col_sum(j), Relation::Le, self.demand[j]);
        }
        for i in 0..m {
            lp.add_constraint(row_sum(i), Relation::Ge, self.min_purchase[i]);
        }
        for j in 0..n {
            lp.add_constraint(col_sum(j), Relation::Ge, self.min_sale[j]);
        }
        Ok(lp)
    }

    /// Solves the benefit LP.
    pub fn solve(&self) -> Result<CrispSolution> {
        let lp = self.to_lp()?;
        let sol = simplex::solve(&lp)?;
        Ok(CrispSolution::from_simplex(sol, self.consumers()))
    }

    /// Checks the necessary feasibility conditions.
    pub fn feasibility_precheck(&self) -> PrecheckReport {
        let mut violations = Vec::new();
        for (i, (&p, &a)) in self.min_purchase.iter().zip(&self.supply).enumerate() {
            if p > a {
                violations.push(Violation::PurchaseExceedsSupply { index: i, min_purchase: p, supply: a });
            }
        }
        for (j, (&q, &b)) in self.min_sale.iter().zip(&self.demand).enumerate() {
            if q > b {
                violations.push(Violation::SaleExceedsDemand { index: j, min_sale: q, demand: b });
            }
        }
        let total_supply: f64 = self.supply.iter().sum();
        let total_demand: f64 = self.demand.iter().sum();
        let total_min_purchase: f64 = self.min_purchase.iter().sum();
        let total_min_sale: f64 = self.min_sale.iter().sum();
        if total_supply < total_min_sale {
            violations.push(Violation::SupplyBelowMinSales { total_supply, total_min_sale });
        }
        if total_demand < total_min_purchase {
            violations.push(Violation::DemandBelowMinPurchases { total_demand, total_min_purchase });
        }
        PrecheckReport { violations }
    }
}

/// Result of [`CrispInstance::feasibility_precheck`]. Passing is necessary,
/// not sufficient, for feasibility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecheckReport {
    pub violations: Vec<Violation>,
}

impl PrecheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    PurchaseExceedsSupply { index: usize, min_purchase: f64, supply: f64 },
    SaleExceedsDemand { index: usize, min_sale: f64, demand: f64 },
    SupplyBelowMinSales { total_supply: f64, total_min_sale: f64 },
    DemandBelowMinPurchases { total_demand: f64, total_min_purchase: f64 },
}

/// Optimal benefit and shipments of one crisp instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrispSolution {
    pub status: Status,
    pub benefit: f64,
    pub shipments: Vec<Vec<f64>>,
    pub iterations: usize,
}

impl CrispSolution {
    fn from_simplex(sol: SimplexSolution, n: usize) -> Self {
        Self {
            status: sol.status,
            benefit: sol.objective_value,
            shipments: sol.x.chunks(n).map(<[f64]>::to_vec).collect(),
            iterations: sol.iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}
