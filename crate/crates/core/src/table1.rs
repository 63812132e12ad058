//! The bundled 3x3 distributor instance: Gaussian parameters with the means
//! below and a common standard deviation.

use crate::fuzzy::Trapezoid;
use crate::ingest::ConfidenceLevels;
use crate::model::{CrispInstance, DistributionProblem};
use crate::monte_carlo::{GaussianSpec, ProblemSpecs};

/// The problem file shipped with the crate (all sigmas 10).
pub const PROBLEM_JSON: &str = include_str!("../data/table1.json");

pub const SIGMA: f64 = 10.0;

/// Optimal benefit of the instance at the means.
pub const MEAN_OPTIMUM: f64 = 781_030.0;

pub const SUPPLY: [f64; 3] = [460.0, 460.0, 610.0];
pub const DEMAND: [f64; 3] = [410.0, 510.0, 610.0];
pub const MIN_PURCHASE: [f64; 3] = [440.0, 440.0, 590.0];
pub const MIN_SALE: [f64; 3] = [390.0, 490.0, 590.0];
pub const PURCHASE_PRICE: [f64; 3] = [590.0, 480.0, 570.0];
pub const SALE_PRICE: [f64; 3] = [990.0, 1100.0, 1180.0];
pub const TRANSPORT_COST: [[f64; 3]; 3] = [
    [100.0, 30.0, 100.0],
    [110.0, 36.0, 405.0],
    [120.0, 148.0, 11.0],
];
pub const CONTRACT_PURCHASE_PRICE: [f64; 3] = [600.0, 491.0, 581.0];
pub const CONTRACT_SALE_PRICE: [f64; 3] = [1000.0, 1130.0, 1197.0];

pub fn means() -> CrispInstance {
    CrispInstance {
        supply: SUPPLY.to_vec(),
        demand: DEMAND.to_vec(),
        min_purchase: MIN_PURCHASE.to_vec(),
        min_sale: MIN_SALE.to_vec(),
        purchase_price: PURCHASE_PRICE.to_vec(),
        sale_price: SALE_PRICE.to_vec(),
        transport_cost: TRANSPORT_COST.iter().map(|r| r.to_vec()).collect(),
    }
}

/// Every parameter Gaussian with the table mean and standard deviation `sigma`.
pub fn specs(sigma: f64) -> ProblemSpecs {
    let g = |v: &[f64]| -> Vec<GaussianSpec> {
        v.iter().map(|&mean| GaussianSpec { mean, sigma }).collect()
    };
    ProblemSpecs {
        supply: g(&SUPPLY),
        demand: g(&DEMAND),
        min_purchase: g(&MIN_PURCHASE),
        min_sale: g(&MIN_SALE),
        purchase_price: g(&PURCHASE_PRICE),
        sale_price: g(&SALE_PRICE),
        transport_cost: TRANSPORT_COST.iter().map(|r| g(r)).collect(),
    }
}

/// Fuzzy instance from the Gaussians, including the contract prices.
pub fn problem(sigma: f64, levels: ConfidenceLevels) -> DistributionProblem {
    let mut p = specs(sigma)
        .to_problem(levels)
        .expect("table parameters are valid");
    let conv = |v: &[f64]| -> Vec<Trapezoid> {
        v.iter()
            .map(|&m| crate::ingest::gaussian_to_trapezoid(m, sigma, levels).expect("valid"))
            .collect()
    };
    p.contract_purchase_price = Some(conv(&CONTRACT_PURCHASE_PRICE));
    p.contract_sale_price = Some(conv(&CONTRACT_SALE_PRICE));
    p
}

/// The instance with every parameter crisp at its mean.
pub fn crisp_problem() -> DistributionProblem {
    problem(0.0, ConfidenceLevels::default())
}
