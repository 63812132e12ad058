//! Monte Carlo propagation of Gaussian parameter uncertainty.
//!
//! Every step draws one crisp scenario and solves its benefit LP. The
//! randomness of step `i` comes from a ChaCha stream selected by `i` under
//! the run seed, so results do not depend on how steps are split across
//! threads.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::Trapezoid;
use crate::fuzzy_solver::{fit_trapezoid, FuzzySolution, Quantity};
use crate::ingest::{gaussian_to_trapezoid, BinnedHistogram, ConfidenceLevels, EmpiricalCdf};
use crate::model::{CrispInstance, DistributionProblem};

pub const DEFAULT_STEPS: usize = 10_000;
pub const MIN_BINS: usize = 20;
const MAX_BINS: usize = 10_000;
/// Steps handed to one worker at a time.
const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, sigma: f64) -> Result<Self> {
        if !mean.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidData(format!(
                "gaussian needs finite mean and sigma >= 0, got mean={mean}, sigma={sigma}"
            )));
        }
        Ok(Self { mean, sigma })
    }

    pub fn crisp(value: f64) -> Self {
        Self { mean: value, sigma: 0.0 }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + self.sigma * z
    }
}

/// One Gaussian per model parameter, laid out like [`DistributionProblem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpecs {
    pub supply: Vec<GaussianSpec>,
    pub demand: Vec<GaussianSpec>,
    pub min_purchase: Vec<GaussianSpec>,
    pub min_sale: Vec<GaussianSpec>,
    pub purchase_price: Vec<GaussianSpec>,
    pub sale_price: Vec<GaussianSpec>,
    pub transport_cost: Vec<Vec<GaussianSpec>>,
}

impl ProblemSpecs {
    pub fn wholesalers(&self) -> usize {
        self.supply.len()
    }

    pub fn consumers(&self) -> usize {
        self.demand.len()
    }

    fn map<T>(&self, f: impl Fn(&GaussianSpec) -> T) -> [Vec<T>; 6] {
        let m = |v: &[GaussianSpec]| v.iter().map(&f).collect::<Vec<T>>();
        [
            m(&self.supply),
            m(&self.demand),
            m(&self.min_purchase),
            m(&self.min_sale),
            m(&self.purchase_price),
            m(&self.sale_price),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.means().validate()?;
        let sigmas = self.map(|g| g.sigma);
        let bad = sigmas
            .iter()
            .flatten()
            .chain(self.transport_cost.iter().flatten().map(|g| &g.sigma))
            .any(|s| !(s.is_finite() && *s >= 0.0));
        if bad {
            return Err(Error::InvalidData("gaussian sigma must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// The instance at the means.
    pub fn means(&self) -> CrispInstance {
        let [supply, demand, min_purchase, min_sale, purchase_price, sale_price] = self.map(|g| g.mean);
        CrispInstance {
            supply,
            demand,
            min_purchase,
            min_sale,
            purchase_price,
            sale_price,
            transport_cost: self
                .transport_cost
                .iter()
                .map(|row| row.iter().map(|g| g.mean).collect())
                .collect(),
        }
    }

    /// Fuzzy counterpart with every Gaussian converted to a trapezoid.
    pub fn to_problem(&self, levels: ConfidenceLevels) -> Result<DistributionProblem> {
        let conv = |v: &[GaussianSpec]| -> Result<Vec<Trapezoid>> {
            v.iter().map(|g| gaussian_to_trapezoid(g.mean, g.sigma, levels)).collect()
        };
        let problem = DistributionProblem {
            supply: conv(&self.supply)?,
            demand: conv(&self.demand)?,
            min_purchase: conv(&self.min_purchase)?,
            min_sale: conv(&self.min_sale)?,
            purchase_price: conv(&self.purchase_price)?,
            sale_price: conv(&self.sale_price)?,
            transport_cost: self
                .transport_cost
                .iter()
                .map(|row| conv(row))
                .collect::<Result<_>>()?,
            contract_purchase_price: None,
            contract_sale_price: None,
        };
        problem.validate()?;
        Ok(problem)
    }
}

/// Draws the scenario of step `step`. Parameters are drawn in field order
/// (supply, demand, minimums, prices, then costs row by row).
pub fn sample_instance(specs: &ProblemSpecs, seed: u64, step: u64) -> CrispInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step);
    let mut draw = |v: &[GaussianSpec]| v.iter().map(|g| g.draw(&mut rng)).collect::<Vec<f64>>();
    let supply = draw(&specs.supply);
    let demand = draw(&specs.demand);
    let min_purchase = draw(&specs.min_purchase);
    let min_sale = draw(&specs.min_sale);
    let purchase_price = draw(&specs.purchase_price);
    let sale_price = draw(&specs.sale_price);
    let transport_cost = specs.transport_cost.iter().map(|row| draw(row)).collect();
    CrispInstance {
        supply,
        demand,
        min_purchase,
        min_sale,
        purchase_price,
        sale_price,
        transport_cost,
    }
}

/// Optimal outcome of one feasible step.
#[derive(Debug, Clone, PartialEq)]
pub struct McSample {
    pub step: u64,
    pub benefit: f64,
    /// Row-major shipments.
    pub shipments: Vec<f64>,
}

/// Raw outcomes of a range of steps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct McBatch {
    pub steps: u64,
    pub infeasible: u64,
    /// Feasible samples ordered by step index.
    pub samples: Vec<McSample>,
}

impl McBatch {
    /// Combines two batches over disjoint step ranges.
    pub fn merge(mut self, other: McBatch) -> McBatch {
        self.steps += other.steps;
        self.infeasible += other.infeasible;
        self.samples.extend(other.samples);
        self.samples.sort_by_key(|s| s.step);
        self
    }
}

/// Runs the steps in `steps` sequentially.
pub fn run_steps(specs: &ProblemSpecs, seed: u64, steps: Range<u64>) -> Result<McBatch> {
    let mut batch = McBatch::default();
    for step in steps {
        let inst = sample_instance(specs, seed, step);
        let sol = inst.solve()?;
        batch.steps += 1;
        if sol.is_optimal() {
            batch.samples.push(McSample {
                step,
                benefit: sol.benefit,
                shipments: sol.shipments.into_iter().flatten().collect(),
            });
        } else {
            batch.infeasible += 1;
        }
    }
    Ok(batch)
}

/// Sample statistics and histogram of one output quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantitySummary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: BinnedHistogram,
}

impl QuantitySummary {
    fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_dev: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            histogram: freedman_diaconis_histogram(values)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub steps: u64,
    pub seed: u64,
    pub feasible: u64,
    pub infeasible: u64,
    pub wholesalers: usize,
    pub consumers: usize,
    /// Absent when no step was feasible.
    pub benefit: Option<QuantitySummary>,
    pub shipments: Option<Vec<Vec<QuantitySummary>>>,
    #[serde(skip)]
    pub samples: Vec<McSample>,
}

impl McResult {
    pub fn from_batch(batch: McBatch, seed: u64, wholesalers: usize, consumers: usize) -> Result<Self> {
        let feasible = batch.samples.len() as u64;
        let (benefit, shipments) = if batch.samples.is_empty() {
            (None, None)
        } else {
            let d: Vec<f64> = batch.samples.iter().map(|s| s.benefit).collect();
            let mut cells = Vec::with_capacity(wholesalers);
            for i in 0..wholesalers {
                let mut row = Vec::with_capacity(consumers);
                for j in 0..consumers {
                    let x: Vec<f64> = batch
                        .samples
                        .iter()
                        .map(|s| s.shipments[i * consumers + j])
                        .collect();
                    row.push(QuantitySummary::from_values(&x)?);
                }
                cells.push(row);
            }
            (Some(QuantitySummary::from_values(&d)?), Some(cells))
        };
        Ok(Self {
            steps: batch.steps,
            seed,
            feasible,
            infeasible: batch.infeasible,
            wholesalers,
            consumers,
            benefit,
            shipments,
            samples: batch.samples,
        })
    }

    pub fn summary(&self, quantity: Quantity) -> Option<&QuantitySummary> {
        match quantity {
            Quantity::Benefit => self.benefit.as_ref(),
            Quantity::Shipment(i, j) => self.shipments.as_ref().map(|s| &s[i][j]),
        }
    }
}

/// Runs `steps` scenarios in parallel chunks and merges them in step order.
pub fn run(specs: &ProblemSpecs, steps: usize, seed: u64) -> Result<McResult> {
    if steps == 0 {
        return Err(Error::InvalidData("Monte Carlo needs at least one step".into()));
    }
    specs.validate()?;
    let total = steps as u64;
    let chunks: Vec<Range<u64>> = (0..total)
        .step_by(CHUNK as usize)
        .map(|start| start..(start + CHUNK).min(total))
        .collect();
    let batches = chunks
        .into_par_iter()
        .map(|range| run_steps(specs, seed, range))
        .collect::<Result<Vec<_>>>()?;
    let batch = batches.into_iter().fold(McBatch::default(), McBatch::merge);
    McResult::from_batch(batch, seed, specs.wholesalers(), specs.consumers())
}

/// Equal-width histogram with the Freedman–Diaconis bin width
/// `2 IQR n^(-1/3)` and at least [`MIN_BINS`] bins. Constant data give a
/// point-mass histogram.
pub fn freedman_diaconis_histogram(values: &[f64]) -> Result<BinnedHistogram> {
    if values.is_empty() {
        return Err(Error::InvalidData("cannot bin an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let n = sorted.len();
    if min == max {
        return BinnedHistogram::point_mass(min, n as f64);
    }
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let h = 2.0 * iqr / (n as f64).cbrt();
    let bins = if h > 0.0 {
        ((max - min) / h).ceil() as usize
    } else {
        MIN_BINS
    }
    .clamp(MIN_BINS, MAX_BINS);
    let width = (max - min) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| min + k as f64 * width).collect();
    edges.push(max);
    let mut counts = vec![0.0; bins];
    for v in &sorted {
        let k = (((v - min) / width).floor() as usize).min(bins - 1);
        counts[k] += 1.0;
    }
    BinnedHistogram::new(edges, counts)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub quantity: String,
    pub fuzzy: Trapezoid,
    pub monte_carlo: Trapezoid,
    /// Fuzzy support width over Monte Carlo support width; 1 when both are
    /// zero, absent when only the Monte Carlo width is zero.
    pub width_ratio: Option<f64>,
    pub mc_support_within_fuzzy: bool,
    pub mc_mean: f64,
    pub mc_mean_within_fuzzy_core: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub levels: ConfidenceLevels,
    pub entries: Vec<ComparisonEntry>,
}

impl ComparisonReport {
    pub fn entry(&self, quantity: &str) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| e.quantity == quantity)
    }
}

/// Report label: `D` or `x_ij` with one-based indices.
pub fn quantity_label(quantity: Quantity, wholesalers: usize, consumers: usize) -> String {
    match quantity {
        Quantity::Benefit => "D".to_string(),
        Quantity::Shipment(i, j) if wholesalers < 10 && consumers < 10 => format!("x_{}{}", i + 1, j + 1),
        Quantity::Shipment(i, j) => format!("x_{}_{}", i + 1, j + 1),
    }
}

/// All quantities of an `m x n` model: `D` first, then shipments row-major.
pub fn quantities(wholesalers: usize, consumers: usize) -> impl Iterator<Item = Quantity> {
    std::iter::once(Quantity::Benefit).chain(
        (0..wholesalers).flat_map(move |i| (0..consumers).map(move |j| Quantity::Shipment(i, j))),
    )
}

fn within(inner: f64, lo: f64, hi: f64) -> bool {
    let tol = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
    lo - tol <= inner && inner <= hi + tol
}

/// Compares fuzzy and Monte Carlo results quantity by quantity.
pub fn compare(fz: &FuzzySolution, mc: &McResult, levels: ConfidenceLevels) -> Result<ComparisonReport> {
    if fz.wholesalers != mc.wholesalers || fz.consumers != mc.consumers {
        return Err(Error::DimensionMismatch(format!(
            "fuzzy solution is {}x{}, Monte Carlo result is {}x{}",
            fz.wholesalers, fz.consumers, mc.wholesalers, mc.consumers
        )));
    }
    let levels = ConfidenceLevels::new(levels.core, levels.support)?;
    let mut entries = Vec::new();
    for quantity in quantities(fz.wholesalers, fz.consumers) {
        let label = quantity_label(quantity, fz.wholesalers, fz.consumers);
        let fuzzy = fit_trapezoid(fz, quantity)?;
        let summary = mc
            .summary(quantity)
            .ok_or_else(|| Error::Infeasible("no feasible Monte Carlo sample".into()))?;
        let monte_carlo = EmpiricalCdf::from_histogram(&summary.histogram).to_trapezoid(levels)?;

        let (fw, mw) = (fuzzy.support().width(), monte_carlo.support().width());
        let negligible = |w: f64, t: &Trapezoid| w <= 1e-9 * (1.0 + t.support().hi().abs());
        let width_ratio = match (negligible(fw, &fuzzy), negligible(mw, &monte_carlo)) {
            (true, true) => Some(1.0),
            (_, true) => None,
            _ => Some(fw / mw),
        };
        let (fs, ms) = (fuzzy.support(), monte_carlo.support());
        entries.push(ComparisonEntry {
            quantity: label,
            mc_support_within_fuzzy: within(ms.lo(), fs.lo(), fs.hi()) && within(ms.hi(), fs.lo(), fs.hi()),
            mc_mean: summary.mean,
            mc_mean_within_fuzzy_core: within(summary.mean, fuzzy.core().lo(), fuzzy.core().hi()),
            fuzzy,
            monte_carlo,
            width_ratio,
        });
    }
    Ok(ComparisonReport { levels, entries })
}
