//! Conversion of empirical data into trapezoidal fuzzy numbers.
//!
//! Samples or histograms are turned into a piecewise-linear cumulative
//! function. Two central confidence intervals read off that function give
//! the support (wide level) and the core (narrow level) of the trapezoid.
//! Gaussian parameters take the same route with the analytic quantiles.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fuzzy::Trapezoid;
use crate::interval::Interval;

/// Default confidence level of the trapezoid core.
pub const DEFAULT_CORE_LEVEL: f64 = 0.30;
/// Default confidence level of the trapezoid support.
pub const DEFAULT_SUPPORT_LEVEL: f64 = 0.90;

/// Pair of central confidence levels used to build trapezoids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceLevels {
    pub core: f64,
    pub support: f64,
}

impl ConfidenceLevels {
    pub fn new(core: f64, support: f64) -> Result<Self> {
        if !(core > 0.0 && core < support && support < 1.0) {
            return Err(Error::InvalidConfidence(format!(
                "need 0 < core < support < 1, got core={core}, support={support}"
            )));
        }
        Ok(Self { core, support })
    }
}

impl Default for ConfidenceLevels {
    fn default() -> Self {
        Self {
            core: DEFAULT_CORE_LEVEL,
            support: DEFAULT_SUPPORT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidData("sample set is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("non-finite sample {v}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Parses one value per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| {
                Error::InvalidData(format!("line {}: cannot parse {line:?}", lineno + 1))
            })?;
            values.push(v);
        }
        Self::new(values)
    }

    pub fn read(path: &Path) -> std::io::Result<Result<Self>> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }
}

/// Histogram with `m` bins over `m + 1` edges.
///
/// A single bin with coinciding edges is accepted and denotes a point mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedHistogram {
    edges: Vec<f64>,
    counts: Vec<f64>,
}

impl BinnedHistogram {
    pub fn new(edges: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        if counts.is_empty() || edges.len() != counts.len() + 1 {
            return Err(Error::InvalidData(format!(
                "histogram needs m >= 1 bins and m + 1 edges, got {} edges and {} counts",
                edges.len(),
                counts.len()
            )));
        }
        if edges.iter().chain(&counts).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite histogram entry".into()));
        }
        let point_mass = counts.len() == 1 && edges[0] == edges[1];
        if !point_mass && edges.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less)) {
            return Err(Error::InvalidData("histogram edges must be strictly increasing".into()));
        }
        if counts.iter().any(|&c| c < 0.0) {
            return Err(Error::InvalidData("negative histogram count".into()));
        }
        let total: f64 = counts.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidData("histogram total count is zero".into()));
        }
        Ok(Self { edges, counts })
    }

    pub fn point_mass(value: f64, count: f64) -> Result<Self> {
        Self::new(vec![value, value], vec![count])
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn is_point_mass(&self) -> bool {
        self.counts.len() == 1 && self.edges[0] == self.edges[1]
    }

    /// Parses `bin_lo,bin_hi,count` rows; an optional header row is skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut edges: Vec<f64> = Vec::new();
        let mut counts = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|f| f.parse::<f64>()).collect();
            let row = match parsed {
                Ok(row) if row.len() == 3 => row,
                Err(_) if lineno == 0 => continue,
                _ => {
                    return Err(Error::InvalidData(format!(
                        "line {}: expected bin_lo,bin_hi,count, got {line:?}",
                        lineno + 1
                    )))
                }
            };
            match edges.last() {
                None => edges.push(row[0]),
                Some(&prev) if prev != row[0] => {
                    return Err(Error::InvalidData(format!(
                        "line {}: bin starts at {} but previous bin ended at {prev}",
                        lineno + 1,
                        row[0]
                    )))
                }
                Some(_) => {}
            }
            edges.push(row[1]);
            counts.push(row[2]);
        }
        Self::new(edges, counts)
    }

    pub fn to_csv(&self) -> String {
        self.to_csv_with(|v| v.to_string())
    }

    /// CSV rendering with a caller-supplied number format.
    pub fn to_csv_with(&self, fmt: impl Fn(f64) -> String) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (i, count) in self.counts.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt(self.edges[i]),
                fmt(self.edges[i + 1]),
                count
            );
        }
        out
    }
}

/// Piecewise-linear cumulative distribution through ascending knots.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl EmpiricalCdf {
    /// Builds a CDF from `(x, F(x))` knots. `x` must be nondecreasing, `F`
    /// nondecreasing from 0 to 1.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidData("CDF needs at least one knot".into()));
        }
        let (xs, fs): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
        if xs.iter().chain(&fs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite CDF knot".into()));
        }
        if xs.windows(2).any(|w| w[0] > w[1]) || fs.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidData("CDF knots must be nondecreasing".into()));
        }
        let point_mass = xs[0] == xs[xs.len() - 1];
        if !point_mass && (fs[0] != 0.0 || fs[fs.len() - 1] != 1.0) {
            return Err(Error::InvalidData("CDF must run from 0 to 1".into()));
        }
        Ok(Self { xs, fs })
    }

    /// Linear interpolation between order statistics, `F(x_(k)) = k / (n - 1)`
    /// for zero-based `k`.
    pub fn from_samples(samples: &SampleSet) -> Self {
        let mut xs = samples.values().to_vec();
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let fs = if n == 1 {
            vec![1.0]
        } else {
            (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
        };
        if xs[0] == xs[n - 1] {
            return Self {
                xs: vec![xs[0]],
                fs: vec![1.0],
            };
        }
        Self { xs, fs }
    }

    /// Mass accumulated bin by bin, linear inside each bin.
    pub fn from_histogram(hist: &BinnedHistogram) -> Self {
        if hist.is_point_mass() {
            return Self {
                xs: vec![hist.edges[0]],
                fs: vec![1.0],
            };
        }
        let total = hist.total();
        let mut xs = Vec::with_capacity(hist.edges.len());
        let mut fs = Vec::with_capacity(hist.edges.len());
        let mut acc = 0.0;
        xs.push(hist.edges[0]);
        fs.push(0.0);
        for (i, count) in hist.counts.iter().enumerate() {
            acc += count;
            xs.push(hist.edges[i + 1]);
            fs.push((acc / total).min(1.0));
        }
        *fs.last_mut().unwrap() = 1.0;
        Self { xs, fs }
    }

    pub fn support_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn support_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn is_point_mass(&self) -> bool {
        self.support_min() == self.support_max()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.support_min() {
            return 0.0;
        }
        if x >= self.support_max() {
            return 1.0;
        }
        // first knot strictly right of x; always in 1..len here
        let next = self.xs.partition_point(|&k| k <= x);
        let prev = next - 1;
        let (x0, x1) = (self.xs[prev], self.xs[next]);
        let (f0, f1) = (self.fs[prev], self.fs[next]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    /// Smallest `x` with `F(x) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 || self.is_point_mass() {
            return self.support_min();
        }
        let idx = self.fs.partition_point(|&f| f < p);
        if idx == 0 {
            return self.xs[0];
        }
        if idx == self.fs.len() {
            return self.support_max();
        }
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (f0, f1) = (self.fs[idx - 1], self.fs[idx]);
        if x1 == x0 {
            return x0;
        }
        (x0 + (p - f0) / (f1 - f0) * (x1 - x0)).clamp(x0, x1)
    }

    /// Central equal-tail interval of probability `level`.
    pub fn confidence_interval(&self, level: f64) -> Result<Interval> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidConfidence(format!(
                "confidence level must lie in (0, 1), got {level}"
            )));
        }
        let lo = self.quantile(0.5 * (1.0 - level));
        let hi = self.quantile(0.5 * (1.0 + level));
        Ok(Interval::spanning(lo, hi))
    }

    /// Support from the wide interval, core from the narrow one.
    pub fn to_trapezoid(&self, levels: ConfidenceLevels) -> Result<Trapezoid> {
        let levels = ConfidenceLevels::new(levels.core, levels.support)?;
        let core = self.confidence_interval(levels.core)?;
        let support = self.confidence_interval(levels.support)?;
        Trapezoid::from_cuts(support, core)
    }
}

/// Trapezoid of a normal distribution `N(mean, sigma^2)` from its analytic
/// central intervals `mean ± z((1 + γ) / 2) · sigma`.
pub fn gaussian_to_trapezoid(mean: f64, sigma: f64, levels: ConfidenceLevels) -> Result<Trapezoid> {
    let levels = ConfidenceLevels::new(levels.core, levels.support)?;
    if !mean.is_finite() || !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidData(format!(
            "gaussian needs finite mean and sigma >= 0, got mean={mean}, sigma={sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(Trapezoid::crisp(mean));
    }
    let z_core = standard_normal_quantile(0.5 * (1.0 + levels.core));
    let z_support = standard_normal_quantile(0.5 * (1.0 + levels.support));
    Trapezoid::new(
        mean - z_support * sigma,
        mean - z_core * sigma,
        mean + z_core * sigma,
        mean + z_support * sigma,
    )
}

pub(crate) fn standard_normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}
