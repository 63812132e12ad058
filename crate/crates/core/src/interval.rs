//! Closed real intervals and the probabilistic ordering `P(A >= B)`.
//!
//! An α-cut of a fuzzy number is an [`Interval`]; everything the fuzzy
//! solver does per level is expressed in terms of these values.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on interval endpoints.
pub const ENDPOINT_TOL: f64 = 1e-9;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(value: f64) -> Self {
        Self { lo: value, hi: value }
    }

    /// Builds `[min(x, y), max(x, y)]`.
    pub(crate) fn spanning(x: f64, y: f64) -> Self {
        Self {
            lo: x.min(y),
            hi: x.max(y),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() <= ENDPOINT_TOL
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo - ENDPOINT_TOL <= x && x <= self.hi + ENDPOINT_TOL
    }

    /// `self ⊆ other`, up to [`ENDPOINT_TOL`].
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo - ENDPOINT_TOL <= self.lo && self.hi <= other.hi + ENDPOINT_TOL
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn scale(&self, k: f64) -> Interval {
        Interval::spanning(self.lo * k, self.hi * k)
    }

    /// Probability that a uniform draw from `self` is at least an independent
    /// uniform draw from `other`.
    ///
    /// Degenerate operands are handled as point masses; two coinciding points
    /// compare as 0.5.
    pub fn prob_geq(&self, other: &Interval) -> f64 {
        let (a, b) = (self, other);
        let wa = a.width();
        let wb = b.width();
        let p = match (wa > ENDPOINT_TOL, wb > ENDPOINT_TOL) {
            (false, false) => {
                let (x, y) = (a.midpoint(), b.midpoint());
                if (x - y).abs() <= ENDPOINT_TOL {
                    0.5
                } else if x > y {
                    1.0
                } else {
                    0.0
                }
            }
            // point against an interval: the fraction of `b` lying at or below `x`
            (false, true) => (a.midpoint() - b.lo) / wb,
            (true, false) => (a.hi - b.midpoint()) / wa,
            (true, true) if a.lo >= b.hi => 1.0,
            (true, true) if a.hi <= b.lo => 0.0,
            (true, true) => {
                (ramp_integral(a.hi, b.lo, b.hi) - ramp_integral(a.lo, b.lo, b.hi)) / wa
            }
        };
        p.clamp(0.0, 1.0)
    }
}

/// Antiderivative of `t -> clamp((t - lo) / (hi - lo), 0, 1)` vanishing at `lo`.
fn ramp_integral(t: f64, lo: f64, hi: f64) -> f64 {
    let w = hi - lo;
    if t <= lo {
        0.0
    } else if t <= hi {
        let s = t - lo;
        s * s / (2.0 * w)
    } else {
        0.5 * w + (t - hi)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        Interval {
            lo: products.iter().copied().fold(f64::INFINITY, f64::min),
            hi: products.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
