//! Interval algebra on the real line, binary step functions and
//! piecewise-constant probability densities.
//!
//! Intervals are half-open `[lo, hi)`. Single points never carry probability
//! mass, so nothing here distinguishes open from closed endpoints beyond the
//! convention used by [`StepFunction::value_at`].

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for every geometric predicate. Domains are O(1).
pub const TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("non-finite interval [{lo}, {hi})")));
        }
        if lo >= hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// True when `[lo, hi)` lies inside `self` up to [`TOL`].
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.lo - TOL && hi <= self.hi + TOL
    }
}

/// A finite union of intervals in canonical form: sorted, pairwise disjoint,
/// and maximally merged, so two sets describing the same region compare equal.
#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl PartialEq for IntervalSet {
    fn eq(&self, other: &Self) -> bool {
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| (a.lo - b.lo).abs() <= TOL && (a.hi - b.hi).abs() <= TOL)
    }
}

impl From<Interval> for IntervalSet {
    fn from(interval: Interval) -> Self {
        Self {
            intervals: vec![interval],
        }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a canonical set from arbitrary `(lo, hi)` pairs. Pairs shorter
    /// than [`TOL`] are dropped, overlapping or touching pairs are merged.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<(f64, f64)> = pairs
            .into_iter()
            .filter(|&(lo, hi)| hi - lo > TOL)
            .collect();
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut intervals: Vec<Interval> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match intervals.last_mut() {
                Some(last) if lo <= last.hi + TOL => {
                    if hi > last.hi {
                        last.hi = hi;
                    }
                }
                _ => intervals.push(Interval { lo, hi }),
            }
        }
        Self { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.hi <= x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_pairs(
            self.intervals
                .iter()
                .chain(&other.intervals)
                .map(|iv| (iv.lo, iv.hi)),
        )
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.max(b[j].lo);
            let hi = a[i].hi.min(b[j].hi);
            if hi > lo {
                out.push((lo, hi));
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_pairs(out)
    }

    pub fn subtract(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let mut j = 0;
        for iv in &self.intervals {
            let mut cursor = iv.lo;
            while j < other.intervals.len() && other.intervals[j].hi <= cursor {
                j += 1;
            }
            let mut k = j;
            while k < other.intervals.len() && other.intervals[k].lo < iv.hi {
                let cut = other.intervals[k];
                if cut.lo > cursor {
                    out.push((cursor, cut.lo));
                }
                cursor = cursor.max(cut.hi);
                k += 1;
            }
            if cursor < iv.hi {
                out.push((cursor, iv.hi));
            }
        }
        Self::from_pairs(out)
    }

    /// `domain \ self`.
    pub fn complement_in(&self, domain: Interval) -> Self {
        IntervalSet::from(domain).subtract(self)
    }
}

/// Binary piecewise-constant function on an interval.
///
/// The value at `x` is `first_value` flipped once for every breakpoint `<= x`,
/// so values alternate at each breakpoint and every function has exactly one
/// representation.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    domain: Interval,
    breakpoints: Vec<f64>,
    first_value: bool,
}

impl StepFunction {
    pub fn new(domain: Interval, breakpoints: Vec<f64>, first_value: bool) -> Result<Self> {
        for (i, &b) in breakpoints.iter().enumerate() {
            if !(b > domain.lo && b < domain.hi) {
                return Err(Error::Domain(format!(
                    "breakpoint {b} not strictly inside [{}, {})",
                    domain.lo, domain.hi
                )));
            }
            if i > 0 && b <= breakpoints[i - 1] {
                return Err(Error::Argument(format!(
                    "breakpoints must be strictly increasing (got {} then {b})",
                    breakpoints[i - 1]
                )));
            }
        }
        Ok(Self {
            domain,
            breakpoints,
            first_value,
        })
    }

    pub fn constant(domain: Interval, value: bool) -> Self {
        Self {
            domain,
            breakpoints: Vec::new(),
            first_value: value,
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn first_value(&self) -> bool {
        self.first_value
    }

    pub fn value_at(&self, x: f64) -> bool {
        let crossed = self.breakpoints.partition_point(|&b| b <= x);
        self.first_value ^ (crossed % 2 == 1)
    }

    /// Maximal constant pieces, left to right.
    pub fn segments(&self) -> impl Iterator<Item = (Interval, bool)> + '_ {
        let n = self.breakpoints.len();
        (0..=n).map(move |i| {
            let lo = if i == 0 {
                self.domain.lo
            } else {
                self.breakpoints[i - 1]
            };
            let hi = if i == n {
                self.domain.hi
            } else {
                self.breakpoints[i]
            };
            (Interval { lo, hi }, self.first_value ^ (i % 2 == 1))
        })
    }

    /// Region of the common domain where `pred` holds for the values of all
    /// `functions` at a point.
    pub fn region_where<F>(functions: &[&StepFunction], mut pred: F) -> Result<IntervalSet>
    where
        F: FnMut(&[bool]) -> bool,
    {
        let Some(first) = functions.first() else {
            return Ok(IntervalSet::empty());
        };
        let domain = first.domain;
        if functions.iter().any(|f| !same_domain(f.domain, domain)) {
            return Err(Error::Domain("step functions on different domains".into()));
        }
        let mut cuts: Vec<f64> = functions
            .iter()
            .flat_map(|f| f.breakpoints.iter().copied())
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        cuts.dedup();

        let mut values = vec![false; functions.len()];
        let mut pairs = Vec::new();
        let mut lo = domain.lo;
        for hi in cuts.into_iter().chain(std::iter::once(domain.hi)) {
            if hi > lo {
                let mid = 0.5 * (lo + hi);
                for (v, f) in values.iter_mut().zip(functions) {
                    *v = f.value_at(mid);
                }
                if pred(&values) {
                    pairs.push((lo, hi));
                }
            }
            lo = hi;
        }
        Ok(IntervalSet::from_pairs(pairs))
    }
}

fn same_domain(a: Interval, b: Interval) -> bool {
    (a.lo - b.lo).abs() <= TOL && (a.hi - b.hi).abs() <= TOL
}

/// `{x : f(x) != h(x)}`.
pub fn disagreement_region(f: &StepFunction, h: &StepFunction) -> Result<IntervalSet> {
    StepFunction::region_where(&[f, h], |v| v[0] != v[1])
}

/// Piecewise-constant probability density with strictly positive pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    domain: Interval,
    breakpoints: Vec<f64>,
    densities: Vec<f64>,
    /// CDF at the left edge of each piece, plus the total mass at the end.
    cumulative: Vec<f64>,
}

impl Density {
    pub fn new(domain: Interval, breakpoints: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        // Reuse the step-function checks for ordering and containment.
        StepFunction::new(domain, breakpoints.clone(), false)?;
        if densities.len() != breakpoints.len() + 1 {
            return Err(Error::Argument(format!(
                "{} breakpoints need {} density values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                densities.len()
            )));
        }
        if let Some(bad) = densities.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
            return Err(Error::Argument(format!(
                "density values must be finite and strictly positive, got {bad}"
            )));
        }
        let mut cumulative = Vec::with_capacity(densities.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for (i, d) in densities.iter().enumerate() {
            let lo = if i == 0 {
                domain.lo
            } else {
                breakpoints[i - 1]
            };
            let hi = if i == breakpoints.len() {
                domain.hi
            } else {
                breakpoints[i]
            };
            acc += d * (hi - lo);
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > TOL {
            return Err(Error::Argument(format!(
                "density integrates to {acc}, expected 1"
            )));
        }
        Ok(Self {
            domain,
            breakpoints,
            densities,
            cumulative,
        })
    }

    pub fn uniform(domain: Interval) -> Self {
        let d = 1.0 / domain.len();
        Self {
            domain,
            breakpoints: Vec::new(),
            densities: vec![d],
            cumulative: vec![0.0, 1.0],
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn segments(&self) -> impl Iterator<Item = (Interval, f64)> + '_ {
        let n = self.breakpoints.len();
        (0..=n).map(move |i| {
            let lo = if i == 0 {
                self.domain.lo
            } else {
                self.breakpoints[i - 1]
            };
            let hi = if i == n {
                self.domain.hi
            } else {
                self.breakpoints[i]
            };
            (Interval { lo, hi }, self.densities[i])
        })
    }

    /// CDF, clamped to 0 below and 1 above the domain.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.domain.lo {
            return 0.0;
        }
        if x >= self.domain.hi {
            return self.total_mass();
        }
        let i = self.breakpoints.partition_point(|&b| b <= x);
        let lo = if i == 0 {
            self.domain.lo
        } else {
            self.breakpoints[i - 1]
        };
        self.cumulative[i] + self.densities[i] * (x - lo)
    }

    fn total_mass(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    pub fn mass(&self, interval: Interval) -> Result<f64> {
        if !self.domain.covers(interval.lo, interval.hi) {
            return Err(Error::Domain(format!(
                "interval [{}, {}) outside domain [{}, {})",
                interval.lo, interval.hi, self.domain.lo, self.domain.hi
            )));
        }
        Ok((self.cdf(interval.hi) - self.cdf(interval.lo)).max(0.0))
    }

    /// Probability of a region.
    pub fn measure(&self, set: &IntervalSet) -> Result<f64> {
        let mut total = 0.0;
        for iv in set.intervals() {
            total += self.mass(*iv)?;
        }
        Ok(total.min(1.0))
    }

    /// Inverse CDF.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Argument(format!(
                "quantile level {u} outside [0, 1]"
            )));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.domain.lo;
        }
        if u >= self.total_mass() {
            return self.domain.hi;
        }
        let i = (self.cumulative[1..].partition_point(|&c| c <= u)).min(self.densities.len() - 1);
        let lo = if i == 0 {
            self.domain.lo
        } else {
            self.breakpoints[i - 1]
        };
        let hi = if i == self.breakpoints.len() {
            self.domain.hi
        } else {
            self.breakpoints[i]
        };
        (lo + (u - self.cumulative[i]) / self.densities[i]).clamp(lo, hi)
    }
}
