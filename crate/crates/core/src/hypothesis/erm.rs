//! Exact ERM for k-boundary classes.
//!
//! Both the mistake count and the true risk of `f_{b_1..b_k}` split into a
//! constant plus one term per boundary, where boundary `i` contributes with
//! sign `(-1)^(i+1)`. The empirical term is constant between consecutive
//! sample points and the true-risk term is linear between breakpoints of the
//! labelling function and of the density, so an optimum over the closure of
//! every empirical cell sits on a finite list of positions. A dynamic
//! programme over that list, with the ordering constraint `b_1 <= ... <= b_k`,
//! minimises the mistake count and, among minimisers, maximises the true risk.

use std::cmp::Ordering;

use crate::error::Result;
use crate::piecewise::{Density, Interval, StepFunction};

use super::{realize_boundaries, HypothesisClassSpec, KBoundary, LabeledSample, Realize};

/// Two true risks closer than this are treated as tied.
const RISK_TIE: f64 = 1e-12;

/// Closed-form risks `R_f(f_{b})` against a fixed reference step function.
#[derive(Debug, Clone)]
pub(crate) struct RiskProfile {
    domain: Interval,
    reference: StepFunction,
    /// Mass of `{f = 1}` left of each reference segment.
    ones_before_segment: Vec<f64>,
    mu: Density,
}

impl RiskProfile {
    pub(crate) fn new(reference: &StepFunction, mu: &Density) -> Self {
        let mut ones_before_segment = Vec::with_capacity(reference.breakpoints().len() + 1);
        let mut acc = 0.0;
        for (seg, value) in reference.segments() {
            ones_before_segment.push(acc);
            if value {
                acc += mu.cdf(seg.hi()) - mu.cdf(seg.lo());
            }
        }
        Self {
            domain: reference.domain(),
            reference: reference.clone(),
            ones_before_segment,
            mu: mu.clone(),
        }
    }

    /// `P{x < t, f(x) = 1}`.
    fn ones_before(&self, t: f64) -> f64 {
        let t = t.clamp(self.domain.lo(), self.domain.hi());
        let bps = self.reference.breakpoints();
        let i = bps.partition_point(|&b| b <= t);
        let mut acc = self.ones_before_segment[i];
        let seg_value = self.reference.first_value() ^ (i % 2 == 1);
        if seg_value {
            let seg_lo = if i == 0 { self.domain.lo() } else { bps[i - 1] };
            acc += self.mu.cdf(t) - self.mu.cdf(seg_lo);
        }
        acc
    }

    /// Contribution of an odd-indexed boundary at `t`:
    /// `P{x < t, f = 1} - P{x < t, f = 0}`.
    pub(crate) fn odd_term(&self, t: f64) -> f64 {
        let ones = self.ones_before(t);
        let all = self.mu.cdf(t.clamp(self.domain.lo(), self.domain.hi()));
        2.0 * ones - all
    }

    /// Risk of the constant function `value` restricted to the whole domain.
    fn constant_term(&self, k: usize) -> f64 {
        let ones = self.ones_before(self.domain.hi());
        if k % 2 == 1 { 1.0 - ones } else { ones }.max(0.0)
    }

    /// `R_f` of the hypothesis with sorted `boundaries`.
    pub(crate) fn risk_of(&self, boundaries: &[f64]) -> f64 {
        let mut r = self.constant_term(boundaries.len());
        for (i, &b) in boundaries.iter().enumerate() {
            let t = self.odd_term(b);
            if i % 2 == 0 {
                r += t;
            } else {
                r -= t;
            }
        }
        r.max(0.0)
    }
}

/// Output of [`erm_kboundary`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErmFit {
    /// Canonical parameters of the selected function.
    pub hypothesis: KBoundary,
    /// The closure vertex the optimiser returned, before canonicalisation.
    pub parameters: Vec<f64>,
    /// Minimal number of mistakes over the cell closure.
    pub errors: usize,
    /// True risk against the labelling function.
    pub true_risk: f64,
}

/// Reusable ERM solver for one labelling function, density and class.
#[derive(Debug, Clone)]
pub struct ErmSolver {
    k: usize,
    domain: Interval,
    profile: RiskProfile,
    /// Kink positions of the true risk with their precomputed odd terms.
    grid: Vec<(f64, f64)>,
    positions: Vec<Position>,
    err: Vec<i64>,
    gain: Vec<f64>,
    back: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Position {
    value: f64,
    /// `#{before, y = 1} - #{before, y = 0}`.
    label_balance: i64,
    odd_term: f64,
}

impl ErmSolver {
    pub fn new(labeler: &StepFunction, mu: &Density, k: usize) -> Result<Self> {
        HypothesisClassSpec::k_boundary(k)?;
        let domain = mu.domain();
        labeler.realize(domain)?;
        let profile = RiskProfile::new(labeler, mu);
        let mut values: Vec<f64> = vec![domain.lo(), domain.hi()];
        values.extend_from_slice(labeler.breakpoints());
        values.extend_from_slice(mu.breakpoints());
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        values.dedup();
        let grid = values
            .into_iter()
            .map(|v| (v, profile.odd_term(v)))
            .collect();
        Ok(Self {
            k,
            domain,
            profile,
            grid,
            positions: Vec::new(),
            err: Vec::new(),
            gain: Vec::new(),
            back: Vec::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// True risk of arbitrary sorted boundaries against the labelling function.
    pub fn true_risk(&self, boundaries: &[f64]) -> f64 {
        self.profile.risk_of(boundaries)
    }

    /// ERM on `points`, which are sorted in place.
    pub fn solve(&mut self, points: &mut [(f64, bool)]) -> Result<ErmFit> {
        for &(x, _) in points.iter() {
            if !self.domain.contains(x) {
                return Err(crate::Error::Domain(format!(
                    "sample point {x} outside [{}, {})",
                    self.domain.lo(),
                    self.domain.hi()
                )));
            }
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        self.build_positions(points);

        let total_ones = points.iter().filter(|p| p.1).count() as i64;
        let total_zeros = points.len() as i64 - total_ones;
        // Mistakes of the final constant piece, whose value is k mod 2.
        let err_const = if self.k % 2 == 1 {
            total_zeros
        } else {
            total_ones
        };
        let risk_const = self.profile.constant_term(self.k);

        let p = self.positions.len();
        self.err.clear();
        self.err.resize(self.k * p, 0);
        self.gain.clear();
        self.gain.resize(self.k * p, 0.0);
        self.back.clear();
        self.back.resize(self.k * p, 0);

        for layer in 0..self.k {
            let sign: i64 = if layer % 2 == 0 { 1 } else { -1 };
            let mut best: usize = 0;
            for pos in 0..p {
                let (e_prev, r_prev) = if layer == 0 {
                    (0, 0.0)
                } else {
                    let prev = layer - 1;
                    if pos > 0 && self.cmp_states(prev, pos, best) == Ordering::Less {
                        best = pos;
                    }
                    self.back[layer * p + pos] = best as u32;
                    (self.err[prev * p + best], self.gain[prev * p + best])
                };
                let here = self.positions[pos];
                self.err[layer * p + pos] = e_prev + sign * here.label_balance;
                self.gain[layer * p + pos] = r_prev + sign as f64 * here.odd_term;
            }
        }

        let last = self.k - 1;
        let mut best = 0;
        for pos in 1..p {
            if self.cmp_states(last, pos, best) == Ordering::Less {
                best = pos;
            }
        }
        let path = self.path(last, best);
        let parameters: Vec<f64> = path.iter().map(|&i| self.positions[i].value).collect();
        let errors = err_const + self.err[last * p + best];
        let true_risk = (risk_const + self.gain[last * p + best]).max(0.0);
        let realized = realize_boundaries(&parameters, self.domain)?;
        Ok(ErmFit {
            hypothesis: KBoundary::canonical(&realized, self.k)?,
            parameters,
            errors: usize::try_from(errors)
                .map_err(|_| crate::Error::Internal(format!("negative mistake count {errors}")))?,
            true_risk,
        })
    }

    fn build_positions(&mut self, points: &[(f64, bool)]) {
        self.positions.clear();
        let mut balance: i64 = 0;
        let (mut i, mut j) = (0, 0);
        while i < points.len() || j < self.grid.len() {
            let v = match (points.get(i), self.grid.get(j)) {
                (Some(s), Some(g)) => s.0.min(g.0),
                (Some(s), None) => s.0,
                (None, Some(g)) => g.0,
                (None, None) => unreachable!(),
            };
            let odd_term = match self.grid.get(j) {
                Some(&(gv, t)) if gv == v => {
                    j += 1;
                    t
                }
                _ => self.profile.odd_term(v),
            };
            // Boundary just left of the points at `v`: they fall on its right.
            self.positions.push(Position {
                value: v,
                label_balance: balance,
                odd_term,
            });
            let start = i;
            while i < points.len() && points[i].0 == v {
                balance += if points[i].1 { 1 } else { -1 };
                i += 1;
            }
            if i > start {
                // Same boundary value with the points at `v` on its left.
                self.positions.push(Position {
                    value: v,
                    label_balance: balance,
                    odd_term,
                });
            }
        }
    }

    /// `Less` when state `a` of `layer` beats state `b`: fewer mistakes, then
    /// larger true risk, then lexicographically smaller boundary prefix.
    fn cmp_states(&self, layer: usize, a: usize, b: usize) -> Ordering {
        let p = self.positions.len();
        let (ea, eb) = (self.err[layer * p + a], self.err[layer * p + b]);
        if ea != eb {
            return ea.cmp(&eb);
        }
        let (ra, rb) = (self.gain[layer * p + a], self.gain[layer * p + b]);
        if (ra - rb).abs() > RISK_TIE {
            return rb.partial_cmp(&ra).unwrap_or(Ordering::Equal);
        }
        self.path(layer, a).cmp(&self.path(layer, b))
    }

    fn path(&self, layer: usize, end: usize) -> Vec<usize> {
        let p = self.positions.len();
        let mut out = vec![0; layer + 1];
        let mut cur = end;
        for l in (0..=layer).rev() {
            out[l] = cur;
            if l > 0 {
                cur = self.back[l * p + cur] as usize;
            }
        }
        out
    }
}

/// ERM over a k-boundary class with labels from `g`.
///
/// Among empirical minimisers the hypothesis with the largest true risk
/// `R_g` wins, taken over the closure of each minimising cell; remaining ties
/// go to the lexicographically smallest boundary vector. With an empty sample
/// every hypothesis ties and the worst one over the grid of `g`'s breakpoints
/// and the domain ends is returned.
pub fn erm_kboundary(
    sample: &LabeledSample,
    spec: HypothesisClassSpec,
    mu: &Density,
    g: &StepFunction,
) -> Result<ErmFit> {
    let k = spec.require_k()?;
    let mut solver = ErmSolver::new(g, mu, k)?;
    let mut points = sample.points.clone();
    solver.solve(&mut points)
}
