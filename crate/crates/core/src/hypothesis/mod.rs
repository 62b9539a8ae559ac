//! Hypothesis classes, risks under the 0-1 loss, and empirical risk
//! minimisation.

mod erm;
mod linear;

use std::borrow::Cow;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{disagreement_region, Density, Interval, StepFunction, TOL};

pub(crate) use erm::RiskProfile;
pub use erm::{erm_kboundary, ErmFit, ErmSolver};
pub use linear::{empirical_risk_2d, erm_linear2d, LabeledSample2d, Linear2d, Linear2dFit};

/// Which hypothesis class a scenario learns with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HypothesisClassSpec {
    KBoundary { k: usize },
    Linear2d,
}

impl HypothesisClassSpec {
    pub fn k_boundary(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("k-boundary class needs k >= 1".into()));
        }
        Ok(Self::KBoundary { k })
    }

    /// The `k` of a k-boundary class, or an unsupported-class error.
    pub fn require_k(&self) -> Result<usize> {
        match *self {
            Self::KBoundary { k } if k >= 1 => Ok(k),
            Self::KBoundary { .. } => Err(Error::Argument("k-boundary class needs k >= 1".into())),
            Self::Linear2d => Err(Error::Unsupported(
                "operation is only defined for k-boundary classes".into(),
            )),
        }
    }
}

/// A k-boundary threshold hypothesis `f_{b_1,...,b_k}`: zero below `b_1`,
/// then alternating at each boundary, with `f(x) = 1` on `[b_1, b_2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct KBoundary {
    boundaries: Vec<f64>,
}

impl KBoundary {
    /// Sorted boundaries. Repeated values are only accepted for the first
    /// pair or as a trailing run, which keeps parameter vectors unique.
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.is_empty() {
            return Err(Error::Argument("k-boundary hypothesis needs k >= 1".into()));
        }
        if let Some(b) = boundaries.iter().find(|b| !b.is_finite()) {
            return Err(Error::Argument(format!("non-finite boundary {b}")));
        }
        for i in 1..boundaries.len() {
            match boundaries[i - 1].partial_cmp(&boundaries[i]) {
                Some(Ordering::Less) => {}
                Some(Ordering::Equal) => {
                    let leading_pair = i == 1;
                    let trailing_run = boundaries[i - 1..].iter().all(|&b| b == boundaries[i]);
                    if !(leading_pair || trailing_run) {
                        return Err(Error::Argument(format!(
                            "repeated boundary {} is neither the leading pair nor a trailing run",
                            boundaries[i]
                        )));
                    }
                }
                _ => {
                    return Err(Error::Argument(format!(
                        "boundaries must be sorted, got {:?}",
                        boundaries
                    )))
                }
            }
        }
        Ok(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn k(&self) -> usize {
        self.boundaries.len()
    }

    pub fn evaluate(&self, x: f64) -> bool {
        self.boundaries.partition_point(|&b| b <= x) % 2 == 1
    }

    /// The function this hypothesis realises on `domain`.
    pub fn to_step_function(&self, domain: Interval) -> Result<StepFunction> {
        realize_boundaries(&self.boundaries, domain)
    }

    /// Canonical parameters of a realised function: a boundary at the
    /// domain start when the function starts at 1, then its breakpoints,
    /// padded with boundaries at the domain end.
    pub fn canonical(f: &StepFunction, k: usize) -> Result<Self> {
        let domain = f.domain();
        let lead = usize::from(f.first_value());
        let used = lead + f.breakpoints().len();
        if used > k {
            return Err(Error::Argument(format!(
                "function needs {used} boundaries but the class has k = {k}"
            )));
        }
        let mut boundaries = Vec::with_capacity(k);
        if lead == 1 {
            boundaries.push(domain.lo());
        }
        boundaries.extend_from_slice(f.breakpoints());
        boundaries.resize(k, domain.hi());
        Ok(Self { boundaries })
    }
}

/// Realised step function of an arbitrary sorted boundary vector; boundaries
/// at the same point cancel in pairs.
pub(crate) fn realize_boundaries(boundaries: &[f64], domain: Interval) -> Result<StepFunction> {
    let (lo, hi) = (domain.lo(), domain.hi());
    if let Some(b) = boundaries.iter().find(|&&b| b < lo - TOL || b > hi + TOL) {
        return Err(Error::Domain(format!("boundary {b} outside [{lo}, {hi}]")));
    }
    let first_value = boundaries.iter().filter(|&&b| b <= lo).count() % 2 == 1;
    let mut breakpoints: Vec<f64> = Vec::with_capacity(boundaries.len());
    for &b in boundaries.iter().filter(|&&b| b > lo && b < hi) {
        if breakpoints.last() == Some(&b) {
            breakpoints.pop();
        } else {
            breakpoints.push(b);
        }
    }
    StepFunction::new(domain, breakpoints, first_value)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    KBoundary(KBoundary),
    Linear2d(Linear2d),
}

impl Hypothesis {
    /// Value at `x`; `x` has one coordinate for k-boundary hypotheses and two
    /// for planar linear ones.
    pub fn evaluate(&self, x: &[f64]) -> Result<bool> {
        match (self, x) {
            (Self::KBoundary(h), [x]) => Ok(h.evaluate(*x)),
            (Self::Linear2d(h), [x1, x2]) => Ok(h.evaluate([*x1, *x2])),
            _ => Err(Error::Argument(format!(
                "point of dimension {} does not match the hypothesis",
                x.len()
            ))),
        }
    }
}

/// Anything with a binary step-function realisation on a 1-D domain.
pub trait Realize {
    fn realize(&self, domain: Interval) -> Result<Cow<'_, StepFunction>>;
}

impl Realize for StepFunction {
    fn realize(&self, domain: Interval) -> Result<Cow<'_, StepFunction>> {
        let d = self.domain();
        if (d.lo() - domain.lo()).abs() > TOL || (d.hi() - domain.hi()).abs() > TOL {
            return Err(Error::Domain(
                "step function lives on another domain".into(),
            ));
        }
        Ok(Cow::Borrowed(self))
    }
}

impl Realize for KBoundary {
    fn realize(&self, domain: Interval) -> Result<Cow<'_, StepFunction>> {
        self.to_step_function(domain).map(Cow::Owned)
    }
}

impl Realize for Hypothesis {
    fn realize(&self, domain: Interval) -> Result<Cow<'_, StepFunction>> {
        match self {
            Self::KBoundary(h) => h.realize(domain),
            Self::Linear2d(_) => Err(Error::Unsupported(
                "exact risk is not available for planar linear hypotheses".into(),
            )),
        }
    }
}

/// `R(a, b) = P{a(x) != b(x)}` under `mu`.
pub fn risk<A, B>(a: &A, b: &B, mu: &Density) -> Result<f64>
where
    A: Realize + ?Sized,
    B: Realize + ?Sized,
{
    let domain = mu.domain();
    let a = a.realize(domain)?;
    let b = b.realize(domain)?;
    mu.measure(&disagreement_region(&a, &b)?)
}

/// Points `(x, y)` with binary labels on a 1-D feature domain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSample {
    pub points: Vec<(f64, bool)>,
}

impl LabeledSample {
    pub fn new(points: Vec<(f64, bool)>) -> Self {
        Self { points }
    }

    /// Features labelled by `f`.
    pub fn label_with(xs: &[f64], f: &StepFunction) -> Self {
        Self {
            points: xs.iter().map(|&x| (x, f.value_at(x))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn check_domain(&self, domain: Interval) -> Result<()> {
        match self.points.iter().find(|(x, _)| !domain.contains(*x)) {
            Some((x, _)) => Err(Error::Domain(format!(
                "sample point {x} outside [{}, {})",
                domain.lo(),
                domain.hi()
            ))),
            None => Ok(()),
        }
    }
}

/// Mistake count over a sample, kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmpiricalRisk {
    pub errors: usize,
    pub n: usize,
}

impl EmpiricalRisk {
    pub fn value(&self) -> f64 {
        self.errors as f64 / self.n as f64
    }
}

pub fn empirical_risk(h: &KBoundary, sample: &LabeledSample) -> Result<EmpiricalRisk> {
    if sample.is_empty() {
        return Err(Error::Argument("empirical risk of an empty sample".into()));
    }
    let errors = sample
        .points
        .iter()
        .filter(|&&(x, y)| h.evaluate(x) != y)
        .count();
    Ok(EmpiricalRisk {
        errors,
        n: sample.len(),
    })
}

/// Default cap on the number of breakpoint-aligned candidates.
pub const DEFAULT_CANDIDATE_LIMIT: usize = 100_000;

/// Every function of a k-boundary class whose breakpoints are a subset of
/// `g`'s breakpoints, ordered by number of boundaries used, then by
/// canonical parameter vector.
pub fn aligned_candidates(g: &StepFunction, k: usize, limit: usize) -> Result<Vec<StepFunction>> {
    let m_total = g.breakpoints().len();
    let mut count: usize = 0;
    for lead in 0..=1usize.min(k) {
        for m in 0..=(k - lead).min(m_total) {
            count = count.saturating_add(binomial(m_total, m));
        }
    }
    if count > limit {
        return Err(Error::Resource(format!(
            "{count} aligned candidates exceed the limit of {limit}"
        )));
    }
    let domain = g.domain();
    let mut out = Vec::with_capacity(count);
    for lead in 0..=1usize.min(k) {
        for m in 0..=(k - lead).min(m_total) {
            for subset in Subsets::new(m_total, m) {
                let bps = subset.iter().map(|&i| g.breakpoints()[i]).collect();
                out.push(StepFunction::new(domain, bps, lead == 1)?);
            }
        }
    }
    out.sort_by(|a, b| candidate_order(a, b, k));
    Ok(out)
}

/// Fewer boundaries first, then lexicographically smaller canonical vector.
pub(crate) fn candidate_order(a: &StepFunction, b: &StepFunction, k: usize) -> Ordering {
    let used = |f: &StepFunction| usize::from(f.first_value()) + f.breakpoints().len();
    used(a).cmp(&used(b)).then_with(|| {
        let (ca, cb) = (
            KBoundary::canonical(a, k).map(|h| h.boundaries),
            KBoundary::canonical(b, k).map(|h| h.boundaries),
        );
        match (ca, cb) {
            (Ok(x), Ok(y)) => lex_cmp(&x, &y),
            _ => Ordering::Equal,
        }
    })
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// `theta_opt`: the risk minimiser over the class. Boundaries of a minimiser
/// can always be moved onto breakpoints of `g` or the domain ends without
/// increasing risk, so the search runs over aligned candidates only.
pub fn project_ground_truth(
    g: &StepFunction,
    spec: HypothesisClassSpec,
    mu: &Density,
) -> Result<KBoundary> {
    let k = spec.require_k()?;
    let candidates = aligned_candidates(g, k, DEFAULT_CANDIDATE_LIMIT)?;
    let mut best: Option<(f64, &StepFunction)> = None;
    for f in &candidates {
        let r = risk(g, f, mu)?;
        // Candidates arrive in tie-break order, so only a strict improvement
        // replaces the incumbent.
        if best.is_none_or(|(rb, _)| r < rb - TOL) {
            best = Some((r, f));
        }
    }
    let (_, f) = best.ok_or_else(|| Error::Internal("no candidate hypotheses".into()))?;
    KBoundary::canonical(f, k)
}

pub(crate) fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: usize = 1;
    for i in 0..r {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// r-subsets of `0..n` in lexicographic order.
pub(crate) struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    pub(crate) fn new(n: usize, r: usize) -> Self {
        Self {
            n,
            current: (r <= n).then(|| (0..r).collect()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let r = out.len();
        let mut next = out.clone();
        let mut i = r;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - r + i {
                next[i] += 1;
                for j in i + 1..r {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
