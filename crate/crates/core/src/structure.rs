//! Geometry of a learning problem: generalized optimum points (GLPs), the
//! regions of parameter space they own, dominating regions, the largest
//! admissible deviation `delta_max`, and the finite alphabet built from the
//! dominating regions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::ConstraintSet;
use crate::hypothesis::{
    aligned_candidates, project_ground_truth, realize_boundaries, risk, HypothesisClassSpec,
    KBoundary, Realize, RiskProfile, DEFAULT_CANDIDATE_LIMIT,
};
use crate::piecewise::{Density, Interval, IntervalSet, StepFunction, TOL};

/// Feature density, ground truth, hypothesis class and deviation threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    density: Density,
    ground_truth: StepFunction,
    class_spec: HypothesisClassSpec,
    delta: f64,
}

impl Scenario {
    pub fn new(
        density: Density,
        ground_truth: StepFunction,
        class_spec: HypothesisClassSpec,
        delta: f64,
    ) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Argument(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if let HypothesisClassSpec::KBoundary { k } = class_spec {
            HypothesisClassSpec::k_boundary(k)?;
        }
        ground_truth.realize(density.domain())?;
        let sc = Self {
            density,
            ground_truth,
            class_spec,
            delta,
        };
        if let Nondegeneracy::Witness(seg) = check_nondegenerate(&sc) {
            return Err(Error::Argument(format!(
                "every hypothesis agrees on [{}, {})",
                seg.lo(),
                seg.hi()
            )));
        }
        Ok(sc)
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn ground_truth(&self) -> &StepFunction {
        &self.ground_truth
    }

    pub fn class_spec(&self) -> HypothesisClassSpec {
        self.class_spec
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn domain(&self) -> Interval {
        self.density.domain()
    }

    /// The same problem with another deviation threshold.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(
            self.density.clone(),
            self.ground_truth.clone(),
            self.class_spec,
            delta,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nondegeneracy {
    Ok,
    /// A density segment on which all hypotheses coincide.
    Witness(Interval),
}

/// Every density segment must carry a disagreement between two class members.
pub fn check_nondegenerate(sc: &Scenario) -> Nondegeneracy {
    let domain = sc.domain();
    let pair = match sc.class_spec {
        HypothesisClassSpec::KBoundary { k } => {
            let mut ones = vec![domain.lo()];
            ones.resize(k, domain.hi());
            let zeros = vec![domain.hi(); k];
            match (
                realize_boundaries(&ones, domain),
                realize_boundaries(&zeros, domain),
            ) {
                (Ok(a), Ok(b)) => Some((a, b)),
                _ => None,
            }
        }
        // Planar classifiers are not tied to the 1-D density.
        HypothesisClassSpec::Linear2d => return Nondegeneracy::Ok,
    };
    let Some((a, b)) = pair else {
        return Nondegeneracy::Witness(domain);
    };
    let differ = crate::piecewise::disagreement_region(&a, &b).unwrap_or_default();
    for (seg, _) in sc.density.segments() {
        if differ.intersect(&IntervalSet::from(seg)).is_empty() {
            return Nondegeneracy::Witness(seg);
        }
    }
    Nondegeneracy::Ok
}

/// GLPs of a scenario with their dominating regions and derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlpAnalysis {
    /// `glps[0]` is the risk minimiser; the rest follow in canonical order.
    pub glps: Vec<KBoundary>,
    /// For each GLP `i >= 1`, `(D(theta_0, theta_i), D(theta_i, theta_0))`.
    pub d_regions: Vec<(IntervalSet, IntervalSet)>,
    pub stable: Vec<bool>,
    /// Infinite when every hypothesis lies in the region of the optimum.
    #[serde(serialize_with = "finite_or_null")]
    pub delta_max: f64,
    pub opt_risk: f64,
}

fn finite_or_null<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl GlpAnalysis {
    pub fn theta_opt(&self) -> &KBoundary {
        &self.glps[0]
    }

    pub fn is_realizable(&self) -> bool {
        self.opt_risk <= TOL
    }
}

/// `{x : theta_a(x) = g(x) != theta_b(x)}`.
pub fn dominating_region<A, B>(theta_a: &A, theta_b: &B, g: &StepFunction) -> Result<IntervalSet>
where
    A: Realize + ?Sized,
    B: Realize + ?Sized,
{
    let domain = g.domain();
    let a = theta_a.realize(domain)?;
    let b = theta_b.realize(domain)?;
    StepFunction::region_where(&[&a, &b, g], |v| v[0] == v[2] && v[1] != v[2])
}

/// Which ground-truth segments a function classifies correctly. Only
/// meaningful for functions whose breakpoints are among `g`'s.
fn correctness(f: &StepFunction, g: &StepFunction) -> Vec<bool> {
    g.segments()
        .map(|(seg, gv)| f.value_at(seg.midpoint()) == gv)
        .collect()
}

/// GLPs, dominating regions, stability flags and `delta_max`.
///
/// Candidates are the class members whose boundaries sit on breakpoints of
/// `g` or the domain ends. Such a candidate is a GLP when it is strictly
/// better than every other candidate on some ground-truth segment.
pub fn enumerate_glps(sc: &Scenario) -> Result<GlpAnalysis> {
    enumerate_glps_with_limit(sc, DEFAULT_CANDIDATE_LIMIT)
}

pub fn enumerate_glps_with_limit(sc: &Scenario, limit: usize) -> Result<GlpAnalysis> {
    let k = sc.class_spec.require_k()?;
    let g = &sc.ground_truth;
    let mu = &sc.density;
    let opt = project_ground_truth(g, sc.class_spec, mu)?;
    let opt_fn = opt.to_step_function(sc.domain())?;

    let candidates = aligned_candidates(g, k, limit)?;
    let vectors: Vec<Vec<bool>> = candidates.iter().map(|f| correctness(f, g)).collect();
    let beats = |a: &[bool], b: &[bool]| a.iter().zip(b).any(|(&x, &y)| x && !y);
    let mut others: Vec<KBoundary> = Vec::new();
    for (i, f) in candidates.iter().enumerate() {
        if *f == opt_fn {
            continue;
        }
        let is_glp = vectors
            .iter()
            .enumerate()
            .all(|(j, v)| j == i || beats(&vectors[i], v));
        if is_glp {
            others.push(KBoundary::canonical(f, k)?);
        }
    }
    others.sort_by(|a, b| crate::hypothesis::lex_cmp(a.boundaries(), b.boundaries()));

    let mut glps = vec![opt];
    glps.extend(others);
    let mut d_regions = Vec::with_capacity(glps.len() - 1);
    for theta in &glps[1..] {
        d_regions.push((
            dominating_region(&glps[0], theta, g)?,
            dominating_region(theta, &glps[0], g)?,
        ));
    }
    let stable = glps
        .iter()
        .map(|theta| check_stability(theta, sc))
        .collect::<Result<Vec<_>>>()?;
    let opt_risk = risk(g, &glps[0], mu)?;
    let mut ga = GlpAnalysis {
        glps,
        d_regions,
        stable,
        delta_max: f64::INFINITY,
        opt_risk,
    };
    ga.delta_max = delta_max(&ga, sc)?;
    Ok(ga)
}

/// Whether no other aligned class member ties the optimum's risk.
pub fn optimum_is_unique(sc: &Scenario) -> Result<bool> {
    let k = sc.class_spec.require_k()?;
    let g = &sc.ground_truth;
    let candidates = aligned_candidates(g, k, DEFAULT_CANDIDATE_LIMIT)?;
    let risks = candidates
        .iter()
        .map(|f| risk(g, f, &sc.density))
        .collect::<Result<Vec<_>>>()?;
    let best = risks.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(risks.iter().filter(|&&r| r <= best + TOL).count() == 1)
}

/// Index of the GLP whose region contains `theta`.
///
/// `theta` belongs to the region of a GLP when it is nowhere strictly better
/// than it. Membership in the region of a non-optimal GLP takes precedence
/// over the optimum's region, and the lowest such index wins.
pub fn in_a_region<T>(theta: &T, ga: &GlpAnalysis, g: &StepFunction, mu: &Density) -> Result<usize>
where
    T: Realize + ?Sized,
{
    let f = theta.realize(mu.domain())?;
    let glp_fns = ga
        .glps
        .iter()
        .map(|h| h.to_step_function(mu.domain()))
        .collect::<Result<Vec<_>>>()?;
    region_of(&f, &glp_fns, g)
}

pub(crate) fn region_of(
    f: &StepFunction,
    glp_fns: &[StepFunction],
    g: &StepFunction,
) -> Result<usize> {
    let nowhere_better =
        |i: usize| -> Result<bool> { Ok(dominating_region(f, &glp_fns[i], g)?.is_empty()) };
    for i in 1..glp_fns.len() {
        if nowhere_better(i)? {
            return Ok(i);
        }
    }
    if nowhere_better(0)? {
        return Ok(0);
    }
    Err(Error::Internal(format!(
        "hypothesis with breakpoints {:?} lies in no GLP region",
        f.breakpoints()
    )))
}

/// Number of random perturbations tried by [`check_stability`].
pub const STABILITY_PROBES: usize = 1000;
const STABILITY_SEED: u64 = 0x5eed;

/// Whether small moves of `theta`'s boundaries can never improve it anywhere.
///
/// The analytic test requires every boundary to sit on a breakpoint of `g`
/// or a domain end with the adjacent ground-truth segments classified
/// correctly. Random perturbations of up to half the shortest ground-truth
/// segment then try to falsify it.
pub fn check_stability(theta: &KBoundary, sc: &Scenario) -> Result<bool> {
    let g = &sc.ground_truth;
    let domain = sc.domain();
    let f = theta.to_step_function(domain)?;
    let canonical = KBoundary::canonical(&f, theta.k())?;

    let segments: Vec<(Interval, bool)> = g.segments().collect();
    let mut analytic = true;
    for &b in canonical.boundaries() {
        let adjacent: Vec<&(Interval, bool)> = segments
            .iter()
            .filter(|(s, _)| (s.lo() - b).abs() <= TOL || (s.hi() - b).abs() <= TOL)
            .collect();
        let aligned = !adjacent.is_empty();
        let correct = adjacent
            .iter()
            .all(|(s, gv)| f.value_at(s.midpoint()) == *gv);
        if !(aligned && correct) {
            analytic = false;
            break;
        }
    }

    let eps = 0.5
        * segments
            .iter()
            .map(|(s, _)| s.len())
            .fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(STABILITY_SEED);
    let mut moved = canonical.boundaries().to_vec();
    for _ in 0..STABILITY_PROBES {
        for (m, &b) in moved.iter_mut().zip(canonical.boundaries()) {
            *m = (b + rng.gen_range(-eps..=eps)).clamp(domain.lo(), domain.hi());
        }
        moved.sort_by(|a, b| a.total_cmp(b));
        let perturbed = realize_boundaries(&moved, domain)?;
        if !dominating_region(&perturbed, &f, g)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(analytic)
}

/// Largest `delta` for which leaving the optimum's region forces a deviation
/// above `delta`: the infimum over hypotheses outside that region of
/// `min(R_{f_opt}(theta), R_g(theta) - R_g(theta_opt))`.
///
/// Boundary vectors are grouped into cells of the grid formed by the domain
/// ends and the breakpoints of `g` and of the density. Region membership is
/// constant on a cell and both risks are linear in each boundary there, so
/// each cell is classified at an interior point and its infimum taken over
/// the vertices of its closure.
pub fn delta_max(ga: &GlpAnalysis, sc: &Scenario) -> Result<f64> {
    delta_max_with_limit(ga, sc, DEFAULT_CANDIDATE_LIMIT)
}

pub fn delta_max_with_limit(ga: &GlpAnalysis, sc: &Scenario, limit: usize) -> Result<f64> {
    let k = sc.class_spec.require_k()?;
    let domain = sc.domain();
    let g = &sc.ground_truth;
    if ga.glps.len() == 1 {
        return Ok(f64::INFINITY);
    }
    let opt_fn = ga.glps[0].to_step_function(domain)?;
    let glp_fns = ga
        .glps
        .iter()
        .map(|h| h.to_step_function(domain))
        .collect::<Result<Vec<_>>>()?;
    let risk_g = RiskProfile::new(g, &sc.density);
    let risk_opt = RiskProfile::new(&opt_fn, &sc.density);

    let mut grid: Vec<f64> = vec![domain.lo(), domain.hi()];
    grid.extend_from_slice(g.breakpoints());
    grid.extend_from_slice(sc.density.breakpoints());
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    // Element 2j is the vertex grid[j]; element 2j+1 the open gap after it.
    let elements = 2 * grid.len() - 1;
    let cells = crate::hypothesis::binomial(elements + k - 1, k);
    if cells > limit {
        return Err(Error::Resource(format!(
            "{cells} parameter cells exceed the limit of {limit}"
        )));
    }

    let mut best = f64::INFINITY;
    let mut cell = vec![0usize; k];
    loop {
        let rep = cell_representative(&cell, &grid);
        let f = realize_boundaries(&rep, domain)?;
        if region_of(&f, &glp_fns, g)? != 0 {
            for vertex in closure_vertices(&cell, &grid) {
                let excess = risk_g.risk_of(&vertex) - ga.opt_risk;
                let value = risk_opt.risk_of(&vertex).min(excess);
                best = best.min(value);
            }
        }
        if !next_multiset(&mut cell, elements) {
            break;
        }
    }
    Ok(best.max(0.0))
}

/// Interior point of a cell: boundaries sharing a gap are spread evenly.
fn cell_representative(cell: &[usize], grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cell.len());
    let mut i = 0;
    while i < cell.len() {
        let e = cell[i];
        let run = cell[i..].iter().take_while(|&&x| x == e).count();
        if e.is_multiple_of(2) {
            out.extend(std::iter::repeat_n(grid[e / 2], run));
        } else {
            let (lo, hi) = (grid[e / 2], grid[e / 2 + 1]);
            for t in 1..=run {
                out.push(lo + (hi - lo) * t as f64 / (run + 1) as f64);
            }
        }
        i += run;
    }
    out
}

/// Vertices of a cell's closure: within each gap, a prefix of its boundaries
/// at the left end and the rest at the right end.
fn closure_vertices(cell: &[usize], grid: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(cell.len())];
    let mut i = 0;
    while i < cell.len() {
        let e = cell[i];
        let run = cell[i..].iter().take_while(|&&x| x == e).count();
        if e.is_multiple_of(2) {
            for v in &mut out {
                v.extend(std::iter::repeat_n(grid[e / 2], run));
            }
        } else {
            let (lo, hi) = (grid[e / 2], grid[e / 2 + 1]);
            let mut next = Vec::with_capacity(out.len() * (run + 1));
            for v in &out {
                for split in 0..=run {
                    let mut w = v.clone();
                    w.extend(std::iter::repeat_n(lo, split));
                    w.extend(std::iter::repeat_n(hi, run - split));
                    next.push(w);
                }
            }
            out = next;
        }
        i += run;
    }
    out
}

/// Advance a non-decreasing sequence over `0..n`; false after the last one.
fn next_multiset(seq: &mut [usize], n: usize) -> bool {
    let mut i = seq.len();
    while i > 0 {
        i -= 1;
        if seq[i] + 1 < n {
            let v = seq[i] + 1;
            for x in &mut seq[i..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

/// Which dominating regions a symbol is carved from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "pairs", rename_all = "snake_case")]
pub enum SymbolKind {
    /// Points in exactly the `D_i` with `i` in the set (1-based).
    X(Vec<usize>),
    /// Points in exactly the `D'_i` with `i` in the set (1-based).
    XPrime(Vec<usize>),
    /// Points in no dominating region.
    Complement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub region: IntervalSet,
}

fn subset_name(prefix: &str, set: &[usize]) -> String {
    let ids: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{prefix}{}", ids.join(","))
}

/// Splits the dominating regions into disjoint pieces by which `D_i` (or
/// `D'_i`) contain them.
///
/// Pieces from the `D_i` come first, ordered by subset size and then
/// lexicographically, then the pieces from the `D'_i` in the same order, and
/// finally the remainder of the domain. Empty pieces are dropped.
pub fn disjointify(
    d_regions: &[(IntervalSet, IntervalSet)],
    domain: Interval,
) -> Result<Vec<Symbol>> {
    let mut cuts: Vec<f64> = vec![domain.lo(), domain.hi()];
    for (d, dp) in d_regions {
        for iv in d.intervals().iter().chain(dp.intervals()) {
            if !domain.covers(iv.lo(), iv.hi()) {
                return Err(Error::Domain(format!(
                    "region [{}, {}) outside the domain",
                    iv.lo(),
                    iv.hi()
                )));
            }
            cuts.push(iv.lo());
            cuts.push(iv.hi());
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();

    // Keyed by (tag, subset size, subset) so iteration yields symbol order.
    type Key = (u8, usize, Vec<usize>);
    let mut groups: std::collections::BTreeMap<Key, Vec<(f64, f64)>> = Default::default();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= TOL {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let in_d: Vec<usize> = (0..d_regions.len())
            .filter(|&i| d_regions[i].0.contains(mid))
            .map(|i| i + 1)
            .collect();
        let in_dp: Vec<usize> = (0..d_regions.len())
            .filter(|&i| d_regions[i].1.contains(mid))
            .map(|i| i + 1)
            .collect();
        let key = match (in_d.is_empty(), in_dp.is_empty()) {
            (false, false) => {
                return Err(Error::Argument(format!(
                    "dominating regions D{in_d:?} and D'{in_dp:?} overlap at {mid}"
                )))
            }
            (false, true) => (0, in_d.len(), in_d),
            (true, false) => (1, in_dp.len(), in_dp),
            (true, true) => (2, 0, Vec::new()),
        };
        groups.entry(key).or_default().push((lo, hi));
    }

    Ok(groups
        .into_iter()
        .map(|((tag, _, set), pairs)| {
            let region = IntervalSet::from_pairs(pairs);
            let (name, kind) = match tag {
                0 => (subset_name("X_", &set), SymbolKind::X(set)),
                1 => (subset_name("X'_", &set), SymbolKind::XPrime(set)),
                _ => ("X_c".to_string(), SymbolKind::Complement),
            };
            Symbol { name, kind, region }
        })
        .filter(|s| !s.region.is_empty())
        .collect())
}

/// Finite alphabet with its symbol distribution and constraint matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphabetModel {
    pub symbols: Vec<Symbol>,
    pub q: Vec<f64>,
    /// One row per non-optimal GLP, one column per symbol other than `X_c`.
    pub a_matrix: Vec<Vec<i8>>,
}

impl AlphabetModel {
    pub fn from_regions(d_regions: &[(IntervalSet, IntervalSet)], mu: &Density) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut q = Vec::new();
        for s in disjointify(d_regions, mu.domain())? {
            let mass = mu.measure(&s.region)?;
            if mass > 0.0 {
                symbols.push(s);
                q.push(mass);
            }
        }
        let columns = symbols
            .iter()
            .filter(|s| s.kind != SymbolKind::Complement)
            .count();
        let a_matrix = (1..=d_regions.len())
            .map(|i| {
                symbols[..columns]
                    .iter()
                    .map(|s| match &s.kind {
                        SymbolKind::X(set) if set.contains(&i) => 1,
                        SymbolKind::XPrime(set) if set.contains(&i) => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            symbols,
            q,
            a_matrix,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Index of the symbol containing `x`.
    pub fn symbol_of(&self, x: f64) -> Option<usize> {
        self.symbols.iter().position(|s| s.region.contains(x))
    }

    /// Symbol counts of a feature sample; points outside every symbol are
    /// skipped.
    pub fn counts(&self, xs: &[f64]) -> Vec<u64> {
        let mut out = vec![0u64; self.symbols.len()];
        for &x in xs {
            if let Some(i) = self.symbol_of(x) {
                out[i] += 1;
            }
        }
        out
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        ConstraintSet::new(self.a_matrix.clone(), self.symbols.len())
    }
}

/// Alphabet of a completed GLP analysis.
pub fn build_alphabet(ga: &GlpAnalysis, mu: &Density) -> Result<AlphabetModel> {
    AlphabetModel::from_regions(&ga.d_regions, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn kb(b: &[f64]) -> KBoundary {
        KBoundary::new(b.to_vec()).unwrap()
    }

    fn set(pairs: &[(f64, f64)]) -> IntervalSet {
        IntervalSet::from_pairs(pairs.iter().copied())
    }

    fn scenario(bps: &[f64], first: bool, k: usize, delta: f64) -> Scenario {
        Scenario::new(
            Density::uniform(unit()),
            StepFunction::new(unit(), bps.to_vec(), first).unwrap(),
            HypothesisClassSpec::k_boundary(k).unwrap(),
            delta,
        )
        .unwrap()
    }

    fn worked() -> Scenario {
        scenario(&[0.6, 0.9], false, 1, 0.1)
    }

    fn two_boundary_truth() -> Scenario {
        scenario(&[0.5, 0.9], false, 1, 0.1)
    }

    #[test]
    fn nondegenerate_examples() {
        assert_eq!(check_nondegenerate(&worked()), Nondegeneracy::Ok);
        assert_eq!(
            check_nondegenerate(&scenario(&[0.3], false, 3, 0.1)),
            Nondegeneracy::Ok
        );
        assert!(Interval::new(0.5, 0.5).is_err());
    }

    #[test]
    fn scenario_validation() {
        let g = StepFunction::new(unit(), vec![0.5], false).unwrap();
        let k1 = HypothesisClassSpec::k_boundary(1).unwrap();
        assert!(Scenario::new(Density::uniform(unit()), g.clone(), k1, 0.0).is_err());
        let other = Density::uniform(Interval::new(0.0, 2.0).unwrap());
        assert!(matches!(
            Scenario::new(other, g, k1, 0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn glps_of_worked_example() {
        let ga = enumerate_glps(&worked()).unwrap();
        assert_eq!(ga.glps, vec![kb(&[0.6]), kb(&[1.0])]);
        assert_eq!(ga.d_regions, vec![(set(&[(0.6, 0.9)]), set(&[(0.9, 1.0)]))]);
        assert!((ga.opt_risk - 0.1).abs() < 1e-12);
    }

    #[test]
    fn glps_of_two_boundary_truth() {
        let ga = enumerate_glps(&two_boundary_truth()).unwrap();
        assert_eq!(ga.glps, vec![kb(&[0.5]), kb(&[1.0])]);
        assert_eq!(ga.stable, vec![true, true]);
    }

    #[test]
    fn realizable_has_single_glp() {
        let ga = enumerate_glps(&scenario(&[0.7], false, 1, 0.1)).unwrap();
        assert_eq!(ga.glps, vec![kb(&[0.7])]);
        assert!(ga.d_regions.is_empty());
        assert_eq!(ga.delta_max, f64::INFINITY);
        assert!(ga.is_realizable());
    }

    #[test]
    fn dominating_region_examples() {
        let g = two_boundary_truth().ground_truth;
        assert_eq!(
            dominating_region(&kb(&[0.5]), &kb(&[1.0]), &g).unwrap(),
            set(&[(0.5, 0.9)])
        );
        let g = worked().ground_truth;
        assert_eq!(
            dominating_region(&kb(&[0.6]), &kb(&[1.0]), &g).unwrap(),
            set(&[(0.6, 0.9)])
        );
        assert_eq!(
            dominating_region(&kb(&[1.0]), &kb(&[0.6]), &g).unwrap(),
            set(&[(0.9, 1.0)])
        );
        assert!(dominating_region(&kb(&[0.3]), &kb(&[0.3]), &g)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn optimum_uniqueness() {
        assert!(optimum_is_unique(&worked()).unwrap());
        // Constant 0 and the threshold at 0.5 both have risk 0.25.
        assert!(!optimum_is_unique(&scenario(&[0.5, 0.75], false, 1, 0.1)).unwrap());
    }

    #[test]
    fn region_membership() {
        let sc = worked();
        let ga = enumerate_glps(&sc).unwrap();
        let (g, mu) = (&sc.ground_truth, &sc.density);
        assert_eq!(in_a_region(&kb(&[0.7]), &ga, g, mu).unwrap(), 0);
        assert_eq!(in_a_region(&kb(&[0.95]), &ga, g, mu).unwrap(), 1);
        assert_eq!(in_a_region(&kb(&[0.6]), &ga, g, mu).unwrap(), 0);
        assert_eq!(in_a_region(&kb(&[1.0]), &ga, g, mu).unwrap(), 1);
    }

    #[test]
    fn stability_examples() {
        let sc = worked();
        assert!(check_stability(&kb(&[0.6]), &sc).unwrap());
        assert!(!check_stability(&kb(&[0.55]), &sc).unwrap());
        let sc = two_boundary_truth();
        assert!(check_stability(&kb(&[0.5]), &sc).unwrap());
        assert!(check_stability(&kb(&[1.0]), &sc).unwrap());
    }

    #[test]
    fn delta_max_examples() {
        let ga = enumerate_glps(&worked()).unwrap();
        assert!((ga.delta_max - 0.2).abs() < 1e-12);
        let ga = enumerate_glps(&two_boundary_truth()).unwrap();
        assert!((ga.delta_max - 0.3).abs() < 1e-12);
    }

    #[test]
    fn delta_max_matches_grid_scan() {
        let sc = worked();
        let ga = enumerate_glps(&sc).unwrap();
        let (g, mu) = (&sc.ground_truth, &sc.density);
        let opt = ga.glps[0].clone();
        let mut scan = f64::INFINITY;
        for i in 0..=10_000 {
            let b = i as f64 / 10_000.0;
            let h = kb(&[b]);
            if in_a_region(&h, &ga, g, mu).unwrap() != 0 {
                let excess = risk(g, &h, mu).unwrap() - ga.opt_risk;
                scan = scan.min(risk(&opt, &h, mu).unwrap().min(excess));
            }
        }
        assert!((scan - ga.delta_max).abs() < 1e-9);
    }

    #[test]
    fn disjointify_examples() {
        let syms = disjointify(&[(set(&[(0.6, 0.9)]), set(&[(0.9, 1.0)]))], unit()).unwrap();
        let names: Vec<&str> = syms.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["X_1", "X'_1", "X_c"]);
        assert_eq!(syms[0].region, set(&[(0.6, 0.9)]));
        assert_eq!(syms[1].region, set(&[(0.9, 1.0)]));
        assert_eq!(syms[2].region, set(&[(0.0, 0.6)]));

        let two = [
            (set(&[(0.1, 0.4)]), IntervalSet::empty()),
            (set(&[(0.3, 0.5)]), IntervalSet::empty()),
        ];
        let syms = disjointify(&two, unit()).unwrap();
        assert_eq!(syms[0].region, set(&[(0.1, 0.3)]));
        assert_eq!(syms[1].region, set(&[(0.4, 0.5)]));
        assert_eq!(syms[2].region, set(&[(0.3, 0.4)]));
        assert_eq!(syms[2].kind, SymbolKind::X(vec![1, 2]));

        let whole = disjointify(&[(set(&[(0.0, 1.0)]), IntervalSet::empty())], unit()).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].name, "X_1");

        let clash = [(set(&[(0.1, 0.4)]), set(&[(0.3, 0.5)]))];
        assert!(disjointify(&clash, unit()).is_err());
    }

    #[test]
    fn alphabet_examples() {
        let sc = worked();
        let ga = enumerate_glps(&sc).unwrap();
        let am = build_alphabet(&ga, &sc.density).unwrap();
        for (q, want) in am.q.iter().zip([0.3, 0.1, 0.6]) {
            assert!((q - want).abs() < 1e-12);
        }
        assert_eq!(am.a_matrix, vec![vec![1, -1]]);

        let sym = [(set(&[(0.0, 0.25)]), set(&[(0.5, 0.75)]))];
        let am = AlphabetModel::from_regions(&sym, &Density::uniform(unit())).unwrap();
        assert_eq!(am.q, vec![0.25, 0.25, 0.5]);

        let two = [
            (set(&[(0.1, 0.4)]), IntervalSet::empty()),
            (set(&[(0.3, 0.5)]), IntervalSet::empty()),
        ];
        let am = AlphabetModel::from_regions(&two, &Density::uniform(unit())).unwrap();
        for (q, want) in am.q.iter().zip([0.2, 0.1, 0.1, 0.6]) {
            assert!((q - want).abs() < 1e-12);
        }
        assert_eq!(am.a_matrix, vec![vec![1, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn multiset_enumeration() {
        let mut seq = vec![0, 0];
        let mut n = 1;
        while next_multiset(&mut seq, 3) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
