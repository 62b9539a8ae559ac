//! Monte Carlo estimates of the PAC error probability and its decomposition,
//! exact multinomial oracles for the type-counting probabilities, and
//! exponent fitting.
//!
//! Every trial draws its features from a ChaCha8 stream selected by the
//! trial index, so results do not depend on the number of worker threads or
//! the order in which trials run. Per-trial outcomes are summed as integers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::{compositions_count, ConstraintSet};
use crate::hypothesis::{realize_boundaries, ErmFit, ErmSolver};
use crate::piecewise::{Density, StepFunction};
use crate::structure::{build_alphabet, enumerate_glps, AlphabetModel, GlpAnalysis, Scenario};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "EXPLAB_THREADS";
/// Largest number of compositions the exact oracles will enumerate.
pub const EXACT_TERM_LIMIT: f64 = 1e8;
/// Largest alphabet the exact oracles accept.
pub const EXACT_MAX_SYMBOLS: usize = 4;
/// Two-sided normal quantile for 95% intervals.
const Z95: f64 = 1.959963984540054;
/// How many violating trials [`verify_decomposition`] dumps in full.
const MAX_DUMPED: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(n_values: Vec<usize>, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Argument("trials must be at least 1".into()));
        }
        if n_values.is_empty() || n_values.contains(&0) {
            return Err(Error::Argument("sample sizes must be positive".into()));
        }
        if n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(
                "sample sizes must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            n_values,
            trials,
            seed,
        })
    }
}

/// A Bernoulli success frequency with a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub n: usize,
    pub p_hat: f64,
    /// Normal-approximation half width.
    pub ci_half_width: f64,
    pub successes: u64,
    pub trials: u64,
}

impl McEstimate {
    pub fn new(n: usize, successes: u64, trials: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        Self {
            n,
            p_hat,
            ci_half_width: Z95 * (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            successes,
            trials,
        }
    }

    /// Standard error of `p_hat`.
    pub fn sigma(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    /// Lower end of the interval; when every trial succeeds the exact
    /// one-sided 95% bound is used instead.
    pub fn ci_low(&self) -> f64 {
        if self.successes == self.trials {
            0.05f64.powf(1.0 / self.trials as f64)
        } else {
            (self.p_hat - self.ci_half_width).max(0.0)
        }
    }

    /// Upper end of the interval; with zero successes the exact one-sided
    /// 95% bound `1 - 0.05^(1/trials)` is used instead.
    pub fn ci_high(&self) -> f64 {
        if self.successes == 0 {
            1.0 - 0.05f64.powf(1.0 / self.trials as f64)
        } else {
            (self.p_hat + self.ci_half_width).min(1.0)
        }
    }

    /// `-ln(p_hat) / n`, undefined for a zero estimate.
    pub fn exponent_pointwise(&self) -> Option<f64> {
        (self.successes > 0).then(|| -self.p_hat.ln() / self.n as f64)
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The `n` features of trial `trial_index` under `seed`.
pub fn sample_features(mu: &Density, n: usize, seed: u64, trial_index: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    fill_features(mu, n, seed, trial_index, &mut out);
    out
}

fn fill_features(mu: &Density, n: usize, seed: u64, trial: u64, out: &mut Vec<f64>) {
    let mut rng = trial_rng(seed, trial);
    out.clear();
    out.extend((0..n).map(|_| mu.quantile_unchecked(rng.gen::<f64>())));
}

/// Worker count from [`THREADS_ENV`], or the machine's parallelism.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Conditional-term estimate: trials are kept only when the ERM on labels
/// from the optimal hypothesis stays within `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalEstimate {
    pub attempted: u64,
    /// `None` when no trial was kept.
    pub estimate: Option<McEstimate>,
}

/// Integer outcome counts over a batch of trials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TrialCounts {
    pub trials: u64,
    /// `R_g(erm_g) - R_g(theta_opt) > delta`.
    pub deviations: u64,
    /// `R_{f_opt}(erm_g) > delta`.
    pub opt_deviations: u64,
    /// `erm_g` lies in the optimum's region.
    pub in_opt_region: u64,
    /// `R_{f_opt}(erm_{f_opt}) > delta`.
    pub realizable_deviations: u64,
    /// `R_{f_opt}(erm_{f_opt}) < delta`.
    pub kept: u64,
    /// Kept trials whose `erm_g` leaves the optimum's region.
    pub kept_outside: u64,
    /// Trials where the two deviation events of `erm_g` disagree.
    pub equivalence_violations: u64,
    /// Trials where `erm_{f_opt}` deviates but `erm_g` does not.
    pub implication_counterexamples: u64,
    /// Smallest violating trial indices, for replay.
    pub first_violations: Vec<u64>,
}

impl TrialCounts {
    fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        self.deviations += other.deviations;
        self.opt_deviations += other.opt_deviations;
        self.in_opt_region += other.in_opt_region;
        self.realizable_deviations += other.realizable_deviations;
        self.kept += other.kept;
        self.kept_outside += other.kept_outside;
        self.equivalence_violations += other.equivalence_violations;
        self.implication_counterexamples += other.implication_counterexamples;
        self.first_violations.extend(other.first_violations);
        self.first_violations.sort_unstable();
        self.first_violations.truncate(MAX_DUMPED);
        self
    }
}

/// Everything computed in one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialDetail {
    pub trial: u64,
    pub features: Vec<f64>,
    pub labels_g: Vec<bool>,
    pub erm_g: Vec<f64>,
    pub erm_g_risk_g: f64,
    pub erm_g_risk_opt: f64,
    pub erm_g_region: usize,
    pub erm_opt: Vec<f64>,
    pub erm_opt_risk_opt: f64,
}

struct Worker {
    solver_g: ErmSolver,
    solver_opt: ErmSolver,
    xs: Vec<f64>,
    points: Vec<(f64, bool)>,
}

/// Monte Carlo engine for one scenario.
pub struct Simulator {
    scenario: Scenario,
    analysis: GlpAnalysis,
    alphabet: AlphabetModel,
    constraints: ConstraintSet,
    opt_fn: StepFunction,
    glp_fns: Vec<StepFunction>,
    k: usize,
    pool: Arc<rayon::ThreadPool>,
}

impl Simulator {
    /// Worker count taken from [`THREADS_ENV`].
    pub fn new(scenario: &Scenario) -> Result<Self> {
        Self::with_threads(scenario, threads_from_env())
    }

    pub fn with_threads(scenario: &Scenario, threads: usize) -> Result<Self> {
        let k = scenario.class_spec().require_k()?;
        let analysis = enumerate_glps(scenario)?;
        let alphabet = build_alphabet(&analysis, scenario.density())?;
        let constraints = alphabet.constraint_set()?;
        let domain = scenario.domain();
        let opt_fn = analysis.glps[0].to_step_function(domain)?;
        let glp_fns = analysis
            .glps
            .iter()
            .map(|h| h.to_step_function(domain))
            .collect::<Result<Vec<_>>>()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker threads: {e}")))?;
        Ok(Self {
            scenario: scenario.clone(),
            analysis,
            alphabet,
            constraints,
            opt_fn,
            glp_fns,
            k,
            pool: Arc::new(pool),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn analysis(&self) -> &GlpAnalysis {
        &self.analysis
    }

    pub fn alphabet(&self) -> &AlphabetModel {
        &self.alphabet
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn worker(&self) -> Result<Worker> {
        let mu = self.scenario.density();
        Ok(Worker {
            solver_g: ErmSolver::new(self.scenario.ground_truth(), mu, self.k)?,
            solver_opt: ErmSolver::new(&self.opt_fn, mu, self.k)?,
            xs: Vec::new(),
            points: Vec::new(),
        })
    }

    fn region_of(&self, parameters: &[f64]) -> Result<usize> {
        let f = realize_boundaries(parameters, self.scenario.domain())?;
        crate::structure::region_of(&f, &self.glp_fns, self.scenario.ground_truth())
    }

    fn run_one(
        &self,
        w: &mut Worker,
        n: usize,
        seed: u64,
        trial: u64,
    ) -> Result<(TrialCounts, ErmFit, ErmFit)> {
        let mu = self.scenario.density();
        let g = self.scenario.ground_truth();
        let delta = self.scenario.delta();
        fill_features(mu, n, seed, trial, &mut w.xs);

        w.points.clear();
        w.points.extend(w.xs.iter().map(|&x| (x, g.value_at(x))));
        let fit_g = w.solver_g.solve(&mut w.points)?;
        w.points.clear();
        w.points
            .extend(w.xs.iter().map(|&x| (x, self.opt_fn.value_at(x))));
        let fit_opt = w.solver_opt.solve(&mut w.points)?;

        let deviates = fit_g.true_risk - self.analysis.opt_risk > delta;
        let opt_deviates = w.solver_opt.true_risk(&fit_g.parameters) > delta;
        let in_region = self.region_of(&fit_g.parameters)? == 0;
        let r_opt = fit_opt.true_risk;
        let kept = r_opt < delta;
        let implication = r_opt > delta && !opt_deviates;
        let equivalence = deviates != opt_deviates;
        let counts = TrialCounts {
            trials: 1,
            deviations: u64::from(deviates),
            opt_deviations: u64::from(opt_deviates),
            in_opt_region: u64::from(in_region),
            realizable_deviations: u64::from(r_opt > delta),
            kept: u64::from(kept),
            kept_outside: u64::from(kept && !in_region),
            equivalence_violations: u64::from(equivalence),
            implication_counterexamples: u64::from(implication),
            first_violations: if equivalence || implication {
                vec![trial]
            } else {
                Vec::new()
            },
        };
        Ok((counts, fit_g, fit_opt))
    }

    /// Outcome counts of `trials` trials with `n` samples each.
    pub fn run_trials(&self, n: usize, trials: u64, seed: u64) -> Result<TrialCounts> {
        self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map_init(
                    || self.worker(),
                    |w, t| match w {
                        Ok(w) => self.run_one(w, n, seed, t).map(|r| r.0),
                        Err(e) => Err(e.clone()),
                    },
                )
                .try_reduce(TrialCounts::default, |a, b| Ok(a.merge(b)))
        })
    }

    /// Recomputes a single trial in full.
    pub fn replay_trial(&self, n: usize, seed: u64, trial: u64) -> Result<TrialDetail> {
        let mut w = self.worker()?;
        let (_, fit_g, fit_opt) = self.run_one(&mut w, n, seed, trial)?;
        let features = sample_features(self.scenario.density(), n, seed, trial);
        let g = self.scenario.ground_truth();
        Ok(TrialDetail {
            trial,
            labels_g: features.iter().map(|&x| g.value_at(x)).collect(),
            features,
            erm_g_risk_opt: w.solver_opt.true_risk(&fit_g.parameters),
            erm_g_region: self.region_of(&fit_g.parameters)?,
            erm_g_risk_g: fit_g.true_risk,
            erm_g: fit_g.hypothesis.boundaries().to_vec(),
            erm_opt: fit_opt.hypothesis.boundaries().to_vec(),
            erm_opt_risk_opt: fit_opt.true_risk,
        })
    }

    /// `P{R_g(erm) - R_g(theta_opt) > delta}`.
    pub fn estimate_pac_error(&self, n: usize, trials: u64, seed: u64) -> Result<McEstimate> {
        let c = self.run_trials(n, trials, seed)?;
        Ok(McEstimate::new(n, c.deviations, c.trials))
    }

    /// `P{erm_g outside the optimum's region | R_{f_opt}(erm_{f_opt}) < delta}`,
    /// both learners sharing each trial's features.
    pub fn estimate_conditional_term(
        &self,
        n: usize,
        trials: u64,
        seed: u64,
    ) -> Result<ConditionalEstimate> {
        let c = self.run_trials(n, trials, seed)?;
        Ok(conditional_from(n, &c))
    }

    /// Monte Carlo estimate of `P{counts in Pi}` for `n` samples.
    pub fn estimate_union_probability(
        &self,
        n: usize,
        trials: u64,
        seed: u64,
    ) -> Result<McEstimate> {
        let mu = self.scenario.density();
        let successes: u64 = self.pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map_init(Vec::new, |xs, t| {
                    fill_features(mu, n, seed, t, xs);
                    let counts = self.alphabet.counts(xs);
                    u64::from(self.constraints.counts_in_pi(&counts, 0))
                })
                .sum()
        });
        Ok(McEstimate::new(n, successes, trials))
    }
}

fn conditional_from(n: usize, c: &TrialCounts) -> ConditionalEstimate {
    ConditionalEstimate {
        attempted: c.trials,
        estimate: (c.kept > 0).then(|| McEstimate::new(n, c.kept_outside, c.kept)),
    }
}

/// Check of `P = P_R + (1 - P_R) * cond` on shared trials, with the per-trial
/// equivalence and implication checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub lhs: McEstimate,
    pub p_r: McEstimate,
    pub conditional: ConditionalEstimate,
    pub rhs: f64,
    /// Combined standard error of `lhs - rhs`.
    pub sigma: f64,
    pub within_3sigma: bool,
    pub equivalence_violations: u64,
    pub implication_counterexamples: u64,
    pub counterexamples: Vec<TrialDetail>,
}

impl DecompositionReport {
    pub fn holds(&self) -> bool {
        self.within_3sigma
            && self.equivalence_violations == 0
            && self.implication_counterexamples == 0
    }
}

/// Estimates all three terms from the same trials and checks the identity.
pub fn verify_decomposition(
    sim: &Simulator,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<DecompositionReport> {
    let c = sim.run_trials(n, trials, seed)?;
    let lhs = McEstimate::new(n, c.deviations, c.trials);
    let p_r = McEstimate::new(n, c.realizable_deviations, c.trials);
    let conditional = conditional_from(n, &c);
    let (cond, cond_sigma) = conditional
        .estimate
        .map_or((0.0, 0.0), |e| (e.p_hat, e.sigma()));
    let rhs = p_r.p_hat + (1.0 - p_r.p_hat) * cond;
    let rhs_var = ((1.0 - cond) * p_r.sigma()).powi(2) + ((1.0 - p_r.p_hat) * cond_sigma).powi(2);
    let sigma = (lhs.sigma().powi(2) + rhs_var).sqrt();
    let within_3sigma = (lhs.p_hat - rhs).abs() <= 3.0 * sigma + 1e-15;
    let counterexamples = c
        .first_violations
        .iter()
        .map(|&t| sim.replay_trial(n, seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionReport {
        n,
        lhs,
        p_r,
        conditional,
        rhs,
        sigma,
        within_3sigma,
        equivalence_violations: c.equivalence_violations,
        implication_counterexamples: c.implication_counterexamples,
        counterexamples,
    })
}

fn check_exact_size(am: &AlphabetModel, n: usize) -> Result<()> {
    if am.len() > EXACT_MAX_SYMBOLS {
        return Err(Error::Resource(format!(
            "exact oracle supports at most {EXACT_MAX_SYMBOLS} symbols, got {}",
            am.len()
        )));
    }
    let terms = compositions_count(n as u64, am.len());
    if terms > EXACT_TERM_LIMIT {
        return Err(Error::Resource(format!(
            "{terms:.3e} compositions exceed the limit of {EXACT_TERM_LIMIT:.0e}"
        )));
    }
    Ok(())
}

/// `ln(i!)` for `i = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// Running log-sum-exp over compositions, with per-level partial sums of the
/// log-term and of each row's dot product.
struct UnionWalk<'a> {
    /// `w[j][c] = c ln q_j - ln c!`.
    w: Vec<Vec<f64>>,
    q: &'a [f64],
    rows: &'a [Vec<i8>],
    shift: i64,
    max: f64,
    scaled: f64,
}

/// Rows may be shorter than the alphabet; missing columns are zero.
fn coef(row: &[i8], j: usize) -> i64 {
    row.get(j).map_or(0, |&a| i64::from(a))
}

impl UnionWalk<'_> {
    fn walk(&mut self, level: usize, remaining: usize, t: f64, dots: &mut [i64]) {
        let m = self.w.len();
        if level + 1 == m {
            let c = remaining as i64;
            let hit = self
                .rows
                .iter()
                .zip(dots.iter())
                .any(|(row, &d)| d + coef(row, level) * c + self.shift <= 0);
            if hit {
                self.push(t + self.w[level][remaining]);
            }
            return;
        }
        if level + 2 == m && self.q[level] > 0.0 && self.q[level + 1] > 0.0 {
            self.last_pair(level, remaining, t, dots);
            return;
        }
        for c in 0..=remaining {
            for (d, row) in dots.iter_mut().zip(self.rows) {
                *d += coef(row, level) * c as i64;
            }
            let tc = t + self.w[level][c];
            self.walk(level + 1, remaining - c, tc, dots);
            for (d, row) in dots.iter_mut().zip(self.rows) {
                *d -= coef(row, level) * c as i64;
            }
        }
    }

    /// The last two symbols split `rem` as `(c, rem - c)`. Every row is
    /// linear in `c`, so the qualifying `c` form a prefix and a suffix.
    fn last_pair(&mut self, a: usize, rem: usize, t: f64, dots: &[i64]) {
        let b = a + 1;
        let n = rem as i64;
        let (mut last_prefix, mut first_suffix) = (-1i64, n + 1);
        for (row, &d) in self.rows.iter().zip(dots) {
            let alpha = coef(row, a) - coef(row, b);
            let beta = d + coef(row, b) * n + self.shift;
            match alpha.signum() {
                0 if beta <= 0 => last_prefix = n,
                1 => last_prefix = last_prefix.max((-beta).div_euclid(alpha).min(n)),
                -1 => first_suffix = first_suffix.min((-((-beta).div_euclid(-alpha))).max(0)),
                _ => {}
            }
        }
        if last_prefix + 1 >= first_suffix {
            self.sum_run(a, rem, 0, rem, t);
            return;
        }
        if last_prefix >= 0 {
            self.sum_run(a, rem, 0, last_prefix as usize, t);
        }
        if first_suffix <= n {
            self.sum_run(a, rem, first_suffix as usize, rem, t);
        }
    }

    /// Adds the terms `c = lo..=hi` of the split, walking outward from the
    /// one nearest the binomial mode with term ratios.
    fn sum_run(&mut self, a: usize, rem: usize, lo: usize, hi: usize, t: f64) {
        const CUTOFF: f64 = 1e-20;
        let (qa, qb) = (self.q[a], self.q[a + 1]);
        let mode = (((rem + 1) as f64 * qa / (qa + qb)).floor() as usize).min(rem);
        let s = mode.clamp(lo, hi);
        let base = self.w[a][s] + self.w[a + 1][rem - s];
        let mut sum = 1.0;
        let mut term = 1.0;
        for c in s..hi {
            term *= qa / qb * (rem - c) as f64 / (c + 1) as f64;
            sum += term;
            if term < CUTOFF * sum {
                break;
            }
        }
        term = 1.0;
        for c in (lo + 1..=s).rev() {
            term *= qb / qa * c as f64 / (rem - c + 1) as f64;
            sum += term;
            if term < CUTOFF * sum {
                break;
            }
        }
        self.push(t + base + sum.ln());
    }

    fn push(&mut self, t: f64) {
        if t == f64::NEG_INFINITY {
            return;
        }
        if t > self.max {
            self.scaled = self.scaled * (self.max - t).exp() + 1.0;
            self.max = t;
        } else {
            self.scaled += (t - self.max).exp();
        }
    }
}

/// `ln P{(A c)_i + shift <= 0 for some i}` for multinomial counts `c` of `n`
/// draws from `q`; `-inf` when no composition qualifies.
fn log_union(am: &AlphabetModel, cs: &ConstraintSet, n: usize, shift: i64) -> Result<f64> {
    check_exact_size(am, n)?;
    if am.is_empty() {
        let hit = n == 0 && cs.counts_in_pi(&[], shift);
        return Ok(if hit { 0.0 } else { f64::NEG_INFINITY });
    }
    let lf = ln_factorials(n);
    let w =
        am.q.iter()
            .map(|&q| {
                let lq = q.ln();
                (0..=n)
                    .map(|c| if c == 0 { 0.0 } else { c as f64 * lq - lf[c] })
                    .collect()
            })
            .collect();
    let mut walk = UnionWalk {
        w,
        q: &am.q,
        rows: cs.rows(),
        shift,
        max: f64::NEG_INFINITY,
        scaled: 0.0,
    };
    let mut dots = vec![0i64; cs.rows().len()];
    walk.walk(0, n, lf[n], &mut dots);
    Ok(if walk.scaled > 0.0 {
        walk.max + walk.scaled.ln()
    } else {
        f64::NEG_INFINITY
    })
}

/// Natural log of [`exact_union_probability`].
pub fn log_exact_union_probability(am: &AlphabetModel, n: usize) -> Result<f64> {
    log_union(am, &am.constraint_set()?, n, 0)
}

/// Exact `P{(A c)_i <= 0 for some row i}` for the symbol counts `c` of `n`
/// samples, summed over compositions in log space.
pub fn exact_union_probability(am: &AlphabetModel, n: usize) -> Result<f64> {
    Ok(log_exact_union_probability(am, n)?.exp().min(1.0))
}

/// Sandwich for the conditional term: the lower bound asks every row to
/// win by `ell` on `n - ell` samples, the upper bound is the plain union
/// probability on `n` samples. The lower bound is zero when `ell > n`.
pub fn exact_shifted_probability(am: &AlphabetModel, n: usize, ell: usize) -> Result<(f64, f64)> {
    let cs = am.constraint_set()?;
    let upper = log_union(am, &cs, n, 0)?.exp().min(1.0);
    let lower = if ell > n {
        0.0
    } else {
        log_union(am, &cs, n - ell, ell as i64)?.exp().min(1.0)
    };
    Ok((lower, upper))
}

/// Length bound `ell = 2k` for minimal realizable sequences.
pub fn minimal_sequence_length(sc: &Scenario) -> Result<usize> {
    Ok(2 * sc.class_spec().require_k()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// Least-squares slope of `-ln p` against `n`; needs two usable points.
    pub d_hat: Option<f64>,
    /// `(n, -ln(p) / n)` for each positive `p`.
    pub pointwise: Vec<(usize, f64)>,
    /// Points skipped because `p <= 0`.
    pub dropped: usize,
}

/// Fits the decay rate of a probability series.
pub fn fit_exponent(points: &[(usize, f64)]) -> ExponentFit {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(n, p)| (n as f64, -p.ln()))
        .collect();
    let pointwise = points
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(n, p)| (n, -p.ln() / n as f64))
        .collect();
    let dropped = points.len() - usable.len();
    let d_hat = if usable.len() >= 2 {
        let m = usable.len() as f64;
        let xbar = usable.iter().map(|p| p.0).sum::<f64>() / m;
        let ybar = usable.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = usable.iter().map(|p| (p.0 - xbar).powi(2)).sum();
        let sxy: f64 = usable.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };
    ExponentFit {
        d_hat,
        pointwise,
        dropped,
    }
}
