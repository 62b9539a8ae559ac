//! Fixtures, random instance generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use explab_core::hypothesis::{HypothesisClassSpec, KBoundary};
use explab_core::piecewise::{Density, Interval, StepFunction};
use explab_core::structure::{AlphabetModel, Scenario};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn unit() -> Interval {
    Interval::new(0.0, 1.0).unwrap()
}

/// Uniform features on [0, 1), truth 1 on [0.6, 0.9), one threshold.
pub fn worked_example() -> Scenario {
    let g = StepFunction::new(unit(), vec![0.6, 0.9], false).unwrap();
    Scenario::new(
        Density::uniform(unit()),
        g,
        HypothesisClassSpec::k_boundary(1).unwrap(),
        0.1,
    )
    .unwrap()
}

/// Same features, truth a single threshold at 0.6: inside the class.
pub fn realizable_control() -> Scenario {
    let g = StepFunction::new(unit(), vec![0.6], false).unwrap();
    Scenario::new(
        Density::uniform(unit()),
        g,
        HypothesisClassSpec::k_boundary(1).unwrap(),
        0.1,
    )
    .unwrap()
}

/// `m` sorted, distinct points strictly inside (0, 1), rounded to a 1/1000
/// grid so that coincidences with other breakpoints actually happen.
pub fn random_breakpoints(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(m);
    while out.len() < m {
        let b = f64::from(rng.gen_range(1u32..1000)) / 1000.0;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Piecewise-constant density on [0, 1) with up to three pieces.
pub fn random_density(rng: &mut ChaCha8Rng) -> Density {
    let pieces = rng.gen_range(1..=3);
    let breakpoints = random_breakpoints(rng, pieces - 1);
    let mut edges = vec![0.0];
    edges.extend(&breakpoints);
    edges.push(1.0);
    let weights: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.2..2.0)).collect();
    let mass: f64 = weights
        .iter()
        .zip(edges.windows(2))
        .map(|(w, e)| w * (e[1] - e[0]))
        .sum();
    let values = weights.iter().map(|w| w / mass).collect();
    Density::new(unit(), breakpoints, values).unwrap()
}

pub fn random_truth(rng: &mut ChaCha8Rng, max_breaks: usize) -> StepFunction {
    let m = rng.gen_range(0..=max_breaks);
    StepFunction::new(unit(), random_breakpoints(rng, m), rng.gen()).unwrap()
}

/// Errors of boundaries `b` on labelled points.
pub fn errors_of(b: &[f64], points: &[(f64, bool)]) -> usize {
    let h = KBoundary::new(b.to_vec()).unwrap();
    points.iter().filter(|&&(x, y)| h.evaluate(x) != y).count()
}

/// Non-decreasing `k`-vectors over `values`.
pub fn monotone_vectors(values: &[f64], k: usize) -> Vec<Vec<f64>> {
    fn rec(values: &[f64], k: usize, from: usize, cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..values.len() {
            cur.push(values[i]);
            rec(values, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(values, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Brute-force ERM over cell closures.
///
/// Every cell of the parameter space has its closure vertices on the grid of
/// sample points, breakpoints and domain ends. A vertex `v` touches the cells
/// reached by nudging each coordinate by `+-eps`; its error count is the best
/// over those nudges. Returns the minimum error count and the largest true
/// risk among vertices attaining it.
pub fn brute_force_erm(
    points: &[(f64, bool)],
    k: usize,
    g: &StepFunction,
    mu: &Density,
) -> (usize, f64) {
    let mut grid: Vec<f64> = vec![0.0, 1.0];
    grid.extend(points.iter().map(|p| p.0));
    grid.extend(g.breakpoints());
    grid.extend(mu.breakpoints());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let min_gap = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let eps = min_gap / 4.0;

    let mut best_errors = usize::MAX;
    let mut worst_risk = f64::NEG_INFINITY;
    for v in monotone_vectors(&grid, k) {
        let mut errors = usize::MAX;
        for signs in 0..(1u32 << k) {
            let nudged: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    if signs >> i & 1 == 1 {
                        b + eps
                    } else {
                        b - eps
                    }
                })
                .collect();
            if nudged.windows(2).any(|w| w[0] > w[1]) {
                continue;
            }
            errors = errors.min(errors_of(&nudged, points));
        }
        let r = true_risk(&v, g, mu);
        if errors < best_errors {
            best_errors = errors;
            worst_risk = r;
        } else if errors == best_errors {
            worst_risk = worst_risk.max(r);
        }
    }
    (best_errors, worst_risk)
}

/// `P{h(x) != g(x)}` by integrating over the common refinement.
pub fn true_risk(b: &[f64], g: &StepFunction, mu: &Density) -> f64 {
    let h = KBoundary::new(b.to_vec()).unwrap();
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend(b.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
    cuts.extend(g.breakpoints());
    cuts.extend(mu.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .filter(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            h.evaluate(mid) != g.value_at(mid)
        })
        .map(|w| mu.mass(Interval::new(w[0], w[1]).unwrap()).unwrap())
        .sum()
}

/// `P{(A c)_i + shift <= 0 for some i}` by summing multinomial terms one
/// composition at a time, with no algebraic shortcuts.
pub fn brute_union_probability(am: &AlphabetModel, n: usize, shift: i64) -> f64 {
    let m = am.len();
    let lf: Vec<f64> = (0..=n)
        .scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut total = 0.0;
    let mut counts = vec![0usize; m];
    loop {
        let used: usize = counts[..m - 1].iter().sum();
        if used <= n {
            counts[m - 1] = n - used;
            let hit = am.a_matrix.iter().any(|row| {
                let dot: i64 = row
                    .iter()
                    .zip(&counts)
                    .map(|(&a, &c)| i64::from(a) * c as i64)
                    .sum();
                dot + shift <= 0
            });
            if hit {
                let mut t = lf[n];
                for (j, &c) in counts.iter().enumerate() {
                    if c > 0 {
                        t += c as f64 * am.q[j].ln();
                    }
                    t -= lf[c];
                }
                total += t.exp();
            }
        }
        // Odometer over the first m - 1 counts.
        let mut j = 0;
        loop {
            if j == m - 1 {
                return total;
            }
            counts[j] += 1;
            if counts[j] <= n {
                break;
            }
            counts[j] = 0;
            j += 1;
        }
    }
}
