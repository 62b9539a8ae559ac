//! Rates: the constraint set `Pi` on the symbol simplex, KL divergence, the
//! information projection `D(Pi || Q)`, the VC exponents and their
//! combination. All rates are in nats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::GlpAnalysis;

/// Slack allowed when testing a row constraint `a . p <= 0`.
pub const PI_TOL: f64 = 1e-12;
const SIMPLEX_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;
/// Cap on the number of grid points visited by the grid oracle.
pub const GRID_ORACLE_LIMIT: u64 = 100_000_000;

/// `Pi = {p : (A p)_i <= 0 for some row i}`. Rows may be shorter than the
/// alphabet; missing columns are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSet {
    a_matrix: Vec<Vec<i8>>,
    alphabet_size: usize,
}

impl ConstraintSet {
    pub fn new(a_matrix: Vec<Vec<i8>>, alphabet_size: usize) -> Result<Self> {
        for (i, row) in a_matrix.iter().enumerate() {
            if row.len() > alphabet_size {
                return Err(Error::Argument(format!(
                    "row {i} has {} columns for an alphabet of {alphabet_size}",
                    row.len()
                )));
            }
            if row.iter().all(|&a| a == 0) {
                return Err(Error::Argument(format!("row {i} is identically zero")));
            }
        }
        Ok(Self {
            a_matrix,
            alphabet_size,
        })
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.a_matrix
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// `(A p)_row`.
    pub fn row_dot(&self, row: usize, p: &[f64]) -> f64 {
        self.a_matrix[row]
            .iter()
            .zip(p)
            .map(|(&a, &x)| f64::from(a) * x)
            .sum()
    }

    /// Whether integer counts `c` satisfy some row with `(A c)_i + shift <= 0`.
    pub fn counts_in_pi(&self, counts: &[u64], shift: i64) -> bool {
        self.a_matrix.iter().any(|row| {
            let dot: i64 = row
                .iter()
                .zip(counts)
                .map(|(&a, &c)| i64::from(a) * c as i64)
                .sum();
            dot + shift <= 0
        })
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.alphabet_size {
            return Err(Error::Argument(format!(
                "vector of length {} for an alphabet of {}",
                p.len(),
                self.alphabet_size
            )));
        }
        Ok(())
    }
}

/// Membership of a probability vector in the closed set `Pi`.
pub fn in_pi(p: &[f64], cs: &ConstraintSet) -> Result<bool> {
    cs.check_len(p)?;
    let total: f64 = p.iter().sum();
    if p.iter().any(|&x| x.is_nan() || x < -SIMPLEX_TOL) || (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Argument(format!(
            "{p:?} is not a probability vector"
        )));
    }
    Ok((0..cs.rows().len()).any(|i| cs.row_dot(i, p) <= PI_TOL))
}

/// `sum p_i ln(p_i / q_i)`; infinite when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Argument(format!(
            "length mismatch: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += pi * (pi / qi).ln();
        }
    }
    Ok(d.max(0.0))
}

/// Closest point of `Pi` to `Q` in KL divergence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub d: f64,
    pub p_star: Vec<f64>,
    pub active_row: usize,
}

/// `D(Pi || q) = min_p D(p || q)` over `p` in `Pi`.
///
/// `Pi` is a union of half-spaces, so the projection is the best of the
/// per-row projections. For a row that `q` violates the constraint is
/// active at the optimum, which lies in the exponential family
/// `p_j ~ q_j exp(-lambda a_j)`; `lambda` is found by bisection.
pub fn kl_projection(q: &[f64], cs: &ConstraintSet) -> Result<Projection> {
    cs.check_len(q)?;
    if q.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Argument(format!(
            "q must be strictly positive, got {q:?}"
        )));
    }
    if cs.rows().is_empty() {
        return Err(Error::Argument("constraint set has no rows".into()));
    }
    let mut best: Option<Projection> = None;
    for row in 0..cs.rows().len() {
        let candidate = project_row(q, cs, row)?;
        if best.as_ref().is_none_or(|b| candidate.d < b.d) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one row"))
}

fn project_row(q: &[f64], cs: &ConstraintSet, row: usize) -> Result<Projection> {
    let a: Vec<f64> = (0..q.len())
        .map(|j| f64::from(cs.rows()[row].get(j).copied().unwrap_or(0)))
        .collect();
    let dot = |p: &[f64]| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>();
    if dot(q) <= PI_TOL {
        return Ok(Projection {
            d: 0.0,
            p_star: q.to_vec(),
            active_row: row,
        });
    }
    if a.iter().all(|&x| x >= 0.0) {
        // The constraint forces all mass onto the zero columns.
        let zero_mass: f64 = q
            .iter()
            .zip(&a)
            .filter(|(_, &x)| x == 0.0)
            .map(|(q, _)| q)
            .sum();
        if zero_mass <= 0.0 {
            return Ok(Projection {
                d: f64::INFINITY,
                p_star: q.to_vec(),
                active_row: row,
            });
        }
        let p_star: Vec<f64> = q
            .iter()
            .zip(&a)
            .map(|(&qj, &x)| if x == 0.0 { qj / zero_mass } else { 0.0 })
            .collect();
        return Ok(Projection {
            d: -zero_mass.ln(),
            p_star,
            active_row: row,
        });
    }

    let tilt = |lambda: f64| -> Vec<f64> {
        let logs: Vec<f64> = q
            .iter()
            .zip(&a)
            .map(|(qj, x)| qj.ln() - lambda * x)
            .collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let mut hi = 1.0;
    while dot(&tilt(hi)) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical(
                "no sign change while bracketing the tilt".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let p = tilt(mid);
        let f = dot(&p);
        if f.abs() < PI_TOL {
            let d = kl_divergence(&p, q)?;
            return Ok(Projection {
                d,
                p_star: p,
                active_row: row,
            });
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical(format!(
        "tilt bisection for row {row} did not converge"
    )))
}

/// Brute-force `D(Pi || q)` over the simplex points with denominator
/// `resolution`; an upper bound on the projection that converges to it.
pub fn kl_projection_grid_oracle(q: &[f64], cs: &ConstraintSet, resolution: u64) -> Result<f64> {
    cs.check_len(q)?;
    let m = q.len();
    if m > 4 {
        return Err(Error::Resource(format!(
            "grid oracle supports at most 4 symbols, got {m}"
        )));
    }
    if resolution == 0 {
        return Err(Error::Argument("resolution must be positive".into()));
    }
    let points = compositions_count(resolution, m);
    if points > GRID_ORACLE_LIMIT as f64 {
        return Err(Error::Resource(format!(
            "{points} grid points exceed the limit of {GRID_ORACLE_LIMIT}"
        )));
    }
    let mut best = f64::INFINITY;
    let mut counts = vec![0u64; m];
    let mut p = vec![0.0; m];
    for_each_composition(resolution, &mut counts, 0, &mut |c| {
        if cs.counts_in_pi(c, 0) {
            for (pj, &cj) in p.iter_mut().zip(c) {
                *pj = cj as f64 / resolution as f64;
            }
            if let Ok(d) = kl_divergence(&p, q) {
                best = best.min(d);
            }
        }
    });
    Ok(best)
}

/// Number of compositions of `n` into `m` non-negative parts.
pub(crate) fn compositions_count(n: u64, m: usize) -> f64 {
    if m == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut acc = 1.0;
    for i in 1..m {
        acc *= (n as f64 + i as f64) / i as f64;
    }
    acc
}

/// Calls `f` on every composition of `n` into `counts.len()` parts, in
/// lexicographic order.
pub(crate) fn for_each_composition<F: FnMut(&[u64])>(
    n: u64,
    counts: &mut [u64],
    start: usize,
    f: &mut F,
) {
    let m = counts.len();
    if m == 0 {
        if n == 0 {
            f(counts);
        }
        return;
    }
    if start == m - 1 {
        counts[start] = n;
        f(counts);
        return;
    }
    for c in 0..=n {
        counts[start] = c;
        for_each_composition(n - c, counts, start + 1, f);
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Exponent of the agnostic VC bound, `delta^2 / 32`.
pub fn vc_agnostic_exponent(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(delta * delta / 32.0)
}

/// Exponent of the realizable VC bound, `delta / 4`.
pub fn vc_realizable_exponent(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(delta / 4.0)
}

/// `min(delta / 4, d)`, defined for `delta < delta_max`.
pub fn combined_exponent(delta: f64, ga: &GlpAnalysis, d: f64) -> Result<f64> {
    let realizable = vc_realizable_exponent(delta)?;
    if delta >= ga.delta_max {
        return Err(Error::Assumption(format!(
            "Assumption 5 violated: δ_max={} but δ={delta}",
            (ga.delta_max * 1e12).round() / 1e12
        )));
    }
    Ok(realizable.min(d))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub delta: f64,
    pub vc_agnostic: f64,
    pub vc_realizable: f64,
    /// Absent for realizable problems, where no alternative GLP exists.
    pub projection: Option<Projection>,
    pub combined: f64,
}

/// All rates of an analysed problem.
pub fn exponent_report(
    delta: f64,
    ga: &GlpAnalysis,
    q: &[f64],
    cs: &ConstraintSet,
) -> Result<ExponentReport> {
    let vc_agnostic = vc_agnostic_exponent(delta)?;
    let vc_realizable = vc_realizable_exponent(delta)?;
    let projection = if cs.rows().is_empty() {
        None
    } else {
        Some(kl_projection(q, cs)?)
    };
    let d = projection.as_ref().map_or(f64::INFINITY, |p| p.d);
    let combined = combined_exponent(delta, ga, d)?;
    Ok(ExponentReport {
        delta,
        vc_agnostic,
        vc_realizable,
        projection,
        combined,
    })
}
