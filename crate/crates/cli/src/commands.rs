use std::path::Path;

use serde_json::{json, Map, Value};

use explab_core::exponent::{
    combined_exponent, kl_projection, vc_agnostic_exponent, vc_realizable_exponent,
};
use explab_core::hypothesis::{aligned_candidates, KBoundary};
use explab_core::montecarlo::{
    exact_shifted_probability, fit_exponent, minimal_sequence_length, verify_decomposition,
    McEstimate, Simulator,
};
use explab_core::piecewise::IntervalSet;
use explab_core::structure::{
    build_alphabet, enumerate_glps, in_a_region, optimum_is_unique, Scenario,
};
use explab_core::Error;

use crate::output::{g17, opt, sidecar_path, write_csv, write_json, CSV_HEADER};
use crate::scenario_file::ScenarioFile;
use crate::{CliError, Mode};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ASSUMPTION: u8 = 3;

/// Class members classified in the analyze report.
const CLASSIFICATION_LIMIT: usize = 1000;

pub const REALIZABLE_NOTE: &str = "realizable: exponent δ/4";

fn load(path: &Path) -> Result<Scenario, CliError> {
    ScenarioFile::load(path)?.to_scenario()
}

fn pairs(set: &IntervalSet) -> Value {
    set.intervals()
        .iter()
        .map(|iv| json!([iv.lo(), iv.hi()]))
        .collect()
}

fn nullable(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn analyze(scenario: &Path, out: &Path) -> Result<u8, CliError> {
    let sc = load(scenario)?;
    let ga = enumerate_glps(&sc)?;
    let mu = sc.density();
    let g = sc.ground_truth();
    let am = build_alphabet(&ga, mu)?;
    let cs = am.constraint_set()?;
    let delta = sc.delta();
    let mut notes: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    let k = sc.class_spec().require_k()?;
    let mut classification = Vec::new();
    for f in aligned_candidates(g, k, usize::MAX)?
        .iter()
        .take(CLASSIFICATION_LIMIT)
    {
        let theta = KBoundary::canonical(f, k)?;
        let region = in_a_region(&theta, &ga, g, mu)?;
        classification.push(json!({ "theta": theta.boundaries(), "region": region }));
    }

    if !optimum_is_unique(&sc)? {
        warnings.push("θ_opt is not the unique risk minimiser".into());
    }
    for (i, stable) in ga.stable.iter().enumerate() {
        if !stable {
            let who = if i == 0 {
                "θ_opt".to_string()
            } else {
                format!("GLP {i}")
            };
            warnings.push(format!("{who} is not stable"));
        }
    }

    let projection = if ga.glps.len() > 1 {
        Some(kl_projection(&am.q, &cs)?)
    } else {
        notes.push(REALIZABLE_NOTE.into());
        None
    };
    let d = projection.as_ref().map_or(f64::INFINITY, |p| p.d);
    let combined = match combined_exponent(delta, &ga, d) {
        Ok(c) => Some(c),
        Err(Error::Assumption(msg)) => {
            warnings.push(msg);
            None
        }
        Err(e) => return Err(e.into()),
    };

    let mut exponents = Map::new();
    if let Some(p) = &projection {
        exponents.insert("d".into(), json!(p.d));
        exponents.insert("p_star".into(), json!(p.p_star));
        exponents.insert("active_row".into(), json!(p.active_row));
    }
    exponents.insert("vc_agnostic".into(), json!(vc_agnostic_exponent(delta)?));
    exponents.insert(
        "vc_realizable".into(),
        json!(vc_realizable_exponent(delta)?),
    );
    exponents.insert(
        "combined".into(),
        combined.map_or(Value::Null, |c| json!(c)),
    );

    let report = json!({
        "scenario": ScenarioFile::from_scenario(&sc),
        "glps": ga.glps.iter().map(|h| h.boundaries().to_vec()).collect::<Vec<_>>(),
        "opt_risk": ga.opt_risk,
        "stable": ga.stable,
        "a_regions_sample_classification": classification,
        "d_regions": ga.d_regions.iter().map(|(d, dp)| json!({
            "d": pairs(d),
            "d_prime": pairs(dp),
        })).collect::<Vec<_>>(),
        "alphabet": {
            "symbols": am.symbols.iter().map(|s| json!({
                "name": s.name,
                "region": pairs(&s.region),
            })).collect::<Vec<_>>(),
            "q": am.q,
            "a_matrix": am.a_matrix,
        },
        "delta_max": nullable(ga.delta_max),
        "exponents": exponents,
        "notes": notes,
        "warnings": warnings,
    });
    write_json(out, &report)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(if warnings.is_empty() {
        EXIT_OK
    } else {
        EXIT_ASSUMPTION
    })
}

/// `a:b:step` into `a, a + step, ...` up to `b`.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || {
        CliError::Input(format!(
            "--n-grid: expected a:b:step with 0 < a <= b and step > 0, got {spec:?}"
        ))
    };
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [a, b, step] = parts[..] else {
        return Err(bad());
    };
    if a == 0 || step == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

fn estimate_row(e: &McEstimate) -> Vec<String> {
    vec![
        e.n.to_string(),
        g17(e.p_hat),
        g17(e.ci_low()),
        g17(e.ci_high()),
        opt(e.exponent_pointwise()),
    ]
}

pub fn simulate(
    scenario: &Path,
    grid: &[usize],
    trials: u64,
    seed: u64,
    mode: Mode,
    out: &Path,
) -> Result<u8, CliError> {
    if trials == 0 {
        return Err(CliError::Input("--trials: must be at least 1".into()));
    }
    let sc = load(scenario)?;
    let sim = Simulator::new(&sc)?;
    let realizable = sim.analysis().glps.len() == 1;
    if mode == Mode::Decomposition && sc.delta() >= sim.analysis().delta_max {
        return Err(Error::Assumption(format!(
            "Assumption 5 violated: δ_max={}",
            g17(sim.analysis().delta_max)
        ))
        .into());
    }

    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if mode == Mode::Decomposition {
        header.extend([
            "p_r",
            "conditional",
            "rhs",
            "sigma",
            "within_3sigma",
            "equivalence_violations",
            "implication_counterexamples",
        ]);
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut series = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for &n in grid {
        match mode {
            Mode::Pac => {
                let e = sim.estimate_pac_error(n, trials, seed)?;
                series.push((n, e.p_hat));
                rows.push(estimate_row(&e));
            }
            Mode::Conditional => {
                let c = sim.estimate_conditional_term(n, trials, seed)?;
                match c.estimate {
                    Some(e) => {
                        series.push((n, e.p_hat));
                        rows.push(estimate_row(&e));
                    }
                    None => rows.push(vec![
                        n.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]),
                }
            }
            Mode::Decomposition => {
                let r = verify_decomposition(&sim, n, trials, seed)?;
                series.push((n, r.lhs.p_hat));
                let mut row = estimate_row(&r.lhs);
                row.extend([
                    g17(r.p_r.p_hat),
                    opt(r.conditional.estimate.map(|e| e.p_hat)),
                    g17(r.rhs),
                    g17(r.sigma),
                    r.within_3sigma.to_string(),
                    r.equivalence_violations.to_string(),
                    r.implication_counterexamples.to_string(),
                ]);
                rows.push(row);
                if !r.holds() {
                    failures.push(r);
                }
            }
        }
    }
    write_csv(out, &header, &rows)?;

    let fit = fit_exponent(&series);
    let mut notes: Vec<String> = Vec::new();
    if fit.dropped > 0 {
        let msg = format!("{} zero estimates left out of the fit", fit.dropped);
        eprintln!("warning: {msg}");
        notes.push(msg);
    }
    if fit.d_hat.is_none() {
        notes.push("fewer than two positive estimates; d_hat omitted".into());
    }
    if realizable {
        notes.push(REALIZABLE_NOTE.into());
    }
    let mut sidecar = Map::new();
    sidecar.insert("mode".into(), json!(mode.name()));
    sidecar.insert("trials".into(), json!(trials));
    sidecar.insert("seed".into(), json!(seed));
    sidecar.insert("n_grid".into(), json!(grid));
    if let Some(d) = fit.d_hat {
        sidecar.insert("d_hat".into(), json!(d));
    }
    sidecar.insert("notes".into(), json!(notes));
    if mode == Mode::Decomposition {
        sidecar.insert("violations".into(), json!(failures));
    }
    write_json(&sidecar_path(out), &Value::Object(sidecar))?;

    if failures.is_empty() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Check(format!(
            "decomposition check failed for n = {:?}; counterexamples in {}",
            failures.iter().map(|r| r.n).collect::<Vec<_>>(),
            sidecar_path(out).display()
        )))
    }
}

/// `--ell` value: `auto` or a non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ell {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Ell {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse()
            .map(Self::Fixed)
            .map_err(|_| format!("expected 'auto' or a non-negative integer, got {s:?}"))
    }
}

pub fn oracle(scenario: &Path, n_max: usize, ell: Ell, out: &Path) -> Result<u8, CliError> {
    if n_max == 0 {
        return Err(CliError::Input("--n-max: must be at least 1".into()));
    }
    let sc = load(scenario)?;
    let ga = enumerate_glps(&sc)?;
    let am = build_alphabet(&ga, sc.density())?;
    let ell = match ell {
        Ell::Auto => minimal_sequence_length(&sc)?,
        Ell::Fixed(l) => l,
    };
    let mut rows = Vec::with_capacity(n_max);
    let mut upper_series = Vec::with_capacity(n_max);
    let mut lower_series = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (lower, upper) = exact_shifted_probability(&am, n, ell)?;
        rows.push(vec![
            n.to_string(),
            g17(upper),
            g17(lower),
            g17(upper),
            opt((upper > 0.0).then(|| -upper.ln() / n as f64)),
        ]);
        upper_series.push((n, upper));
        lower_series.push((n, lower));
    }
    write_csv(out, &CSV_HEADER, &rows)?;

    // Fit over the upper half of the range, where the prefactor matters least.
    let from = n_max.div_ceil(2);
    let tail = |s: &[(usize, f64)]| fit_exponent(&s[from - 1..]);
    let (fit_upper, fit_lower) = (tail(&upper_series), tail(&lower_series));
    let mut sidecar = Map::new();
    sidecar.insert("ell".into(), json!(ell));
    sidecar.insert("n_max".into(), json!(n_max));
    sidecar.insert("fit_range".into(), json!([from, n_max]));
    if let Some(d) = fit_upper.d_hat {
        sidecar.insert("d_hat".into(), json!(d));
    }
    if let Some(d) = fit_lower.d_hat {
        sidecar.insert("d_hat_lower".into(), json!(d));
    }
    let mut notes = Vec::new();
    if ga.glps.len() == 1 {
        notes.push(REALIZABLE_NOTE);
    }
    sidecar.insert("notes".into(), json!(notes));
    write_json(&sidecar_path(out), &Value::Object(sidecar))?;
    Ok(EXIT_OK)
}
