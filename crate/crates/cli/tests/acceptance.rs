//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use explab_core::exponent::{
    combined_exponent, kl_projection, kl_projection_grid_oracle, vc_agnostic_exponent,
    vc_realizable_exponent,
};
use explab_core::hypothesis::{erm_kboundary, risk, HypothesisClassSpec, KBoundary, LabeledSample};
use explab_core::montecarlo::{
    exact_shifted_probability, exact_union_probability, fit_exponent, minimal_sequence_length,
    verify_decomposition, McEstimate, Simulator,
};
use explab_core::structure::{build_alphabet, enumerate_glps, in_a_region};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Reference exponent of the worked example.
const D_REF: f64 = 0.0551;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn closed_form() -> f64 {
    -(2.0 * 0.03f64.sqrt() + 0.6).ln()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn pairs(v: &Value) -> Vec<(f64, f64)> {
    serde_json::from_value(v.clone()).unwrap_or_default()
}

fn pairs_close(got: &[(f64, f64)], want: &[(f64, f64)]) -> bool {
    got.len() == want.len()
        && got
            .iter()
            .zip(want)
            .all(|(g, w)| close(g.0, w.0, 1e-12) && close(g.1, w.1, 1e-12))
}

fn criterion_1() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_explab"))
        .args(["analyze", scenario("agnostic.json").to_str().unwrap(), "-o"])
        .arg(&out)
        .status()
        .unwrap();
    let elapsed = start.elapsed();
    if !status.success() {
        return outcome(false, format!("analyze exited with {status}"));
    }
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let glps: Vec<Vec<f64>> = serde_json::from_value(r["glps"].clone()).unwrap();
    let glps_ok = glps.len() == 2
        && glps[0].len() == 1
        && glps[1].len() == 1
        && close(glps[0][0], 0.6, 1e-12)
        && close(glps[1][0], 1.0, 1e-12);
    let d = &r["d_regions"][0];
    let regions_ok = r["d_regions"].as_array().map_or(0, Vec::len) == 1
        && pairs_close(&pairs(&d["d"]), &[(0.6, 0.9)])
        && pairs_close(&pairs(&d["d_prime"]), &[(0.9, 1.0)]);
    let symbols = r["alphabet"]["symbols"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    let want = [
        ("X_1", (0.6, 0.9)),
        ("X'_1", (0.9, 1.0)),
        ("X_c", (0.0, 0.6)),
    ];
    let symbols_ok = symbols.len() == 3
        && symbols
            .iter()
            .zip(want)
            .all(|(s, (name, iv))| s["name"] == name && pairs_close(&pairs(&s["region"]), &[iv]));
    let q: Vec<f64> = serde_json::from_value(r["alphabet"]["q"].clone()).unwrap_or_default();
    let q_ok = q.len() == 3
        && [0.3, 0.1, 0.6]
            .iter()
            .zip(&q)
            .all(|(w, g)| close(*g, *w, 1e-12));
    let a_ok = r["alphabet"]["a_matrix"] == serde_json::json!([[1, -1]]);
    let fast = elapsed < Duration::from_secs(1);
    outcome(
        glps_ok && regions_ok && symbols_ok && q_ok && a_ok && fast,
        format!(
            "glps {glps_ok}, D/D' {regions_ok}, symbols {symbols_ok}, q {q_ok} {q:?}, A {a_ok}, runtime {:.3}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let sc = common::worked_example();
    let ga = enumerate_glps(&sc).unwrap();
    let am = build_alphabet(&ga, sc.density()).unwrap();
    let cs = am.constraint_set().unwrap();
    let d = kl_projection(&am.q, &cs).unwrap().d;
    let oracle = kl_projection_grid_oracle(&am.q, &cs, 2000).unwrap();
    let elapsed = start.elapsed();
    let pass = close(d, closed_form(), 5e-4)
        && close(d, D_REF, 5e-4)
        && close(d, oracle, 1e-4)
        && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "d = {d:.10}, closed form {:.10}, grid oracle {oracle:.10}, runtime {:.2}s",
            closed_form(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_3() -> Outcome {
    let sc = common::worked_example();
    let ga = enumerate_glps(&sc).unwrap();
    let am = build_alphabet(&ga, sc.density()).unwrap();
    let d = kl_projection(&am.q, &am.constraint_set().unwrap())
        .unwrap()
        .d;
    let agnostic = vc_agnostic_exponent(0.1).unwrap();
    let realizable = vc_realizable_exponent(0.1).unwrap();
    let combined = combined_exponent(0.1, &ga, d).unwrap();
    let pass = close(agnostic, 0.0003125, 1e-15)
        && close(realizable, 0.025, 1e-15)
        && close(combined, 0.025, 1e-15);
    outcome(
        pass,
        format!("vc_agnostic {agnostic:e}, vc_realizable {realizable}, combined {combined}"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let sc = common::worked_example();
    let am = build_alphabet(&enumerate_glps(&sc).unwrap(), sc.density()).unwrap();
    let series: Vec<(usize, f64)> = (1000..=2000)
        .step_by(100)
        .map(|n| (n, exact_union_probability(&am, n).unwrap()))
        .collect();
    let slope = fit_exponent(&series).d_hat.unwrap_or(f64::NAN);
    let elapsed = start.elapsed();
    outcome(
        close(slope, D_REF, 1e-3) && elapsed < Duration::from_secs(60),
        format!(
            "slope {slope:.6} over n = 1000..2000, runtime {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// `[-ln(ci_high)/n, -ln(ci_low)/n]`.
fn exponent_ci(e: &McEstimate) -> (f64, f64) {
    let n = e.n as f64;
    (-e.ci_high().ln() / n, -e.ci_low().ln() / n)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let sc = common::worked_example();
    let sim = Simulator::new(&sc).unwrap();
    let mut points = Vec::new();
    for n in [40, 80, 120] {
        let Some(e) = sim
            .estimate_conditional_term(n, 1_000_000, 0)
            .unwrap()
            .estimate
        else {
            return outcome(false, format!("no kept trials at n = {n}"));
        };
        let Some(x) = e.exponent_pointwise() else {
            return outcome(false, format!("zero estimate at n = {n}"));
        };
        points.push((n, x, exponent_ci(&e)));
    }
    let elapsed = start.elapsed();
    let last = points[2].1;
    let within = (last - D_REF).abs() <= 0.2 * D_REF;
    let approaching = points.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        let overlap = a.2 .0 <= b.2 .1 && b.2 .0 <= a.2 .1;
        (b.1 - D_REF).abs() <= (a.1 - D_REF).abs() || overlap
    });
    let listing: Vec<String> = points
        .iter()
        .map(|(n, x, ci)| format!("n={n}: {x:.5} [{:.5}, {:.5}]", ci.0, ci.1))
        .collect();
    outcome(
        within && approaching && elapsed < Duration::from_secs(600),
        format!(
            "{}; within 20% at n=120: {within} (|{last:.5} - {D_REF}| / {D_REF} = {:.1}%), approaching: {approaching}, {} workers, runtime {:.1}s",
            listing.join(", "),
            100.0 * (last - D_REF).abs() / D_REF,
            sim.threads(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_6() -> Outcome {
    let sc = common::worked_example();
    let sim = Simulator::new(&sc).unwrap();
    let r = verify_decomposition(&sim, 50, 100_000, 0).unwrap();
    let gap = (r.lhs.p_hat - r.rhs).abs();
    let identity = gap <= 3.0 * r.sigma;

    let control = common::realizable_control();
    let csim = Simulator::new(&control).unwrap();
    let cond = csim.estimate_conditional_term(50, 100_000, 0).unwrap();
    let zero = cond.estimate.is_some_and(|e| e.successes == 0);
    outcome(
        identity && zero,
        format!(
            "LHS {:.6}, RHS {:.6}, |diff| {gap:.2e} <= 3σ = {:.2e}: {identity}; realizable cond ≡ 0: {zero}",
            r.lhs.p_hat,
            r.rhs,
            3.0 * r.sigma
        ),
    )
}

fn criterion_7() -> Outcome {
    let sc = common::worked_example();
    let ga = enumerate_glps(&sc).unwrap();
    let (g, mu) = (sc.ground_truth(), sc.density());
    let mut notes = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(0xacc);
    let mut unassigned = 0;
    let mut b2_probe_failures = 0;
    for _ in 0..10_000 {
        let theta = KBoundary::new(vec![rng.gen::<f64>()]).unwrap();
        match in_a_region(&theta, &ga, g, mu) {
            Ok(0) => {
                let excess = risk(g, &theta, mu).unwrap() - ga.opt_risk;
                let r_opt = risk(ga.theta_opt(), &theta, mu).unwrap();
                if (excess - r_opt).abs() >= 1e-12 {
                    b2_probe_failures += 1;
                }
            }
            Ok(_) => {}
            Err(_) => unassigned += 1,
        }
    }
    let partition = unassigned == 0 && b2_probe_failures == 0;
    notes.push(format!("partition {unassigned} unassigned/10^4"));

    let sim = Simulator::new(&sc).unwrap();
    let counts = sim.run_trials(50, 100_000, 1).unwrap();
    let equivalence = counts.equivalence_violations == 0 && sc.delta() < ga.delta_max;
    let implication = counts.implication_counterexamples == 0;
    notes.push(format!(
        "equivalence {} violations/10^5",
        counts.equivalence_violations
    ));
    notes.push(format!(
        "implication {} counterexamples",
        counts.implication_counterexamples
    ));

    let ell = minimal_sequence_length(&sc).unwrap();
    let mut sandwich = true;
    for n in [10, 20, 40, 80] {
        let (lower, upper) = exact_shifted_probability(sim.alphabet(), n, ell).unwrap();
        let est = sim
            .estimate_conditional_term(n, 100_000, 2)
            .unwrap()
            .estimate;
        sandwich &= est.is_some_and(|e| lower <= e.ci_high() && upper >= e.ci_low());
    }
    notes.push(format!("sandwich {sandwich}"));

    let mut erm_mismatches = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(0xe2a);
    for _ in 0..1000 {
        let mu = common::random_density(&mut rng);
        let g = common::random_truth(&mut rng, 3);
        let k = rng.gen_range(1..=2);
        let n = rng.gen_range(0..=12);
        let points: Vec<(f64, bool)> = (0..n)
            .map(|_| (mu.quantile(rng.gen()).unwrap().min(1.0 - 1e-9), rng.gen()))
            .collect();
        let spec = HypothesisClassSpec::k_boundary(k).unwrap();
        let fit = erm_kboundary(&LabeledSample::new(points.clone()), spec, &mu, &g).unwrap();
        let (errors, worst) = common::brute_force_erm(&points, k, &g, &mu);
        if fit.errors != errors || (fit.true_risk - worst).abs() > 1e-9 {
            erm_mismatches += 1;
        }
    }
    notes.push(format!("ERM {erm_mismatches} mismatches/10^3"));

    let determinism = deterministic_cli_runs();
    notes.push(format!("determinism {determinism}"));

    outcome(
        partition && equivalence && implication && sandwich && erm_mismatches == 0 && determinism,
        notes.join(", "),
    )
}

fn deterministic_cli_runs() -> bool {
    let dir = tempfile::TempDir::new().unwrap();
    let mut bytes = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let ok = Command::new(env!("CARGO_BIN_EXE_explab"))
            .args(["simulate", scenario("agnostic.json").to_str().unwrap()])
            .args([
                "--n-grid", "20:60:20", "--trials", "20000", "--seed", "3", "-o",
            ])
            .arg(&out)
            .env("EXPLAB_THREADS", threads)
            .status()
            .unwrap()
            .success();
        if !ok {
            return false;
        }
        bytes.push(std::fs::read(&out).unwrap());
    }
    bytes[0] == bytes[1]
}

fn criterion_8() -> Outcome {
    let sc = common::worked_example();
    let am = build_alphabet(&enumerate_glps(&sc).unwrap(), sc.density()).unwrap();
    let p = exact_union_probability(&am, 2).unwrap();
    // P{c_X1 <= c_X'1} for two draws with q = (0.3, 0.1, 0.6): 1 - 0.3^2 - 2*0.3*0.6.
    outcome(close(p, 0.55, 2.0 * f64::EPSILON), format!("p_2 = {p:.17}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("structure of the worked example", criterion_1),
        ("projection exponent", criterion_2),
        ("exponent comparison", criterion_3),
        ("exact-oracle slope", criterion_4),
        ("Monte Carlo conditional-term exponent", criterion_5),
        ("decomposition identity", criterion_6),
        ("property suites", criterion_7),
        ("exact oracle at n = 2", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {}: {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
