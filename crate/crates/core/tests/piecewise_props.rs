mod common;

use explab_core::piecewise::{disagreement_region, Density, IntervalSet, StepFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_density, random_truth, unit};

fn density_from(seed: u64) -> Density {
    random_density(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn truth_from(seed: u64) -> StepFunction {
    random_truth(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..6).prop_map(|v| {
        v.into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn density_has_unit_mass(seed in any::<u64>()) {
        let mu = density_from(seed);
        let whole = IntervalSet::from_pairs([(0.0, 1.0)]);
        prop_assert!((mu.measure(&whole).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_is_additive_on_a_split(seed in any::<u64>(), set in pairs(), cut in pairs()) {
        let mu = density_from(seed);
        let a = IntervalSet::from_pairs(set);
        let c = IntervalSet::from_pairs(cut);
        let inside = a.intersect(&c);
        let outside = a.subtract(&c);
        prop_assert!(inside.intersect(&outside).total_length() < 1e-12);
        let lhs = mu.measure(&a).unwrap();
        let rhs = mu.measure(&inside).unwrap() + mu.measure(&outside).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn union_measure_is_inclusion_exclusion(seed in any::<u64>(), a in pairs(), b in pairs()) {
        let mu = density_from(seed);
        let (a, b) = (IntervalSet::from_pairs(a), IntervalSet::from_pairs(b));
        let m = |s: &IntervalSet| mu.measure(s).unwrap();
        let lhs = m(&a.union(&b));
        let rhs = m(&a) + m(&b) - m(&a.intersect(&b));
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn complement_takes_the_rest(seed in any::<u64>(), a in pairs()) {
        let mu = density_from(seed);
        let a = IntervalSet::from_pairs(a);
        let total = mu.measure(&a).unwrap() + mu.measure(&a.complement_in(unit())).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disagreement_is_a_pseudometric(seed in any::<u64>(), s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let mu = density_from(seed);
        let (f, g, h) = (truth_from(s1), truth_from(s2), truth_from(s3));
        let d = |a: &StepFunction, b: &StepFunction| mu.measure(&disagreement_region(a, b).unwrap()).unwrap();
        prop_assert_eq!(disagreement_region(&f, &h).unwrap(), disagreement_region(&h, &f).unwrap());
        prop_assert!(d(&f, &f) == 0.0);
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-12);
    }

    #[test]
    fn region_where_agrees_pointwise(s1 in any::<u64>(), s2 in any::<u64>(), x in 0.0..1.0f64) {
        let (f, g) = (truth_from(s1), truth_from(s2));
        let region = StepFunction::region_where(&[&f, &g], |v| v[0] && !v[1]).unwrap();
        let on_edge = f.breakpoints().iter().chain(g.breakpoints()).any(|b| (b - x).abs() < 1e-9);
        prop_assume!(!on_edge);
        prop_assert_eq!(region.contains(x), f.value_at(x) && !g.value_at(x));
    }
}

#[test]
fn quantile_inverts_cdf_on_a_grid() {
    for seed in 0..50 {
        let mu = density_from(seed);
        for i in 0..1000 {
            let x = (i as f64 + 0.5) / 1000.0;
            let back = mu.quantile(mu.cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-10, "seed {seed}: {x} -> {back}");
        }
    }
}

#[test]
fn quantile_is_monotone_and_lands_in_the_domain() {
    let mu = density_from(7);
    let mut prev = 0.0;
    for i in 0..=1000 {
        let x = mu.quantile(i as f64 / 1000.0).unwrap();
        assert!(x >= prev && (0.0..=1.0).contains(&x));
        prev = x;
    }
    assert!(mu.quantile(1.5).is_err());
}
