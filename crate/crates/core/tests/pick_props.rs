use exact_interp::couple::log_space;
use exact_interp::pick::{
    default_fit_grid, donoghue_inverse, donoghue_transform, eval_pick, exact_interp_randomized_test,
    fit_pick_measure, hansen_test, matrix_concavity_test, matrix_monotone_test, Counterexample, ExtendedMeasure,
    PickFit, PickFunctionRep,
};
use exact_interp::random;
use proptest::prelude::*;

/// A random measure of `atoms` atoms and endpoint masses, with a geometric density part when
/// `theta` is given.
fn sample(seed: u64, atoms: usize, theta: Option<f64>) -> PickFunctionRep {
    let m = ExtendedMeasure::random(&mut random::rng(seed), atoms);
    let m = match theta {
        Some(th) if m.density().is_none() => {
            let d = exact_interp::pick::measure::Density::geometric(th, 64).unwrap();
            m.with_density(d, 0.7).unwrap()
        }
        _ => m,
    };
    PickFunctionRep::new(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn increasing_and_quasi_concave(seed in any::<u64>(), atoms in 0usize..5, theta in prop::option::of(0.05f64..0.95)) {
        let h = sample(seed, atoms, theta);
        prop_assume!(!h.measure.is_zero());
        let grid = log_space(1e-3, 1e3, 31);
        let values: Vec<f64> = grid.iter().map(|&l| eval_pick(&h, l).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-14));
        }
        for (i, &l) in grid.iter().enumerate() {
            for (j, &m) in grid.iter().enumerate() {
                prop_assert!(values[i] <= values[j] * (1.0f64).max(l / m) * (1.0 + 1e-12), "{} {}", l, m);
            }
        }
    }

    #[test]
    fn homogeneous_in_the_measure(seed in any::<u64>(), atoms in 1usize..5, c in 1e-3f64..1e3) {
        let h = sample(seed, atoms, None);
        let hc = PickFunctionRep::new(h.measure.scaled(c).unwrap());
        for l in log_space(1e-3, 1e3, 9) {
            let (a, b) = (hc.value(l), c * h.value(l));
            prop_assert!((a - b).abs() <= 1e-14 * b, "{} vs {}", a, b);
        }
    }

    #[test]
    fn fit_reproduces_samples(seed in any::<u64>(), atoms in 1usize..4, count in 3usize..=12) {
        let h = sample(seed, atoms, None);
        let pts: Vec<(f64, f64)> = log_space(0.05, 20.0, count).iter().map(|&l| (l, h.value(l))).collect();
        let fit = fit_pick_measure(&pts, &default_fit_grid()).unwrap();
        let PickFit::Feasible { rep, .. } = fit else {
            return Err(TestCaseError::fail(format!("measure-backed samples must be feasible: {fit:?}")));
        };
        for &(l, v) in &pts {
            prop_assert!((rep.value(l) - v).abs() <= 1e-5 * v, "lambda = {}: {} vs {}", l, rep.value(l), v);
        }
    }

    #[test]
    fn donoghue_round_trip(seed in any::<u64>(), atoms in 1usize..5) {
        let h = sample(seed, atoms, None);
        for mu in log_space(1e-3, 1e3, 25) {
            let back = donoghue_inverse(|l| donoghue_transform(|v| h.value(v), l).unwrap(), mu).unwrap();
            prop_assert!((back - h.value(mu)).abs() <= 1e-10 * h.value(mu));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pick_samples_pass_the_order_tests(seed in any::<u64>(), atoms in 1usize..4) {
        let h = sample(seed, atoms, None);
        let f = |l: f64| h.value(l);
        let mut rng = random::rng(seed);
        let lambda = exact_interp::couple::WeightVector::new(random::distinct_weights(&mut rng, 4, 1e-2, 1e2, 1.05)).unwrap();
        let r = matrix_monotone_test(f, 4, 300, seed).unwrap();
        prop_assert!(r.passed(), "monotone: {}", r.worst_min_eigenvalue);
        let r = matrix_concavity_test(f, 4, 300, seed).unwrap();
        prop_assert!(r.passed(), "concave: {}", r.worst_min_eigenvalue);
        let r = exact_interp_randomized_test(f, &lambda, 300, seed).unwrap();
        prop_assert!(r.passed(), "interp: {}", r.worst_min_eigenvalue);
        let r = hansen_test(f, 4, 300, seed).unwrap();
        prop_assert!(r.passed(), "hansen: {}", r.worst_min_eigenvalue);
    }
}

#[test]
fn square_is_rejected_with_witnesses() {
    let sq = |l: f64| l * l;
    let r = matrix_monotone_test(sq, 4, 300, 0).unwrap();
    assert!(matches!(r.counterexample, Some(Counterexample::Pair(..))), "{r:?}");
    let r = matrix_concavity_test(sq, 4, 300, 0).unwrap();
    assert!(matches!(r.counterexample, Some(Counterexample::Combination { .. })), "{r:?}");
}
