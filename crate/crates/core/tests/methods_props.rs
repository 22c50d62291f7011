use exact_interp::couple::{log_space, CoupleVector, WeightVector};
use exact_interp::methods::{
    complex_method_norm, j_geometric, j_method_norm_direct, k_method_norm, kj_bijection_check, reiterate,
    ComplexMethodConfig,
};
use exact_interp::pick::{eval_pick, ExtendedMeasure, PickFunctionRep};
use exact_interp::random;
use proptest::prelude::*;

fn weights_and_vector(seed: u64, n: usize) -> (WeightVector, CoupleVector) {
    let mut rng = random::rng(seed);
    let lambda = WeightVector::new(random::distinct_weights(&mut rng, n, 1e-2, 1e2, 1.01)).unwrap();
    (lambda, random::complex_vector(&mut rng, n))
}

/// Atoms `(10^u, m)` with distinct locations and optional endpoint masses.
fn atomic_measure() -> impl Strategy<Value = ExtendedMeasure> {
    (
        prop::collection::btree_map(-40i32..40, 0.05f64..3.0, 1..5),
        prop::option::of(0.05f64..2.0),
        prop::option::of(0.05f64..2.0),
    )
        .prop_map(|(atoms, m0, minf)| {
            let atoms = atoms.into_iter().map(|(u, m)| (10f64.powf(u as f64 / 10.0), m)).collect();
            ExtendedMeasure::new(m0.unwrap_or(0.0), minf.unwrap_or(0.0), atoms).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn k_method_norm_is_the_pick_quadratic_form(seed in any::<u64>(), n in 1usize..=6, atoms in 0usize..4) {
        let rho = ExtendedMeasure::random(&mut random::rng(seed ^ 1), atoms);
        prop_assume!(!rho.is_zero());
        let (lambda, x) = weights_and_vector(seed, n);
        let h = PickFunctionRep::new(rho.clone());
        let closed: f64 = lambda.values().iter().zip(x.coords()).map(|(&l, z)| eval_pick(&h, l).unwrap() * z.norm_sqr()).sum();
        let integral = k_method_norm(&rho, &lambda, &x).unwrap();
        prop_assert!((integral - closed).abs() <= 1e-7 * closed, "{} vs {}", integral, closed);
    }

    #[test]
    fn j_program_minimizer_is_explicit(nu in atomic_measure(), seed in any::<u64>(), n in 1usize..=6) {
        let (lambda, x) = weights_and_vector(seed, n);
        let c = j_method_norm_direct(&nu, &lambda, &x).unwrap();
        prop_assert!(c.gap <= 1e-8, "{:?}", c);
        prop_assert!(c.minimizer_gap <= 1e-8, "{:?}", c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn reiteration_two_paths_agree(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = random::rng(seed);
        let mut draw = || PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 3));
        let (h, h0, h1) = (draw(), draw(), draw());
        prop_assume!(!h.measure.is_zero() && !h0.measure.is_zero() && !h1.measure.is_zero());
        let r = reiterate(&h, &h0, &h1).unwrap();
        let (lambda, x) = weights_and_vector(seed ^ 7, n);
        let c = r.check(&lambda, &x).unwrap();
        prop_assert!(c.gap <= 1e-7, "{:?}", c);
    }
}

#[test]
fn geometric_pairs_are_in_bijection() {
    let grid = log_space(1e-3, 1e3, 65);
    for theta in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let gap = kj_bijection_check(&ExtendedMeasure::geometric(theta).unwrap(), &j_geometric(theta).unwrap(), &grid).unwrap();
        assert!(gap <= 1e-6, "theta = {theta}: {gap}");
    }
}

#[test]
fn complex_method_decreases_to_the_power() {
    for theta in [0.3, 0.5, 0.7] {
        for lambda in [0.25, 0.5, 2.0, 4.0] {
            let power = f64::powf(lambda, theta);
            let mut prev = f64::INFINITY;
            for n in 1..=12 {
                let h = complex_method_norm(lambda, &ComplexMethodConfig::new(theta, n).unwrap()).unwrap();
                assert!(h <= prev * (1.0 + 1e-12), "theta {theta} lambda {lambda} N {n}: {h} > {prev}");
                prev = h;
            }
            let gap = prev - power;
            assert!((-1e-9..=0.01 * power).contains(&gap), "theta {theta} lambda {lambda}: {prev} vs {power}");
        }
    }
}
