//! Acceptance suite: one `PASS` or `FAIL` line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use exact_interp::calderon::polynomial::RealPolynomial;
use exact_interp::calderon::{
    construct_calderon_map, loewner_maps, verify_certificate, ConstructionConfig, LoewnerCase, VerifyOptions,
};
use exact_interp::couple::{
    big_k_functional, ep_from_kp, ep_functional, k_functional, k_oracle, kp_from_ep, kp_functional, log_space,
    CoupleVector, TimeGrid, WeightVector,
};
use exact_interp::methods::{
    complex_method_norm, j_geometric, j_method_norm_direct, k_method_norm, kj_bijection_check, reiterate,
    ComplexMethodConfig,
};
use exact_interp::pick::{
    default_fit_grid, exact_interp_randomized_test, fit_pick_measure, hansen_test, matrix_concavity_test,
    matrix_monotone_test, Counterexample, ExtendedMeasure, PickFit, PickFunctionRep,
};
use exact_interp::random::{self, Prng};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("runtime {:.2}s exceeds {limit}s", elapsed.as_secs_f64()))
    }
}

fn uniform_dim(rng: &mut Prng, max: usize) -> usize {
    use rand::Rng;
    rng.random_range(1..=max)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = random::rng(seed);
        let n = uniform_dim(&mut rng, 8);
        let lambda = WeightVector::new((0..n).map(|_| random::log_uniform(&mut rng, 1e-3, 1e3)).collect())
            .map_err(|e| e.to_string())?;
        let x = random::complex_vector(&mut rng, n);
        for t in log_space(1e-4, 1e4, 17) {
            let o = k_oracle(t, &x, &lambda).map_err(|e| e.to_string())?;
            let k = k_functional(t, &x, &lambda).map_err(|e| e.to_string())?;
            let big = big_k_functional(1.0 / t, &x, &lambda).map_err(|e| e.to_string())?;
            worst = worst.max((k - o).abs() / o).max((big - o).abs() / o);
        }
    }
    within(start.elapsed(), 5.0)?;
    check(worst <= 1e-10, format!("max relative gap {worst:.2e}"))
}

fn dominated_instance(seed: u64, max_n: usize) -> (WeightVector, CoupleVector, CoupleVector, f64) {
    let mut rng = random::rng(seed);
    let n = uniform_dim(&mut rng, max_n);
    let lambda = WeightVector::new(random::distinct_weights(&mut rng, n, 1e-3, 1e3, 1.05)).unwrap();
    let margin = 1.05 + random::log_uniform(&mut rng, 1e-3, 1.0);
    let (x, y) = random::dominated_pair(&mut rng, &lambda, margin);
    (lambda, x, y, margin)
}

fn calderon_suite() -> Outcome {
    let start = Instant::now();
    let (mut residual, mut n0, mut n1, mut margin) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for seed in 0..100u64 {
        let (lambda, x, y, _) = dominated_instance(seed, 8);
        let cert = construct_calderon_map(&x, &y, &lambda, &ConstructionConfig { seed, ..Default::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let opts = VerifyOptions { seed: seed ^ 0xacce, ..VerifyOptions::default() };
        let r = verify_certificate(&cert, &x, &y, &opts).map_err(|e| e.to_string())?;
        let scale = x.coords().iter().chain(y.coords()).map(|z| z.norm()).fold(0.0, f64::max);
        residual = residual.max(r.residual / scale);
        n0 = n0.max(r.norm0 - 1.0);
        n1 = n1.max(r.norm1 - cert.rho.powf(-0.5));
        margin = margin.min(r.domination_margin);
    }
    within(start.elapsed(), 30.0)?;
    check(
        residual <= 1e-8 && n0 <= 1e-9 && n1 <= 1e-9 && margin >= -1e-9,
        format!("residual {residual:.2e}, norm0 excess {n0:.2e}, norm1 excess {n1:.2e}, margin {margin:.2e}"),
    )
}

fn sharpness() -> Outcome {
    let (mut count, mut d0, mut d1) = (0usize, 0.0f64, 0.0f64);
    for seed in 0..400u64 {
        let (lambda, x, y, _) = dominated_instance(seed, 8);
        let cert = construct_calderon_map(&x, &y, &lambda, &ConstructionConfig { seed, ..Default::default() })
            .map_err(|e| format!("seed {seed}: {e}"))?;
        if !cert.has_complex_zeros() {
            continue;
        }
        let r = verify_certificate(&cert, &x, &y, &VerifyOptions { seed, ..VerifyOptions::default() })
            .map_err(|e| e.to_string())?;
        count += 1;
        d0 = d0.max(1.0 - r.norm0);
        d1 = d1.max(cert.rho.powf(-0.5) - r.norm1);
    }
    check(
        count > 0 && d0 <= 1e-4 && d1 <= 1e-4,
        format!("{count} instances with m < n, norm0 deficit {d0:.2e}, norm1 deficit {d1:.2e}"),
    )
}

fn geometric_identity() -> Outcome {
    let mut worst = 0.0f64;
    for (i, theta) in (1..=9).map(|k| k as f64 / 10.0).enumerate() {
        let rho = ExtendedMeasure::geometric(theta).map_err(|e| e.to_string())?;
        for j in 0..20u64 {
            let mut rng = random::rng(1000 * i as u64 + j);
            let n = uniform_dim(&mut rng, 6);
            let lambda = WeightVector::new((0..n).map(|_| random::log_uniform(&mut rng, 1e-2, 1e2)).collect())
                .map_err(|e| e.to_string())?;
            let x = random::complex_vector(&mut rng, n);
            let exact: f64 = lambda.values().iter().zip(x.coords()).map(|(l, z)| l.powf(theta) * z.norm_sqr()).sum();
            let integral = k_method_norm(&rho, &lambda, &x).map_err(|e| e.to_string())?;
            worst = worst.max((integral - exact).abs() / exact);
        }
    }
    check(worst <= 1e-7, format!("max relative gap {worst:.2e}"))
}

fn complex_method() -> Outcome {
    let start = Instant::now();
    let (mut over, mut under) = (0.0f64, 0.0f64);
    for theta in [0.3, 0.5, 0.7] {
        let cfg = ComplexMethodConfig::new(theta, 12).map_err(|e| e.to_string())?;
        for lambda in [0.25, 0.5, 2.0, 4.0] {
            let h = complex_method_norm(lambda, &cfg).map_err(|e| e.to_string())?;
            let power = f64::powf(lambda, theta);
            over = over.max((h - power) / power);
            under = under.max(power - h);
        }
    }
    within(start.elapsed(), 10.0)?;
    check(over <= 0.01 && under <= 1e-9, format!("max relative excess {over:.2e}, max shortfall {under:.2e}"))
}

fn j_method() -> Outcome {
    let (mut gap, mut minimizer) = (0.0f64, 0.0f64);
    for seed in 0..50u64 {
        let mut rng = random::rng(seed);
        let atoms = (0..uniform_dim(&mut rng, 4)).map(|_| (random::log_uniform(&mut rng, 1e-3, 1e3), random::log_uniform(&mut rng, 0.05, 3.0))).collect();
        let nu = ExtendedMeasure::new(0.0, 0.0, atoms).map_err(|e| e.to_string())?;
        let n = uniform_dim(&mut rng, 6);
        let lambda = WeightVector::new(random::distinct_weights(&mut rng, n, 1e-2, 1e2, 1.01)).map_err(|e| e.to_string())?;
        let x = random::complex_vector(&mut rng, n);
        let c = j_method_norm_direct(&nu, &lambda, &x).map_err(|e| e.to_string())?;
        gap = gap.max(c.gap);
        minimizer = minimizer.max(c.minimizer_gap);
    }
    check(gap <= 1e-8 && minimizer <= 1e-8, format!("norm gap {gap:.2e}, minimizer gap {minimizer:.2e}"))
}

fn kj_bijection() -> Outcome {
    let grid = log_space(1e-3, 1e3, 65);
    let mut worst = 0.0f64;
    for theta in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let rho = ExtendedMeasure::geometric(theta).map_err(|e| e.to_string())?;
        let nu = j_geometric(theta).map_err(|e| e.to_string())?;
        worst = worst.max(kj_bijection_check(&rho, &nu, &grid).map_err(|e| e.to_string())?);
    }
    check(worst <= 1e-6, format!("max gap {worst:.2e}"))
}

fn reiteration() -> Outcome {
    let mut worst = 0.0f64;
    let mut seed = 0u64;
    let mut done = 0;
    while done < 20 {
        seed += 1;
        let mut rng = random::rng(seed);
        let mut draw = || PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 3));
        let (h, h0, h1) = (draw(), draw(), draw());
        if [&h, &h0, &h1].iter().any(|f| f.measure.is_zero()) {
            continue;
        }
        let r = reiterate(&h, &h0, &h1).map_err(|e| e.to_string())?;
        let n = uniform_dim(&mut rng, 6);
        let lambda = WeightVector::new(random::distinct_weights(&mut rng, n, 1e-2, 1e2, 1.01)).map_err(|e| e.to_string())?;
        let x = random::complex_vector(&mut rng, n);
        worst = worst.max(r.check(&lambda, &x).map_err(|e| e.to_string())?.gap);
        done += 1;
    }
    check(worst <= 1e-7, format!("max gap {worst:.2e} over {done} triples"))
}

fn pick_fitting() -> Outcome {
    let grid = default_fit_grid();
    let sqrt: Vec<(f64, f64)> = log_space(0.1, 10.0, 8).into_iter().map(|l| (l, l.sqrt())).collect();
    let fit = fit_pick_measure(&sqrt, &grid).map_err(|e| e.to_string())?;
    let PickFit::Feasible { rep, residual } = fit else {
        return Err(format!("sqrt infeasible: residual {:.2e}", fit.residual()));
    };
    let reproduce = sqrt.iter().map(|&(l, v)| (rep.value(l) - v).abs() / v).fold(0.0, f64::max);
    let square: Vec<(f64, f64)> = [0.5, 1.0, 2.0].into_iter().map(|l| (l, l * l)).collect();
    let sq = fit_pick_measure(&square, &grid).map_err(|e| e.to_string())?;
    check(
        residual <= 1e-6 && reproduce <= 1e-5 && !sq.is_feasible(),
        format!("sqrt residual {residual:.2e}, reproduction {reproduce:.2e}, square residual {:.2e}", sq.residual()),
    )
}

fn order_suite() -> Outcome {
    let mut worst = f64::INFINITY;
    for seed in 0..20u64 {
        let mut rng = random::rng(seed);
        let h = PickFunctionRep::new(ExtendedMeasure::random(&mut rng, 3));
        if h.measure.is_zero() {
            return Err(format!("seed {seed}: zero measure"));
        }
        let f = |l: f64| h.value(l);
        let lambda = WeightVector::new(random::distinct_weights(&mut rng, 4, 1e-2, 1e2, 1.05)).map_err(|e| e.to_string())?;
        let reports = [
            ("monotone", matrix_monotone_test(f, 4, 300, seed)),
            ("concave", matrix_concavity_test(f, 4, 300, seed)),
            ("interp", exact_interp_randomized_test(f, &lambda, 300, seed)),
            ("hansen", hansen_test(f, 4, 300, seed)),
        ];
        for (name, r) in reports {
            let r = r.map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("seed {seed}: {name} failed with eigenvalue {:.2e}", r.worst_min_eigenvalue));
            }
            worst = worst.min(r.worst_min_eigenvalue);
        }
    }
    let sq = |l: f64| l * l;
    let mono = matrix_monotone_test(sq, 4, 300, 0).map_err(|e| e.to_string())?;
    let conc = matrix_concavity_test(sq, 4, 300, 0).map_err(|e| e.to_string())?;
    let rejected = matches!(mono.counterexample, Some(Counterexample::Pair(..)))
        && matches!(conc.counterexample, Some(Counterexample::Combination { .. }));
    check(
        rejected,
        format!(
            "80 checks passed (worst eigenvalue {worst:.2e}); square witnesses {:.2e} / {:.2e}",
            mono.worst_min_eigenvalue, conc.worst_min_eigenvalue
        ),
    )
}

fn loewner() -> Outcome {
    let (mut iso, mut excess) = (0.0f64, 0.0f64);
    let mut rng = random::rng(2024);
    let n = 6;
    let lambda = WeightVector::new(random::distinct_weights(&mut rng, n, 1e-2, 1e2, 1.1)).map_err(|e| e.to_string())?;
    let q = RealPolynomial::from_monomial(vec![0.7, 1.3, 0.4]).map_err(|e| e.to_string())?;
    for case in [LoewnerCase::Square, LoewnerCase::ShiftedSquare] {
        let m = loewner_maps(case, &q, &lambda).map_err(|e| e.to_string())?;
        if !m.isometric_on_data {
            return Err(format!("{case:?}: not isometric on data"));
        }
        let tx = m.t.apply(&m.x0).map_err(|e| e.to_string())?;
        let (before, after) = match case {
            LoewnerCase::Square => (m.x0.norm1_sq(&lambda).unwrap(), tx.norm1_sq(&lambda).unwrap()),
            LoewnerCase::ShiftedSquare => (m.x0.norm0_sq(), tx.norm0_sq()),
        };
        iso = iso.max((before - after).abs() / before);
        for _ in 0..50 {
            let z = CoupleVector::from_real(&random::real_vector(&mut rng, n)).map_err(|e| e.to_string())?;
            let tz = m.t.apply(&z).map_err(|e| e.to_string())?;
            for &t in TimeGrid::default().points() {
                let (a, b) = (k_functional(t, &tz, &lambda).unwrap(), k_functional(t, &z, &lambda).unwrap());
                excess = excess.max((a - b) / b);
            }
        }
    }
    check(iso <= 1e-9 && excess <= 1e-9, format!("isometry gap {iso:.2e}, k-domination excess {excess:.2e}"))
}

fn legendre() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = random::rng(seed);
        let n = uniform_dim(&mut rng, 8);
        let lambda = WeightVector::new((0..n).map(|_| random::log_uniform(&mut rng, 1e-3, 1e3)).collect())
            .map_err(|e| e.to_string())?;
        let x = random::complex_vector(&mut rng, n);
        for p in [1.5, 2.0, 3.0] {
            for t in log_space(1e-3, 1e3, 13) {
                let direct = kp_functional(t, &x, &lambda, p).map_err(|e| e.to_string())?;
                let via = kp_from_ep(t, &x, &lambda, p).map_err(|e| e.to_string())?;
                worst = worst.max((direct - via).abs() / direct);
            }
            let total: f64 = x.coords().iter().map(|z| z.norm().powf(p)).sum();
            for frac in [0.05, 0.2, 0.5, 0.8, 0.95] {
                let s = frac * total;
                let direct = ep_functional(s, &x, &lambda, p).map_err(|e| e.to_string())?;
                let via = ep_from_kp(s, &x, &lambda, p).map_err(|e| e.to_string())?;
                worst = worst.max((direct - via).abs() / direct.max(1e-12 * total));
            }
        }
    }
    check(worst <= 1e-6, format!("max relative gap {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("Calderon construction suite", calderon_suite),
        ("sharpness", sharpness),
        ("geometric identity", geometric_identity),
        ("complex method", complex_method),
        ("J-method", j_method),
        ("K-J bijection", kj_bijection),
        ("reiteration", reiteration),
        ("Pick fitting", pick_fitting),
        ("matrix-order suite", order_suite),
        ("Loewner maps", loewner),
        ("Legendre duality", legendre),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
