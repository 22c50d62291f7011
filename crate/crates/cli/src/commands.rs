//! Argument definitions and the implementation of every subcommand.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use exact_interp::calderon::certificate::{Witness, WitnessKind};
use exact_interp::calderon::polynomial::RealPolynomial;
use exact_interp::calderon::{
    check_domination, construct_calderon_map, construct_relative_map, loewner_maps, verify_certificate,
    ConstructionConfig, ContractionCertificate, LoewnerCase, VerificationReport, VerifyOptions,
};
use exact_interp::couple::{
    big_k_functional, j_functional, k_functional, kp_functional, log_space, operator_norms_between, CoupleVector,
    TimeGrid, WeightVector,
};
use exact_interp::methods::{
    complex_method_norm, j_geometric, j_method_norm_direct, k_method_norm, kj_bijection_check, power_p_function,
    reiterate, ComplexMethodConfig, MethodKind, MethodSpec,
};
use exact_interp::pick::{
    exact_interp_randomized_test, fit_pick_measure_with_tol, hansen_test, matrix_concavity_test,
    matrix_monotone_test, type_h_bound_check, Counterexample, ExtendedMeasure, OrderReport, PickFit, PickFunctionRep,
};
use exact_interp::random;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::files::{entries, matrix_rows, to_json, write_json, CertFile, CoupleFile, MeasureFile, PointsFile};

#[derive(Debug, Parser)]
#[command(name = "exact-interp", version, about = "Exact interpolation on weighted Hilbert couples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluates K(t, x) (or k, or K_p) at the given parameters.
    Kfun {
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Writes the curve as CSV with columns `t,K`.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Evaluates the small functional k(t, x) = K(1/t, x) instead.
        #[arg(long, conflicts_with = "p")]
        small: bool,
        /// Evaluates K_p for the l_p couple instead.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Evaluates J(t, x) at the given parameters.
    Jfun {
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Writes the curve as CSV with columns `t,J`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Builds a contraction sending x to y and writes its certificate.
    Construct {
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Takes y from a second couple and builds a map between the two couples.
        #[arg(long)]
        target_couple: Option<PathBuf>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        max_retries: usize,
        /// Verification trials used to measure the domination margin.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Projects the map onto its real part when the data are real.
        #[arg(long)]
        real: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol_residual: f64,
    },
    /// Re-checks a certificate; exits 3 with a witness on any violation.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        target_couple: Option<PathBuf>,
        /// Overrides the vector names recorded in the certificate.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Defaults to the seed recorded in the certificate.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-8)]
        tol_residual: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_norm: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_margin: f64,
    },
    /// Builds the partial isometries attached to P = q^2 or P = t q^2.
    Loewner {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        /// Coefficients of q, lowest degree first.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        q: Vec<f64>,
        #[arg(long, value_enum, default_value_t = CaseArg::Square)]
        case: CaseArg,
        /// Writes the weights and the data vectors `x0`, `y0` as a couple file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits a positive Pick function to samples `(lambda, h)`.
    Pickfit {
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol_fit: f64,
        #[arg(long, default_value_t = 1e-8)]
        grid_lo: f64,
        #[arg(long, default_value_t = 1e8)]
        grid_hi: f64,
        #[arg(long, default_value_t = 200)]
        grid_n: usize,
    },
    /// Runs randomized matrix-order tests on a function.
    Picktest {
        /// `sqrt`, `identity`, `square`, `log1p`, `power:THETA` or `measure:FILE`.
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = OrderTest::All)]
        test: OrderTest,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 300)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weights of the exact-interpolation test; random distinct weights by default.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Squared norm of a vector under a K- or J-method.
    Norm {
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::K)]
        method: MethodArg,
        /// Uses the p-th power analogue of the method.
        #[arg(long)]
        p: Option<f64>,
        /// Also solves the J-method program directly (atomic measures only).
        #[arg(long)]
        direct: bool,
    },
    /// Compares the reiterated norm computed on the derived couple with the direct formula.
    Reiterate {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        h0: PathBuf,
        #[arg(long)]
        h1: PathBuf,
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 1e-7)]
        tol_gap: f64,
    },
    /// Checks that a K-measure and a J-measure give the same function.
    Kjcheck {
        /// Uses the geometric pair of exponent THETA.
        #[arg(long, conflicts_with_all = ["rho", "nu"])]
        theta: Option<f64>,
        #[arg(long, requires = "nu")]
        rho: Option<PathBuf>,
        #[arg(long, requires = "rho")]
        nu: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        grid_lo: f64,
        #[arg(long, default_value_t = 1e3)]
        grid_hi: f64,
        #[arg(long, default_value_t = 65)]
        grid_n: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol_gap: f64,
    },
    /// Complex-method value h_N(lambda) next to lambda^theta.
    Complex {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 12)]
        degree: usize,
    },
    /// Domination check, construction and verification of one pair in a single report.
    Report {
        #[arg(long)]
        couple: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Also writes the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Square,
    Shifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderTest {
    Monotone,
    Concave,
    Interp,
    Hansen,
    Quasiconcave,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    K,
    J,
}

/// Text for stdout and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }

    fn json(value: &Value, pass: bool) -> Self {
        Self { text: to_json(value) + "\n", code: if pass { 0 } else { 3 } }
    }
}

type CmdResult = Result<Output, CliError>;

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Kfun { couple, x, t, csv, small, p } => kfun(&couple, &x, &t, csv.as_deref(), small, p),
        Command::Jfun { couple, x, t, csv } => jfun(&couple, &x, &t, csv.as_deref()),
        Command::Construct { couple, x, y, target_couple, rho, seed, out, max_retries, trials, real, tol_residual } => {
            let cfg = ConstructionConfig {
                rho,
                seed,
                max_retries,
                verify_trials: trials,
                real_projection: real,
                residual_tol: tol_residual,
                ..ConstructionConfig::default()
            };
            construct(&couple, target_couple.as_deref(), &x, &y, &cfg, &out)
        }
        Command::Verify { cert, couple, target_couple, x, y, trials, seed, tol_residual, tol_norm, tol_margin } => {
            let file: CertFile = crate::files::read_json(&cert)?;
            let opts = VerifyOptions {
                trials,
                seed: seed.unwrap_or(file.seed),
                residual_tol: tol_residual,
                norm_tol: tol_norm,
                margin_tol: tol_margin,
                ..VerifyOptions::default()
            };
            let x = x.unwrap_or_else(|| file.x.clone());
            let y = y.unwrap_or_else(|| file.y.clone());
            verify(&file, &couple, target_couple.as_deref(), &x, &y, &opts)
        }
        Command::Loewner { weights, q, case, out } => loewner(weights, q, case, out.as_deref()),
        Command::Pickfit { points, tol_fit, grid_lo, grid_hi, grid_n } => {
            pickfit(&points, tol_fit, grid_lo, grid_hi, grid_n)
        }
        Command::Picktest { function, test, n, trials, seed, weights } => {
            picktest(&function, test, n, trials, seed, weights)
        }
        Command::Norm { couple, x, measure, method, p, direct } => norm(&couple, &x, &measure, method, p, direct),
        Command::Reiterate { h, h0, h1, couple, x, tol_gap } => reiteration(&h, &h0, &h1, &couple, &x, tol_gap),
        Command::Kjcheck { theta, rho, nu, grid_lo, grid_hi, grid_n, tol_gap } => {
            kjcheck(theta, rho.as_deref(), nu.as_deref(), grid_lo, grid_hi, grid_n, tol_gap)
        }
        Command::Complex { lambda, theta, degree } => complex(lambda, theta, degree),
        Command::Report { couple, x, y, seed, trials, out } => report(&couple, &x, &y, seed, trials, out.as_deref()),
    }
}

/// Shortest text that reads back to the same `f64`, in exponent form for very small or large
/// magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// A JSON number, or the strings `inf`, `-inf`, `nan` for values JSON cannot hold.
fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn load_pair(couple: &Path, x: &str) -> Result<(WeightVector, CoupleVector), CliError> {
    let file = CoupleFile::load(couple)?;
    Ok((file.weight_vector()?, file.vector(x)?))
}

fn curve(ts: &[f64], values: &[f64], csv: Option<&Path>, column: &str) -> CmdResult {
    if let Some(path) = csv {
        let mut text = format!("t,{column}\n");
        for (t, v) in ts.iter().zip(values) {
            text.push_str(&format!("{t:e},{}\n", num(*v)));
        }
        std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(Output::ok(values.iter().map(|&v| num(v) + "\n").collect()))
}

fn kfun(couple: &Path, x: &str, ts: &[f64], csv: Option<&Path>, small: bool, p: Option<f64>) -> CmdResult {
    let (lambda, x) = load_pair(couple, x)?;
    let values = ts
        .iter()
        .map(|&t| match (small, p) {
            (true, _) => k_functional(t, &x, &lambda),
            (false, Some(p)) => kp_functional(t, &x, &lambda, p),
            (false, None) => big_k_functional(t, &x, &lambda),
        })
        .collect::<exact_interp::Result<Vec<f64>>>()?;
    let column = match (small, p) {
        (true, _) => "k",
        (false, Some(_)) => "K_p",
        (false, None) => "K",
    };
    curve(ts, &values, csv, column)
}

fn jfun(couple: &Path, x: &str, ts: &[f64], csv: Option<&Path>) -> CmdResult {
    let (lambda, x) = load_pair(couple, x)?;
    let values = ts.iter().map(|&t| j_functional(t, &x, &lambda)).collect::<exact_interp::Result<Vec<f64>>>()?;
    curve(ts, &values, csv, "J")
}

fn build_certificate(
    couple: &Path,
    target: Option<&Path>,
    x: &str,
    y: &str,
    cfg: &ConstructionConfig,
) -> Result<ContractionCertificate, CliError> {
    let source = CoupleFile::load(couple)?;
    let (lambda, x0) = (source.weight_vector()?, source.vector(x)?);
    match target {
        None => Ok(construct_calderon_map(&x0, &source.vector(y)?, &lambda, cfg)?),
        Some(path) => {
            let target = CoupleFile::load(path)?;
            Ok(construct_relative_map(&x0, &lambda, &target.vector(y)?, &target.weight_vector()?, cfg)?)
        }
    }
}

fn certificate_summary(cert: &ContractionCertificate) -> Value {
    let bounds = cert.norm_bounds();
    json!({
        "rho": jnum(cert.rho),
        "norm0": jnum(cert.norm0),
        "norm1": jnum(cert.norm1),
        "norm_bounds": [jnum(bounds.0), jnum(bounds.1)],
        "map_residual": jnum(cert.map_residual),
        "domination_margin": jnum(cert.domination_margin),
        "attempts": cert.attempts,
        "complex_zeros": cert.has_complex_zeros(),
    })
}

fn construct(couple: &Path, target: Option<&Path>, x: &str, y: &str, cfg: &ConstructionConfig, out: &Path) -> CmdResult {
    let cert = build_certificate(couple, target, x, y, cfg)?;
    write_json(out, &CertFile::new(&cert, x, y, cfg.seed))?;
    Ok(Output::json(&certificate_summary(&cert), true))
}

fn witness_json(w: &Witness) -> Value {
    let kind = match w.kind {
        WitnessKind::Residual => "residual",
        WitnessKind::Norm0 => "norm0",
        WitnessKind::Norm1 => "norm1",
        WitnessKind::Domination => "domination",
    };
    json!({
        "kind": kind,
        "t": jnum(w.t),
        "x": entries(w.x.coords()),
        "lhs": jnum(w.lhs),
        "rhs": jnum(w.rhs),
    })
}

fn report_json(r: &VerificationReport) -> Value {
    let mut v = json!({
        "pass": r.pass,
        "residual": jnum(r.residual),
        "residual_pass": r.residual_pass,
        "norm0": jnum(r.norm0),
        "norm1": jnum(r.norm1),
        "norm_bounds": [jnum(r.bounds.0), jnum(r.bounds.1)],
        "norms_pass": r.norms_pass,
        "domination_margin": jnum(r.domination_margin),
        "domination_pass": r.domination_pass,
        "failures": r.failures,
    });
    if let Some(w) = &r.witness {
        v["witness"] = witness_json(w);
    }
    if let Some(s) = &r.sharpness {
        v["sharpness"] = json!({ "norm0_deficit": jnum(s.norm0_deficit), "norm1_deficit": jnum(s.norm1_deficit) });
    }
    v
}

fn verify(file: &CertFile, couple: &Path, target: Option<&Path>, x: &str, y: &str, opts: &VerifyOptions) -> CmdResult {
    let cert = file.to_certificate()?;
    let source = CoupleFile::load(couple)?;
    let x0 = source.vector(x)?;
    let y0 = match target {
        None => source.vector(y)?,
        Some(path) => CoupleFile::load(path)?.vector(y)?,
    };
    let report = verify_certificate(&cert, &x0, &y0, opts)?;
    Ok(Output::json(&report_json(&report), report.pass))
}

fn loewner(weights: Vec<f64>, q: Vec<f64>, case: CaseArg, out: Option<&Path>) -> CmdResult {
    let lambda = WeightVector::new(weights)?;
    let q = RealPolynomial::from_monomial(q)?;
    let case = match case {
        CaseArg::Square => LoewnerCase::Square,
        CaseArg::Shifted => LoewnerCase::ShiftedSquare,
    };
    let maps = loewner_maps(case, &q, &lambda)?;
    let (norm0, norm1) = operator_norms_between(&maps.t, &lambda, &lambda)?;
    if let Some(path) = out {
        let file = CoupleFile {
            weights: lambda.values().to_vec(),
            vectors: [("x0".to_owned(), entries(maps.x0.coords())), ("y0".to_owned(), entries(maps.y0.coords()))]
                .into_iter()
                .collect(),
        };
        write_json(path, &file)?;
    }
    let v = json!({
        "x0": entries(maps.x0.coords()),
        "y0": entries(maps.y0.coords()),
        "t": matrix_rows(maps.t.entries()),
        "isometric_on_data": maps.isometric_on_data,
        "norm0": jnum(norm0),
        "norm1": jnum(norm1),
    });
    Ok(Output::json(&v, true))
}

fn pickfit(points: &Path, tol: f64, lo: f64, hi: f64, count: usize) -> CmdResult {
    let pts = crate::files::read_json::<PointsFile>(points)?.points();
    if !(lo > 0.0 && hi > lo && hi.is_finite() && count >= 2) {
        return Err(CliError::Input(format!("bad candidate grid [{lo}, {hi}] with {count} points")));
    }
    let grid = log_space(lo, hi, count);
    match fit_pick_measure_with_tol(&pts, &grid, tol)? {
        PickFit::Feasible { rep, residual } => {
            eprintln!("residual={}", num(residual));
            Ok(Output::json(&json!(MeasureFile::from_measure(&rep.measure)), true))
        }
        PickFit::Infeasible { residual } => Ok(Output::ok(format!("infeasible residual={}\n", num(residual)))),
    }
}

type ScalarFn = Box<dyn Fn(f64) -> f64>;

fn parse_function(spec: &str) -> Result<ScalarFn, CliError> {
    let f: ScalarFn = match spec {
        "sqrt" => Box::new(f64::sqrt),
        "identity" => Box::new(|l| l),
        "square" => Box::new(|l| l * l),
        "log1p" => Box::new(f64::ln_1p),
        _ => {
            if let Some(theta) = spec.strip_prefix("power:") {
                let theta: f64 =
                    theta.parse().map_err(|_| CliError::Input(format!("bad exponent in {spec:?}")))?;
                if !theta.is_finite() {
                    return Err(CliError::Input(format!("bad exponent in {spec:?}")));
                }
                Box::new(move |l: f64| l.powf(theta))
            } else if let Some(path) = spec.strip_prefix("measure:") {
                let rep = PickFunctionRep::new(MeasureFile::load(Path::new(path))?);
                Box::new(move |l| rep.value(l))
            } else {
                return Err(CliError::Input(format!("unknown function {spec:?}")));
            }
        }
    };
    Ok(f)
}

fn counterexample_json(c: &Counterexample) -> Value {
    match c {
        Counterexample::Map(t) => json!({ "map": matrix_rows(t) }),
        Counterexample::Pair(a, b) => json!({ "pair": [matrix_rows(a), matrix_rows(b)] }),
        Counterexample::Combination { a1, a2, weight } => {
            json!({ "combination": { "a1": matrix_rows(a1), "a2": matrix_rows(a2), "weight": jnum(*weight) } })
        }
    }
}

fn order_json(name: &str, r: &OrderReport) -> Value {
    let mut v = json!({
        "test": name,
        "passed": r.passed(),
        "trials_run": r.trials_run,
        "worst_min_eigenvalue": jnum(r.worst_min_eigenvalue),
    });
    if let Some(c) = &r.counterexample {
        v["counterexample"] = counterexample_json(c);
    }
    v
}

fn picktest(spec: &str, test: OrderTest, n: usize, trials: usize, seed: u64, weights: Option<Vec<f64>>) -> CmdResult {
    let h = parse_function(spec)?;
    let h = |l: f64| h(l);
    if n == 0 {
        return Err(CliError::Input("n must be positive".into()));
    }
    let runs = |t: OrderTest| test == OrderTest::All || test == t;
    let mut results = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, r: OrderReport| {
        pass &= r.passed();
        results.push(order_json(name, &r));
    };
    if runs(OrderTest::Monotone) {
        record("monotone", matrix_monotone_test(h, n, trials, seed)?);
    }
    if runs(OrderTest::Concave) {
        record("concave", matrix_concavity_test(h, n, trials, seed)?);
    }
    if runs(OrderTest::Interp) {
        let lambda = match &weights {
            Some(w) => WeightVector::new(w.clone())?,
            None => WeightVector::new(random::distinct_weights(&mut random::rng(seed), n, 1e-2, 1e2, 1.05))?,
        };
        record("interp", exact_interp_randomized_test(h, &lambda, trials, seed)?);
    }
    if runs(OrderTest::Hansen) {
        record("hansen", hansen_test(h, n, trials, seed)?);
    }
    if runs(OrderTest::Quasiconcave) {
        let c = type_h_bound_check(h, |t| t.max(1.0), &log_space(1e-3, 1e3, 41));
        pass &= c.pass;
        let mut v = json!({ "test": "quasiconcave", "passed": c.pass, "worst_ratio": jnum(c.worst_ratio) });
        if let Some((l, m)) = c.witness {
            v["witness"] = json!({ "lambda": jnum(l), "mu": jnum(m) });
        }
        results.push(v);
    }
    let v = json!({ "function": spec, "n": n, "trials": trials, "seed": seed, "results": results, "pass": pass });
    Ok(Output::json(&v, pass))
}

fn norm(couple: &Path, x: &str, measure: &Path, method: MethodArg, p: Option<f64>, direct: bool) -> CmdResult {
    let (lambda, x) = load_pair(couple, x)?;
    let measure = MeasureFile::load(measure)?;
    let kind = match method {
        MethodArg::K => MethodKind::K,
        MethodArg::J => MethodKind::J,
    };
    let hs: Vec<f64> = match p {
        None => {
            let spec = MethodSpec::new(kind, measure.clone())?;
            lambda.values().iter().map(|&l| spec.h(l)).collect::<exact_interp::Result<_>>()?
        }
        Some(p) => lambda
            .values()
            .iter()
            .map(|&l| power_p_function(&measure, p, kind, l))
            .collect::<exact_interp::Result<_>>()?,
    };
    let norm_sq: f64 = hs.iter().zip(x.coords()).map(|(h, z)| h * z.norm_sqr()).sum();
    let mut v = json!({
        "method": if kind == MethodKind::K { "K" } else { "J" },
        "h": hs.iter().map(|&h| jnum(h)).collect::<Vec<_>>(),
        "norm_sq": jnum(norm_sq),
    });
    if let Some(p) = p {
        v["p"] = jnum(p);
    }
    if kind == MethodKind::K && p.is_none() {
        v["k_integral"] = jnum(k_method_norm(&measure, &lambda, &x)?);
    }
    if direct {
        if kind != MethodKind::J || p.is_some() {
            return Err(CliError::Input("--direct applies to the quadratic J-method only".into()));
        }
        let c = j_method_norm_direct(&measure, &lambda, &x)?;
        v["direct"] = json!({
            "value": jnum(c.direct),
            "closed_form": jnum(c.closed_form),
            "gap": jnum(c.gap),
            "minimizer_gap": jnum(c.minimizer_gap),
        });
    }
    Ok(Output::json(&v, true))
}

fn reiteration(h: &Path, h0: &Path, h1: &Path, couple: &Path, x: &str, tol: f64) -> CmdResult {
    let (lambda, x) = load_pair(couple, x)?;
    let rep = |p: &Path| MeasureFile::load(p).map(PickFunctionRep::new);
    let r = reiterate(&rep(h)?, &rep(h0)?, &rep(h1)?)?;
    let c = r.check(&lambda, &x)?;
    let pass = c.gap <= tol;
    let v = json!({ "derived": jnum(c.derived), "direct": jnum(c.direct), "gap": jnum(c.gap), "pass": pass });
    Ok(Output::json(&v, pass))
}

fn kjcheck(
    theta: Option<f64>,
    rho: Option<&Path>,
    nu: Option<&Path>,
    lo: f64,
    hi: f64,
    count: usize,
    tol: f64,
) -> CmdResult {
    let (rho, nu) = match (theta, rho, nu) {
        (Some(theta), _, _) => (ExtendedMeasure::geometric(theta)?, j_geometric(theta)?),
        (None, Some(r), Some(n)) => (MeasureFile::load(r)?, MeasureFile::load(n)?),
        _ => return Err(CliError::Input("give either --theta or both --rho and --nu".into())),
    };
    if !(lo > 0.0 && hi >= lo && hi.is_finite() && count >= 1) {
        return Err(CliError::Input(format!("bad grid [{lo}, {hi}] with {count} points")));
    }
    let worst = kj_bijection_check(&rho, &nu, &log_space(lo, hi, count))?;
    let pass = worst <= tol;
    Ok(Output::json(&json!({ "worst_gap": jnum(worst), "pass": pass }), pass))
}

fn complex(lambda: f64, theta: f64, degree: usize) -> CmdResult {
    let h = complex_method_norm(lambda, &ComplexMethodConfig::new(theta, degree)?)?;
    Ok(Output::ok(format!("h_N {}\nlambda^theta {}\n", num(h), num(lambda.powf(theta)))))
}

fn report(couple: &Path, x: &str, y: &str, seed: u64, trials: usize, out: Option<&Path>) -> CmdResult {
    let file = CoupleFile::load(couple)?;
    let (lambda, x0, y0) = (file.weight_vector()?, file.vector(x)?, file.vector(y)?);
    let grid = TimeGrid::default();
    let dom = check_domination(&x0, &y0, &lambda, &grid)?;
    let mut v = json!({
        "n": lambda.len(),
        "weights": lambda.values(),
        "x": x,
        "y": y,
        "seed": seed,
        "domination": {
            "max_ratio": jnum(dom.max_ratio),
            "min_ratio": jnum(dom.min_ratio),
            "argmax_t": jnum(dom.argmax_t),
            "margin": jnum(dom.margin()),
        },
    });
    let cfg = ConstructionConfig { seed, verify_trials: trials, ..ConstructionConfig::default() };
    let cert = match construct_calderon_map(&x0, &y0, &lambda, &cfg) {
        Ok(c) => c,
        Err(e) => {
            v["construction"] = json!({ "error": e.to_string() });
            let code = CliError::from(e).code();
            return Ok(Output { text: to_json(&v) + "\n", code });
        }
    };
    v["construction"] = certificate_summary(&cert);
    v["construction"]["t"] = json!(matrix_rows(cert.t.entries()));
    if let Some(path) = out {
        write_json(path, &CertFile::new(&cert, x, y, seed))?;
    }
    let opts = VerifyOptions { trials, seed, ..VerifyOptions::default() };
    let report = verify_certificate(&cert, &x0, &y0, &opts)?;
    v["verification"] = report_json(&report);
    Ok(Output::json(&v, report.pass))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.5, 1.0 / 3.0, 1e-20, 6.02e23, -2.5e-7, 0.0, 123.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(1e-20), "1e-20");
    }

    #[test]
    fn function_specs() {
        assert_eq!(parse_function("power:0.25").unwrap()(16.0), 2.0);
        assert_eq!(parse_function("square").unwrap()(3.0), 9.0);
        assert!(matches!(parse_function("cube"), Err(CliError::Input(_))));
        assert!(matches!(parse_function("power:x"), Err(CliError::Input(_))));
    }

    #[test]
    fn arguments_parse() {
        let cli = Cli::try_parse_from(["exact-interp", "kfun", "--couple", "c.json", "--x", "a", "--t", "1,2.5"]).unwrap();
        let Command::Kfun { t, .. } = cli.command else { panic!() };
        assert_eq!(t, vec![1.0, 2.5]);
        assert!(Cli::try_parse_from(["exact-interp", "kfun", "--couple", "c.json", "--x", "a"]).is_err());
        assert!(Cli::try_parse_from(["exact-interp", "frobnicate"]).is_err());
    }
}
