//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the test
//! harness so the lines always print; exits nonzero if any criterion fails.
//!
//! The Monte Carlo criterion uses a 4-standard-error tolerance at multiplicity
//! 10⁴. The Gaussian limits carry no convergence rate, so this tolerance is
//! an engineering choice rather than a derived bound.

use std::time::{Duration, Instant};

use freeze_rmt::airy::{AiryEvaluator, AI_0};
use freeze_rmt::dualbasis::{build_dual_basis, eigenvector_matrix};
use freeze_rmt::ensemblesim::{compare_with_limit, sample, SamplerConfig};
use freeze_rmt::freezecov::{covariance_dual, covariance_de_hermite, freezing_covariance, Ensemble, EnsembleSpec};
use freeze_rmt::orthopoly::{eval_orthonormal, zeros_and_weights, PolynomialFamily};
use freeze_rmt::quadrature::integrate_with_breaks;
use freeze_rmt::softedge::{
    laguerre_edge_variance_observed, plancherel_rotach_check, profile_sup_error, residuals_bounded, variance_integral,
    variance_integral_de, variance_integral_laguerre, EdgeEnsemble,
};
use nalgebra::DMatrix;

const SPECTRUM_TOL: f64 = 1e-8;
const INVERSE_TOL: f64 = 1e-8;
const DE_DUAL_TOL: f64 = 1e-8;
const EDGE_CONSTANT_TOL: f64 = 1e-3;
const RATE_RANGE: (f64, f64) = (-0.45, -0.2);
const PR_BOUND: f64 = 1.0;
const AI0_TOL: f64 = 1e-9;
const A1_TOL: f64 = 1e-3;
const ODE_TOL: f64 = 1e-8;
const AIRY_NORM_TOL: f64 = 1e-8;
const MC_Z: f64 = 4.0;
const MC_BETA: f64 = 1e4;
const MC_SAMPLES: usize = 100_000;
const DUAL_TOL: f64 = 1e-9;
const DECAY_BOUND: f64 = 1.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "{} criterion {id:>2} {name}: {} [{:.2}s / {}s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn spec(e: Ensemble, n: usize) -> EnsembleSpec {
    EnsembleSpec::new(e, n).unwrap()
}

fn spectrum_ensembles() -> Vec<Ensemble> {
    vec![
        Ensemble::Hermite,
        Ensemble::Laguerre { nu: 1.0 },
        Ensemble::Laguerre { nu: 2.5 },
        Ensemble::JacobiTrig { a: 1.0, b: 1.0 },
        Ensemble::JacobiTrig { a: 0.5, b: 2.0 },
    ]
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for e in spectrum_ensembles() {
        for n in [2, 5, 10, 25, 50] {
            let s = spec(e, n);
            let fc = freezing_covariance(&s).unwrap();
            let mut dense: Vec<f64> = fc.s_matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            let mut analytic = s.analytic_eigenvalues();
            analytic.sort_by(f64::total_cmp);
            for (d, a) in dense.iter().zip(&analytic) {
                worst = worst.max((d - a).abs() / a.abs());
            }
        }
    }
    Outcome { pass: worst <= SPECTRUM_TOL, detail: format!("max relative eigenvalue error {worst:.2e} (tol {SPECTRUM_TOL:.0e})") }
}

fn criterion_2() -> Outcome {
    let ensembles = [
        Ensemble::Hermite,
        Ensemble::Laguerre { nu: 1.0 },
        Ensemble::JacobiTrig { a: 1.0, b: 1.0 },
        Ensemble::JacobiPlain { a: 1.0, b: 1.0 },
        Ensemble::Laguerre { nu: 2.5 },
        Ensemble::JacobiTrig { a: 0.5, b: 2.0 },
        Ensemble::JacobiPlain { a: 0.5, b: 2.0 },
    ];
    let mut worst = 0.0_f64;
    for e in ensembles {
        for n in 1..=50 {
            let fc = freezing_covariance(&spec(e, n)).unwrap();
            let dev = (&fc.sigma_matrix * &fc.s_matrix - DMatrix::identity(n, n)).amax();
            worst = worst.max(dev);
        }
    }
    Outcome { pass: worst <= INVERSE_TOL, detail: format!("max |ΣS − I| {worst:.2e} over N = 1..50 (tol {INVERSE_TOL:.0e})") }
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0_f64;
    for n in 1..=12 {
        let de = covariance_de_hermite(n).unwrap();
        let zs = zeros_and_weights(PolynomialFamily::Hermite, n).unwrap();
        let dual = build_dual_basis(&zs).unwrap();
        let sigma = covariance_dual(&spec(Ensemble::Hermite, n), &dual).unwrap();
        let scale = sigma.amax();
        for (a, b) in de.iter().zip(sigma.iter()) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Outcome { pass: worst <= DE_DUAL_TOL, detail: format!("max relative entry difference {worst:.2e} for N <= 12 (tol {DE_DUAL_TOL:.0e})") }
}

fn criterion_4(airy: &AiryEvaluator) -> Outcome {
    let expected = [0.834, 0.582, 0.472, 0.407];
    let mut worst = 0.0_f64;
    let mut values = Vec::new();
    for (r, e) in (1..=4).zip(expected) {
        let v = variance_integral(airy, r).unwrap().value;
        values.push(v);
        worst = worst.max((v - e).abs());
    }
    let lag = variance_integral_laguerre(airy).unwrap();
    worst = worst.max((lag - 0.417).abs());
    let de = variance_integral_de(airy).unwrap();
    let de_gap = (de.quartic - 0.834).abs();
    worst = worst.max(de_gap);
    println!(
        "INFO sigma²_max,1..4 = {:.6} {:.6} {:.6} {:.6}; Laguerre σ²/2 = {lag:.6}; quartic = {:.12}, residual {:.2e}",
        values[0], values[1], values[2], values[3], de.quartic, de.residual
    );
    println!(
        "INFO observed Laguerre limit of N^(1/3)σ_NN is 2^(-1/3)σ²_max,1 = {:.6}; σ²_max,1/2 = 0.417 is checked as a defined constant",
        laguerre_edge_variance_observed(airy).unwrap()
    );
    Outcome { pass: worst <= EDGE_CONSTANT_TOL, detail: format!("max deviation {worst:.2e} (tol {EDGE_CONSTANT_TOL:.0e}), quartic residual {:.2e}", de.residual) }
}

fn rate(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_5(airy: &AiryEvaluator) -> Outcome {
    let ns = [50, 100, 200, 400];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, ens, y_max) in [("Hermite", EdgeEnsemble::Hermite, 4.0), ("Laguerre", EdgeEnsemble::Laguerre { alpha: 0.0 }, 3.0)] {
        let errs: Vec<f64> = ns.iter().map(|&n| profile_sup_error(airy, ens, n, 1, y_max).unwrap()).collect();
        let p = rate(&ns, &errs);
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        pass &= decreasing && p >= RATE_RANGE.0 && p <= RATE_RANGE.1;
        parts.push(format!("{label} sup errors {:.3}→{:.3}, rate {p:.3}", errs[0], errs[3]));
    }
    Outcome { pass, detail: format!("{} (range [{}, {}])", parts.join("; "), RATE_RANGE.0, RATE_RANGE.1) }
}

fn criterion_6(airy: &AiryEvaluator) -> Outcome {
    let ns = [50, 100, 200, 400];
    let mut pass = true;
    let mut worst = 0.0_f64;
    let cases = [(EdgeEnsemble::Hermite, 1), (EdgeEnsemble::Hermite, 2), (EdgeEnsemble::Hermite, 3), (EdgeEnsemble::Laguerre { alpha: 0.0 }, 1)];
    for (ens, r) in cases {
        let rows = plancherel_rotach_check(airy, ens, r, &ns).unwrap();
        worst = rows.iter().fold(worst, |m, row| m.max(row.scaled_residual));
        pass &= residuals_bounded(&rows, PR_BOUND);
    }
    Outcome { pass, detail: format!("max N·residual {worst:.3} (bound {PR_BOUND}, increments shrinking)") }
}

fn criterion_7(airy: &AiryEvaluator) -> Outcome {
    let ai0 = airy.ai(0.0);
    let a1 = airy.airy_zero(1).unwrap();
    let mut ode = 0.0_f64;
    let steps = 3000;
    for k in 0..=steps {
        let x = -20.0 + 30.0 * k as f64 / steps as f64;
        let v = airy.eval(x);
        let scale = v.ai.abs().max(v.ai_prime.abs()).max(1e-300);
        ode = ode.max((v.ai_second - x * v.ai).abs() / scale);
    }
    let d = airy.ai_prime(a1);
    let breaks: Vec<f64> = (1..14).map(|k| k as f64).collect();
    let x_max = 12.0 - a1;
    let q = integrate_with_breaks(|x| airy.ai(x + a1).powi(2), 0.0, x_max, &breaks, 1e-15, 1e-15, 4000).unwrap();
    let norm_err = (q.value - d * d).abs();
    let pass = (ai0 - 0.3550280539).abs() <= AI0_TOL
        && (ai0 - AI_0).abs() <= 1e-15
        && (a1 + 2.3381).abs() <= A1_TOL
        && ode <= ODE_TOL
        && norm_err <= AIRY_NORM_TOL;
    Outcome { pass, detail: format!("Ai(0) = {ai0:.12}, a_1 = {a1:.12}, ODE residual {ode:.1e}, |∫Ai² − Ai'(a_1)²| {norm_err:.1e}") }
}

fn criterion_8() -> Outcome {
    let config = SamplerConfig { samples: MC_SAMPLES, burn_in: 10_000, thinning: 10, seed: 20_240_601 };
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, e) in [("Hermite", Ensemble::Hermite), ("Laguerre ν=2", Ensemble::Laguerre { nu: 2.0 })] {
        let batch = sample(&spec(e, 2), MC_BETA, 1.0, config).unwrap();
        let cmp = compare_with_limit(&batch).unwrap();
        pass &= cmp.max_abs_z < MC_Z && batch.tuning_warning.is_none();
        parts.push(format!("{label} max |z| {:.2} (acc {:.2})", cmp.max_abs_z, batch.acceptance_rate));
    }
    Outcome { pass, detail: format!("{} (tol {MC_Z} SE)", parts.join("; ")) }
}

fn dual_families() -> Vec<PolynomialFamily> {
    vec![
        PolynomialFamily::Hermite,
        PolynomialFamily::Laguerre { alpha: 0.0 },
        PolynomialFamily::Laguerre { alpha: 1.5 },
        PolynomialFamily::Jacobi { alpha: 1.0, beta: 0.0 },
        PolynomialFamily::Jacobi { alpha: 1.5, beta: 1.0 },
        PolynomialFamily::Jacobi { alpha: 0.0, beta: -0.5 },
    ]
}

fn criterion_9() -> Outcome {
    let (mut orth, mut wstar, mut conn, mut tmat) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for fam in dual_families() {
        for n in 1..=50 {
            let zs = zeros_and_weights(fam, n).unwrap();
            let dual = build_dual_basis(&zs).unwrap();
            // Σ_i w_i* Q̃_k(z_i) Q̃_l(z_i) = δ_kl
            let g = DMatrix::from_fn(n, n, |k, l| (0..n).map(|i| zs.dual_christoffel[i] * dual.values[(k, i)] * dual.values[(l, i)]).sum::<f64>());
            orth = orth.max((g - DMatrix::identity(n, n)).amax());
            for (w, c) in zs.dual_christoffel.iter().zip(zs.dual_christoffel_closed_form()) {
                wstar = wstar.max((w - c).abs() / c);
            }
            let kappa = fam.kappa(n);
            for i in 0..n {
                let z = zs.zeros[i];
                let p = eval_orthonormal(fam, n - 1, z).unwrap();
                let sum_sq: f64 = p[..n].iter().map(|v| v * v).sum();
                let sign = match fam {
                    PolynomialFamily::Laguerre { .. } => if i % 2 == 0 { 1.0 } else { -1.0 },
                    _ => if (n - 1 - i) % 2 == 0 { 1.0 } else { -1.0 },
                };
                let by_eigen = sign * (fam.pi(z) / kappa * sum_sq).sqrt();
                let direct = p[n - 1];
                conn = conn.max((direct - by_eigen).abs() / by_eigen.abs());
            }
            let t = eigenvector_matrix(&dual, &zs).unwrap();
            tmat = tmat.max((&t * t.transpose() - DMatrix::identity(n, n)).amax());
            tmat = tmat.max((t.transpose() * &t - DMatrix::identity(n, n)).amax());
        }
    }
    let worst = orth.max(wstar).max(conn).max(tmat);
    Outcome {
        pass: worst <= DUAL_TOL,
        detail: format!("orthogonality {orth:.1e}, w* closed form {wstar:.1e}, c_i routes {conn:.1e}, T orthogonality {tmat:.1e} (tol {DUAL_TOL:.0e})"),
    }
}

fn criterion_10(airy: &AiryEvaluator) -> Outcome {
    let values: Vec<f64> = (1..=50).map(|r| variance_integral(airy, r).unwrap().value).collect();
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let scaled: Vec<f64> = (5..=50).map(|r| values[r - 1] * (r as f64).cbrt() / (r as f64).ln()).collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: decreasing && max <= DECAY_BOUND,
        detail: format!(
            "σ²_max,r strictly decreasing on r = 1..50: {decreasing}; r^(1/3)σ²/log r in [{min:.4}, {max:.4}] (bound {DECAY_BOUND}), σ²_max,50 = {:.4}",
            values[49]
        ),
    }
}

fn main() {
    let airy = AiryEvaluator::default();
    let secs = Duration::from_secs;
    let results = [
        report(1, "spectrum reproduction", secs(10), criterion_1),
        report(2, "inverse consistency", secs(10), criterion_2),
        report(3, "DE vs dual covariance", secs(5), criterion_3),
        report(4, "soft-edge constants", secs(30), || criterion_4(&airy)),
        report(5, "profile convergence", secs(60), || criterion_5(&airy)),
        report(6, "Plancherel–Rotach", secs(30), || criterion_6(&airy)),
        report(7, "Airy module", secs(5), || criterion_7(&airy)),
        report(8, "Monte Carlo limit check", secs(300), criterion_8),
        report(9, "dual-basis identities", secs(10), criterion_9),
        report(10, "variance decay", secs(60), || criterion_10(&airy)),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: {}/{} criteria pass", results.len(), results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
