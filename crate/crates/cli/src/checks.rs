//! The `check-all` suite: every verification with its tolerance.

use anyhow::Result;
use freeze_rmt::airy::AiryEvaluator;
use freeze_rmt::dualbasis::{build_dual_basis, eigenvector_matrix};
use freeze_rmt::ensemblesim::{compare_with_limit, sample, SamplerConfig};
use freeze_rmt::freezecov::{covariance_dual, covariance_de_hermite, freezing_covariance, spectrum_check, Ensemble, EnsembleSpec};
use freeze_rmt::orthopoly::{zeros_and_weights, PolynomialFamily};
use freeze_rmt::softedge::{plancherel_rotach_check, profile_sup_error, residuals_bounded, variance_integral, variance_integral_de, variance_integral_laguerre, EdgeEnsemble};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::commands::{PUBLISHED_LAGUERRE, PUBLISHED_SIGMA};
use crate::config::{Format, RunConfig};
use crate::output::{write_csv, write_json, Cell};
use crate::CheckFailed;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn at_most(name: &str, value: f64, tolerance: f64) -> CheckRow {
    CheckRow { name: name.into(), value, tolerance, pass: value <= tolerance }
}

fn ensembles() -> Vec<Ensemble> {
    vec![
        Ensemble::Hermite,
        Ensemble::Laguerre { nu: 1.0 },
        Ensemble::Laguerre { nu: 2.5 },
        Ensemble::JacobiTrig { a: 1.0, b: 1.0 },
        Ensemble::JacobiTrig { a: 0.5, b: 2.0 },
        Ensemble::JacobiPlain { a: 1.0, b: 1.0 },
    ]
}

fn covariance_checks(cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let (mut spec_err, mut inv_err) = (0.0_f64, 0.0_f64);
    for e in ensembles() {
        for n in 1..=50 {
            let fc = freezing_covariance(&EnsembleSpec::new(e, n)?)?;
            let rep = spectrum_check(&fc);
            spec_err = spec_err.max(rep.max_eigenvalue_error);
            inv_err = inv_err.max(rep.inverse_error);
        }
    }
    let mut de_err = 0.0_f64;
    for n in 1..=12 {
        let zs = zeros_and_weights(PolynomialFamily::Hermite, n)?;
        let sigma = covariance_dual(&EnsembleSpec::new(Ensemble::Hermite, n)?, &build_dual_basis(&zs)?)?;
        de_err = de_err.max((covariance_de_hermite(n)? - &sigma).amax() / sigma.amax());
    }
    Ok(vec![
        at_most("spectrum_relative_error", spec_err, cfg.tol_spectrum),
        at_most("inverse_residual", inv_err, cfg.tol_inverse),
        at_most("de_vs_dual_hermite", de_err, 1e-8),
    ])
}

fn dual_checks() -> Result<Vec<CheckRow>> {
    let families = [
        PolynomialFamily::Hermite,
        PolynomialFamily::Laguerre { alpha: 0.0 },
        PolynomialFamily::Laguerre { alpha: 1.5 },
        PolynomialFamily::Jacobi { alpha: 1.0, beta: 0.0 },
        PolynomialFamily::Jacobi { alpha: 1.5, beta: 1.0 },
    ];
    let (mut t_err, mut w_err) = (0.0_f64, 0.0_f64);
    for fam in families {
        for n in 1..=50 {
            let zs = zeros_and_weights(fam, n)?;
            let t = eigenvector_matrix(&build_dual_basis(&zs)?, &zs)?;
            t_err = t_err.max((&t * t.transpose() - DMatrix::identity(n, n)).amax());
            for (w, c) in zs.dual_christoffel.iter().zip(zs.dual_christoffel_closed_form()) {
                w_err = w_err.max((w - c).abs() / c);
            }
        }
    }
    Ok(vec![at_most("t_orthogonality", t_err, 1e-9), at_most("dual_christoffel_closed_form", w_err, 1e-9)])
}

fn edge_checks(cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let airy = AiryEvaluator::default();
    let mut rows = Vec::new();
    for (r, p) in (1..=4).zip(PUBLISHED_SIGMA) {
        rows.push(at_most(&format!("sigma2_max_{r}"), (variance_integral(&airy, r)?.value - p).abs(), cfg.tol_edge));
    }
    rows.push(at_most("laguerre_half", (variance_integral_laguerre(&airy)? - PUBLISHED_LAGUERRE).abs(), cfg.tol_edge));
    rows.push(at_most("de_quartic", (variance_integral_de(&airy)?.quartic - PUBLISHED_SIGMA[0]).abs(), cfg.tol_edge));

    let ns = [50, 100, 200, 400];
    for (label, ens, y_max) in [("hermite", EdgeEnsemble::Hermite, 4.0), ("laguerre", EdgeEnsemble::Laguerre { alpha: 0.0 }, 3.0)] {
        let errs: Vec<f64> = ns.iter().map(|&n| profile_sup_error(&airy, ens, n, 1, y_max)).collect::<freeze_rmt::Result<_>>()?;
        let rate = (errs[3] / errs[0]).ln() / (ns[3] as f64 / ns[0] as f64).ln();
        rows.push(CheckRow { name: format!("profile_rate_{label}"), value: rate, tolerance: -0.2, pass: (-0.45..=-0.2).contains(&rate) });
    }
    for (label, ens, r) in [("hermite_1", EdgeEnsemble::Hermite, 1), ("hermite_2", EdgeEnsemble::Hermite, 2), ("hermite_3", EdgeEnsemble::Hermite, 3), ("laguerre_1", EdgeEnsemble::Laguerre { alpha: 0.0 }, 1)] {
        let pr = plancherel_rotach_check(&airy, ens, r, &ns)?;
        let worst = pr.iter().map(|p| p.scaled_residual).fold(0.0, f64::max);
        rows.push(CheckRow { name: format!("plancherel_rotach_{label}"), value: worst, tolerance: 1.0, pass: residuals_bounded(&pr, 1.0) });
    }
    rows.push(at_most("airy_ai0", (airy.ai(0.0) - 0.3550280539).abs(), 1e-9));
    rows.push(at_most("airy_a1", (airy.airy_zero(1)? + 2.3381).abs(), 1e-3));
    let sig: Vec<f64> = (1..=50).map(|r| variance_integral(&airy, r).map(|v| v.value)).collect::<freeze_rmt::Result<_>>()?;
    let decay = (5..=50).map(|r| sig[r - 1] * (r as f64).cbrt() / (r as f64).ln()).fold(0.0, f64::max);
    let decreasing = sig.windows(2).all(|w| w[1] < w[0]);
    rows.push(CheckRow { name: "variance_decay".into(), value: decay, tolerance: 1.0, pass: decreasing && decay <= 1.0 });
    Ok(rows)
}

fn monte_carlo_checks(cfg: &RunConfig) -> Result<Vec<CheckRow>> {
    let cases = [("hermite", Ensemble::Hermite), ("laguerre_nu2", Ensemble::Laguerre { nu: 2.0 })];
    cases
        .par_iter()
        .map(|(label, e)| {
            let config = SamplerConfig { samples: cfg.samples, burn_in: cfg.burn_in, thinning: cfg.thinning, seed: cfg.seed };
            let batch = sample(&EnsembleSpec::new(*e, 2)?, 1e4, 1.0, config)?;
            let cmp = compare_with_limit(&batch)?;
            Ok(CheckRow { name: format!("monte_carlo_{label}"), value: cmp.max_abs_z, tolerance: cfg.tol_z, pass: cmp.max_abs_z < cfg.tol_z })
        })
        .collect()
}

pub fn check_all(cfg: &RunConfig) -> Result<String> {
    let groups: [fn(&RunConfig) -> Result<Vec<CheckRow>>; 4] = [covariance_checks, |_| dual_checks(), edge_checks, monte_carlo_checks];
    let results: Vec<Vec<CheckRow>> = groups.par_iter().map(|g| g(cfg)).collect::<Result<_>>()?;
    let rows: Vec<CheckRow> = results.into_iter().flatten().collect();
    let path = cfg.out_path("check-all");
    match cfg.format {
        Format::Csv => {
            let cells: Vec<Vec<Cell>> = rows
                .iter()
                .map(|r| vec![r.name.clone().into(), r.value.into(), r.tolerance.into(), (if r.pass { "pass" } else { "fail" }).into()])
                .collect();
            write_csv(&path, &["check", "value", "tolerance", "status"], &cells)?;
        }
        Format::Json => write_json(&path, "check-all", json!({ "checks": rows }))?,
    }
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
    let summary = format!("check-all: {}/{} checks pass, wrote {}", rows.len() - failed.len(), rows.len(), path.display());
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(CheckFailed(format!("{summary}; failed: {}", failed.join(", "))).into())
    }
}
