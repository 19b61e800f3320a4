//! One function per subcommand. Each writes its data file and returns the
//! one-line summary for stdout.

use anyhow::Result;
use freeze_rmt::airy::{AiryBranch, AiryEvaluator};
use freeze_rmt::ensemblesim::{compare_with_limit, derive_seed, sample, SampleBatch, SamplerConfig, WltComparison};
use freeze_rmt::freezecov::{covariance_de_hermite, freezing_covariance, spectrum_check, Ensemble};
use freeze_rmt::orthopoly::zeros_and_weights;
use freeze_rmt::softedge::{
    edge_profile, laguerre_edge_variance_observed, sigma_trend, variance_integral, variance_integral_de, variance_integral_laguerre,
    EdgeEnsemble, TrendRow,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{EnsembleKind, Format, Grid, RunConfig};
use crate::output::{matrix_cells, matrix_rows, write_csv, write_json, Cell};
use crate::{CheckFailed, UsageError};

/// Published three-digit values of `σ²_max,r`, `r = 1..4`.
pub const PUBLISHED_SIGMA: [f64; 4] = [0.834, 0.582, 0.472, 0.407];
pub const PUBLISHED_LAGUERRE: f64 = 0.417;

fn finish(cfg: &RunConfig, summary: String, failures: &[String]) -> Result<String> {
    if cfg.check && !failures.is_empty() {
        return Err(CheckFailed(format!("{summary}; failed: {}", failures.join(", "))).into());
    }
    Ok(summary)
}

pub fn zeros(cfg: &RunConfig) -> Result<String> {
    let n = cfg.single_n(5)?;
    let spec = cfg.spec(n)?;
    let zs = zeros_and_weights(spec.family(), n)?;
    let path = cfg.out_path("zeros");
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = (0..n)
                .map(|i| vec![(i + 1).into(), zs.zeros[i].into(), zs.christoffel[i].into(), zs.dual_christoffel[i].into()])
                .collect();
            write_csv(&path, &["i", "z", "w", "w_star"], &rows)?;
        }
        Format::Json => write_json(&path, "zeros", json!({ "spec": spec, "zero_set": zs }))?,
    }
    let worst = (0..n).map(|i| zs.polynomial_residual(i)).fold(0.0, f64::max);
    let failures = if worst > cfg.tol_spectrum { vec![format!("polynomial residual {worst:.1e}")] } else { vec![] };
    finish(cfg, format!("zeros: N={n}, sum z = {:.12}, wrote {}", zs.zeros.iter().sum::<f64>(), path.display()), &failures)
}

fn dense_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn covariance(cfg: &RunConfig) -> Result<String> {
    let n = cfg.single_n(5)?;
    let spec = cfg.spec(n)?;
    let fc = freezing_covariance(&spec)?;
    let report = spectrum_check(&fc);
    let spectral = match &fc.conjugation {
        Some(d) => DMatrix::from_fn(n, n, |i, j| d[i] * fc.s_matrix[(i, j)] * d[j]),
        None => fc.s_matrix.clone(),
    };
    let dense = dense_spectrum(&spectral);
    let delta = match spec.ensemble {
        Ensemble::Hermite => Some(covariance_de_hermite(n)? - &fc.sigma_matrix),
        _ => None,
    };
    let path = cfg.out_path("covariance");
    match cfg.format {
        Format::Csv => {
            let mut rows = matrix_cells("s", &fc.s_matrix);
            rows.extend(matrix_cells("sigma", &fc.sigma_matrix));
            rows.extend(matrix_cells("t", &fc.t_matrix));
            for (k, (a, d)) in fc.eigenvalues.iter().zip(&dense).enumerate() {
                rows.push(vec!["lambda".into(), (k + 1).into(), (k + 1).into(), (*a).into()]);
                rows.push(vec!["dense_lambda".into(), (k + 1).into(), (k + 1).into(), (*d).into()]);
                rows.push(vec!["lambda_residual".into(), (k + 1).into(), (k + 1).into(), (d - a).into()]);
            }
            if let Some(delta) = &delta {
                rows.extend(matrix_cells("de_delta", delta));
            }
            write_csv(&path, &["block", "i", "j", "value"], &rows)?;
        }
        Format::Json => write_json(
            &path,
            "covariance",
            json!({
                "spec": spec,
                "zeros": fc.zeros,
                "s": matrix_rows(&fc.s_matrix),
                "sigma": matrix_rows(&fc.sigma_matrix),
                "t": matrix_rows(&fc.t_matrix),
                "lambda": fc.eigenvalues,
                "dense_lambda": dense,
                "report": report,
                "de_delta": delta.as_ref().map(matrix_rows),
            }),
        )?,
    }
    let summary = format!(
        "covariance: N={n}, |ΣS−I| = {:.2e}, eigenvalue error {:.2e}, wrote {}",
        report.inverse_error,
        report.max_eigenvalue_error,
        path.display()
    );
    if !(report.inverse_error <= cfg.tol_inverse) {
        return Err(CheckFailed(format!("{summary}; |ΣS−I| exceeds {:.1e}", cfg.tol_inverse)).into());
    }
    let failures = if report.max_eigenvalue_error > cfg.tol_spectrum { vec!["spectrum".to_string()] } else { vec![] };
    finish(cfg, summary, &failures)
}

fn trend(airy: &AiryEvaluator, ensemble: Ensemble, r: usize, n_list: &[usize]) -> Result<Vec<TrendRow>> {
    let rows: Vec<Vec<TrendRow>> = n_list.par_iter().map(|&n| sigma_trend(airy, ensemble, r, &[n])).collect::<freeze_rmt::Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn softedge(cfg: &RunConfig) -> Result<String> {
    let airy = AiryEvaluator::default();
    let r_max = cfg.r.unwrap_or(4).max(1);
    let n_list = cfg.n_list_or(&[50, 100, 200, 400]);
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut failures = Vec::new();
    let blank = || Cell::Text(String::new());
    for r in 1..=r_max {
        let v = variance_integral(&airy, r)?;
        rows.push(vec!["sigma2_max".into(), r.into(), blank(), v.value.into(), v.error.into()]);
        if let Some(p) = PUBLISHED_SIGMA.get(r - 1) {
            if (v.value - p).abs() > cfg.tol_edge {
                failures.push(format!("sigma2_max,{r}"));
            }
        }
    }
    let de = variance_integral_de(&airy)?;
    rows.push(vec!["de_quartic".into(), 1.into(), blank(), de.quartic.into(), blank()]);
    rows.push(vec!["de_residual".into(), 1.into(), blank(), de.residual.into(), blank()]);
    let lag = variance_integral_laguerre(&airy)?;
    rows.push(vec!["laguerre_half".into(), 1.into(), blank(), lag.into(), blank()]);
    rows.push(vec!["laguerre_observed".into(), 1.into(), blank(), laguerre_edge_variance_observed(&airy)?.into(), blank()]);
    if (lag - PUBLISHED_LAGUERRE).abs() > cfg.tol_edge {
        failures.push("laguerre_half".into());
    }
    if (de.quartic - PUBLISHED_SIGMA[0]).abs() > cfg.tol_edge {
        failures.push("de_quartic".into());
    }
    for r in 1..=r_max.min(*n_list.iter().min().unwrap_or(&1)) {
        for row in trend(&airy, Ensemble::Hermite, r, &n_list)? {
            rows.push(vec!["trend_hermite".into(), r.into(), row.n.into(), row.scaled.into(), row.gap.into()]);
        }
    }
    for row in trend(&airy, Ensemble::Laguerre { nu: cfg.nu }, 1, &n_list)? {
        rows.push(vec!["trend_laguerre".into(), 1.into(), row.n.into(), row.scaled.into(), row.gap.into()]);
    }
    let path = cfg.out_path("softedge");
    match cfg.format {
        Format::Csv => write_csv(&path, &["quantity", "r", "n", "value", "error"], &rows)?,
        Format::Json => {
            let records: Vec<_> = rows
                .iter()
                .map(|row| {
                    let num = |c: &Cell| match c {
                        Cell::Float(v) => json!(v),
                        Cell::Int(v) => json!(v),
                        Cell::Text(_) => serde_json::Value::Null,
                    };
                    let quantity = match &row[0] {
                        Cell::Text(s) => s.clone(),
                        _ => String::new(),
                    };
                    json!({ "quantity": quantity, "r": num(&row[1]), "n": num(&row[2]), "value": num(&row[3]), "error": num(&row[4]) })
                })
                .collect();
            write_json(&path, "softedge", json!({ "rows": records }))?
        }
    }
    let summary = format!("softedge: σ²_max,1 = {:.6}, quartic residual {:.1e}, {} rows, wrote {}", de.quartic - de.residual, de.residual, rows.len(), path.display());
    finish(cfg, summary, &failures)
}

fn edge_ensemble(cfg: &RunConfig) -> Result<EdgeEnsemble> {
    match cfg.ensemble {
        EnsembleKind::Hermite => Ok(EdgeEnsemble::Hermite),
        EnsembleKind::Laguerre => Ok(EdgeEnsemble::Laguerre { alpha: cfg.nu - 1.0 }),
        _ => Err(UsageError("edge profiles are defined for the hermite and laguerre ensembles".into()).into()),
    }
}

pub fn profile(cfg: &RunConfig) -> Result<String> {
    let airy = AiryEvaluator::default();
    let ens = edge_ensemble(cfg)?;
    let n = cfg.single_n(100)?;
    let r = cfg.r.unwrap_or(1);
    let grid = cfg.grid.unwrap_or(Grid { min: 0.0, max: 4.0, step: 0.05 }).points();
    let p = edge_profile(&airy, ens, n, r, &grid)?;
    let path = cfg.out_path("profile");
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = (0..grid.len())
                .map(|k| vec![grid[k].into(), p.f_n_values[k].into(), p.f_limit_values[k].into(), (p.f_n_values[k] - p.f_limit_values[k]).abs().into()])
                .collect();
            write_csv(&path, &["y", "f_n", "f", "abs_diff"], &rows)?;
        }
        Format::Json => write_json(&path, "profile", json!({ "profile": p, "sup_error": p.sup_error() }))?,
    }
    Ok(format!("profile: N={n}, r={r}, sup |f_N − f| = {:.4} on the grid, wrote {}", p.sup_error(), path.display()))
}

fn chain_seed(seed: u64, chain: usize) -> u64 {
    if chain == 0 {
        seed
    } else {
        derive_seed(seed, chain as u64)
    }
}

pub fn sample_cmd(cfg: &RunConfig) -> Result<String> {
    let n = cfg.single_n(2)?;
    let spec = cfg.spec(n)?;
    if cfg.chains == 0 {
        return Err(UsageError("chains must be at least 1".into()).into());
    }
    let batches: Vec<SampleBatch> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let config = SamplerConfig { samples: cfg.samples, burn_in: cfg.burn_in, thinning: cfg.thinning, seed: chain_seed(cfg.seed, c) };
            sample(&spec, cfg.beta, cfg.t, config)
        })
        .collect::<freeze_rmt::Result<_>>()?;
    let comparisons: Vec<Option<WltComparison>> = batches.iter().map(|b| compare_with_limit(b).ok()).collect();

    let path = cfg.out_path("sample");
    let summary_path = path.with_extension("summary.json");
    let chains: Vec<_> = batches
        .iter()
        .zip(&comparisons)
        .map(|(b, c)| {
            json!({
                "config": b.config,
                "acceptance_rate": b.acceptance_rate,
                "step_size": b.step_size,
                "tuning_warning": b.tuning_warning,
                "comparison": c,
            })
        })
        .collect();
    let meta = json!({ "spec": spec, "beta_like": cfg.beta, "t": cfg.t, "chains": chains });
    match cfg.format {
        Format::Csv => {
            let mut header = vec!["chain".to_string(), "draw".to_string()];
            header.extend((1..=n).map(|i| format!("x{i}")));
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut rows = Vec::with_capacity(cfg.samples * cfg.chains);
            for (c, b) in batches.iter().enumerate() {
                for (m, draw) in b.rows().enumerate() {
                    let mut row: Vec<Cell> = vec![c.into(), (m + 1).into()];
                    row.extend(draw.iter().map(|v| Cell::Float(*v)));
                    rows.push(row);
                }
            }
            write_csv(&path, &header_refs, &rows)?;
        }
        Format::Json => {
            let draws: Vec<Vec<Vec<f64>>> = batches.iter().map(|b| b.rows().map(<[f64]>::to_vec).collect()).collect();
            write_json(&path, "sample", json!({ "meta": meta, "draws": draws }))?;
        }
    }
    write_json(&summary_path, "sample", meta)?;

    let max_z = comparisons.iter().flatten().map(|c| c.max_abs_z).fold(0.0, f64::max);
    let acc = batches.iter().map(|b| b.acceptance_rate).sum::<f64>() / batches.len() as f64;
    let mut failures = Vec::new();
    if comparisons.iter().any(Option::is_none) {
        failures.push("too few draws for moments".to_string());
    }
    if max_z >= cfg.tol_z {
        failures.push(format!("max |z| {max_z:.2}"));
    }
    if batches.iter().any(|b| b.tuning_warning.is_some()) {
        failures.push("tuning warning".into());
    }
    let summary = format!(
        "sample: N={n}, beta={}, {} chain(s) × {} draws, acceptance {acc:.3}, max |z| {max_z:.2}, wrote {} and {}",
        cfg.beta,
        cfg.chains,
        cfg.samples,
        path.display(),
        summary_path.display()
    );
    finish(cfg, summary, &failures)
}

fn branch_name(b: AiryBranch) -> &'static str {
    match b {
        AiryBranch::Series => "series",
        AiryBranch::Anchored => "anchored",
        AiryBranch::Asymptotic => "asymptotic",
    }
}

pub fn airy_cmd(cfg: &RunConfig) -> Result<String> {
    let airy = AiryEvaluator::default();
    let path = cfg.out_path("airy");
    if let Some(count) = cfg.zeros {
        let zeros = airy.airy_zeros(count)?;
        let derivs: Vec<f64> = zeros.iter().map(|a| airy.ai_prime(*a)).collect();
        match cfg.format {
            Format::Csv => {
                let rows: Vec<Vec<Cell>> = (0..count).map(|k| vec![(k + 1).into(), zeros[k].into(), derivs[k].into()]).collect();
                write_csv(&path, &["r", "a_r", "ai_prime"], &rows)?;
            }
            Format::Json => write_json(&path, "airy", json!({ "zeros": zeros, "ai_prime": derivs }))?,
        }
        return Ok(format!("airy: {count} zeros, a_1 = {:.12}, wrote {}", zeros.first().copied().unwrap_or(f64::NAN), path.display()));
    }
    let grid = cfg.grid.unwrap_or(Grid { min: -20.0, max: 10.0, step: 0.5 }).points();
    let values: Vec<_> = grid.iter().map(|&x| airy.eval(x)).collect();
    let residual = grid
        .iter()
        .zip(&values)
        .map(|(x, v)| (v.ai_second - x * v.ai).abs() / v.ai.abs().max(v.ai_prime.abs()).max(1e-300))
        .fold(0.0, f64::max);
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<Cell>> = grid
                .iter()
                .zip(&values)
                .map(|(&x, v)| vec![x.into(), v.ai.into(), v.ai_prime.into(), v.ai_second.into(), branch_name(airy.branch(x)).into()])
                .collect();
            write_csv(&path, &["x", "ai", "ai_prime", "ai_second", "branch"], &rows)?;
        }
        Format::Json => {
            let ai: Vec<f64> = values.iter().map(|v| v.ai).collect();
            let aip: Vec<f64> = values.iter().map(|v| v.ai_prime).collect();
            let ais: Vec<f64> = values.iter().map(|v| v.ai_second).collect();
            write_json(&path, "airy", json!({ "x": grid, "ai": ai, "ai_prime": aip, "ai_second": ais }))?
        }
    }
    let failures = if residual > 1e-8 { vec![format!("ODE residual {residual:.1e}")] } else { vec![] };
    finish(cfg, format!("airy: {} points, ODE residual {residual:.1e}, wrote {}", grid.len(), path.display()), &failures)
}
