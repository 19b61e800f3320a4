//! Soft-edge limits of the frozen Hermite and Laguerre ensembles.
//!
//! At the `r`-th largest zero the dual basis, read along `k ≈ N^{1/3} y`,
//! converges to an Airy profile:
//!
//! ```text
//! Hermite:   N^{1/6} Q_{⌊N^{1/3}y⌋,N}(z_{N-r+1,N})        → Ai(y + a_r) / Ai'(a_r)
//! Laguerre:  N^{1/6} √z_N Q_{⌊N^{1/3}y⌋,N}(z_N)          → 2^{1/3} Ai(2^{2/3} y + a_1) / Ai'(a_1)
//! ```
//!
//! and the scaled edge variances `N^{1/3} σ_{N-r+1,N-r+1}` converge to
//! integrals of the squared profile against `1/y`.

use serde::{Deserialize, Serialize};

use crate::airy::{ode_taylor, AiryEvaluator};
use crate::dualbasis::{build_dual_basis, eigenvector_matrix};
use crate::error::{Error, Result};
use crate::freezecov::{freezing_covariance, Ensemble, EnsembleSpec};
use crate::orthopoly::{zeros_and_weights, PolynomialFamily};
use crate::quadrature::{integrate_with_breaks, DEFAULT_MAX_PANELS};

/// Upper end of `x + a_r` kept in the edge integrals; `Ai(12)² ≈ 3e−23`.
pub const AIRY_TAIL_START: f64 = 12.0;
/// Below this distance from `a_r` the profile is taken from the Taylor
/// series at the zero, so `Ai(a_r + x)/x` does not cancel.
pub const SERIES_PANEL: f64 = 0.25;
pub const EDGE_QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeEnsemble {
    Hermite,
    Laguerre { alpha: f64 },
}

impl EdgeEnsemble {
    pub fn family(&self) -> PolynomialFamily {
        match *self {
            EdgeEnsemble::Hermite => PolynomialFamily::Hermite,
            EdgeEnsemble::Laguerre { alpha } => PolynomialFamily::Laguerre { alpha },
        }
    }

    fn check_r(&self, r: usize) -> Result<()> {
        match self {
            _ if r == 0 => Err(Error::domain("edge index r starts at 1")),
            EdgeEnsemble::Laguerre { .. } if r != 1 => Err(Error::domain("the Laguerre edge limit is only available for r = 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProfile {
    pub ensemble: EdgeEnsemble,
    pub n: usize,
    pub r: usize,
    pub grid: Vec<f64>,
    pub f_n_values: Vec<f64>,
    pub f_limit_values: Vec<f64>,
}

impl EdgeProfile {
    pub fn sup_error(&self) -> f64 {
        self.f_n_values.iter().zip(&self.f_limit_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `q_k`, `k = 0..N-1`: the row of the orthogonal eigenvector matrix at the
/// `r`-th largest zero, i.e. `√(π(z)/κ_N) Q̃_k(z)`. Sums of squares equal 1.
pub fn edge_dual_values(ensemble: EdgeEnsemble, n: usize, r: usize) -> Result<Vec<f64>> {
    ensemble.check_r(r)?;
    if r > n {
        return Err(Error::domain(format!("edge index r = {r} exceeds N = {n}")));
    }
    let zs = zeros_and_weights(ensemble.family(), n)?;
    let dual = build_dual_basis(&zs)?;
    let t = eigenvector_matrix(&dual, &zs)?;
    Ok(t.row(n - r).iter().copied().collect())
}

/// The limit profile at `y >= 0`.
pub fn edge_limit(airy: &AiryEvaluator, ensemble: EdgeEnsemble, r: usize, y: f64) -> Result<f64> {
    ensemble.check_r(r)?;
    let a = airy.airy_zero(r)?;
    let d = airy.ai_prime(a);
    Ok(match ensemble {
        EdgeEnsemble::Hermite => normalized_airy(airy, a, d, y),
        EdgeEnsemble::Laguerre { .. } => {
            let c = 2.0_f64.powf(2.0 / 3.0);
            2.0_f64.powf(1.0 / 3.0) * normalized_airy(airy, a, d, c * y)
        }
    })
}

// Ai(a + x) / Ai'(a) for a zero a of Ai.
fn normalized_airy(airy: &AiryEvaluator, a: f64, d: f64, x: f64) -> f64 {
    if x.abs() <= SERIES_PANEL {
        ode_taylor(a, 0.0, 1.0, x).ai
    } else {
        airy.ai(a + x) / d
    }
}

fn step_index(n: usize, y: f64) -> Result<usize> {
    let limit = (n as f64).powf(2.0 / 3.0);
    if !(y >= 0.0 && y < limit) {
        return Err(Error::domain(format!("grid value {y} outside [0, N^(2/3)) = [0, {limit})")));
    }
    Ok((((n as f64).cbrt() * y).floor() as usize).min(n - 1))
}

pub fn edge_profile(airy: &AiryEvaluator, ensemble: EdgeEnsemble, n: usize, r: usize, grid: &[f64]) -> Result<EdgeProfile> {
    let q = edge_dual_values(ensemble, n, r)?;
    let scale = (n as f64).powf(1.0 / 6.0);
    let mut f_n_values = Vec::with_capacity(grid.len());
    let mut f_limit_values = Vec::with_capacity(grid.len());
    for &y in grid {
        f_n_values.push(scale * q[step_index(n, y)?]);
        f_limit_values.push(edge_limit(airy, ensemble, r, y)?);
    }
    Ok(EdgeProfile { ensemble, n, r, grid: grid.to_vec(), f_n_values, f_limit_values })
}

/// `sup_{y ∈ [0, y_max]} |f_N(y) − f(y)|`, sampling both ends of every step
/// of `f_N` and eight interior points.
pub fn profile_sup_error(airy: &AiryEvaluator, ensemble: EdgeEnsemble, n: usize, r: usize, y_max: f64) -> Result<f64> {
    let q = edge_dual_values(ensemble, n, r)?;
    let h = 1.0 / (n as f64).cbrt();
    let scale = (n as f64).powf(1.0 / 6.0);
    step_index(n, y_max)?;
    let mut sup = 0.0_f64;
    let mut k = 0;
    while (k as f64) * h <= y_max {
        let lo = k as f64 * h;
        let hi = ((k + 1) as f64 * h).min(y_max);
        for s in 0..=9 {
            let y = lo + (hi - lo) * s as f64 / 9.0;
            // right end of a full step belongs to the next step; take the left limit
            let err = (scale * q[k] - edge_limit(airy, ensemble, r, y)?).abs();
            sup = sup.max(err);
        }
        k += 1;
    }
    Ok(sup)
}

/// Value of an edge integral with its error budget (quadrature + tail bound).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeIntegral {
    pub value: f64,
    pub error: f64,
}

// ∫_0^∞ g(f(x), x) dx with f = Ai(x + a_r)/Ai'(a_r), split at the interior
// zeros of f and truncated at x + a_r = AIRY_TAIL_START.
fn edge_integral(airy: &AiryEvaluator, r: usize, g: impl Fn(f64, f64) -> f64, tail_bound: impl Fn(f64, f64) -> f64) -> Result<EdgeIntegral> {
    if r == 0 {
        return Err(Error::domain("edge index r starts at 1"));
    }
    let a = airy.airy_zero(r)?;
    let d = airy.ai_prime(a);
    let x_max = AIRY_TAIL_START - a;
    let mut breaks: Vec<f64> = (1..r).map(|j| airy.airy_zero(j).map(|aj| aj - a)).collect::<Result<_>>()?;
    breaks.push(SERIES_PANEL);
    let mut x = 1.0;
    while x < x_max {
        breaks.push(x);
        x += 1.0;
    }
    let q = integrate_with_breaks(|x| g(normalized_airy(airy, a, d, x), x), 0.0, x_max, &breaks, EDGE_QUAD_TOL, EDGE_QUAD_TOL, DEFAULT_MAX_PANELS)?;
    let ai_end = airy.ai(AIRY_TAIL_START) / d;
    Ok(EdgeIntegral { value: q.value, error: q.error + tail_bound(ai_end, x_max) })
}

// ∫_X^∞ Ai(t)² dt ≤ Ai(X)² / √X for X ≥ 1, since (Ai²)'/Ai² ≤ −2√t there.
fn tail_sq(f_end: f64) -> f64 {
    f_end * f_end / AIRY_TAIL_START.sqrt()
}

/// `σ²_max,r = ∫_0^∞ Ai(x + a_r)² / (Ai'(a_r)² x) dx`.
pub fn variance_integral(airy: &AiryEvaluator, r: usize) -> Result<EdgeIntegral> {
    edge_integral(airy, r, |f, x| f * f / x, |f_end, x_max| tail_sq(f_end) / x_max)
}

/// `∫_0^∞ Ai(x + a_r)² dx / Ai'(a_r)²`, which equals 1.
pub fn edge_l2_norm(airy: &AiryEvaluator, r: usize) -> Result<EdgeIntegral> {
    edge_integral(airy, r, |f, _| f * f, |f_end, _| tail_sq(f_end))
}

/// `2 ∫_0^∞ (Ai(x + a_r) / Ai'(a_r))⁴ dx`.
pub fn quartic_integral(airy: &AiryEvaluator, r: usize) -> Result<EdgeIntegral> {
    edge_integral(airy, r, |f, _| 2.0 * f.powi(4), |f_end, _| 2.0 * f_end * f_end * tail_sq(f_end))
}

/// The quartic alternative to `σ²_max,r` and its comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeVariance {
    pub r: usize,
    /// `2 ∫ (Ai(x+a_r)/Ai'(a_r))⁴ dx`.
    pub quartic: f64,
    /// `2 ∫ Ai⁴ / (∫ Ai²)²`, the normalization-free form.
    pub ratio: f64,
    /// `∫ Ai(x+a_r)² dx / Ai'(a_r)²`.
    pub l2_norm: f64,
    /// `quartic − σ²_max,r`.
    pub residual: f64,
}

pub fn variance_integral_de_r(airy: &AiryEvaluator, r: usize) -> Result<DeVariance> {
    let quartic = quartic_integral(airy, r)?.value;
    let l2_norm = edge_l2_norm(airy, r)?.value;
    let sigma = variance_integral(airy, r)?.value;
    Ok(DeVariance { r, quartic, ratio: quartic / (l2_norm * l2_norm), l2_norm, residual: quartic - sigma })
}

pub fn variance_integral_de(airy: &AiryEvaluator) -> Result<DeVariance> {
    variance_integral_de_r(airy, 1)
}

/// The conventional Laguerre edge constant, `σ²_max,1 / 2`.
pub fn variance_integral_laguerre(airy: &AiryEvaluator) -> Result<f64> {
    Ok(variance_integral(airy, 1)?.value / 2.0)
}

/// The value `N^{1/3} σ_{N,N}` approaches in the Laguerre ensemble:
/// `∫ f(y)²/(2y) dy = 2^{-1/3} σ²_max,1` for the profile `f` above.
pub fn laguerre_edge_variance_observed(airy: &AiryEvaluator) -> Result<f64> {
    Ok(2.0_f64.powf(-1.0 / 3.0) * variance_integral(airy, 1)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeVariance {
    pub r: usize,
    pub value: f64,
    /// Quartic form, reported for `r = 1`.
    pub de_value: Option<f64>,
    pub laguerre_value: f64,
}

pub fn edge_variance(airy: &AiryEvaluator, r: usize) -> Result<EdgeVariance> {
    let value = variance_integral(airy, r)?.value;
    let de_value = if r == 1 { Some(quartic_integral(airy, 1)?.value) } else { None };
    Ok(EdgeVariance { r, value, de_value, laguerre_value: variance_integral_laguerre(airy)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub n: usize,
    /// `N^{1/3} σ_{N-r+1,N-r+1}`.
    pub scaled: f64,
    pub limit: f64,
    pub gap: f64,
}

/// Scaled edge variances along `n_list`. Hermite compares against
/// `σ²_max,r`, Laguerre (r = 1) against [`variance_integral_laguerre`].
pub fn sigma_trend(airy: &AiryEvaluator, ensemble: Ensemble, r: usize, n_list: &[usize]) -> Result<Vec<TrendRow>> {
    let limit = match ensemble {
        Ensemble::Hermite => variance_integral(airy, r)?.value,
        Ensemble::Laguerre { .. } if r == 1 => variance_integral_laguerre(airy)?,
        Ensemble::Laguerre { .. } => return Err(Error::domain("the Laguerre edge limit is only available for r = 1")),
        _ => return Err(Error::domain("edge trends are defined for the Hermite and Laguerre ensembles")),
    };
    n_list
        .iter()
        .map(|&n| {
            if n < r || r == 0 {
                return Err(Error::domain(format!("need 1 <= r <= N, got r = {r}, N = {n}")));
            }
            let fc = freezing_covariance(&EnsembleSpec::new(ensemble, n)?)?;
            let scaled = (n as f64).cbrt() * fc.sigma_matrix[(n - r, n - r)];
            Ok(TrendRow { n, scaled, limit, gap: scaled - limit })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelRotachRow {
    pub n: usize,
    /// `z_{N-r+1,N}/√(2N)` (Hermite) or `z_{N,N}/(4N)` (Laguerre).
    pub ratio: f64,
    pub asymptote: f64,
    /// `N · |ratio − asymptote|`.
    pub scaled_residual: f64,
}

pub fn plancherel_rotach_check(airy: &AiryEvaluator, ensemble: EdgeEnsemble, r: usize, n_list: &[usize]) -> Result<Vec<PlancherelRotachRow>> {
    ensemble.check_r(r)?;
    let a = airy.airy_zero(r)?;
    n_list
        .iter()
        .map(|&n| {
            if n < r {
                return Err(Error::domain(format!("need r <= N, got r = {r}, N = {n}")));
            }
            let zs = zeros_and_weights(ensemble.family(), n)?;
            let nf = n as f64;
            let z = zs.zeros[n - r];
            let (ratio, asymptote) = match ensemble {
                EdgeEnsemble::Hermite => (z / (2.0 * nf).sqrt(), 1.0 - a.abs() / (2.0 * nf.powf(2.0 / 3.0))),
                EdgeEnsemble::Laguerre { .. } => (z / (4.0 * nf), 1.0 + a / (2.0 * nf).powf(2.0 / 3.0)),
            };
            Ok(PlancherelRotachRow { n, ratio, asymptote, scaled_residual: nf * (ratio - asymptote).abs() })
        })
        .collect()
}

/// "No growth" along an increasing `N` list: every scaled residual is at most
/// `bound` and consecutive increments shrink in magnitude.
pub fn residuals_bounded(rows: &[PlancherelRotachRow], bound: f64) -> bool {
    let vals: Vec<f64> = rows.iter().map(|r| r.scaled_residual).collect();
    let incs: Vec<f64> = vals.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    vals.iter().all(|v| *v <= bound) && incs.windows(2).all(|w| w[1] < w[0])
}

/// `f(y) − [∫_0^y (y−t) V(t) f(t) dt + f'(0) y]` for the limit profile, where
/// `f'' = V f` with `V(t) = t − |a_1|` (Hermite) or `4t + 2^{4/3} a_1` (Laguerre).
pub fn integral_equation_residual(airy: &AiryEvaluator, ensemble: EdgeEnsemble, y: f64) -> Result<f64> {
    let a1 = airy.airy_zero(1)?;
    let d = airy.ai_prime(a1);
    let c = 2.0_f64.powf(2.0 / 3.0);
    let (slope, profile): (f64, Box<dyn Fn(f64) -> f64 + '_>) = match ensemble {
        EdgeEnsemble::Hermite => (1.0, Box::new(move |t| normalized_airy(airy, a1, d, t))),
        EdgeEnsemble::Laguerre { .. } => (2.0, Box::new(move |t| c.sqrt() * normalized_airy(airy, a1, d, c * t))),
    };
    let potential = |t: f64| match ensemble {
        EdgeEnsemble::Hermite => t - a1.abs(),
        EdgeEnsemble::Laguerre { .. } => 4.0 * t + c * c * a1,
    };
    let breaks: Vec<f64> = (1..(y.ceil() as usize)).map(|k| k as f64).collect();
    let q = integrate_with_breaks(|t| (y - t) * potential(t) * profile(t), 0.0, y, &breaks, 1e-14, 1e-14, DEFAULT_MAX_PANELS)?;
    Ok(profile(y) - (q.value + slope * y))
}
