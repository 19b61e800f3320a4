//! Random-walk Metropolis samplers for the ensembles at large but finite
//! multiplicity, and the moment statistics used to check the Gaussian limits.
//!
//! The targets are the unnormalized joint densities:
//!
//! ```text
//! Hermite      e^{-|y|²/2t} Π_{i<j} (y_j − y_i)^{2k}                     y_1 < … < y_N
//! Laguerre     e^{-|y|²/2t} Π_{i<j} (y_j² − y_i²)^{2κ} Π y_i^{2κν}          0 < y_1 < … < y_N
//! JacobiTrig   Π_{i<j} (cos 2t_j − cos 2t_i)^κ Π sin(t_i)^{κa} sin(2t_i)^{κb}   π/2 > t_1 > … > t_N > 0
//! JacobiPlain  Π_{i<j} (x_j − x_i)^κ Π (1−x_i)^{κ(a+b)/2 − 1/2} (1+x_i)^{κb/2 − 1/2}   −1 < x_1 < … < x_N < 1
//! ```
//!
//! `beta_like` is `k` (Hermite) or `κ` (the others). Proposals leaving the
//! chamber are rejected.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freezecov::{freezing_covariance, Ensemble, EnsembleSpec, FreezingCovariance};

pub const TARGET_ACCEPTANCE: f64 = 0.3;
pub const ACCEPTANCE_WARN_RANGE: (f64, f64) = (0.05, 0.8);
pub const MIN_MOMENT_DRAWS: usize = 100;
pub const BATCHES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Retained draws `M`.
    pub samples: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 100_000, burn_in: 10_000, thinning: 10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub spec: EnsembleSpec,
    pub beta_like: f64,
    pub t: f64,
    pub config: SamplerConfig,
    /// Row-major `M × N` retained configurations.
    pub draws: Vec<f64>,
    /// Acceptance rate after burn-in.
    pub acceptance_rate: f64,
    /// Proposal standard deviation after adaptation.
    pub step_size: f64,
    pub tuning_warning: Option<String>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.draws.len() / self.spec.n
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn draw(&self, m: usize) -> &[f64] {
        let n = self.spec.n;
        &self.draws[m * n..(m + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.chunks_exact(self.spec.n)
    }
}

/// Seed of chain `index` derived from a base seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Whether `x` lies in the open chamber of the ensemble.
pub fn in_chamber(ensemble: Ensemble, x: &[f64]) -> bool {
    if x.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let inc = x.windows(2).all(|w| w[0] < w[1]);
    match ensemble {
        Ensemble::Hermite => inc,
        Ensemble::Laguerre { .. } => inc && x[0] > 0.0,
        Ensemble::JacobiTrig { .. } => {
            x.windows(2).all(|w| w[0] > w[1]) && x[0] < std::f64::consts::FRAC_PI_2 && x[x.len() - 1] > 0.0
        }
        Ensemble::JacobiPlain { .. } => inc && x[0] > -1.0 && x[x.len() - 1] < 1.0,
    }
}

/// Unnormalized log-density; `−∞` outside the chamber.
pub fn log_density(ensemble: Ensemble, beta_like: f64, t: f64, x: &[f64]) -> f64 {
    if !in_chamber(ensemble, x) {
        return f64::NEG_INFINITY;
    }
    let n = x.len();
    let mut lp = 0.0;
    match ensemble {
        Ensemble::Hermite => {
            lp -= x.iter().map(|v| v * v).sum::<f64>() / (2.0 * t);
            for i in 0..n {
                for j in (i + 1)..n {
                    lp += 2.0 * beta_like * (x[j] - x[i]).ln();
                }
            }
        }
        Ensemble::Laguerre { nu } => {
            lp -= x.iter().map(|v| v * v).sum::<f64>() / (2.0 * t);
            for i in 0..n {
                lp += 2.0 * beta_like * nu * x[i].ln();
                for j in (i + 1)..n {
                    lp += 2.0 * beta_like * ((x[j] - x[i]).ln() + (x[j] + x[i]).ln());
                }
            }
        }
        Ensemble::JacobiTrig { a, b } => {
            for i in 0..n {
                lp += beta_like * (a * x[i].sin().ln() + b * (2.0 * x[i]).sin().ln());
                for j in (i + 1)..n {
                    lp += beta_like * ((2.0 * x[j]).cos() - (2.0 * x[i]).cos()).ln();
                }
            }
        }
        Ensemble::JacobiPlain { a, b } => {
            for i in 0..n {
                lp += (0.5 * beta_like * (a + b) - 0.5) * (1.0 - x[i]).ln() + (0.5 * beta_like * b - 0.5) * (1.0 + x[i]).ln();
                for j in (i + 1)..n {
                    lp += beta_like * (x[j] - x[i]).ln();
                }
            }
        }
    }
    lp
}

/// Centering and scale of the statistic with a Gaussian limit:
/// `scale · (X − centering)`.
pub fn wlt_statistic(fc: &FreezingCovariance, beta_like: f64, t: f64) -> (Vec<f64>, f64) {
    match fc.spec.ensemble {
        Ensemble::Hermite | Ensemble::Laguerre { .. } => {
            let c = fc.frozen_offset_at(beta_like).iter().map(|v| v * t.sqrt()).collect();
            (c, 1.0 / t.sqrt())
        }
        Ensemble::JacobiTrig { .. } | Ensemble::JacobiPlain { .. } => (fc.frozen_offset.clone(), beta_like.sqrt()),
    }
}

fn initial_step(ensemble: Ensemble, beta_like: f64, t: f64, n: usize) -> f64 {
    let dim = (n as f64).sqrt();
    match ensemble {
        Ensemble::Hermite | Ensemble::Laguerre { .. } => t.sqrt() / dim,
        Ensemble::JacobiTrig { .. } | Ensemble::JacobiPlain { .. } => 0.3 / (beta_like.sqrt() * n as f64 * dim),
    }
}

/// Runs one chain from the frozen configuration.
pub fn sample(spec: &EnsembleSpec, beta_like: f64, t: f64, config: SamplerConfig) -> Result<SampleBatch> {
    spec.validate()?;
    if !(beta_like > 0.0 && beta_like.is_finite()) {
        return Err(Error::domain(format!("beta_like = {beta_like} must be positive")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    if config.samples == 0 || config.thinning == 0 {
        return Err(Error::domain("samples and thinning must be at least 1"));
    }
    let fc = freezing_covariance(spec)?;
    let ensemble = spec.ensemble;
    let n = spec.n;
    let (centering, _) = wlt_statistic(&fc, beta_like, t);
    let mut x = centering;
    let mut lp = log_density(ensemble, beta_like, t, &x);
    if !lp.is_finite() {
        return Err(Error::domain("log-density is not finite at the frozen configuration"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let unif = Uniform::new(0.0_f64, 1.0);
    let mut log_step = initial_step(ensemble, beta_like, t, n).ln();
    let mut proposal = vec![0.0; n];

    let mut mh_step = |x: &mut Vec<f64>, lp: &mut f64, step: f64, rng: &mut ChaCha8Rng| -> bool {
        for (p, xi) in proposal.iter_mut().zip(x.iter()) {
            let e: f64 = StandardNormal.sample(rng);
            *p = xi + step * e;
        }
        let lq = log_density(ensemble, beta_like, t, &proposal);
        let accept = lq.is_finite() && (lq >= *lp || unif.sample(rng).ln() < lq - *lp);
        if accept {
            x.copy_from_slice(&proposal);
            *lp = lq;
        }
        accept
    };

    // Robbins–Monro on log step size, burn-in only
    for it in 0..config.burn_in {
        let acc = mh_step(&mut x, &mut lp, log_step.exp(), &mut rng);
        let gain = 1.0 / ((it + 1) as f64).powf(0.6);
        log_step += gain * (if acc { 1.0 } else { 0.0 } - TARGET_ACCEPTANCE);
    }
    let step = log_step.exp();

    let mut draws = Vec::with_capacity(config.samples * n);
    let mut accepted = 0usize;
    for _ in 0..config.samples {
        for _ in 0..config.thinning {
            if mh_step(&mut x, &mut lp, step, &mut rng) {
                accepted += 1;
            }
        }
        draws.extend_from_slice(&x);
    }
    let acceptance_rate = accepted as f64 / (config.samples * config.thinning) as f64;
    let tuning_warning = if acceptance_rate < ACCEPTANCE_WARN_RANGE.0 || acceptance_rate > ACCEPTANCE_WARN_RANGE.1 {
        Some(format!("acceptance rate {acceptance_rate:.3} outside [{}, {}]", ACCEPTANCE_WARN_RANGE.0, ACCEPTANCE_WARN_RANGE.1))
    } else {
        None
    };
    Ok(SampleBatch { spec: *spec, beta_like, t, config, draws, acceptance_rate, step_size: step, tuning_warning })
}

/// Empirical mean and covariance of `scale · (draw − centering)` with
/// batch-means standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub covariance_se: DMatrix<f64>,
}

pub fn empirical_moments(batch: &SampleBatch, centering: &[f64], scale: f64) -> Result<Moments> {
    let n = batch.spec.n;
    let m = batch.len();
    if m < MIN_MOMENT_DRAWS {
        return Err(Error::domain(format!("need at least {MIN_MOMENT_DRAWS} draws, got {m}")));
    }
    if centering.len() != n {
        return Err(Error::domain("centering has the wrong dimension"));
    }
    let stat = |row: &[f64], i: usize| scale * (row[i] - centering[i]);
    let moments_of = |lo: usize, hi: usize| -> (Vec<f64>, DMatrix<f64>) {
        let len = (hi - lo) as f64;
        let mut mean = vec![0.0; n];
        for row in batch.rows().skip(lo).take(hi - lo) {
            for i in 0..n {
                mean[i] += stat(row, i);
            }
        }
        mean.iter_mut().for_each(|v| *v /= len);
        let mut cov = DMatrix::zeros(n, n);
        for row in batch.rows().skip(lo).take(hi - lo) {
            for i in 0..n {
                let di = stat(row, i) - mean[i];
                for j in 0..=i {
                    cov[(i, j)] += di * (stat(row, j) - mean[j]);
                }
            }
        }
        for i in 0..n {
            for j in 0..=i {
                cov[(i, j)] /= len - 1.0;
                cov[(j, i)] = cov[(i, j)];
            }
        }
        (mean, cov)
    };
    let (mean, covariance) = moments_of(0, m);
    let per = m / BATCHES;
    let mut mean_sq = vec![0.0; n];
    let mut cov_sq = DMatrix::<f64>::zeros(n, n);
    for b in 0..BATCHES {
        let (bm, bc) = moments_of(b * per, (b + 1) * per);
        for i in 0..n {
            mean_sq[i] += (bm[i] - mean[i]).powi(2);
        }
        cov_sq += (bc - &covariance).map(|v| v * v);
    }
    let denom = (BATCHES * (BATCHES - 1)) as f64;
    Ok(Moments {
        mean,
        mean_se: mean_sq.iter().map(|v| (v / denom).sqrt()).collect(),
        covariance,
        covariance_se: cov_sq.map(|v| (v / denom).sqrt()),
    })
}

/// z-scores of the empirical moments against the Gaussian limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WltComparison {
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    pub mean_z: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub covariance_se: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
    pub covariance_z: Vec<Vec<f64>>,
    pub max_abs_z: f64,
}

pub fn compare_with_limit(batch: &SampleBatch) -> Result<WltComparison> {
    let fc = freezing_covariance(&batch.spec)?;
    let (centering, scale) = wlt_statistic(&fc, batch.beta_like, batch.t);
    let mo = empirical_moments(batch, &centering, scale)?;
    let n = batch.spec.n;
    let rows = |m: &DMatrix<f64>| (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect::<Vec<Vec<f64>>>();
    let cz = DMatrix::from_fn(n, n, |i, j| (mo.covariance[(i, j)] - fc.sigma_matrix[(i, j)]) / mo.covariance_se[(i, j)]);
    let mean_z: Vec<f64> = mo.mean.iter().zip(&mo.mean_se).map(|(m, s)| m / s).collect();
    let max_abs_z = cz.iter().chain(mean_z.iter()).fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(WltComparison {
        mean_z,
        covariance: rows(&mo.covariance),
        covariance_se: rows(&mo.covariance_se),
        sigma: rows(&fc.sigma_matrix),
        covariance_z: rows(&cz),
        mean: mo.mean,
        mean_se: mo.mean_se,
        max_abs_z,
    })
}
