//! Frozen covariance matrices of the four β → ∞ ensembles.
//!
//! Each ensemble freezes onto the zeros of a classical family. The inverse
//! covariance `S_N` is assembled entrywise from those zeros; `Σ_N` is built
//! from the analytic spectrum and the dual eigenvectors rather than by
//! inverting `S_N`.
//!
//! | ensemble       | family                        | coordinates      | `λ_j`                  |
//! |----------------|-------------------------------|------------------|------------------------|
//! | `Hermite`      | Hermite                       | `z`              | `j`                    |
//! | `Laguerre`     | Laguerre, `α = ν − 1`         | `r = √z`         | `2j`                   |
//! | `JacobiTrig`   | Jacobi, `α = a+b−1`, `β = b−1` | `½ arccos z`     | `2j(2N+α+β+1−j)`       |
//! | `JacobiPlain`  | same                          | `z`              | (congruent to trig)    |

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dualbasis::{build_dual_basis, eigenvector_matrix, DualBasis};
use crate::error::{Error, Result};
use crate::orthopoly::{zeros_and_weights, PolynomialFamily, ZeroSet, MAX_DEGREE};

/// Relative entrywise agreement of the two dual covariance forms.
pub const DUAL_FORMS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ensemble {
    Hermite,
    Laguerre { nu: f64 },
    JacobiTrig { a: f64, b: f64 },
    JacobiPlain { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub ensemble: Ensemble,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn new(ensemble: Ensemble, n: usize) -> Result<Self> {
        let spec = EnsembleSpec { ensemble, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_DEGREE {
            return Err(Error::domain(format!("N = {} outside 1..={MAX_DEGREE}", self.n)));
        }
        match self.ensemble {
            Ensemble::Hermite => Ok(()),
            Ensemble::Laguerre { nu } if nu > 0.0 && nu.is_finite() => Ok(()),
            Ensemble::Laguerre { nu } => Err(Error::domain(format!("nu = {nu} must be positive"))),
            Ensemble::JacobiTrig { a, b } | Ensemble::JacobiPlain { a, b } => {
                if a >= 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::domain(format!("need a >= 0 and b > 0, got a = {a}, b = {b}")))
                }
            }
        }
    }

    /// The family whose zeros the ensemble freezes onto.
    pub fn family(&self) -> PolynomialFamily {
        match self.ensemble {
            Ensemble::Hermite => PolynomialFamily::Hermite,
            Ensemble::Laguerre { nu } => PolynomialFamily::Laguerre { alpha: nu - 1.0 },
            Ensemble::JacobiTrig { a, b } | Ensemble::JacobiPlain { a, b } => {
                PolynomialFamily::Jacobi { alpha: a + b - 1.0, beta: b - 1.0 }
            }
        }
    }

    /// `λ_j` for `j = 1..=N`; for `JacobiPlain` the values of the congruent
    /// trigonometric matrix.
    pub fn analytic_eigenvalue(&self, j: usize) -> f64 {
        let j = j as f64;
        match self.ensemble {
            Ensemble::Hermite => j,
            Ensemble::Laguerre { .. } => 2.0 * j,
            Ensemble::JacobiTrig { .. } | Ensemble::JacobiPlain { .. } => {
                let PolynomialFamily::Jacobi { alpha, beta } = self.family() else { unreachable!() };
                2.0 * j * (2.0 * self.n as f64 + alpha + beta + 1.0 - j)
            }
        }
    }

    pub fn analytic_eigenvalues(&self) -> Vec<f64> {
        (1..=self.n).map(|j| self.analytic_eigenvalue(j)).collect()
    }
}

/// All frozen-limit data for one ensemble and dimension.
#[derive(Debug, Clone)]
pub struct FreezingCovariance {
    pub spec: EnsembleSpec,
    /// Ordered zeros of the underlying family.
    pub zeros: Vec<f64>,
    pub s_matrix: DMatrix<f64>,
    pub sigma_matrix: DMatrix<f64>,
    /// `λ_1..λ_N`, matching the columns of `t_matrix`.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal eigenvector matrix. For `JacobiPlain` it diagonalizes the
    /// trigonometric matrix `D S D`, see `conjugation`.
    pub t_matrix: DMatrix<f64>,
    /// Frozen positions at unit multiplicity: `√2·z` (Hermite, k = 1),
    /// `√2·r` (Laguerre, κ = 1), `½ arccos z` (trig Jacobi), `z` (plain Jacobi).
    pub frozen_offset: Vec<f64>,
    /// `D = diag(−2√(1 − z_i²))` for `JacobiPlain`.
    pub conjugation: Option<Vec<f64>>,
}

impl FreezingCovariance {
    /// Frozen positions for multiplicity `k` (Hermite), `κ` (Laguerre);
    /// the Jacobi offsets do not scale.
    pub fn frozen_offset_at(&self, multiplicity: f64) -> Vec<f64> {
        let s = match self.spec.ensemble {
            Ensemble::Hermite | Ensemble::Laguerre { .. } => multiplicity.sqrt(),
            _ => 1.0,
        };
        self.frozen_offset.iter().map(|x| s * x).collect()
    }
}

/// Entrywise `S_N` for the ensemble.
pub fn build_inverse_covariance(spec: &EnsembleSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let zs = zeros_and_weights(spec.family(), spec.n)?;
    inverse_covariance_from_zeros(spec, &zs.zeros)
}

fn inverse_covariance_from_zeros(spec: &EnsembleSpec, z: &[f64]) -> Result<DMatrix<f64>> {
    let n = z.len();
    let x: Vec<f64> = match spec.ensemble {
        Ensemble::Laguerre { .. } => z.iter().map(|v| v.sqrt()).collect(),
        _ => z.to_vec(),
    };
    // inv_sq[(i, l)] = (x_i − x_l)^{-2}
    let mut inv_sq = DMatrix::zeros(n, n);
    for i in 0..n {
        for l in (i + 1)..n {
            let d = x[i] - x[l];
            if d == 0.0 {
                return Err(Error::Consistency { check: "distinct zeros", deviation: 0.0, tolerance: 0.0 });
            }
            inv_sq[(i, l)] = 1.0 / (d * d);
            inv_sq[(l, i)] = inv_sq[(i, l)];
        }
    }
    let row_sum = |i: usize| -> f64 { (0..n).filter(|&l| l != i).map(|l| inv_sq[(i, l)]).sum() };

    let mut s = DMatrix::zeros(n, n);
    match spec.ensemble {
        Ensemble::Hermite => {
            for i in 0..n {
                s[(i, i)] = 1.0 + row_sum(i);
                for j in 0..n {
                    if j != i {
                        s[(i, j)] = -inv_sq[(i, j)];
                    }
                }
            }
        }
        Ensemble::Laguerre { nu } => {
            for i in 0..n {
                let plus: f64 = (0..n).filter(|&l| l != i).map(|l| (x[i] + x[l]).powi(-2)).sum();
                s[(i, i)] = 1.0 + nu / (x[i] * x[i]) + row_sum(i) + plus;
                for j in 0..n {
                    if j != i {
                        s[(i, j)] = (x[i] + x[j]).powi(-2) - inv_sq[(i, j)];
                    }
                }
            }
        }
        Ensemble::JacobiTrig { a, b } => {
            for j in 0..n {
                let zj = x[j];
                let w = 1.0 - zj * zj;
                s[(j, j)] = 4.0 * w * row_sum(j) + 2.0 * (a + b) * (1.0 + zj) / (1.0 - zj) + 2.0 * b * (1.0 - zj) / (1.0 + zj);
                for i in 0..n {
                    if i != j {
                        s[(i, j)] = -4.0 * (w * (1.0 - x[i] * x[i])).sqrt() * inv_sq[(i, j)];
                    }
                }
            }
        }
        Ensemble::JacobiPlain { a, b } => {
            for j in 0..n {
                let zj = x[j];
                s[(j, j)] = row_sum(j) + 0.5 * (a + b) / (1.0 - zj).powi(2) + 0.5 * b / (1.0 + zj).powi(2);
                for i in 0..n {
                    if i != j {
                        s[(i, j)] = -inv_sq[(i, j)];
                    }
                }
            }
        }
    }
    Ok(s)
}

/// `D = diag(−2√(1 − z_i²))`, so that the trigonometric matrix is `D S D`.
pub fn jacobi_conjugation(zeros: &[f64]) -> Vec<f64> {
    zeros.iter().map(|z| -2.0 * (1.0 - z * z).sqrt()).collect()
}

/// `Σ_N` from the analytic spectrum and the dual basis, computed in two
/// forms (connection constants, and the `(−1)^{i+j}` normalized form). Fails
/// if they disagree beyond [`DUAL_FORMS_TOL`].
///
/// For `JacobiPlain` the result is `D Σ̃ D`.
pub fn covariance_dual(spec: &EnsembleSpec, dual: &DualBasis) -> Result<DMatrix<f64>> {
    spec.validate()?;
    if dual.family != spec.family() || dual.n != spec.n {
        return Err(Error::domain("dual basis does not match the ensemble"));
    }
    let n = spec.n;
    let f = dual.forward_normalized();
    let inv_lambda: Vec<f64> = (0..n).map(|m| 1.0 / spec.analytic_eigenvalue(n - m)).collect();
    let sign_rec: Vec<f64> = (0..n).map(|i| f[(i, n - 1)].signum()).collect();
    let norm_sq: Vec<f64> = (0..n).map(|i| f.row(i).norm_squared()).collect();

    let mut sigma = DMatrix::zeros(n, n);
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..=i {
            let core: f64 = (0..n).map(|m| f[(i, m)] * f[(j, m)] * inv_lambda[m]).sum();
            let first = (dual.pi_at_zeros[i] * dual.pi_at_zeros[j]).sqrt() / dual.kappa * sign_rec[i] * sign_rec[j];
            let parity = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let second = parity / (norm_sq[i] * norm_sq[j]).sqrt();
            worst = worst.max(((first - second) / second).abs());
            sigma[(i, j)] = first * core;
            sigma[(j, i)] = sigma[(i, j)];
        }
    }
    if !(worst <= DUAL_FORMS_TOL) {
        return Err(Error::Consistency { check: "dual covariance forms", deviation: worst, tolerance: DUAL_FORMS_TOL });
    }
    if let Ensemble::JacobiPlain { .. } = spec.ensemble {
        let d = jacobi_conjugation(&dual.zeros);
        for i in 0..n {
            for j in 0..n {
                sigma[(i, j)] *= d[i] * d[j];
            }
        }
    }
    Ok(sigma)
}

/// Hermite `Σ_N` from the Dumitriu–Edelman closed form.
pub fn covariance_de_hermite(n: usize) -> Result<DMatrix<f64>> {
    let zs = zeros_and_weights(PolynomialFamily::Hermite, n)?;
    let dual = build_dual_basis(&zs)?;
    // each row is P̃_l(z_i) up to a positive factor; the formula is invariant
    // under per-point rescaling and under l ↦ (−1)^l sign flips
    let h = dual.forward_normalized();
    let norm_sq: Vec<f64> = (0..n).map(|i| h.row(i).norm_squared()).collect();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let diag: f64 = (0..n).map(|l| h[(i, l)].powi(2) * h[(j, l)].powi(2)).sum();
        let cross: f64 = (0..n.saturating_sub(1)).map(|l| h[(i, l + 1)] * h[(i, l)] * h[(j, l + 1)] * h[(j, l)]).sum();
        (diag + cross) / (norm_sq[i] * norm_sq[j])
    }))
}

/// Everything at once: zeros, `S_N`, dual basis, `T_N` and `Σ_N`.
pub fn freezing_covariance(spec: &EnsembleSpec) -> Result<FreezingCovariance> {
    spec.validate()?;
    let zs = zeros_and_weights(spec.family(), spec.n)?;
    freezing_covariance_from(spec, &zs)
}

fn freezing_covariance_from(spec: &EnsembleSpec, zs: &ZeroSet) -> Result<FreezingCovariance> {
    let s_matrix = inverse_covariance_from_zeros(spec, &zs.zeros)?;
    let dual = build_dual_basis(zs)?;
    let t_matrix = eigenvector_matrix(&dual, zs)?;
    let sigma_matrix = covariance_dual(spec, &dual)?;
    let conjugation = match spec.ensemble {
        Ensemble::JacobiPlain { .. } => Some(jacobi_conjugation(&zs.zeros)),
        _ => None,
    };
    let frozen_offset = match spec.ensemble {
        Ensemble::Hermite => zs.zeros.iter().map(|z| std::f64::consts::SQRT_2 * z).collect(),
        Ensemble::Laguerre { .. } => zs.zeros.iter().map(|z| (2.0 * z).sqrt()).collect(),
        Ensemble::JacobiTrig { .. } => zs.zeros.iter().map(|z| 0.5 * z.acos()).collect(),
        Ensemble::JacobiPlain { .. } => zs.zeros.clone(),
    };
    Ok(FreezingCovariance {
        spec: *spec,
        zeros: zs.zeros.clone(),
        s_matrix,
        sigma_matrix,
        eigenvalues: spec.analytic_eigenvalues(),
        t_matrix,
        frozen_offset,
        conjugation,
    })
}

/// Magnitudes from [`spectrum_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Max |analytic − dense| over the sorted spectra, relative to `λ_max`.
    pub max_eigenvalue_error: f64,
    /// Max over `k` of `‖S v_k − λ_k v_k‖_∞ / λ_max`.
    pub max_eigvec_residual: f64,
    /// `‖S − T diag(λ) Tᵀ‖_max / λ_max`.
    pub reconstruction_error: f64,
    /// `‖Σ S − I‖_max`.
    pub inverse_error: f64,
    /// Smallest dense eigenvalue of `Σ` times `λ_max`; at least `1 − 1e−6`.
    pub sigma_min_scaled: f64,
}

/// Analytic spectrum and dual eigenvectors against a dense eigensolver. For
/// `JacobiPlain` the spectral parts refer to `D S D`.
pub fn spectrum_check(fc: &FreezingCovariance) -> SpectrumReport {
    let n = fc.spec.n;
    let s = match &fc.conjugation {
        Some(d) => DMatrix::from_fn(n, n, |i, j| d[i] * fc.s_matrix[(i, j)] * d[j]),
        None => fc.s_matrix.clone(),
    };
    let sigma = match &fc.conjugation {
        Some(d) => DMatrix::from_fn(n, n, |i, j| fc.sigma_matrix[(i, j)] / (d[i] * d[j])),
        None => fc.sigma_matrix.clone(),
    };
    let lambda_max = fc.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let mut dense: Vec<f64> = s.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    dense.sort_by(f64::total_cmp);
    let mut analytic = fc.eigenvalues.clone();
    analytic.sort_by(f64::total_cmp);
    let max_eigenvalue_error = dense.iter().zip(&analytic).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / lambda_max;

    let mut max_eigvec_residual = 0.0_f64;
    for k in 0..n {
        let v = fc.t_matrix.column(k);
        let r = (&s * v - v * fc.eigenvalues[k]).amax();
        max_eigvec_residual = max_eigvec_residual.max(r / lambda_max);
    }
    let recon = &fc.t_matrix * DMatrix::from_diagonal(&fc.eigenvalues.clone().into()) * fc.t_matrix.transpose();
    let reconstruction_error = (recon - &s).amax() / lambda_max;
    let inverse_error = (&fc.sigma_matrix * &fc.s_matrix - DMatrix::identity(n, n)).amax();
    let sigma_min = sigma.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);

    SpectrumReport {
        max_eigenvalue_error,
        max_eigvec_residual,
        reconstruction_error,
        inverse_error,
        sigma_min_scaled: sigma_min * lambda_max,
    }
}

/// Mean of the Gaussian limit for a process started in `start` and observed at
/// time `t`, in the centered coordinates `X/√t − frozen offset`.
///
/// Only the Hermite case has a drifting component, `x̄/√t · (1, …, 1)`.
pub fn limit_mean(spec: &EnsembleSpec, start: Option<&[f64]>, t: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    let n = spec.n;
    let Some(x) = start else {
        return Ok(vec![0.0; n]);
    };
    if x.len() != n {
        return Err(Error::domain(format!("start has {} coordinates, expected {n}", x.len())));
    }
    let ordered = x.windows(2).all(|w| w[0] <= w[1]) && x.iter().all(|v| v.is_finite());
    match spec.ensemble {
        Ensemble::Hermite => {
            if !ordered {
                return Err(Error::domain("start outside the chamber x_1 <= ... <= x_N"));
            }
            let mean = x.iter().sum::<f64>() / n as f64;
            Ok(vec![mean / t.sqrt(); n])
        }
        Ensemble::Laguerre { .. } => {
            if !ordered || x[0] < 0.0 {
                return Err(Error::domain("start outside the chamber 0 <= x_1 <= ... <= x_N"));
            }
            Ok(vec![0.0; n])
        }
        Ensemble::JacobiTrig { .. } | Ensemble::JacobiPlain { .. } => {
            Err(Error::domain("Jacobi ensembles are stationary and take no starting point"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_ensembles() -> Vec<Ensemble> {
        vec![
            Ensemble::Hermite,
            Ensemble::Laguerre { nu: 1.0 },
            Ensemble::Laguerre { nu: 2.5 },
            Ensemble::JacobiTrig { a: 1.0, b: 1.0 },
            Ensemble::JacobiTrig { a: 0.0, b: 0.5 },
            Ensemble::JacobiPlain { a: 1.0, b: 1.0 },
            Ensemble::JacobiPlain { a: 2.0, b: 3.0 },
        ]
    }

    fn spec(e: Ensemble, n: usize) -> EnsembleSpec {
        EnsembleSpec::new(e, n).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(EnsembleSpec::new(Ensemble::Laguerre { nu: 0.0 }, 3).is_err());
        assert!(EnsembleSpec::new(Ensemble::JacobiTrig { a: -0.1, b: 1.0 }, 3).is_err());
        assert!(EnsembleSpec::new(Ensemble::JacobiPlain { a: 1.0, b: 0.0 }, 3).is_err());
        assert!(EnsembleSpec::new(Ensemble::Hermite, 0).is_err());
        assert!(EnsembleSpec::new(Ensemble::Hermite, MAX_DEGREE + 1).unwrap_err().is_domain());
    }

    #[test]
    fn parameter_mapping() {
        let s = spec(Ensemble::JacobiTrig { a: 1.0, b: 1.0 }, 3);
        assert_eq!(s.family(), PolynomialFamily::Jacobi { alpha: 1.0, beta: 0.0 });
        assert_eq!(s.analytic_eigenvalues(), vec![14.0, 24.0, 30.0]);
        let l = spec(Ensemble::Laguerre { nu: 2.0 }, 5);
        assert_eq!(l.analytic_eigenvalues(), vec![2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn hermite_small_cases() {
        let s1 = build_inverse_covariance(&spec(Ensemble::Hermite, 1)).unwrap();
        assert_eq!(s1[(0, 0)], 1.0);
        let s2 = build_inverse_covariance(&spec(Ensemble::Hermite, 2)).unwrap();
        assert_relative_eq!(s2[(0, 0)], 1.5, max_relative = 1e-14);
        assert_relative_eq!(s2[(1, 1)], 1.5, max_relative = 1e-14);
        assert_relative_eq!(s2[(0, 1)], -0.5, max_relative = 1e-14);
        // 2×2 closed form: (3/2 ± 1/2)
        let fc = freezing_covariance(&spec(Ensemble::Hermite, 2)).unwrap();
        let mut ev: Vec<f64> = fc.s_matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert_relative_eq!(ev[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(ev[1], 2.0, max_relative = 1e-14);
        let fc1 = freezing_covariance(&spec(Ensemble::Hermite, 1)).unwrap();
        assert_relative_eq!(fc1.sigma_matrix[(0, 0)], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn laguerre_one_particle() {
        for nu in [0.5, 1.0, 3.0] {
            let s = build_inverse_covariance(&spec(Ensemble::Laguerre { nu }, 1)).unwrap();
            assert_relative_eq!(s[(0, 0)], 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn spectra_and_inverse() {
        for e in all_ensembles() {
            for n in [1, 2, 3, 6, 12, 30, 50] {
                let fc = freezing_covariance(&spec(e, n)).unwrap();
                let r = spectrum_check(&fc);
                assert!(r.max_eigenvalue_error < 1e-9, "{e:?} N={n} {r:?}");
                assert!(r.max_eigvec_residual < 1e-9, "{e:?} N={n} {r:?}");
                assert!(r.reconstruction_error < 1e-9, "{e:?} N={n} {r:?}");
                assert!(r.inverse_error < 1e-8, "{e:?} N={n} {r:?}");
                assert!(r.sigma_min_scaled >= 1.0 - 1e-6, "{e:?} N={n} {r:?}");
                assert!((&fc.sigma_matrix - fc.sigma_matrix.transpose()).amax() == 0.0);
            }
        }
    }

    #[test]
    fn dense_oracle_inverse() {
        for e in all_ensembles() {
            for n in [2, 5, 12] {
                let fc = freezing_covariance(&spec(e, n)).unwrap();
                let inv = fc.s_matrix.clone().try_inverse().unwrap();
                let scale = inv.amax();
                assert!((&inv - &fc.sigma_matrix).amax() < 1e-9 * scale, "{e:?} N={n}");
            }
        }
    }

    #[test]
    fn jacobi_conjugation_identity() {
        for (a, b) in [(1.0, 1.0), (0.0, 2.0), (2.5, 0.5)] {
            for n in [1, 3, 10, 40] {
                let trig = freezing_covariance(&spec(Ensemble::JacobiTrig { a, b }, n)).unwrap();
                let plain = freezing_covariance(&spec(Ensemble::JacobiPlain { a, b }, n)).unwrap();
                let d = plain.conjugation.clone().unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let dsd = d[i] * plain.s_matrix[(i, j)] * d[j];
                        let t = trig.s_matrix[(i, j)];
                        assert!((dsd - t).abs() <= 1e-9 * t.abs().max(1e-300), "a={a} b={b} N={n}");
                        let back = trig.sigma_matrix[(i, j)] * d[i] * d[j];
                        assert!((back - plain.sigma_matrix[(i, j)]).abs() <= 1e-9 * back.abs());
                    }
                }
            }
        }
    }

    #[test]
    fn plain_jacobi_entrywise_form() {
        // σ_ij = (−1)^{i+j} 4 √(1−z_i²) √(1−z_j²) / √(Σ_k P̃_k(z_i)² Σ_l P̃_l(z_j)²) Σ_k P̃_k P̃_k / λ_{N−k}
        let sp = spec(Ensemble::JacobiPlain { a: 1.0, b: 1.0 }, 3);
        let fc = freezing_covariance(&sp).unwrap();
        let fam = sp.family();
        let n = 3;
        let p: Vec<Vec<f64>> = fc.zeros.iter().map(|&z| crate::orthopoly::eval_orthonormal(fam, n - 1, z).unwrap()).collect();
        for i in 0..n {
            for j in 0..n {
                let (zi, zj) = (fc.zeros[i], fc.zeros[j]);
                let si: f64 = p[i].iter().map(|v| v * v).sum();
                let sj: f64 = p[j].iter().map(|v| v * v).sum();
                let core: f64 = (0..n).map(|k| p[i][k] * p[j][k] / sp.analytic_eigenvalue(n - k)).sum();
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign * 4.0 * (1.0 - zi * zi).sqrt() * (1.0 - zj * zj).sqrt() / (si * sj).sqrt() * core;
                assert_relative_eq!(fc.sigma_matrix[(i, j)], expected, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn de_formula_matches_dual() {
        for n in 1..=12 {
            let de = covariance_de_hermite(n).unwrap();
            let fc = freezing_covariance(&spec(Ensemble::Hermite, n)).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_relative_eq!(de[(i, j)], fc.sigma_matrix[(i, j)], max_relative = 1e-8);
                }
            }
        }
        // 2×2 closed-form inverse: [[3/2, −1/2], [−1/2, 3/2]]^{-1} = [[3/4, 1/4], [1/4, 3/4]]
        let de2 = covariance_de_hermite(2).unwrap();
        assert_relative_eq!(de2[(1, 1)], 0.75, max_relative = 1e-14);
        assert_relative_eq!(de2[(0, 1)], 0.25, max_relative = 1e-14);
        assert_eq!(covariance_de_hermite(1).unwrap()[(0, 0)], 1.0);
    }

    #[test]
    fn covariance_dual_rejects_mismatch() {
        let zs = zeros_and_weights(PolynomialFamily::Hermite, 4).unwrap();
        let dual = build_dual_basis(&zs).unwrap();
        assert!(covariance_dual(&spec(Ensemble::Hermite, 5), &dual).is_err());
        assert!(covariance_dual(&spec(Ensemble::Laguerre { nu: 1.0 }, 4), &dual).is_err());
    }

    #[test]
    fn limit_means() {
        let h2 = spec(Ensemble::Hermite, 2);
        assert_eq!(limit_mean(&h2, None, 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(limit_mean(&h2, Some(&[0.0, 0.0]), 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(limit_mean(&h2, Some(&[-1.0, 1.0]), 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(limit_mean(&h2, Some(&[0.0, 2.0]), 4.0).unwrap(), vec![0.5, 0.5]);
        assert!(limit_mean(&h2, Some(&[2.0, 0.0]), 1.0).unwrap_err().is_domain());
        assert!(limit_mean(&h2, Some(&[0.0, 1.0]), 0.0).is_err());
        let l = spec(Ensemble::Laguerre { nu: 1.0 }, 2);
        assert_eq!(limit_mean(&l, Some(&[0.5, 2.0]), 3.0).unwrap(), vec![0.0, 0.0]);
        assert!(limit_mean(&l, Some(&[-0.5, 2.0]), 3.0).is_err());
        assert!(limit_mean(&spec(Ensemble::JacobiTrig { a: 1.0, b: 1.0 }, 2), Some(&[0.1, 0.2]), 1.0).is_err());
    }

    #[test]
    fn frozen_offsets() {
        let fc = freezing_covariance(&spec(Ensemble::Hermite, 2)).unwrap();
        assert_relative_eq!(fc.frozen_offset[1], 1.0, max_relative = 1e-14);
        assert_relative_eq!(fc.frozen_offset_at(2.0)[1], 2.0_f64.sqrt(), max_relative = 1e-14);
        let tj = freezing_covariance(&spec(Ensemble::JacobiTrig { a: 1.0, b: 1.0 }, 4)).unwrap();
        assert!(tj.frozen_offset.windows(2).all(|w| w[0] > w[1]));
        assert!(tj.frozen_offset.iter().all(|t| (0.0..=std::f64::consts::FRAC_PI_2).contains(t)));
    }

    #[test]
    fn ensemble_serde_roundtrip() {
        let s = spec(Ensemble::JacobiPlain { a: 1.0, b: 2.0 }, 7);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"kind\":\"jacobi_plain\""));
        let back: EnsembleSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
