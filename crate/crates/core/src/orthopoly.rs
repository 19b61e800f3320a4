//! Classical orthogonal polynomials: three-term recurrences, orthonormal
//! evaluation, and Gauss nodes/weights through the Jacobi matrix.
//!
//! Two sign conventions appear in the literature and both are used here.
//! The *recurrence* convention has positive off-diagonal coefficients
//! `b_n > 0` and therefore positive leading coefficients. The *classical*
//! convention follows the textbook polynomials `H_n`, `L_n^{(α)}`,
//! `P_n^{(α,β)}`; it agrees with the recurrence convention except for
//! Laguerre, where `L_n^{(α)}` has leading sign `(-1)^n`.
//! [`eval_orthonormal`] returns classical values. The Gauss and dual machinery
//! works in the recurrence convention ([`eval_recurrence`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tridiag::{symmetric_tridiagonal_eigen, Components};

/// Largest degree accepted by [`zeros_and_weights`].
pub const MAX_DEGREE: usize = 500;

const RESCALE_THRESHOLD: f64 = 1e150;

/// One of the three classical orthogonal polynomial families.
///
/// Hermite polynomials are orthonormalized with respect to `π^{-1/2} e^{-x²}`,
/// Laguerre with respect to the Gamma law `x^α e^{-x} / Γ(α+1)` and Jacobi with
/// respect to the normalized Beta-type weight `(1-x)^α (1+x)^β` on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolynomialFamily {
    Hermite,
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

impl PolynomialFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| p.is_finite() && p > -1.0;
        match *self {
            PolynomialFamily::Hermite => Ok(()),
            PolynomialFamily::Laguerre { alpha } if ok(alpha) => Ok(()),
            PolynomialFamily::Laguerre { alpha } => {
                Err(Error::domain(format!("Laguerre parameter alpha = {alpha} must exceed -1")))
            }
            PolynomialFamily::Jacobi { alpha, beta } if ok(alpha) && ok(beta) => Ok(()),
            PolynomialFamily::Jacobi { alpha, beta } => Err(Error::domain(format!(
                "Jacobi parameters (alpha, beta) = ({alpha}, {beta}) must both exceed -1"
            ))),
        }
    }

    /// Diagonal recurrence coefficient `a_n`.
    pub fn diagonal(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            PolynomialFamily::Hermite => 0.0,
            PolynomialFamily::Laguerre { alpha } => 2.0 * nf + alpha + 1.0,
            PolynomialFamily::Jacobi { alpha, beta } => {
                let s = alpha + beta;
                if n == 0 {
                    (beta - alpha) / (s + 2.0)
                } else {
                    (beta * beta - alpha * alpha) / ((2.0 * nf + s) * (2.0 * nf + s + 2.0))
                }
            }
        }
    }

    /// Monic recurrence coefficient `u_n` (`n ≥ 1`), so that
    /// `x P̂_n = P̂_{n+1} + a_n P̂_n + u_n P̂_{n-1}`.
    pub fn monic_u(&self, n: usize) -> f64 {
        assert!(n >= 1, "u_n is defined for n >= 1");
        let nf = n as f64;
        match *self {
            PolynomialFamily::Hermite => nf / 2.0,
            PolynomialFamily::Laguerre { alpha } => nf * (nf + alpha),
            PolynomialFamily::Jacobi { alpha, beta } => {
                let s = alpha + beta;
                if n == 1 {
                    // the (n + s) factor cancels against (2n + s - 1) when s = -1
                    4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s).powi(2) * (3.0 + s))
                } else {
                    let t = 2.0 * nf + s;
                    4.0 * nf * (nf + alpha) * (nf + beta) * (nf + s)
                        / (t * t * (t + 1.0) * (t - 1.0))
                }
            }
        }
    }

    /// Orthonormal off-diagonal coefficient `b_n = √u_n` (`n ≥ 1`).
    pub fn off_diagonal(&self, n: usize) -> f64 {
        self.monic_u(n).sqrt()
    }

    /// Sign relating the classical orthonormal polynomial of degree `n` to the
    /// recurrence-convention one.
    pub fn classical_sign(&self, n: usize) -> f64 {
        match self {
            PolynomialFamily::Laguerre { .. } if n % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }

    /// The polynomial `π(x)` in the closed form `w_i* = π(z_i) / κ_N` of the
    /// dual Christoffel numbers.
    pub fn pi(&self, x: f64) -> f64 {
        match self {
            PolynomialFamily::Hermite => 1.0,
            PolynomialFamily::Laguerre { .. } => x,
            PolynomialFamily::Jacobi { .. } => 1.0 - x * x,
        }
    }

    /// The constant `κ_N` in `w_i* = π(z_i) / κ_N`.
    pub fn kappa(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            PolynomialFamily::Hermite => nf,
            PolynomialFamily::Laguerre { alpha } => nf * (nf + alpha),
            PolynomialFamily::Jacobi { alpha, beta } => {
                let t = 2.0 * nf + alpha + beta;
                if n == 1 {
                    // (N + α + β) / (2N + α + β − 1) = 1, also when α + β = −1
                    return 4.0 * (1.0 + alpha) * (1.0 + beta) / (t * t);
                }
                4.0 * nf * (nf + alpha) * (nf + beta) * (nf + alpha + beta) / (t * t * (t - 1.0))
            }
        }
    }
}

/// Orthonormal recurrence coefficients `a_0..a_{n-1}` and `b_1..b_{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoefficients {
    pub a: Vec<f64>,
    /// `b[k]` holds `b_{k+1}`.
    pub b: Vec<f64>,
}

impl RecurrenceCoefficients {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

pub fn recurrence_coefficients(family: PolynomialFamily, n: usize) -> Result<RecurrenceCoefficients> {
    family.validate()?;
    if n == 0 {
        return Err(Error::domain("need at least one recurrence coefficient"));
    }
    Ok(RecurrenceCoefficients {
        a: (0..n).map(|k| family.diagonal(k)).collect(),
        b: (1..n).map(|k| family.off_diagonal(k)).collect(),
    })
}

/// Values and derivatives of `P̃_0..P̃_{n_max}` at one point, in the recurrence
/// convention, stored as `value[k] · e^{ln_scale}`.
///
/// Far outside the orthogonality interval the polynomials grow geometrically;
/// the common factor keeps every entry representable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledEvaluation {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub ln_scale: f64,
}

impl ScaledEvaluation {
    /// Unscaled value of degree `k` (may overflow to infinity).
    pub fn value(&self, k: usize) -> f64 {
        self.values[k] * self.ln_scale.exp()
    }

    pub fn derivative(&self, k: usize) -> f64 {
        self.derivatives[k] * self.ln_scale.exp()
    }
}

/// Forward three-term recurrence with simultaneous derivative recurrence,
/// rescaled to avoid overflow.
pub fn eval_recurrence_scaled(family: PolynomialFamily, n_max: usize, x: f64) -> ScaledEvaluation {
    let mut values = Vec::with_capacity(n_max + 1);
    let mut derivatives = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    derivatives.push(0.0);
    let mut ln_scale = 0.0;
    for n in 0..n_max {
        let a = family.diagonal(n);
        let b_next = family.off_diagonal(n + 1);
        let (p_prev, d_prev, b_n) = if n == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (values[n - 1], derivatives[n - 1], family.off_diagonal(n))
        };
        let p = ((x - a) * values[n] - b_n * p_prev) / b_next;
        let d = ((x - a) * derivatives[n] + values[n] - b_n * d_prev) / b_next;
        values.push(p);
        derivatives.push(d);
        if p.abs() > RESCALE_THRESHOLD || d.abs() > RESCALE_THRESHOLD {
            let f = 1.0 / RESCALE_THRESHOLD;
            values.iter_mut().for_each(|v| *v *= f);
            derivatives.iter_mut().for_each(|v| *v *= f);
            ln_scale += RESCALE_THRESHOLD.ln();
        }
    }
    ScaledEvaluation {
        values,
        derivatives,
        ln_scale,
    }
}

/// `P̃_0(x)..P̃_{n_max}(x)` in the recurrence (positive leading coefficient)
/// convention.
pub fn eval_recurrence(family: PolynomialFamily, n_max: usize, x: f64) -> Vec<f64> {
    let ev = eval_recurrence_scaled(family, n_max, x);
    let s = ev.ln_scale.exp();
    ev.values.into_iter().map(|v| v * s).collect()
}

/// `P̃_0(x)..P̃_{n_max}(x)` for the classical orthonormal polynomials
/// (`H̃_n`, `L̃_n^{(α)}`, `P̃_n^{(α,β)}`).
pub fn eval_orthonormal(family: PolynomialFamily, n_max: usize, x: f64) -> Result<Vec<f64>> {
    family.validate()?;
    let mut v = eval_recurrence(family, n_max, x);
    for (k, p) in v.iter_mut().enumerate() {
        *p *= family.classical_sign(k);
    }
    Ok(v)
}

/// Derivative of the classical orthonormal polynomial of degree `n` at `x`.
pub fn eval_orthonormal_derivative(family: PolynomialFamily, n: usize, x: f64) -> Result<f64> {
    family.validate()?;
    let ev = eval_recurrence_scaled(family, n, x);
    Ok(family.classical_sign(n) * ev.derivative(n))
}

/// Zeros of the degree-`N` orthonormal polynomial with Christoffel and dual
/// Christoffel numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub family: PolynomialFamily,
    pub n: usize,
    /// `z_{1,N} < … < z_{N,N}`.
    pub zeros: Vec<f64>,
    /// `w_i = 1 / (b_N P̃_{N-1}(z_i) P̃'_N(z_i))`.
    pub christoffel: Vec<f64>,
    /// Squared first eigenvector components of the Jacobi matrix.
    pub christoffel_gw: Vec<f64>,
    /// `w_i* = P̃_{N-1}(z_i) / (b_N P̃'_N(z_i))`.
    pub dual_christoffel: Vec<f64>,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Closed form `π(z_i) / κ_N` of the dual Christoffel numbers.
    pub fn dual_christoffel_closed_form(&self) -> Vec<f64> {
        let kappa = self.family.kappa(self.n);
        self.zeros.iter().map(|&z| self.family.pi(z) / kappa).collect()
    }

    /// `|P̃_N(z_i)|` relative to the largest `|P̃_k(z_i)|`, `k ≤ N`.
    pub fn polynomial_residual(&self, i: usize) -> f64 {
        let ev = eval_recurrence_scaled(self.family, self.n, self.zeros[i]);
        let scale = ev.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        ev.values[self.n].abs() / scale
    }
}

/// Gauss nodes and weights via Golub–Welsch, refined by one Newton step on
/// `P̃_N`.
pub fn zeros_and_weights(family: PolynomialFamily, n: usize) -> Result<ZeroSet> {
    family.validate()?;
    if n == 0 {
        return Err(Error::domain("degree N must be at least 1"));
    }
    if n > MAX_DEGREE {
        return Err(Error::domain(format!("degree N = {n} exceeds the supported maximum {MAX_DEGREE}")));
    }
    let coeffs = recurrence_coefficients(family, n)?;
    let eig = symmetric_tridiagonal_eigen(&coeffs.a, &coeffs.b, Components::FirstRow)?;

    let mut zeros = eig.values;
    let christoffel_gw: Vec<f64> = (0..n).map(|j| eig.vectors[(0, j)].powi(2)).collect();

    for i in 0..n {
        let gap = neighbour_gap(&zeros, i);
        let ev = eval_recurrence_scaled(family, n, zeros[i]);
        let step = ev.values[n] / ev.derivatives[n];
        if step.is_finite() && step.abs() < 1e-6 * gap {
            zeros[i] -= step;
        }
    }
    for w in zeros.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Consistency {
                check: "strictly increasing zeros",
                deviation: w[0] - w[1],
                tolerance: 0.0,
            });
        }
    }

    let b_n = family.off_diagonal(n);
    let mut christoffel = Vec::with_capacity(n);
    let mut dual_christoffel = Vec::with_capacity(n);
    for &z in &zeros {
        let ev = eval_recurrence_scaled(family, n, z);
        let prev = ev.values[n - 1];
        let deriv = ev.derivatives[n];
        christoffel.push((-2.0 * ev.ln_scale).exp() / (b_n * prev * deriv));
        dual_christoffel.push(prev / (b_n * deriv));
    }

    let zs = ZeroSet {
        family,
        n,
        zeros,
        christoffel,
        christoffel_gw,
        dual_christoffel,
    };
    let closed = zs.dual_christoffel_closed_form();
    let deviation = zs
        .dual_christoffel
        .iter()
        .zip(&closed)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    const DUAL_TOL: f64 = 1e-8;
    if !(deviation <= DUAL_TOL) {
        return Err(Error::Consistency {
            check: "dual Christoffel numbers vs pi/kappa",
            deviation,
            tolerance: DUAL_TOL,
        });
    }
    Ok(zs)
}

fn neighbour_gap(zeros: &[f64], i: usize) -> f64 {
    let left = if i > 0 { zeros[i] - zeros[i - 1] } else { f64::INFINITY };
    let right = if i + 1 < zeros.len() { zeros[i + 1] - zeros[i] } else { f64::INFINITY };
    let g = left.min(right);
    if g.is_finite() {
        g
    } else {
        1.0 + zeros[i].abs()
    }
}
