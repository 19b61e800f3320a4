//! Finite dual orthogonal polynomials in the de Boor–Saff sense.
//!
//! Reversing the first `N` recurrence coefficients of a family `(P̃_n)` gives
//! a finite family `(Q̃_{k,N})_{k<N}` that is orthonormal for the discrete
//! measure `Σ w_i* δ_{z_i}` on the zeros of `P̃_N`. At each zero the two
//! eigenvectors of the Jacobi matrix coincide up to a constant:
//!
//! ```text
//! P̃_j(z_i) = c_i · Q̃_{N-1-j}(z_i),     c_i = P̃_{N-1}(z_i).
//! ```
//!
//! The table of `Q̃_k(z_i)` is built from that identity, since the forward
//! P-recurrence is the numerically stable direction. (Running the dual
//! recurrence forward at the outer zeros picks up the dominant solution.) The
//! forward dual recurrence is still available as [`eval_dual`] for checking.
//!
//! In the recurrence convention the identity holds as written. With classical
//! Laguerre signs, `L̃_j = (-1)^j P̃_j`, the connection constants carry the
//! sign `(-1)^{i-1}` instead of `(-1)^{N-i}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::orthopoly::{eval_recurrence_scaled, PolynomialFamily, RecurrenceCoefficients, ZeroSet};

/// Relative tolerance for the two routes to `c_{i,N}`.
pub const CONNECTION_TOL: f64 = 1e-9;
/// Max-norm tolerance for `TᵀT = I`.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Orthonormal dual recurrence: `a[k] = a_{N-1-k}` and `b[k-1] = b_{N-k}`.
pub fn dual_recurrence(family: PolynomialFamily, n: usize) -> Result<RecurrenceCoefficients> {
    family.validate()?;
    if n == 0 {
        return Err(Error::domain("degree N must be at least 1"));
    }
    Ok(RecurrenceCoefficients {
        a: (0..n).map(|k| family.diagonal(n - 1 - k)).collect(),
        b: (1..n).map(|k| family.off_diagonal(n - k)).collect(),
    })
}

/// Monic dual coefficients `u_{N-k}` for `k = 1..N-1`.
pub fn dual_monic_u(family: PolynomialFamily, n: usize) -> Vec<f64> {
    (1..n).map(|k| family.monic_u(n - k)).collect()
}

/// `Q̃_{0,N}(x)..Q̃_{N-1,N}(x)` by the forward dual recurrence.
///
/// Accurate in the bulk and for moderate `N`; at the outer zeros of large
/// families prefer [`DualBasis`].
pub fn eval_dual(family: PolynomialFamily, n: usize, x: f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(n);
    q.push(1.0);
    for k in 0..n.saturating_sub(1) {
        let a = family.diagonal(n - 1 - k);
        let b_next = family.off_diagonal(n - 1 - k);
        let prev = if k == 0 { 0.0 } else { family.off_diagonal(n - k) * q[k - 1] };
        q.push(((x - a) * q[k] - prev) / b_next);
    }
    q
}

/// Residual of the dual recurrence at `k = N-1` with `b_0 = 0`:
/// `x Q̃_{N-1} - a_0 Q̃_{N-1} - b_1 Q̃_{N-2}`, which vanishes at the zeros.
pub fn dual_closure_residual(family: PolynomialFamily, q: &[f64], x: f64) -> f64 {
    let n = q.len();
    let last = q[n - 1];
    let prev = if n >= 2 { family.off_diagonal(1) * q[n - 2] } else { 0.0 };
    (x - family.diagonal(0)) * last - prev
}

/// Dual basis evaluated at the zeros of `P̃_N`.
#[derive(Debug, Clone)]
pub struct DualBasis {
    pub family: PolynomialFamily,
    pub n: usize,
    /// Ordered zeros `z_1 < … < z_N` of `P̃_N`.
    pub zeros: Vec<f64>,
    /// `values[(k, i)] = Q̃_{k,N}(z_i)`; `Q̃_{0,N} = 1`.
    pub values: DMatrix<f64>,
    /// `ln |c_{i,N}|`.
    pub connection_ln_abs: Vec<f64>,
    /// Sign of `c_{i,N}` in the classical convention.
    pub connection_sign: Vec<f64>,
    pub pi_at_zeros: Vec<f64>,
    pub kappa: f64,
    /// Row `i` holds `P̃_j(z_i)` (recurrence convention), `j < N`, up to a
    /// positive per-row factor.
    pub(crate) forward: DMatrix<f64>,
}

impl DualBasis {
    /// `c_{i,N} = P̃_{N-1}(z_i)` (classical sign). Overflows to ±∞ only for
    /// very large Laguerre families.
    pub fn connection(&self, i: usize) -> f64 {
        self.connection_sign[i] * self.connection_ln_abs[i].exp()
    }

    /// Values in the unit-row normalization `Q_k = Q̃_k / √κ_N`, where the
    /// columns of `(√π(z_i) Q_k(z_i))` are orthonormal.
    pub fn unit_row_values(&self) -> DMatrix<f64> {
        &self.values / self.kappa.sqrt()
    }

    /// Forward orthonormal values `P̃_j(z_i)` in the recurrence convention,
    /// each row divided by `|P̃_{N-1}(z_i)|`. Scale-free quantities such as
    /// the covariance formulas only need this normalization.
    pub fn forward_normalized(&self) -> &DMatrix<f64> {
        &self.forward
    }
}

pub fn build_dual_basis(zs: &ZeroSet) -> Result<DualBasis> {
    let n = zs.n;
    let family = zs.family;
    let kappa = family.kappa(n);
    let mut values = DMatrix::zeros(n, n);
    let mut forward = DMatrix::zeros(n, n);
    let mut connection_ln_abs = Vec::with_capacity(n);
    let mut connection_sign = Vec::with_capacity(n);
    let mut pi_at_zeros = Vec::with_capacity(n);

    let mut worst = 0.0_f64;
    for (i, &z) in zs.zeros.iter().enumerate() {
        let ev = eval_recurrence_scaled(family, n - 1, z);
        let top = ev.values[n - 1];
        let top_abs = top.abs();
        for j in 0..n {
            forward[(i, j)] = ev.values[j] / top_abs;
            values[(n - 1 - j, i)] = ev.values[j] / top;
        }
        let pi = family.pi(z);
        pi_at_zeros.push(pi);

        // first route: c = P̃_{N-1}(z_i)
        let ln_c = top_abs.ln() + ev.ln_scale;
        let sign_c = top.signum() * family.classical_sign(n - 1);

        // second route: |c|² = π/κ Σ_j P̃_j², with the interlacing sign
        let sum_sq: f64 = ev.values.iter().map(|v| v * v).sum();
        let ln_c2 = 0.5 * ((pi / kappa).ln() + sum_sq.ln()) + ev.ln_scale;
        let one_based = i + 1;
        let expected_sign = match family {
            PolynomialFamily::Laguerre { .. } => parity_sign(one_based - 1),
            _ => parity_sign(n - one_based),
        };
        let dev = if sign_c != expected_sign {
            f64::INFINITY
        } else {
            (ln_c - ln_c2).exp_m1().abs()
        };
        worst = worst.max(dev);

        connection_ln_abs.push(ln_c);
        connection_sign.push(sign_c);
    }
    if !(worst <= CONNECTION_TOL) {
        return Err(Error::Consistency {
            check: "connection constants c_{i,N}",
            deviation: worst,
            tolerance: CONNECTION_TOL,
        });
    }
    Ok(DualBasis {
        family,
        n,
        zeros: zs.zeros.clone(),
        values,
        connection_ln_abs,
        connection_sign,
        pi_at_zeros,
        kappa,
        forward,
    })
}

/// `T[(i, j)] = √(π(z_i)/κ_N) · Q̃_{j,N}(z_i)`; the columns are the orthonormal
/// eigenvectors of the frozen inverse covariance, each with
/// `T[(N-1, j)] > 0`.
pub fn eigenvector_matrix(dual: &DualBasis, zs: &ZeroSet) -> Result<DMatrix<f64>> {
    if dual.n != zs.n || dual.family != zs.family {
        return Err(Error::domain("dual basis and zero set describe different families"));
    }
    let n = dual.n;
    let t = DMatrix::from_fn(n, n, |i, j| (dual.pi_at_zeros[i] / dual.kappa).sqrt() * dual.values[(j, i)]);
    let deviation = (t.transpose() * &t - DMatrix::identity(n, n)).amax();
    if !(deviation <= ORTHOGONALITY_TOL) {
        return Err(Error::Consistency {
            check: "orthogonality of T_N",
            deviation,
            tolerance: ORTHOGONALITY_TOL,
        });
    }
    Ok(t)
}

fn parity_sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::{eval_recurrence, zeros_and_weights};
    use approx::assert_relative_eq;

    fn families() -> Vec<PolynomialFamily> {
        vec![
            PolynomialFamily::Hermite,
            PolynomialFamily::Laguerre { alpha: 0.0 },
            PolynomialFamily::Laguerre { alpha: 1.5 },
            PolynomialFamily::Jacobi { alpha: 1.0, beta: 0.0 },
            PolynomialFamily::Jacobi { alpha: 1.5, beta: 1.0 },
            PolynomialFamily::Jacobi { alpha: 0.0, beta: 0.0 },
        ]
    }

    #[test]
    fn hermite_dual_monic_coefficients() {
        let n = 7;
        let u = dual_monic_u(PolynomialFamily::Hermite, n);
        for (k, uk) in (1..n).zip(u) {
            assert_relative_eq!(uk, (n - k) as f64 / 2.0);
        }
        let d = dual_recurrence(PolynomialFamily::Hermite, 2).unwrap();
        assert_eq!(d.b, vec![0.5_f64.sqrt()]);
    }

    #[test]
    fn laguerre_dual_coefficients() {
        let alpha = 0.8;
        let n = 6;
        let d = dual_recurrence(PolynomialFamily::Laguerre { alpha }, n).unwrap();
        for k in 0..n {
            let nk = (n - k) as f64;
            assert_relative_eq!(d.a[k], 2.0 * nk + alpha - 1.0, max_relative = 1e-15);
            if k >= 1 {
                assert_relative_eq!(d.b[k - 1], (nk * (nk + alpha)).sqrt(), max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn hermite_n1() {
        let zs = zeros_and_weights(PolynomialFamily::Hermite, 1).unwrap();
        let db = build_dual_basis(&zs).unwrap();
        assert_eq!(db.values[(0, 0)], 1.0);
        assert_eq!(db.connection(0), 1.0);
        let t = eigenvector_matrix(&db, &zs).unwrap();
        assert_eq!(t[(0, 0)], 1.0);
    }

    #[test]
    fn hermite_dual_weights_are_uniform() {
        let n = 9;
        let zs = zeros_and_weights(PolynomialFamily::Hermite, n).unwrap();
        for w in &zs.dual_christoffel {
            assert_relative_eq!(*w, 1.0 / n as f64, max_relative = 1e-12);
        }
        let db = build_dual_basis(&zs).unwrap();
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|i| db.values[(a, i)] * db.values[(b, i)] / n as f64).sum();
                assert!((s - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert_relative_eq!(db.unit_row_values()[(0, 0)], 1.0 / (n as f64).sqrt(), max_relative = 1e-15);
    }

    /// Explicit Gram–Schmidt of {1, x} against Σ (z_i / κ_N) δ_{z_i}.
    #[test]
    fn laguerre_two_point_gram_schmidt() {
        let fam = PolynomialFamily::Laguerre { alpha: 0.0 };
        let zs = zeros_and_weights(fam, 2).unwrap();
        let db = build_dual_basis(&zs).unwrap();
        let kappa = 2.0 * 2.0;
        let w: Vec<f64> = zs.zeros.iter().map(|z| z / kappa).collect();
        let mass: f64 = w.iter().sum();
        assert_relative_eq!(mass, 1.0, max_relative = 1e-14);
        let mean: f64 = zs.zeros.iter().zip(&w).map(|(z, w)| z * w).sum();
        let var: f64 = zs.zeros.iter().zip(&w).map(|(z, w)| (z - mean).powi(2) * w).sum();
        for i in 0..2 {
            assert_relative_eq!(db.values[(0, i)], 1.0);
            let q1 = (zs.zeros[i] - mean) / var.sqrt();
            assert_relative_eq!(db.values[(1, i)], q1, max_relative = 1e-13);
        }
    }

    #[test]
    fn reversal_identity_against_forward_dual_recurrence() {
        for fam in families() {
            for n in [2, 3, 5, 8] {
                let zs = zeros_and_weights(fam, n).unwrap();
                let db = build_dual_basis(&zs).unwrap();
                for (i, &z) in zs.zeros.iter().enumerate() {
                    let q = eval_dual(fam, n, z);
                    let p = eval_recurrence(fam, n - 1, z);
                    let c = p[n - 1];
                    // the forward dual recurrence loses digits at the outer zeros
                    let tol = if n <= 5 { 1e-11 } else { 1e-7 };
                    for j in 0..n {
                        assert!((p[j] - c * q[n - 1 - j]).abs() <= tol * p[j].abs().max(1e-12 * c.abs()), "{fam:?} N={n} i={i} j={j} {} {}", p[j], c * q[n - 1 - j]);
                        assert_relative_eq!(db.values[(j, i)], q[j], max_relative = tol, epsilon = 1e-12);
                    }
                    let closure = dual_closure_residual(fam, &q, z);
                    assert!(closure.abs() < tol * (1.0 + z.abs()) * q.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
                }
            }
        }
    }

    #[test]
    fn reversal_identity_against_golub_welsch_eigenvectors() {
        use crate::tridiag::{symmetric_tridiagonal_eigen, Components};
        for fam in families() {
            let n = 50;
            let zs = zeros_and_weights(fam, n).unwrap();
            let db = build_dual_basis(&zs).unwrap();
            let c = crate::orthopoly::recurrence_coefficients(fam, n).unwrap();
            let eig = symmetric_tridiagonal_eigen(&c.a, &c.b, Components::Full).unwrap();
            for i in 0..n {
                // eigenvector ∝ (P̃_0, …, P̃_{N-1}) ∝ (Q̃_{N-1}, …, Q̃_0)
                let v = eig.vectors.column(i);
                let scale = v[n - 1];
                let norm: f64 = (0..n).map(|k| db.values[(k, i)].powi(2)).sum::<f64>().sqrt();
                for j in 0..n {
                    let from_eig = v[j] / scale;
                    let from_table = db.values[(n - 1 - j, i)];
                    assert!((from_eig - from_table).abs() < 1e-9 * norm, "{fam:?} i={i} j={j}: {from_eig} {from_table}");
                }
            }
        }
    }

    #[test]
    fn dual_orthogonality_and_t_matrix() {
        for fam in families() {
            for n in [1, 3, 10, 25, 50] {
                let zs = zeros_and_weights(fam, n).unwrap();
                let db = build_dual_basis(&zs).unwrap();
                let gram = DMatrix::from_fn(n, n, |a, b| {
                    (0..n).map(|i| zs.dual_christoffel[i] * db.values[(a, i)] * db.values[(b, i)]).sum::<f64>()
                });
                assert!((gram - DMatrix::identity(n, n)).amax() < 1e-9, "{fam:?} N={n}");
                let t = eigenvector_matrix(&db, &zs).unwrap();
                assert!((&t * t.transpose() - DMatrix::identity(n, n)).amax() < 1e-9);
                for j in 0..n {
                    assert!(t[(n - 1, j)] > 0.0);
                }
            }
        }
    }

    #[test]
    fn connection_signs() {
        for fam in families() {
            let n = 8;
            let zs = zeros_and_weights(fam, n).unwrap();
            let db = build_dual_basis(&zs).unwrap();
            let p = crate::orthopoly::eval_orthonormal(fam, n - 1, zs.zeros[2]).unwrap();
            assert_relative_eq!(db.connection(2), p[n - 1], max_relative = 1e-12);
            for i in 0..n {
                let expected = match fam {
                    PolynomialFamily::Laguerre { .. } => parity_sign(i),
                    _ => parity_sign(n - 1 - i),
                };
                assert_eq!(db.connection_sign[i], expected);
            }
        }
    }

    #[test]
    fn hermite_top_zero_positivity() {
        let n = 40;
        let zs = zeros_and_weights(PolynomialFamily::Hermite, n).unwrap();
        let db = build_dual_basis(&zs).unwrap();
        for k in 0..n {
            assert!(db.values[(k, n - 1)] > 0.0);
        }
    }

    #[test]
    fn dual_zeros_inside_outer_zeros() {
        for fam in families() {
            for n in 6..=12 {
                let zs = zeros_and_weights(fam, n).unwrap();
                let (lo, hi) = (zs.zeros[0], zs.zeros[n - 1]);
                let grid = 4000;
                for k in 0..=5 {
                    let q = |x: f64| eval_dual(fam, n, x)[k];
                    assert!(q(hi) > 0.0);
                    assert_eq!(q(lo).signum(), parity_sign(k));
                    let mut changes = 0;
                    let mut last = q(lo);
                    for s in 1..=grid {
                        let x = lo + (hi - lo) * s as f64 / grid as f64;
                        let v = q(x);
                        if v.signum() != last.signum() {
                            changes += 1;
                        }
                        last = v;
                    }
                    assert_eq!(changes, k, "{fam:?} N={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn eigenvector_matrix_rejects_mismatch() {
        let a = zeros_and_weights(PolynomialFamily::Hermite, 3).unwrap();
        let b = zeros_and_weights(PolynomialFamily::Hermite, 4).unwrap();
        let db = build_dual_basis(&a).unwrap();
        assert!(eigenvector_matrix(&db, &b).is_err());
    }
}
