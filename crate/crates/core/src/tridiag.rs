//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shifts).
//!
//! This is the engine behind Golub–Welsch: the zeros of an orthonormal
//! polynomial family are the eigenvalues of its Jacobi matrix, and the squared
//! first components of the normalized eigenvectors are the Gauss weights.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-eigenvalue sweep limit before giving up.
pub const MAX_SWEEPS: usize = 60;

/// Which eigenvector components to accumulate during the QL sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Components {
    /// Eigenvalues only.
    None,
    /// Only the first component of every eigenvector (Golub–Welsch weights).
    FirstRow,
    /// Complete eigenvectors.
    Full,
}

#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `j` holds the tracked components of the unit eigenvector for
    /// `values[j]`. Has 0, 1 or `n` rows depending on [`Components`].
    pub vectors: DMatrix<f64>,
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal (length `n`) and off-diagonal (length `n - 1`).
pub fn symmetric_tridiagonal_eigen(
    diagonal: &[f64],
    off_diagonal: &[f64],
    components: Components,
) -> Result<TridiagonalEigen> {
    let n = diagonal.len();
    if n == 0 {
        return Err(Error::domain("empty tridiagonal matrix"));
    }
    if off_diagonal.len() + 1 != n {
        return Err(Error::domain(format!(
            "off-diagonal has length {}, expected {}",
            off_diagonal.len(),
            n - 1
        )));
    }

    let mut d = diagonal.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off_diagonal);

    let rows = match components {
        Components::None => 0,
        Components::FirstRow => 1,
        Components::Full => n,
    };
    // row-major copy of the tracked rows of the accumulated rotation
    let mut z = vec![0.0; rows * n];
    for r in 0..rows {
        z[r * n + r] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NonConvergence {
                    what: "tridiagonal QL",
                    iterations: sweeps - 1,
                    residual: e[l].abs(),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.chunks_exact_mut(n) {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DMatrix::from_fn(rows, n, |r, j| z[r * n + order[j]]);
    Ok(TridiagonalEigen { values, vectors })
}
