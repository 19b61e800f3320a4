//! Frozen β-ensembles: zeros of classical orthogonal polynomials, the dual
//! basis that diagonalizes the frozen inverse covariance, the Gaussian
//! covariance `Σ_N`, Airy soft-edge limits and Metropolis checks.
//!
//! Module order follows the data flow: [`orthopoly`] → [`dualbasis`] →
//! [`freezecov`] → [`softedge`] (with [`airy`] and [`quadrature`]) and
//! [`ensemblesim`]. The guide in `book/` is compiled into doctests.

pub mod airy;
pub mod dualbasis;
pub mod ensemblesim;
pub mod error;
pub mod freezecov;
pub mod orthopoly;
pub mod quadrature;
pub mod softedge;
pub mod tridiag;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/zeros.md")]
    mod zeros {}
    #[doc = include_str!("../../../book/src/dual-basis.md")]
    mod dual_basis {}
    #[doc = include_str!("../../../book/src/covariance.md")]
    mod covariance {}
    #[doc = include_str!("../../../book/src/airy.md")]
    mod airy {}
    #[doc = include_str!("../../../book/src/soft-edge.md")]
    mod soft_edge {}
    #[doc = include_str!("../../../book/src/monte-carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
