//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_PANELS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel |Kronrod − Gauss| estimates.
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Panel { a, b, value: k * h, error: ((k - g) * h).abs() }
}

/// `∫_a^b f` to `max(abs_tol, rel_tol·|value|)`, splitting first at the given
/// interior breakpoints.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, panels: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|p| *p > lo && *p < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(hi);

    let mut heap: BinaryHeap<Panel> = points.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if !value.is_finite() {
            return Err(Error::NonConvergence { what: "quadrature (non-finite integrand)", iterations: heap.len(), residual: error });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            // re-sum to drop the drift of the running totals
            let value: f64 = heap.iter().map(|p| p.value).sum();
            let error: f64 = heap.iter().map(|p| p.error).sum();
            return Ok(Quadrature { value: sign * value, error, panels: heap.len() });
        }
        if heap.len() >= max_panels {
            return Err(Error::NonConvergence { what: "adaptive quadrature", iterations: heap.len(), residual: error });
        }
        let worst = heap.pop().expect("non-empty panel set");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence { what: "adaptive quadrature (panel underflow)", iterations: heap.len(), residual: error });
        }
        let (left, right) = (kronrod(&f, worst.a, mid), kronrod(&f, mid, worst.b));
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    integrate_with_breaks(f, a, b, &[], abs_tol, rel_tol, DEFAULT_MAX_PANELS)
}
