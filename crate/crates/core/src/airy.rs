//! The Airy function `Ai` on the real line and its zeros.
//!
//! Three regions:
//!
//! * `|x| <= series_cutoff`: Maclaurin series from `Ai(0)`, `Ai'(0)`.
//! * `|x| >= asymptotic_cutoff`: exponential (x > 0) or oscillatory
//!   (x < 0) asymptotic expansions.
//! * in between: Taylor re-expansion of `y'' = x y` around a table of
//!   anchors. On the negative side the anchors are stepped out from `0`; on
//!   the positive side they are stepped back from the asymptotic value at
//!   `asymptotic_cutoff`, the direction in which `Ai` is dominant.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::RwLock;

use crate::error::{Error, Result};

/// `Ai(0) = 1 / (3^{2/3} Γ(2/3))`.
pub const AI_0: f64 = 0.355_028_053_887_817_24;
/// `Ai'(0) = −1 / (3^{1/3} Γ(1/3))`.
pub const AI_PRIME_0: f64 = -0.258_819_403_792_806_8;

pub const DEFAULT_SERIES_CUTOFF: f64 = 2.0;
pub const DEFAULT_ASYMPTOTIC_CUTOFF: f64 = 9.0;
pub const DEFAULT_ASYMPTOTIC_TERMS: usize = 30;
/// Anchor spacing of the intermediate table.
pub const ANCHOR_STEP: f64 = 0.25;
pub const ZERO_MAX_ITERATIONS: usize = 100;
pub const ZERO_TOL: f64 = 1e-13;

/// `Ai`, `Ai'` and `Ai''` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
    pub ai_second: f64,
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiryBranch {
    Series,
    Anchored,
    Asymptotic,
}

#[derive(Debug)]
pub struct AiryEvaluator {
    series_cutoff: f64,
    asymptotic_cutoff: f64,
    asymptotic_terms: usize,
    // (x0, Ai(x0), Ai'(x0)) at multiples of ANCHOR_STEP, ascending
    anchors: Vec<(f64, f64, f64)>,
    zero_cache: RwLock<BTreeMap<usize, f64>>,
}

impl Default for AiryEvaluator {
    fn default() -> Self {
        Self::new(DEFAULT_SERIES_CUTOFF, DEFAULT_ASYMPTOTIC_CUTOFF, DEFAULT_ASYMPTOTIC_TERMS)
            .expect("default Airy configuration is valid")
    }
}

impl Clone for AiryEvaluator {
    fn clone(&self) -> Self {
        AiryEvaluator {
            series_cutoff: self.series_cutoff,
            asymptotic_cutoff: self.asymptotic_cutoff,
            asymptotic_terms: self.asymptotic_terms,
            anchors: self.anchors.clone(),
            zero_cache: RwLock::new(self.zero_cache.read().map(|c| c.clone()).unwrap_or_default()),
        }
    }
}

impl AiryEvaluator {
    pub fn new(series_cutoff: f64, asymptotic_cutoff: f64, asymptotic_terms: usize) -> Result<Self> {
        if !(series_cutoff > 0.0 && series_cutoff <= 4.0) {
            return Err(Error::domain(format!("series cutoff {series_cutoff} outside (0, 4]")));
        }
        if !(asymptotic_cutoff >= 6.0 && asymptotic_cutoff <= 30.0) {
            return Err(Error::domain(format!("asymptotic cutoff {asymptotic_cutoff} outside [6, 30]")));
        }
        if asymptotic_terms < 4 {
            return Err(Error::domain("need at least 4 asymptotic terms"));
        }
        let mut ev = AiryEvaluator {
            series_cutoff,
            asymptotic_cutoff,
            asymptotic_terms,
            anchors: Vec::new(),
            zero_cache: RwLock::new(BTreeMap::new()),
        };
        ev.anchors = ev.build_anchors();
        Ok(ev)
    }

    pub fn series_cutoff(&self) -> f64 {
        self.series_cutoff
    }

    pub fn asymptotic_cutoff(&self) -> f64 {
        self.asymptotic_cutoff
    }

    fn build_anchors(&self) -> Vec<(f64, f64, f64)> {
        let steps = (self.asymptotic_cutoff / ANCHOR_STEP).ceil() as usize;
        let mut neg = Vec::with_capacity(steps + 1);
        let (mut a, mut ap) = (AI_0, AI_PRIME_0);
        neg.push((0.0, a, ap));
        for s in 1..=steps {
            let x0 = -((s - 1) as f64) * ANCHOR_STEP;
            let v = ode_taylor(x0, a, ap, -ANCHOR_STEP);
            a = v.ai;
            ap = v.ai_prime;
            neg.push((-(s as f64) * ANCHOR_STEP, a, ap));
        }
        let top = steps as f64 * ANCHOR_STEP;
        let start = asymptotic_positive(top, self.asymptotic_terms);
        let mut pos = Vec::with_capacity(steps + 1);
        let (mut a, mut ap) = (start.ai, start.ai_prime);
        pos.push((top, a, ap));
        for s in (0..steps).rev() {
            let x0 = (s + 1) as f64 * ANCHOR_STEP;
            let v = ode_taylor(x0, a, ap, -ANCHOR_STEP);
            a = v.ai;
            ap = v.ai_prime;
            pos.push((s as f64 * ANCHOR_STEP, a, ap));
        }
        // pos ends at x = 0 (back-propagated); keep the exact constants there
        pos.pop();
        let mut anchors: Vec<_> = neg.into_iter().rev().collect();
        anchors.extend(pos.into_iter().rev());
        anchors
    }

    /// `Ai(0)` as reached by stepping back from the positive asymptotic
    /// region; agrees with [`AI_0`] when the table is sound.
    pub fn back_propagated_origin(&self) -> (f64, f64) {
        let (x0, a, ap) = self.anchors[self.anchor_index(ANCHOR_STEP)];
        let v = ode_taylor(x0, a, ap, -x0);
        (v.ai, v.ai_prime)
    }

    fn anchor_index(&self, x: f64) -> usize {
        let i0 = self.anchors.len() / 2; // anchor at x = 0
        let k = (x / ANCHOR_STEP).round() as isize;
        (i0 as isize + k).clamp(0, self.anchors.len() as isize - 1) as usize
    }

    /// Branch used by [`AiryEvaluator::eval`] at `x`.
    pub fn branch(&self, x: f64) -> AiryBranch {
        if x.abs() <= self.series_cutoff {
            AiryBranch::Series
        } else if x.abs() >= self.asymptotic_cutoff {
            AiryBranch::Asymptotic
        } else {
            AiryBranch::Anchored
        }
    }

    /// Evaluates `x` on a specific branch, for overlap checks. `None` when
    /// the branch cannot represent `x` (anchors outside the table).
    pub fn eval_branch(&self, x: f64, branch: AiryBranch) -> Option<AiryValue> {
        if !x.is_finite() {
            return None;
        }
        match branch {
            AiryBranch::Series => Some(ode_taylor(0.0, AI_0, AI_PRIME_0, x)),
            AiryBranch::Anchored => {
                let (lo, hi) = (self.anchors[0].0, self.anchors[self.anchors.len() - 1].0);
                if x < lo - ANCHOR_STEP || x > hi + ANCHOR_STEP {
                    return None;
                }
                let (x0, a, ap) = self.anchors[self.anchor_index(x)];
                Some(ode_taylor(x0, a, ap, x - x0))
            }
            AiryBranch::Asymptotic => {
                if x > 0.0 {
                    Some(asymptotic_positive(x, self.asymptotic_terms))
                } else if x < 0.0 {
                    Some(asymptotic_negative(-x, self.asymptotic_terms))
                } else {
                    None
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> AiryValue {
        if x.is_nan() {
            return AiryValue { ai: f64::NAN, ai_prime: f64::NAN, ai_second: f64::NAN };
        }
        if x == f64::INFINITY {
            return AiryValue { ai: 0.0, ai_prime: 0.0, ai_second: 0.0 };
        }
        if x > 0.0 && 2.0 / 3.0 * x.powf(1.5) > 745.0 {
            return AiryValue { ai: 0.0, ai_prime: 0.0, ai_second: 0.0 };
        }
        self.eval_branch(x, self.branch(x)).unwrap_or(AiryValue { ai: f64::NAN, ai_prime: f64::NAN, ai_second: f64::NAN })
    }

    pub fn ai(&self, x: f64) -> f64 {
        self.eval(x).ai
    }

    pub fn ai_prime(&self, x: f64) -> f64 {
        self.eval(x).ai_prime
    }

    /// `Ai''` from the branch's own representation (not from `x·Ai`).
    pub fn ai_second(&self, x: f64) -> f64 {
        self.eval(x).ai_second
    }

    /// The `r`-th zero `a_r` (1-based), `0 > a_1 > a_2 > …`.
    pub fn airy_zero(&self, r: usize) -> Result<f64> {
        if r == 0 {
            return Err(Error::domain("Airy zeros are indexed from r = 1"));
        }
        if let Some(z) = self.zero_cache.read().ok().and_then(|c| c.get(&r).copied()) {
            return Ok(z);
        }
        let z = self.newton_zero(r)?;
        if let Ok(mut c) = self.zero_cache.write() {
            c.insert(r, z);
        }
        Ok(z)
    }

    /// `a_1..a_count`.
    pub fn airy_zeros(&self, count: usize) -> Result<Vec<f64>> {
        (1..=count).map(|r| self.airy_zero(r)).collect()
    }

    fn newton_zero(&self, r: usize) -> Result<f64> {
        let mut x = zero_seed(r);
        let mut residual = f64::INFINITY;
        for _ in 0..ZERO_MAX_ITERATIONS {
            let v = self.eval(x);
            residual = v.ai.abs();
            let delta = 1e-12 * x.abs().max(1.0);
            if residual <= ZERO_TOL && self.ai(x - delta) * self.ai(x + delta) < 0.0 {
                return Ok(x);
            }
            x -= v.ai / v.ai_prime;
        }
        Err(Error::NonConvergence { what: "Airy zero", iterations: ZERO_MAX_ITERATIONS, residual })
    }
}

/// `−(3π/2 (r − 1/4))^{2/3}`.
pub fn zero_seed(r: usize) -> f64 {
    -(1.5 * PI * (r as f64 - 0.25)).powf(2.0 / 3.0)
}

/// Leading-order `Ai'(a_r) ≈ (−1)^{r−1} (3π/2 (r − 1/4))^{1/6} / √π`.
pub fn zero_derivative_asymptotic(r: usize) -> f64 {
    let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
    sign * (1.5 * PI * (r as f64 - 0.25)).powf(1.0 / 6.0) / PI.sqrt()
}

/// Taylor expansion at `x0 + h` of the solution of `y'' = x y` with
/// `y(x0) = a`, `y'(x0) = ap`. Accurate for `|h|` up to about 2 when
/// `|x0| <= 10`.
pub fn ode_taylor(x0: f64, a: f64, ap: f64, h: f64) -> AiryValue {
    // c_{n+2} = (x0 c_n + c_{n-1}) / ((n+2)(n+1))
    let mut c = [a, ap, 0.5 * x0 * a];
    let (mut y, mut yp, mut ypp) = (a, ap, 2.0 * c[2]);
    let mut hp = 1.0; // h^{n-2} while accumulating term n
    y += c[1] * h;
    y += c[2] * h * h;
    yp += 2.0 * c[2] * h;
    let scale = a.abs() + ap.abs() * (1.0 + h.abs());
    let mut small = 0;
    for n in 3..200usize {
        let cn = (x0 * c[1] + c[0]) / ((n * (n - 1)) as f64);
        c = [c[1], c[2], cn];
        hp *= h; // h^{n-2}
        let t2 = (n * (n - 1)) as f64 * cn * hp;
        let t1 = n as f64 * cn * hp * h;
        let t0 = cn * hp * h * h;
        y += t0;
        yp += t1;
        ypp += t2;
        if t0.abs().max(t1.abs()).max(t2.abs()) <= 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    AiryValue { ai: y, ai_prime: yp, ai_second: ypp }
}

// u_k and v_k of the standard asymptotic expansions.
fn uv_coefficients(terms: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..terms {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

// Σ_k s_k c_k ζ^{-k} and its ζ-derivative, truncated at the smallest term.
// `select(k)` returns the signed coefficient or None to skip k.
fn asymptotic_sum(zeta: f64, terms: usize, coeff: impl Fn(usize) -> Option<f64>) -> (f64, f64) {
    let (mut s, mut ds) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..terms {
        let Some(c) = coeff(k) else { continue };
        let t = c * zeta.powi(-(k as i32));
        if t.abs() > last {
            break;
        }
        last = t.abs();
        s += t;
        ds -= k as f64 * t / zeta;
        if t.abs() < 1e-17 * s.abs() {
            break;
        }
    }
    (s, ds)
}

fn asymptotic_positive(x: f64, terms: usize) -> AiryValue {
    let (u, v) = uv_coefficients(terms);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let sgn = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let (su, _) = asymptotic_sum(zeta, terms, |k| Some(sgn(k) * u[k]));
    let (sv, dsv) = asymptotic_sum(zeta, terms, |k| Some(sgn(k) * v[k]));
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    let ai = e / q * su;
    let ai_prime = -e * q * sv;
    // d/dx of −e(ζ) x^{1/4} V(ζ), dζ/dx = √x
    let sx = x.sqrt();
    let ai_second = -e * (0.25 / (q * q * q) * sv - q * sx * sv + q * sx * dsv);
    AiryValue { ai, ai_prime, ai_second }
}

fn asymptotic_negative(z: f64, terms: usize) -> AiryValue {
    let (u, v) = uv_coefficients(terms);
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let even = |c: &Vec<f64>, k: usize| if k % 2 == 0 { Some(if (k / 2) % 2 == 0 { c[k] } else { -c[k] }) } else { None };
    let odd = |c: &Vec<f64>, k: usize| if k % 2 == 1 { Some(if (k / 2) % 2 == 0 { c[k] } else { -c[k] }) } else { None };
    let (p, _) = asymptotic_sum(zeta, terms, |k| even(&u, k));
    let (qq, _) = asymptotic_sum(zeta, terms, |k| odd(&u, k));
    let (r, dr) = asymptotic_sum(zeta, terms, |k| even(&v, k));
    let (s, ds) = asymptotic_sum(zeta, terms, |k| odd(&v, k));
    let theta = zeta - FRAC_PI_4;
    let (sin, cos) = theta.sin_cos();
    let sp = PI.sqrt();
    let q = z.powf(0.25);
    let ai = (cos * p + sin * qq) / (sp * q);
    let f = sin * r - cos * s;
    let ai_prime = q / sp * f;
    // Ai''(−z) = −d/dz [z^{1/4}/√π · F(ζ)], dζ/dz = √z
    let sz = z.sqrt();
    let df = cos * r + sin * s + sin * dr - cos * ds;
    let ai_second = -(0.25 / (q * q * q) / sp * f + q / sp * sz * df);
    AiryValue { ai, ai_prime, ai_second }
}
