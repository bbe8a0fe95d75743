//! Scalar kernels shared by the closed-form spectra and the counting code.
//!
//! The central object is the profile function
//!
//! ```text
//! t(s) = 2s (sinh s cosh s - s) / (sinh^2 s - s^2),   s > 0,
//! ```
//!
//! which turns a base frequency `s = eta * l_n` into the Steklov eigenvalue
//! `t(s) / (rho * l_n)` on a rectangular cylinder. It behaves like `4 + 4s^2/15`
//! at the origin and like `2s` at infinity, and the naive formula breaks down
//! at both ends (cancellation near zero, overflow of `sinh^2` beyond ~355), so
//! it is evaluated on three branches.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Below this argument `t` is evaluated from the Taylor series of its
/// numerator and denominator.
pub const S_TAYLOR: f64 = 0.5;

/// At and above this argument `t` is evaluated in the `exp(-2s)`-scaled form.
pub const S_SWITCH: f64 = 20.0;

const NEWTON_RTOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 60;
const SERIES_TERMS: usize = 8;

/// Which formula produced a value of `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Taylor series, `s < S_TAYLOR`.
    Series,
    /// `sinh`/`cosh` evaluated directly.
    Direct,
    /// Exponentially scaled form, `s >= S_SWITCH`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub s: f64,
    pub value: f64,
    pub branch: Branch,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// `sum_{k<8} x^k / (2k+3)!` and `sum_{k<8} x^k / (2k+4)!`.
///
/// With `u = 2s`, `u * (sinh s cosh s - s) = (u^4/2) P(u^2)` and
/// `sinh^2 s - s^2 = (u^4/2) Q(u^2)`.
fn series_pq(x: f64) -> (f64, f64) {
    let mut p_coef = [0.0; SERIES_TERMS];
    let mut q_coef = [0.0; SERIES_TERMS];
    p_coef[0] = 1.0 / 6.0;
    q_coef[0] = 1.0 / 24.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        p_coef[k] = p_coef[k - 1] / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        q_coef[k] = q_coef[k - 1] / ((2.0 * kf + 3.0) * (2.0 * kf + 4.0));
    }
    let p = p_coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let q = q_coef.iter().rev().fold(0.0, |acc, c| acc * x + c);
    (p, q)
}

pub(crate) fn t_series(s: f64) -> f64 {
    let (p, q) = series_pq(4.0 * s * s);
    p / q
}

/// Direct evaluation of the defining formula. Exposed for branch-continuity
/// checks; use [`t_profile`] otherwise.
pub fn t_direct(s: f64) -> f64 {
    let (sh, ch) = (s.sinh(), s.cosh());
    2.0 * s * (sh * ch - s) / (sh * sh - s * s)
}

/// `t` rewritten with `E = exp(-2s)`:
/// `2s (1 - 4sE - E^2) / (1 - (4s^2 + 2)E + E^2)`. Exact, not truncated.
pub fn t_asymptotic(s: f64) -> f64 {
    let e = (-2.0 * s).exp();
    2.0 * s * (1.0 - 4.0 * s * e - e * e) / (1.0 - (4.0 * s * s + 2.0) * e + e * e)
}

pub fn t_profile_eval(s: f64) -> Result<ProfileEval> {
    check_positive("s", s)?;
    let (value, branch) = if s < S_TAYLOR {
        (t_series(s), Branch::Series)
    } else if s < S_SWITCH {
        (t_direct(s), Branch::Direct)
    } else {
        (t_asymptotic(s), Branch::Asymptotic)
    };
    Ok(ProfileEval { s, value, branch })
}

/// The profile function `t(s)`.
pub fn t_profile(s: f64) -> Result<f64> {
    t_profile_eval(s).map(|e| e.value)
}

/// Branch-free `t` for arguments already known to be valid.
pub(crate) fn t_unchecked(s: f64) -> f64 {
    if s < S_TAYLOR {
        t_series(s)
    } else if s < S_SWITCH {
        t_direct(s)
    } else {
        t_asymptotic(s)
    }
}

/// `1 / sinh(x)` without overflow, `x > 0`.
fn inv_sinh(x: f64) -> f64 {
    2.0 * (-x).exp() / -(-2.0 * x).exp_m1()
}

/// `sinh(p) / sinh(q)` for `0 <= p <= q`, `q > 0`, without overflow.
fn sinh_ratio(p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return 0.0;
    }
    (p - q).exp() * (-2.0 * p).exp_m1() / (-2.0 * q).exp_m1()
}

/// Derivative `t'(s)` on `s >= 1`, where it is known to be positive.
///
/// Writing `q = 1/sinh^2 s`, `c = coth s`, `n = c - s q`, `d = 1 - s^2 q`:
/// `t'(s) = 2 [n d + 2 s q (2 s c - 1 - s^2 - s^2 q)] / d^2`,
/// which never forms `sinh^4 s`.
pub fn t_profile_derivative(s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::domain(format!(
            "t'(s) is only provided on s >= 1, got {s}"
        )));
    }
    Ok(t_derivative_unchecked(s))
}

fn t_derivative_unchecked(s: f64) -> f64 {
    let r = inv_sinh(s);
    let q = r * r;
    let c = 1.0 / s.tanh();
    let n = c - s * q;
    let d = 1.0 - s * s * q;
    2.0 * (n * d + 2.0 * s * q * (2.0 * s * c - 1.0 - s * s - s * s * q)) / (d * d)
}

/// Inverse `h = t^{-1}` on the monotone branch `s >= 1`.
///
/// Safeguarded Newton from `max(1, t/2)` inside the bracket `[1, t]`,
/// falling back to bisection if Newton has not met the residual tolerance.
pub fn h_inverse(t: f64) -> Result<f64> {
    let t_min = t_unchecked(1.0);
    // `t_min` itself carries a few ulps of rounding; values inside that
    // slack map to the endpoint.
    if !(t.is_finite() && t >= t_min * (1.0 - 8.0 * f64::EPSILON)) {
        return Err(Error::domain(format!(
            "h(t) is defined for t >= t(1) = {t_min}, got {t}"
        )));
    }
    if t <= t_min {
        return Ok(1.0);
    }

    let (mut lo, mut hi) = (1.0_f64, t);
    let mut s = (t / 2.0).max(1.0);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let r = t_unchecked(s) - t;
        if r == 0.0 {
            converged = true;
            break;
        }
        if r > 0.0 {
            hi = hi.min(s);
        } else {
            lo = lo.max(s);
        }
        let step = r / t_derivative_unchecked(s);
        let mut next = s - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - s).abs();
        s = next;
        if moved <= 4.0 * f64::EPSILON * s && (t_unchecked(s) - t).abs() <= NEWTON_RTOL * t {
            converged = true;
            break;
        }
    }
    if converged {
        return Ok(s);
    }

    let width = |x: f64| (1e-14_f64).max(4.0 * f64::EPSILON * x);
    while hi - lo > width(hi) {
        let mid = 0.5 * (lo + hi);
        if t_unchecked(mid) > t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    if (t_unchecked(s) - t).abs() > NEWTON_RTOL * t {
        return Err(Error::Numerical(format!(
            "h({t}) did not reach relative residual {NEWTON_RTOL}"
        )));
    }
    Ok(s)
}

/// Name of the vertical profile. `Y` belongs to the sine (Dirichlet-lateral)
/// family and `Z` to the cosine (Neumann-lateral) family; both have the same
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Y,
    Z,
}

/// The vertical factor of a separated eigenfunction: the solution of
/// `Y'''' - 2 eta^2 Y'' + eta^4 Y = 0` on `[0, l_n]` with
/// `Y(0) = Y(l_n) = 0`, `Y'(0) = 1`, `Y'(l_n) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProfile {
    eta: f64,
    height: f64,
    kind: ProfileKind,
}

impl BoundaryProfile {
    pub fn new(eta: f64, height: f64, kind: ProfileKind) -> Result<Self> {
        check_positive("eta", eta)?;
        check_positive("height", height)?;
        let p = Self { eta, height, kind };
        // sinh^2 b - b^2 > 0 for every b > 0; this only fails on underflow.
        let d = p.scaled_denominator();
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain(format!(
                "degenerate boundary profile for eta*l_n = {}",
                eta * height
            )));
        }
        Ok(p)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `1 - (eta l)^2 / sinh^2(eta l)`, the common denominator of the three
    /// coefficients after dividing through by `sinh^2(eta l)`.
    fn scaled_denominator(&self) -> f64 {
        let b = self.eta * self.height;
        if b < S_TAYLOR {
            let u = 2.0 * b;
            let (_, q) = series_pq(u * u);
            let r = inv_sinh(b);
            0.5 * u.powi(4) * q * r * r
        } else {
            let r = b * inv_sinh(b);
            1.0 - r * r
        }
    }

    /// Evaluates the profile at `x_n`.
    ///
    /// The textbook form `A sinh(eta x) + B x cosh(eta x) + C x sinh(eta x)`
    /// is regrouped as
    ///
    /// ```text
    /// Y(x) = [ x sinh(eta(l-x))/sinh(eta l) - eta l (l-x) sinh(eta x)/sinh^2(eta l) ]
    ///        / (1 - (eta l)^2 / sinh^2(eta l))
    /// ```
    ///
    /// so every hyperbolic quantity appears as a bounded ratio. Both endpoint
    /// values are exactly zero.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let l = self.height;
        if !(0.0..=l).contains(&x) {
            return Err(Error::domain(format!("x_n = {x} outside [0, {l}]")));
        }
        let b = self.eta * l;
        let a = self.eta * x;
        let c = self.eta * (l - x);
        let first = x * sinh_ratio(c, b);
        let second = b * (l - x) * sinh_ratio(a, b) * inv_sinh(b);
        Ok((first - second) / self.scaled_denominator())
    }

    /// `Y''(0) = 2 eta (eta l - sinh(eta l) cosh(eta l)) / (sinh^2(eta l) - (eta l)^2)`.
    ///
    /// Equal to `-t(eta l) / l`; the two are computed along different paths.
    pub fn second_derivative_at_zero(&self) -> f64 {
        let b = self.eta * self.height;
        let r = inv_sinh(b);
        let coth = 1.0 / b.tanh();
        2.0 * self.eta * (b * r * r - coth) / self.scaled_denominator()
    }
}

/// Functional form of [`BoundaryProfile::eval`].
pub fn boundary_profile_eval(p: &BoundaryProfile, x_n: f64) -> Result<f64> {
    p.eval(x_n)
}

pub fn boundary_profile_second_derivative_at_zero(p: &BoundaryProfile) -> f64 {
    p.second_derivative_at_zero()
}

/// Volume of the unit ball in `R^m`, via `omega_m = 2 pi / m * omega_{m-2}`.
pub fn unit_ball_volume(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("unit ball dimension must be >= 1"));
    }
    let mut omega = if m % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if m % 2 == 0 { 2 } else { 3 };
    while k <= m {
        omega *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(omega)
}
