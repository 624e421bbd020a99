//! Directed rounding on top of round-to-nearest.
//!
//! Each helper computes the nearest result and uses an error-free
//! transformation (TwoSum, or an FMA residual) to find out on which side of
//! the exact value it landed. Only when the nearest result is on the wrong
//! side is it moved by one ulp, so exact results such as `1 + 3` stay exact.
//!
//! When the residual cannot be trusted (underflow, overflow) the result is
//! inflated unconditionally.

use libm::{fma, sqrt};

// Below this magnitude FMA residuals may be inexact.
const TINY: f64 = 1e-290;

#[inline]
fn lower_nonfinite(s: f64, finite_operands: bool) -> f64 {
    if s.is_nan() {
        f64::NEG_INFINITY
    } else if s == f64::INFINITY && finite_operands {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn upper_nonfinite(s: f64, finite_operands: bool) -> f64 {
    if s.is_nan() {
        f64::INFINITY
    } else if s == f64::NEG_INFINITY && finite_operands {
        f64::MIN
    } else {
        s
    }
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    let aa = s - bb;
    (a - aa) + (b - bb)
}

pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return lower_nonfinite(s, a.is_finite() && b.is_finite());
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return upper_nonfinite(s, a.is_finite() && b.is_finite());
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Residual sign of `a * b` against its rounded value `p`: negative when the
/// exact product is below `p`. `None` when the residual is unreliable.
#[inline]
fn mul_residual(a: f64, b: f64, p: f64) -> Option<f64> {
    if p.abs() < TINY && a != 0.0 && b != 0.0 {
        None
    } else {
        Some(fma(a, b, -p))
    }
}

// 0 * inf is taken as 0: interval endpoints at infinity stand for unbounded
// real sets, and zero times any real is zero.
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return lower_nonfinite(p, a.is_finite() && b.is_finite());
    }
    match mul_residual(a, b, p) {
        Some(r) if r >= 0.0 => p,
        _ => p.next_down(),
    }
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return upper_nonfinite(p, a.is_finite() && b.is_finite());
    }
    match mul_residual(a, b, p) {
        Some(r) if r <= 0.0 => p,
        _ => p.next_up(),
    }
}

/// Sign of `a / b - q` where `q` is the rounded quotient, or `None` when it
/// cannot be decided from the residual.
#[inline]
fn div_direction(a: f64, b: f64, q: f64) -> Option<f64> {
    if !b.is_finite() || !a.is_finite() {
        // x / inf = 0 and inf / x = inf are exact.
        return Some(0.0);
    }
    if (q.abs() < TINY && a != 0.0) || a.abs() < TINY || b.abs() < TINY {
        return None;
    }
    let r = fma(-q, b, a);
    Some(if b > 0.0 { r } else { -r })
}

pub(crate) fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return lower_nonfinite(q, a.is_finite() && b.is_finite());
    }
    match div_direction(a, b, q) {
        Some(d) if d >= 0.0 => q,
        _ => q.next_down(),
    }
}

pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return upper_nonfinite(q, a.is_finite() && b.is_finite());
    }
    match div_direction(a, b, q) {
        Some(d) if d <= 0.0 => q,
        _ => q.next_up(),
    }
}

/// `x` must be non-negative.
pub(crate) fn sqrt_down(x: f64) -> f64 {
    let s = sqrt(x);
    if x == 0.0 || x == f64::INFINITY {
        return s;
    }
    if x < TINY {
        return s.next_down().max(0.0);
    }
    if fma(-s, s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub(crate) fn sqrt_up(x: f64) -> f64 {
    let s = sqrt(x);
    if x == 0.0 || x == f64::INFINITY {
        return s;
    }
    if x < TINY {
        return s.next_up();
    }
    if fma(-s, s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Widens a libm transcendental result by two ulps, clamped to `[-1, 1]`.
pub(crate) fn trig_down(y: f64) -> f64 {
    if y == 0.0 {
        return y;
    }
    y.next_down().next_down().max(-1.0)
}

pub(crate) fn trig_up(y: f64) -> f64 {
    if y == 0.0 {
        return y;
    }
    y.next_up().next_up().min(1.0)
}
