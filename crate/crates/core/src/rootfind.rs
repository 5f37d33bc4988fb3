//! Bracketed root finding and derivative-free maximization.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("function returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

/// Bisection on `[lo, hi]` down to relative width `tol_rel`.
///
/// Requires a strict sign change. Exact zeros at either bracket end are
/// returned immediately.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol_rel: f64) -> Result<f64, RootError> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !f_lo.is_finite() {
        return Err(RootError::NonFinite { x: lo });
    }
    if !f_hi.is_finite() {
        return Err(RootError::NonFinite { x: hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoBracket { lo, hi, f_lo, f_hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut f_a = f_lo;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let f_mid = f(mid);
        if !f_mid.is_finite() {
            return Err(RootError::NonFinite { x: mid });
        }
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_a.signum() {
            a = mid;
            f_a = f_mid;
        } else {
            b = mid;
        }
        if (b - a) <= tol_rel * b.abs().max(a.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol_rel: f64) -> Result<f64, RootError> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut f_c = f(c);
    let mut f_d = f(d);
    for _ in 0..300 {
        if !f_c.is_finite() {
            return Err(RootError::NonFinite { x: c });
        }
        if !f_d.is_finite() {
            return Err(RootError::NonFinite { x: d });
        }
        if f_c > f_d {
            b = d;
            d = c;
            f_d = f_c;
            c = b - inv_phi * (b - a);
            f_c = f(c);
        } else {
            a = c;
            c = d;
            f_c = f_d;
            d = a + inv_phi * (b - a);
            f_d = f(d);
        }
        if (b - a) <= tol_rel * b.abs().max(a.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
