//! Adaptive Gauss-Legendre quadrature with transforms for endpoint
//! singularities and semi-infinite domains.
//!
//! All integrands are evaluated only at interior nodes, so functions that
//! diverge at an interval endpoint are safe as long as the integral exists.

use std::sync::OnceLock;
use thiserror::Error;

/// Absolute/relative tolerance pair for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {achieved:.3e} above target {requested:.3e}")]
    NonConvergence { achieved: f64, requested: f64 },
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

const GL_N: usize = 15;
const MAX_DEPTH: u32 = 52;

fn gl_nodes() -> &'static [(f64, f64); GL_N] {
    static NODES: OnceLock<[(f64, f64); GL_N]> = OnceLock::new();
    NODES.get_or_init(|| {
        let mut out = [(0.0, 0.0); GL_N];
        let n = GL_N;
        for (i, slot) in out.iter_mut().enumerate() {
            // Newton iteration on the Legendre polynomial, standard cosine seed.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *slot = (x, w);
        }
        out
    })
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gl_nodes() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

struct Adaptive<'f, F> {
    f: &'f F,
    abs_budget: f64,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn run(&self, a: f64, b: f64, whole: f64, budget: f64, depth: u32) -> Result<QuadResult, QuadError> {
        let mid = 0.5 * (a + b);
        let left = gl_panel(self.f, a, mid);
        let right = gl_panel(self.f, mid, b);
        let refined = left + right;
        if !refined.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { x: mid });
        }
        let err = (refined - whole).abs();
        // Halving the budget down a deep chain of panels would eventually
        // demand accuracy below round-off; floor it at the noise level of
        // this panel's own value so machine-accurate panels are accepted.
        let budget = budget.max(4.0 * f64::EPSILON * refined.abs());
        if err <= budget || depth >= MAX_DEPTH || mid <= a || mid >= b {
            if err > budget && err > self.abs_budget {
                return Err(QuadError::NonConvergence {
                    achieved: err,
                    requested: budget,
                });
            }
            return Ok(QuadResult {
                value: refined,
                error: err,
            });
        }
        let half_budget = 0.5 * budget;
        let l = self.run(a, mid, left, half_budget, depth + 1)?;
        let r = self.run(mid, b, right, half_budget, depth + 1)?;
        Ok(QuadResult {
            value: l.value + r.value,
            error: l.error + r.error,
        })
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult, QuadError> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::InvalidInterval { lo: a, hi: b });
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let coarse = gl_panel(&f, a, b);
    if !coarse.is_finite() {
        return Err(QuadError::NonFiniteIntegrand { x: 0.5 * (a + b) });
    }
    let budget = tol.abs.max(tol.rel * coarse.abs());
    let adaptive = Adaptive { f: &f, abs_budget: budget };
    adaptive.run(a, b, coarse, budget, 0)
}

/// Power substitution exponent attached to an interval endpoint.
///
/// `Power(m)` with `m > 1` maps `y = endpoint +/- u^m`, flattening an
/// integrable algebraic singularity or a fractional-power kink at that
/// endpoint. `None` leaves the variable untouched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointMap {
    None,
    Power(f64),
}

impl EndpointMap {
    /// Substitution exponent that removes an `|y - s|^{-q}` singularity
    /// (`q < 1`). Exponents `q <= 0` need no substitution.
    pub fn for_singular_exponent(q: f64) -> Self {
        if q > 0.0 && q < 1.0 {
            EndpointMap::Power(1.0 / (1.0 - q))
        } else {
            EndpointMap::None
        }
    }
}

/// Integrate `f` over finite `[a, b]` with optional power substitutions at
/// either endpoint. The interval is split at its midpoint and each half is
/// transformed independently.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    map_a: EndpointMap,
    map_b: EndpointMap,
    tol: Tolerance,
) -> Result<QuadResult, QuadError> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::InvalidInterval { lo: a, hi: b });
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let mid = 0.5 * (a + b);
    let half_tol = Tolerance::new(0.5 * tol.abs, tol.rel);
    let left = match map_a {
        EndpointMap::None => integrate(&f, a, mid, half_tol)?,
        EndpointMap::Power(m) => {
            let u_hi = (mid - a).powf(1.0 / m);
            integrate(
                // Offsets below one ulp of the endpoint collapse onto it;
                // the mapped integrand vanishes there (m > 1), so return 0
                // instead of probing f at the singularity.
                |u| {
                    let y = a + u.powf(m);
                    if y == a {
                        0.0
                    } else {
                        f(y) * m * u.powf(m - 1.0)
                    }
                },
                0.0,
                u_hi,
                half_tol,
            )?
        }
    };
    let right = match map_b {
        EndpointMap::None => integrate(&f, mid, b, half_tol)?,
        EndpointMap::Power(m) => {
            let u_hi = (b - mid).powf(1.0 / m);
            integrate(
                |u| {
                    let y = b - u.powf(m);
                    if y == b {
                        0.0
                    } else {
                        f(y) * m * u.powf(m - 1.0)
                    }
                },
                0.0,
                u_hi,
                half_tol,
            )?
        }
    };
    Ok(QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

/// Integrate `f` over `[a, +inf)` via the rational map `x = a + t/(1-t)`.
pub fn integrate_to_pos_inf<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult, QuadError> {
    if !a.is_finite() {
        return Err(QuadError::InvalidInterval { lo: a, hi: f64::INFINITY });
    }
    integrate(
        |t| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrate `f` over `(-inf, b]` via the rational map `x = b - t/(1-t)`.
pub fn integrate_from_neg_inf<F: Fn(f64) -> f64>(f: F, b: f64, tol: Tolerance) -> Result<QuadResult, QuadError> {
    if !b.is_finite() {
        return Err(QuadError::InvalidInterval { lo: f64::NEG_INFINITY, hi: b });
    }
    integrate(
        |t| {
            let s = 1.0 - t;
            f(b - t / s) / (s * s)
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integrate over an interval whose endpoints may be infinite and whose
/// finite endpoints may carry power substitutions.
///
/// Semi-infinite pieces are cut off one unit away from the nearest finite
/// reference point before the rational map is applied, so endpoint
/// substitutions and tail transforms never overlap.
pub fn integrate_ext<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    map_lo: EndpointMap,
    map_hi: EndpointMap,
    tol: Tolerance,
) -> Result<QuadResult, QuadError> {
    if lo > hi {
        return Err(QuadError::InvalidInterval { lo, hi });
    }
    let part = Tolerance::new(0.5 * tol.abs, tol.rel);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate_singular(f, lo, hi, map_lo, map_hi, tol),
        (true, false) => {
            let cut = lo + 1.0;
            let head = integrate_singular(&f, lo, cut, map_lo, EndpointMap::None, part)?;
            let tail = integrate_to_pos_inf(&f, cut, part)?;
            Ok(QuadResult {
                value: head.value + tail.value,
                error: head.error + tail.error,
            })
        }
        (false, true) => {
            let cut = hi - 1.0;
            let head = integrate_singular(&f, cut, hi, EndpointMap::None, map_hi, part)?;
            let tail = integrate_from_neg_inf(&f, cut, part)?;
            Ok(QuadResult {
                value: head.value + tail.value,
                error: head.error + tail.error,
            })
        }
        (false, false) => {
            let left = integrate_from_neg_inf(&f, 0.0, part)?;
            let right = integrate_to_pos_inf(&f, 0.0, part)?;
            Ok(QuadResult {
                value: left.value + right.value,
                error: left.error + right.error,
            })
        }
    }
}
