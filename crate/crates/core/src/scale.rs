//! Feller scale machinery: the drift potential G, the scale function p, the
//! function v built from the speed measure, boundary-limit classification,
//! and hitting probabilities.
//!
//! Boundary limits are decided analytically from the leading local exponent
//! of each integrand and only confirmed numerically; a floating-point value
//! is never used on its own to declare a limit infinite. Finite limits are
//! computed with endpoint substitutions that remove algebraic singularities
//! and with rational maps for infinite endpoints.

use crate::interval::Interval;
use crate::model::{ModelKind, ModelSpec};
use crate::quad::{self, EndpointMap, QuadError, Tolerance};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::BTreeMap;
use thiserror::Error;

/// Default tolerance for scale-function quadrature.
pub fn default_tolerance() -> Tolerance {
    Tolerance::new(1e-10, 1e-8)
}

#[derive(Debug, Clone, Error)]
pub enum ScaleError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("sigma = 0: scale functions are undefined for the deterministic system")]
    DeterministicSystem,
    #[error("reference point c = {c} is not interior to the interval ({lo}, {hi})")]
    ReferenceOutsideInterval { c: f64, lo: f64, hi: f64 },
    #[error("x = {x} is not interior to the interval ({lo}, {hi})")]
    PointOutsideInterval { x: f64, lo: f64, hi: f64 },
    #[error("the diffusion vanishes at {x} inside the interval; split the interval there")]
    SingularPointInside { x: f64 },
    #[error("hitting probabilities require a SaddleNode model with a > 0")]
    NotSaddleNode,
    #[error("{0}")]
    InfiniteLimit(String),
    #[error("grid must be strictly increasing and interior to the interval")]
    BadGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum PLimit {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
    /// The leading exponent sits exactly on an integrability boundary.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum VLimit {
    Finite(f64),
    Infinite,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndpointReport {
    /// Endpoint location ("-inf"/"inf" for infinite endpoints).
    pub endpoint: String,
    pub p_limit: PLimit,
    pub v_limit: VLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum FellerVerdict {
    /// The interval is left in almost surely finite time, through any of the
    /// listed endpoints (an infinite endpoint here means finite-time blow-up).
    ExitAlmostSurelyFinite { through: Vec<String> },
    /// Finite-time escape happens through the listed infinite endpoint.
    BlowUpFiniteTime { endpoint: String },
    /// Both scale-function limits diverge: the interval is never left.
    NoExit,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub lo: EndpointReport,
    pub hi: EndpointReport,
    pub feller: FellerVerdict,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleTable {
    pub interval: Interval,
    pub c: f64,
    pub grid: Vec<f64>,
    pub g_vals: Vec<f64>,
    pub p_vals: Vec<f64>,
    pub v_vals: Vec<f64>,
    pub boundary: BoundaryReport,
}

/// Which endpoint of the interval a limit query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// Local structure of the coefficients at one interval endpoint.
#[derive(Debug, Clone, Copy)]
pub(crate) enum EndpointInfo {
    /// Finite endpoint where drift and diffusion vanish:
    /// drift ~ cdr*(y-s)^ell (signed), diffusion ~ sigma_loc*|y-s|^alpha_loc.
    Singular { s: f64, ell: f64, cdr: f64, alpha_loc: f64, sigma_loc: f64 },
    /// Infinite endpoint: dG/du ~ coef * u^{e} along the inward-oriented
    /// distance u, diffusion ~ u^{alpha_tail}; coef = 0 flags zero drift.
    Infinite { coef: f64, e: f64, alpha_tail: f64 },
    /// Finite endpoint with nonvanishing diffusion.
    Regular,
}

/// Evaluator for G, p, v on one interval with a fixed reference point.
///
/// G values are cached and extended incrementally from the nearest cached
/// point, which keeps the nested quadratures for p and v affordable.
pub struct ScaleMachine<'m> {
    model: &'m ModelSpec,
    interval: Interval,
    c: f64,
    tol: Tolerance,
    g_tol: Tolerance,
    lo_info: EndpointInfo,
    hi_info: EndpointInfo,
    g_cache: RefCell<BTreeMap<u64, (f64, f64)>>,
}

/// Order-preserving bijection from finite f64 to u64, so a BTreeMap can act
/// as a sorted cache with O(log n) nearest-neighbour lookup.
fn sort_key(x: f64) -> u64 {
    let b = x.to_bits();
    if x >= 0.0 {
        b ^ 0x8000_0000_0000_0000
    } else {
        !b
    }
}

fn oriented<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, QuadError> {
    if a <= b {
        quad::integrate(f, a, b, tol).map(|r| r.value)
    } else {
        quad::integrate(f, b, a, tol).map(|r| -r.value)
    }
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

impl<'m> ScaleMachine<'m> {
    pub fn new(model: &'m ModelSpec, interval: Interval, c: f64) -> Result<Self, ScaleError> {
        Self::with_tolerance(model, interval, c, default_tolerance())
    }

    pub fn with_tolerance(
        model: &'m ModelSpec,
        interval: Interval,
        c: f64,
        tol: Tolerance,
    ) -> Result<Self, ScaleError> {
        if model.sigma() == 0.0 {
            return Err(ScaleError::DeterministicSystem);
        }
        if !interval.contains(c) || !c.is_finite() {
            return Err(ScaleError::ReferenceOutsideInterval {
                c,
                lo: interval.lo(),
                hi: interval.hi(),
            });
        }
        for s in model.singular_points() {
            if interval.contains(s) {
                return Err(ScaleError::SingularPointInside { x: s });
            }
        }
        let lo_info = endpoint_info(model, interval.lo(), Side::Lo);
        let hi_info = endpoint_info(model, interval.hi(), Side::Hi);
        Ok(ScaleMachine {
            model,
            interval,
            c,
            tol,
            g_tol: Tolerance::new(1e-13, 1e-12),
            lo_info,
            hi_info,
            g_cache: RefCell::new(BTreeMap::from([(sort_key(c), (c, 0.0))])),
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn reference(&self) -> f64 {
        self.c
    }

    fn check_interior(&self, x: f64) -> Result<(), ScaleError> {
        if self.interval.contains(x) && x.is_finite() {
            Ok(())
        } else {
            Err(ScaleError::PointOutsideInterval {
                x,
                lo: self.interval.lo(),
                hi: self.interval.hi(),
            })
        }
    }

    fn h(&self, y: f64) -> f64 {
        let gamma = self.model.diffusion(y);
        self.model.drift(y) / (gamma * gamma)
    }

    fn gamma_sq(&self, y: f64) -> f64 {
        let gamma = self.model.diffusion(y);
        gamma * gamma
    }

    /// G(y) = integral of drift/gamma^2 from the reference point to y.
    pub fn g(&self, y: f64) -> Result<f64, ScaleError> {
        self.check_interior(y)?;
        let k = sort_key(y);
        let (y0, g0) = {
            let cache = self.g_cache.borrow();
            if let Some(&(cy, cg)) = cache.get(&k) {
                debug_assert_eq!(cy, y);
                return Ok(cg);
            }
            let below = cache.range(..k).next_back().map(|(_, &e)| e);
            let above = cache.range(k..).next().map(|(_, &e)| e);
            match (below, above) {
                (Some(b), Some(a)) => {
                    if (b.0 - y).abs() <= (a.0 - y).abs() {
                        b
                    } else {
                        a
                    }
                }
                (Some(b), None) => b,
                (None, Some(a)) => a,
                (None, None) => unreachable!("G cache always holds the reference point"),
            }
        };
        let seg = self.g_segment(y0, y)?;
        let val = g0 + seg;
        self.g_cache.borrow_mut().insert(k, (y, val));
        Ok(val)
    }

    /// Oriented integral of h over one cache-extension segment. Segments
    /// lie entirely on one side of the reference point, so when that side
    /// ends at a singular point s the 1/(z - s) layer of h is integrated in
    /// log-spaced coordinates, where it is flat at any distance from s.
    fn g_segment(&self, y0: f64, y: f64) -> Result<f64, QuadError> {
        let (lo, hi) = if y0 <= y { (y0, y) } else { (y, y0) };
        let seg = if hi <= self.c {
            if let EndpointInfo::Singular { s, .. } = self.lo_info {
                // The realized offset z - s keeps both factors consistent at
                // the ulp(s) grid; h(z) * (z - s) is flat in log coordinates.
                let f = |t: f64| {
                    let z = s + t.exp();
                    self.h(z) * (z - s)
                };
                quad::integrate(f, (lo - s).ln(), (hi - s).ln(), self.g_tol)?.value
            } else {
                quad::integrate(|z| self.h(z), lo, hi, self.g_tol)?.value
            }
        } else if lo >= self.c {
            if let EndpointInfo::Singular { s, .. } = self.hi_info {
                let f = |t: f64| {
                    let z = s - t.exp();
                    self.h(z) * (s - z)
                };
                quad::integrate(f, (s - hi).ln(), (s - lo).ln(), self.g_tol)?.value
            } else {
                quad::integrate(|z| self.h(z), lo, hi, self.g_tol)?.value
            }
        } else {
            quad::integrate(|z| self.h(z), lo, hi, self.g_tol)?.value
        };
        Ok(if y0 <= y { seg } else { -seg })
    }

    /// p(x) = integral of exp(-2G) from the reference point to x.
    pub fn p(&self, x: f64) -> Result<f64, ScaleError> {
        self.p_tol(x, self.tol)
    }

    fn p_tol(&self, x: f64, tol: Tolerance) -> Result<f64, ScaleError> {
        self.check_interior(x)?;
        let val = oriented(|y| (-2.0 * self.g(y).unwrap_or(f64::NAN)).exp(), self.c, x, tol)?;
        Ok(val)
    }

    /// Exit-time functional v(x) >= 0, built from the speed measure. Uses the
    /// overflow-safe difference form
    /// v(x) = 2 * int |p(x)-p(y)| e^{2G(y)} / gamma^2(y) dy with
    /// |p(x)-p(y)| e^{2G(y)} = int exp(-2(G(z)-G(y))) dz.
    pub fn v(&self, x: f64) -> Result<f64, ScaleError> {
        self.v_tol(x, self.tol)
    }

    fn v_tol(&self, x: f64, tol: Tolerance) -> Result<f64, ScaleError> {
        self.check_interior(x)?;
        if x == self.c {
            return Ok(0.0);
        }
        let (lo, hi) = if x < self.c { (x, self.c) } else { (self.c, x) };
        let integrand = |y: f64| self.v_integrand(y, x, tol);
        let r = quad::integrate(integrand, lo, hi, tol)?;
        Ok(2.0 * r.value)
    }

    /// inner(y) / gamma^2(y) where inner(y) = |p(x)-p(y)| e^{2G(y)}.
    fn v_integrand(&self, y: f64, x: f64, tol: Tolerance) -> f64 {
        let g_y = match self.g(y) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let (zlo, zhi) = if y <= x { (y, x) } else { (x, y) };
        let inner = quad::integrate(
            |z| {
                let g_z = self.g(z).unwrap_or(f64::NAN);
                (-2.0 * (g_z - g_y)).exp()
            },
            zlo,
            zhi,
            tol,
        );
        match inner {
            Ok(r) => r.value / self.gamma_sq(y),
            Err(_) => f64::NAN,
        }
    }

    fn info(&self, side: Side) -> EndpointInfo {
        match side {
            Side::Lo => self.lo_info,
            Side::Hi => self.hi_info,
        }
    }

    fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Lo => self.interval.lo(),
            Side::Hi => self.interval.hi(),
        }
    }

    /// Analytic classification of lim p at one endpoint, with the numeric
    /// value filled in when the limit is finite.
    pub fn p_limit(&self, side: Side) -> Result<PLimit, ScaleError> {
        let divergent = match side {
            Side::Lo => PLimit::MinusInfinity,
            Side::Hi => PLimit::PlusInfinity,
        };
        match classify_p(self.info(side)) {
            LimitClass::Finite => {
                let value = self.p_endpoint_value(side)?;
                Ok(PLimit::Finite(value))
            }
            LimitClass::Infinite => {
                self.confirm_p_divergence(side)?;
                Ok(divergent)
            }
            LimitClass::Inconclusive => Ok(PLimit::Unknown),
        }
    }

    /// Analytic classification of lim v at one endpoint, with the numeric
    /// value filled in when the limit is finite.
    pub fn v_limit(&self, side: Side) -> Result<VLimit, ScaleError> {
        match classify_v(self.info(side)) {
            LimitClass::Finite => Ok(VLimit::Finite(self.v_endpoint_value(side)?)),
            LimitClass::Infinite => {
                self.confirm_v_divergence(side)?;
                Ok(VLimit::Infinite)
            }
            LimitClass::Inconclusive => Ok(VLimit::Unknown),
        }
    }

    /// Substitution that flattens the p-integrand near a finite endpoint.
    fn p_endpoint_map(&self, side: Side) -> EndpointMap {
        match self.info(side) {
            EndpointInfo::Singular { ell, cdr, alpha_loc, sigma_loc, .. } => {
                let e = ell - 2.0 * alpha_loc;
                if e > -1.0 && e < 0.0 {
                    // exp(-2G) has a u^{e+1} kink at the endpoint.
                    EndpointMap::Power(1.0 / (e + 1.0))
                } else if e == -1.0 {
                    let r = 2.0 * cdr / (sigma_loc * sigma_loc);
                    EndpointMap::for_singular_exponent(r)
                } else {
                    EndpointMap::None
                }
            }
            _ => EndpointMap::None,
        }
    }

    fn p_endpoint_value(&self, side: Side) -> Result<f64, ScaleError> {
        let endpoint = self.endpoint(side);
        if let EndpointInfo::Singular { s, ell, cdr, alpha_loc, sigma_loc } = self.info(side) {
            let e = ell - 2.0 * alpha_loc;
            if e == -1.0 {
                let r = 2.0 * cdr / (sigma_loc * sigma_loc);
                if r > 0.0 && r < 1.0 {
                    return self.p_endpoint_log_case(side, s, r);
                }
            }
        }
        let f = |y: f64| (-2.0 * self.g(y).unwrap_or(f64::NAN)).exp();
        let map = self.p_endpoint_map(side);
        let r = match side {
            Side::Hi => quad::integrate_ext(f, self.c, endpoint, EndpointMap::None, map, self.tol)?,
            Side::Lo => {
                let r = quad::integrate_ext(f, endpoint, self.c, map, EndpointMap::None, self.tol)?;
                quad::QuadResult { value: -r.value, error: r.error }
            }
        };
        Ok(r.value)
    }

    /// p-limit at a singular endpoint where exp(-2G) ~ |y-s|^{-r} with
    /// 0 < r < 1. The power substitution would need offsets below one ulp of
    /// s there, so integrate numerically down to a cutoff and close the last
    /// sliver with the leading power-law asymptotics:
    /// int_s^{s+d} exp(-2G) ~ exp(-2G(s+d)) * d / (1-r).
    fn p_endpoint_log_case(&self, side: Side, s: f64, r: f64) -> Result<f64, ScaleError> {
        let dir = match side {
            Side::Hi => -1.0,
            Side::Lo => 1.0,
        };
        let delta = (s.abs() + 1.0) * 1e-10;
        let y1 = s + dir * delta;
        let d1 = (y1 - s).abs();
        let head = (-2.0 * self.g(y1)?).exp() * d1 / (1.0 - r);
        // Body in log-distance coordinates t = ln|y - s|. The bracketed
        // factor exp(-2G(y)) |y - s|^r is bounded with bounded slope at the
        // endpoint (both pieces see the same realized offset, so ulp-grid
        // quantization of y near s adds no amplified noise), and the
        // remaining exp((1-r) t) carries the integrable edge exactly.
        let q = |t: f64| {
            let y = s + dir * t.exp();
            let b = (-2.0 * self.g(y).unwrap_or(f64::NAN)).exp() * (y - s).abs().powf(r);
            b * ((1.0 - r) * t).exp()
        };
        let body = quad::integrate(q, d1.ln(), (self.c - s).abs().ln(), self.tol)?.value;
        let signed = body + head;
        match side {
            Side::Hi => Ok(signed),
            Side::Lo => Ok(-signed),
        }
    }

    fn v_endpoint_value(&self, side: Side) -> Result<f64, ScaleError> {
        let endpoint = self.endpoint(side);
        // Near a singular endpoint the integrand behaves like u^{1-2*alpha}.
        let map = match self.info(side) {
            EndpointInfo::Singular { alpha_loc, .. } => {
                EndpointMap::for_singular_exponent(2.0 * alpha_loc - 1.0)
            }
            _ => EndpointMap::None,
        };
        let integrand = |y: f64| self.v_limit_integrand(y, side);
        let r = match side {
            Side::Hi => quad::integrate_ext(integrand, self.c, endpoint, EndpointMap::None, map, self.tol)?,
            Side::Lo => quad::integrate_ext(integrand, endpoint, self.c, map, EndpointMap::None, self.tol)?,
        };
        Ok(2.0 * r.value)
    }

    /// |p(endpoint)-p(y)| e^{2G(y)} / gamma^2(y), evaluated without forming
    /// e^{2G} or the p-limit separately (their product stays bounded even
    /// when both factors overflow/underflow).
    fn v_limit_integrand(&self, y: f64, side: Side) -> f64 {
        let g_y = match self.g(y) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let endpoint = self.endpoint(side);
        let f = |z: f64| {
            let g_z = self.g(z).unwrap_or(f64::NAN);
            (-2.0 * (g_z - g_y)).exp()
        };
        let map = self.p_endpoint_map(side);
        // The inner integral must be tighter than the outer budget, or its
        // quadrature noise makes the outer integrand rough at exactly the
        // scale the outer refinement is trying to resolve.
        let inner_tol = Tolerance::new(self.tol.abs * 1e-2, self.tol.rel * 1e-2);
        let inner = match side {
            Side::Hi => quad::integrate_ext(f, y, endpoint, EndpointMap::None, map, inner_tol),
            Side::Lo => quad::integrate_ext(f, endpoint, y, map, EndpointMap::None, inner_tol),
        };
        match inner {
            Ok(r) => r.value / self.gamma_sq(y),
            Err(_) => f64::NAN,
        }
    }

    /// Points marching toward an endpoint, used for divergence confirmation.
    fn approach_points(&self, side: Side, n: usize) -> Vec<f64> {
        let endpoint = self.endpoint(side);
        (0..n)
            .map(|k| {
                if endpoint.is_finite() {
                    let d = (endpoint - self.c).abs();
                    match side {
                        Side::Hi => endpoint - d * 0.5f64.powi(k as i32 * 4 + 2),
                        Side::Lo => endpoint + d * 0.5f64.powi(k as i32 * 4 + 2),
                    }
                } else {
                    let step = 8.0f64.powi(k as i32 + 1);
                    match side {
                        Side::Hi => self.c + step,
                        Side::Lo => self.c - step,
                    }
                }
            })
            .collect()
    }

    /// Tolerance for divergence-confirmation probes, which only need the
    /// values' ordering: full accuracy deep inside a boundary layer would be
    /// wasted (and is sometimes unattainable there).
    fn probe_tolerance() -> Tolerance {
        Tolerance::new(1e-6, 1e-4)
    }

    fn confirm_p_divergence(&self, side: Side) -> Result<(), ScaleError> {
        let mut last = 0.0f64;
        for x in self.approach_points(side, 3) {
            let val = match self.p_tol(x, Self::probe_tolerance()) {
                Ok(v) => v.abs(),
                // The integrand exp(-2G) overflowed before the probe point:
                // that confirms the divergence.
                Err(ScaleError::Quadrature(QuadError::NonFiniteIntegrand { .. })) => return Ok(()),
                Err(e) => return Err(e),
            };
            if val <= last {
                return Err(ScaleError::InfiniteLimit(format!(
                    "analytic rule says p diverges at the {} endpoint but the numeric sequence is not increasing",
                    match side {
                        Side::Lo => "lower",
                        Side::Hi => "upper",
                    }
                )));
            }
            last = val;
        }
        Ok(())
    }

    fn confirm_v_divergence(&self, side: Side) -> Result<(), ScaleError> {
        let mut last = -1.0f64;
        for x in self.approach_points(side, 3) {
            let val = match self.v_tol(x, Self::probe_tolerance()) {
                Ok(v) => v,
                Err(ScaleError::Quadrature(QuadError::NonFiniteIntegrand { .. })) => return Ok(()),
                Err(e) => return Err(e),
            };
            if !val.is_finite() {
                // The divergence is strong enough to overflow the probe:
                // that confirms it.
                return Ok(());
            }
            if val <= last {
                return Err(ScaleError::InfiniteLimit(format!(
                    "analytic rule says v diverges at the {} endpoint but the numeric sequence is not increasing",
                    match side {
                        Side::Lo => "lower",
                        Side::Hi => "upper",
                    }
                )));
            }
            last = val;
        }
        Ok(())
    }

    fn endpoint_report(&self, side: Side) -> Result<EndpointReport, ScaleError> {
        Ok(EndpointReport {
            endpoint: fmt_endpoint(self.endpoint(side)),
            p_limit: self.p_limit(side)?,
            v_limit: self.v_limit(side)?,
        })
    }

    /// Per-endpoint limits plus the exit/no-exit/blow-up verdict that
    /// Feller's test draws from them.
    pub fn boundary_report(&self) -> Result<BoundaryReport, ScaleError> {
        let lo = self.endpoint_report(Side::Lo)?;
        let hi = self.endpoint_report(Side::Hi)?;
        let (feller, note) = feller_verdict(&lo, &hi, self.interval);
        Ok(BoundaryReport { lo, hi, feller, note })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum LimitClass {
    Finite,
    Infinite,
    Inconclusive,
}

fn classify_p(info: EndpointInfo) -> LimitClass {
    match info {
        EndpointInfo::Regular => LimitClass::Finite,
        EndpointInfo::Singular { ell, cdr, alpha_loc, sigma_loc, .. } => {
            let e = ell - 2.0 * alpha_loc;
            if e > -1.0 {
                LimitClass::Finite
            } else if e == -1.0 {
                let r = 2.0 * cdr / (sigma_loc * sigma_loc);
                if r < 1.0 {
                    LimitClass::Finite
                } else if r > 1.0 {
                    LimitClass::Infinite
                } else {
                    LimitClass::Inconclusive
                }
            } else if cdr < 0.0 {
                LimitClass::Finite
            } else if cdr > 0.0 {
                LimitClass::Infinite
            } else {
                LimitClass::Inconclusive
            }
        }
        EndpointInfo::Infinite { coef, e, .. } => {
            if coef == 0.0 {
                // Zero drift: p grows linearly.
                LimitClass::Infinite
            } else if coef < 0.0 {
                LimitClass::Infinite
            } else if e > -1.0 {
                LimitClass::Finite
            } else if e < -1.0 {
                LimitClass::Infinite
            } else {
                let r = 2.0 * coef;
                if r > 1.0 {
                    LimitClass::Finite
                } else if r < 1.0 {
                    LimitClass::Infinite
                } else {
                    LimitClass::Inconclusive
                }
            }
        }
    }
}

fn classify_v(info: EndpointInfo) -> LimitClass {
    match info {
        EndpointInfo::Regular => LimitClass::Finite,
        EndpointInfo::Singular { ell, cdr, alpha_loc, sigma_loc, .. } => {
            let e = ell - 2.0 * alpha_loc;
            if e > -1.0 {
                // G bounded; the integrand carries a |y-s|^{1-2*alpha} factor.
                if alpha_loc < 1.0 {
                    LimitClass::Finite
                } else {
                    LimitClass::Infinite
                }
            } else if e == -1.0 {
                let r = 2.0 * cdr / (sigma_loc * sigma_loc);
                if r == 1.0 {
                    LimitClass::Inconclusive
                } else {
                    LimitClass::Infinite
                }
            } else if cdr == 0.0 {
                LimitClass::Inconclusive
            } else {
                LimitClass::Infinite
            }
        }
        EndpointInfo::Infinite { coef, e, alpha_tail } => {
            if coef > 0.0 && e > -1.0 {
                LimitClass::Finite
            } else if coef > 0.0 && e == -1.0 {
                let r = 2.0 * coef;
                if r > 1.0 && alpha_tail > 1.0 {
                    LimitClass::Finite
                } else if r == 1.0 {
                    LimitClass::Inconclusive
                } else {
                    LimitClass::Infinite
                }
            } else {
                LimitClass::Infinite
            }
        }
    }
}

pub(crate) fn endpoint_info(model: &ModelSpec, endpoint: f64, side: Side) -> EndpointInfo {
    let alpha = model.alpha();
    let sigma = model.sigma();
    if endpoint.is_finite() {
        let singular = model.singular_points().iter().any(|&s| s == endpoint);
        if !singular {
            return EndpointInfo::Regular;
        }
        return match model.kind() {
            ModelKind::SaddleNode => {
                let a = model.a();
                if a == 0.0 {
                    EndpointInfo::Singular {
                        s: 0.0,
                        ell: 2.0,
                        cdr: -1.0,
                        alpha_loc: 2.0 * alpha,
                        sigma_loc: sigma,
                    }
                } else {
                    let root = a.sqrt();
                    let sigma_loc = sigma * (2.0 * root).powf(alpha);
                    let cdr = if endpoint > 0.0 { -2.0 * root } else { 2.0 * root };
                    EndpointInfo::Singular { s: endpoint, ell: 1.0, cdr, alpha_loc: alpha, sigma_loc }
                }
            }
            _ => {
                let lambda = model.lambda();
                let (ell, cdr) = if lambda != 0.0 {
                    (1.0, lambda)
                } else if model.mu() != 0.0 {
                    (1.0 + model.kappa(), model.mu())
                } else {
                    (1.0, 0.0)
                };
                EndpointInfo::Singular { s: 0.0, ell, cdr, alpha_loc: alpha, sigma_loc: sigma }
            }
        };
    }
    // Infinite endpoint: leading term of dG/du along the inward distance u.
    let s2 = sigma * sigma;
    match model.kind() {
        ModelKind::SaddleNode => {
            let coef = match side {
                Side::Hi => -1.0 / s2,
                Side::Lo => 1.0 / s2,
            };
            EndpointInfo::Infinite { coef, e: 2.0 - 4.0 * alpha, alpha_tail: 2.0 * alpha }
        }
        ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork => EndpointInfo::Infinite {
            coef: -1.0 / s2,
            e: 3.0 - 2.0 * alpha,
            alpha_tail: alpha,
        },
        ModelKind::GeneralPower => {
            // The drift is odd, so both tails share the same expansion.
            let nu = model.nu();
            let lambda = model.lambda();
            if nu != 0.0 {
                EndpointInfo::Infinite {
                    coef: -nu / s2,
                    e: 1.0 + model.beta() - 2.0 * alpha,
                    alpha_tail: alpha,
                }
            } else if lambda != 0.0 {
                EndpointInfo::Infinite { coef: lambda / s2, e: 1.0 - 2.0 * alpha, alpha_tail: alpha }
            } else {
                EndpointInfo::Infinite { coef: 0.0, e: 0.0, alpha_tail: alpha }
            }
        }
    }
}

fn feller_verdict(lo: &EndpointReport, hi: &EndpointReport, interval: Interval) -> (FellerVerdict, String) {
    let lo_v_fin = matches!(lo.v_limit, VLimit::Finite(_));
    let hi_v_fin = matches!(hi.v_limit, VLimit::Finite(_));
    let lo_p_div = lo.p_limit == PLimit::MinusInfinity;
    let hi_p_div = hi.p_limit == PLimit::PlusInfinity;
    let any_unknown = lo.p_limit == PLimit::Unknown
        || hi.p_limit == PLimit::Unknown
        || lo.v_limit == VLimit::Unknown
        || hi.v_limit == VLimit::Unknown;

    if lo_v_fin || hi_v_fin {
        let mut through = Vec::new();
        if lo_v_fin {
            through.push(lo.endpoint.clone());
        }
        if hi_v_fin {
            through.push(hi.endpoint.clone());
        }
        let covered = (lo_v_fin && hi_v_fin) || (lo_v_fin && hi_p_div) || (hi_v_fin && lo_p_div);
        if !covered {
            return (
                FellerVerdict::Unknown,
                "one endpoint is accessible but the opposite scale limit does not close the test".into(),
            );
        }
        let is_infinite = |s: &str| s == "inf" || s == "-inf";
        if through.len() == 1 && is_infinite(&through[0]) {
            let endpoint = through.remove(0);
            let note = format!("finite-time escape toward {endpoint}");
            return (FellerVerdict::BlowUpFiniteTime { endpoint }, note);
        }
        let note = if through.iter().any(|t| is_infinite(t)) {
            "exit is almost surely finite; an infinite endpoint in the list means blow-up".to_string()
        } else {
            "exit time of the interval is almost surely finite".to_string()
        };
        return (FellerVerdict::ExitAlmostSurelyFinite { through }, note);
    }
    if any_unknown {
        return (FellerVerdict::Unknown, "a limit classification was inconclusive".into());
    }
    // Neither endpoint has finite v: both are unattainable (v = inf whenever
    // p diverges, and a finite-p endpoint with infinite v only attracts
    // without being reached), so the interval is never left.
    if lo.v_limit == VLimit::Infinite && hi.v_limit == VLimit::Infinite {
        return (
            FellerVerdict::NoExit,
            format!(
                "v diverges at both endpoints of ({}, {}): the interval is never left",
                fmt_endpoint(interval.lo()),
                fmt_endpoint(interval.hi())
            ),
        );
    }
    (FellerVerdict::Unknown, "scale limits do not match any closed Feller case".into())
}

/// G(x) relative to c; see [`ScaleMachine::g`].
pub fn compute_g(model: &ModelSpec, interval: Interval, c: f64, x: f64) -> Result<f64, ScaleError> {
    ScaleMachine::new(model, interval, c)?.g(x)
}

/// Scale function p(x) relative to c; see [`ScaleMachine::p`].
pub fn scale_p(model: &ModelSpec, interval: Interval, c: f64, x: f64) -> Result<f64, ScaleError> {
    ScaleMachine::new(model, interval, c)?.p(x)
}

/// Exit functional v(x) relative to c; see [`ScaleMachine::v`].
pub fn scale_v(model: &ModelSpec, interval: Interval, c: f64, x: f64) -> Result<f64, ScaleError> {
    ScaleMachine::new(model, interval, c)?.v(x)
}

/// Boundary limits of p and v with the induced Feller verdict. The reference
/// point is placed one unit inside finite endpoints (at the midpoint when
/// both are finite); limit values are relative to that reference.
pub fn boundary_limits(model: &ModelSpec, interval: Interval) -> Result<BoundaryReport, ScaleError> {
    let c = default_reference(interval);
    ScaleMachine::new(model, interval, c)?.boundary_report()
}

/// Default interior reference point for an interval.
pub fn default_reference(interval: Interval) -> f64 {
    match (interval.lo().is_finite(), interval.hi().is_finite()) {
        (true, true) => 0.5 * (interval.lo() + interval.hi()),
        (true, false) => interval.lo() + 1.0,
        (false, true) => interval.hi() - 1.0,
        (false, false) => 0.0,
    }
}

/// Probability that a saddle-node path started at x0 in (-sqrt(a), sqrt(a))
/// reaches -sqrt(a) before sqrt(a) (for alpha < 1), or converges there (for
/// alpha = 1 with a > sigma^-4, where both scale limits are finite).
pub fn hitting_probability(model: &ModelSpec, x0: f64) -> Result<f64, ScaleError> {
    if model.kind() != ModelKind::SaddleNode || model.a() <= 0.0 {
        return Err(ScaleError::NotSaddleNode);
    }
    let root = model.a().sqrt();
    let interval = Interval::new(-root, root);
    if !interval.contains(x0) {
        return Err(ScaleError::PointOutsideInterval { x: x0, lo: -root, hi: root });
    }
    if model.alpha() > 1.0 {
        return Err(ScaleError::InfiniteLimit(
            "alpha > 1: the interval is never exited; no hitting probability in the strict Feller sense"
                .into(),
        ));
    }
    let machine = ScaleMachine::new(model, interval, 0.0)?;
    let p_hi = match machine.p_limit(Side::Hi)? {
        PLimit::Finite(v) => v,
        _ => {
            return Err(ScaleError::InfiniteLimit(
                "p diverges at sqrt(a); use the convergence-probability interpretation where both limits are finite"
                    .into(),
            ))
        }
    };
    let p_lo = match machine.p_limit(Side::Lo)? {
        PLimit::Finite(v) => v,
        _ => {
            return Err(ScaleError::InfiniteLimit(
                "p diverges at -sqrt(a) (alpha = 1 with a <= sigma^-4); the convergence probability toward it is 0"
                    .into(),
            ))
        }
    };
    let p_x0 = machine.p(x0)?;
    let value = (p_hi - p_x0) / (p_hi - p_lo);
    Ok(value.clamp(0.0, 1.0))
}

/// Tabulate G, p, v on a strictly increasing interior grid and attach the
/// boundary classification.
pub fn scale_table(
    model: &ModelSpec,
    interval: Interval,
    c: f64,
    grid: &[f64],
) -> Result<ScaleTable, ScaleError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|&x| !interval.contains(x))
    {
        return Err(ScaleError::BadGrid);
    }
    let machine = ScaleMachine::new(model, interval, c)?;
    let mut g_vals = Vec::with_capacity(grid.len());
    let mut p_vals = Vec::with_capacity(grid.len());
    let mut v_vals = Vec::with_capacity(grid.len());
    for &x in grid {
        g_vals.push(machine.g(x)?);
        p_vals.push(machine.p(x)?);
        v_vals.push(machine.v(x)?);
    }
    let boundary = machine.boundary_report()?;
    Ok(ScaleTable {
        interval,
        c,
        grid: grid.to_vec(),
        g_vals,
        p_vals,
        v_vals,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn half_line() -> Interval {
        Interval::new(0.0, f64::INFINITY)
    }

    #[test]
    fn g_matches_closed_form_for_pitchfork() {
        // (lambda*x - x^3)/(sigma^2 x) integrated from 1 to 2 with
        // lambda = 1, sigma = 1, alpha = 0.5: antiderivative x - x^3/3.
        let model = ModelSpec::pitchfork(1.0, 1.0, 0.5).unwrap();
        let g = compute_g(&model, half_line(), 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(g, -4.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn g_matches_closed_form_for_saddle_node() {
        // (1 - x^2)/(1 - x^2)^2 = 1/(1 - x^2): atanh.
        let model = ModelSpec::saddle_node(1.0, 1.0, 1.0).unwrap();
        let iv = Interval::new(-1.0, 1.0);
        let g = compute_g(&model, iv, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(g, 0.5f64.atanh(), epsilon = 1e-10);
    }

    #[test]
    fn g_p_v_vanish_at_reference() {
        let model = ModelSpec::pitchfork(0.5, 1.0, 0.75).unwrap();
        let m = ScaleMachine::new(&model, half_line(), 1.0).unwrap();
        assert_eq!(m.g(1.0).unwrap(), 0.0);
        assert_eq!(m.p(1.0).unwrap(), 0.0);
        assert_eq!(m.v(1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_drift_scale_is_identity() {
        let model = ModelSpec::general_power(crate::model::GeneralPowerParams {
            lambda: 0.0,
            sigma: 1.0,
            alpha: 0.6,
            mu: 0.0,
            kappa: 2.0,
            nu: 0.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: 1.0,
            delta_exp: 0.6,
        })
        .unwrap();
        for &x in &[0.25, 0.5, 2.0, 3.5] {
            let p = scale_p(&model, half_line(), 1.0, x).unwrap();
            assert_abs_diff_eq!(p, x - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn p_is_strictly_increasing() {
        let model = ModelSpec::pitchfork(0.5, 0.5, 0.75).unwrap();
        let machine = ScaleMachine::new(&model, half_line(), 1.0).unwrap();
        let xs = [0.2, 0.5, 0.9, 1.4, 2.0, 3.0];
        let ps: Vec<f64> = xs.iter().map(|&x| machine.p(x).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn v_finite_at_zero_for_sub_unit_alpha() {
        let model = ModelSpec::pitchfork(-0.5, 0.5, 0.6).unwrap();
        let machine = ScaleMachine::new(&model, half_line(), 1.0).unwrap();
        match machine.v_limit(Side::Lo).unwrap() {
            VLimit::Finite(v) => assert!(v > 0.0 && v.is_finite()),
            other => panic!("expected finite v at 0, got {other:?}"),
        }
    }

    #[test]
    fn v_infinite_at_zero_for_alpha_one() {
        let model = ModelSpec::pitchfork(0.3, 1.0, 1.0).unwrap();
        let machine = ScaleMachine::new(&model, half_line(), 1.0).unwrap();
        assert_eq!(machine.v_limit(Side::Lo).unwrap(), VLimit::Infinite);
    }

    #[test]
    fn pitchfork_sub_unit_alpha_exits_almost_surely() {
        let model = ModelSpec::pitchfork(1.0, 1.0, 0.6).unwrap();
        let report = boundary_limits(&model, half_line()).unwrap();
        assert_eq!(report.hi.p_limit, PLimit::PlusInfinity);
        assert!(matches!(report.lo.v_limit, VLimit::Finite(_)));
        assert_eq!(
            report.feller,
            FellerVerdict::ExitAlmostSurelyFinite { through: vec!["0".to_string()] }
        );
    }

    #[test]
    fn saddle_node_negative_a_blows_up_for_small_alpha() {
        let model = ModelSpec::saddle_node(-1.0, 1.0, 0.6).unwrap();
        let report = boundary_limits(&model, Interval::real_line()).unwrap();
        assert!(matches!(report.lo.p_limit, PLimit::Finite(_)));
        assert!(matches!(report.lo.v_limit, VLimit::Finite(_)));
        assert_eq!(report.feller, FellerVerdict::BlowUpFiniteTime { endpoint: "-inf".into() });
    }

    #[test]
    fn saddle_node_above_one_never_exits() {
        // The repelling endpoint -1 has divergent p; the attracting endpoint
        // +1 has finite p but infinite v, so it attracts without being
        // reached and the interval is never left.
        let model = ModelSpec::saddle_node(1.0, 1.0, 1.2).unwrap();
        let report = boundary_limits(&model, Interval::new(-1.0, 1.0)).unwrap();
        assert_eq!(report.lo.p_limit, PLimit::MinusInfinity);
        assert!(matches!(report.hi.p_limit, PLimit::Finite(_)));
        assert_eq!(report.lo.v_limit, VLimit::Infinite);
        assert_eq!(report.hi.v_limit, VLimit::Infinite);
        assert_eq!(report.feller, FellerVerdict::NoExit);
    }

    #[test]
    fn pitchfork_alpha_one_small_lambda_no_exit() {
        // p finite at 0 (r = 2*lambda/sigma^2 < 1) but v infinite there, and
        // p diverges at infinity: the half-line is never left.
        let model = ModelSpec::pitchfork(0.3, 1.0, 1.0).unwrap();
        let report = boundary_limits(&model, half_line()).unwrap();
        assert!(matches!(report.lo.p_limit, PLimit::Finite(_)));
        assert_eq!(report.lo.v_limit, VLimit::Infinite);
        assert_eq!(report.hi.p_limit, PLimit::PlusInfinity);
        assert_eq!(report.feller, FellerVerdict::NoExit);
    }

    #[test]
    fn hitting_probability_matches_arcsin_oracle() {
        // a = 1, sigma = 0.5, alpha = 0.75: G(x) = 4*asin(x), so
        // p'(y) = exp(-8*asin(y)).
        let model = ModelSpec::saddle_node(1.0, 0.5, 0.75).unwrap();
        let p_total = quad::integrate_singular(
            |y: f64| (-8.0 * y.asin()).exp(),
            -1.0,
            1.0,
            EndpointMap::Power(2.0),
            EndpointMap::Power(2.0),
            Tolerance::new(1e-13, 1e-12),
        )
        .unwrap()
        .value;
        let p_up = quad::integrate_singular(
            |y: f64| (-8.0 * y.asin()).exp(),
            0.0,
            1.0,
            EndpointMap::None,
            EndpointMap::Power(2.0),
            Tolerance::new(1e-13, 1e-12),
        )
        .unwrap()
        .value;
        let expected = p_up / p_total;
        let got = hitting_probability(&model, 0.0).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-7);
    }

    #[test]
    fn hitting_probability_is_decreasing_in_x0() {
        let model = ModelSpec::saddle_node(1.0, 0.5, 0.75).unwrap();
        let xs = [-0.8, -0.4, 0.0, 0.4, 0.8];
        let ps: Vec<f64> = xs.iter().map(|&x| hitting_probability(&model, x).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn hitting_probability_alpha_one_convergence_interpretation() {
        // a = 4 > sigma^-4 ~ 2.44: both limits finite, value in (0, 1).
        let model = ModelSpec::saddle_node(4.0, 0.8, 1.0).unwrap();
        let p = hitting_probability(&model, 0.0).unwrap();
        assert!(p > 0.0 && p < 1.0);
        // a = 0.4 < sigma^-4: the lower limit diverges.
        let model = ModelSpec::saddle_node(0.4, 0.8, 1.0).unwrap();
        assert!(matches!(hitting_probability(&model, 0.0), Err(ScaleError::InfiniteLimit(_))));
        // alpha > 1: strict Feller sense rejected.
        let model = ModelSpec::saddle_node(1.0, 0.8, 1.3).unwrap();
        assert!(matches!(hitting_probability(&model, 0.0), Err(ScaleError::InfiniteLimit(_))));
    }

    #[test]
    fn scale_table_invariants() {
        let model = ModelSpec::pitchfork(1.0, 1.0, 0.6).unwrap();
        let grid = [0.2, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0];
        let table = scale_table(&model, half_line(), 1.0, &grid).unwrap();
        assert!(table.p_vals.windows(2).all(|w| w[0] < w[1]));
        let c_idx = table.grid.iter().position(|&x| x == 1.0).unwrap();
        assert_eq!(table.g_vals[c_idx], 0.0);
        assert_eq!(table.v_vals[c_idx], 0.0);
        assert!(table.v_vals.iter().all(|&v| v >= 0.0));
        // v nondecreasing away from c in both directions.
        for w in table.v_vals[..=c_idx].windows(2) {
            assert!(w[0] >= w[1]);
        }
        for w in table.v_vals[c_idx..].windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn refinement_stays_within_reported_error() {
        let model = ModelSpec::pitchfork(1.0, 1.0, 0.75).unwrap();
        let loose = ScaleMachine::with_tolerance(&model, half_line(), 1.0, Tolerance::new(1e-6, 1e-5)).unwrap();
        let tight = ScaleMachine::with_tolerance(&model, half_line(), 1.0, Tolerance::new(1e-12, 1e-11)).unwrap();
        for &x in &[0.3, 0.7, 2.0] {
            let a = loose.p(x).unwrap();
            let b = tight.p(x).unwrap();
            assert!((a - b).abs() < 1e-5, "p({x}): {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_configurations() {
        let model = ModelSpec::pitchfork(1.0, 1.0, 0.6).unwrap();
        assert!(matches!(
            ScaleMachine::new(&model, half_line(), -1.0),
            Err(ScaleError::ReferenceOutsideInterval { .. })
        ));
        let det = ModelSpec::pitchfork(1.0, 0.0, 0.6).unwrap();
        assert!(matches!(
            ScaleMachine::new(&det, half_line(), 1.0),
            Err(ScaleError::DeterministicSystem)
        ));
        let sn = ModelSpec::saddle_node(1.0, 1.0, 0.75).unwrap();
        assert!(matches!(
            ScaleMachine::new(&sn, Interval::new(-2.0, 2.0), 0.0),
            Err(ScaleError::SingularPointInside { .. })
        ));
    }
}
