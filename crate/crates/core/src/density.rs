//! Stationary densities: evaluation of the homogeneous Kolmogorov solution
//! p0, normalization, modes, moments, Lyapunov exponents, P-bifurcation
//! thresholds, and the nonzero-flux particular solution used to verify
//! non-integrability claims.

use crate::interval::Interval;
use crate::model::{ModelKind, ModelSpec};
use crate::quad::{self, EndpointMap, QuadError, Tolerance};
use crate::rootfind::{self, RootError};
use crate::scale::{self, ScaleError, ScaleMachine};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum DensityError {
    #[error("no integrable solution on ({lo}, {hi}): the density is not integrable at {endpoint}")]
    NonIntegrable { lo: String, hi: String, endpoint: String },
    #[error("no stationary density is granted on an interval containing x = {x}")]
    NotGranted { x: f64 },
    #[error("no stationary density is granted on ({lo}, {hi})")]
    NoDensityOnSupport { lo: String, hi: String },
    #[error("{0}")]
    OutsideWindow(String),
    #[error("mode bracketing failed even after widening: {0}")]
    Bracket(RootError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Scale(#[from] ScaleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Mode {
    Interior(f64),
    DivergesAtBoundary { endpoint: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    PeakedInterior,
    DivergentAtBoundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityProfile {
    pub support: Interval,
    /// Normalization: `z * integral of the unnormalized density = 1`.
    pub z: f64,
    pub grid: Vec<f64>,
    /// Normalized density values on `grid`.
    pub values: Vec<f64>,
    pub mode: Mode,
    pub mean: f64,
    pub second_moment: f64,
    pub shape: Shape,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRecord {
    pub parameter: String,
    pub value: f64,
    pub description: String,
}

fn tol() -> Tolerance {
    Tolerance::new(1e-12, 1e-10)
}

fn fmt_endpoint(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Supports on which the classifier grants a stationary density.
pub fn granted_supports(model: &ModelSpec) -> Vec<Interval> {
    crate::classify::classify_stationary(model)
        .into_iter()
        .filter_map(|e| e.support)
        .collect()
}

/// Reference point of the exponential integral in p0: +1 on positive
/// supports, -1 on negative ones, falling back to an interior default.
fn reference_point(support: Interval) -> f64 {
    if support.hi() <= 0.0 && support.contains(-1.0) {
        -1.0
    } else if support.contains(1.0) {
        1.0
    } else if support.contains(-1.0) {
        -1.0
    } else {
        scale::default_reference(support)
    }
}

fn phi(a: f64, sigma: f64) -> f64 {
    1.0 / (sigma * sigma * a.sqrt())
}

/// Closed-form unnormalized saddle-node density (alpha = 1).
fn saddle_node_q0(a: f64, sigma: f64, x: f64) -> f64 {
    if a > 0.0 {
        let root = a.sqrt();
        let p = phi(a, sigma);
        (x + root).abs().powf(-2.0 + p) * (x - root).abs().powf(-2.0 - p)
    } else {
        let r = (-a).sqrt();
        let denom = x * x - a;
        (-2.0 * (x / r).atan() / (sigma * sigma * r)).exp() / (denom * denom)
    }
}

struct Evaluator<'m> {
    model: &'m ModelSpec,
    support: Interval,
    machine: Option<ScaleMachine<'m>>,
    /// Closed form for the saddle node at alpha = 1, bypassing quadrature.
    closed_saddle: bool,
}

impl<'m> Evaluator<'m> {
    fn new(model: &'m ModelSpec, support: Interval) -> Result<Self, DensityError> {
        let closed_saddle = model.kind() == ModelKind::SaddleNode && model.alpha() == 1.0;
        let machine = if closed_saddle {
            None
        } else {
            Some(ScaleMachine::with_tolerance(
                model,
                support,
                reference_point(support),
                tol(),
            )?)
        };
        Ok(Evaluator { model, support, machine, closed_saddle })
    }

    fn q0(&self, x: f64) -> f64 {
        if self.closed_saddle {
            return saddle_node_q0(self.model.a(), self.model.sigma(), x);
        }
        let machine = self.machine.as_ref().unwrap();
        let g = match machine.g(x) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let gamma = self.model.diffusion(x);
        (2.0 * g).exp() / (gamma * gamma)
    }
}

/// Substitution flattening an integrand that behaves like `u^p` near a
/// finite endpoint (`p > -1`). Exponents in (-1, 1) get a power map that
/// renders the transformed integrand C^1; smoother behavior needs none.
fn kink_map(p: f64) -> EndpointMap {
    if p > -1.0 && p < 1.0 && p != 0.0 {
        EndpointMap::Power((2.0 / (1.0 + p)).max(1.0))
    } else {
        EndpointMap::None
    }
}

/// Local power of the unnormalized density at a finite endpoint, together
/// with the integrability verdict; `None` power means faster-than-algebraic
/// decay.
fn density_endpoint(model: &ModelSpec, endpoint: f64, side: scale::Side) -> (bool, Option<f64>) {
    use scale::EndpointInfo;
    match scale::endpoint_info(model, endpoint, side) {
        EndpointInfo::Regular => (true, None),
        EndpointInfo::Singular { ell, cdr, alpha_loc, sigma_loc, .. } => {
            let e = ell - 2.0 * alpha_loc;
            if e > -1.0 {
                // G stays bounded: density ~ u^{-2*alpha_loc}.
                (2.0 * alpha_loc < 1.0, Some(-2.0 * alpha_loc))
            } else if e == -1.0 {
                let r = 2.0 * cdr / (sigma_loc * sigma_loc);
                (r > 1.0, Some(r - 2.0))
            } else {
                (cdr > 0.0, None)
            }
        }
        EndpointInfo::Infinite { coef, e, alpha_tail } => {
            if coef == 0.0 {
                (alpha_tail > 0.5, None)
            } else if coef < 0.0 {
                if e > -1.0 {
                    (true, None)
                } else if e == -1.0 {
                    (2.0 * alpha_tail - 2.0 * coef > 1.0, None)
                } else {
                    (alpha_tail > 0.5, None)
                }
            } else if e > -1.0 {
                (false, None)
            } else if e == -1.0 {
                (2.0 * alpha_tail - 2.0 * coef > 1.0, None)
            } else {
                (alpha_tail > 0.5, None)
            }
        }
    }
}

fn check_integrable(model: &ModelSpec, support: Interval) -> Result<(EndpointMap, EndpointMap), DensityError> {
    let (lo_ok, lo_pow) = density_endpoint(model, support.lo(), scale::Side::Lo);
    let (hi_ok, hi_pow) = density_endpoint(model, support.hi(), scale::Side::Hi);
    let fail = |endpoint: f64| DensityError::NonIntegrable {
        lo: fmt_endpoint(support.lo()),
        hi: fmt_endpoint(support.hi()),
        endpoint: fmt_endpoint(endpoint),
    };
    if !lo_ok {
        return Err(fail(support.lo()));
    }
    if !hi_ok {
        return Err(fail(support.hi()));
    }
    let map = |pow: Option<f64>| pow.map_or(EndpointMap::None, kink_map);
    Ok((map(lo_pow), map(hi_pow)))
}

/// Homogeneous (zero-flux) solution p0 of the stationary Kolmogorov
/// equation, unnormalized. Requires a classifier-granted support containing
/// x; the saddle node at alpha = 1 uses its closed form.
pub fn stationary_density_unnormalized(model: &ModelSpec, x: f64) -> Result<f64, DensityError> {
    let support = granted_supports(model)
        .into_iter()
        .find(|s| s.contains(x))
        .ok_or(DensityError::NotGranted { x })?;
    let eval = Evaluator::new(model, support)?;
    Ok(eval.q0(x))
}

fn integral_of(
    eval: &Evaluator<'_>,
    weight: impl Fn(f64) -> f64,
    maps: (EndpointMap, EndpointMap),
) -> Result<f64, DensityError> {
    let r = quad::integrate_ext(
        |x| weight(x) * eval.q0(x),
        eval.support.lo(),
        eval.support.hi(),
        maps.0,
        maps.1,
        Tolerance::new(1e-10, 1e-9),
    )?;
    Ok(r.value)
}

/// Normalization constant Z with Z * integral(p0) = 1 on the support.
/// Errors name the endpoint where the density fails to be integrable.
pub fn normalize_density(model: &ModelSpec, support: Interval) -> Result<f64, DensityError> {
    let maps = check_integrable(model, support)?;
    let eval = Evaluator::new(model, support)?;
    let mass = integral_of(&eval, |_| 1.0, maps)?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(DensityError::NonIntegrable {
            lo: fmt_endpoint(support.lo()),
            hi: fmt_endpoint(support.hi()),
            endpoint: "(numerical mass was not finite and positive)".into(),
        });
    }
    Ok(1.0 / mass)
}

/// Interior maximum X_m of the pitchfork density for alpha > 1, the root of
/// sigma^2 alpha - lambda X^{2-2alpha} + X^{4-2alpha} = 0 on (0, bracket).
pub fn pitchfork_mode(lambda: f64, sigma: f64, alpha: f64) -> Result<f64, DensityError> {
    if !(lambda > 0.0 && sigma > 0.0 && alpha > 1.0) {
        return Err(DensityError::OutsideWindow(format!(
            "pitchfork mode needs lambda > 0, sigma > 0, alpha > 1 (got lambda={lambda}, sigma={sigma}, alpha={alpha})"
        )));
    }
    let f = |x: f64| sigma * sigma * alpha - lambda * x.powf(2.0 - 2.0 * alpha) + x.powf(4.0 - 2.0 * alpha);
    let solve = |hi: f64| -> Result<f64, RootError> {
        // f -> -inf as X -> 0+, so shrink the lower end until the sign flips.
        let mut lo = hi * 0.5;
        for _ in 0..200 {
            if f(lo) < 0.0 {
                break;
            }
            lo *= 0.5;
        }
        rootfind::bisect(f, lo, hi, 1e-15)
    };
    let hi = lambda.sqrt() * (1.0 + sigma * sigma * alpha);
    solve(hi).or_else(|_| solve(hi * 10.0)).map_err(DensityError::Bracket)
}

fn saddle_window(a: f64, sigma: f64) -> Result<f64, DensityError> {
    let window = sigma.powi(-4);
    if !(a > 0.0 && a < window) {
        return Err(DensityError::OutsideWindow(format!(
            "requires 0 < a < sigma^-4 = {window} (got a = {a})"
        )));
    }
    Ok(window)
}

/// Mean and second moment of the saddle-node density on (-inf, -sqrt(a)) at
/// alpha = 1: m = -Phi sqrt(a) = -1/sigma^2, s = (2 Phi^2 - 1) a.
pub fn saddle_node_moments(a: f64, sigma: f64) -> Result<(f64, f64), DensityError> {
    saddle_window(a, sigma)?;
    let p = phi(a, sigma);
    Ok((-1.0 / (sigma * sigma), (2.0 * p * p - 1.0) * a))
}

/// Location of the density maximum for the saddle node at alpha = 1.
/// For a > 0 the interior peak at -1/(2 sigma^2) exists only for Phi > 2;
/// below that threshold the density diverges at -sqrt(a) (P-bifurcation at
/// sigma^2 sqrt(a) = 1/2). For a < 0 the peak always sits at -1/(2 sigma^2).
pub fn saddle_node_mode(a: f64, sigma: f64) -> Result<Mode, DensityError> {
    if a < 0.0 {
        return Ok(Mode::Interior(-0.5 / (sigma * sigma)));
    }
    saddle_window(a, sigma)?;
    if phi(a, sigma) > 2.0 {
        Ok(Mode::Interior(-0.5 / (sigma * sigma)))
    } else {
        Ok(Mode::DivergesAtBoundary { endpoint: -a.sqrt() })
    }
}

/// Lyapunov exponent of the linearization along the stationary density:
/// l = -2m - 2 sigma^2 s = 2(sigma^4 a - 1)/sigma^2 < 0 on the window.
pub fn lyapunov_exponent_sn(a: f64, sigma: f64) -> Result<f64, DensityError> {
    saddle_window(a, sigma)?;
    let s2 = sigma * sigma;
    Ok(2.0 * (s2 * s2 * a - 1.0) / s2)
}

/// Parameter thresholds where the stationary density changes shape.
pub fn p_bifurcation_points(model: &ModelSpec) -> Vec<ThresholdRecord> {
    let sigma = model.sigma();
    if sigma == 0.0 || model.alpha() != 1.0 {
        return Vec::new();
    }
    match model.kind() {
        ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork => vec![ThresholdRecord {
            parameter: "lambda".into(),
            value: sigma * sigma,
            description: "density flips from divergent at 0 to an interior peak at +/-sqrt(lambda - sigma^2)"
                .into(),
        }],
        ModelKind::SaddleNode => vec![ThresholdRecord {
            parameter: "a".into(),
            value: 0.25 / sigma.powi(4),
            description: "density flips from divergent at -sqrt(a) to an interior peak at -1/(2 sigma^2)"
                .into(),
        }],
        ModelKind::GeneralPower => Vec::new(),
    }
}

fn mode_of(model: &ModelSpec, support: Interval, eval: &Evaluator<'_>) -> Result<Mode, DensityError> {
    let alpha = model.alpha();
    match model.kind() {
        ModelKind::SaddleNode => saddle_node_mode(model.a(), model.sigma()),
        ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork | ModelKind::GeneralPower => {
            let negative = support.hi() <= 0.0;
            if (model.kind() != ModelKind::GeneralPower) && alpha > 1.0 {
                let m = pitchfork_mode(model.lambda(), model.sigma(), alpha)?;
                return Ok(Mode::Interior(if negative { -m } else { m }));
            }
            if alpha == 1.0 && model.kind() != ModelKind::GeneralPower {
                let s2 = model.sigma() * model.sigma();
                return if model.lambda() > s2 {
                    let m = (model.lambda() - s2).sqrt();
                    Ok(Mode::Interior(if negative { -m } else { m }))
                } else {
                    Ok(Mode::DivergesAtBoundary { endpoint: 0.0 })
                };
            }
            // Fallback: maximize log density on a generous window.
            let (lo, hi) = if negative { (-20.0, -1e-8) } else { (1e-8, 20.0) };
            let x = rootfind::golden_max(|x| eval.q0(x).ln(), lo, hi, 1e-12)
                .map_err(DensityError::Bracket)?;
            let boundary = if negative { support.hi() } else { support.lo() };
            if eval.q0(x) > eval.q0(0.5 * (x + boundary)) {
                Ok(Mode::Interior(x))
            } else {
                Ok(Mode::DivergesAtBoundary { endpoint: boundary })
            }
        }
    }
}

/// Full normalized profile on one granted support: Z, moments, mode, shape,
/// and density samples on a window of `n` grid points covering the bulk of
/// the mass (mean +/- 8 standard deviations, clipped to the support).
pub fn density_profile(model: &ModelSpec, support: Interval, n: usize) -> Result<DensityProfile, DensityError> {
    if !granted_supports(model).iter().any(|s| *s == support) {
        return Err(DensityError::NoDensityOnSupport {
            lo: fmt_endpoint(support.lo()),
            hi: fmt_endpoint(support.hi()),
        });
    }
    let maps = check_integrable(model, support)?;
    let eval = Evaluator::new(model, support)?;
    let mass = integral_of(&eval, |_| 1.0, maps)?;
    let z = 1.0 / mass;
    let mean = z * integral_of(&eval, |x| x, maps)?;
    let second_moment = z * integral_of(&eval, |x| x * x, maps)?;
    let mode = mode_of(model, support, &eval)?;
    let shape = match mode {
        Mode::Interior(m) if support.contains(m) => Shape::PeakedInterior,
        _ => Shape::DivergentAtBoundary,
    };

    let std = (second_moment - mean * mean).max(0.0).sqrt();
    let mut lo = support.lo().max(mean - 8.0 * std);
    let mut hi = support.hi().min(mean + 8.0 * std);
    if !(lo < hi) {
        lo = support.lo().max(mean - 1.0);
        hi = support.hi().min(mean + 1.0);
    }
    // Keep samples strictly interior: the density may diverge at a finite
    // boundary.
    let inset = (hi - lo) * 1e-6;
    if lo == support.lo() {
        lo += inset;
    }
    if hi == support.hi() {
        hi -= inset;
    }
    let n = n.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| z * eval.q0(x)).collect();
    Ok(DensityProfile { support, z, grid, values, mode, mean, second_moment, shape })
}

/// Constant-flux (K != 0) solution of the stationary Kolmogorov equation
/// with value `p1` at the reference point:
/// p_K(x) = e^{2G(x)}/gamma^2(x) * (gamma(ref)^2 p1 - 2K int_ref^x e^{-2G}).
/// Used only to verify that no K != 0 solution is an acceptable density.
pub fn particular_solution(
    model: &ModelSpec,
    support: Interval,
    p1: f64,
    k: f64,
    x: f64,
) -> Result<f64, DensityError> {
    if !support.contains(x) {
        return Err(DensityError::NotGranted { x });
    }
    let reference = reference_point(support);
    let machine = ScaleMachine::with_tolerance(model, support, reference, tol())?;
    let g = machine.g(x)?;
    let p_ref_to_x = machine.p(x)?;
    let gamma_x = model.diffusion(x);
    let gamma_ref = model.diffusion(reference);
    Ok((2.0 * g).exp() / (gamma_x * gamma_x) * (gamma_ref * gamma_ref * p1 - 2.0 * k * p_ref_to_x))
}
