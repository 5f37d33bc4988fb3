//! The SDE family dx = (lambda*x + g(x)) dt + gamma(x) dW and its named
//! specializations, with structural assumption checking.
//!
//! Powers of negative arguments follow the signed convention
//! `x^a = sign(x) |x|^a`, which keeps all drift terms odd.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Concrete member of the SDE family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// dx = (lambda x + g(x)) dt + sigma |x|^alpha dW with power-law local
    /// and tail behavior of g.
    GeneralPower,
    /// dx = (lambda x - x^3) dt + sigma |x|^alpha dW.
    Pitchfork,
    /// Same dynamics as `Pitchfork`; tagged for runs below the deterministic
    /// bifurcation threshold (lambda < 0).
    SubcriticalPitchfork,
    /// dx = (-x^2 + a) dt + sigma |x^2 - a|^alpha dW.
    SaddleNode,
}

/// `sign(x) * |x|^a`, exactly zero at `x = 0`.
pub fn signed_power(x: f64, a: f64) -> f64 {
    debug_assert!(a > 0.0, "signed_power requires a positive exponent");
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(a)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("alpha = {alpha} is below the strong-uniqueness threshold 0.5 (non-uniqueness of solutions)")]
    AlphaBelowUniqueness { alpha: f64 },
    #[error("field `{field}` = {value} is not finite")]
    NonFinite { field: &'static str, value: f64 },
    #[error("field `{field}` = {value} must be strictly positive")]
    NonPositive { field: &'static str, value: f64 },
    #[error("field `{field}` = {value} must be nonnegative")]
    Negative { field: &'static str, value: f64 },
    #[error("field `{field}` is required for kind {kind:?}")]
    MissingField { field: &'static str, kind: ModelKind },
}

/// Validated, immutable parameterization of one SDE.
///
/// Construct through the kind-specific constructors or [`RawModelSpec`];
/// derived fields of the named specializations are filled in automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelSpec {
    kind: ModelKind,
    lambda: f64,
    sigma: f64,
    alpha: f64,
    mu: f64,
    kappa: f64,
    nu: f64,
    beta: f64,
    tail_threshold: f64,
    d_coef: f64,
    delta_exp: f64,
    a: f64,
}

/// Loosely-typed mirror of [`ModelSpec`] for JSON input: only the fields
/// relevant to the chosen kind are required, the rest are derived.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModelSpec {
    pub kind: ModelKind,
    pub lambda: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub nu: Option<f64>,
    pub beta: Option<f64>,
    pub tail_threshold: Option<f64>,
    pub d_coef: Option<f64>,
    pub delta_exp: Option<f64>,
    pub a: Option<f64>,
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawModelSpec::deserialize(de)?;
        ModelSpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = ModelError;

    fn try_from(raw: RawModelSpec) -> Result<Self, ModelError> {
        let need = |field: Option<f64>, name: &'static str| {
            field.ok_or(ModelError::MissingField { field: name, kind: raw.kind })
        };
        match raw.kind {
            ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork => {
                let spec = ModelSpec::pitchfork_kind(
                    raw.kind,
                    need(raw.lambda, "lambda")?,
                    need(raw.sigma, "sigma")?,
                    need(raw.alpha, "alpha")?,
                )?;
                Ok(spec)
            }
            ModelKind::SaddleNode => ModelSpec::saddle_node(
                need(raw.a, "a")?,
                need(raw.sigma, "sigma")?,
                need(raw.alpha, "alpha")?,
            ),
            ModelKind::GeneralPower => {
                let sigma = need(raw.sigma, "sigma")?;
                let alpha = need(raw.alpha, "alpha")?;
                ModelSpec::general_power(GeneralPowerParams {
                    lambda: need(raw.lambda, "lambda")?,
                    sigma,
                    alpha,
                    mu: need(raw.mu, "mu")?,
                    kappa: need(raw.kappa, "kappa")?,
                    nu: need(raw.nu, "nu")?,
                    beta: need(raw.beta, "beta")?,
                    tail_threshold: raw.tail_threshold.unwrap_or(1.0),
                    d_coef: raw.d_coef.unwrap_or(if sigma > 0.0 { sigma } else { 1.0 }),
                    delta_exp: raw.delta_exp.unwrap_or(alpha),
                })
            }
        }
    }
}

/// Full parameter set of the general power-law model.
#[derive(Debug, Clone, Copy)]
pub struct GeneralPowerParams {
    pub lambda: f64,
    pub sigma: f64,
    pub alpha: f64,
    /// Local nonlinearity: g(x) ~ mu * x^{1+kappa} near 0.
    pub mu: f64,
    pub kappa: f64,
    /// Tail confinement: g(x) <= -nu * x^{1+beta} for |x| >= tail_threshold.
    pub nu: f64,
    pub beta: f64,
    pub tail_threshold: f64,
    /// Diffusion tail bound gamma(x) <= d_coef * |x|^{delta_exp}.
    pub d_coef: f64,
    pub delta_exp: f64,
}

fn check_finite(field: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { field, value })
    }
}

fn check_positive(field: &'static str, value: f64) -> Result<(), ModelError> {
    check_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NonPositive { field, value })
    }
}

impl ModelSpec {
    fn validate_common(sigma: f64, alpha: f64) -> Result<(), ModelError> {
        check_finite("sigma", sigma)?;
        check_finite("alpha", alpha)?;
        if sigma < 0.0 {
            return Err(ModelError::Negative { field: "sigma", value: sigma });
        }
        if alpha < 0.5 {
            return Err(ModelError::AlphaBelowUniqueness { alpha });
        }
        Ok(())
    }

    fn pitchfork_kind(kind: ModelKind, lambda: f64, sigma: f64, alpha: f64) -> Result<Self, ModelError> {
        check_finite("lambda", lambda)?;
        Self::validate_common(sigma, alpha)?;
        Ok(ModelSpec {
            kind,
            lambda,
            sigma,
            alpha,
            mu: -1.0,
            kappa: 2.0,
            nu: 1.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: if sigma > 0.0 { sigma } else { 1.0 },
            delta_exp: alpha,
            a: 0.0,
        })
    }

    /// dx = (lambda x - x^3) dt + sigma |x|^alpha dW.
    pub fn pitchfork(lambda: f64, sigma: f64, alpha: f64) -> Result<Self, ModelError> {
        Self::pitchfork_kind(ModelKind::Pitchfork, lambda, sigma, alpha)
    }

    /// Pitchfork dynamics tagged as subcritical (lambda < 0 runs).
    pub fn subcritical_pitchfork(lambda: f64, sigma: f64, alpha: f64) -> Result<Self, ModelError> {
        Self::pitchfork_kind(ModelKind::SubcriticalPitchfork, lambda, sigma, alpha)
    }

    /// dx = (-x^2 + a) dt + sigma |x^2 - a|^alpha dW.
    pub fn saddle_node(a: f64, sigma: f64, alpha: f64) -> Result<Self, ModelError> {
        check_finite("a", a)?;
        Self::validate_common(sigma, alpha)?;
        Ok(ModelSpec {
            kind: ModelKind::SaddleNode,
            lambda: 0.0,
            sigma,
            alpha,
            mu: -1.0,
            kappa: 1.0,
            nu: 1.0,
            beta: 1.0,
            tail_threshold: (1.0_f64).max(2.0 * a.abs().sqrt()),
            d_coef: if sigma > 0.0 { sigma } else { 1.0 },
            delta_exp: 2.0 * alpha,
            a,
        })
    }

    /// General power-law model; see [`GeneralPowerParams`] for the roles of
    /// the coefficients.
    pub fn general_power(p: GeneralPowerParams) -> Result<Self, ModelError> {
        check_finite("lambda", p.lambda)?;
        check_finite("mu", p.mu)?;
        check_finite("nu", p.nu)?;
        Self::validate_common(p.sigma, p.alpha)?;
        check_positive("kappa", p.kappa)?;
        check_positive("beta", p.beta)?;
        check_positive("tail_threshold", p.tail_threshold)?;
        check_positive("d_coef", p.d_coef)?;
        check_finite("delta_exp", p.delta_exp)?;
        if p.delta_exp < 0.0 {
            return Err(ModelError::Negative { field: "delta_exp", value: p.delta_exp });
        }
        Ok(ModelSpec {
            kind: ModelKind::GeneralPower,
            lambda: p.lambda,
            sigma: p.sigma,
            alpha: p.alpha,
            mu: p.mu,
            kappa: p.kappa,
            nu: p.nu,
            beta: p.beta,
            tail_threshold: p.tail_threshold,
            d_coef: p.d_coef,
            delta_exp: p.delta_exp,
            a: 0.0,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn tail_threshold(&self) -> f64 {
        self.tail_threshold
    }
    pub fn d_coef(&self) -> f64 {
        self.d_coef
    }
    pub fn delta_exp(&self) -> f64 {
        self.delta_exp
    }
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Drift coefficient lambda*x + g(x) (or -x^2 + a for the saddle-node).
    pub fn drift(&self, x: f64) -> f64 {
        match self.kind {
            ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork => self.lambda * x - x * x * x,
            // Factored so the (x -/+ sqrt(a)) offsets stay exact next to the
            // singular points, where x*x - a would cancel catastrophically.
            ModelKind::SaddleNode => {
                if self.a > 0.0 {
                    let r = self.a.sqrt();
                    -(x - r) * (x + r)
                } else {
                    -x * x + self.a
                }
            }
            ModelKind::GeneralPower => self.lambda * x + self.general_g(x),
        }
    }

    /// Nonlinear drift part g(x) of the general model: the local power law
    /// inside |x| <= A, the tail power law beyond 2A, and a linear blend of
    /// the two on A <= |x| <= 2A so the drift stays continuous.
    fn general_g(&self, x: f64) -> f64 {
        let ax = x.abs();
        let a_thr = self.tail_threshold;
        let local = self.mu * signed_power(x, 1.0 + self.kappa);
        if ax <= a_thr {
            return local;
        }
        let tail = -self.nu * signed_power(x, 1.0 + self.beta);
        if ax >= 2.0 * a_thr {
            return tail;
        }
        let w = (ax - a_thr) / a_thr;
        (1.0 - w) * local + w * tail
    }

    /// Diffusion coefficient gamma(x) >= 0.
    pub fn diffusion(&self, x: f64) -> f64 {
        match self.kind {
            ModelKind::SaddleNode => {
                let q = if self.a > 0.0 {
                    let r = self.a.sqrt();
                    ((x - r) * (x + r)).abs()
                } else {
                    x * x - self.a
                };
                self.sigma * q.powf(self.alpha)
            }
            _ => self.sigma * x.abs().powf(self.alpha),
        }
    }

    /// Points where drift and diffusion vanish simultaneously.
    pub fn singular_points(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::SaddleNode => {
                if self.a > 0.0 {
                    let r = self.a.sqrt();
                    vec![-r, r]
                } else {
                    vec![]
                }
            }
            _ => vec![0.0],
        }
    }

    /// Whether the tail-confinement condition H6 holds:
    /// nu >= 0, or nu < 0 with delta_exp > 1 + beta/2.
    pub fn h6_holds(&self) -> bool {
        self.nu >= 0.0 || self.delta_exp > 1.0 + self.beta / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssumptionStatus {
    Satisfied,
    Violated,
    NotCheckable,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionVerdict {
    pub status: AssumptionStatus,
    pub witness: String,
}

impl AssumptionVerdict {
    fn ok(witness: impl Into<String>) -> Self {
        AssumptionVerdict { status: AssumptionStatus::Satisfied, witness: witness.into() }
    }
    fn bad(witness: impl Into<String>) -> Self {
        AssumptionVerdict { status: AssumptionStatus::Violated, witness: witness.into() }
    }
}

/// Structural-assumption report:
/// H1 local drift power law, H2 drift tail confinement, H3 local diffusion
/// power law, H4 diffusion tail bound, H5 single zero of the diffusion,
/// H6 tail balance (nu >= 0, or nu < 0 and delta > 1 + beta/2).
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub h1: AssumptionVerdict,
    pub h2: AssumptionVerdict,
    pub h3: AssumptionVerdict,
    pub h4: AssumptionVerdict,
    pub h5: AssumptionVerdict,
    pub h6: AssumptionVerdict,
}

/// Evaluate H1-H6 symbolically from the parameterization.
pub fn check_assumptions(model: &ModelSpec) -> AssumptionReport {
    let h1 = AssumptionVerdict::ok(format!(
        "g(x) ~ {}*x^{} near 0 (kappa = {} > 0)",
        model.mu,
        1.0 + model.kappa,
        model.kappa
    ));
    let h2 = if model.nu >= 0.0 {
        AssumptionVerdict::ok(format!(
            "g(x) <= -{}*x^{} for |x| >= {}",
            model.nu,
            1.0 + model.beta,
            model.tail_threshold
        ))
    } else {
        AssumptionVerdict::ok(format!(
            "tail coefficient nu = {} < 0 admissible with bound -nu*x^{}",
            model.nu,
            1.0 + model.beta
        ))
    };
    let h3 = AssumptionVerdict::ok(format!(
        "gamma(x) ~ {}*|x|^{} at the singular point, alpha = {} >= 1/2",
        model.sigma, model.alpha, model.alpha
    ));
    let h4 = AssumptionVerdict::ok(format!(
        "gamma(x) <= {}*|x|^{} for |x| >= {}",
        model.d_coef, model.delta_exp, model.tail_threshold
    ));
    let h5 = match model.kind {
        ModelKind::SaddleNode => {
            if model.a > 0.0 {
                AssumptionVerdict::bad(format!(
                    "gamma vanishes at two points -sqrt(a) and +sqrt(a) (a = {})",
                    model.a
                ))
            } else if model.a == 0.0 {
                AssumptionVerdict::ok("gamma vanishes only at 0 (a = 0)")
            } else {
                AssumptionVerdict::bad(format!("gamma vanishes nowhere (a = {} < 0)", model.a))
            }
        }
        _ => AssumptionVerdict::ok("gamma vanishes only at 0"),
    };
    let h6 = if model.nu >= 0.0 {
        AssumptionVerdict::ok(format!("nu = {} >= 0", model.nu))
    } else if model.delta_exp > 1.0 + model.beta / 2.0 {
        AssumptionVerdict::ok(format!(
            "nu = {} < 0 but delta = {} > 1 + beta/2 = {}",
            model.nu,
            model.delta_exp,
            1.0 + model.beta / 2.0
        ))
    } else {
        AssumptionVerdict::bad(format!(
            "nu = {} < 0 and delta = {} <= 1 + beta/2 = {}",
            model.nu,
            model.delta_exp,
            1.0 + model.beta / 2.0
        ))
    };
    AssumptionReport { h1, h2, h3, h4, h5, h6 }
}
