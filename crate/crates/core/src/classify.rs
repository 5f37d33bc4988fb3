//! Analytic decision engine: maps a [`ModelSpec`] to verdicts on existence,
//! stability of the singular points, absorption, blow-up, the stationary
//! catalog, and quasi-stationary behavior.
//!
//! Every verdict carries the deciding inequality as text so reports are
//! self-auditing. Equality cases return `Boundary` instead of guessing, and
//! parameter corners outside every known result return `Unknown`.

use crate::interval::Interval;
use crate::model::{check_assumptions, AssumptionStatus, ModelKind, ModelSpec};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StabilityStatus {
    AsymptoticallyStableInProbability,
    StableInProbability,
    AlmostSurelyExponentiallyStable,
    UnstableInProbability,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub point: f64,
    pub status: StabilityStatus,
    pub condition: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Existence {
    UniqueStrong,
    NonUnique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Blowup {
    Never,
    AlmostSurelyFiniteTime,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Absorption {
    AlmostSurelyFinite,
    Never,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QsdVerdict {
    /// Backed by a theorem (alpha in [1/2, 3/4), confining tail).
    Exists,
    /// Backed by simulation evidence only (alpha in [3/4, 1)).
    NumericallyAbsent,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "form")]
pub enum StationaryForm {
    DiracAtPoint { point: f64 },
    HomogeneousDensity { note: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct StationaryEntry {
    /// Interval carrying the density; `None` for a Dirac measure, whose
    /// location is in `form`.
    pub support: Option<Interval>,
    #[serde(flatten)]
    pub form: StationaryForm,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExistenceVerdict {
    pub existence: Existence,
    pub blowup: Blowup,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub existence: Existence,
    pub existence_note: String,
    pub blowup: Blowup,
    pub absorption: Absorption,
    pub absorption_condition: String,
    /// Stability verdict per singular point (one entry for the kinds with a
    /// single singular point at 0; two for the saddle-node with a > 0).
    pub delta0: Vec<StabilityVerdict>,
    pub stationary: Vec<StationaryEntry>,
    pub qsd: QsdVerdict,
    pub qsd_condition: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ClassifyError {
    #[error("sigma = 0: deterministic system, stochastic stability verdicts do not apply")]
    DeterministicSystem,
    #[error("model kind {0:?} has no singular point at 0; use classify_saddle_node")]
    NoSingularZero(ModelKind),
}

fn all_assumptions_hold(model: &ModelSpec) -> bool {
    let rep = check_assumptions(model);
    [rep.h1, rep.h2, rep.h3, rep.h4, rep.h5, rep.h6]
        .iter()
        .all(|v| v.status == AssumptionStatus::Satisfied)
}

/// Existence/uniqueness of the strong solution together with the blow-up
/// verdict implied by the tail assumptions.
pub fn classify_existence(model: &ModelSpec) -> ExistenceVerdict {
    // alpha >= 1/2 is enforced at construction, so strong uniqueness always
    // holds for accepted specs.
    let blowup = classify_blowup(model);
    let note = match blowup {
        Blowup::Never => "unique strong solution; the solution never blows up in finite time".to_string(),
        Blowup::AlmostSurelyFiniteTime => {
            "unique strong solution up to the explosion time; solutions almost surely blow up in finite time"
                .to_string()
        }
        Blowup::Unknown => {
            "unique strong solution; blow-up not settled for these parameters".to_string()
        }
    };
    ExistenceVerdict { existence: Existence::UniqueStrong, blowup, note }
}

fn classify_blowup(model: &ModelSpec) -> Blowup {
    match model.kind() {
        ModelKind::SaddleNode => {
            let a = model.a();
            if model.alpha() >= 1.0 {
                Blowup::Never
            } else if a < 0.0 {
                Blowup::AlmostSurelyFiniteTime
            } else {
                // a >= 0, alpha < 1: escape below -sqrt(a) is possible but
                // not covered by a theorem.
                Blowup::Unknown
            }
        }
        _ => {
            if model.h6_holds() {
                Blowup::Never
            } else if model.delta_exp() < 1.0 + model.beta() / 2.0 {
                // Repelling tail stronger than the diffusion bound.
                Blowup::AlmostSurelyFiniteTime
            } else {
                Blowup::Unknown
            }
        }
    }
}

/// Stability verdict for the Dirac measure at the singular point 0.
pub fn classify_delta0(model: &ModelSpec) -> Result<StabilityVerdict, ClassifyError> {
    if model.kind() == ModelKind::SaddleNode {
        return Err(ClassifyError::NoSingularZero(model.kind()));
    }
    if model.sigma() == 0.0 {
        return Err(ClassifyError::DeterministicSystem);
    }
    let alpha = model.alpha();
    let lambda = model.lambda();
    let sigma = model.sigma();
    let verdict = if alpha < 1.0 {
        StabilityVerdict {
            point: 0.0,
            status: StabilityStatus::AsymptoticallyStableInProbability,
            condition: format!(
                "alpha = {alpha} < 1: asymptotically stable in probability for every lambda and sigma != 0"
            ),
        }
    } else if alpha == 1.0 {
        let threshold = sigma * sigma / 2.0;
        if lambda < threshold {
            let exact_linear_noise = matches!(
                model.kind(),
                ModelKind::Pitchfork | ModelKind::SubcriticalPitchfork
            );
            StabilityVerdict {
                point: 0.0,
                status: if exact_linear_noise {
                    StabilityStatus::AlmostSurelyExponentiallyStable
                } else {
                    StabilityStatus::AsymptoticallyStableInProbability
                },
                condition: format!("alpha = 1: lambda = {lambda} < sigma^2/2 = {threshold}"),
            }
        } else if lambda > threshold {
            StabilityVerdict {
                point: 0.0,
                status: StabilityStatus::UnstableInProbability,
                condition: format!("alpha = 1: lambda = {lambda} > sigma^2/2 = {threshold}"),
            }
        } else {
            StabilityVerdict {
                point: 0.0,
                status: StabilityStatus::Boundary,
                condition: format!("alpha = 1: lambda = sigma^2/2 = {threshold} exactly"),
            }
        }
    } else if lambda < 0.0 {
        StabilityVerdict {
            point: 0.0,
            status: StabilityStatus::StableInProbability,
            condition: format!("alpha = {alpha} > 1: lambda = {lambda} < 0"),
        }
    } else if lambda > 0.0 {
        StabilityVerdict {
            point: 0.0,
            status: StabilityStatus::UnstableInProbability,
            condition: format!("alpha = {alpha} > 1: lambda = {lambda} > 0"),
        }
    } else {
        StabilityVerdict {
            point: 0.0,
            status: StabilityStatus::Boundary,
            condition: format!("alpha = {alpha} > 1: lambda = 0 exactly"),
        }
    };
    Ok(verdict)
}

/// Whether the process started away from a singular point hits one in
/// almost surely finite time.
pub fn classify_absorption(model: &ModelSpec) -> (Absorption, String) {
    let alpha = model.alpha();
    match model.kind() {
        ModelKind::SaddleNode => {
            let a = model.a();
            if a <= 0.0 {
                (Absorption::Never, format!("a = {a} <= 0: no singular point to absorb at"))
            } else if alpha >= 1.0 {
                (
                    Absorption::Never,
                    format!("alpha = {alpha} >= 1: +/-sqrt(a) are never reached from the interior"),
                )
            } else {
                (
                    Absorption::AlmostSurelyFinite,
                    format!(
                        "alpha = {alpha} < 1: exit of (-sqrt(a), sqrt(a)) is almost surely finite; \
                         absorption from above sqrt(a) is open for alpha < 3/4"
                    ),
                )
            }
        }
        _ => {
            if alpha >= 1.0 {
                return (
                    Absorption::Never,
                    format!("alpha = {alpha} >= 1: the singular point 0 is never reached"),
                );
            }
            let sigma = model.sigma();
            let nu = model.nu();
            let lambda = model.lambda();
            if sigma > 0.0 && (nu > 0.0 || (nu == 0.0 && lambda < 0.0)) {
                (
                    Absorption::AlmostSurelyFinite,
                    format!(
                        "alpha = {alpha} < 1, sigma = {sigma} > 0, nu = {nu}, lambda = {lambda}: \
                         the hitting time of 0 is almost surely finite"
                    ),
                )
            } else {
                (
                    Absorption::Unknown,
                    format!(
                        "alpha = {alpha} < 1 but (sigma = {sigma}, nu = {nu}, lambda = {lambda}) \
                         falls outside the hitting-time hypotheses"
                    ),
                )
            }
        }
    }
}

/// Catalog of stationary measures: Diracs at singular points plus the
/// half-line (or full-line) densities where the Kolmogorov equation has an
/// integrable solution.
pub fn classify_stationary(model: &ModelSpec) -> Vec<StationaryEntry> {
    let alpha = model.alpha();
    let mut out = Vec::new();
    for p in model.singular_points() {
        out.push(StationaryEntry {
            support: None,
            form: StationaryForm::DiracAtPoint { point: p },
        });
    }
    match model.kind() {
        ModelKind::SaddleNode => {
            let a = model.a();
            let sigma = model.sigma();
            if alpha == 1.0 && sigma > 0.0 {
                let window = sigma.powi(-4);
                if a > 0.0 && a < window {
                    out.push(StationaryEntry {
                        support: Some(Interval::new(f64::NEG_INFINITY, -a.sqrt())),
                        form: StationaryForm::HomogeneousDensity {
                            note: format!(
                                "density on (-inf, -sqrt(a)); exists since 0 < a = {a} < sigma^-4 = {window}"
                            ),
                        },
                    });
                } else if a < 0.0 {
                    out.push(StationaryEntry {
                        support: Some(Interval::real_line()),
                        form: StationaryForm::HomogeneousDensity {
                            note: format!("density on the real line (a = {a} < 0)"),
                        },
                    });
                }
            }
        }
        _ => {
            let lambda = model.lambda();
            let sigma = model.sigma();
            let grants = if sigma == 0.0 {
                false
            } else if alpha == 1.0 {
                lambda >= sigma * sigma / 2.0 && model.h6_holds()
            } else if alpha > 1.0 {
                lambda > 0.0 && model.h6_holds()
            } else {
                false
            };
            if grants {
                let note = if alpha == 1.0 {
                    format!(
                        "half-line density; lambda = {lambda} >= sigma^2/2 = {} and the tail is confining",
                        sigma * sigma / 2.0
                    )
                } else {
                    format!("half-line density; alpha = {alpha} > 1, lambda = {lambda} > 0 and the tail is confining")
                };
                out.push(StationaryEntry {
                    support: Some(Interval::new(0.0, f64::INFINITY)),
                    form: StationaryForm::HomogeneousDensity { note: note.clone() },
                });
                out.push(StationaryEntry {
                    support: Some(Interval::new(f64::NEG_INFINITY, 0.0)),
                    form: StationaryForm::HomogeneousDensity { note },
                });
            }
        }
    }
    out
}

/// Quasi-stationary-distribution verdict with the deciding condition.
pub fn classify_qsd(model: &ModelSpec) -> (QsdVerdict, String) {
    let alpha = model.alpha();
    if model.kind() == ModelKind::SaddleNode {
        return (
            QsdVerdict::NotApplicable,
            "two singular points; the quasi-stationary theory covered here assumes a single absorbing point".into(),
        );
    }
    if alpha >= 1.0 {
        return (
            QsdVerdict::NotApplicable,
            format!("alpha = {alpha} >= 1: no absorption, conditioning on survival is vacuous"),
        );
    }
    if model.nu() <= 0.0 || !all_assumptions_hold(model) {
        return (
            QsdVerdict::NotApplicable,
            format!(
                "nu = {} or a structural assumption fails; the quasi-stationary result does not apply",
                model.nu()
            ),
        );
    }
    if alpha < 0.75 {
        (
            QsdVerdict::Exists,
            format!("alpha = {alpha} in [1/2, 3/4): exponential convergence to a quasi-stationary distribution"),
        )
    } else {
        (
            QsdVerdict::NumericallyAbsent,
            format!(
                "alpha = {alpha} in [3/4, 1): simulations indicate no quasi-stationary distribution \
                 (numerical evidence, not a theorem)"
            ),
        )
    }
}

/// Full regime report for any model kind.
pub fn classify(model: &ModelSpec) -> Result<RegimeReport, ClassifyError> {
    if model.kind() == ModelKind::SaddleNode {
        return classify_saddle_node(model.a(), model.sigma(), model.alpha());
    }
    let existence = classify_existence(model);
    let (absorption, absorption_condition) = classify_absorption(model);
    let delta0 = classify_delta0(model)?;
    let stationary = classify_stationary(model);
    let (qsd, qsd_condition) = classify_qsd(model);
    Ok(RegimeReport {
        existence: existence.existence,
        existence_note: existence.note,
        blowup: existence.blowup,
        absorption,
        absorption_condition,
        delta0: vec![delta0],
        stationary,
        qsd,
        qsd_condition,
    })
}

/// Regime report for dx = (-x^2 + a) dt + sigma |x^2 - a|^alpha dW.
pub fn classify_saddle_node(a: f64, sigma: f64, alpha: f64) -> Result<RegimeReport, ClassifyError> {
    let model = ModelSpec::saddle_node(a, sigma, alpha).map_err(|_| ClassifyError::DeterministicSystem)?;
    if sigma == 0.0 {
        return Err(ClassifyError::DeterministicSystem);
    }
    let existence = classify_existence(&model);
    let (absorption, absorption_condition) = classify_absorption(&model);
    let mut delta0 = Vec::new();
    if a > 0.0 {
        let r = a.sqrt();
        if alpha < 1.0 {
            for p in [r, -r] {
                delta0.push(StabilityVerdict {
                    point: p,
                    status: StabilityStatus::StableInProbability,
                    condition: format!("alpha = {alpha} < 1: both Dirac measures are stable in probability"),
                });
            }
        } else if alpha == 1.0 {
            delta0.push(StabilityVerdict {
                point: r,
                status: StabilityStatus::StableInProbability,
                condition: "alpha = 1: the upper point sqrt(a) is stable for every a > 0, sigma".into(),
            });
            let window = sigma.powi(-4);
            let (status, condition) = if a > window {
                (
                    StabilityStatus::StableInProbability,
                    format!("alpha = 1: a = {a} > sigma^-4 = {window}"),
                )
            } else if a < window {
                (
                    StabilityStatus::UnstableInProbability,
                    format!("alpha = 1: a = {a} < sigma^-4 = {window}"),
                )
            } else {
                (
                    StabilityStatus::Boundary,
                    format!("alpha = 1: a = sigma^-4 = {window} exactly"),
                )
            };
            delta0.push(StabilityVerdict { point: -r, status, condition });
        } else {
            delta0.push(StabilityVerdict {
                point: r,
                status: StabilityStatus::StableInProbability,
                condition: format!("alpha = {alpha} > 1: local linearization -2*sqrt(a) < 0"),
            });
            delta0.push(StabilityVerdict {
                point: -r,
                status: StabilityStatus::UnstableInProbability,
                condition: format!("alpha = {alpha} > 1: local linearization +2*sqrt(a) > 0"),
            });
        }
    }
    let stationary = classify_stationary(&model);
    let (qsd, qsd_condition) = classify_qsd(&model);
    Ok(RegimeReport {
        existence: existence.existence,
        existence_note: existence.note,
        blowup: existence.blowup,
        absorption,
        absorption_condition,
        delta0,
        stationary,
        qsd,
        qsd_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pf(lambda: f64, sigma: f64, alpha: f64) -> ModelSpec {
        ModelSpec::pitchfork(lambda, sigma, alpha).unwrap()
    }

    #[test]
    fn delta0_below_one_is_always_stable() {
        let v = classify_delta0(&pf(10.0, 1.0, 0.6)).unwrap();
        assert_eq!(v.status, StabilityStatus::AsymptoticallyStableInProbability);
    }

    #[test]
    fn delta0_at_one_splits_on_lambda_vs_half_sigma_squared() {
        assert_eq!(
            classify_delta0(&pf(0.3, 1.0, 1.0)).unwrap().status,
            StabilityStatus::AlmostSurelyExponentiallyStable
        );
        assert_eq!(
            classify_delta0(&pf(0.7, 1.0, 1.0)).unwrap().status,
            StabilityStatus::UnstableInProbability
        );
        assert_eq!(classify_delta0(&pf(0.5, 1.0, 1.0)).unwrap().status, StabilityStatus::Boundary);
    }

    #[test]
    fn delta0_above_one_splits_on_sign_of_lambda() {
        assert_eq!(
            classify_delta0(&pf(-1.0, 1.0, 1.5)).unwrap().status,
            StabilityStatus::StableInProbability
        );
        assert_eq!(
            classify_delta0(&pf(2.0, 1.0, 1.5)).unwrap().status,
            StabilityStatus::UnstableInProbability
        );
        assert_eq!(classify_delta0(&pf(0.0, 1.0, 1.5)).unwrap().status, StabilityStatus::Boundary);
    }

    #[test]
    fn delta0_rejects_deterministic_system() {
        assert_eq!(classify_delta0(&pf(1.0, 0.0, 1.0)), Err(ClassifyError::DeterministicSystem));
    }

    #[test]
    fn scaling_consistency_at_alpha_one() {
        // Verdicts depend on (lambda, sigma) only through sign(lambda - sigma^2/2).
        let s1 = classify_delta0(&pf(0.3, 1.0, 1.0)).unwrap().status;
        let s2 = classify_delta0(&pf(0.02, 0.5, 1.0)).unwrap().status;
        assert_eq!(s1, s2);
        let u1 = classify_delta0(&pf(0.7, 1.0, 1.0)).unwrap().status;
        let u2 = classify_delta0(&pf(0.2, 0.5, 1.0)).unwrap().status;
        assert_eq!(u1, u2);
    }

    #[test]
    fn absorption_verdicts() {
        assert_eq!(classify_absorption(&pf(2.0, 0.5, 0.6)).0, Absorption::AlmostSurelyFinite);
        assert_eq!(classify_absorption(&pf(2.0, 0.5, 1.2)).0, Absorption::Never);
        let gp = ModelSpec::general_power(crate::model::GeneralPowerParams {
            lambda: -1.0,
            sigma: 1.0,
            alpha: 0.7,
            mu: -1.0,
            kappa: 2.0,
            nu: 0.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: 1.0,
            delta_exp: 0.7,
        })
        .unwrap();
        assert_eq!(classify_absorption(&gp).0, Absorption::AlmostSurelyFinite);
        let gp_unknown = ModelSpec::general_power(crate::model::GeneralPowerParams {
            lambda: 1.0,
            sigma: 1.0,
            alpha: 0.7,
            mu: -1.0,
            kappa: 2.0,
            nu: 0.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: 1.0,
            delta_exp: 0.7,
        })
        .unwrap();
        assert_eq!(classify_absorption(&gp_unknown).0, Absorption::Unknown);
    }

    #[test]
    fn stationary_catalog() {
        let entries = classify_stationary(&pf(1.0, 1.0, 1.0));
        assert_eq!(entries.len(), 3);
        let entries = classify_stationary(&pf(-1.0, 1.0, 2.0));
        assert_eq!(entries.len(), 1);
        assert!(matches!(entries[0].form, StationaryForm::DiracAtPoint { point } if point == 0.0));
        let gp = ModelSpec::general_power(crate::model::GeneralPowerParams {
            lambda: 1.0,
            sigma: 1.0,
            alpha: 2.0,
            mu: -1.0,
            kappa: 2.0,
            nu: -1.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: 1.0,
            delta_exp: 1.0,
        })
        .unwrap();
        assert_eq!(classify_stationary(&gp).len(), 1);
    }

    #[test]
    fn absorbing_regimes_carry_no_density() {
        for &alpha in &[0.5, 0.6, 0.75, 0.85] {
            for &lambda in &[-1.0, 0.5, 2.0] {
                let m = pf(lambda, 0.5, alpha);
                assert_eq!(classify_absorption(&m).0, Absorption::AlmostSurelyFinite);
                assert!(classify_stationary(&m)
                    .iter()
                    .all(|e| matches!(e.form, StationaryForm::DiracAtPoint { .. })));
            }
        }
    }

    #[test]
    fn qsd_thresholds() {
        let sub = ModelSpec::subcritical_pitchfork(-0.5, 0.5, 0.6).unwrap();
        assert_eq!(classify_qsd(&sub).0, QsdVerdict::Exists);
        let sub = ModelSpec::subcritical_pitchfork(-0.5, 0.5, 0.85).unwrap();
        assert_eq!(classify_qsd(&sub).0, QsdVerdict::NumericallyAbsent);
        let sup = pf(1.0, 1.0, 1.3);
        assert_eq!(classify_qsd(&sup).0, QsdVerdict::NotApplicable);
    }

    #[test]
    fn saddle_node_regimes() {
        // a = 0.4, sigma = 0.8, alpha = 1: lower point unstable, density on
        // (-inf, -sqrt(a)).
        let rep = classify_saddle_node(0.4, 0.8, 1.0).unwrap();
        let lower = rep.delta0.iter().find(|v| v.point < 0.0).unwrap();
        assert_eq!(lower.status, StabilityStatus::UnstableInProbability);
        assert!(rep
            .stationary
            .iter()
            .any(|e| matches!(e.form, StationaryForm::HomogeneousDensity { .. })));

        // a = 4 > sigma^-4: both stable, no density.
        let rep = classify_saddle_node(4.0, 0.8, 1.0).unwrap();
        assert!(rep.delta0.iter().all(|v| v.status == StabilityStatus::StableInProbability));
        assert!(rep
            .stationary
            .iter()
            .all(|e| matches!(e.form, StationaryForm::DiracAtPoint { .. })));

        // alpha > 1: upper stable, lower unstable, no blow-up.
        let rep = classify_saddle_node(1.0, 1.0, 1.5).unwrap();
        assert_eq!(rep.blowup, Blowup::Never);
        let upper = rep.delta0.iter().find(|v| v.point > 0.0).unwrap();
        let lower = rep.delta0.iter().find(|v| v.point < 0.0).unwrap();
        assert_eq!(upper.status, StabilityStatus::StableInProbability);
        assert_eq!(lower.status, StabilityStatus::UnstableInProbability);

        // a < 0, alpha < 1: almost sure blow-up, density absent, no points.
        let rep = classify_saddle_node(-1.0, 0.6, 0.6).unwrap();
        assert_eq!(rep.blowup, Blowup::AlmostSurelyFiniteTime);
        assert!(rep.delta0.is_empty());

        // a < 0, alpha = 1: full-line density.
        let rep = classify_saddle_node(-1.0, 1.0, 1.0).unwrap();
        assert_eq!(rep.blowup, Blowup::Never);
        assert!(rep
            .stationary
            .iter()
            .any(|e| matches!(e.form, StationaryForm::HomogeneousDensity { .. })));
    }

    #[test]
    fn saddle_node_flips_exactly_at_the_window_edge() {
        // black_box keeps the constant from being folded at compile time,
        // which could round differently from the library's runtime powi.
        let sigma: f64 = std::hint::black_box(0.8);
        let window = sigma.powi(-4);
        let below = classify_saddle_node(window * 0.999, sigma, 1.0).unwrap();
        let at = classify_saddle_node(window, sigma, 1.0).unwrap();
        let above = classify_saddle_node(window * 1.001, sigma, 1.0).unwrap();
        let status = |r: &RegimeReport| r.delta0.iter().find(|v| v.point < 0.0).unwrap().status;
        assert_eq!(status(&below), StabilityStatus::UnstableInProbability);
        assert_eq!(status(&at), StabilityStatus::Boundary);
        assert_eq!(status(&above), StabilityStatus::StableInProbability);
    }

    #[test]
    fn existence_examples() {
        let v = classify_existence(&pf(1.0, 1.0, 0.6));
        assert_eq!(v.existence, Existence::UniqueStrong);
        assert_eq!(v.blowup, Blowup::Never);
        let gp = ModelSpec::general_power(crate::model::GeneralPowerParams {
            lambda: 1.0,
            sigma: 1.0,
            alpha: 2.0,
            mu: -1.0,
            kappa: 2.0,
            nu: -1.0,
            beta: 2.0,
            tail_threshold: 1.0,
            d_coef: 1.0,
            delta_exp: 3.0,
        })
        .unwrap();
        assert_eq!(classify_existence(&gp).blowup, Blowup::Never);
        let sn = ModelSpec::saddle_node(-1.0, 1.0, 0.6).unwrap();
        assert_eq!(classify_existence(&sn).blowup, Blowup::AlmostSurelyFiniteTime);
    }

    #[test]
    fn report_serializes() {
        let rep = classify(&pf(1.0, 1.0, 1.0)).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"qsd\""));
        assert!(text.contains("\"absorption\""));
    }
}
