//! Freidlin–Wentzell quasipotential for the absorption time of the locally
//! linear-plus-power drift: U(x), its closed form at x = 0, and the
//! asymptotic regimes of the small-noise absorption time as the Hölder
//! exponent approaches 1.

use crate::quad::{self, EndpointMap, QuadError, Tolerance};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum LdpError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Regime {
    SubExponential,
    Exponential { limit: f64 },
    SuperExponential,
}

/// Constraint value c = lim lambda/(1 - alpha), serialized as "inf" when
/// infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum CParam {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasipotentialReport {
    pub mu: f64,
    pub kappa: f64,
    pub c: CParam,
    pub regime: Regime,
    /// U(0) tabulated along lambda = c(1 - alpha) as alpha increases to 1.
    pub path_alphas: Vec<f64>,
    pub path_u0: Vec<f64>,
    /// Last tabulated U(0) and its relative deviation from the predicted
    /// limit c/2 (finite positive c only).
    pub empirical_limit: Option<f64>,
    pub relative_deviation: Option<f64>,
}

fn check_params(lambda: f64, mu: f64, kappa: f64, alpha: f64) -> Result<(), LdpError> {
    if !(lambda > 0.0 && mu > 0.0 && kappa > 0.0) {
        return Err(LdpError::Domain(format!(
            "requires lambda > 0, mu > 0, kappa > 0 (got lambda={lambda}, mu={mu}, kappa={kappa})"
        )));
    }
    if !(alpha >= 0.5 && alpha < 1.0) {
        return Err(LdpError::Domain(format!("requires 1/2 <= alpha < 1 (got alpha={alpha})")));
    }
    Ok(())
}

fn equilibrium(lambda: f64, mu: f64, kappa: f64) -> f64 {
    (lambda / mu).powf(1.0 / kappa)
}

/// Action cost U(x) = int_x^{(lambda/mu)^{1/kappa}} (lambda u - mu u^{1+kappa}) u^{-2 alpha} du.
pub fn quasipotential(lambda: f64, mu: f64, kappa: f64, alpha: f64, x: f64) -> Result<f64, LdpError> {
    check_params(lambda, mu, kappa, alpha)?;
    let xeq = equilibrium(lambda, mu, kappa);
    if !(0.0..=xeq).contains(&x) {
        return Err(LdpError::Domain(format!("requires 0 <= x <= {xeq} (got x={x})")));
    }
    if x == xeq {
        return Ok(0.0);
    }
    let f = |u: f64| (lambda * u - mu * u.powf(1.0 + kappa)) * u.powf(-2.0 * alpha);
    // The integrand behaves like lambda * u^{1-2alpha} at u = 0.
    let map = EndpointMap::for_singular_exponent(2.0 * alpha - 1.0);
    let r = quad::integrate_singular(f, x, xeq, map, EndpointMap::None, Tolerance::new(1e-13, 1e-12))?;
    Ok(r.value)
}

/// Closed form of U(0):
/// lambda (lambda/mu)^{2(1-alpha)/kappa} [1/(2(1-alpha)) - 1/(2(1-alpha)+kappa)].
pub fn quasipotential_at_zero(lambda: f64, mu: f64, kappa: f64, alpha: f64) -> Result<f64, LdpError> {
    check_params(lambda, mu, kappa, alpha)?;
    let two_one_minus = 2.0 * (1.0 - alpha);
    Ok(lambda
        * (lambda / mu).powf(two_one_minus / kappa)
        * (1.0 / two_one_minus - 1.0 / (two_one_minus + kappa)))
}

/// Diagnostic expansion of the exponential rate near alpha = 1 along small
/// lambda: (1/(2 mu^{2(1-alpha)/kappa})) (lambda/(1-alpha) + (2/kappa) lambda ln lambda).
pub fn exponential_rate_expansion(lambda: f64, mu: f64, kappa: f64, alpha: f64) -> f64 {
    let prefactor = 0.5 / mu.powf(2.0 * (1.0 - alpha) / kappa);
    prefactor * (lambda / (1.0 - alpha) + (2.0 / kappa) * lambda * lambda.ln())
}

/// Regime of the absorption time as alpha -> 1- with lambda = c(1 - alpha):
/// c = 0 sub-exponential, finite c exponential with rate limit c/2,
/// c = inf super-exponential. Finite positive c also tabulates U(0) along
/// the path as numerical evidence for the limit.
pub fn asymptotic_regime(mu: f64, kappa: f64, c: f64) -> Result<QuasipotentialReport, LdpError> {
    if !(mu > 0.0 && kappa > 0.0) {
        return Err(LdpError::Domain(format!("requires mu > 0, kappa > 0 (got mu={mu}, kappa={kappa})")));
    }
    if c < 0.0 || c.is_nan() {
        return Err(LdpError::Domain(format!("requires c in [0, inf] (got c={c})")));
    }
    let (c_param, regime) = if c == 0.0 {
        (CParam::Finite(0.0), Regime::SubExponential)
    } else if c == f64::INFINITY {
        (CParam::Infinite, Regime::SuperExponential)
    } else {
        (CParam::Finite(c), Regime::Exponential { limit: 0.5 * c })
    };
    let mut report = QuasipotentialReport {
        mu,
        kappa,
        c: c_param,
        regime,
        path_alphas: Vec::new(),
        path_u0: Vec::new(),
        empirical_limit: None,
        relative_deviation: None,
    };
    if c > 0.0 && c.is_finite() {
        for &alpha in &[0.9, 0.99, 0.999] {
            let lambda = c * (1.0 - alpha);
            let u0 = quasipotential_at_zero(lambda, mu, kappa, alpha)?;
            report.path_alphas.push(alpha);
            report.path_u0.push(u0);
        }
        let last = *report.path_u0.last().unwrap();
        report.empirical_limit = Some(last);
        report.relative_deviation = Some((last - 0.5 * c).abs() / (0.5 * c));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_value_at_half() {
        // (1, 1, 2, 1/2): int_0^1 (u - u^3)/u du = 1 - 1/3.
        let u0 = quasipotential_at_zero(1.0, 1.0, 2.0, 0.5).unwrap();
        assert_abs_diff_eq!(u0, 2.0 / 3.0, epsilon = 1e-10);
        let u0q = quasipotential(1.0, 1.0, 2.0, 0.5, 0.0).unwrap();
        assert_abs_diff_eq!(u0q, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn quadrature_matches_closed_form_on_a_grid() {
        for &lambda in &[0.5, 1.0, 2.0] {
            for &kappa in &[1.0, 2.0] {
                for &alpha in &[0.55, 0.75, 0.9] {
                    let exact = quasipotential_at_zero(lambda, 1.0, kappa, alpha).unwrap();
                    let numeric = quasipotential(lambda, 1.0, kappa, alpha, 0.0).unwrap();
                    assert_abs_diff_eq!(numeric, exact, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn value_at_three_quarters() {
        let u0 = quasipotential_at_zero(1.0, 1.0, 2.0, 0.75).unwrap();
        assert_abs_diff_eq!(u0, 1.6, epsilon = 1e-12);
    }

    #[test]
    fn boundary_condition_and_monotonicity() {
        let (lambda, mu, kappa, alpha) = (1.0, 1.0, 2.0, 0.75);
        let xeq = 1.0;
        assert_eq!(quasipotential(lambda, mu, kappa, alpha, xeq).unwrap(), 0.0);
        let xs = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
        let us: Vec<f64> = xs
            .iter()
            .map(|&x| quasipotential(lambda, mu, kappa, alpha, x).unwrap())
            .collect();
        assert!(us.windows(2).all(|w| w[0] >= w[1]));
        assert!(us[0] > 0.0);
        assert!(matches!(
            quasipotential(lambda, mu, kappa, alpha, 1.5),
            Err(LdpError::Domain(_))
        ));
    }

    #[test]
    fn u0_increases_with_lambda() {
        let mut last = 0.0;
        for &lambda in &[0.2, 0.5, 1.0, 2.0] {
            let u0 = quasipotential_at_zero(lambda, 1.0, 2.0, 0.8).unwrap();
            assert!(u0 > last);
            last = u0;
        }
    }

    #[test]
    fn regimes_and_exponential_limit() {
        let r = asymptotic_regime(1.0, 2.0, 0.0).unwrap();
        assert_eq!(r.regime, Regime::SubExponential);
        let r = asymptotic_regime(1.0, 2.0, f64::INFINITY).unwrap();
        assert_eq!(r.regime, Regime::SuperExponential);
        let r = asymptotic_regime(1.0, 2.0, 3.0).unwrap();
        assert_eq!(r.regime, Regime::Exponential { limit: 1.5 });
        // The tabulated path must approach c/2 within 1% at alpha = 0.999.
        assert!(r.relative_deviation.unwrap() < 0.01, "deviation {:?}", r.relative_deviation);
        let u0s = &r.path_u0;
        assert!(u0s.windows(2).all(|w| (w[1] - 1.5f64).abs() < (w[0] - 1.5f64).abs()));
    }

    #[test]
    fn rate_expansion_tracks_exact_value_near_one() {
        let (mu, kappa, alpha) = (1.0, 2.0, 0.99);
        let lambda = 0.01;
        let exact = quasipotential_at_zero(lambda, mu, kappa, alpha).unwrap();
        let series = exponential_rate_expansion(lambda, mu, kappa, alpha);
        assert!(((series - exact) / exact).abs() < 0.02, "series {series}, exact {exact}");
    }

    #[test]
    fn super_exponential_growth_as_alpha_increases() {
        let (lambda, mu, kappa) = (1.0, 1.0, 2.0);
        let mut last = 0.0;
        for &alpha in &[0.9, 0.99, 0.999, 0.9999] {
            let u0 = quasipotential_at_zero(lambda, mu, kappa, alpha).unwrap();
            assert!(u0 > last);
            last = u0;
        }
        assert!(last > 1e3);
    }
}
