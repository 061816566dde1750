//! Put/call payoffs, the standard closed forms, and evaluation of the
//! truncated eigenfunction series.
//!
//! # Exponent fusion
//!
//! The series reads V(t,s) = Σ c_n e^{r(n+γ)t} F_n(s) with c_n carrying
//! e^{−r(n+γ)T} (γ = 2 sub, 1 supra). Those two exponentials are never
//! formed separately here: each term is evaluated as
//!
//! ```text
//! term_n = p_n · F_n(s) · e^{−r(n+γ)(T−t)},     p_n = c_n e^{r(n+γ)T},
//! ```
//!
//! using the stored payoff projections p_n (see [`crate::coefficients`]).
//! With t ≤ T every time factor damps, so order-2000 sums stay in f64 range
//! at any admissible parameters. At t = T the factor is exp(0) — exactly 1.

use libm::erf;

use crate::coefficients::SpectralSolution;
use crate::kahan::NeumaierSum;
use crate::models::{EvalPoint, ModelParams, ModelVariant};
use crate::specfun::{laguerre_assoc_seq, laguerre_damped_seq};
use crate::{Error, Result};

/// Price plus evaluation diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct PricingResult {
    pub value: f64,
    /// Terms summed (always the full truncation, order + 1).
    pub terms_used: usize,
    /// Magnitude of the last included term — a crude truncation gauge.
    pub tail_estimate: f64,
}

/// Terminal put payoff max(K − s, 0); zero at s = K.
#[inline]
pub fn payoff_put(s: f64, strike: f64) -> f64 {
    (strike - s).max(0.0)
}

/// Terminal call payoff max(s − K, 0); zero at s = K.
#[inline]
pub fn payoff_call(s: f64, strike: f64) -> f64 {
    (s - strike).max(0.0)
}

#[inline]
fn norm_cdf(x: f64) -> f64 {
    0.5 + 0.5 * erf(x / std::f64::consts::SQRT_2)
}

/// d₁, d₂ and the discount factor for the standard model; shared input
/// validation for the closed forms.
fn bs_terms(point: EvalPoint, params: &ModelParams) -> Result<(f64, f64, f64)> {
    let EvalPoint { t, s } = point;
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::Domain(format!("non-finite evaluation point ({t}, {s})")));
    }
    if t < 0.0 || t >= params.maturity {
        return Err(Error::Domain(format!(
            "closed form needs 0 <= t < T = {}; got t = {t} (at maturity use the payoff)",
            params.maturity
        )));
    }
    if s <= 0.0 {
        return Err(Error::Domain(format!("closed form needs s > 0, got {s}")));
    }
    let tau = params.maturity - t;
    let sig_rt = params.sigma * tau.sqrt();
    let d1 = ((s / params.strike).ln() + (params.rate + 0.5 * params.sigma * params.sigma) * tau)
        / sig_rt;
    let d2 = d1 - sig_rt;
    Ok((d1, d2, (-params.rate * tau).exp()))
}

/// Standard-model European put value.
///
/// # Errors
///
/// `Error::Domain` unless 0 ≤ t < T and s > 0. At t = T the formula
/// degenerates (zero variance); callers take [`payoff_put`] there.
pub fn bs_put(point: EvalPoint, params: &ModelParams) -> Result<f64> {
    let (d1, d2, discount) = bs_terms(point, params)?;
    Ok(params.strike * discount * norm_cdf(-d2) - point.s * norm_cdf(-d1))
}

/// Standard-model European call value.
///
/// # Errors
///
/// As [`bs_put`].
pub fn bs_call(point: EvalPoint, params: &ModelParams) -> Result<f64> {
    let (d1, d2, discount) = bs_terms(point, params)?;
    Ok(point.s * norm_cdf(d1) - params.strike * discount * norm_cdf(d2))
}

/// Evaluate a truncated series solution at a point.
///
/// # Errors
///
/// `Error::Domain` unless 0 ≤ t ≤ T, and s ≥ 0 (sub) / s > 0 (supra).
pub fn price_spectral(solution: &SpectralSolution, point: EvalPoint) -> Result<PricingResult> {
    let EvalPoint { t, s } = point;
    let maturity = solution.params().maturity;
    if !(t.is_finite() && s.is_finite()) {
        return Err(Error::Domain(format!("non-finite evaluation point ({t}, {s})")));
    }
    if t < 0.0 || t > maturity {
        return Err(Error::Domain(format!(
            "series evaluation needs 0 <= t <= T = {maturity}, got t = {t}"
        )));
    }
    series_eval(solution, t, s)
}

/// Core series sum. Unlike [`price_spectral`] this does not clamp t below,
/// so the finite-difference residual stencil may reach slightly past the
/// valuation-time endpoints; t ≤ T is still required (the fused exponent
/// must damp).
pub(crate) fn series_eval(solution: &SpectralSolution, t: f64, s: f64) -> Result<PricingResult> {
    let params = solution.params();
    let tau = params.maturity - t;
    let projection = solution.projection();
    let order = solution.order();

    let mut acc = NeumaierSum::new();
    let mut last_term = 0.0;
    match solution.variant() {
        ModelVariant::Sub => {
            if s < 0.0 {
                return Err(Error::Domain(format!("sub series needs s >= 0, got {s}")));
            }
            let x = params.laguerre_scale() * s;
            let damped = laguerre_damped_seq(order, 1, x)?;
            for (n, (p, dl)) in projection.iter().zip(&damped).enumerate() {
                let nf = n as f64;
                let time_factor = (-params.rate * (nf + 2.0) * tau).exp();
                last_term = p * s * dl / (nf + 1.0) * time_factor;
                acc.add(last_term);
            }
        }
        ModelVariant::Supra => {
            if s <= 0.0 {
                return Err(Error::Domain(format!("supra series needs s > 0, got {s}")));
            }
            let y = params.laguerre_scale() / s;
            let plain = laguerre_assoc_seq(order, 1, y)?;
            for (n, (p, l)) in projection.iter().zip(&plain).enumerate() {
                let nf = n as f64;
                let time_factor = (-params.rate * (nf + 1.0) * tau).exp();
                last_term = p * l / (nf + 1.0) * time_factor;
                acc.add(last_term);
            }
        }
        ModelVariant::Standard => unreachable!("no spectral solution exists for standard"),
    }

    let value = acc.value();
    if !value.is_finite() {
        return Err(Error::Instability(format!(
            "series sum is not finite at (t={t}, s={s})"
        )));
    }
    Ok(PricingResult {
        value,
        terms_used: order + 1,
        tail_estimate: last_term.abs(),
    })
}
