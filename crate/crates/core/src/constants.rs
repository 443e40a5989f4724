//! Special constants behind the norm-shrinkage risk bounds.
//!
//! The improved estimator `(1 - c/‖Y‖)Y` dominates the maximum likelihood
//! estimate when `c` is built from a lower bound `γ_p` on the expected
//! reciprocal norm `E 1/‖Y‖`, taken uniformly over a parameter ball of
//! radius `d` under a covariance whose mean largest eigenvalue is at most
//! `a*`. This module evaluates
//!
//! * `I(a) = ∫_0^∞ exp(-r²/2) / (a + r) dr`,
//! * `γ_p` both through its integral representation (quadrature) and
//!   through an equivalent finite sum (closed form),
//! * the risk `r_p` of the shrinkage estimator at the origin under identity
//!   covariance, and
//! * the shrinkage constants and guaranteed risk-improvement bounds
//!   assembled from those pieces.
//!
//! Everything here is a pure function; all routines are safe to call from
//! any number of threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::adaptive_simpson;

const LN_2: f64 = std::f64::consts::LN_2;

/// Errors raised by the constants engine.
#[derive(Debug, Error, PartialEq)]
pub enum ConstantsError {
    #[error("integral shift must be nonnegative, got {0}")]
    NegativeShift(f64),
    #[error("the reciprocal integral diverges logarithmically at a = 0")]
    DivergentIntegral,
    #[error("closed form divides by the ball radius; use the quadrature path for d = 0")]
    ZeroRadius,
    #[error("dimension must be at least {min}, got {got}")]
    DimensionTooSmall { got: usize, min: usize },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("ball radius must be nonnegative and finite, got {0}")]
    InvalidRadius(f64),
}

/// Description of the parameter set and covariance bounds: the radius
/// `d = sup{‖θ‖}` of the ball containing the unknown mean, the lower bound
/// `λ*` on the smallest covariance eigenvalue and the upper bound `a*` on
/// the mean largest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactSetSpec {
    d: f64,
    lambda_star: f64,
    a_star: f64,
}

impl CompactSetSpec {
    pub fn new(d: f64, lambda_star: f64, a_star: f64) -> Result<Self, ConstantsError> {
        if !d.is_finite() || d < 0.0 {
            return Err(ConstantsError::InvalidRadius(d));
        }
        if !(lambda_star > 0.0) {
            return Err(ConstantsError::NonPositive { name: "lambda_star", value: lambda_star });
        }
        if !(a_star > 0.0) {
            return Err(ConstantsError::NonPositive { name: "a_star", value: a_star });
        }
        Ok(Self { d, lambda_star, a_star })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn lambda_star(&self) -> f64 {
        self.lambda_star
    }

    pub fn a_star(&self) -> f64 {
        self.a_star
    }

    /// The reduced radius `μ = d / √a*`.
    pub fn mu(&self) -> f64 {
        self.d / self.a_star.sqrt()
    }
}

/// Which route produced a `γ_p` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaMethod {
    ClosedForm,
    Quadrature,
}

/// A computed value of the reciprocal-norm lower bound `γ_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPValue {
    pub value: f64,
    pub method: GammaMethod,
    pub p: usize,
    pub spec: CompactSetSpec,
}

/// Provenance of a shrinkage constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShrinkageSource {
    /// The general conditionally Gaussian rule `c = (p-1) λ* γ_p`.
    ConditionallyGaussian,
    /// The continuous-time regression rule `c = ρ₁² (p-1) γ_p / n`.
    OuRegression,
    /// The autoregressive-noise rule `c = (p - 1/(1-α)²) γ_p`.
    Ar1,
    Manual,
}

/// A shrinkage constant together with the rule that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageConstant {
    pub c: f64,
    pub source: ShrinkageSource,
}

impl ShrinkageConstant {
    /// A user-supplied constant. Must be nonnegative.
    pub fn manual(c: f64) -> Result<Self, ConstantsError> {
        if !(c >= 0.0) {
            return Err(ConstantsError::NonPositive { name: "c", value: c });
        }
        Ok(Self { c, source: ShrinkageSource::Manual })
    }
}

/// Natural log of the Gamma function (positive arguments only here).
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `I(a) = ∫_0^∞ exp(-r²/2) / (a + r) dr` for `a > 0`.
///
/// The integral diverges logarithmically at the origin when `a = 0`, which
/// is reported as an error rather than a large number. Beyond `r = 40` the
/// numerator is below 1e-300, so truncating there keeps the error far under
/// the 1e-10 target.
pub fn gaussian_reciprocal_integral(a: f64) -> Result<f64, ConstantsError> {
    if a < 0.0 || a.is_nan() {
        return Err(ConstantsError::NegativeShift(a));
    }
    if a == 0.0 {
        return Err(ConstantsError::DivergentIntegral);
    }
    let f = |r: f64| (-0.5 * r * r).exp() / (a + r);
    // Tight tolerance so that a * I(a) is still accurate for large a.
    Ok(adaptive_simpson(&f, 0.0, 40.0, 1e-13))
}

/// `γ_p` through its integral representation
/// `γ_p = μ / (2^{p/2-1} Γ(p/2) d) ∫_0^∞ r^{p-1} e^{-r²/2} / (μ + r) dr`.
///
/// For `d = 0` the prefactor `μ/d` tends to `1/√a*` and the integrand to
/// `r^{p-2} e^{-r²/2}`, which gives the limit
/// `Γ((p-1)/2) / (√(2 a*) Γ(p/2))`; that limit is returned exactly.
pub fn gamma_p_quadrature(p: usize, spec: &CompactSetSpec) -> Result<GammaPValue, ConstantsError> {
    check_dimension(p)?;
    let value = if spec.d == 0.0 {
        let pf = p as f64;
        (ln_gamma((pf - 1.0) / 2.0) - ln_gamma(pf / 2.0)).exp() / (2.0 * spec.a_star).sqrt()
    } else {
        let mu = spec.mu();
        let pf = p as f64;
        // Fold the prefactor into the exponent so that large p cannot
        // overflow: the integrand then stays on the scale of the result.
        let ln_pref = mu.ln() - (0.5 * pf - 1.0) * LN_2 - ln_gamma(0.5 * pf) - spec.d.ln();
        let f = move |r: f64| {
            if r <= 0.0 {
                0.0
            } else {
                ((pf - 1.0) * r.ln() - 0.5 * r * r + ln_pref).exp() / (mu + r)
            }
        };
        let r_max = (pf - 1.0).sqrt() + 40.0;
        adaptive_simpson(&f, 0.0, r_max, 1e-12)
    };
    Ok(GammaPValue { value, method: GammaMethod::Quadrature, p, spec: *spec })
}

/// `γ_p` through the equivalent finite sum
///
/// ```text
/// γ_p = [ Σ_{j=0}^{p-2} 2^{(j-1)/2} (-1)^{p-j} μ^{p-1-j} Γ((j+1)/2)
///         - (-μ)^p I(μ) ] / (2^{p/2-1} Γ(p/2) d)
/// ```
///
/// obtained by unrolling the reduction `r^{p-1}/(μ+r) = r^{p-2} - μ r^{p-2}/(μ+r)`
/// down to `I(μ)`. Requires `d > 0`; the `d = 0` limit lives on the
/// quadrature path.
pub fn gamma_p_closed(p: usize, spec: &CompactSetSpec) -> Result<GammaPValue, ConstantsError> {
    check_dimension(p)?;
    if spec.d == 0.0 {
        return Err(ConstantsError::ZeroRadius);
    }
    let mu = spec.mu();
    let i_mu = gaussian_reciprocal_integral(mu)?;
    let pf = p as f64;
    let mut sum = 0.0;
    for j in 0..=(p - 2) {
        let jf = j as f64;
        let sign = if (p - j) % 2 == 0 { 1.0 } else { -1.0 };
        let magnitude =
            (0.5 * (jf - 1.0) * LN_2 + (pf - 1.0 - jf) * mu.ln() + ln_gamma(0.5 * (jf + 1.0))).exp();
        sum += sign * magnitude;
    }
    let minus_mu_pow_p = if p % 2 == 0 { mu.powi(p as i32) } else { -mu.powi(p as i32) };
    sum -= minus_mu_pow_p * i_mu;
    let denom = ((0.5 * pf - 1.0) * LN_2 + ln_gamma(0.5 * pf)).exp() * spec.d;
    Ok(GammaPValue { value: sum / denom, method: GammaMethod::ClosedForm, p, spec: *spec })
}

/// Mean of the chi distribution with `p` degrees of freedom,
/// `E‖Z‖ = √2 Γ((p+1)/2) / Γ(p/2)` for a standard normal `Z` in dimension `p`.
pub fn chi_mean(p: usize) -> f64 {
    assert!(p >= 1, "chi_mean needs p >= 1");
    let pf = p as f64;
    (0.5 * LN_2 + ln_gamma(0.5 * (pf + 1.0)) - ln_gamma(0.5 * pf)).exp()
}

/// Switch point beyond which `risk_at_zero` uses the asymptotic expansion;
/// both routes agree to ~1e-9 in a neighbourhood of the crossover.
const RISK_SERIES_CROSSOVER: usize = 1024;

/// Risk of the shrinkage estimator at `θ = 0` under identity covariance:
///
/// `r_p = p - [(p-1) Γ((p-1)/2) / (√2 Γ(p/2))]²`.
///
/// The bracket equals the chi-p mean `E‖Y‖`, so `r_p = p - (E‖Y‖)²`. The
/// value increases with `p` toward its limit 1/2. Evaluated through
/// log-Gamma for moderate `p`; for very large `p` the difference of two
/// huge log-Gamma values loses too much precision, so an asymptotic
/// expansion in `1/p` takes over:
///
/// `r_p = 1/2 - 1/(8p) - 1/(96p²) + 19/(1536p³) + O(p⁻⁴)`.
pub fn risk_at_zero(p: usize) -> f64 {
    assert!(p >= 2, "risk_at_zero needs p >= 2");
    if p <= RISK_SERIES_CROSSOVER {
        let m = chi_mean(p);
        p as f64 - m * m
    } else {
        let pf = p as f64;
        0.5 - 1.0 / (8.0 * pf) - 1.0 / (96.0 * pf * pf) + 19.0 / (1536.0 * pf * pf * pf)
    }
}

/// The dominating shrinkage constant `c = (p-1) λ* γ_p` for the general
/// conditionally Gaussian model.
pub fn shrink_constant(
    p: usize,
    lambda_star: f64,
    gamma_p: f64,
) -> Result<ShrinkageConstant, ConstantsError> {
    check_dimension(p)?;
    if !(lambda_star > 0.0) {
        return Err(ConstantsError::NonPositive { name: "lambda_star", value: lambda_star });
    }
    if !(gamma_p > 0.0) {
        return Err(ConstantsError::NonPositive { name: "gamma_p", value: gamma_p });
    }
    Ok(ShrinkageConstant {
        c: (p as f64 - 1.0) * lambda_star * gamma_p,
        source: ShrinkageSource::ConditionallyGaussian,
    })
}

/// Guaranteed upper bound on the risk difference of the shrinkage estimator
/// against the MLE: `sup_θ Δ(θ) ≤ -[(p-1) λ* γ_p]²`.
pub fn risk_improvement_bound(
    p: usize,
    lambda_star: f64,
    gamma_p: f64,
) -> Result<f64, ConstantsError> {
    let c = shrink_constant(p, lambda_star, gamma_p)?.c;
    Ok(-(c * c))
}

fn check_dimension(p: usize) -> Result<(), ConstantsError> {
    if p < 2 {
        Err(ConstantsError::DimensionTooSmall { got: p, min: 2 })
    } else {
        Ok(())
    }
}
