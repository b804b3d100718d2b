//! The α-stable law S_α(σ, δ) with characteristic function
//! `exp{-σ^α |λ|^α (1 - iδ sign(λ) tan(πα/2))}`, 1 < α < 2, mean zero.

mod envelope;
mod grid;
mod inversion;
mod sampler;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::batch::SampleBatch;
use crate::error::{check_alpha, check_delta, check_finite, Error, Result};

pub use envelope::{envelope_audit, EnvelopeAudit, EnvelopeExcess};
pub use grid::{DensityGrid, GridSpec};
pub use inversion::{osc_integral, osc_integral_contour, OscIntegralSpec, OscKind, StableKernel, CONTOUR_SPLIT};
pub use sampler::{sample_stable, stable_draw, CmsConstants};

/// Parameters (α, σ, δ) of a stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, sigma: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("{sigma} must be positive and finite")));
        }
        Ok(StableParams { alpha, sigma, delta })
    }

    /// σ = 1.
    pub fn standard(alpha: f64, delta: f64) -> Result<Self> {
        Self::new(alpha, 1.0, delta)
    }

    /// k = δ tan(πα/2).
    pub fn skew(&self) -> f64 {
        self.delta * (FRAC_PI_2 * self.alpha).tan()
    }

    pub fn char_fn(&self, lambda: f64) -> Complex64 {
        char_fn(self.alpha, self.sigma, self.delta, lambda)
    }

    pub fn kernel(&self) -> StableKernel {
        StableKernel::new(self.alpha, self.delta).expect("validated parameters")
    }

    pub fn density(&self, y: f64) -> Result<f64> {
        Ok(self.kernel().pdf(y / self.sigma)? / self.sigma)
    }

    pub fn density_deriv(&self, y: f64) -> Result<f64> {
        Ok(self.kernel().pdf_deriv(y / self.sigma)? / (self.sigma * self.sigma))
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        self.kernel().cdf(y / self.sigma)
    }

    pub fn survival(&self, y: f64) -> Result<f64> {
        self.kernel().sf(y / self.sigma)
    }

    /// E(Y - M)₊.
    pub fn call_expectation(&self, strike: f64) -> Result<f64> {
        check_finite("M", strike)?;
        Ok(self.sigma * self.kernel().call(strike / self.sigma)?)
    }

    /// Density grid of the standard law (σ = 1).
    pub fn density_grid(&self, spec: &GridSpec) -> Result<DensityGrid> {
        DensityGrid::build(self.alpha, self.delta, spec)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleBatch> {
        sample_stable(self, n, seed)
    }
}

/// Characteristic function of S_α(σ, δ).
pub fn char_fn(alpha: f64, sigma: f64, delta: f64, lambda: f64) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let t = (FRAC_PI_2 * alpha).tan();
    let mag = (sigma * lambda.abs()).powf(alpha);
    let exponent = Complex64::new(-mag, mag * delta * lambda.signum() * t);
    exponent.exp()
}

/// d_α = (∫₀^∞ (1 - cos u) u^{-1-α} du)^{-1} = α(α - 1) / (-Γ(2 - α) cos(πα/2)).
pub fn d_alpha(alpha: f64) -> f64 {
    alpha * (alpha - 1.0) / (-libm::tgamma(2.0 - alpha) * (FRAC_PI_2 * alpha).cos())
}

/// Scale of the stable limit of a law with tail constant A: σ^α = 2Aα / d_α.
pub fn sigma_from_tail(alpha: f64, a: f64) -> f64 {
    (2.0 * a * alpha / d_alpha(alpha)).powf(1.0 / alpha)
}

/// Γ(α) sin(πα/2)/π: S(y) ~ (1 + δ) times this times y^{-α} for the standard law.
pub fn tail_constant(alpha: f64) -> f64 {
    libm::tgamma(alpha) * (FRAC_PI_2 * alpha).sin() / PI
}
