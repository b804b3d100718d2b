//! Pointwise heat-kernel envelopes of the standard density:
//! `p(y) ≤ η₁ min{1, y⁻²}`, `|p'(y)| ≤ η₂/Beta(2/α, 1-1/α) min{1, y⁻²}`, and for δ = 0
//! `p(y) ≤ max{Γ(1/α)/α, α2^{α-1} sin(απ/2) Γ((1+α)/2) Γ(α/2)/π^{3/2}} min{1, |y|^{-α-1}}`.

use rayon::prelude::*;
use serde::Serialize;

use super::StableKernel;
use crate::bounds::{eta4_branches, eta_constants};
use crate::error::Result;

/// Largest excess of the density (or derivative) over one envelope.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeExcess {
    pub constant: f64,
    /// max over the grid of value - envelope; negative when the envelope holds everywhere.
    pub max_excess: f64,
    pub at: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeAudit {
    pub alpha: f64,
    pub delta: f64,
    pub points: usize,
    pub tol: f64,
    pub density: EnvelopeExcess,
    pub derivative: EnvelopeExcess,
    /// Only for δ = 0.
    pub symmetric: Option<EnvelopeExcess>,
    pub warnings: Vec<String>,
}

impl EnvelopeAudit {
    pub fn pass(&self) -> bool {
        self.density.pass && self.derivative.pass && self.symmetric.as_ref().is_none_or(|s| s.pass)
    }
}

fn beta(u: f64, v: f64) -> f64 {
    (libm::lgamma(u) + libm::lgamma(v) - libm::lgamma(u + v)).exp()
}

fn excess(constant: f64, rows: &[(f64, f64)], shape: impl Fn(f64) -> f64, tol: f64) -> EnvelopeExcess {
    let (max_excess, at) = rows
        .iter()
        .map(|&(y, v)| (v - constant * shape(y), y))
        .fold((f64::NEG_INFINITY, f64::NAN), |acc, r| if r.0 > acc.0 { r } else { acc });
    EnvelopeExcess {
        constant,
        max_excess,
        at,
        pass: max_excess <= tol,
    }
}

/// Checks the envelopes at `points` evenly spaced y in [-y_max, y_max], with exact density
/// values from the Fourier inversion.
pub fn envelope_audit(alpha: f64, delta: f64, points: usize, y_max: f64, tol: f64) -> Result<EnvelopeAudit> {
    let kernel = StableKernel::new(alpha, delta)?;
    let etas = eta_constants(alpha, delta)?;
    let ys: Vec<f64> = (0..points)
        .map(|i| -y_max + 2.0 * y_max * i as f64 / (points.max(2) - 1) as f64)
        .collect();
    let vals: Result<Vec<(f64, f64, f64)>> = ys
        .par_iter()
        .map(|&y| Ok((y, kernel.pdf(y)?, kernel.pdf_deriv(y)?.abs())))
        .collect();
    let vals = vals?;
    let dens: Vec<(f64, f64)> = vals.iter().map(|r| (r.0, r.1)).collect();
    let der: Vec<(f64, f64)> = vals.iter().map(|r| (r.0, r.2)).collect();
    let sq = |y: f64| (1.0 / (y * y)).min(1.0);
    let c2 = etas.eta2 / beta(2.0 / alpha, 1.0 - 1.0 / alpha);
    let symmetric = (delta == 0.0).then(|| {
        let (b1, b2) = eta4_branches(alpha);
        excess(b1.max(b2), &dens, |y| y.abs().powf(-alpha - 1.0).min(1.0), tol)
    });
    Ok(EnvelopeAudit {
        alpha,
        delta,
        points,
        tol,
        density: excess(etas.eta1, &dens, sq, tol),
        derivative: excess(c2, &der, sq, tol),
        symmetric,
        warnings: etas.warnings,
    })
}
