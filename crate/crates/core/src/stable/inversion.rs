//! Fourier inversion of the standard stable law S_α(1, δ).
//!
//! Two routes are used. Near the origin the oscillatory integrals are summed over the real
//! half-line in panels shorter than half a period. Away from the origin the contour is rotated
//! into the lower (upper) half-plane, which turns the oscillation into exponential decay; the
//! pure-phase part of the integrand is removed analytically so that only
//! `expm1(-λ^α(1 - ik))` is integrated numerically and tail quantities carry full relative
//! precision.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Beyond this |y| the rotated contour is used.
pub const CONTOUR_SPLIT: f64 = 4.0;

const LAMBDA_EXPONENT_BUDGET: f64 = 40.0;

/// Which of the pair of oscillatory integrals is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscKind {
    /// I_r = ∫ λ^r e^{-λ^α} cos(λ^α k - λy) dλ
    Cos,
    /// J_r = ∫ λ^r e^{-λ^α} sin(λ^α k - λy) dλ
    Sin,
}

/// Parameters of the oscillatory integrals I_r, J_r.
#[derive(Debug, Clone, Copy)]
pub struct OscIntegralSpec {
    pub r: f64,
    pub alpha: f64,
    pub delta: f64,
    pub y: f64,
    pub rel_tol: f64,
    pub lambda_max: f64,
}

impl OscIntegralSpec {
    pub fn new(alpha: f64, delta: f64, r: f64, y: f64, rel_tol: f64) -> Result<Self> {
        crate::error::check_alpha(alpha)?;
        crate::error::check_delta(delta)?;
        crate::error::check_finite("y", y)?;
        if !(r > -1.0) {
            return Err(Error::invalid("r", format!("{r} must exceed -1")));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", format!("{rel_tol} is not in (0, 1)")));
        }
        let basic = (10.0 / rel_tol).ln().powf(1.0 / alpha);
        // Make the neglected tail small relative to the envelope Γ((r+1)/α)/α as well.
        let mut lam = basic.max(1.0);
        let scale = libm::tgamma((r + 1.0) / alpha) / alpha;
        for _ in 0..60 {
            let tail = lam.powf(r + 1.0 - alpha) * (-lam.powf(alpha)).exp() / alpha;
            if tail <= 0.1 * rel_tol * scale {
                break;
            }
            lam *= 1.05;
        }
        Ok(OscIntegralSpec {
            r,
            alpha,
            delta,
            y,
            rel_tol,
            lambda_max: lam,
        })
    }

    fn k(&self) -> f64 {
        self.delta * (FRAC_PI_2 * self.alpha).tan()
    }
}

/// Real-line panel quadrature of I_r or J_r.
pub fn osc_integral(spec: &OscIntegralSpec, kind: OscKind) -> Result<f64> {
    let (alpha, k, y, r) = (spec.alpha, spec.k(), spec.y, spec.r);
    let q = Quadrature::new(1e-3 * spec.rel_tol * libm::tgamma((r + 1.0) / alpha) / alpha, spec.rel_tol)
        .with_max_intervals(20_000);
    let f = move |lam: f64| {
        let la = lam.powf(alpha);
        let phase = k * la - lam * y;
        let trig = match kind {
            OscKind::Cos => phase.cos(),
            OscKind::Sin => phase.sin(),
        };
        lam.powf(r) * (-la).exp() * trig
    };
    let m = 3.0f64.max(3.0 / (r + 1.0));
    real_line(f, alpha, k, y, spec.lambda_max, m, &q, "osc_integral")
}

/// Contour route for I_r or J_r; requires y ≠ 0.
pub fn osc_integral_contour(spec: &OscIntegralSpec, kind: OscKind) -> Result<f64> {
    if spec.y == 0.0 {
        return Err(Error::invalid("y", "the contour route needs y != 0"));
    }
    let kern = StableKernel::new(spec.alpha, spec.delta)?;
    let kr = kern.k_r(spec.r, spec.y)?;
    Ok(match kind {
        OscKind::Cos => kr.re,
        OscKind::Sin => kr.im,
    })
}

/// Integrates `f` over [0, lambda_max] in panels no longer than half an oscillation.
/// The first panel uses λ = λ₁ s^m to smooth the algebraic behaviour at the origin.
fn real_line<F: Fn(f64) -> f64>(
    f: F,
    alpha: f64,
    k: f64,
    y: f64,
    lambda_max: f64,
    m: f64,
    q: &Quadrature,
    context: &'static str,
) -> Result<f64> {
    let freq = y.abs() + alpha * k.abs() * lambda_max.powf(alpha - 1.0) + 1.0;
    let width = (PI / freq).min(1.0);
    let first = q
        .integrate(
            |s: f64| {
                let lam = width * s.powf(m);
                f(lam) * width * m * s.powf(m - 1.0)
            },
            0.0,
            1.0,
            context,
        )?
        .value;
    let n = ((lambda_max - width) / width).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n)
        .map(|j| width + (lambda_max - width) * j as f64 / n as f64)
        .collect();
    let rest = q.integrate_breaks(&f, &breaks, context)?.value;
    Ok(first + rest)
}

#[inline]
fn cexpm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * c - 2.0 * half * half,
        z.re.exp() * s,
    )
}

/// Density, derivative, distribution function and call prices of S_α(1, δ).
#[derive(Debug, Clone, Copy)]
pub struct StableKernel {
    alpha: f64,
    delta: f64,
    k: f64,
    rel_tol: f64,
}

impl StableKernel {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        crate::error::check_alpha(alpha)?;
        crate::error::check_delta(delta)?;
        Ok(StableKernel {
            alpha,
            delta,
            k: delta * (FRAC_PI_2 * alpha).tan(),
            rel_tol: 1e-13,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Law of -Y.
    pub fn mirrored(&self) -> Self {
        StableKernel {
            delta: -self.delta,
            k: -self.k,
            ..*self
        }
    }

    fn lambda_max(&self) -> f64 {
        LAMBDA_EXPONENT_BUDGET.powf(1.0 / self.alpha)
    }

    fn quad(&self) -> Quadrature {
        Quadrature::new(1e-16, self.rel_tol).with_max_intervals(20_000)
    }

    /// E_r(y) = ∫₀^∞ λ^r e^{-iλy} expm1(-λ^α(1 - ik)) dλ for y > 0, on the rotated contour.
    fn e_r(&self, r: f64, y: f64) -> Result<Complex64> {
        debug_assert!(y > 0.0);
        let alpha = self.alpha;
        let theta_hi = FRAC_PI_2.min((FRAC_PI_2 - self.k.atan()) / alpha);
        let theta = 0.9 * theta_hi;
        let z = Complex64::from_polar(1.0, -theta);
        let c2 = Complex64::new(0.0, y) * z;
        let c1 = Complex64::new(1.0, -self.k) * Complex64::from_polar(1.0, -alpha * theta);
        let decay = c2.re;
        let p = (r + alpha).max(0.0);
        let t_max = (45.0 + p * (50.0 / theta.sin()).ln()) / decay;
        let integrand = |t: f64| -> Complex64 {
            let e = (-c2 * t).exp();
            e * cexpm1(-c1 * t.powf(alpha)) * t.powf(r)
        };
        let t1 = (1.0 / y).min(t_max);
        let m = 3.0f64.max(3.0 / (r + alpha + 1.0));
        let q = self.quad();
        let first = q
            .integrate(
                |s: f64| {
                    let t = t1 * s.powf(m);
                    integrand(t) * (t1 * m * s.powf(m - 1.0))
                },
                0.0,
                1.0,
                "stable contour (origin)",
            )?
            .value;
        let mut breaks = vec![t1];
        while *breaks.last().unwrap() < t_max {
            let next = (breaks.last().unwrap() * 2.0).min(t_max);
            breaks.push(next);
        }
        // Cap the panel length at a few oscillations of the phase factor.
        let osc = PI / (c2.im.abs() + 1e-300);
        let mut fine = Vec::with_capacity(breaks.len() * 2);
        fine.push(breaks[0]);
        for w in breaks.windows(2) {
            let pieces = ((w[1] - w[0]) / (4.0 * osc)).ceil().max(1.0) as usize;
            for j in 1..=pieces {
                fine.push(w[0] + (w[1] - w[0]) * j as f64 / pieces as f64);
            }
        }
        let rest = q.integrate_breaks(integrand, &fine, "stable contour")?.value;
        let rot = Complex64::from_polar(1.0, -theta * (r + 1.0));
        Ok(rot * (first + rest))
    }

    /// K_r(y) = ∫₀^∞ λ^r exp(-λ^α(1 - ik) - iλy) dλ = I_r + i J_r, for r > -1 and y ≠ 0.
    pub fn k_r(&self, r: f64, y: f64) -> Result<Complex64> {
        if y < 0.0 {
            return Ok(self.mirrored().k_r(r, -y)?.conj());
        }
        let lead = Complex64::new(0.0, y).powf(-(r + 1.0)) * libm::tgamma(r + 1.0);
        Ok(lead + self.e_r(r, y)?)
    }

    fn real_line(&self, f: impl Fn(f64) -> f64, y: f64, m: f64, context: &'static str) -> Result<f64> {
        real_line(f, self.alpha, self.k, y, self.lambda_max(), m, &self.quad(), context)
    }

    /// Density p(y).
    pub fn pdf(&self, y: f64) -> Result<f64> {
        crate::error::check_finite("y", y)?;
        if y <= -CONTOUR_SPLIT {
            return self.mirrored().pdf(-y);
        }
        if y >= CONTOUR_SPLIT {
            return Ok((self.e_r(0.0, y)?.re / PI).max(0.0));
        }
        let (a, k) = (self.alpha, self.k);
        let v = self.real_line(
            |l| {
                let la = l.powf(a);
                (-la).exp() * (k * la - l * y).cos()
            },
            y,
            3.0,
            "stable density",
        )?;
        Ok((v / PI).max(0.0))
    }

    /// Derivative p'(y).
    pub fn pdf_deriv(&self, y: f64) -> Result<f64> {
        crate::error::check_finite("y", y)?;
        if y <= -CONTOUR_SPLIT {
            return Ok(-self.mirrored().pdf_deriv(-y)?);
        }
        if y >= CONTOUR_SPLIT {
            return Ok(self.e_r(1.0, y)?.im / PI);
        }
        let (a, k) = (self.alpha, self.k);
        let v = self.real_line(
            |l| {
                let la = l.powf(a);
                l * (-la).exp() * (k * la - l * y).sin()
            },
            y,
            3.0,
            "stable density derivative",
        )?;
        Ok(v / PI)
    }

    /// Returns (F(y), 1 - F(y)), each computed without cancellation in its own tail.
    pub fn cdf_pair(&self, y: f64) -> Result<(f64, f64)> {
        crate::error::check_finite("y", y)?;
        if y <= -CONTOUR_SPLIT {
            let (f, s) = self.mirrored().cdf_pair(-y)?;
            return Ok((s, f));
        }
        if y >= CONTOUR_SPLIT {
            let s = (self.e_r(-1.0, y)?.im / PI).clamp(0.0, 1.0);
            return Ok((1.0 - s, s));
        }
        let (a, k) = (self.alpha, self.k);
        let v = self.real_line(
            |l| {
                let la = l.powf(a);
                (-la).exp() * (k * la - l * y).sin() / l
            },
            y,
            3.0,
            "stable cdf",
        )?;
        let f = (0.5 - v / PI).clamp(0.0, 1.0);
        Ok((f, (0.5 + v / PI).clamp(0.0, 1.0)))
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        Ok(self.cdf_pair(y)?.0)
    }

    pub fn sf(&self, y: f64) -> Result<f64> {
        Ok(self.cdf_pair(y)?.1)
    }

    /// Out-of-the-money part of the call: E(Y - m)₊ - (-m)₊, which equals E(m - Y)₊ for m < 0.
    pub fn otm(&self, m: f64) -> Result<f64> {
        crate::error::check_finite("strike", m)?;
        if m <= -CONTOUR_SPLIT {
            return self.mirrored().otm(-m);
        }
        if m >= CONTOUR_SPLIT {
            return Ok((-self.e_r(-2.0, m)?.re / PI).max(0.0));
        }
        let (a, k) = (self.alpha, self.k);
        let lam_max = self.lambda_max();
        let v = self.real_line(
            |l| {
                let la = l.powf(a);
                let phase = k * la - l * m;
                let h = (0.5 * phase).sin();
                (2.0 * h * h - phase.cos() * (-la).exp_m1()) / (l * l)
            },
            m,
            3.0f64.max(2.0 / (a - 1.0)),
            "stable call",
        )?;
        let call = -0.5 * m + (v + 1.0 / lam_max) / PI;
        Ok((call - (-m).max(0.0)).max(0.0))
    }

    /// E(Y - m)₊ for Y ~ S_α(1, δ).
    pub fn call(&self, m: f64) -> Result<f64> {
        Ok((-m).max(0.0) + self.otm(m)?)
    }
}
