//! The generator 𝒜 of S_α(1, δ),
//! `𝒜f(y) = d_α ∫ [f(y+u) - f(y) - u f'(y)] ((1+δ)1_{u>0} + (1-δ)1_{u<0}) / (2|u|^{1+α}) du`.

use crate::error::{check_alpha, check_delta, check_finite, Error, Result};
use crate::quadrature::Quadrature;
use crate::stable::d_alpha;

/// Numerical settings for [`generator_apply`].
#[derive(Debug, Clone, Copy)]
pub struct GeneratorOptions {
    /// Below this |u| the increment is replaced by its third-order Taylor polynomial.
    pub taylor_cut: f64,
    /// Step of the central differences of f' that supply f'' and f''' for the Taylor part.
    pub fd_step: f64,
    /// Period of f, if f is periodic; the far field is then summed over half-period panels.
    pub period: Option<f64>,
    /// A bound on |f| used to truncate the far field of a periodic f.
    pub sup_bound: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            taylor_cut: 1e-3,
            fd_step: 1e-3,
            period: None,
            sup_bound: 1.0,
            abs_tol: 1e-11,
            rel_tol: 1e-10,
        }
    }
}

impl GeneratorOptions {
    pub fn periodic(period: f64, sup_bound: f64) -> Self {
        GeneratorOptions {
            period: Some(period),
            sup_bound,
            ..Default::default()
        }
    }
}

/// Rejects f whose increments grow faster than linearly, for which 𝒜f diverges.
fn growth_probe(f: &impl Fn(f64) -> f64, y: f64) -> Result<()> {
    let f0 = f(y);
    let slope = |u: f64| ((f(y + u) - f0).abs().max((f(y - u) - f0).abs())) / u;
    let near = slope(10.0).max(slope(100.0));
    let far = slope(1e6);
    if !far.is_finite() || !near.is_finite() {
        return Err(Error::DivergentInput(format!("f is not finite near y = {y}")));
    }
    if far > 50.0 * near + 1e-9 {
        return Err(Error::DivergentInput(format!(
            "|f(y±u) - f(y)|/u grows from {near:.3e} at u ≤ 100 to {far:.3e} at u = 1e6"
        )));
    }
    Ok(())
}

/// 𝒜f(y) from f and f'. The inner part uses a Taylor expansion below `taylor_cut` and the
/// substitution u = τ^{1/(2-α)} up to 1; the outer part integrates f directly, with the
/// linear term of the compensator done in closed form.
pub fn generator_apply(
    f: impl Fn(f64) -> f64,
    fprime: impl Fn(f64) -> f64,
    alpha: f64,
    delta: f64,
    y: f64,
    opts: &GeneratorOptions,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_delta(delta)?;
    check_finite("y", y)?;
    growth_probe(&f, y)?;
    let (wp, wm) = (0.5 * (1.0 + delta), 0.5 * (1.0 - delta));
    let (f0, fp0) = (f(y), fprime(y));
    let h = opts.fd_step;
    let (fph, fmh) = (fprime(y + h), fprime(y - h));
    let f2 = (fph - fmh) / (2.0 * h);
    let f3 = (fph - 2.0 * fp0 + fmh) / (h * h);
    let u0 = opts.taylor_cut;
    let near = (wp + wm) * f2 / 2.0 * u0.powf(2.0 - alpha) / (2.0 - alpha)
        + (wp - wm) * f3 / 6.0 * u0.powf(3.0 - alpha) / (3.0 - alpha);

    let q = Quadrature::new(opts.abs_tol, opts.rel_tol).with_max_intervals(50_000);
    let incr = |u: f64| wp * (f(y + u) - f0 - u * fp0) + wm * (f(y - u) - f0 + u * fp0);
    let e = 1.0 / (2.0 - alpha);
    let t0 = u0.powf(2.0 - alpha);
    let inner = q
        .integrate_breaks(
            |t: f64| {
                let u = t.powf(e);
                incr(u) / (u * u) * e
            },
            &[t0, 0.5 * (t0 + 1.0), 1.0],
            "generator inner",
        )?
        .value;

    let far = match opts.period {
        Some(p) => {
            let p = p.abs();
            check_finite("period", p)?;
            // Whole periods past U leave an alternating remainder of size ~ sup|f| P U^{-1-α}.
            let tail_tol = 0.1 * opts.abs_tol.max(1e-12);
            let u_end = (4.0 * p * opts.sup_bound.max(1e-300) / tail_tol).powf(1.0 / (1.0 + alpha)).max(2.0);
            let half = 0.5 * p;
            let panels = ((u_end - 1.0) / half).ceil() as usize;
            let breaks: Vec<f64> = (0..=panels).map(|j| 1.0 + j as f64 * half).collect();
            let osc = q
                .with_max_intervals(panels * 4 + 1000)
                .integrate_breaks(
                    |u: f64| (wp * f(y + u) + wm * f(y - u)) * u.powf(-1.0 - alpha),
                    &breaks,
                    "generator far field",
                )?
                .value;
            osc - f0 / alpha
        }
        None => {
            // u = ξ^{-1/(α-1)} maps [1, ∞) to (0, 1] with a bounded integrand for linear growth.
            let k = 1.0 / (alpha - 1.0);
            let mut breaks = vec![0.0];
            let mut b = 1e-12;
            while b < 1.0 {
                breaks.push(b);
                b *= 10.0;
            }
            breaks.push(1.0);
            q.integrate_breaks(
                |xi: f64| {
                    if xi == 0.0 {
                        return 0.0;
                    }
                    let u = xi.powf(-k);
                    (wp * (f(y + u) - f0) + wm * (f(y - u) - f0)) * xi.powf(k) * k
                },
                &breaks,
                "generator far field",
            )?
            .value
        }
    };
    let linear = -delta * fp0 / (alpha - 1.0);
    Ok(d_alpha(alpha) * (near + inner + far + linear))
}

/// 𝒜f(y) written through f' only:
/// `d_α/(2α) [(1+δ)∫₀^∞ (f'(y+v) - f'(y)) v^{-α} dv - (1-δ)∫₀^∞ (f'(y-v) - f'(y)) v^{-α} dv]`,
/// with f''(y) supplying the part below `v0`.
pub(crate) fn generator_from_derivative(
    fprime: impl Fn(f64) -> Result<f64>,
    f2: f64,
    alpha: f64,
    delta: f64,
    y: f64,
    v0: f64,
) -> Result<f64> {
    let fp0 = fprime(y)?;
    let q = Quadrature::new(1e-10, 1e-9).with_max_intervals(4000);
    let e = 1.0 / (2.0 - alpha);
    let k = 1.0 / (alpha - 1.0);
    let t0 = v0.powf(2.0 - alpha);
    let mut err: Option<Error> = None;
    let mut side = |sign: f64| -> Result<f64> {
        let mut eval = |v: f64| -> f64 {
            match fprime(y + sign * v.min(1e15)) {
                Ok(x) => x - fp0,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        let near = sign * f2 * v0.powf(2.0 - alpha) / (2.0 - alpha);
        let inner = q
            .integrate_breaks(
                |t: f64| {
                    let v = t.powf(e);
                    eval(v) / v * e
                },
                &[t0, 0.01f64.max(t0), 0.1f64.max(t0), 1.0],
                "generator inner",
            )?
            .value;
        let outer = q
            .integrate_breaks(
                |xi: f64| if xi == 0.0 { 0.0 } else { eval(xi.powf(-k)) * k },
                &[0.0, 1e-6, 1e-3, 0.1, 1.0],
                "generator outer",
            )?
            .value;
        Ok(near + inner + outer)
    };
    let right = side(1.0)?;
    let left = side(-1.0)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(d_alpha(alpha) / (2.0 * alpha) * ((1.0 + delta) * right - (1.0 - delta) * left))
}
