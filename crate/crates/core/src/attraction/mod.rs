//! Laws in the domain of normal attraction of an α-stable law:
//!
//! F(x) = 1 - (A + B(x))(1 + δ)/|x|^α for x ≥ 0 and (A + B(x))(1 - δ)/|x|^α for x < 0,
//! with |B(x)| ≤ L/|x|^γ.

mod sampler;

use std::fmt;
use std::sync::Arc;

use crate::error::{check_alpha, check_delta, check_finite, Error, Result};
use crate::quadrature::Quadrature;
use crate::stable::{d_alpha, sigma_from_tail, StableParams};

pub use sampler::{build_sn, AttractionSampler, ParetoZiggurat, SnConfig, DEFAULT_BUDGET};

/// Real function handle used for user supplied B or F.
pub type LawFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    /// Power tails S(x) = (1 + δ)(A x^{-α} + b x^{-α-γ}) beyond x0, no mass on (-x0, x0).
    PowerTail { b: f64, x0: f64 },
    Custom { b: Option<LawFn>, f: Option<LawFn> },
}

/// A law of the form above with its regime data (γ, L).
#[derive(Clone)]
pub struct AttractionLaw {
    alpha: f64,
    a: f64,
    delta: f64,
    gamma: f64,
    l: f64,
    name: String,
    shape: Shape,
}

impl fmt::Debug for AttractionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttractionLaw")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("A", &self.a)
            .field("delta", &self.delta)
            .field("gamma", &self.gamma)
            .field("L", &self.l)
            .finish()
    }
}

/// E[X], E|X| and E|X - E[X]|^{2-α}.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Moments {
    pub mean: f64,
    pub abs_mean: f64,
    pub frac_centered: f64,
}

/// Symmetric Pareto law with density α/(2|x|^{α+1}) on |x| ≥ 1:
/// A = 1/2, δ = 0, γ = 2, L = 1/2 and B(x) = (|x|^α - 1)/2 on |x| ≤ 1.
pub fn pareto_preset(alpha: f64) -> Result<AttractionLaw> {
    check_alpha(alpha)?;
    Ok(AttractionLaw {
        alpha,
        a: 0.5,
        delta: 0.0,
        gamma: 2.0,
        l: 0.5,
        name: format!("pareto alpha={alpha}"),
        shape: Shape::PowerTail { b: 0.0, x0: 1.0 },
    })
}

impl AttractionLaw {
    /// Two-term power tails: S(x) = (1 + δ)(A x^{-α} + b x^{-α-γ}) for x ≥ x0 and
    /// F(x) = (1 - δ)(A|x|^{-α} + b|x|^{-α-γ}) for x ≤ -x0, where x0 makes the law atomless.
    /// Then B(x) = b|x|^{-γ} outside (-x0, x0) and |x|^α/2 - A inside; L is the smallest
    /// constant with |B(x)| ≤ L/|x|^γ.
    pub fn power_tail(alpha: f64, a: f64, delta: f64, b: f64, gamma: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        check_finite("b", b)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("A", format!("{a} must be positive")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("{gamma} must be positive for a power-tail law")));
        }
        let mass = |x: f64| 2.0 * (a * x.powf(-alpha) + b * x.powf(-alpha - gamma));
        // Solve mass(x0) = 1 on the branch where the tail density stays positive.
        let x_min = if b < 0.0 {
            // Density α A x^{-α-1} + (α+γ) b x^{-α-γ-1} > 0 needs x^γ > -(α+γ) b /(α A).
            (-(alpha + gamma) * b / (alpha * a)).powf(1.0 / gamma)
        } else {
            0.0
        };
        let mut hi = (2.0 * a).powf(1.0 / alpha).max(x_min) + 1.0;
        while mass(hi) > 1.0 {
            hi *= 2.0;
        }
        let mut lo = x_min;
        if lo > 0.0 && mass(lo) < 1.0 {
            return Err(Error::InvalidLaw(format!("b = {b} leaves no admissible support point")));
        }
        if lo == 0.0 {
            lo = hi;
            while mass(lo) < 1.0 {
                lo *= 0.5;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x0 = 0.5 * (lo + hi);
        // sup |x|^γ |B(x)|: b outside, x^γ |x^α/2 - A| inside (peak at x^α = 2Aγ/(α+γ)).
        let inner = |x: f64| x.powf(gamma) * (0.5 * x.powf(alpha) - a).abs();
        let x_star = (2.0 * a * gamma / (alpha + gamma)).powf(1.0 / alpha);
        let l = b.abs().max(inner(x_star.min(x0))).max(inner(x0));
        let law = AttractionLaw {
            alpha,
            a,
            delta,
            gamma,
            l,
            name: format!("power-tail alpha={alpha} A={a} delta={delta} b={b} gamma={gamma}"),
            shape: Shape::PowerTail { b, x0 },
        };
        law.probe()?;
        Ok(law)
    }

    /// A law given by B and/or F. When both are given F is used for evaluation and B only
    /// for the (γ, L) regime check.
    pub fn custom(
        alpha: f64,
        a: f64,
        delta: f64,
        gamma: f64,
        l: f64,
        b: Option<LawFn>,
        f: Option<LawFn>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("A", format!("{a} must be positive")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("{gamma} must be non-negative")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid("L", format!("{l} must be positive")));
        }
        if b.is_none() && f.is_none() {
            return Err(Error::MissingBData);
        }
        let law = AttractionLaw {
            alpha,
            a,
            delta,
            gamma,
            l,
            name: "custom".into(),
            shape: Shape::Custom { b, f },
        };
        law.probe()?;
        Ok(law)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Tail constant A.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Constant L of |B(x)| ≤ L/|x|^γ.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Replaces the regime data (γ, L), e.g. to use the looser constants of a preset.
    /// The new pair is checked on the probe grid.
    pub fn with_regime(mut self, gamma: f64, l: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite() && l > 0.0 && l.is_finite()) {
            return Err(Error::invalid("gamma", format!("({gamma}, {l}) is not a valid (gamma, L) pair")));
        }
        self.gamma = gamma;
        self.l = l;
        self.probe()?;
        Ok(self)
    }

    /// Inner edge of the support for power-tail laws.
    pub fn support_edge(&self) -> Option<f64> {
        match self.shape {
            Shape::PowerTail { x0, .. } => Some(x0),
            Shape::Custom { .. } => None,
        }
    }

    /// Coefficient b of the second tail term for power-tail laws.
    pub fn tail_correction(&self) -> Option<f64> {
        match self.shape {
            Shape::PowerTail { b, .. } => Some(b),
            Shape::Custom { .. } => None,
        }
    }

    /// The stable limit S_α(1, δ) of the normalized sums.
    pub fn limit(&self) -> StableParams {
        StableParams::standard(self.alpha, self.delta).expect("validated law")
    }

    /// F_X(x).
    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_pair(x).0
    }

    /// (F(x), 1 - F(x)), each computed without cancellation where the form allows it.
    pub fn cdf_pair(&self, x: f64) -> (f64, f64) {
        let (al, a, d) = (self.alpha, self.a, self.delta);
        match &self.shape {
            Shape::PowerTail { b, x0 } => {
                let ax = x.abs();
                if ax < *x0 {
                    let f = 0.5 * (1.0 - d);
                    return (f, 0.5 * (1.0 + d));
                }
                let t = a * ax.powf(-al) + b * ax.powf(-al - self.gamma);
                if x >= 0.0 {
                    let s = (1.0 + d) * t;
                    (1.0 - s, s)
                } else {
                    let f = (1.0 - d) * t;
                    (f, 1.0 - f)
                }
            }
            Shape::Custom { f: Some(f), .. } => {
                let v = f(x).clamp(0.0, 1.0);
                (v, 1.0 - v)
            }
            Shape::Custom { b: Some(b), .. } => {
                // At x = 0 the form is 0/0; use a point just to the right, far enough out
                // that A + B(x) is not lost to cancellation.
                let xe = if x == 0.0 { 1e-4 * self.scale() } else { x };
                let t = (a + b(xe)) / xe.abs().powf(al);
                if xe > 0.0 {
                    let s = ((1.0 + d) * t).clamp(0.0, 1.0);
                    (1.0 - s, s)
                } else {
                    let f = ((1.0 - d) * t).clamp(0.0, 1.0);
                    (f, 1.0 - f)
                }
            }
            Shape::Custom { .. } => unreachable!("custom laws carry B or F"),
        }
    }

    /// Survival 1 - F_X(x).
    pub fn survival(&self, x: f64) -> f64 {
        self.cdf_pair(x).1
    }

    /// B(x); recovered from F when only F is known (undefined sides of δ = ±1 give 0).
    pub fn b(&self, x: f64) -> f64 {
        let (al, a, d) = (self.alpha, self.a, self.delta);
        match &self.shape {
            Shape::PowerTail { b, x0 } => {
                let ax = x.abs();
                if ax < *x0 {
                    0.5 * ax.powf(al) - a
                } else {
                    b * ax.powf(-self.gamma)
                }
            }
            Shape::Custom { b: Some(b), .. } => b(x),
            Shape::Custom { f: Some(f), .. } => {
                let ax = x.abs();
                if x >= 0.0 {
                    if d == -1.0 { 0.0 } else { (1.0 - f(x)) * ax.powf(al) / (1.0 + d) - a }
                } else if d == 1.0 {
                    0.0
                } else {
                    f(x) * ax.powf(al) / (1.0 - d) - a
                }
            }
            Shape::Custom { .. } => unreachable!("custom laws carry B or F"),
        }
    }

    /// Points where F may fail to be smooth.
    fn breaks(&self) -> Vec<f64> {
        match self.shape {
            Shape::PowerTail { x0, .. } => vec![-x0, x0],
            Shape::Custom { .. } => Vec::new(),
        }
    }

    fn scale(&self) -> f64 {
        (2.0 * self.a).powf(1.0 / self.alpha)
    }

    /// Probe grid of 10⁴ points, log-spaced over nine decades on each side of 0.
    pub fn probe_grid(&self) -> Vec<f64> {
        let s = self.scale();
        let half = 5000;
        let mut xs = Vec::with_capacity(2 * half);
        for k in 0..half {
            let u = -3.0 + 9.0 * k as f64 / (half - 1) as f64;
            xs.push(-s * 10f64.powf(u));
        }
        xs.reverse();
        for k in 0..half {
            let u = -3.0 + 9.0 * k as f64 / (half - 1) as f64;
            xs.push(s * 10f64.powf(u));
        }
        xs
    }

    /// Checks monotonicity (up to 10⁻⁹ of rounding noise), range, limits and |B(x)| ≤ L/|x|^γ on the probe grid.
    pub fn probe(&self) -> Result<()> {
        let xs = self.probe_grid();
        let mut prev = f64::NEG_INFINITY;
        for &x in &xs {
            let f = self.cdf(x);
            if !(f.is_finite() && (-1e-12..=1.0 + 1e-12).contains(&f)) {
                return Err(Error::InvalidLaw(format!("F({x}) = {f} is not a probability")));
            }
            if f < prev - 1e-9 {
                return Err(Error::InvalidLaw(format!("F decreases near x = {x}")));
            }
            prev = f;
            let b = self.b(x);
            let bound = self.l * x.abs().powf(-self.gamma);
            if !(b.abs() <= bound * (1.0 + 1e-9) + 1e-12) {
                return Err(Error::InvalidLaw(format!(
                    "|B({x})| = {} exceeds L/|x|^gamma = {bound}",
                    b.abs()
                )));
            }
        }
        let (lo, hi) = (self.cdf(xs[0]), self.cdf(xs[xs.len() - 1]));
        if lo > 1e-3 || hi < 1.0 - 1e-3 {
            return Err(Error::InvalidLaw(format!("F does not approach 0 and 1 (F = {lo}, {hi} at the probe ends)")));
        }
        Ok(())
    }

    /// (σ, d_α) with σ^α = 2Aα/d_α.
    pub fn sigma_norm(&self) -> (f64, f64) {
        (sigma_from_tail(self.alpha, self.a), d_alpha(self.alpha))
    }

    /// ∫₀^∞ S(m + t^{1/p}) dt and ∫₀^∞ F(m - t^{1/p}) dt, i.e. E(X - m)₊^p and E(m - X)₊^p.
    pub fn partial_moments(&self, m: f64, p: f64) -> Result<(f64, f64)> {
        // Custom laws may carry rounding noise near 0 and unknown kinks.
        let q = match self.shape {
            Shape::PowerTail { .. } => Quadrature::new(0.0, 1e-12),
            Shape::Custom { .. } => Quadrature::new(1e-11, 1e-9),
        }
        .with_max_intervals(20_000);
        let s = self.scale();
        let tail_q = 1.0 / (self.alpha / p - 1.0);
        let side = |sign: f64| -> Result<f64> {
            // sign = +1: upper side in x = m + t^{1/p}; sign = -1: lower side in x = m - t^{1/p}.
            let g = |t: f64| {
                let x = m + sign * t.powf(1.0 / p);
                if sign > 0.0 { self.survival(x) } else { self.cdf(x) }
            };
            let mut bks: Vec<f64> = self
                .breaks()
                .into_iter()
                .map(|b| sign * (b - m))
                .filter(|&d| d > 0.0)
                .map(|d| d.powf(p))
                .collect();
            let t_cut = (10.0 * (s + m.abs())).powf(p);
            bks.retain(|&b| b < t_cut);
            bks.push(0.0);
            bks.push(t_cut);
            bks.sort_by(f64::total_cmp);
            let body = q.integrate_breaks(g, &bks, "moment body")?.value;
            // t = t_cut u^{-q} turns the power tail into a bounded integrand on (0, 1].
            let tail = q
                .integrate(
                    |u: f64| {
                        if u == 0.0 {
                            return 0.0;
                        }
                        let t = t_cut * u.powf(-tail_q);
                        g(t) * t_cut * tail_q * u.powf(-tail_q - 1.0)
                    },
                    0.0,
                    1.0,
                    "moment tail",
                )?
                .value;
            Ok(body + tail)
        };
        Ok((side(1.0)?, side(-1.0)?))
    }

    /// Closed-form mean when the law has one.
    fn symbolic_mean(&self) -> Option<f64> {
        match self.shape {
            Shape::PowerTail { b, x0 } => {
                let (al, g) = (self.alpha, self.gamma);
                let ez = x0 + 2.0 * self.a * x0.powf(1.0 - al) / (al - 1.0) + 2.0 * b * x0.powf(1.0 - al - g) / (al + g - 1.0);
                Some(self.delta * ez)
            }
            Shape::Custom { .. } => None,
        }
    }

    /// E[X], E|X| and E|X - E[X]|^{2-α} by quadrature against F.
    pub fn moments(&self) -> Result<Moments> {
        let (up, down) = self.partial_moments(0.0, 1.0)?;
        let mean = up - down;
        if let Some(sym) = self.symbolic_mean() {
            if (mean - sym).abs() > 1e-8 * (1.0 + sym.abs()) {
                return Err(Error::NonConvergence {
                    context: "mean",
                    estimate: mean,
                    error: (mean - sym).abs(),
                });
            }
        }
        let (fu, fd) = self.partial_moments(mean, 2.0 - self.alpha)?;
        Ok(Moments {
            mean,
            abs_mean: up + down,
            frac_centered: fu + fd,
        })
    }

    /// ∫_{-c}^{c} |B(x)|/|x|^{α-1} dx.
    pub fn b_integral(&self, c: f64) -> Result<f64> {
        let q = Quadrature::new(1e-14, 1e-10).with_max_intervals(20_000);
        let mut bks = vec![0.0, c];
        for b in self.breaks() {
            if b > 0.0 && b < c {
                bks.push(b);
            }
        }
        bks.sort_by(f64::total_cmp);
        let al = self.alpha;
        let f = |x: f64| (self.b(x).abs() + self.b(-x).abs()) * x.powf(1.0 - al);
        Ok(q.integrate_breaks(f, &bks, "B integral")?.value)
    }

    /// sup_{|x| ≥ c} |B(x)|, scanned on a geometric grid out to 10⁹ c.
    pub fn b_sup_tail(&self, c: f64) -> f64 {
        let mut best: f64 = 0.0;
        for k in 0..=4000 {
            let x = c * 10f64.powf(9.0 * k as f64 / 4000.0);
            best = best.max(self.b(x).abs()).max(self.b(-x).abs());
        }
        best
    }
}
