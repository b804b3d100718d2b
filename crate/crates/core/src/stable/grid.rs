//! Tabulated density of S_α(1, δ) with cubic Hermite interpolation.
//!
//! Each node stores p, p' and the distribution function, so interpolated values of p and F
//! are accurate to O(h^4). Beyond the grid the tail series in powers y^{-kα} extrapolates
//! density and tail probabilities.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::inversion::StableKernel;
use crate::error::{Error, Result};
use crate::stats::ols;

/// Layout of a density grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub points: usize,
    /// Half-width of the uniformly spaced core.
    pub core: f64,
    /// Outer edge Y_cut.
    pub y_cut: f64,
    pub rel_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 4001,
            core: 2.0,
            y_cut: 50.0,
            rel_tol: 1e-8,
        }
    }
}

/// Most terms kept from the tail series.
const TAIL_TERMS: usize = 40;

/// Tail series of S_α(1, δ) as y → +∞: p(y) ≈ Σ_k c_k y^{-kα-1} with
/// c_k = (-1)^{k+1} r^k Γ(kα+1) sin(k(πα/2 + φ)) / (π k!), where r e^{-iφ} = 1 - iδ tan(πα/2).
/// The series is asymptotic; it is cut at its smallest term at the grid edge.
#[derive(Debug, Clone)]
struct Tail {
    alpha: f64,
    coef: Vec<f64>,
    usable: bool,
}

impl Tail {
    /// Series for the side where δ acts as `delta`, checked against S and p at `edge`.
    fn series(alpha: f64, delta: f64, edge: f64, s: f64, p: f64) -> Tail {
        let k_skew = delta * (FRAC_PI_2 * alpha).tan();
        let (r, phi) = (k_skew.hypot(1.0), k_skew.atan());
        let mut coef = Vec::new();
        let mut last = f64::INFINITY;
        for k in 1..=TAIL_TERMS {
            let kf = k as f64;
            let mag = (kf * r.ln() + libm::lgamma(kf * alpha + 1.0) - libm::lgamma(kf + 1.0)).exp() / PI;
            let c = if k % 2 == 1 { mag } else { -mag } * (kf * (FRAC_PI_2 * alpha + phi)).sin();
            let size = mag * edge.powf(-kf * alpha - 1.0);
            if size > last {
                break;
            }
            coef.push(c);
            last = size;
            if size < 1e-18 * p {
                break;
            }
        }
        let mut tail = Tail {
            alpha,
            coef,
            usable: false,
        };
        tail.usable = (tail.survival(edge) - s).abs() <= 1e-7 * s && (tail.density(edge) - p).abs() <= 1e-7 * p;
        tail
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coef.iter().enumerate().map(|(i, &c)| ((i + 1) as f64 * self.alpha, c))
    }

    fn survival(&self, y: f64) -> f64 {
        self.terms().map(|(ka, c)| c / ka * y.powf(-ka)).sum::<f64>().max(0.0)
    }

    fn density(&self, y: f64) -> f64 {
        self.terms().map(|(ka, c)| c * y.powf(-ka - 1.0)).sum::<f64>().max(0.0)
    }

    fn density_deriv(&self, y: f64) -> f64 {
        self.terms().map(|(ka, c)| -(ka + 1.0) * c * y.powf(-ka - 2.0)).sum()
    }

    /// ∫_y^∞ S.
    fn survival_integral(&self, y: f64) -> f64 {
        self.terms().map(|(ka, c)| c / (ka * (ka - 1.0)) * y.powf(1.0 - ka)).sum()
    }
}

/// Tabulated S_α(1, δ) density.
#[derive(Debug, Clone)]
pub struct DensityGrid {
    pub alpha: f64,
    pub delta: f64,
    pub built_tol: f64,
    /// Sorted (y, p(y)) pairs.
    pub points: Vec<(f64, f64)>,
    deriv: Vec<f64>,
    cdf: Vec<f64>,
    sf: Vec<f64>,
    right: Tail,
    left: Tail,
    kernel: StableKernel,
}

/// Summary of the built-in self checks.
#[derive(Debug, Clone, Copy)]
pub struct GridAudit {
    pub mass: f64,
    pub c_tail_right: f64,
    pub r_squared_right: f64,
    pub c_tail_exact_right: f64,
}

fn hermite(t: f64, h: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * d1
}

fn hermite_deriv(t: f64, h: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * f0 + (-6.0 * t2 + 6.0 * t) * f1) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * d0
        + (3.0 * t2 - 2.0 * t) * d1
}

type GridCache = Mutex<HashMap<(u64, u64), Arc<DensityGrid>>>;

impl DensityGrid {
    /// Default-spec grid for (α, δ), built once per process and shared.
    pub fn shared(alpha: f64, delta: f64) -> Result<Arc<DensityGrid>> {
        static CACHE: OnceLock<GridCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (alpha.to_bits(), delta.to_bits());
        if let Some(g) = cache.lock().expect("grid cache").get(&key) {
            return Ok(g.clone());
        }
        // Build outside the lock; a concurrent duplicate build is harmless.
        let grid = Arc::new(DensityGrid::build(alpha, delta, &GridSpec::default())?);
        Ok(cache.lock().expect("grid cache").entry(key).or_insert(grid).clone())
    }

    pub fn build(alpha: f64, delta: f64, spec: &GridSpec) -> Result<Self> {
        let kernel = StableKernel::new(alpha, delta)?;
        if spec.points < 11 || spec.points % 2 == 0 {
            return Err(Error::invalid("points", "need an odd count of at least 11"));
        }
        if !(spec.core > 0.0 && spec.y_cut > spec.core) {
            return Err(Error::invalid("y_cut", "need 0 < core < y_cut"));
        }
        let ys = Self::nodes(spec);
        let values: Vec<(f64, f64, f64, f64)> = ys
            .par_iter()
            .map(|&y| -> Result<(f64, f64, f64, f64)> {
                let p = kernel.pdf(y)?;
                let d = kernel.pdf_deriv(y)?;
                let (f, s) = kernel.cdf_pair(y)?;
                Ok((p, d, f, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let points: Vec<(f64, f64)> = ys.iter().zip(&values).map(|(&y, v)| (y, v.0)).collect();
        let deriv = values.iter().map(|v| v.1).collect();
        let cdf: Vec<f64> = values.iter().map(|v| v.2).collect();
        let sf: Vec<f64> = values.iter().map(|v| v.3).collect();
        let last = points.len() - 1;
        let right = Tail::series(alpha, delta, points[last].0, sf[last], points[last].1);
        let left = Tail::series(alpha, -delta, -points[0].0, cdf[0], points[0].1);
        let grid = DensityGrid {
            alpha,
            delta,
            built_tol: spec.rel_tol,
            points,
            deriv,
            cdf,
            sf,
            right,
            left,
            kernel,
        };
        let mass = grid.mass();
        if (mass - 1.0).abs() > 10.0 * spec.rel_tol {
            return Err(Error::NonConvergence {
                context: "density grid mass",
                estimate: mass,
                error: (mass - 1.0).abs(),
            });
        }
        Ok(grid)
    }

    fn nodes(spec: &GridSpec) -> Vec<f64> {
        let n_core = (spec.points / 5) | 1;
        let n_side = (spec.points - n_core) / 2;
        let half = (n_core - 1) / 2;
        let mut ys = Vec::with_capacity(spec.points);
        let ratio = (spec.y_cut / spec.core).powf(1.0 / n_side as f64);
        for j in (1..=n_side).rev() {
            ys.push(if j == n_side { -spec.y_cut } else { -spec.core * ratio.powi(j as i32) });
        }
        for j in 0..n_core {
            ys.push(spec.core * (j as f64 - half as f64) / half as f64);
        }
        for j in 1..=n_side {
            ys.push(if j == n_side { spec.y_cut } else { spec.core * ratio.powi(j as i32) });
        }
        ys
    }

    pub fn y_cut(&self) -> f64 {
        self.points.last().unwrap().0
    }

    fn segment(&self, y: f64) -> usize {
        let idx = self.points.partition_point(|&(x, _)| x <= y);
        idx.clamp(1, self.points.len() - 1) - 1
    }

    /// Total mass: segmentwise Hermite-corrected trapezoid plus the two tails.
    pub fn mass(&self) -> f64 {
        let mut m = 0.0;
        for i in 0..self.points.len() - 1 {
            let h = self.points[i + 1].0 - self.points[i].0;
            m += 0.5 * h * (self.points[i].1 + self.points[i + 1].1)
                + h * h * (self.deriv[i] - self.deriv[i + 1]) / 12.0;
        }
        m + self.sf[self.points.len() - 1] + self.cdf[0]
    }

    /// Interpolated density; exact evaluation outside the grid.
    pub fn pdf(&self, y: f64) -> f64 {
        let (lo, hi) = (self.points[0].0, self.y_cut());
        if y > hi || y < lo {
            return self
                .kernel
                .pdf(y)
                .unwrap_or_else(|_| if y > 0.0 { self.right.density(y) } else { self.left.density(-y) });
        }
        let i = self.segment(y);
        let (y0, p0) = self.points[i];
        let (y1, p1) = self.points[i + 1];
        let h = y1 - y0;
        hermite((y - y0) / h, h, p0, p1, self.deriv[i], self.deriv[i + 1]).max(0.0)
    }

    /// Interpolated (F(y), 1 - F(y)); power-tail extrapolation outside the grid.
    pub fn cdf_pair(&self, y: f64) -> (f64, f64) {
        let last = self.points.len() - 1;
        if y >= self.points[last].0 {
            let s = if self.right.usable {
                self.right.survival(y)
            } else {
                self.kernel.sf(y).unwrap_or(0.0)
            };
            return (1.0 - s, s);
        }
        if y <= self.points[0].0 {
            let f = if self.left.usable {
                self.left.survival(-y)
            } else {
                self.kernel.cdf(y).unwrap_or(0.0)
            };
            return (f, 1.0 - f);
        }
        let i = self.segment(y);
        let (y0, p0) = self.points[i];
        let (y1, p1) = self.points[i + 1];
        let h = y1 - y0;
        let t = (y - y0) / h;
        if y > 0.0 {
            let s = hermite(t, h, self.sf[i], self.sf[i + 1], -p0, -p1).clamp(0.0, 1.0);
            (1.0 - s, s)
        } else {
            let f = hermite(t, h, self.cdf[i], self.cdf[i + 1], p0, p1).clamp(0.0, 1.0);
            (f, 1.0 - f)
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        self.cdf_pair(y).0
    }

    /// Like [`Self::pdf`] but with the tail series beyond the grid instead of an exact
    /// evaluation; cheap enough for nested quadrature.
    pub fn pdf_model(&self, y: f64) -> f64 {
        let (lo, hi) = (self.points[0].0, self.y_cut());
        if y > hi && self.right.usable {
            return self.right.density(y);
        }
        if y < lo && self.left.usable {
            return self.left.density(-y);
        }
        self.pdf(y)
    }

    /// Like [`Self::pdf_deriv`] with the tail series beyond the grid.
    pub fn pdf_deriv_model(&self, y: f64) -> f64 {
        let (lo, hi) = (self.points[0].0, self.y_cut());
        if y > hi && self.right.usable {
            return self.right.density_deriv(y);
        }
        if y < lo && self.left.usable {
            return -self.left.density_deriv(-y);
        }
        self.pdf_deriv(y)
    }

    /// Interpolated p'(y) inside the grid (derivative of the density interpolant).
    pub fn pdf_deriv(&self, y: f64) -> f64 {
        if y > self.y_cut() || y < self.points[0].0 {
            return self.kernel.pdf_deriv(y).unwrap_or(0.0);
        }
        let i = self.segment(y);
        let (y0, p0) = self.points[i];
        let (y1, p1) = self.points[i + 1];
        let h = y1 - y0;
        hermite_deriv((y - y0) / h, h, p0, p1, self.deriv[i], self.deriv[i + 1])
    }

    /// Log-log fit p ≈ c y^{-α-1} on the last decade of the right tail.
    /// Returns (c, R² of the free-slope regression).
    pub fn tail_fit(&self) -> Result<(f64, f64)> {
        let edge = self.y_cut();
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .filter(|&&(y, p)| y >= edge / 10.0 && p > 0.0)
            .map(|&(y, p)| (y.ln(), p.ln()))
            .unzip();
        let fit = ols(&xs, &ys)?;
        let c = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y + (self.alpha + 1.0) * x).exp())
            .sum::<f64>()
            / xs.len() as f64;
        Ok((c, fit.r_squared))
    }

    pub fn audit(&self) -> Result<GridAudit> {
        let (c, r2) = self.tail_fit()?;
        Ok(GridAudit {
            mass: self.mass(),
            c_tail_right: c,
            r_squared_right: r2,
            c_tail_exact_right: self.alpha * (1.0 + self.delta) * super::tail_constant(self.alpha),
        })
    }

    /// E(Y - M)₊ from the grid: Hermite quadrature of (y - M)p(y) on [M, Y_cut] plus the power
    /// tail beyond Y_cut. The tail is accepted only when the log-log fit on the last decade is
    /// linear (R² ≥ 0.999); its value uses the tail series.
    pub fn call_expectation(&self, strike: f64) -> Result<f64> {
        let edge = self.y_cut();
        if !(strike > 0.0 && strike < edge) {
            return Err(Error::invalid("M", format!("{strike} must lie in (0, {edge})")));
        }
        let (_, r2) = self.tail_fit()?;
        if r2 < 0.999 || !self.right.usable {
            return Err(Error::TailFitFailure { r_squared: r2 });
        }
        let q = crate::quadrature::Quadrature::new(1e-14, 1e-11);
        let start = self.segment(strike);
        let mut breaks = vec![strike];
        breaks.extend(self.points[start + 1..].iter().map(|&(y, _)| y));
        let body = q
            .integrate_breaks(|y: f64| (y - strike) * self.pdf(y), &breaks, "grid call")?
            .value;
        // ∫_Y^∞ (y - M) p = (Y - M) S(Y) + ∫_Y^∞ S.
        let integral_s = self.right.survival_integral(edge);
        let tail = (edge - strike) * self.sf[self.points.len() - 1] + integral_s;
        Ok(body + tail)
    }

    /// CSV with header `y,p`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "y,p")?;
        for &(y, p) in &self.points {
            writeln!(w, "{y},{p}")?;
        }
        Ok(())
    }
}
