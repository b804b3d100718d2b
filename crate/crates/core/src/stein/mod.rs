//! Stein equation `𝒜f(y) - y f'(y)/α = g(y) - ν(g)` for Y ~ S_α(1, δ) and its solution
//! `f_g(y) = -α ∫₀¹ (E g(s_w Y + w y) - ν(g)) dw / w`, `s_w = (1 - w^α)^{1/α}`.

mod generator;
mod table;
mod taylor;

pub use generator::{generator_apply, GeneratorOptions};
pub use table::FprimeTable;
pub use taylor::{sample_xtilde, taylor_remainder_check, TailLawXtilde, TaylorAudit, TaylorCase, TaylorCheck};

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{eta_constants, Etas};
use crate::error::{check_alpha, check_delta, check_finite, Error, Result};
use crate::quadrature::Quadrature;
use crate::rng::{open01, tags, Substreams};
use crate::stable::{DensityGrid, StableKernel};

pub type TestFnHandle = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which test function a [`SteinTestFn`] is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFnTag {
    /// g(x) = (x - M)₊.
    Call(f64),
    /// g(x) = (-x - M)₊.
    Put(f64),
    Identity,
    Custom,
}

/// A test function g with Lipschitz constant at most 1.
#[derive(Clone)]
pub struct SteinTestFn {
    tag: TestFnTag,
    g: TestFnHandle,
    name: String,
}

impl fmt::Debug for SteinTestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteinTestFn").field("tag", &self.tag).field("name", &self.name).finish()
    }
}

fn check_strike(m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("M", format!("{m} must be positive and finite")));
    }
    Ok(())
}

impl SteinTestFn {
    pub fn call(m: f64) -> Result<Self> {
        check_strike(m)?;
        Ok(SteinTestFn {
            tag: TestFnTag::Call(m),
            g: Arc::new(move |x| (x - m).max(0.0)),
            name: format!("call(M={m})"),
        })
    }

    pub fn put(m: f64) -> Result<Self> {
        check_strike(m)?;
        Ok(SteinTestFn {
            tag: TestFnTag::Put(m),
            g: Arc::new(move |x| (-x - m).max(0.0)),
            name: format!("put(M={m})"),
        })
    }

    pub fn identity() -> Self {
        SteinTestFn {
            tag: TestFnTag::Identity,
            g: Arc::new(|x| x),
            name: "identity".into(),
        }
    }

    /// A user function; rejected unless it passes [`Self::lipschitz_probe`].
    pub fn custom(name: impl Into<String>, g: impl Fn(f64) -> f64 + Send + Sync + 'static, seed: u64) -> Result<Self> {
        let t = SteinTestFn {
            tag: TestFnTag::Custom,
            g: Arc::new(g),
            name: name.into(),
        };
        t.lipschitz_probe(seed, 10_000)?;
        Ok(t)
    }

    pub fn tag(&self) -> TestFnTag {
        self.tag
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn handle(&self) -> TestFnHandle {
        self.g.clone()
    }

    /// Largest |g(x) - g(y)|/|x - y| over random pairs at scales from 10⁻⁶ to 10⁴; errors
    /// when it exceeds 1.
    pub fn lipschitz_probe(&self, seed: u64, pairs: usize) -> Result<f64> {
        let mut rng = Substreams::new(seed, tags::PROPERTY).stream(0);
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let mut u = || open01(rng.next_u64());
            let x = (u() - 0.5).signum() * 10f64.powf(8.0 * u() - 4.0);
            let d = (u() - 0.5).signum() * 10f64.powf(7.0 * u() - 6.0);
            let y = x + d;
            let (gx, gy) = (self.eval(x), self.eval(y));
            if !(gx.is_finite() && gy.is_finite()) {
                return Err(Error::invalid("g", format!("not finite near x = {x}")));
            }
            // Discount the rounding in forming y and in evaluating g.
            let slack = 8.0 * f64::EPSILON * (x.abs() + y.abs() + gx.abs() + gy.abs());
            worst = worst.max(((gx - gy).abs() - slack).max(0.0) / (y - x).abs());
        }
        if worst > 1.0 + 1e-9 {
            return Err(Error::invalid("g", format!("Lipschitz ratio {worst:.6} exceeds 1")));
        }
        Ok(worst)
    }
}

/// Quadrature settings of a [`SteinSolution`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SteinTolerances {
    pub abs: f64,
    pub rel: f64,
    /// Lower end of the w-integral for f itself; the integrand is bounded at 0.
    pub w_floor: f64,
    /// Step of the central differences of f'.
    pub fd_step: f64,
    /// Below this distance the generator uses f'' in place of f' increments.
    pub taylor_cut: f64,
}

impl Default for SteinTolerances {
    fn default() -> Self {
        SteinTolerances {
            abs: 1e-13,
            rel: 1e-11,
            w_floor: 1e-8,
            fd_step: 1e-3,
            taylor_cut: 1e-5,
        }
    }
}

/// s_w = (1 - w^α)^{1/α}, accurate near w = 1.
#[inline]
fn scale_at(alpha: f64, w: f64) -> f64 {
    (-(alpha * w.ln()).exp_m1()).max(0.0).powf(1.0 / alpha)
}

/// The solution f_g for one test function and one stable law.
#[derive(Clone)]
pub struct SteinSolution {
    g: SteinTestFn,
    alpha: f64,
    delta: f64,
    nu_g: f64,
    tol: SteinTolerances,
    /// Grid and kernel of the law that the call formulas run on: S_α(1, δ), or S_α(1, -δ)
    /// for a put, which is a call on -Y.
    grid: Arc<DensityGrid>,
    kernel: StableKernel,
}

impl fmt::Debug for SteinSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteinSolution")
            .field("g", &self.g)
            .field("alpha", &self.alpha)
            .field("delta", &self.delta)
            .field("nu_g", &self.nu_g)
            .finish()
    }
}

impl SteinSolution {
    pub fn new(g: SteinTestFn, alpha: f64, delta: f64) -> Result<Self> {
        Self::with_tolerances(g, alpha, delta, SteinTolerances::default())
    }

    pub fn with_tolerances(g: SteinTestFn, alpha: f64, delta: f64, tol: SteinTolerances) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        let law_delta = if matches!(g.tag, TestFnTag::Put(_)) { -delta } else { delta };
        let grid = DensityGrid::shared(alpha, law_delta)?;
        let kernel = StableKernel::new(alpha, law_delta)?;
        let mut sol = SteinSolution {
            g,
            alpha,
            delta,
            nu_g: 0.0,
            tol,
            grid,
            kernel,
        };
        sol.nu_g = match sol.g.tag {
            TestFnTag::Call(m) | TestFnTag::Put(m) => sol.kernel.call(m)?,
            TestFnTag::Identity => 0.0,
            TestFnTag::Custom => {
                let g = sol.g.handle();
                sol.expect_affine(1.0, 0.0, |x| g(x), false)?
            }
        };
        if !sol.nu_g.is_finite() {
            return Err(Error::NonConvergence {
                context: "nu(g)",
                estimate: sol.nu_g,
                error: f64::NAN,
            });
        }
        Ok(sol)
    }

    pub fn test_fn(&self) -> &SteinTestFn {
        &self.g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// ν(g) = E g(Y).
    pub fn nu_g(&self) -> f64 {
        self.nu_g
    }

    pub fn tolerances(&self) -> SteinTolerances {
        self.tol
    }

    fn quad(&self) -> Quadrature {
        Quadrature::new(self.tol.abs, self.tol.rel).with_max_intervals(4000)
    }

    /// Strike and orientation of the call formulas: f_put,δ(y) = f_call,-δ(-y).
    fn call_frame(&self) -> Option<(f64, f64)> {
        match self.g.tag {
            TestFnTag::Call(m) => Some((m, 1.0)),
            TestFnTag::Put(m) => Some((m, -1.0)),
            _ => None,
        }
    }

    /// ∫ h(s z + c) p(z) dz, or against p'(z) when `deriv`; power tails beyond the grid are
    /// folded onto (0, 1] by z = ±Y_cut u^{-1/(α-1)}.
    fn expect_affine(&self, s: f64, c: f64, h: impl Fn(f64) -> f64, deriv: bool) -> Result<f64> {
        let grid = &self.grid;
        let dens = |z: f64| if deriv { grid.pdf_deriv_model(z) } else { grid.pdf_model(z) };
        let q = Quadrature::new(1e-14, 1e-11).with_max_intervals(2000);
        let yc = grid.y_cut();
        let body = q
            .integrate_breaks(|z: f64| h(s * z + c) * dens(z), &[-yc, -10.0, -2.0, 0.0, 2.0, 10.0, yc], "stein expectation")?
            .value;
        let k = 1.0 / (self.alpha - 1.0);
        let mut tails = 0.0;
        for sign in [1.0, -1.0] {
            tails += q
                .integrate(
                    |u: f64| {
                        if u == 0.0 {
                            return 0.0;
                        }
                        let z = sign * yc * u.powf(-k);
                        h(s * z + c) * dens(z) * yc * k * u.powf(-k - 1.0)
                    },
                    0.0,
                    1.0,
                    "stein expectation tail",
                )?
                .value;
        }
        Ok(body + tails)
    }

    /// f_g(y).
    pub fn f(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        if let Some((m, o)) = self.call_frame() {
            return self.call_f(m, o * y);
        }
        let al = self.alpha;
        let g = self.g.handle();
        let mut err = None;
        let v = self
            .quad()
            .integrate_breaks(
                |w: f64| {
                    let s = scale_at(al, w);
                    match self.expect_affine(s, w * y, |x| g(x), false) {
                        Ok(e) => (e - self.nu_g) / w,
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                &[self.tol.w_floor, 0.5, 0.9, 1.0],
                "stein solution",
            )?
            .value;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(-al * v)
    }

    /// f_g'(y).
    pub fn fprime(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        if let Some((m, o)) = self.call_frame() {
            return Ok(o * self.call_fprime(m, o * y)?);
        }
        let al = self.alpha;
        let g = self.g.handle();
        let mut err = None;
        let v = self
            .quad()
            .integrate_breaks(
                |w: f64| {
                    let s = scale_at(al, w);
                    if s == 0.0 {
                        return 0.0;
                    }
                    let c = w * y;
                    let g0 = g(c);
                    match self.expect_affine(s, c, |x| g(x) - g0, true) {
                        Ok(e) => e / s,
                        Err(e) => {
                            err.get_or_insert(e);
                            0.0
                        }
                    }
                },
                &[0.0, 0.5, 0.9, 1.0],
                "stein derivative",
            )?
            .value;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(al * v)
    }

    /// f_g''(y): a direct integral for call and put functions, central differences of f'
    /// otherwise.
    pub fn fsecond(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        match self.call_frame() {
            Some((m, o)) => self.call_fsecond(m, o * y),
            None => self.fsecond_fd(y),
        }
    }

    /// Central difference of f' with the configured step.
    pub fn fsecond_fd(&self, y: f64) -> Result<f64> {
        let h = self.tol.fd_step;
        Ok((self.fprime(y + h)? - self.fprime(y - h)?) / (2.0 * h))
    }

    /// 𝒜f_g(y), evaluated from f_g' alone (never through the Stein equation).
    pub fn generator(&self, y: f64) -> Result<f64> {
        check_finite("y", y)?;
        let f2 = self.fsecond(y)?;
        generator::generator_from_derivative(|x| self.fprime(x), f2, self.alpha, self.delta, y, self.tol.taylor_cut)
    }

    /// 𝒜f_g(y) - y f_g'(y)/α - g(y) + ν(g).
    pub fn residual(&self, y: f64) -> Result<f64> {
        Ok(self.generator(y)? - y * self.fprime(y)? / self.alpha - self.g.eval(y) + self.nu_g)
    }

    /// 𝒜f_g(y) read off the Stein equation: y f'(y)/α + g(y) - ν(g).
    pub fn generator_rearranged(&self, y: f64) -> Result<f64> {
        Ok(y * self.fprime(y)? / self.alpha + self.g.eval(y) - self.nu_g)
    }

    /// Limits of f' at -∞ and +∞.
    pub fn fprime_limits(&self) -> (f64, f64) {
        match self.g.tag {
            TestFnTag::Call(_) => (0.0, -self.alpha),
            TestFnTag::Put(_) => (self.alpha, 0.0),
            TestFnTag::Identity => (-self.alpha, -self.alpha),
            TestFnTag::Custom => (f64::NAN, f64::NAN),
        }
    }

    /// f'_call(y) = -α ∫₀¹ S((M - w y)/s_w) dw.
    fn call_fprime(&self, m: f64, y: f64) -> Result<f64> {
        let al = self.alpha;
        let grid = &self.grid;
        let integrand = |w: f64| {
            let s = scale_at(al, w);
            let num = m - w * y;
            if s == 0.0 {
                return if num < 0.0 { 1.0 } else { 0.0 };
            }
            grid.cdf_pair((num / s).clamp(-1e300, 1e300)).1
        };
        let mut breaks = vec![0.0];
        if y > m {
            breaks.push(m / y);
        }
        breaks.push(1.0);
        let v = self.quad().integrate_breaks(integrand, &breaks, "stein call derivative")?.value;
        Ok(-al * v)
    }

    /// f_call(y) = -α ∫ (E(s_w Y + w y - M)₊ - C(M)) dw / w.
    fn call_f(&self, m: f64, y: f64) -> Result<f64> {
        let al = self.alpha;
        let mut err = None;
        let mut integrand = |w: f64| {
            let s = scale_at(al, w);
            let num = m - w * y;
            let itm = (-num).max(0.0);
            let x = num / s;
            let otm = if s == 0.0 || x.abs() > 1e12 {
                Ok(0.0)
            } else {
                self.kernel.otm(x).map(|o| s * o)
            };
            match otm {
                Ok(o) => (itm + o - self.nu_g) / w,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        let w0 = self.tol.w_floor;
        let mut breaks = vec![w0];
        if y > m && m / y > w0 {
            breaks.push(m / y);
        }
        breaks.push(1.0);
        let q = Quadrature::new(1e-12, 1e-10).with_max_intervals(4000);
        let v = q.integrate_breaks(&mut integrand, &breaks, "stein call solution")?.value;
        if let Some(e) = err {
            return Err(e);
        }
        Ok(-al * v)
    }

    /// f''_call(y) = -α/(α-1) ∫₀¹ (1-t)^{2/α-1} p((M - w y)/s) dτ, t = τ^{α/(α-1)},
    /// w = (1-t)^{1/α}, s = τ^{1/(α-1)}.
    fn call_fsecond(&self, m: f64, y: f64) -> Result<f64> {
        let al = self.alpha;
        let grid = &self.grid;
        let (pt, ps) = (al / (al - 1.0), 1.0 / (al - 1.0));
        let integrand = |tau: f64| {
            if tau == 0.0 {
                return 0.0;
            }
            let one_minus_t = -(pt * tau.ln()).exp_m1();
            let w = one_minus_t.powf(1.0 / al);
            let s = tau.powf(ps);
            let x = ((m - w * y) / s).clamp(-1e300, 1e300);
            one_minus_t.powf(2.0 / al - 1.0) * grid.pdf_model(x)
        };
        let mut breaks = vec![0.0];
        if y > m {
            let t = 1.0 - (m / y).powf(al);
            let tau = t.powf(1.0 / pt);
            if tau > 0.0 && tau < 1.0 {
                breaks.push(tau);
            }
        }
        breaks.push(1.0);
        // f'' decays like y⁻², so the absolute tolerance shrinks with the distance to M.
        let q = Quadrature::new(1e-8 / (1.0 + (y - m) * (y - m)), 1e-8).with_max_intervals(10_000);
        let v = q.integrate_breaks(integrand, &breaks, "stein call second derivative")?.value;
        Ok(-al / (al - 1.0) * v)
    }

    /// max |f''| over `ys` by central differences of f'.
    pub fn second_derivative_grid_sup(&self, ys: &[f64]) -> Result<f64> {
        let vals: Result<Vec<f64>> = ys.par_iter().map(|&y| self.fsecond_fd(y).map(f64::abs)).collect();
        Ok(vals?.into_iter().fold(0.0, f64::max))
    }

    /// Regularity of f_g on `ys`: sup|f'|, sup|f''| by differences and directly, and the
    /// bounds they are held to. f'' of a call solution has a cusp at y = M, where central
    /// differences undershoot; the checks use the larger of the two sups.
    pub fn regularity(&self, ys: &[f64]) -> Result<Regularity> {
        let rows: Result<Vec<(f64, f64, f64)>> = ys
            .par_iter()
            .map(|&y| Ok((self.fprime(y)?.abs(), self.fsecond_fd(y)?.abs(), self.fsecond(y)?.abs())))
            .collect();
        let rows = rows?;
        let fold = |k: usize| {
            rows.iter()
                .map(|r| [r.0, r.1, r.2][k])
                .enumerate()
                .fold((0.0, 0usize), |acc, (i, v)| if v > acc.0 { (v, i) } else { acc })
        };
        let (fprime_sup, _) = fold(0);
        let (fsecond_sup, at) = fold(1);
        let (fsecond_direct_sup, _) = fold(2);
        let etas = eta_constants(self.alpha, self.delta)?;
        let bounds = RegularityBounds::new(&etas, self.alpha, self.delta, self.g.tag);
        Ok(Regularity {
            fprime_sup,
            fsecond_sup,
            fsecond_direct_sup,
            fsecond_argmax: ys.get(at).copied().unwrap_or(f64::NAN),
            bounds,
        })
    }
}

/// The bounds on sup|f'| and sup|f''| for the solution of a Lipschitz-1 test function.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityBounds {
    /// α.
    pub fprime: f64,
    /// 4η₂.
    pub uniform: f64,
    /// η₃ M^{-2(α-1)/(3α-1)} for call and put functions with M > 2.
    pub nonuniform: Option<f64>,
    /// η₄ M^{-(α²-1)/(α²+2α-1)} for call and put functions when δ = 0.
    pub symmetric: Option<f64>,
}

impl RegularityBounds {
    pub fn new(etas: &Etas, alpha: f64, delta: f64, tag: TestFnTag) -> Self {
        let strike = match tag {
            TestFnTag::Call(m) | TestFnTag::Put(m) => Some(m),
            _ => None,
        };
        let a2 = alpha * alpha;
        RegularityBounds {
            fprime: alpha,
            uniform: 4.0 * etas.eta2,
            nonuniform: strike
                .filter(|&m| m > 2.0)
                .map(|m| etas.eta3 * m.powf(-2.0 * (alpha - 1.0) / (3.0 * alpha - 1.0))),
            symmetric: strike
                .filter(|_| delta == 0.0)
                .map(|m| etas.eta4 * m.powf(-(a2 - 1.0) / (a2 + 2.0 * alpha - 1.0))),
        }
    }
}

/// Output of [`SteinSolution::regularity`].
#[derive(Debug, Clone, Serialize)]
pub struct Regularity {
    pub fprime_sup: f64,
    pub fsecond_sup: f64,
    pub fsecond_direct_sup: f64,
    pub fsecond_argmax: f64,
    pub bounds: RegularityBounds,
}

impl Regularity {
    /// Pass flags for (f', uniform f'', non-uniform f'', symmetric f'') with the given
    /// slack on f' and f''.
    pub fn checks(&self, tol_fprime: f64, tol_fsecond: f64) -> (bool, bool, Option<bool>, Option<bool>) {
        let s = self.fsecond_sup.max(self.fsecond_direct_sup);
        (
            self.fprime_sup <= self.bounds.fprime + tol_fprime,
            s <= self.bounds.uniform + tol_fsecond,
            self.bounds.nonuniform.map(|b| s <= b + tol_fsecond),
            self.bounds.symmetric.map(|b| s <= b + tol_fsecond),
        )
    }
}

/// Evenly spaced points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(m: f64, a: f64, d: f64) -> SteinSolution {
        SteinSolution::new(SteinTestFn::call(m).unwrap(), a, d).unwrap()
    }

    #[test]
    fn nu_of_call_is_the_stable_call_price() {
        let s = call(2.0, 1.5, 0.3);
        let k = StableKernel::new(1.5, 0.3).unwrap();
        assert_eq!(s.nu_g(), k.call(2.0).unwrap());
        let p = SteinSolution::new(SteinTestFn::put(2.0).unwrap(), 1.5, 0.3).unwrap();
        // E(-Y - 2)₊ under δ equals the call under -δ.
        assert_eq!(p.nu_g(), k.mirrored().call(2.0).unwrap());
    }

    #[test]
    fn fprime_call_is_in_range_with_limits() {
        let s = call(2.0, 1.5, 0.0);
        for &y in &[-1e6, -30.0, -3.0, 0.0, 2.0, 5.0, 40.0, 1e6] {
            let v = s.fprime(y).unwrap();
            assert!((-1.5..=0.0).contains(&v), "{y}: {v}");
        }
        assert!(s.fprime(-1e9).unwrap().abs() < 1e-6);
        assert!((s.fprime(1e9).unwrap() + 1.5).abs() < 1e-6);
    }

    #[test]
    fn fprime_matches_difference_of_f() {
        let s = call(2.0, 1.5, 0.0);
        let h = 1e-3;
        for &y in &[-5.0, -1.0, 0.0, 1.7, 2.0, 3.0, 5.0] {
            let fd = (s.f(y + h).unwrap() - s.f(y - h).unwrap()) / (2.0 * h);
            let d = s.fprime(y).unwrap();
            assert!((fd - d).abs() < 1e-4, "y={y}: {fd} vs {d}");
        }
    }

    #[test]
    fn fprime_matches_double_integral_oracle() {
        // The derivative formula in (r, v) form with an inner survival from the kernel.
        let (m, a) = (2.0, 1.5);
        let k = StableKernel::new(a, 0.0).unwrap();
        let q = Quadrature::new(1e-12, 1e-10);
        let y = 0.0;
        // r = 1 - s^{α/(α-1)} removes (1-r)^{-1/α}; the r^{(1-α)/α} end is integrable.
        let pt = a / (a - 1.0);
        let inner = |r: f64| k.sf((m - r.powf(1.0 / a) * y) / (1.0 - r).powf(1.0 / a)).unwrap() * r.powf((1.0 - a) / a);
        let v = q
            .integrate(
                |s: f64| {
                    let r = 1.0 - s.powf(pt);
                    if r <= 0.0 {
                        return 0.0;
                    }
                    inner(r) * pt * s.powf(pt - 1.0)
                },
                0.0,
                1.0,
                "t",
            )
            .unwrap()
            .value;
        let d = call(m, a, 0.0).fprime(y).unwrap();
        assert!((d + v).abs() < 1e-6, "{d} vs {}", -v);
    }

    #[test]
    fn fsecond_direct_matches_differences() {
        for &(a, d) in &[(1.2, 0.0), (1.5, 0.5), (1.8, -0.5)] {
            let s = call(4.0, a, d);
            for &y in &[-3.0, 0.0, 3.5, 4.5, 8.0] {
                let direct = s.fsecond(y).unwrap();
                let fd = s.fsecond_fd(y).unwrap();
                assert!((direct - fd).abs() < 1e-5, "a={a} d={d} y={y}: {direct} vs {fd}");
            }
            // At the cusp y = M differences of f' flatten the peak.
            assert!(s.fsecond(4.0).unwrap().abs() >= s.fsecond_fd(4.0).unwrap().abs());
        }
    }

    #[test]
    fn put_is_the_reflected_call() {
        let p = SteinSolution::new(SteinTestFn::put(1.5).unwrap(), 1.4, 0.5).unwrap();
        let c = call(1.5, 1.4, -0.5);
        for &y in &[-2.0, 0.3, 4.0] {
            assert_eq!(p.fprime(y).unwrap(), -c.fprime(-y).unwrap());
            assert_eq!(p.fsecond(y).unwrap(), c.fsecond(-y).unwrap());
        }
    }

    #[test]
    fn identity_solution_is_linear() {
        let s = SteinSolution::new(SteinTestFn::identity(), 1.5, 0.4).unwrap();
        for &y in &[-10.0, -1.0, 0.5, 10.0] {
            let f = s.f(y).unwrap();
            assert!((f + 1.5 * y).abs() <= 1e-4 * (1.5 * y).abs(), "{y}: {f}");
            assert!((s.fprime(y).unwrap() + 1.5).abs() < 1e-6);
        }
    }

    #[test]
    fn call_residuals_vanish() {
        for &(a, d) in &[(1.5, 0.0), (1.2, 0.5)] {
            let s = call(2.0, a, d);
            for &y in &[-3.0, 0.0, 3.0] {
                let r = s.residual(y).unwrap();
                assert!(r.abs() < 1e-3 * (1.0 + s.test_fn().eval(y)), "a={a} d={d} y={y}: {r}");
            }
        }
    }

    #[test]
    fn symmetric_residuals_reflect() {
        let c = call(2.0, 1.5, 0.0);
        let p = SteinSolution::new(SteinTestFn::put(2.0).unwrap(), 1.5, 0.0).unwrap();
        for &y in &[0.5, 2.5] {
            let (rc, rp) = (c.residual(y).unwrap(), p.residual(-y).unwrap());
            assert!((rc - rp).abs() < 1e-9, "{rc} vs {rp}");
        }
    }

    #[test]
    fn deep_strike_solution_is_small() {
        let s = call(1e3, 1.5, 0.0);
        assert!(s.f(0.0).unwrap().abs() < 0.1);
    }

    #[test]
    fn custom_functions_are_probed() {
        assert!(SteinTestFn::custom("sin", f64::sin, 1).is_ok());
        assert!(SteinTestFn::custom("steep", |x| 2.0 * x, 1).is_err());
        let t = SteinTestFn::custom("hinge", |x: f64| (x - 2.0).max(0.0), 3).unwrap();
        let s = SteinSolution::new(t, 1.5, 0.0).unwrap();
        let c = call(2.0, 1.5, 0.0);
        // Beyond the grid the density is the two-term tail model, good to about 10⁻⁶ here.
        assert!((s.nu_g() - c.nu_g()).abs() < 2e-6, "{} vs {}", s.nu_g(), c.nu_g());
        for &y in &[-1.0, 2.5] {
            assert!((s.fprime(y).unwrap() - c.fprime(y).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn regularity_bounds_hold_for_a_call() {
        let s = call(16.0, 1.5, 0.0);
        let r = s.regularity(&linspace(-20.0, 20.0, 201)).unwrap();
        let (a, b, c, d) = r.checks(1e-4, 1e-3);
        assert!(a && b && c.unwrap() && d.unwrap(), "{r:?}");
    }
}
