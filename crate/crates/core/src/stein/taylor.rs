//! The pure power-tail law X̃ and a Monte Carlo audit of the Taylor-like remainder
//! `T = |E[X f'(Y+aX)] - E[X] E[f'(Y)] - (2Aα²/d_α) a^{α-1} E[𝒜f(Y)]|` for f = f_{g_M}.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::{FprimeTable, SteinSolution, SteinTestFn};
use crate::attraction::{AttractionLaw, AttractionSampler, DEFAULT_BUDGET};
use crate::batch::SampleBatch;
use crate::bounds::{eta_constants, q_constants, BoundInputs, Etas, Regime};
use crate::error::{check_alpha, check_delta, Error, Result};
use crate::rng::{open01, tags, Substreams, CHUNK};
use crate::stable::{stable_draw, CmsConstants, StableParams};

/// P(X̃ > x) = A(1+δ)x^{-α} for x ≥ (2A)^{1/α}, P(X̃ < x) = A(1-δ)|x|^{-α} for
/// x ≤ -(2A)^{1/α}, nothing in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailLawXtilde {
    #[serde(rename = "A")]
    pub a: f64,
    pub alpha: f64,
    pub delta: f64,
}

impl TailLawXtilde {
    pub fn new(a: f64, alpha: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("A", format!("{a} must be positive")));
        }
        Ok(TailLawXtilde { a, alpha, delta })
    }

    /// (2A)^{1/α}: the support is |x| ≥ this.
    pub fn edge(&self) -> f64 {
        (2.0 * self.a).powf(1.0 / self.alpha)
    }

    pub fn survival(&self, x: f64) -> f64 {
        let e = self.edge();
        if x >= e {
            self.a * (1.0 + self.delta) * x.powf(-self.alpha)
        } else if x > -e {
            0.5 * (1.0 + self.delta)
        } else {
            1.0 - self.a * (1.0 - self.delta) * (-x).powf(-self.alpha)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let e = self.edge();
        if x <= -e {
            self.a * (1.0 - self.delta) * (-x).powf(-self.alpha)
        } else if x < e {
            0.5 * (1.0 - self.delta)
        } else {
            1.0 - self.a * (1.0 + self.delta) * x.powf(-self.alpha)
        }
    }

    /// Explicit inverse of the distribution function on (0, 1).
    #[inline]
    pub fn quantile(&self, u: f64) -> f64 {
        let lower = 0.5 * (1.0 - self.delta);
        if u <= lower {
            -(self.a * (1.0 - self.delta) / u).powf(1.0 / self.alpha)
        } else {
            (self.a * (1.0 + self.delta) / (1.0 - u)).powf(1.0 / self.alpha)
        }
    }
}

/// `n` draws of X̃; draw i comes from substream i / CHUNK.
pub fn sample_xtilde(t: &TailLawXtilde, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let streams = Substreams::new(seed, tags::XTILDE);
    let mut values = vec![0.0; n];
    values.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let mut rng = streams.stream(c as u64);
        for v in out.iter_mut() {
            *v = t.quantile(open01(rng.next_u64()));
        }
    });
    Ok(SampleBatch::new(values, seed, "xtilde"))
}

/// Which bound of the remainder applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TaylorCase {
    /// γ = 2 - α.
    #[serde(rename = "γ=2−α")]
    Boundary,
    /// 0 < γ < 2 - α.
    #[serde(rename = "0<γ<2−α")]
    Between,
    /// γ = 0.
    #[serde(rename = "γ=0")]
    Zero,
}

/// One remainder audit.
#[derive(Debug, Clone, Serialize)]
pub struct TaylorCheck {
    pub a: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub case: TaylorCase,
    pub t_hat: f64,
    pub se: f64,
    pub bound: f64,
    pub pass: bool,
    pub paths: usize,
    /// Part of the signed remainder computed by quadrature.
    pub exact_part: f64,
    /// Monte Carlo mean of the rest.
    pub mc_mean: f64,
    pub notes: Vec<String>,
}

/// Everything the remainder audit needs for one law and strike, reusable across `a`.
pub struct TaylorAudit {
    law: AttractionLaw,
    m: f64,
    case: TaylorCase,
    sol: SteinSolution,
    table: FprimeTable,
    etas: Etas,
    q1: f64,
    sampler: AttractionSampler,
    cms: CmsConstants,
    e_fprime: f64,
    /// max |𝒜f(y) - (y f'(y)/α + g(y) - ν(g))| over the spot-check points.
    pub generator_spot_max: f64,
}

impl TaylorAudit {
    pub fn new(law: &AttractionLaw, m: f64) -> Result<Self> {
        let (alpha, delta) = (law.alpha(), law.delta());
        let (regime, _) = Regime::classify(alpha, law.gamma())?;
        let case = match regime {
            Regime::Boundary => TaylorCase::Boundary,
            Regime::Between => TaylorCase::Between,
            Regime::Zero => TaylorCase::Zero,
            Regime::Above => {
                return Err(Error::UnsupportedGamma {
                    gamma: law.gamma(),
                    alpha,
                })
            }
        };
        let sol = SteinSolution::new(SteinTestFn::call(m)?, alpha, delta)?;
        let table = FprimeTable::build(&sol)?;
        let etas = eta_constants(alpha, delta)?;
        let inputs = BoundInputs::from_law(law, 1.0, Some(m))?;
        let (q1, _) = q_constants(&inputs, &etas);
        let e_fprime = sol.expect_affine(1.0, 0.0, |y| table.eval(y), false)?;
        let spot: Result<Vec<f64>> = [-3.0, 0.0, 1.0, 3.0, m + 1.5]
            .par_iter()
            .map(|&y| Ok((sol.generator(y)? - sol.generator_rearranged(y)?).abs()))
            .collect();
        let generator_spot_max = spot?.into_iter().fold(0.0, f64::max);
        Ok(TaylorAudit {
            law: law.clone(),
            m,
            case,
            sol,
            table,
            etas,
            q1,
            sampler: AttractionSampler::new(law),
            cms: CmsConstants::new(&StableParams::standard(alpha, delta)?),
            e_fprime,
            generator_spot_max,
        })
    }

    pub fn case(&self) -> TaylorCase {
        self.case
    }

    /// The bound for this case, evaluated as printed.
    pub fn bound(&self, a: f64) -> Result<(f64, Vec<String>)> {
        let (al, big_a, l, g, m) = (self.law.alpha(), self.law.a(), self.law.l(), self.law.gamma(), self.m);
        let (e3, e4, q1) = (self.etas.eta3, self.etas.eta4, self.q1);
        let ta = (2.0 * big_a).powf(2.0 / al);
        let a2 = al * al;
        let m_sym = m.powf((a2 - 1.0) / (a2 + 2.0 * al - 1.0));
        let mut notes = Vec::new();
        let b = match self.case {
            TaylorCase::Boundary => {
                let first = 2.0 * al * ta * e3 / ((2.0 - al) * m_sym) * a;
                let second = e3 * ((2.0 * ta + 8.0 * l / (al - 1.0)) + q1) * 2.0 * (al - 1.0) * a * a.ln().abs() * m.ln()
                    / ((3.0 * al - 1.0) * m.powf(2.0 * (al - 1.0) / (3.0 * al - 1.0)));
                if m <= 1.0 {
                    notes.push(format!("log M = {} is not positive; the bound is not meaningful", m.ln()));
                }
                first + second
            }
            TaylorCase::Between => {
                let bracket = 4.0 * ta / (2.0 - al) + 8.0 * l / (2.0 - al - g) + q1;
                e3 * bracket * a.powf((1.0 - al) / (g - 1.0))
                    * m.powf(-2.0 * (al - 1.0).powi(2) / ((3.0 * al - 1.0) * (1.0 - g)))
            }
            TaylorCase::Zero => {
                let c = 1.0 / a;
                let b_int = self.law.b_integral(c)?;
                let b_sup = self.law.b_sup_tail(c);
                let first = 2.0 * al * ta * e4 / ((2.0 - al) * m_sym) * a;
                let second = 4.0 * e3 * a * m.powf(-2.0 * (al - 1.0).powi(2) / ((3.0 * al - 1.0) * (1.0 - g))) * b_int;
                let third = e3 * ((8.0 / (2.0 - al) + 2.0 * ta) + q1) * a.powf(al - 1.0) * b_sup.powf(al - 1.0)
                    * m.powf(-2.0 * (al - 1.0).powi(2) / (3.0 * al - 1.0));
                notes.push("the M exponents with and without the (1-γ) factor coincide at γ = 0".into());
                first + second + third
            }
        };
        Ok((b, notes))
    }

    /// Estimates T with `paths` draws of (X, Y), sharing each draw across the terms of T.
    /// X (f'(Y+aX) - f'(Y)) is not square-integrable, so for |X| > 1/a it is split into
    /// X (f'(Y+aX) - f'(±∞)), which is sampled, and X (f'(±∞) - f'(Y)), whose mean comes
    /// from the partial moments of X and E f'(Y) by quadrature. 𝒜f(Y) is read off the Stein
    /// equation.
    pub fn check(&self, a: f64, paths: usize, seed: u64) -> Result<TaylorCheck> {
        let cap = (2.0 * self.law.a()).powf(-1.0 / self.law.alpha()).min(1.0);
        if !(a > 0.0 && a < cap) {
            return Err(Error::invalid("a", format!("{a} is not in (0, {cap})")));
        }
        if paths == 0 {
            return Err(Error::EmptyBatch);
        }
        if paths as u128 > DEFAULT_BUDGET {
            return Err(Error::BudgetExceeded {
                requested: paths as u128,
                budget: DEFAULT_BUDGET,
            });
        }
        let al = self.law.alpha();
        let (_, d_alpha) = self.law.sigma_norm();
        let c_a = 2.0 * self.law.a() * al * al / d_alpha * a.powf(al - 1.0);
        let (lim_lo, lim_hi) = self.table.limits();
        let nu = self.sol.nu_g();
        let m = self.m;
        let cut = 1.0 / a;
        // E[X 1{X > c}] and E[X 1{X < -c}].
        let upper = self.law.partial_moments(cut, 1.0)?.0 + cut * self.law.survival(cut);
        let lower = -(self.law.partial_moments(-cut, 1.0)?.1 + cut * self.law.cdf(-cut));
        let exact = upper * (lim_hi - self.e_fprime) + lower * (lim_lo - self.e_fprime);

        let streams = Substreams::new(seed, tags::TAYLOR);
        let chunks = paths.div_ceil(CHUNK);
        let sums: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = streams.stream(c as u64);
                let len = CHUNK.min(paths - c * CHUNK);
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..len {
                    let x = self.sampler.draw(&mut rng);
                    let y = stable_draw(&mut rng, &self.cms);
                    let fy = self.table.eval(y);
                    let base = if x > cut {
                        lim_hi
                    } else if x < -cut {
                        lim_lo
                    } else {
                        fy
                    };
                    let af = y * fy / al + (y - m).max(0.0) - nu;
                    let z = x * (self.table.eval(y + a * x) - base) - c_a * af;
                    s1 += z;
                    s2 += z * z;
                }
                (s1, s2)
            })
            .collect();
        let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        let n = paths as f64;
        let mean = s1 / n;
        let var = ((s2 - n * mean * mean) / (n - 1.0).max(1.0)).max(0.0);
        let se = (var / n).sqrt();
        let t_hat = (exact + mean).abs();
        let (bound, mut notes) = self.bound(a)?;
        if self.generator_spot_max > 1e-3 {
            notes.push(format!(
                "generator spot check differs by {:.3e} from the rearranged Stein equation",
                self.generator_spot_max
            ));
        }
        Ok(TaylorCheck {
            a,
            m,
            case: self.case,
            t_hat,
            se,
            bound,
            pass: t_hat <= bound + 3.0 * se && self.generator_spot_max <= 1e-3,
            paths,
            exact_part: exact,
            mc_mean: mean,
            notes,
        })
    }
}

/// One-shot [`TaylorAudit`] for a single `a`.
pub fn taylor_remainder_check(law: &AttractionLaw, m: f64, a: f64, paths: usize, seed: u64) -> Result<TaylorCheck> {
    TaylorAudit::new(law, m)?.check(a, paths, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::pareto_preset;

    #[test]
    fn xtilde_support_and_tails() {
        let t = TailLawXtilde::new(0.5, 1.5, 0.0).unwrap();
        let b = sample_xtilde(&t, 200_000, 11).unwrap();
        let e = t.edge();
        assert!(b.values.iter().all(|x| x.abs() >= e));
        let x = 2.0 * e;
        let p = b.values.iter().filter(|&&v| v > x).count() as f64 / b.len() as f64;
        let exact = 0.5 * x.powf(-1.5);
        let se = (exact * (1.0 - exact) / b.len() as f64).sqrt();
        assert!((p - exact).abs() < 3.0 * se, "{p} vs {exact}");
        let one_sided = TailLawXtilde::new(0.5, 1.5, 1.0).unwrap();
        assert!(sample_xtilde(&one_sided, 10_000, 2).unwrap().values.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn xtilde_distribution_is_consistent() {
        let t = TailLawXtilde::new(0.7, 1.3, -0.4).unwrap();
        for &x in &[-9.0, -2.0, 0.0, 1.0, 2.0, 9.0] {
            assert!((t.cdf(x) + t.survival(x) - 1.0).abs() < 1e-15);
        }
        for &u in &[0.01, 0.3, 0.69, 0.71, 0.99] {
            let x = t.quantile(u);
            assert!((t.cdf(x) - u).abs() < 1e-12, "{u}");
        }
    }

    #[test]
    fn steep_tails_are_unsupported() {
        let law = pareto_preset(1.5).unwrap();
        assert!(matches!(TaylorAudit::new(&law, 4.0), Err(Error::UnsupportedGamma { .. })));
    }

    #[test]
    fn boundary_law_remainder_is_below_bound_and_shrinks() {
        let law = AttractionLaw::power_tail(1.5, 0.5, 0.0, 0.2, 0.5).unwrap();
        let audit = TaylorAudit::new(&law, 4.0).unwrap();
        assert_eq!(audit.case(), TaylorCase::Boundary);
        assert!(audit.generator_spot_max < 1e-3, "{}", audit.generator_spot_max);
        let mut last: Option<TaylorCheck> = None;
        for &a in &[0.2, 0.1, 0.05] {
            let c = audit.check(a, 200_000, 5).unwrap();
            assert!(c.pass, "{c:?}");
            if let Some(p) = &last {
                // Smaller a, smaller remainder, up to Monte Carlo noise.
                assert!(c.t_hat <= p.t_hat + 3.0 * (c.se.hypot(p.se)), "{c:?} after {p:?}");
            }
            last = Some(c);
        }
    }
}
