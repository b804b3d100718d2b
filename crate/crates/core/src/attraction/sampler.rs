//! Sampling from attraction laws and the normalized sums S_n.

use rand::RngCore;
use rayon::prelude::*;

use super::{AttractionLaw, Shape};
use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use crate::rng::{open01, tags, Substreams};

/// Default cap on n · paths for one call of [`build_sn`].
pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

const LAYERS: usize = 256;

/// Ziggurat sampler for the Pareto law P(Z > z) = z^{-α}, z ≥ 1.
///
/// Works on Y = Z - 1 with the decreasing density α(1 + y)^{-α-1}; the base strip beyond
/// `r` is sampled exactly by inversion, so draws follow the law exactly.
#[derive(Debug, Clone)]
pub struct ParetoZiggurat {
    alpha: f64,
    x: [f64; LAYERS + 1],
    fx: [f64; LAYERS + 1],
}

impl ParetoZiggurat {
    pub fn new(alpha: f64) -> Self {
        let f = |y: f64| alpha * (1.0 + y).powf(-alpha - 1.0);
        let finv = |t: f64| (t / alpha).powf(-1.0 / (alpha + 1.0)) - 1.0;
        let tail = |y: f64| (1.0 + y).powf(-alpha);
        let top = f(0.0);
        // Some(residual at the top) or None if the layers overshoot early.
        let layout = |r: f64, x: &mut [f64; LAYERS + 1]| -> Option<f64> {
            let v = r * f(r) + tail(r);
            x[0] = v / f(r);
            x[1] = r;
            for i in 1..LAYERS {
                let fy = f(x[i]) + v / x[i];
                if i < LAYERS - 1 {
                    if fy >= top {
                        return None;
                    }
                    x[i + 1] = finv(fy);
                } else {
                    return Some(fy - top);
                }
            }
            unreachable!()
        };
        let mut x = [0.0; LAYERS + 1];
        let (mut lo, mut hi): (f64, f64) = (1e-6, 1e9);
        for _ in 0..300 {
            let mid = (lo * hi).sqrt();
            match layout(mid, &mut x) {
                Some(res) if res <= 0.0 => hi = mid,
                _ => lo = mid,
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        layout(hi, &mut x).expect("ziggurat layout");
        x[LAYERS] = 0.0;
        let mut fx = [0.0; LAYERS + 1];
        for i in 0..=LAYERS {
            fx[i] = f(x[i]);
        }
        fx[0] = 0.0;
        ParetoZiggurat { alpha, x, fx }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Radius of the base layer.
    pub fn base_radius(&self) -> f64 {
        self.x[1]
    }

    /// One draw of Z with a fair random sign attached.
    #[inline]
    pub fn draw_signed<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let (z, sign) = self.draw_with_sign_bits(rng);
        // Branch-free sign flip.
        f64::from_bits(z.to_bits() ^ sign)
    }

    /// Z and a mask that is either 0 or the f64 sign bit.
    #[inline]
    fn draw_with_sign_bits<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        loop {
            let bits = rng.next_u64();
            let i = (bits & 0xff) as usize;
            let bit = (bits & 0x100) << 55;
            let u = (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let y = u * self.x[i];
            if y < self.x[i + 1] {
                return (1.0 + y, bit);
            }
            if i == 0 {
                let w = open01(rng.next_u64());
                return ((1.0 + self.x[1]) * w.powf(-1.0 / self.alpha), bit);
            }
            let h = self.fx[i] + open01(rng.next_u64()) * (self.fx[i + 1] - self.fx[i]);
            if h < self.alpha * (1.0 + y).powf(-self.alpha - 1.0) {
                return (1.0 + y, bit);
            }
        }
    }

    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw_with_sign_bits(rng).0
    }
}

#[derive(Debug, Clone)]
enum Kind {
    /// b = 0, δ = 0: symmetric Pareto scaled by x0.
    Symmetric { zig: ParetoZiggurat, x0: f64 },
    /// b ≥ 0: on each side a mixture of Pareto(α) and Pareto(α + γ) scaled by x0.
    Mixture {
        z1: ParetoZiggurat,
        z2: ParetoZiggurat,
        w1: f64,
        x0: f64,
        p_pos: f64,
    },
    /// Generalized inverse of F by bisection.
    Inverse(AttractionLaw),
}

/// Draws from an attraction law.
#[derive(Debug, Clone)]
pub struct AttractionSampler {
    kind: Kind,
}

impl AttractionSampler {
    pub fn new(law: &AttractionLaw) -> Self {
        let kind = match law.shape {
            Shape::PowerTail { b, x0 } if b == 0.0 && law.delta == 0.0 => Kind::Symmetric {
                zig: ParetoZiggurat::new(law.alpha),
                x0,
            },
            Shape::PowerTail { b, x0 } if b >= 0.0 => Kind::Mixture {
                z1: ParetoZiggurat::new(law.alpha),
                z2: ParetoZiggurat::new(law.alpha + law.gamma),
                // Conditional tail 2A x0^{-α}(x/x0)^{-α} + 2b x0^{-α-γ}(x/x0)^{-α-γ}.
                w1: 2.0 * law.a * x0.powf(-law.alpha),
                x0,
                p_pos: 0.5 * (1.0 + law.delta),
            },
            _ => Kind::Inverse(law.clone()),
        };
        AttractionSampler { kind }
    }

    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            Kind::Symmetric { zig, x0 } => x0 * zig.draw_signed(rng),
            Kind::Mixture { z1, z2, w1, x0, p_pos } => {
                let u = open01(rng.next_u64());
                let (sign, v) = if u < *p_pos { (1.0, u / p_pos) } else { (-1.0, (u - p_pos) / (1.0 - p_pos)) };
                let z = if v < *w1 { z1.draw(rng) } else { z2.draw(rng) };
                sign * x0 * z
            }
            Kind::Inverse(law) => inverse_cdf(law, open01(rng.next_u64())),
        }
    }

    /// Sum of `n` consecutive draws; same values as `n` calls of [`Self::draw`].
    pub fn sum<R: RngCore + ?Sized>(&self, rng: &mut R, n: usize) -> f64 {
        match &self.kind {
            Kind::Symmetric { zig, x0 } => {
                let mut s = 0.0;
                for _ in 0..n {
                    s += zig.draw_signed(rng);
                }
                x0 * s
            }
            _ => (0..n).map(|_| self.draw(rng)).sum(),
        }
    }
}

/// inf{x : F(x) ≥ u} by bisection to 10⁻¹² in probability, at most 200 steps.
pub(crate) fn inverse_cdf(law: &AttractionLaw, u: f64) -> f64 {
    let s = law.scale();
    let (mut lo, mut hi) = (-s, s);
    while law.cdf(lo) >= u && lo > -1e300 {
        lo *= 2.0;
    }
    while law.cdf(hi) < u && hi < 1e300 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let (flo, fhi) = (law.cdf(lo), law.cdf(hi));
        if fhi - flo <= 1e-12 && hi - lo <= 1e-12 * (1.0 + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if law.cdf(mid) >= u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl AttractionLaw {
    /// `n` i.i.d. draws; draw `i` uses substream `i`, matching the first summand of path `i`
    /// in [`build_sn`].
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleBatch> {
        if n == 0 {
            return Err(Error::EmptyBatch);
        }
        let sampler = AttractionSampler::new(self);
        let streams = Substreams::new(seed, tags::ATTRACTION);
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| sampler.draw(&mut streams.stream(i as u64)))
            .collect();
        Ok(SampleBatch::new(values, seed, self.name.clone()))
    }
}

/// Configuration of a batch of normalized sums.
#[derive(Debug, Clone)]
pub struct SnConfig {
    pub law: AttractionLaw,
    pub n: usize,
    pub paths: usize,
    pub seed: u64,
    pub budget: u128,
}

impl SnConfig {
    pub fn new(law: AttractionLaw, n: usize, paths: usize, seed: u64) -> Self {
        SnConfig {
            law,
            n,
            paths,
            seed,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// `paths` realizations of S_n = (σ n^{1/α})⁻¹ Σ (X_i - E[X]); path `j` uses substream `j`.
pub fn build_sn(cfg: &SnConfig) -> Result<SampleBatch> {
    if cfg.n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if cfg.paths == 0 {
        return Err(Error::EmptyBatch);
    }
    let requested = cfg.n as u128 * cfg.paths as u128;
    if requested > cfg.budget {
        return Err(Error::BudgetExceeded {
            requested,
            budget: cfg.budget,
        });
    }
    let law = &cfg.law;
    let mean = law.moments()?.mean;
    let (sigma, _) = law.sigma_norm();
    let norm = 1.0 / (sigma * (cfg.n as f64).powf(1.0 / law.alpha));
    let shift = cfg.n as f64 * mean;
    let sampler = AttractionSampler::new(law);
    let streams = Substreams::new(cfg.seed, tags::ATTRACTION);
    let values: Vec<f64> = (0..cfg.paths)
        .into_par_iter()
        .map(|j| {
            let mut rng = streams.stream(j as u64);
            (sampler.sum(&mut rng, cfg.n) - shift) * norm
        })
        .collect();
    Ok(SampleBatch::new(
        values,
        cfg.seed,
        format!("S_n n={} of {}", cfg.n, law.name),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::pareto_preset;
    use crate::stable::{char_fn, sample_stable, StableParams};
    use crate::stats::{ecf, ks_critical, ks_one_sample, ks_two_sample, mean_se};

    #[test]
    fn ziggurat_matches_pareto_law() {
        for &al in &[1.2, 1.5, 1.8, 2.7] {
            let z = ParetoZiggurat::new(al);
            let mut rng = Substreams::new(5, tags::PROPERTY).stream(0);
            let v: Vec<f64> = (0..200_000).map(|_| z.draw(&mut rng)).collect();
            assert!(v.iter().all(|&x| x >= 1.0));
            let d = ks_one_sample(&v, |x| if x < 1.0 { 0.0 } else { 1.0 - x.powf(-al) }).unwrap();
            // One-sample critical value at 1% is 1.628/sqrt(n).
            assert!(d < 1.628 / (v.len() as f64).sqrt(), "{al}: {d}");
        }
    }

    #[test]
    fn ziggurat_tail_frequency() {
        let al = 1.5;
        let z = ParetoZiggurat::new(al);
        let mut rng = Substreams::new(9, tags::PROPERTY).stream(1);
        let n = 1_000_000;
        let r = 1.0 + z.base_radius();
        let hits = (0..n).filter(|_| z.draw(&mut rng) > 2.0 * r).count() as f64;
        let p = (2.0 * r).powf(-al);
        assert!((hits / n as f64 - p).abs() < 4.0 * (p / n as f64).sqrt());
    }

    #[test]
    fn pareto_sample_properties() {
        let p = pareto_preset(1.5).unwrap();
        let b = p.sample(1_000_000, 3).unwrap();
        assert!(b.values.iter().all(|x| x.abs() >= 1.0));
        let (m, se) = mean_se(&b.values).unwrap();
        assert!(m.abs() < 3.0 * se, "{m} {se}");
        let n = b.len() as f64;
        let frac = b.values.iter().filter(|&&x| x > 2.0).count() as f64 / n;
        let q = 1.0 / (2.0 * 2f64.powf(1.5));
        assert!((frac - q).abs() < 3.0 * (q * (1.0 - q) / n).sqrt());
        let small = p.sample(100_000, 4).unwrap();
        let d = ks_one_sample(&small.values, |x| p.cdf(x)).unwrap();
        assert!(d < 1.628 / (1e5f64).sqrt());
    }

    #[test]
    fn mixture_and_inverse_paths_agree_with_cdf() {
        let mix = AttractionLaw::power_tail(1.4, 0.4, 0.3, 0.2, 0.6).unwrap();
        let neg = AttractionLaw::power_tail(1.4, 0.4, -0.5, -0.05, 0.6).unwrap();
        for law in [mix, neg] {
            let b = law.sample(100_000, 8).unwrap();
            let d = ks_one_sample(&b.values, |x| law.cdf(x)).unwrap();
            assert!(d < 1.628 / (1e5f64).sqrt(), "{law:?}: {d}");
        }
    }

    #[test]
    fn inverse_is_generalized() {
        let p = pareto_preset(1.5).unwrap();
        let x = inverse_cdf(&p, 0.5);
        assert!((x + 1.0).abs() < 1e-9, "{x}");
        let x = inverse_cdf(&p, 0.9);
        assert!((p.cdf(x) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn single_summand_reduces_to_scaled_draws() {
        let p = pareto_preset(1.5).unwrap();
        let (sigma, _) = p.sigma_norm();
        let s1 = build_sn(&SnConfig::new(p.clone(), 1, 1000, 21)).unwrap();
        let x = p.sample(1000, 21).unwrap();
        for (a, b) in s1.values.iter().zip(&x.values) {
            assert!((a - b / sigma).abs() < 1e-12 * (1.0 + a.abs()));
        }
        let again = build_sn(&SnConfig::new(p, 1, 1000, 21)).unwrap();
        assert_eq!(s1.values, again.values);
    }

    #[test]
    fn budget_is_enforced() {
        let p = pareto_preset(1.5).unwrap();
        let cfg = SnConfig::new(p, 1000, 1000, 1).with_budget(10_000);
        assert!(matches!(build_sn(&cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn normalized_sums_approach_the_stable_law() {
        let p = pareto_preset(1.5).unwrap();
        let s = build_sn(&SnConfig::new(p, 10_000, 10_000, 77)).unwrap();
        for k in -6..=6 {
            let l = 0.5 * k as f64;
            let diff = (ecf(&s.values, l) - char_fn(1.5, 1.0, 0.0, l)).norm();
            assert!(diff < 0.02, "{l}: {diff}");
        }
        let st = sample_stable(&StableParams::standard(1.5, 0.0).unwrap(), 10_000, 78).unwrap();
        let d = ks_two_sample(&s.values, &st.values).unwrap();
        assert!(d < ks_critical(0.05, 10_000, 10_000), "{d}");
    }
}
