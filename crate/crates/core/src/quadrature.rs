//! Globally adaptive Gauss–Kronrod (10/21) quadrature for real and complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_703_099_141,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Stopping rule: `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    resabs: f64,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(other.1.cmp(&self.1))
    }
}

fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    let mut resabs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let scale = half.abs();
    let value = resk * half;
    resabs *= scale;
    resasc *= scale;
    let mut error = ((resk - resg) * half).magnitude();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        value,
        error,
        resabs,
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
        &self,
        f: F,
        a: f64,
        b: f64,
        context: &'static str,
    ) -> Result<Estimate<T>> {
        self.integrate_breaks(f, &[a, b], context)
    }

    /// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the given panels.
    pub fn integrate_breaks<T: QuadValue, F: FnMut(f64) -> T>(
        &self,
        mut f: F,
        breaks: &[f64],
        context: &'static str,
    ) -> Result<Estimate<T>> {
        let mut panels: Vec<Panel<T>> = Vec::with_capacity(breaks.len() * 4);
        let mut heap = BinaryHeap::new();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                let p = gk21(&mut f, w[0], w[1]);
                heap.push(Key(p.error, panels.len()));
                panels.push(p);
            }
        }
        let mut evaluations = 21 * panels.len();
        loop {
            let mut total = T::zero();
            let mut err = 0.0;
            let mut resabs = 0.0;
            for p in &panels {
                if p.b > p.a {
                    total = total + p.value;
                    err += p.error;
                    resabs += p.resabs;
                }
            }
            if !total.is_finite_value() || !err.is_finite() {
                return Err(Error::NonConvergence {
                    context,
                    estimate: total.magnitude(),
                    error: err,
                });
            }
            let target = self.abs_tol.max(self.rel_tol * total.magnitude());
            let floor = 200.0 * f64::EPSILON * resabs;
            if err <= target || err <= floor {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
            let live = heap.len();
            if live >= self.max_intervals {
                return Err(Error::NonConvergence {
                    context,
                    estimate: total.magnitude(),
                    error: err,
                });
            }
            // Refine a batch of the worst panels before re-summing.
            let batch = (live / 8).clamp(1, 64);
            let mut refined = 0;
            while refined < batch {
                let Some(Key(_, idx)) = heap.pop() else { break };
                let (a, b) = (panels[idx].a, panels[idx].b);
                let mid = 0.5 * (a + b);
                if !(mid > a && mid < b) {
                    // Panel cannot be split further; freeze it.
                    continue;
                }
                panels[idx].b = a;
                let left = gk21(&mut f, a, mid);
                let right = gk21(&mut f, mid, b);
                evaluations += 42;
                heap.push(Key(left.error, panels.len()));
                panels.push(left);
                heap.push(Key(right.error, panels.len()));
                panels.push(right);
                refined += 1;
            }
            if refined == 0 {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
        }
    }
}

/// Convenience wrapper: real integral over `[a, b]` with relative tolerance.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    Ok(Quadrature::new(0.0, rel_tol)
        .integrate(f, a, b, "integrate")?
        .value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = Quadrature::new(1e-15, 1e-15);
        let e = q.integrate(|x: f64| x.powi(15), 0.0, 1.0, "t").unwrap();
        assert!((e.value - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(e.evaluations, 21);
    }

    #[test]
    fn endpoint_singularity() {
        let q = Quadrature::new(0.0, 1e-10);
        let e = q.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, "t").unwrap();
        assert!((e.value - 2.0).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn oscillatory_with_breaks() {
        let breaks: Vec<f64> = (0..=40).map(|k| k as f64 * std::f64::consts::PI / 4.0).collect();
        let q = Quadrature::new(1e-14, 1e-12);
        let e = q
            .integrate_breaks(|x: f64| (-x).exp() * (20.0 * x).cos(), &breaks, "t")
            .unwrap();
        let exact = (1.0 - (-10.0 * std::f64::consts::PI).exp()) / 401.0;
        assert!((e.value - exact).abs() < 1e-13);
    }

    #[test]
    fn complex_integrand() {
        let q = Quadrature::new(1e-14, 1e-13);
        let e = q
            .integrate(|x: f64| Complex64::new(0.0, x).exp(), 0.0, 1.0, "t")
            .unwrap();
        let exact = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((e.value - exact).norm() < 1e-14);
    }

    #[test]
    fn reports_nonconvergence() {
        let q = Quadrature::new(0.0, 1e-12).with_max_intervals(5);
        let r = q.integrate(|x: f64| (1.0 / x).sin(), 1e-8, 1.0, "t");
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
