//! Empirical statistics shared by the samplers, experiments and tests.

use num_complex::Complex64;

use crate::error::{Error, Result};

fn sorted(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Format("NaN in sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// sup_y |F_emp(y) - F(y)|.
pub fn ks_one_sample(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let v = sorted(values)?;
    Ok(ks_sorted(&v, cdf))
}

/// KS distance for already sorted data.
pub fn ks_sorted(v: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        // Ties: the empirical CDF jumps once past the whole run.
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        d = d.max(f - i as f64 / n).max((j + 1) as f64 / n - f);
        i = j + 1;
    }
    d
}

/// sup_y |F_a(y) - F_b(y)|.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample KS critical value c(level) sqrt((n + m)/(n m)).
pub fn ks_critical(level: f64, n: usize, m: usize) -> f64 {
    let c = (-0.5 * (level / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Empirical characteristic function (1/n) Σ e^{iλx}.
pub fn ecf(values: &[f64], lambda: f64) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &x in values {
        let (s, c) = (lambda * x).sin_cos();
        re += c;
        im += s;
    }
    let n = values.len() as f64;
    Complex64::new(re / n, im / n)
}

/// Mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Ok((mean, f64::NAN));
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Ordinary least squares y = intercept + slope x.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", x.len().min(y.len()))));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_uniform_grid() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_one_sample(&v, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ks_two_sample_disjoint_and_equal() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn ols_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let f = ols(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-15 && (f.intercept - 2.0).abs() < 1e-15);
        assert!(ols(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn critical_value() {
        // c(0.05) = 1.3581.
        assert!((ks_critical(0.05, 1, 1) / 2f64.sqrt() - 1.358_1).abs() < 1e-4);
    }
}
