//! Monte Carlo experiments on normalized sums: KS distance to the stable limit as n grows,
//! call-expectation errors against the explicit bounds, and density overlays.

mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::attraction::{build_sn, AttractionLaw, SnConfig, DEFAULT_BUDGET};
use crate::batch::SampleBatch;
use crate::bounds::{assemble_report, BoundInputs};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, tags, Substreams};
use crate::stable::{sample_stable, DensityGrid, StableKernel, StableParams};
use crate::stats::{ks_sorted, ks_two_sample, mean_se, ols, quantile_sorted};

pub use svg::{Plot, Series};

/// Resamples used for KS confidence intervals.
const KS_BOOTSTRAP: usize = 200;
/// Resamples used for slope confidence intervals.
const SLOPE_BOOTSTRAP: usize = 1000;
/// The smallest n is dropped from the slope fit when its KS interval is wider than this.
const MAX_CI_WIDTH: f64 = 0.2;

/// Reference distribution for the KS distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KsMode {
    /// One-sample KS against the stable CDF from the density grid.
    ExactCdf,
    /// Two-sample KS against `stable_paths` simulated stable draws.
    Reference,
}

impl KsMode {
    pub fn label(&self) -> &'static str {
        match self {
            KsMode::ExactCdf => "one-sample KS against the exact stable CDF",
            KsMode::Reference => "two-sample KS against simulated stable paths",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub law: AttractionLaw,
    pub n_list: Vec<usize>,
    pub paths_list: Vec<usize>,
    pub m_list: Vec<f64>,
    pub seed: u64,
    /// Stable draws for [`KsMode::Reference`].
    pub stable_paths: usize,
    pub ks_mode: KsMode,
    pub output_dir: Option<PathBuf>,
    /// Cap on total summand draws per cell.
    pub budget: u128,
}

impl ExperimentConfig {
    pub fn new(law: AttractionLaw, n_list: Vec<usize>, paths_list: Vec<usize>, seed: u64) -> Self {
        ExperimentConfig {
            law,
            n_list,
            paths_list,
            m_list: Vec::new(),
            seed,
            stable_paths: 500,
            ks_mode: KsMode::ExactCdf,
            output_dir: None,
            budget: DEFAULT_BUDGET,
        }
    }

    /// (n, N) = (10^k, 10^k) for k in `exps`.
    pub fn figure1(law: AttractionLaw, exps: &[u32], seed: u64) -> Self {
        let ns: Vec<usize> = exps.iter().map(|&k| 10usize.pow(k)).collect();
        Self::new(law, ns.clone(), ns, seed)
    }

    pub fn with_strikes(mut self, m_list: Vec<f64>) -> Self {
        self.m_list = m_list;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::invalid("n_list", "must not be empty"));
        }
        if self.n_list.len() != self.paths_list.len() {
            return Err(Error::invalid(
                "paths_list",
                format!("has {} entries but n_list has {}", self.paths_list.len(), self.n_list.len()),
            ));
        }
        if self.n_list.iter().chain(&self.paths_list).any(|&v| v == 0) {
            return Err(Error::invalid("n_list", "counts must be positive"));
        }
        if let Some(m) = self.m_list.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("M", format!("{m} must be positive")));
        }
        if self.ks_mode == KsMode::Reference && self.stable_paths == 0 {
            return Err(Error::invalid("stable_paths", "must be positive in reference mode"));
        }
        for (&n, &p) in self.n_list.iter().zip(&self.paths_list) {
            let requested = n as u128 * p as u128;
            if requested > self.budget {
                return Err(Error::BudgetExceeded {
                    requested,
                    budget: self.budget,
                });
            }
        }
        Ok(())
    }
}

/// One strike at one n.
#[derive(Debug, Clone, Serialize)]
pub struct CallCell {
    #[serde(rename = "M")]
    pub m: f64,
    pub estimate: f64,
    pub reference: f64,
    pub error: f64,
    pub se: f64,
    /// c₁ R_n.
    pub bound: f64,
    pub pass: bool,
    /// min(c₂,M, c₃,M) R_n.
    pub nonuniform_bound: Option<f64>,
    pub nonuniform_pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub paths: usize,
    pub ks: Option<f64>,
    pub ks_ci: Option<(f64, f64)>,
    pub calls: Vec<CallCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub fitted_slope: Option<f64>,
    pub slope_ci: Option<(f64, f64)>,
    pub intercept: Option<f64>,
    /// n dropped from the slope fit because its KS interval was too wide.
    pub excluded_n: Option<usize>,
    pub ks_mode: KsMode,
}

impl ExperimentResult {
    pub fn all_calls_pass(&self) -> bool {
        self.rows.iter().flat_map(|r| &r.calls).all(|c| c.pass && c.nonuniform_pass != Some(false))
    }
}

/// sup over sorted sample points of max(|F(x₍ᵢ₎) - i/n|, |F(x₍ᵢ₎) - (i-1)/n|).
pub fn ks_statistic(samples: &SampleBatch, reference_cdf: impl Fn(f64) -> f64) -> Result<f64> {
    crate::stats::ks_one_sample(&samples.values, reference_cdf)
}

/// KS distance of sorted CDF values u₍ᵢ₎ = F(x₍ᵢ₎) to the uniform law.
fn ks_uniform(u: &[f64]) -> f64 {
    ks_sorted(u, |v| v)
}

/// 95% interval ks ± q, where q is the 0.95 quantile of sup|F*_N - F_N| over path
/// resamples F*_N of the empirical CDF F_N; `n` is the number of paths.
fn ks_bootstrap(ks: f64, n: usize, seed: u64) -> (f64, f64) {
    let streams = Substreams::new(seed, tags::BOOTSTRAP);
    let mut stats: Vec<f64> = (0..KS_BOOTSTRAP)
        .into_par_iter()
        .map(|b| {
            let mut rng = streams.stream(b as u64);
            let mut counts = vec![0u32; n];
            for _ in 0..n {
                counts[(rng.next_u64() % n as u64) as usize] += 1;
            }
            // Both CDFs jump only at the sample points, so comparing cumulative counts suffices.
            let mut cum = 0i64;
            let mut d = 0i64;
            for (i, &c) in counts.iter().enumerate() {
                cum += c as i64;
                d = d.max((cum - (i as i64 + 1)).abs());
            }
            d as f64 / n as f64
        })
        .collect();
    stats.sort_unstable_by(f64::total_cmp);
    let q = quantile_sorted(&stats, 0.95);
    ((ks - q).max(0.0), (ks + q).min(1.0))
}

/// Least squares on (ln x, ln y), with a residual-bootstrap 95% interval for the slope
/// when there are at least 4 points.
pub fn fit_loglog_slope(points: &[(f64, f64)], seed: u64) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive point {p:?}")));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = ols(&lx, &ly)?;
    let ci = if points.len() >= 4 {
        let k = points.len();
        // Residuals rescaled by sqrt(k/(k-2)) to undo the shrinkage of the fit.
        let inflate = (k as f64 / (k as f64 - 2.0)).sqrt();
        let fitted: Vec<f64> = lx.iter().map(|x| fit.intercept + fit.slope * x).collect();
        let resid: Vec<f64> = ly.iter().zip(&fitted).map(|(y, f)| (y - f) * inflate).collect();
        let streams = Substreams::new(seed, tags::BOOTSTRAP);
        let mut slopes: Vec<f64> = (0..SLOPE_BOOTSTRAP)
            .into_par_iter()
            .filter_map(|b| {
                let mut rng = streams.stream(b as u64);
                let ys: Vec<f64> = fitted.iter().map(|f| f + resid[(rng.next_u64() % k as u64) as usize]).collect();
                ols(&lx, &ys).ok().map(|f| f.slope)
            })
            .collect();
        slopes.sort_unstable_by(f64::total_cmp);
        Some((quantile_sorted(&slopes, 0.025), quantile_sorted(&slopes, 0.975)))
    } else {
        None
    };
    Ok(SlopeFit {
        slope: fit.slope,
        intercept: fit.intercept,
        ci,
    })
}

/// E(S_n - M)₊ and its standard error from a batch of normalized sums.
fn call_estimate(values: &[f64], m: f64) -> Result<(f64, f64)> {
    let payoff: Vec<f64> = values.iter().map(|s| (s - m).max(0.0)).collect();
    mean_se(&payoff)
}

fn run_cells(cfg: &ExperimentConfig, ks: bool, calls: bool) -> Result<ExperimentResult> {
    cfg.validate()?;
    let law = &cfg.law;
    let (alpha, delta) = (law.alpha(), law.delta());
    let grid = DensityGrid::shared(alpha, delta)?;
    let kernel = StableKernel::new(alpha, delta)?;
    let reference: Option<Vec<f64>> = if ks && cfg.ks_mode == KsMode::Reference {
        let p = StableParams::standard(alpha, delta)?;
        Some(sample_stable(&p, cfg.stable_paths, derive_seed(cfg.seed, u64::MAX))?.values)
    } else {
        None
    };
    let nus: Vec<f64> = if calls {
        cfg.m_list.iter().map(|&m| kernel.call(m)).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(cfg.n_list.len());
    for (idx, (&n, &paths)) in cfg.n_list.iter().zip(&cfg.paths_list).enumerate() {
        let cell_seed = derive_seed(cfg.seed, idx as u64);
        let batch = build_sn(&SnConfig::new(law.clone(), n, paths, cell_seed).with_budget(cfg.budget))?;
        let (ks_val, ks_ci) = if ks {
            let mut v = batch.values.clone();
            v.sort_unstable_by(f64::total_cmp);
            match &reference {
                Some(r) => (Some(ks_two_sample(&v, r)?), None),
                None => {
                    let u: Vec<f64> = v.par_iter().map(|&x| grid.cdf(x)).collect();
                    let d = ks_uniform(&u);
                    (Some(d), Some(ks_bootstrap(d, u.len(), cell_seed)))
                }
            }
        } else {
            (None, None)
        };
        let mut cells = Vec::new();
        if calls {
            for (&m, &nu) in cfg.m_list.iter().zip(&nus) {
                let (estimate, se) = call_estimate(&batch.values, m)?;
                let report = assemble_report(&BoundInputs::from_law(law, n as f64, Some(m))?)?;
                let error = (estimate - nu).abs();
                cells.push(CallCell {
                    m,
                    estimate,
                    reference: nu,
                    error,
                    se,
                    bound: report.uniform_bound,
                    pass: error <= report.uniform_bound + 3.0 * se,
                    nonuniform_bound: report.nonuniform_bound,
                    nonuniform_pass: report.nonuniform_bound.map(|b| error <= b + 3.0 * se),
                });
            }
        }
        rows.push(ExperimentRow {
            n,
            paths,
            ks: ks_val,
            ks_ci,
            calls: cells,
        });
    }

    let mut result = ExperimentResult {
        rows,
        fitted_slope: None,
        slope_ci: None,
        intercept: None,
        excluded_n: None,
        ks_mode: cfg.ks_mode,
    };
    if ks {
        let mut order: Vec<&ExperimentRow> = result.rows.iter().collect();
        order.sort_by_key(|r| r.n);
        if order.len() > 2 {
            if let Some((lo, hi)) = order[0].ks_ci {
                if hi - lo > MAX_CI_WIDTH {
                    result.excluded_n = Some(order[0].n);
                    order.remove(0);
                }
            }
        }
        let pts: Vec<(f64, f64)> = order.iter().map(|r| (r.n as f64, r.ks.unwrap_or(f64::NAN))).collect();
        let distinct = pts.windows(2).any(|w| w[0].0 != w[1].0);
        if pts.len() >= 2 && distinct {
            let fit = fit_loglog_slope(&pts, derive_seed(cfg.seed, u64::MAX - 1))?;
            result.fitted_slope = Some(fit.slope);
            result.intercept = Some(fit.intercept);
            result.slope_ci = fit.ci;
        }
    }
    Ok(result)
}

/// KS distance of S_n to the stable limit for each (n, N) and the log-log slope in n.
pub fn run_ks_rate(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_cells(cfg, true, false)
}

/// |MC E(S_n - M)₊ - E(Y - M)₊| against c₁R_n (and the non-uniform bound) + 3 SE.
pub fn run_call_error(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.m_list.is_empty() {
        return Err(Error::invalid("M", "at least one strike is needed"));
    }
    run_cells(cfg, false, true)
}

/// Both experiments on shared batches.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_cells(cfg, true, !cfg.m_list.is_empty())
}

/// Gaussian KDE with Silverman's bandwidth 0.9 min(sd, IQR/1.34) n^{-1/5}.
pub fn kde_silverman(values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len() as f64;
    let (_, se) = mean_se(&v)?;
    let sd = if se.is_finite() { se * n.sqrt() } else { 0.0 };
    let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => 1.0,
    };
    let h = 0.9 * spread * n.powf(-0.2);
    let norm = 1.0 / (n * h * (2.0 * std::f64::consts::PI).sqrt());
    Ok(grid
        .par_iter()
        .map(|&y| {
            // Points beyond 9 bandwidths contribute below e^{-40}.
            let lo = v.partition_point(|&x| x < y - 9.0 * h);
            let hi = v.partition_point(|&x| x <= y + 9.0 * h);
            v[lo..hi].iter().map(|&x| (-0.5 * ((y - x) / h).powi(2)).exp()).sum::<f64>() * norm
        })
        .collect())
}

/// Probability mass per bin for `edges`, with two extra bins for values below the first
/// and above the last edge; the masses sum to 1.
pub fn histogram_masses(values: &[f64], edges: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("edges", "must be strictly increasing with at least 2 entries"));
    }
    let mut counts = vec![0usize; edges.len() + 1];
    for &x in values {
        counts[edges.partition_point(|&e| e <= x)] += 1;
    }
    let n = values.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

/// Density estimates of S_n for each n on a shared y column, with the stable density.
#[derive(Debug, Clone, Serialize)]
pub struct DensityOverlay {
    pub n_list: Vec<usize>,
    pub paths: usize,
    pub y: Vec<f64>,
    /// One column per n.
    pub estimates: Vec<Vec<f64>>,
    pub stable: Vec<f64>,
    /// Number of leading rows from the KDE window; later rows are tail histogram bins.
    pub kde_rows: usize,
}

impl DensityOverlay {
    /// L¹ distance to the stable column over the KDE window.
    pub fn l1_to_stable(&self, col: usize) -> f64 {
        let k = self.kde_rows;
        let dy = self.y[1] - self.y[0];
        (0..k).map(|i| (self.estimates[col][i] - self.stable[i]).abs()).sum::<f64>() * dy
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let cols: Vec<String> = self.n_list.iter().map(|n| format!("f_n{n}")).collect();
        writeln!(w, "y,{},f_stable", cols.join(","))?;
        for i in 0..self.y.len() {
            let est: Vec<String> = self.estimates.iter().map(|c| c[i].to_string()).collect();
            writeln!(w, "{},{},{}", self.y[i], est.join(","), self.stable[i])?;
        }
        Ok(())
    }
}

/// KDE on [-10, 10] (401 points) and log-spaced histogram bins on 10 ≤ |y| ≤ 1000.
pub fn run_density_overlay(law: &AttractionLaw, n_list: &[usize], paths: usize, seed: u64, budget: u128) -> Result<DensityOverlay> {
    if n_list.is_empty() {
        return Err(Error::invalid("n_list", "must not be empty"));
    }
    let p = StableParams::standard(law.alpha(), law.delta())?;
    let window: Vec<f64> = (0..=400).map(|i| -10.0 + 0.05 * i as f64).collect();
    let tail_edges: Vec<f64> = (0..=20).map(|i| 10.0 * 10f64.powf(i as f64 / 10.0)).collect();
    let mut centers = Vec::new();
    for sign in [-1.0, 1.0] {
        for w in tail_edges.windows(2) {
            centers.push(sign * (w[0] * w[1]).sqrt());
        }
    }
    centers.sort_by(f64::total_cmp);
    let mut edges: Vec<f64> = tail_edges.iter().rev().map(|e| -e).collect();
    edges.push(0.0);
    edges.extend(&tail_edges);

    let mut estimates = Vec::with_capacity(n_list.len());
    for (idx, &n) in n_list.iter().enumerate() {
        let batch = build_sn(&SnConfig::new(law.clone(), n, paths, derive_seed(seed, idx as u64)).with_budget(budget))?;
        let mut col = kde_silverman(&batch.values, &window)?;
        let masses = histogram_masses(&batch.values, &edges)?;
        // Bins of `edges` are [e_{k-1}, e_k) at mass index k; skip the two central bins.
        let k = tail_edges.len() - 1;
        for j in 0..k {
            col.push(masses[j + 1] / (edges[j + 1] - edges[j]));
        }
        for j in 0..k {
            let b = k + 2 + j;
            col.push(masses[b + 1] / (edges[b + 1] - edges[b]));
        }
        estimates.push(col);
    }
    let y: Vec<f64> = window.iter().copied().chain(centers).collect();
    let stable: Vec<f64> = y.par_iter().map(|&v| p.density(v)).collect::<Result<_>>()?;
    Ok(DensityOverlay {
        n_list: n_list.to_vec(),
        paths,
        y,
        estimates,
        stable,
        kde_rows: window.len(),
    })
}

fn write_file(dir: &Path, name: &str, body: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(path)
}

/// Writes rates.csv, call_error.csv, report.json, figure1a.svg and, when given, density.csv
/// and figure1b.svg. Returns the written paths.
pub fn write_artifacts(cfg: &ExperimentConfig, result: &ExperimentResult, density: Option<&DensityOverlay>) -> Result<Vec<PathBuf>> {
    let dir = cfg
        .output_dir
        .as_deref()
        .ok_or_else(|| Error::invalid("output_dir", "no output directory configured"))?;
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let mut rates = String::from("n,ks\n");
    for r in &result.rows {
        if let Some(ks) = r.ks {
            rates.push_str(&format!("{},{}\n", r.n, ks));
        }
    }
    written.push(write_file(dir, "rates.csv", rates.as_bytes())?);

    let mut calls = String::from("n,M,error,se,bound,pass\n");
    for r in &result.rows {
        for c in &r.calls {
            calls.push_str(&format!("{},{},{},{},{},{}\n", r.n, c.m, c.error, c.se, c.bound, c.pass));
        }
    }
    written.push(write_file(dir, "call_error.csv", calls.as_bytes())?);

    if let Some(d) = density {
        let mut buf = Vec::new();
        d.write_csv(&mut buf)?;
        written.push(write_file(dir, "density.csv", &buf)?);
        let k = d.kde_rows;
        let mut series: Vec<Series> = d
            .n_list
            .iter()
            .zip(&d.estimates)
            .map(|(n, col)| Series {
                label: format!("n = {n}"),
                points: d.y[..k].iter().copied().zip(col[..k].iter().copied()).collect(),
                markers: false,
            })
            .collect();
        series.push(Series {
            label: "stable".into(),
            points: d.y[..k].iter().copied().zip(d.stable[..k].iter().copied()).collect(),
            markers: false,
        });
        let plot = Plot {
            title: format!("Density of S_n, {} paths", d.paths),
            x_label: "y".into(),
            y_label: "density".into(),
            series,
            ..Default::default()
        };
        written.push(write_file(dir, "figure1b.svg", plot.render().as_bytes())?);
    }

    let ks_pts: Vec<(f64, f64)> = result.rows.iter().filter_map(|r| r.ks.map(|k| (r.n as f64, k))).collect();
    let mut series = vec![Series {
        label: "KS".into(),
        points: ks_pts.clone(),
        markers: true,
    }];
    if let (Some(s), Some(c)) = (result.fitted_slope, result.intercept) {
        series.push(Series {
            label: format!("slope {s:.3}"),
            points: ks_pts.iter().map(|&(n, _)| (n, (c + s * n.ln()).exp())).collect(),
            markers: false,
        });
    }
    let plot = Plot {
        title: "KS distance to the stable limit".into(),
        x_label: "n".into(),
        y_label: "KS".into(),
        log_x: true,
        log_y: true,
        series,
    };
    written.push(write_file(dir, "figure1a.svg", plot.render().as_bytes())?);

    let law = &cfg.law;
    let report = serde_json::json!({
        "config": {
            "law": law.name(),
            "alpha": law.alpha(),
            "A": law.a(),
            "delta": law.delta(),
            "gamma": law.gamma(),
            "L": law.l(),
            "n_list": cfg.n_list,
            "paths_list": cfg.paths_list,
            "M_list": cfg.m_list,
            "seed": cfg.seed,
            "stable_paths": cfg.stable_paths,
            "ks_mode": cfg.ks_mode,
            "ks_mode_label": cfg.ks_mode.label(),
        },
        "slope": result.fitted_slope,
        "slope_ci": result.slope_ci,
        "intercept": result.intercept,
        "excluded_n": result.excluded_n,
        "rows": result.rows,
        "pass": result.all_calls_pass(),
        "versions": { "stable-stein": env!("CARGO_PKG_VERSION") },
    });
    let body = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    written.push(write_file(dir, "report.json", body.as_bytes())?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::pareto_preset;
    use crate::rng::open01;

    fn uniform_batch(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = Substreams::new(seed, tags::PROPERTY).stream(0);
        (0..n).map(|_| open01(rng.next_u64())).collect()
    }

    #[test]
    fn ks_of_two_points_against_uniform() {
        // Jumps at 0.25 and 0.75: |0.25-0|, |0.25-0.5|, |0.75-0.5|, |0.75-1| → 0.25.
        let b = SampleBatch::new(vec![0.75, 0.25], 0, "t");
        let d = ks_statistic(&b, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        assert!(matches!(ks_statistic(&SampleBatch::new(vec![], 0, "t"), |x| x), Err(Error::EmptyBatch)));
    }

    #[test]
    fn ks_at_quantiles_is_small() {
        let n = 99;
        let v: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let d = ks_uniform(&v);
        assert!((d - 1.0 / (n + 1) as f64).abs() < 1e-12, "{d}");
    }

    #[test]
    fn ks_ignores_input_order() {
        let mut v = uniform_batch(500, 3);
        let a = ks_statistic(&SampleBatch::new(v.clone(), 0, "t"), |x| x).unwrap();
        v.reverse();
        let b = ks_statistic(&SampleBatch::new(v, 0, "t"), |x| x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exact_power_law_slope() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-1.0 / 3.0))).collect();
        let f = fit_loglog_slope(&pts, 1).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        let (lo, hi) = f.ci.unwrap();
        assert!((lo + 1.0 / 3.0).abs() < 1e-12 && (hi + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_fit_interpolates() {
        let f = fit_loglog_slope(&[(2.0, 8.0), (4.0, 2.0)], 1).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.ci.is_none());
        assert!(matches!(fit_loglog_slope(&[(2.0, 1.0)], 1), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_loglog_slope(&[(2.0, 1.0), (2.0, 3.0)], 1), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn slope_interval_coverage() {
        // Gaussian noise of sd 0.1 on ln y around ln(2) - x/3 at 10 abscissae.
        let mut covered = 0;
        for rep in 0..100u64 {
            let mut rng = Substreams::new(rep, tags::PROPERTY).stream(1);
            let pts: Vec<(f64, f64)> = (0..10)
                .map(|i| {
                    let x = 10f64.powf(1.0 + 0.4 * i as f64);
                    let (u1, u2) = (open01(rng.next_u64()), open01(rng.next_u64()));
                    let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                    (x, (2f64.ln() - x.ln() / 3.0 + 0.1 * z).exp())
                })
                .collect();
            let (lo, hi) = fit_loglog_slope(&pts, rep).unwrap().ci.unwrap();
            if lo <= -1.0 / 3.0 && -1.0 / 3.0 <= hi {
                covered += 1;
            }
        }
        assert!(covered >= 90, "{covered}/100");
    }

    #[test]
    fn histogram_masses_are_normalized() {
        let v = uniform_batch(1000, 5).iter().map(|u| 40.0 * u - 20.0).collect::<Vec<_>>();
        let edges: Vec<f64> = (0..=20).map(|i| -10.0 + i as f64).collect();
        let m = histogram_masses(&v, &edges).unwrap();
        assert_eq!(m.len(), 22);
        assert!((m.iter().sum::<f64>() - 1.0).abs() <= 1e-9 * m.len() as f64);
    }

    #[test]
    fn kde_integrates_to_one_for_compact_data() {
        let v = uniform_batch(2000, 9);
        let grid: Vec<f64> = (0..=600).map(|i| -1.0 + i as f64 / 200.0).collect();
        let f = kde_silverman(&v, &grid).unwrap();
        let mass: f64 = f.iter().sum::<f64>() / 200.0;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn config_validation() {
        let law = pareto_preset(1.5).unwrap();
        let c = ExperimentConfig::new(law.clone(), vec![10, 100], vec![10], 1);
        assert!(matches!(c.validate(), Err(Error::InvalidParameter { .. })));
        let mut c = ExperimentConfig::new(law, vec![100_000], vec![100_000], 1);
        assert!(matches!(c.validate(), Err(Error::BudgetExceeded { .. })));
        c.budget = u128::MAX;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn single_n_has_no_slope() {
        let law = pareto_preset(1.5).unwrap();
        let r = run_ks_rate(&ExperimentConfig::new(law, vec![100], vec![200], 4)).unwrap();
        assert!(r.fitted_slope.is_none());
        let ks = r.rows[0].ks.unwrap();
        assert!((0.0..=1.0).contains(&ks));
        let (lo, hi) = r.rows[0].ks_ci.unwrap();
        assert!(lo <= hi);
    }

    #[test]
    fn doubling_paths_keeps_ks_within_interval() {
        let law = pareto_preset(1.5).unwrap();
        let a = run_ks_rate(&ExperimentConfig::new(law.clone(), vec![100], vec![4000], 11)).unwrap();
        let b = run_ks_rate(&ExperimentConfig::new(law, vec![100], vec![8000], 12)).unwrap();
        let (lo, hi) = a.rows[0].ks_ci.unwrap();
        let kb = b.rows[0].ks.unwrap();
        let (blo, bhi) = b.rows[0].ks_ci.unwrap();
        // Intervals of the two estimates overlap.
        assert!(blo <= hi && lo <= bhi, "[{lo}, {hi}] vs {kb} in [{blo}, {bhi}]");
    }

    #[test]
    fn deep_strike_has_no_error() {
        let law = pareto_preset(1.5).unwrap();
        let cfg = ExperimentConfig::new(law, vec![100], vec![2000], 2).with_strikes(vec![1e3]);
        let r = run_call_error(&cfg).unwrap();
        let c = &r.rows[0].calls[0];
        // E(Y - M)₊ decays only like M^{1-α}: about 0.0126 at M = 1000.
        assert!(c.reference < 0.02 && c.error < 0.02, "{c:?}");
        assert!(c.pass);
    }

    #[test]
    fn reference_mode_runs() {
        let law = pareto_preset(1.5).unwrap();
        let mut cfg = ExperimentConfig::new(law, vec![10, 100], vec![500, 500], 6);
        cfg.ks_mode = KsMode::Reference;
        let r = run_ks_rate(&cfg).unwrap();
        assert!(r.rows.iter().all(|row| row.ks.unwrap() > 0.0 && row.ks_ci.is_none()));
        assert!(r.fitted_slope.is_some());
    }
}
