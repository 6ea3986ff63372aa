//! Wall-clock comparison of the direct `O(n²)` estimator and the projected
//! `O(K n log n)` estimator, and the break-even sample size between them.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::PairedSample;
use crate::dcov::dcov_unbiased_bruteforce;
use crate::error::{Result, RpdcError};
use crate::harness::generators::{generate_example, ExampleId, ExampleSpec};
use crate::rng::RngSeed;
use crate::rpdc::{rpdc_estimate, RpdcConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchMethod {
    Ddc,
    Rpdc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub method: BenchMethod,
    /// `None` when the work budget refused the run.
    pub mean_seconds: Option<f64>,
    pub sd_seconds: Option<f64>,
    pub median_seconds: Option<f64>,
    pub repeats: usize,
}

impl BenchmarkRow {
    pub fn skipped(&self) -> bool {
        self.mean_seconds.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub p: usize,
    pub q: usize,
    pub k_projections: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Largest `n² (p + q)` the direct estimator may be asked to do.
    pub ddc_work_budget: f64,
}

impl BenchConfig {
    pub fn new(n_list: Vec<usize>, p: usize, q: usize) -> Self {
        Self { n_list, p, q, k_projections: 50, repeats: 5, seed: 0, ddc_work_budget: 8000.0 * 8000.0 * 20.0 }
    }

    fn validate(&self) -> Result<()> {
        if self.repeats < 3 {
            return Err(RpdcError::InvalidParameter("benchmark needs repeats >= 3".into()));
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 4) {
            return Err(RpdcError::InvalidParameter("n list must be non-empty with every n >= 4".into()));
        }
        if self.k_projections == 0 || self.p == 0 || self.q == 0 {
            return Err(RpdcError::InvalidParameter("k, p, q must be positive".into()));
        }
        Ok(())
    }
}

/// Times `f` once to warm up and then `repeats` times; returns (mean, sd, median).
pub fn time_repeated(repeats: usize, mut f: impl FnMut() -> Result<()>) -> Result<(f64, f64, f64)> {
    f()?;
    let mut t = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        f()?;
        t.push(start.elapsed().as_secs_f64());
    }
    let mean = t.iter().sum::<f64>() / repeats as f64;
    let sd = (t.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (repeats as f64 - 1.0)).sqrt();
    t.sort_by(|a, b| a.total_cmp(b));
    let median = if repeats % 2 == 1 { t[repeats / 2] } else { 0.5 * (t[repeats / 2 - 1] + t[repeats / 2]) };
    Ok((mean, sd, median))
}

fn bench_data(n: usize, p: usize, q: usize, seed: u64) -> Result<PairedSample> {
    generate_example(&ExampleSpec::new(ExampleId::Ex1, n).dims(p, q).seed(RngSeed::new(seed)))
}

/// Times both estimators on identical data for every `n`.
pub fn benchmark(cfg: &BenchConfig) -> Result<Vec<BenchmarkRow>> {
    cfg.validate()?;
    let rpdc_cfg = RpdcConfig::default().with_k(cfg.k_projections).with_seed(cfg.seed);
    let mut rows = Vec::with_capacity(2 * cfg.n_list.len());
    for &n in &cfg.n_list {
        let data = bench_data(n, cfg.p, cfg.q, cfg.seed)?;
        let work = (n as f64).powi(2) * (cfg.p + cfg.q) as f64;
        let ddc = if work <= cfg.ddc_work_budget {
            Some(time_repeated(cfg.repeats, || dcov_unbiased_bruteforce(&data.x, &data.y).map(|_| ()))?)
        } else {
            None
        };
        rows.push(BenchmarkRow {
            n,
            p: cfg.p,
            q: cfg.q,
            method: BenchMethod::Ddc,
            mean_seconds: ddc.map(|t| t.0),
            sd_seconds: ddc.map(|t| t.1),
            median_seconds: ddc.map(|t| t.2),
            repeats: cfg.repeats,
        });
        let (mean, sd, median) = time_repeated(cfg.repeats, || rpdc_estimate(&data.x, &data.y, &rpdc_cfg).map(|_| ()))?;
        rows.push(BenchmarkRow {
            n,
            p: cfg.p,
            q: cfg.q,
            method: BenchMethod::Rpdc,
            mean_seconds: Some(mean),
            sd_seconds: Some(sd),
            median_seconds: Some(median),
            repeats: cfg.repeats,
        });
    }
    Ok(rows)
}

/// Break-even sample size for one total dimension `p + q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakEvenPoint {
    pub dim_sum: usize,
    pub k_projections: usize,
    /// Fitted `t_ddc ≈ c_ddc n² (p+q)`.
    pub c_ddc: f64,
    /// Fitted `t_rpdc ≈ c_rpdc n K (ln n + p + q)`.
    pub c_rpdc: f64,
    /// Root of the fitted time difference; `None` if it falls outside the search range.
    pub n0: Option<f64>,
    /// Measured `(n, t_ddc - t_rpdc)` median differences.
    pub differences: Vec<(usize, f64)>,
}

fn ddc_cost(n: f64, s: f64) -> f64 {
    n * n * s
}

fn rpdc_cost(n: f64, s: f64, k: f64) -> f64 {
    n * k * (n.ln() + s)
}

/// Least-squares scale through the origin: argmin_c Σ (t - c f)².
fn fit_scale(points: &[(f64, f64)]) -> f64 {
    let num: f64 = points.iter().map(|(f, t)| f * t).sum();
    let den: f64 = points.iter().map(|(f, _)| f * f).sum();
    num / den
}

/// For each total dimension, times both estimators over `n_list`, fits the
/// two operation-count models to the medians, and solves for the `n` at which
/// the fitted curves cross (bisection on `[4, 1e9]`).
pub fn break_even(dim_sums: &[usize], n_list: &[usize], k: usize, repeats: usize, seed: u64) -> Result<Vec<BreakEvenPoint>> {
    if dim_sums.iter().any(|&s| s < 2) {
        return Err(RpdcError::InvalidParameter("each p + q must be >= 2".into()));
    }
    dim_sums
        .iter()
        .map(|&s| {
            let p = s / 2;
            let cfg = BenchConfig { k_projections: k, repeats, seed, ddc_work_budget: f64::INFINITY, ..BenchConfig::new(n_list.to_vec(), p, s - p) };
            let rows = benchmark(&cfg)?;
            let (sf, kf) = (s as f64, k as f64);
            let mut ddc_pts = Vec::new();
            let mut rpdc_pts = Vec::new();
            let mut differences = Vec::new();
            for pair in rows.chunks(2) {
                let (d, r) = (pair[0], pair[1]);
                let nf = d.n as f64;
                let (td, tr) = (d.median_seconds.unwrap_or(f64::NAN), r.median_seconds.unwrap_or(f64::NAN));
                ddc_pts.push((ddc_cost(nf, sf), td));
                rpdc_pts.push((rpdc_cost(nf, sf, kf), tr));
                differences.push((d.n, td - tr));
            }
            let c_ddc = fit_scale(&ddc_pts);
            let c_rpdc = fit_scale(&rpdc_pts);
            let gap = |n: f64| c_ddc * ddc_cost(n, sf) - c_rpdc * rpdc_cost(n, sf, kf);
            let n0 = bisect_root(gap, 4.0, 1e9);
            Ok(BreakEvenPoint { dim_sum: s, k_projections: k, c_ddc, c_rpdc, n0, differences })
        })
        .collect()
}

/// Smallest sign change of `f` on a log grid over `[lo, hi]`, refined by bisection.
fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let steps = 400;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut a = lo;
    let mut fa = f(a);
    for _ in 0..steps {
        let b = a * ratio;
        let fb = f(b);
        if fa == 0.0 {
            return Some(a);
        }
        if fa.signum() != fb.signum() {
            let (mut l, mut h, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (l + h);
                let fm = f(m);
                if fm.signum() == fl.signum() {
                    l = m;
                    fl = fm;
                } else {
                    h = m;
                }
            }
            return Some(0.5 * (l + h));
        }
        a = b;
        fa = fb;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_summary() {
        let mut calls = 0;
        let (mean, sd, median) = time_repeated(3, || {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(calls, 4);
        assert!(mean >= 0.0 && sd >= 0.0 && median >= 0.0);
    }

    #[test]
    fn budget_guard_skips_ddc() {
        let mut cfg = BenchConfig::new(vec![50, 400], 2, 2);
        cfg.repeats = 3;
        cfg.k_projections = 5;
        cfg.ddc_work_budget = 100.0 * 100.0 * 4.0;
        let rows = benchmark(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(!rows[0].skipped());
        assert!(rows[2].skipped() && rows[2].method == BenchMethod::Ddc);
        assert!(!rows[3].skipped());
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = BenchConfig::new(vec![50], 2, 2);
        cfg.repeats = 2;
        assert!(benchmark(&cfg).is_err());
        assert!(benchmark(&BenchConfig::new(vec![3], 2, 2)).is_err());
    }

    #[test]
    fn root_finder() {
        let r = bisect_root(|n| 0.5 * n * n - 1000.0 * n.ln(), 4.0, 1e9).unwrap();
        assert!((0.5 * r * r - 1000.0 * r.ln()).abs() < 1e-6);
        assert!(bisect_root(|n| n, 4.0, 10.0).is_none());
    }

    #[test]
    fn break_even_smoke() {
        let pts = break_even(&[4], &[64, 128, 256], 5, 3, 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].c_ddc > 0.0 && pts[0].c_rpdc > 0.0);
        assert_eq!(pts[0].differences.len(), 3);
    }
}
