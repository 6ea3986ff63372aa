//! The averaged projected estimator and the two independence tests built on it.
//!
//! Projection `k` draws its directions from substream `k` of the configured
//! seed, in the order `u_k, v_k, u'_k, v'_k`. The estimator only consumes the
//! first two, so [`rpdc_estimate`] and [`gamma_test`] see the same `u_k, v_k`
//! for a given seed.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::data::{check_paired, DataMatrix};
use crate::dcov::{dcov_prepared, DcovEstimate, DcovMethod, UnivariateSample, MIN_SAMPLE_SIZE};
use crate::error::{Result, RpdcError};
use crate::projection::{cp_constant, draw_direction, project_unchecked};
use crate::rng::RngSeed;

const TAG_PERMUTATION: u64 = 1;
const TAG_REPLICATE: u64 = 2;

/// Tuning for the projected estimator and tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpdcConfig {
    /// Number of random projections `K`.
    pub k_projections: usize,
    pub seed: RngSeed,
    /// Significance level `α_s`.
    pub significance: f64,
    /// Number of permutations `L` (permutation test only).
    pub permutations: usize,
}

impl Default for RpdcConfig {
    fn default() -> Self {
        Self { k_projections: 50, seed: RngSeed::new(0), significance: 0.05, permutations: 200 }
    }
}

impl RpdcConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k_projections = k;
        self
    }

    pub fn with_seed(mut self, master: u64) -> Self {
        self.seed = RngSeed::new(master);
        self
    }

    pub fn with_significance(mut self, alpha: f64) -> Self {
        self.significance = alpha;
        self
    }

    pub fn with_permutations(mut self, l: usize) -> Self {
        self.permutations = l;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_projections == 0 {
            return Err(RpdcError::InvalidParameter("k_projections must be >= 1".into()));
        }
        validate_alpha(self.significance)
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RpdcError::InvalidParameter(format!("significance must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

/// Shape `α` and rate `β` of a Gamma law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape.is_finite() && rate.is_finite() && shape > 0.0 && rate > 0.0) {
            return Err(RpdcError::InvalidParameter(format!("invalid Gamma parameters ({shape}, {rate})")));
        }
        Ok(Self { shape, rate })
    }

    /// Gamma law with the given mean and variance.
    pub fn from_moments(mean: f64, variance: f64) -> Result<Self> {
        if !(mean > 0.0 && variance > 0.0) {
            return Err(RpdcError::Degenerate(format!("moments mean={mean}, variance={variance}")));
        }
        Self::new(mean * mean / variance, mean / variance)
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            gamma_lr(self.shape, self.rate * x)
        }
    }

    pub fn quantile(&self, prob: f64) -> Result<f64> {
        gamma_quantile(*self, prob)
    }
}

/// The six per-projection averages that feed the Gamma approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionAverages {
    pub k: usize,
    pub n: usize,
    /// mean of `C_p C_q Ω(uᵀX, vᵀY)`
    pub omega: f64,
    /// mean of `C_p² C_q² Ω(uᵀX, uᵀX) Ω(vᵀY, vᵀY)`
    pub s1: f64,
    /// mean of `C_p a..^u / (n(n-1))`
    pub s2: f64,
    /// mean of `C_q b..^v / (n(n-1))`
    pub s3: f64,
    /// mean of `C_p² Ω(uᵀX, u'ᵀX)`
    pub omega_x: f64,
    /// mean of `C_q² Ω(vᵀY, v'ᵀY)`
    pub omega_y: f64,
}

impl ProjectionAverages {
    /// `n Ω̄ + S̄₂ S̄₃`, the Gamma test statistic.
    pub fn statistic(&self) -> f64 {
        self.n as f64 * self.omega + self.s2 * self.s3
    }

    /// Estimated `Σ λ̄_i²`.
    pub fn second_moment(&self) -> f64 {
        let k = self.k as f64;
        (k - 1.0) / k * self.omega_x * self.omega_y + self.s1 / k
    }
}

/// Moment-matched Gamma law: mean `S̄₂S̄₃`, variance `2D` with
/// `D = (K-1)/K Ω̄_X Ω̄_Y + S̄₁/K`.
pub fn gamma_params_from_projections(avg: &ProjectionAverages) -> Result<GammaParams> {
    let m = avg.s2 * avg.s3;
    let d = avg.second_moment();
    if !(m > 0.0 && m.is_finite()) {
        return Err(RpdcError::Degenerate(format!("zero pairwise distance sums (S2*S3 = {m})")));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(RpdcError::Degenerate(format!("non-positive variance estimate (D = {d})")));
    }
    GammaParams::new(0.5 * m * m / d, 0.5 * m / d)
}

fn projection_constants(x: &DataMatrix, y: &DataMatrix) -> Result<(f64, f64)> {
    Ok((cp_constant(x.ncols())?, cp_constant(y.ncols())?))
}

/// `(1/K) Σ_k C_p C_q Ω(u_kᵀX, v_kᵀY)`.
///
/// `O(K n log n)` time. Only the running sum and one projection pair are held
/// at a time. Summation is in projection order.
pub fn rpdc_estimate(x: &DataMatrix, y: &DataMatrix, cfg: &RpdcConfig) -> Result<DcovEstimate> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    cfg.validate()?;
    let value = averaged_value(x, y, cfg.k_projections, cfg.seed)?;
    Ok(DcovEstimate::projected(value, DcovMethod::ProjectedAverage, n, cfg.k_projections, cfg.seed))
}

fn averaged_value(x: &DataMatrix, y: &DataMatrix, k: usize, seed: RngSeed) -> Result<f64> {
    let (cp, cq) = projection_constants(x, y)?;
    let mut sum = 0.0;
    for idx in 0..k {
        let mut rng = seed.stream(idx as u64).rng();
        let u = draw_direction(x.ncols(), &mut rng);
        let v = draw_direction(y.ncols(), &mut rng);
        let px = UnivariateSample::prepare(&project_unchecked(x, u.components()));
        let py = UnivariateSample::prepare(&project_unchecked(y, v.components()));
        sum += dcov_prepared(&px, &py);
    }
    Ok(cp * cq * sum / k as f64)
}

/// All per-projection quantities of the Gamma test, averaged over `K`.
pub fn projection_averages(x: &DataMatrix, y: &DataMatrix, cfg: &RpdcConfig) -> Result<ProjectionAverages> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    cfg.validate()?;
    let (cp, cq) = projection_constants(x, y)?;
    let pairs = (n * (n - 1)) as f64;
    let k = cfg.k_projections;
    let (mut omega, mut s1, mut s2, mut s3, mut ox, mut oy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for idx in 0..k {
        let mut rng = cfg.seed.stream(idx as u64).rng();
        let u = draw_direction(x.ncols(), &mut rng);
        let v = draw_direction(y.ncols(), &mut rng);
        let u2 = draw_direction(x.ncols(), &mut rng);
        let v2 = draw_direction(y.ncols(), &mut rng);
        let px = UnivariateSample::prepare(&project_unchecked(x, u.components()));
        let py = UnivariateSample::prepare(&project_unchecked(y, v.components()));
        let px2 = UnivariateSample::prepare(&project_unchecked(x, u2.components()));
        let py2 = UnivariateSample::prepare(&project_unchecked(y, v2.components()));

        omega += dcov_prepared(&px, &py);
        s1 += dcov_prepared(&px, &px) * dcov_prepared(&py, &py);
        s2 += px.total() / pairs;
        s3 += py.total() / pairs;
        ox += dcov_prepared(&px, &px2);
        oy += dcov_prepared(&py, &py2);
    }
    let kf = k as f64;
    Ok(ProjectionAverages {
        k,
        n,
        omega: cp * cq * omega / kf,
        s1: cp * cp * cq * cq * s1 / kf,
        s2: cp * s2 / kf,
        s3: cq * s3 / kf,
        omega_x: cp * cp * ox / kf,
        omega_y: cq * cq * oy / kf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    RpdcPermutation,
    RpdcGamma,
    DdcGamma,
    Wilks,
    PuriSen,
}

impl TestMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TestMethod::RpdcPermutation => "rpdc-perm",
            TestMethod::RpdcGamma => "rpdc-gamma",
            TestMethod::DdcGamma => "ddc",
            TestMethod::Wilks => "wilks",
            TestMethod::PuriSen => "puri-sen",
        }
    }
}

impl std::str::FromStr for TestMethod {
    type Err = RpdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rpdc-perm" | "rpdc_permutation" => Ok(TestMethod::RpdcPermutation),
            "rpdc-gamma" | "rpdc_gamma" | "rpdc" => Ok(TestMethod::RpdcGamma),
            "ddc" | "ddc-gamma" | "ddc_gamma" => Ok(TestMethod::DdcGamma),
            "wilks" => Ok(TestMethod::Wilks),
            "puri-sen" | "puri_sen" => Ok(TestMethod::PuriSen),
            other => Err(RpdcError::InvalidParameter(format!("unknown test method '{other}'"))),
        }
    }
}

/// Parameters a test ran with, echoed for reproducibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub significance: f64,
    pub k_projections: Option<usize>,
    pub permutations: Option<usize>,
    pub seed: Option<u64>,
}

/// Outcome of an independence test.
///
/// Exactly one of `p_value` and `threshold` drives `reject`: either
/// `p_value <= significance` or `statistic > threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: Option<f64>,
    pub reject: bool,
    /// Set when the data were too degenerate to calibrate; `reject` is then false.
    pub degenerate: bool,
    pub gamma: Option<GammaParams>,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TestResult {
    pub(crate) fn with_threshold(
        method: TestMethod,
        statistic: f64,
        threshold: f64,
        dims: (usize, usize, usize),
        config: ConfigEcho,
    ) -> Self {
        Self {
            method,
            statistic,
            p_value: None,
            threshold: Some(threshold),
            reject: statistic > threshold,
            degenerate: false,
            gamma: None,
            n: dims.0,
            p: dims.1,
            q: dims.2,
            config,
            note: None,
        }
    }

    pub(crate) fn degenerate(
        method: TestMethod,
        statistic: f64,
        dims: (usize, usize, usize),
        config: ConfigEcho,
        why: String,
    ) -> Self {
        Self {
            method,
            statistic,
            p_value: None,
            threshold: None,
            reject: false,
            degenerate: true,
            gamma: None,
            n: dims.0,
            p: dims.1,
            q: dims.2,
            config,
            note: Some(why),
        }
    }
}

/// Permutation test on the averaged projected estimator.
///
/// Each replicate row-permutes `Y` and draws fresh projections, both seeded
/// from `(seed, replicate index)`. The p-value is the right-tail
/// `(1 + #{V_l >= observed}) / (1 + L)`; reject iff `p <= α_s`.
/// Replicates run in parallel and are counted in index order.
pub fn permutation_test(x: &DataMatrix, y: &DataMatrix, cfg: &RpdcConfig) -> Result<TestResult> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    cfg.validate()?;
    if cfg.permutations == 0 {
        return Err(RpdcError::InvalidParameter("permutations must be >= 1".into()));
    }
    let observed = averaged_value(x, y, cfg.k_projections, cfg.seed)?;
    let replicates: Vec<f64> = (0..cfg.permutations)
        .into_par_iter()
        .map(|l| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut cfg.seed.derive(TAG_PERMUTATION, l as u64).rng());
            let yp = y.permute_rows(&perm);
            averaged_value(x, &yp, cfg.k_projections, cfg.seed.derive(TAG_REPLICATE, l as u64))
        })
        .collect::<Result<_>>()?;
    let exceed = replicates.iter().filter(|&&v| v >= observed).count();
    let p_value = (1 + exceed) as f64 / (1 + cfg.permutations) as f64;
    Ok(TestResult {
        method: TestMethod::RpdcPermutation,
        statistic: observed,
        p_value: Some(p_value),
        threshold: None,
        reject: p_value <= cfg.significance,
        degenerate: false,
        gamma: None,
        n,
        p: x.ncols(),
        q: y.ncols(),
        config: ConfigEcho {
            significance: cfg.significance,
            k_projections: Some(cfg.k_projections),
            permutations: Some(cfg.permutations),
            seed: Some(cfg.seed.master),
        },
        note: None,
    })
}

/// Gamma-approximation test: reject iff `n Ω̄ + S̄₂S̄₃` exceeds the
/// `1 - α_s` quantile of the moment-matched Gamma law.
pub fn gamma_test(x: &DataMatrix, y: &DataMatrix, cfg: &RpdcConfig) -> Result<TestResult> {
    let avg = projection_averages(x, y, cfg)?;
    let dims = (avg.n, x.ncols(), y.ncols());
    let echo = ConfigEcho {
        significance: cfg.significance,
        k_projections: Some(cfg.k_projections),
        permutations: None,
        seed: Some(cfg.seed.master),
    };
    let stat = avg.statistic();
    match gamma_params_from_projections(&avg) {
        Ok(params) => {
            let threshold = gamma_quantile(params, 1.0 - cfg.significance)?;
            let mut res = TestResult::with_threshold(TestMethod::RpdcGamma, stat, threshold, dims, echo);
            res.gamma = Some(params);
            Ok(res)
        }
        Err(RpdcError::Degenerate(why)) => Ok(TestResult::degenerate(TestMethod::RpdcGamma, stat, dims, echo, why)),
        Err(e) => Err(e),
    }
}

const QUANTILE_MAX_ITER: usize = 200;

/// Quantile of `Gamma(shape, rate)`: the `q` with `P(shape, rate q) = prob`.
///
/// Solved on the unit-rate scale in `t = ln x`: a positive bracket is found by
/// doubling and halving, then Newton steps run inside it, falling back to
/// bisection whenever Newton leaves the bracket. The root is divided by the rate.
pub fn gamma_quantile(params: GammaParams, prob: f64) -> Result<f64> {
    let GammaParams { shape, rate } = GammaParams::new(params.shape, params.rate)?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(RpdcError::InvalidParameter(format!("probability must lie in (0,1), got {prob}")));
    }
    let cdf = |x: f64| gamma_lr(shape, x);
    let log_norm = ln_gamma(shape);

    let mut hi = shape.max(1.0);
    let mut lo = hi;
    for _ in 0..2100 {
        if cdf(hi) >= prob {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..2100 {
        if cdf(lo) <= prob {
            break;
        }
        lo *= 0.5;
    }
    if !(cdf(hi) >= prob && cdf(lo) <= prob && lo > 0.0) {
        return Err(RpdcError::Numeric("could not bracket Gamma quantile".into()));
    }

    let (mut tlo, mut thi) = (lo.ln(), hi.ln());
    let mut t = 0.5 * (tlo + thi);
    let mut converged = false;
    for _ in 0..QUANTILE_MAX_ITER {
        let x = t.exp();
        let f = cdf(x) - prob;
        if f == 0.0 {
            converged = true;
            break;
        }
        if f < 0.0 {
            tlo = t;
        } else {
            thi = t;
        }
        // dF/dt = x f(x) = exp(shape t - x - ln Γ(shape)).
        let slope = (shape * t - x - log_norm).exp();
        let newton = if slope > 0.0 && slope.is_finite() { t - f / slope } else { f64::NAN };
        let next = if newton > tlo && newton < thi { newton } else { 0.5 * (tlo + thi) };
        let step = (next - t).abs();
        t = next;
        if thi - tlo <= 4.0 * f64::EPSILON * thi.abs().max(1.0) || step <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    // For very large shapes the incomplete gamma itself is only good to about
    // 1e-10, so the residual check is a sanity bound, not the stopping rule.
    let x = t.exp();
    let residual = (cdf(x) - prob).abs();
    if converged && residual <= 1e-8 {
        Ok(x / rate)
    } else {
        Err(RpdcError::Numeric(format!("Gamma quantile did not converge (residual {residual:e})")))
    }
}
