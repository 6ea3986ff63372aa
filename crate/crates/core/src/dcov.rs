//! Unbiased sample distance covariance.
//!
//! Three routes to the same quantity
//!
//! ```text
//! Ω = Σ_{i≠j} a_ij b_ij / (n(n-3))
//!   - 2 Σ_i a_i. b_i. / (n(n-2)(n-3))
//!   + a.. b.. / (n(n-1)(n-2)(n-3))
//! ```
//!
//! * [`dcov_unbiased_fast`]: univariate inputs, `O(n log n)` time, `O(n)` memory.
//! * [`dcov_unbiased_bruteforce`]: any dimension, `O(n²(p+q))` time, distances
//!   streamed so memory stays `O(n)`.
//! * [`h4_kernel`]: the symmetric four-point kernel; Ω is its average over
//!   all 4-subsets and coincides with it when `n = 4`.
//!
//! The estimate is signed. It is never clamped.

use serde::{Deserialize, Serialize};

use crate::data::{check_finite, check_paired, DataMatrix};
use crate::error::{Result, RpdcError};
use crate::rng::RngSeed;

/// Smallest sample size accepted by any estimator (the formula divides by `n - 3`).
pub const MIN_SAMPLE_SIZE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcovMethod {
    FastUnivariate,
    Bruteforce,
    ProjectedSingle,
    ProjectedAverage,
}

/// A distance covariance estimate together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcovEstimate {
    pub value: f64,
    pub method: DcovMethod,
    pub n: usize,
    pub k_projections: Option<usize>,
    pub seed: Option<u64>,
}

impl DcovEstimate {
    pub(crate) fn exact(value: f64, method: DcovMethod, n: usize) -> Self {
        Self { value, method, n, k_projections: None, seed: None }
    }

    pub(crate) fn projected(value: f64, method: DcovMethod, n: usize, k: usize, seed: RngSeed) -> Self {
        Self { value, method, n, k_projections: Some(k), seed: Some(seed.master) }
    }
}

/// Row sums `a_i. = Σ_l |x_i - x_l|` and their total `a..`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseSums {
    pub row_sums: Vec<f64>,
    pub total: f64,
}

/// A univariate sample prepared for the fast path: centered values, the
/// stable ascending sort order, and the pairwise distance sums.
///
/// Preparing once lets a projected series be paired with several partners
/// (as the Gamma test does) without re-sorting.
#[derive(Debug, Clone)]
pub struct UnivariateSample {
    centered: Vec<f64>,
    order: Vec<usize>,
    sums: PairwiseSums,
}

impl UnivariateSample {
    /// Validates and prepares `values`. Requires `n >= 2` and finite entries.
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(RpdcError::SampleSize { got: values.len(), min: 2 });
        }
        check_finite(values)?;
        Ok(Self::prepare(values))
    }

    /// Preparation without validation; callers guarantee finite input.
    pub(crate) fn prepare(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        // A constant sample has exactly zero distances; keep it that way.
        let constant = values.iter().all(|&v| v == values[0]);
        let centered: Vec<f64> = if constant { vec![0.0; n] } else { values.iter().map(|v| v - mean).collect() };

        // Stable sort: tied values keep input order.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| centered[i].total_cmp(&centered[j]));

        // a_i. = v (2r - n) + S - 2 P_r with r the 1-based rank and P_r the
        // prefix sum of sorted values up to and including rank r. Ties give
        // the same value whichever rank they occupy.
        let grand: f64 = order.iter().map(|&i| centered[i]).sum();
        let mut row_sums = vec![0.0; n];
        let mut prefix = 0.0;
        for (r0, &i) in order.iter().enumerate() {
            let v = centered[i];
            prefix += v;
            let rank = (r0 + 1) as f64;
            row_sums[i] = v * (2.0 * rank - n as f64) + grand - 2.0 * prefix;
        }
        let total = row_sums.iter().sum();
        Self { centered, order, sums: PairwiseSums { row_sums, total } }
    }

    pub fn len(&self) -> usize {
        self.centered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centered.is_empty()
    }

    pub fn pairwise_sums(&self) -> &PairwiseSums {
        &self.sums
    }

    /// `a.. = Σ_{k,l} |x_k - x_l|`.
    pub fn total(&self) -> f64 {
        self.sums.total
    }
}

/// Row sums and total of the absolute pairwise differences in `O(n log n)`.
///
/// Values are shifted by their mean, sorted stably, and accumulated with
/// left-to-right prefix sums, so the output does not depend on run or thread.
pub fn pairwise_sums_fast(x: &[f64]) -> Result<PairwiseSums> {
    Ok(UnivariateSample::new(x)?.sums)
}

/// `Σ_{i≠j} |x_i - x_j| |y_i - y_j|` for two prepared samples of equal length.
///
/// In x-sorted order each pair `i < j` contributes
/// `(x_j - x_i)(y_j - y_i) + 2 (x_j - x_i)(y_i - y_j)·[y_i > y_j]`.
/// The first part sums to `n Σxy - Σx Σy`; the second is a weighted inversion
/// count gathered while merge-sorting y.
fn cross_sum(x: &UnivariateSample, y: &UnivariateSample) -> f64 {
    let n = x.len();
    let xs: Vec<f64> = x.order.iter().map(|&i| x.centered[i]).collect();
    let ys: Vec<f64> = x.order.iter().map(|&i| y.centered[i]).collect();

    let sum_x: f64 = xs.iter().sum();
    let sum_y: f64 = ys.iter().sum();
    let sum_xy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let linear = n as f64 * sum_xy - sum_x * sum_y;

    let inversions = weighted_inversions(xs, ys);
    2.0 * (linear + 2.0 * inversions)
}

/// `Σ_{i<j, y_i > y_j} (x_j - x_i)(y_i - y_j)` where `i < j` is array order.
///
/// Bottom-up merge sort on y carrying x. When a right-run element `j` is
/// emitted, every left-run element still pending has `y_i > y_j` strictly
/// (left wins ties), and its contribution expands to
/// `x_j Σy_i - x_j y_j c - Σx_i y_i + y_j Σx_i` over that pending suffix.
fn weighted_inversions(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    let n = ys.len();
    let mut bx = vec![0.0; n];
    let mut by = vec![0.0; n];
    // Suffix sums of the current left run: y, x, x*y.
    let mut suf_y = vec![0.0; n + 1];
    let mut suf_x = vec![0.0; n + 1];
    let mut suf_xy = vec![0.0; n + 1];
    let mut acc = 0.0;

    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            if mid < hi {
                suf_y[mid] = 0.0;
                suf_x[mid] = 0.0;
                suf_xy[mid] = 0.0;
                for i in (lo..mid).rev() {
                    suf_y[i] = suf_y[i + 1] + ys[i];
                    suf_x[i] = suf_x[i + 1] + xs[i];
                    suf_xy[i] = suf_xy[i + 1] + xs[i] * ys[i];
                }
                let (mut i, mut j, mut k) = (lo, mid, lo);
                while i < mid && j < hi {
                    if ys[i] <= ys[j] {
                        bx[k] = xs[i];
                        by[k] = ys[i];
                        i += 1;
                    } else {
                        let (xj, yj) = (xs[j], ys[j]);
                        let cnt = (mid - i) as f64;
                        acc += xj * suf_y[i] - xj * yj * cnt - suf_xy[i] + yj * suf_x[i];
                        bx[k] = xj;
                        by[k] = yj;
                        j += 1;
                    }
                    k += 1;
                }
                bx[k..k + (mid - i)].copy_from_slice(&xs[i..mid]);
                by[k..k + (mid - i)].copy_from_slice(&ys[i..mid]);
                k += mid - i;
                bx[k..k + (hi - j)].copy_from_slice(&xs[j..hi]);
                by[k..k + (hi - j)].copy_from_slice(&ys[j..hi]);
            } else {
                bx[lo..hi].copy_from_slice(&xs[lo..hi]);
                by[lo..hi].copy_from_slice(&ys[lo..hi]);
            }
            lo = hi;
        }
        std::mem::swap(&mut xs, &mut bx);
        std::mem::swap(&mut ys, &mut by);
        width *= 2;
    }
    acc
}

/// Assembles Ω from its three sums.
fn omega_from_parts(n: usize, offdiag_ab: f64, a_dot: &[f64], b_dot: &[f64], a_tot: f64, b_tot: f64) -> f64 {
    let nf = n as f64;
    let row_term: f64 = a_dot.iter().zip(b_dot).map(|(a, b)| a * b).sum();
    offdiag_ab / (nf * (nf - 3.0)) - 2.0 * row_term / (nf * (nf - 2.0) * (nf - 3.0))
        + a_tot * b_tot / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0))
}

/// Ω for two prepared univariate samples. Panics in debug builds if lengths
/// differ or `n < 4`; public entry points validate first.
pub fn dcov_prepared(x: &UnivariateSample, y: &UnivariateSample) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    debug_assert!(x.len() >= MIN_SAMPLE_SIZE);
    let cross = cross_sum(x, y);
    omega_from_parts(x.len(), cross, &x.sums.row_sums, &y.sums.row_sums, x.sums.total, y.sums.total)
}

fn check_univariate_pair(x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(RpdcError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < MIN_SAMPLE_SIZE {
        return Err(RpdcError::SampleSize { got: x.len(), min: MIN_SAMPLE_SIZE });
    }
    check_finite(x)?;
    check_finite(y)?;
    Ok(x.len())
}

/// Unbiased distance covariance of two univariate samples in `O(n log n)`.
pub fn dcov_unbiased_fast(x: &[f64], y: &[f64]) -> Result<DcovEstimate> {
    let n = check_univariate_pair(x, y)?;
    let value = dcov_prepared(&UnivariateSample::prepare(x), &UnivariateSample::prepare(y));
    Ok(DcovEstimate::exact(value, DcovMethod::FastUnivariate, n))
}

#[inline]
pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    // Independent accumulators so the loop vectorizes.
    let mut acc = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(p, q)| (p - q) * (p - q)).sum();
    for (pa, pb) in ca.zip(cb) {
        for l in 0..8 {
            let d = pa[l] - pb[l];
            acc[l] += d * d;
        }
    }
    let s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    (s + tail).sqrt()
}

/// Pairwise-distance sums gathered in a single streamed pass over `i < j`.
#[derive(Debug, Clone)]
pub(crate) struct BruteSums {
    pub n: usize,
    pub a_dot: Vec<f64>,
    pub b_dot: Vec<f64>,
    pub a_tot: f64,
    pub b_tot: f64,
    /// `Σ_{i≠j} a_ij b_ij`
    pub ab: f64,
    /// `Σ_{i≠j} a_ij²`, only when requested.
    pub aa: f64,
    /// `Σ_{i≠j} b_ij²`, only when requested.
    pub bb: f64,
}

impl BruteSums {
    pub(crate) fn compute(x: &DataMatrix, y: &DataMatrix, with_squares: bool) -> Self {
        // Rows are visited in blocks of BLOCK so each streamed row j is reused
        // BLOCK times while it is in cache; wide data is otherwise memory bound.
        const BLOCK: usize = 16;
        let n = x.nrows();
        let mut a_dot = vec![0.0; n];
        let mut b_dot = vec![0.0; n];
        let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for lo in (0..n).step_by(BLOCK) {
            let hi = (lo + BLOCK).min(n);
            let mut part = [[0.0f64; 5]; BLOCK];
            for j in (lo + 1)..n {
                let (xj, yj) = (x.row(j), y.row(j));
                let (mut ra, mut rb) = (0.0, 0.0);
                for i in lo..hi.min(j) {
                    let a = euclidean(x.row(i), xj);
                    let b = euclidean(y.row(i), yj);
                    let acc = &mut part[i - lo];
                    acc[0] += a * b;
                    if with_squares {
                        acc[1] += a * a;
                        acc[2] += b * b;
                    }
                    acc[3] += a;
                    acc[4] += b;
                    ra += a;
                    rb += b;
                }
                a_dot[j] += ra;
                b_dot[j] += rb;
            }
            for (i, acc) in (lo..hi).zip(&part) {
                ab += acc[0];
                aa += acc[1];
                bb += acc[2];
                a_dot[i] += acc[3];
                b_dot[i] += acc[4];
            }
        }
        let a_tot = a_dot.iter().sum();
        let b_tot = b_dot.iter().sum();
        Self { n, a_dot, b_dot, a_tot, b_tot, ab: 2.0 * ab, aa: 2.0 * aa, bb: 2.0 * bb }
    }

    pub(crate) fn omega_xy(&self) -> f64 {
        omega_from_parts(self.n, self.ab, &self.a_dot, &self.b_dot, self.a_tot, self.b_tot)
    }

    pub(crate) fn omega_xx(&self) -> f64 {
        omega_from_parts(self.n, self.aa, &self.a_dot, &self.a_dot, self.a_tot, self.a_tot)
    }

    pub(crate) fn omega_yy(&self) -> f64 {
        omega_from_parts(self.n, self.bb, &self.b_dot, &self.b_dot, self.b_tot, self.b_tot)
    }
}

/// Unbiased distance covariance evaluated literally from Euclidean distances.
///
/// Serves as the oracle for the fast path and as the direct (DDC) estimator.
pub fn dcov_unbiased_bruteforce(x: &DataMatrix, y: &DataMatrix) -> Result<DcovEstimate> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    let value = BruteSums::compute(x, y, false).omega_xy();
    Ok(DcovEstimate::exact(value, DcovMethod::Bruteforce, n))
}

/// The symmetric four-point kernel
///
/// ```text
/// h4 = 1/4 Σ_{i≠j} a_ij b_ij - 1/4 Σ_i a_i. b_i. + 1/24 a.. b..
/// ```
///
/// `x[i]` and `y[i]` are the two halves of observation `i`.
pub fn h4_kernel(x: &[&[f64]], y: &[&[f64]]) -> Result<f64> {
    if x.len() != 4 || y.len() != 4 {
        return Err(RpdcError::InvalidParameter(format!(
            "h4 needs exactly four pairs, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    for (m, pts) in [x, y].iter().enumerate() {
        let d = pts[0].len();
        for p in pts.iter() {
            if p.len() != d {
                return Err(RpdcError::DimensionMismatch { expected: d, got: p.len() });
            }
            check_finite(p).map_err(|_| RpdcError::NonFinite { index: m })?;
        }
    }
    let mut a = [[0.0; 4]; 4];
    let mut b = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                a[i][j] = euclidean(x[i], x[j]);
                b[i][j] = euclidean(y[i], y[j]);
            }
        }
    }
    let mut pair = 0.0;
    let mut rows = 0.0;
    let (mut a_tot, mut b_tot) = (0.0, 0.0);
    for i in 0..4 {
        let (mut ra, mut rb) = (0.0, 0.0);
        for j in 0..4 {
            pair += a[i][j] * b[i][j];
            ra += a[i][j];
            rb += b[i][j];
        }
        rows += ra * rb;
        a_tot += ra;
        b_tot += rb;
    }
    Ok(pair / 4.0 - rows / 4.0 + a_tot * b_tot / 24.0)
}
