//! Empirical null spectra.
//!
//! Under independence `n Ω` behaves like `Σ λ_i (Z_i² - 1)` where the
//! weights are all products `λ^X_j λ^Y_j'` of the eigenvalues of the
//! double-centered distance kernels of X and Y. This module estimates those
//! eigenvalues from a sample, forms the product spectrum, and simulates the
//! weighted chi-square law so the Gamma approximation can be checked.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::DataMatrix;
use crate::dcov::euclidean;
use crate::error::{Result, RpdcError};
use crate::rng::RngSeed;
use crate::rpdc::GammaParams;

/// Relative floor below which negative eigenvalues count as rounding noise.
pub const NEGATIVE_EIGEN_FLOOR: f64 = 1e-8;

/// `K(i,j) = -|X_i - X_j| + m_i + m_j - m` with `m_i` the row means and `m`
/// the grand mean of the distance matrix.
#[derive(Debug, Clone)]
pub struct CenteredKernelMatrix {
    entries: DMatrix<f64>,
    source_dim: usize,
}

impl CenteredKernelMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// Wraps an externally built matrix after checking symmetry and double centering.
    pub fn from_matrix(entries: DMatrix<f64>, source_dim: usize) -> Result<Self> {
        let n = entries.nrows();
        if n < 2 || entries.ncols() != n {
            return Err(RpdcError::InvalidParameter("kernel matrix must be square with n >= 2".into()));
        }
        let scale = entries.amax().max(f64::MIN_POSITIVE);
        let tol = 1e-8 * n as f64 * scale;
        for i in 0..n {
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)]).abs() > 1e-12 * scale {
                    return Err(RpdcError::InvalidParameter("kernel matrix is not symmetric".into()));
                }
            }
            if entries.row(i).sum().abs() > tol {
                return Err(RpdcError::InvalidParameter("kernel matrix is not double centered".into()));
            }
        }
        Ok(Self { entries, source_dim })
    }
}

/// Double-centered Euclidean distance matrix of the rows of `x`.
pub fn centered_kernel_matrix(x: &DataMatrix) -> Result<CenteredKernelMatrix> {
    let n = x.nrows();
    if n < 2 {
        return Err(RpdcError::SampleSize { got: n, min: 2 });
    }
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = euclidean(x.row(i), x.row(j));
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let entries = DMatrix::from_fn(n, n, |i, j| -d[(i, j)] + row_means[i] + row_means[j] - grand);
    Ok(CenteredKernelMatrix { entries, source_dim: x.ncols() })
}

/// Eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` descending and clamps rounding-level negatives to zero.
    /// Negatives below `-1e-8 * max` are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RpdcError::Numeric("non-finite eigenvalue".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let max = values.first().copied().unwrap_or(0.0).max(0.0);
        let floor = NEGATIVE_EIGEN_FLOOR * max;
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -floor {
                    return Err(RpdcError::Numeric(format!("eigenvalue {v} is below the PSD floor -{floor}")));
                }
                *v = 0.0;
            }
        }
        Ok(Self { eigenvalues: values })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v * v).sum()
    }

    /// Gamma law with the mean `Σλ` and variance `2Σλ²` of `Σ λ_i Z_i²`.
    pub fn gamma_approximation(&self) -> Result<GammaParams> {
        GammaParams::from_moments(self.sum(), 2.0 * self.sum_of_squares())
    }
}

/// Eigenvalues of `K / n`, descending.
pub fn empirical_spectrum(k: &CenteredKernelMatrix) -> Result<Spectrum> {
    let n = k.n() as f64;
    let scaled = &k.entries / n;
    let eig = SymmetricEigen::try_new(scaled, f64::EPSILON, 100_000)
        .ok_or_else(|| RpdcError::Numeric("symmetric eigensolver did not converge".into()))?;
    Spectrum::new(eig.eigenvalues.iter().copied().collect())
}

#[derive(PartialEq)]
struct Cell {
    value: f64,
    i: usize,
    j: usize,
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `top_m` largest products `sx_j * sy_j'`, descending.
///
/// Walks the product lattice with a max-heap seeded by column 0 of each row,
/// so memory is `O(len(sx) + top_m)` rather than `len(sx) * len(sy)`.
pub fn tensor_spectrum(sx: &Spectrum, sy: &Spectrum, top_m: usize) -> Result<Spectrum> {
    if sx.is_empty() || sy.is_empty() {
        return Err(RpdcError::InvalidParameter("tensor spectrum needs non-empty inputs".into()));
    }
    if top_m == 0 {
        return Err(RpdcError::InvalidParameter("top_m must be >= 1".into()));
    }
    let (a, b) = (sx.eigenvalues(), sy.eigenvalues());
    let m = top_m.min(a.len() * b.len());
    let mut heap: BinaryHeap<Cell> = a.iter().take(m).enumerate().map(|(i, &v)| Cell { value: v * b[0], i, j: 0 }).collect();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let Some(Cell { value, i, j }) = heap.pop() else { break };
        out.push(value);
        if j + 1 < b.len() {
            heap.push(Cell { value: a[i] * b[j + 1], i, j: j + 1 });
        }
    }
    Ok(Spectrum { eigenvalues: out })
}

/// Null Gamma law of `Σ λ^X_j λ^Y_j' Z²` built from full marginal spectra:
/// `Σλ = Σλ^X Σλ^Y` and `Σλ² = Σ(λ^X)² Σ(λ^Y)²`.
pub fn product_gamma_approximation(sx: &Spectrum, sy: &Spectrum) -> Result<GammaParams> {
    GammaParams::from_moments(sx.sum() * sy.sum(), 2.0 * sx.sum_of_squares() * sy.sum_of_squares())
}

/// `draws` samples of `offset + Σ w_i Z_i²` with i.i.d. standard normal `Z_i`.
///
/// `offset` lets the caller stand in a small-weight tail by its mean.
pub fn simulate_weighted_chisq(weights: &[f64], offset: f64, draws: usize, seed: RngSeed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..draws)
        .map(|_| {
            offset
                + weights
                    .iter()
                    .map(|w| {
                        let z: f64 = rng.sample(StandardNormal);
                        w * z * z
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// Empirical quantile (type 7, linear interpolation between order statistics).
pub fn empirical_quantile(samples: &[f64], prob: f64) -> Result<f64> {
    if samples.is_empty() || !(0.0..=1.0).contains(&prob) {
        return Err(RpdcError::InvalidParameter("quantile needs samples and prob in [0,1]".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let h = (s.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(s.len() - 1);
    Ok(s[lo] + (h - lo as f64) * (s[hi] - s[lo]))
}
