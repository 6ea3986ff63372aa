//! Random directions on the unit sphere and single-projection estimates.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use crate::data::{check_paired, DataMatrix};
use crate::dcov::{dcov_prepared, DcovEstimate, DcovMethod, UnivariateSample, MIN_SAMPLE_SIZE};
use crate::error::{Result, RpdcError};
use crate::rng::RngSeed;

/// A unit vector in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `components`. Fails on an empty or zero vector.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(RpdcError::InvalidParameter("direction must have dimension >= 1".into()));
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(RpdcError::InvalidParameter("direction has zero or non-finite norm".into()));
        }
        Ok(Self(components.into_iter().map(|c| c / norm).collect()))
    }

    /// The `j`-th standard basis vector of `R^d`.
    pub fn basis(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(RpdcError::DimensionMismatch { expected: d, got: j + 1 });
        }
        let mut v = vec![0.0; d];
        v[j] = 1.0;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// `C_d = √π Γ((d+1)/2) / Γ(d/2)`, the constant for which
/// `C_d E|uᵀv| = 1` when `u` is uniform on the sphere and `|v| = 1`.
pub fn cp_constant(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(RpdcError::InvalidParameter("dimension must be >= 1".into()));
    }
    match d {
        1 => return Ok(1.0),
        2 => return Ok(std::f64::consts::FRAC_PI_2),
        _ => {}
    }
    let d = d as f64;
    Ok(std::f64::consts::PI.sqrt() * (ln_gamma((d + 1.0) / 2.0) - ln_gamma(d / 2.0)).exp())
}

/// Draws a direction from the given RNG: `d` standard normals, normalized.
pub(crate) fn draw_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Direction {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return Direction(v.into_iter().map(|c| c / norm).collect());
        }
    }
}

/// A uniform draw from the unit sphere `S^{d-1}`, deterministic in `seed`.
pub fn sample_unit_sphere(d: usize, seed: RngSeed) -> Result<Direction> {
    if d == 0 {
        return Err(RpdcError::InvalidParameter("dimension must be >= 1".into()));
    }
    Ok(draw_direction(d, &mut seed.rng()))
}

/// `out[i] = Σ_j u[j] X[i, j]`.
pub fn project(x: &DataMatrix, u: &Direction) -> Result<Vec<f64>> {
    if u.dim() != x.ncols() {
        return Err(RpdcError::DimensionMismatch { expected: x.ncols(), got: u.dim() });
    }
    Ok(project_unchecked(x, u.components()))
}

pub(crate) fn project_unchecked(x: &DataMatrix, u: &[f64]) -> Vec<f64> {
    x.rows_iter().map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum()).collect()
}

/// `C_p C_q Ω(uᵀX, vᵀY)` for one pair of directions.
pub fn projected_dcov(x: &DataMatrix, y: &DataMatrix, u: &Direction, v: &Direction) -> Result<DcovEstimate> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    let px = project(x, u)?;
    let py = project(y, v)?;
    let c = cp_constant(x.ncols())? * cp_constant(y.ncols())?;
    let value = c * dcov_prepared(&UnivariateSample::prepare(&px), &UnivariateSample::prepare(&py));
    Ok(DcovEstimate::exact(value, DcovMethod::ProjectedSingle, n))
}
