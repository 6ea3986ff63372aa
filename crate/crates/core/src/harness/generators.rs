//! The seven synthetic data laws used in the simulation studies.
//!
//! | id  | X                | Y                                                      |
//! |-----|------------------|--------------------------------------------------------|
//! | ex1 | Unif(0,1)^p      | Z² with Z ~ Unif(0,1)^q, independent of X              |
//! | ex2 | Unif(0,1)^p      | Y1 = X1², Y2 = X2², rest Z²                            |
//! | ex3 | Unif(0,1)^p      | as ex1, meant for large and unequal p, q               |
//! | ex4 | Unif(0,1)^p      | Y_i = X_i² for i <= 5, rest Z²                         |
//! | ex5 | N(0, I_p)        | N(0, I_q), Cor(X_i, Y_i) = ρ for i <= min(p,q)         |
//! | ex6 | N(0, I_p)        | Y_i = log(X_i²) + σ ε_i                                |
//! | ex7 | N(0, I_p)        | ex6 law after row T = t_fraction·n, log(Z_i²) + ε before |

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{DataMatrix, PairedSample};
use crate::error::{Result, RpdcError};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
    Ex7,
}

impl ExampleId {
    pub fn from_number(k: u32) -> Result<Self> {
        Ok(match k {
            1 => ExampleId::Ex1,
            2 => ExampleId::Ex2,
            3 => ExampleId::Ex3,
            4 => ExampleId::Ex4,
            5 => ExampleId::Ex5,
            6 => ExampleId::Ex6,
            7 => ExampleId::Ex7,
            _ => return Err(RpdcError::InvalidParameter(format!("example must be 1..7, got {k}"))),
        })
    }

    pub fn number(self) -> u32 {
        self as u32 + 1
    }
}

/// Law-specific parameters; only the ones the chosen example reads matter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    /// Cross correlation for ex5.
    pub rho: f64,
    /// Noise standard deviation for ex6 and ex7.
    pub sigma: f64,
    /// Fraction of leading independent rows for ex7.
    pub t_fraction: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self { rho: 0.0, sigma: 1.0, t_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub id: ExampleId,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub params: ExampleParams,
    pub seed: RngSeed,
}

impl ExampleSpec {
    /// `p = q = 10` and default parameters.
    pub fn new(id: ExampleId, n: usize) -> Self {
        Self { id, n, p: 10, q: 10, params: ExampleParams::default(), seed: RngSeed::new(0) }
    }

    pub fn dims(mut self, p: usize, q: usize) -> Self {
        self.p = p;
        self.q = q;
        self
    }

    pub fn rho(mut self, rho: f64) -> Self {
        self.params.rho = rho;
        self
    }

    pub fn sigma(mut self, sigma: f64) -> Self {
        self.params.sigma = sigma;
        self
    }

    pub fn t_fraction(mut self, t: f64) -> Self {
        self.params.t_fraction = t;
        self
    }

    pub fn seed(mut self, seed: RngSeed) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RpdcError::InvalidParameter(m));
        if self.n == 0 || self.p == 0 || self.q == 0 {
            return bad(format!("n, p, q must be positive (got {}, {}, {})", self.n, self.p, self.q));
        }
        match self.id {
            ExampleId::Ex2 if self.p < 2 || self.q < 2 => bad("ex2 needs p, q >= 2".into()),
            ExampleId::Ex4 if self.p < 5 || self.q < 5 => bad("ex4 needs p, q >= 5".into()),
            ExampleId::Ex5 if !(-1.0..=1.0).contains(&self.params.rho) => bad("ex5 needs rho in [-1, 1]".into()),
            ExampleId::Ex6 | ExampleId::Ex7 if self.q > self.p => bad("ex6/ex7 need q <= p".into()),
            ExampleId::Ex6 | ExampleId::Ex7 if !(self.params.sigma >= 0.0 && self.params.sigma.is_finite()) => {
                bad("sigma must be finite and >= 0".into())
            }
            ExampleId::Ex7 if !(self.params.t_fraction > 0.0 && self.params.t_fraction < 1.0) => {
                bad("ex7 needs t_fraction in (0, 1)".into())
            }
            _ => Ok(()),
        }
    }

    /// Index of the first dependent row for ex7.
    pub fn change_point(&self) -> usize {
        (self.params.t_fraction * self.n as f64).round() as usize
    }
}

/// Draws one paired sample. Deterministic in `spec`.
pub fn generate_example(spec: &ExampleSpec) -> Result<PairedSample> {
    spec.validate()?;
    let ExampleSpec { id, n, p, q, params, seed } = *spec;
    let mut rng = seed.rng();
    let mut x = vec![0.0; n * p];
    let mut y = vec![0.0; n * q];

    match id {
        ExampleId::Ex1 | ExampleId::Ex2 | ExampleId::Ex3 | ExampleId::Ex4 => {
            x.iter_mut().for_each(|v| *v = rng.random::<f64>());
            y.iter_mut().for_each(|v| {
                let z = rng.random::<f64>();
                *v = z * z
            });
            let linked = match id {
                ExampleId::Ex2 => 2,
                ExampleId::Ex4 => 5,
                _ => 0,
            };
            for i in 0..n {
                for j in 0..linked {
                    let xv = x[i * p + j];
                    y[i * q + j] = xv * xv;
                }
            }
        }
        ExampleId::Ex5 => {
            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let c = (1.0 - params.rho * params.rho).sqrt();
            for i in 0..n {
                for j in 0..q {
                    let z: f64 = rng.sample(StandardNormal);
                    y[i * q + j] = if j < p { params.rho * x[i * p + j] + c * z } else { z };
                }
            }
        }
        ExampleId::Ex6 | ExampleId::Ex7 => {
            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let t = if id == ExampleId::Ex7 { spec.change_point() } else { 0 };
            for i in 0..n {
                for j in 0..q {
                    let base: f64 = if i < t { rng.sample(StandardNormal) } else { x[i * p + j] };
                    let eps: f64 = rng.sample(StandardNormal);
                    y[i * q + j] = (base * base).ln() + params.sigma * eps;
                }
            }
        }
    }
    PairedSample::new(DataMatrix::from_row_major(n, p, x)?, DataMatrix::from_row_major(n, q, y)?)
}
