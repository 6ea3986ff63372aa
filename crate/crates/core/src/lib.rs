//! Randomly projected distance covariance.
//!
//! Multivariate distance covariance in `O(K n log n)`: project both samples
//! onto `K` random directions, compute the exact unbiased univariate
//! estimate for each projection with a sort-and-merge algorithm, rescale, and
//! average. Two independence tests are built on top of the estimator (a
//! permutation test and a moment-matched Gamma test), alongside the exact
//! `O(n²)` estimator, classical baselines, empirical null spectra, and a
//! simulation harness.
//!
//! ```
//! use rpdcov::{DataMatrix, RpdcConfig, rpdc_estimate};
//!
//! let x = DataMatrix::from_rows(&[
//!     vec![0.0, 1.0], vec![1.0, 0.5], vec![2.0, 0.1], vec![3.0, 2.0], vec![1.5, 1.5],
//! ]).unwrap();
//! let y = x.map(|v| v * v).unwrap();
//! let est = rpdc_estimate(&x, &y, &RpdcConfig::default()).unwrap();
//! assert!(est.value.is_finite());
//! ```

pub mod baselines;
pub mod data;
pub mod dcov;
pub mod error;
pub mod harness;
pub mod io;
pub mod projection;
pub mod rng;
pub mod rpdc;
pub mod spectrum;

pub use baselines::{ddc_gamma_test, puri_sen_test, wilks_lambda_test};
pub use data::{DataMatrix, PairedSample};
pub use dcov::{
    dcov_unbiased_bruteforce, dcov_unbiased_fast, h4_kernel, pairwise_sums_fast, DcovEstimate, DcovMethod,
    PairwiseSums, UnivariateSample,
};
pub use error::{Result, RpdcError};
pub use projection::{cp_constant, project, projected_dcov, sample_unit_sphere, Direction};
pub use rng::RngSeed;
pub use rpdc::{
    gamma_params_from_projections, gamma_quantile, gamma_test, permutation_test, rpdc_estimate, GammaParams,
    ProjectionAverages, RpdcConfig, TestMethod, TestResult,
};
pub use spectrum::{centered_kernel_matrix, empirical_spectrum, tensor_spectrum, CenteredKernelMatrix, Spectrum};
