//! Reference tests: direct distance covariance with a Gamma reference law,
//! Wilks Lambda, and Puri–Sen (Wilks on Spearman rank correlations).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::{check_paired, DataMatrix};
use crate::dcov::{BruteSums, MIN_SAMPLE_SIZE};
use crate::error::{Result, RpdcError};
use crate::rpdc::{gamma_quantile, validate_alpha, ConfigEcho, GammaParams, TestMethod, TestResult};

/// Blocks above this condition number are treated as singular.
const MAX_CONDITION: f64 = 1e12;

fn echo(alpha: f64) -> ConfigEcho {
    ConfigEcho { significance: alpha, k_projections: None, permutations: None, seed: None }
}

/// Direct distance covariance test.
///
/// Statistic `n Ω + λ̂` with `λ̂ = a.. b.. / (n(n-1))²` estimating
/// `E|X-X'| E|Y-Y'|`; the reference Gamma law has mean `λ̂` and variance
/// `2 Ω(X,X) Ω(Y,Y)`. All three Ω values come from one streamed pass.
pub fn ddc_gamma_test(x: &DataMatrix, y: &DataMatrix, alpha: f64) -> Result<TestResult> {
    let n = check_paired(x, y, MIN_SAMPLE_SIZE)?;
    validate_alpha(alpha)?;
    let sums = BruteSums::compute(x, y, true);
    let pairs = (n * (n - 1)) as f64;
    let lambda_sum = sums.a_tot * sums.b_tot / (pairs * pairs);
    let lambda_sq = sums.omega_xx() * sums.omega_yy();
    let stat = n as f64 * sums.omega_xy() + lambda_sum;
    let dims = (n, x.ncols(), y.ncols());

    if !(lambda_sum > 0.0 && lambda_sq > 0.0 && lambda_sq.is_finite()) {
        let why = format!("zero or negative distance moments (sum {lambda_sum}, squared sum {lambda_sq})");
        return Ok(TestResult::degenerate(TestMethod::DdcGamma, stat, dims, echo(alpha), why));
    }
    let params = GammaParams::new(0.5 * lambda_sum * lambda_sum / lambda_sq, 0.5 * lambda_sum / lambda_sq)?;
    let threshold = gamma_quantile(params, 1.0 - alpha)?;
    let mut res = TestResult::with_threshold(TestMethod::DdcGamma, stat, threshold, dims, echo(alpha));
    res.gamma = Some(params);
    Ok(res)
}

/// Sample covariance blocks `S11` (p×p), `S22` (q×q), `S12` (p×q).
#[derive(Debug, Clone)]
pub struct CovBlocks {
    pub s11: DMatrix<f64>,
    pub s22: DMatrix<f64>,
    pub s12: DMatrix<f64>,
}

impl CovBlocks {
    /// Covariance blocks of the column-joined sample `(X, Y)`.
    pub fn from_samples(x: &DataMatrix, y: &DataMatrix) -> Result<Self> {
        let n = check_paired(x, y, 2)?;
        let (p, q) = (x.ncols(), y.ncols());
        let mut z = DMatrix::<f64>::zeros(n, p + q);
        for i in 0..n {
            for (j, v) in x.row(i).iter().chain(y.row(i)).enumerate() {
                z[(i, j)] = *v;
            }
        }
        for mut c in z.column_iter_mut() {
            let mean = c.mean();
            c.add_scalar_mut(-mean);
        }
        let s = z.tr_mul(&z) / (n as f64 - 1.0);
        Ok(Self {
            s11: s.view((0, 0), (p, p)).into_owned(),
            s22: s.view((p, p), (q, q)).into_owned(),
            s12: s.view((0, p), (p, q)).into_owned(),
        })
    }

    /// `det(I - S22⁻¹ S21 S11⁻¹ S12)`, as the eigenvalues `1 - ρ_i²` of
    /// `I - M Mᵀ` with `M = L22⁻¹ S21 L11⁻ᵀ`. Each factor lies in `[0, 1]`.
    fn log_lambda(&self) -> Result<f64> {
        let l11 = cholesky_checked(&self.s11, "S11")?;
        let l22 = cholesky_checked(&self.s22, "S22")?;
        let a = l22
            .solve_lower_triangular(&self.s12.transpose())
            .ok_or_else(|| RpdcError::Numeric("triangular solve failed".into()))?;
        let m = l11
            .solve_lower_triangular(&a.transpose())
            .ok_or_else(|| RpdcError::Numeric("triangular solve failed".into()))?
            .transpose();
        let g = &m * m.transpose();
        let rho2 = SymmetricEigen::new(g).eigenvalues;
        Ok(rho2.iter().map(|&r| (1.0 - r.clamp(0.0, 1.0)).max(f64::MIN_POSITIVE).ln()).sum())
    }
}

fn condition_number(m: &DMatrix<f64>) -> f64 {
    let ev = SymmetricEigen::new(m.clone()).eigenvalues;
    let max = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn cholesky_checked(m: &DMatrix<f64>, block: &'static str) -> Result<DMatrix<f64>> {
    let condition = condition_number(m);
    match m.clone().cholesky() {
        Some(c) if condition <= MAX_CONDITION => Ok(c.l()),
        _ => Err(RpdcError::SingularBlock { block, condition }),
    }
}

/// Bartlett-corrected statistic `-(n - (p+q+3)/2) log Λ` against `χ²(pq)`.
fn bartlett_test(method: TestMethod, blocks: &CovBlocks, n: usize, alpha: f64) -> Result<TestResult> {
    let (p, q) = (blocks.s11.nrows(), blocks.s22.nrows());
    let factor = n as f64 - (p + q + 3) as f64 / 2.0;
    let w = -factor * blocks.log_lambda()?;
    let chi2 = GammaParams::new((p * q) as f64 / 2.0, 0.5)?;
    let threshold = gamma_quantile(chi2, 1.0 - alpha)?;
    Ok(TestResult::with_threshold(method, w, threshold, (n, p, q), echo(alpha)))
}

fn check_bartlett_size(x: &DataMatrix, y: &DataMatrix) -> Result<usize> {
    let n = check_paired(x, y, 1)?;
    let need = x.ncols() + y.ncols() + 4;
    if n < need {
        return Err(RpdcError::SampleSize { got: n, min: need });
    }
    Ok(n)
}

/// Wilks Lambda likelihood-ratio test of zero cross-covariance.
pub fn wilks_lambda_test(x: &DataMatrix, y: &DataMatrix, alpha: f64) -> Result<TestResult> {
    let n = check_bartlett_size(x, y)?;
    validate_alpha(alpha)?;
    bartlett_test(TestMethod::Wilks, &CovBlocks::from_samples(x, y)?, n, alpha)
}

/// Ranks `1..=n` with tied values sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn rank_matrix(m: &DataMatrix, column_offset: usize) -> Result<DataMatrix> {
    let (n, d) = (m.nrows(), m.ncols());
    let mut out = vec![0.0; n * d];
    for j in 0..d {
        let col = m.column(j);
        if col.iter().all(|&v| v == col[0]) {
            return Err(RpdcError::RankDegenerate { column: column_offset + j });
        }
        for (i, r) in average_ranks(&col).into_iter().enumerate() {
            out[i * d + j] = r;
        }
    }
    DataMatrix::from_row_major(n, d, out)
}

/// Spearman rank-correlation blocks of `(X, Y)`.
pub fn spearman_blocks(x: &DataMatrix, y: &DataMatrix) -> Result<CovBlocks> {
    let rx = rank_matrix(x, 0)?;
    let ry = rank_matrix(y, x.ncols())?;
    let cov = CovBlocks::from_samples(&rx, &ry)?;
    let sd: Vec<f64> = cov.s11.diagonal().iter().chain(cov.s22.diagonal().iter()).map(|v| v.sqrt()).collect();
    let p = x.ncols();
    let s11 = DMatrix::from_fn(p, p, |i, j| cov.s11[(i, j)] / (sd[i] * sd[j]));
    let s22 = DMatrix::from_fn(y.ncols(), y.ncols(), |i, j| cov.s22[(i, j)] / (sd[p + i] * sd[p + j]));
    let s12 = DMatrix::from_fn(p, y.ncols(), |i, j| cov.s12[(i, j)] / (sd[i] * sd[p + j]));
    Ok(CovBlocks { s11, s22, s12 })
}

/// Puri–Sen test: the Wilks construction on Spearman rank correlations.
pub fn puri_sen_test(x: &DataMatrix, y: &DataMatrix, alpha: f64) -> Result<TestResult> {
    let n = check_bartlett_size(x, y)?;
    validate_alpha(alpha)?;
    bartlett_test(TestMethod::PuriSen, &spearman_blocks(x, y)?, n, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal(n: usize, d: usize, seed: u64) -> DataMatrix {
        let mut rng = RngSeed::new(seed).rng();
        DataMatrix::from_row_major(n, d, (0..n * d).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(average_ranks(&[5.0, 1.0, 5.0, 0.0]), vec![3.5, 2.0, 3.5, 1.0]);
        assert_eq!(average_ranks(&[2.0; 3]), vec![2.0; 3]);
    }

    #[test]
    fn wilks_detects_correlated_normals() {
        let x = normal(500, 1, 1);
        let z = normal(500, 1, 2);
        let y = DataMatrix::from_column(
            &x.column(0).iter().zip(z.column(0)).map(|(a, b)| 0.5 * a + 0.75f64.sqrt() * b).collect::<Vec<_>>(),
        )
        .unwrap();
        let res = wilks_lambda_test(&x, &y, 0.05).unwrap();
        assert!(res.reject && res.statistic >= 0.0);
    }

    #[test]
    fn wilks_statistic_nonnegative_and_finite_for_identical_samples() {
        let x = normal(60, 3, 3);
        let res = wilks_lambda_test(&x, &x, 0.05).unwrap();
        assert!(res.statistic.is_finite() && res.reject);
        let y = normal(60, 2, 4);
        assert!(wilks_lambda_test(&x, &y, 0.05).unwrap().statistic >= 0.0);
    }

    #[test]
    fn wilks_errors() {
        let x = normal(8, 3, 5);
        let y = normal(8, 3, 6);
        assert!(matches!(wilks_lambda_test(&x, &y, 0.05), Err(RpdcError::SampleSize { .. })));

        let mut rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        rows[0][1] = 0.0;
        rows[0][0] = 0.0;
        let collinear = DataMatrix::from_rows(&rows).unwrap();
        let y = normal(40, 2, 7);
        let err = wilks_lambda_test(&collinear, &y, 0.05).unwrap_err();
        assert!(matches!(err, RpdcError::SingularBlock { block: "S11", .. }), "{err}");
    }

    #[test]
    fn puri_sen_invariant_under_monotone_maps() {
        let x = normal(80, 2, 8);
        let y = normal(80, 3, 9);
        let w = puri_sen_test(&x, &y, 0.05).unwrap().statistic;
        let xt = x.map(|v| v.exp()).unwrap();
        let yt = y.map(|v| v * v * v + 2.0 * v).unwrap();
        let wt = puri_sen_test(&xt, &yt, 0.05).unwrap().statistic;
        assert!((w - wt).abs() <= 1e-10 * w.abs().max(1.0));
    }

    #[test]
    fn puri_sen_constant_column() {
        let x = normal(30, 2, 10);
        let y = DataMatrix::from_rows(&(0..30).map(|i| vec![i as f64, 1.0]).collect::<Vec<_>>()).unwrap();
        assert!(matches!(puri_sen_test(&x, &y, 0.05), Err(RpdcError::RankDegenerate { column: 3 })));
    }

    #[test]
    fn ddc_detects_identity_and_flags_constant() {
        let x = normal(200, 2, 11);
        let res = ddc_gamma_test(&x, &x, 0.05).unwrap();
        assert!(res.reject && !res.degenerate);
        let g = res.gamma.unwrap();
        assert!(g.shape > 0.0 && g.rate > 0.0);

        let c = DataMatrix::from_rows(&vec![vec![1.0]; 200]).unwrap();
        let res = ddc_gamma_test(&c, &x, 0.05).unwrap();
        assert!(res.degenerate && !res.reject);
    }
}
