use proptest::prelude::*;
use rpdcov::io::{parse_csv, write_csv_to};
use rpdcov::{
    cp_constant, dcov_unbiased_bruteforce, dcov_unbiased_fast, gamma_quantile, rpdc_estimate, DataMatrix, GammaParams,
    RngSeed, RpdcConfig,
};

// Materialized-matrix definition, independent of the library's code paths.
fn omega_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (x[i] - x[j]).abs()).collect()).collect();
    let b: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (y[i] - y[j]).abs()).collect()).collect();
    let ar: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let br: Vec<f64> = b.iter().map(|r| r.iter().sum()).collect();
    let (at, bt): (f64, f64) = (ar.iter().sum(), br.iter().sum());
    let mut cross = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                cross += a[i][j] * b[i][j];
            }
        }
    }
    let rows: f64 = ar.iter().zip(&br).map(|(p, q)| p * q).sum();
    let nf = n as f64;
    cross / (nf * (nf - 3.0)) - 2.0 * rows / (nf * (nf - 2.0) * (nf - 3.0)) + at * bt / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0))
}

fn sample(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| {
        let v = prop_oneof![(-1e3..1e3f64), (-3i32..3).prop_map(f64::from)];
        (prop::collection::vec(v.clone(), n), prop::collection::vec(v, n))
    })
}

#[test]
fn fast_matches_oracle_on_a_thousand_pairs() {
    let mut rng = RngSeed::new(2024).rng();
    use rand::Rng;
    for case in 0..1000 {
        let n = rng.random_range(4..=200);
        let ties = case % 3 == 0;
        let gen = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v: f64 = rng.random_range(-10.0..10.0);
            if ties { v.round() } else { v }
        };
        let x: Vec<f64> = (0..n).map(|_| gen(&mut rng)).collect();
        let y: Vec<f64> = (0..n).map(|_| gen(&mut rng)).collect();
        let fast = dcov_unbiased_fast(&x, &y).unwrap().value;
        let oracle = omega_oracle(&x, &y);
        assert!((fast - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "case {case}: {fast} vs {oracle}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip_is_exact(rows in 1usize..12, cols in 1usize..5, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = RngSeed::new(seed).rng();
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| {
                let m: f64 = rng.random_range(-1.0..1.0);
                m * 10f64.powi(rng.random_range(-300..300))
            })
            .collect();
        let m = DataMatrix::from_row_major(rows, cols, data).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&m, &mut buf).unwrap();
        prop_assert_eq!(parse_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn fast_equals_bruteforce((x, y) in sample(4..60)) {
        let fast = dcov_unbiased_fast(&x, &y).unwrap().value;
        let brute = dcov_unbiased_bruteforce(&DataMatrix::from_column(&x).unwrap(), &DataMatrix::from_column(&y).unwrap()).unwrap().value;
        let scale = omega_oracle(&x, &x).abs().sqrt() * omega_oracle(&y, &y).abs().sqrt();
        prop_assert!((fast - brute).abs() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn symmetric_in_its_arguments((x, y) in sample(4..40)) {
        let a = dcov_unbiased_fast(&x, &y).unwrap().value;
        let b = dcov_unbiased_fast(&y, &x).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn gamma_quantile_inverts_cdf(shape in 0.05f64..500.0, rate in 0.01f64..100.0, p in 0.001f64..0.999) {
        let g = GammaParams::new(shape, rate).unwrap();
        let q = gamma_quantile(g, p).unwrap();
        prop_assert!(q > 0.0);
        prop_assert!((g.cdf(q) - p).abs() <= 1e-8);
    }

    #[test]
    fn projected_estimate_is_seed_deterministic(seed in any::<u64>(), k in 1usize..8) {
        let mut rng = RngSeed::new(seed).rng();
        use rand::Rng;
        let x = DataMatrix::from_row_major(12, 2, (0..24).map(|_| rng.random::<f64>()).collect()).unwrap();
        let y = DataMatrix::from_row_major(12, 3, (0..36).map(|_| rng.random::<f64>()).collect()).unwrap();
        let cfg = RpdcConfig::default().with_k(k).with_seed(seed);
        prop_assert_eq!(rpdc_estimate(&x, &y, &cfg).unwrap(), rpdc_estimate(&x, &y, &cfg).unwrap());
    }

    #[test]
    fn sphere_constant_recurrence(d in 1usize..400) {
        let lhs = cp_constant(d + 2).unwrap();
        let rhs = cp_constant(d).unwrap() * (d as f64 + 1.0) / d as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs);
    }
}
