// Monte Carlo checks on null behaviour and bias. Seeds are fixed, so each
// check is deterministic; bands are several standard errors wide.

use rand::Rng;
use rand_distr::StandardNormal;
use rpdcov::harness::{generate_example, run_simulation, CellSpec, ExampleId, ExampleSpec, SimulationConfig};
use rpdcov::rpdc::projection_averages;
use rpdcov::{
    dcov_unbiased_fast, gamma_params_from_projections, permutation_test, DataMatrix, RngSeed, RpdcConfig, TestMethod,
};

fn binomial_band(rate: f64, p: f64, n: usize, z: f64) -> bool {
    (rate - p).abs() <= z * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn permutation_test_size_at_five_percent() {
    let cell = CellSpec::new(TestMethod::RpdcPermutation, ExampleId::Ex5, 100, 5, 5);
    let cfg = SimulationConfig { permutations: 99, ..SimulationConfig::new(vec![cell]).replicates(500).k(10).seed(31) };
    let rate = run_simulation(&cfg).unwrap().cells[0].rejection_rate;
    assert!((rate - 0.05).abs() <= 0.03, "rate {rate}");
}

#[test]
fn identical_samples_are_always_rejected() {
    let mut rejected = 0;
    for r in 0..100 {
        let x = generate_example(&ExampleSpec::new(ExampleId::Ex5, 60).dims(3, 3).seed(RngSeed::new(r))).unwrap().x;
        let cfg = RpdcConfig::default().with_k(10).with_permutations(99).with_seed(r);
        if permutation_test(&x, &x, &cfg).unwrap().reject {
            rejected += 1;
        }
    }
    assert!(rejected >= 99, "{rejected}");
}

#[test]
fn permutation_p_values_are_valid() {
    // P(p <= a) <= a for the discrete permutation p-value, checked at a grid
    // of levels with a binomial allowance.
    let reps = 2000;
    let mut pv = Vec::with_capacity(reps);
    for r in 0..reps as u64 {
        let d = generate_example(&ExampleSpec::new(ExampleId::Ex1, 50).dims(2, 2).seed(RngSeed::new(10_000 + r))).unwrap();
        let cfg = RpdcConfig::default().with_k(3).with_permutations(99).with_seed(r);
        pv.push(permutation_test(&d.x, &d.y, &cfg).unwrap().p_value.unwrap());
    }
    for a in [0.01, 0.05, 0.1, 0.25, 0.5] {
        let frac = pv.iter().filter(|&&p| p <= a).count() as f64 / reps as f64;
        assert!(frac <= a + 3.0 * (a * (1.0 - a) / reps as f64).sqrt(), "level {a}: {frac}");
        assert!(binomial_band(frac, a, reps, 4.0), "level {a}: {frac}");
    }
}

#[test]
fn gamma_test_size_on_independent_uniforms() {
    let cell = CellSpec::new(TestMethod::RpdcGamma, ExampleId::Ex1, 100, 10, 10);
    let rate = run_simulation(&SimulationConfig::new(vec![cell]).replicates(400).seed(12)).unwrap().cells[0].rejection_rate;
    assert!((rate - 0.05).abs() <= 0.03, "rate {rate}");
}

#[test]
fn null_statistic_is_centred_on_gamma_mean() {
    let reps = 300;
    let mut ratio = 0.0;
    for r in 0..reps {
        let d = generate_example(&ExampleSpec::new(ExampleId::Ex5, 200).dims(4, 4).seed(RngSeed::new(500 + r))).unwrap();
        let avg = projection_averages(&d.x, &d.y, &RpdcConfig::default().with_k(20).with_seed(r)).unwrap();
        let g = gamma_params_from_projections(&avg).unwrap();
        ratio += avg.statistic() / g.mean();
    }
    let mean = ratio / reps as f64;
    assert!((mean - 1.0).abs() <= 0.05, "{mean}");
}

#[test]
fn small_sample_estimator_is_unbiased() {
    // Mean of Omega over many n = 20 samples against a large-sample value of
    // the same population quantity, for a dependent pair.
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| {
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x.iter().map(|v: &f64| v * v + 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
        (x, y)
    };
    let mut rng = RngSeed::new(77).rng();
    let (bx, by) = draw(&mut rng, 200_000);
    let truth = dcov_unbiased_fast(&bx, &by).unwrap().value;

    let reps = 2000;
    let vals: Vec<f64> = (0..reps)
        .map(|_| {
            let (x, y) = draw(&mut rng, 20);
            dcov_unbiased_fast(&x, &y).unwrap().value
        })
        .collect();
    let m = vals.iter().sum::<f64>() / reps as f64;
    let sd = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let se = (sd * sd / reps as f64 + 1e-6).sqrt();
    assert!((m - truth).abs() <= 4.0 * se, "mean {m}, large-sample {truth}, se {se}");
}

#[test]
fn classical_tests_hold_size_under_gaussian_null() {
    let cells = vec![
        CellSpec::new(TestMethod::Wilks, ExampleId::Ex5, 200, 3, 3),
        CellSpec::new(TestMethod::PuriSen, ExampleId::Ex5, 200, 3, 3),
        // The Gamma reference runs a little liberal in low dimension; p = q = 10
        // is the setting it is used at in the simulation studies.
        CellSpec::new(TestMethod::DdcGamma, ExampleId::Ex5, 200, 10, 10),
    ];
    let rep = run_simulation(&SimulationConfig::new(cells).replicates(400).seed(13)).unwrap();
    for c in &rep.cells {
        assert!((c.rejection_rate - 0.05).abs() <= 0.035, "{}: {}", c.cell.method.name(), c.rejection_rate);
    }
}

#[test]
fn estimate_concentrates_as_k_grows() {
    let d = generate_example(&ExampleSpec::new(ExampleId::Ex2, 150).dims(4, 4).seed(RngSeed::new(2))).unwrap();
    let spread = |k: usize| {
        let v: Vec<f64> = (0..60)
            .map(|s| rpdcov::rpdc_estimate(&d.x, &d.y, &RpdcConfig::default().with_k(k).with_seed(s)).unwrap().value)
            .collect();
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let (s10, s160) = (spread(10), spread(160));
    // sd ratio should be near sqrt(16) = 4
    assert!((2.5..=6.0).contains(&(s10 / s160)), "{s10} / {s160}");
}

#[test]
fn independent_estimate_shrinks_with_n() {
    let avg_abs = |n: usize| {
        (0..40u64)
            .map(|r| {
                let d = generate_example(&ExampleSpec::new(ExampleId::Ex1, n).dims(3, 3).seed(RngSeed::new(900 + r))).unwrap();
                rpdcov::rpdc_estimate(&d.x, &d.y, &RpdcConfig::default().with_k(20).with_seed(r)).unwrap().value.abs()
            })
            .sum::<f64>()
            / 40.0
    };
    let (small, large) = (avg_abs(100), avg_abs(1600));
    // |Omega| is O(1/n) under independence
    assert!(large < small / 4.0, "{small} vs {large}");
}

#[test]
fn degenerate_column_does_not_abort_simulation() {
    let x = DataMatrix::from_rows(&vec![vec![1.0]; 10]).unwrap();
    assert!(rpdcov::wilks_lambda_test(&x, &x, 0.05).is_err());
}
