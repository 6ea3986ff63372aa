// Multivariate distance covariance by averaging K random projections.
//
// The average converges to the exact estimate at rate 1/sqrt(K).
//
// cargo run --release --example projected_estimate

use rpdcov::harness::{generate_example, ExampleId, ExampleSpec};
use rpdcov::{dcov_unbiased_bruteforce, rpdc_estimate, Result, RngSeed, RpdcConfig};

pub fn run_example() -> Result<()> {
    // Y_i = log(X_i²) + noise in 5 dimensions.
    let data = generate_example(&ExampleSpec::new(ExampleId::Ex6, 400).dims(5, 5).seed(RngSeed::new(1)))?;
    let exact = dcov_unbiased_bruteforce(&data.x, &data.y)?.value;
    println!("direct estimate: {exact:.6}");

    for &k in &[10usize, 50, 200, 1000] {
        let reps = 20;
        let est: Vec<f64> = (0..reps)
            .map(|r| rpdc_estimate(&data.x, &data.y, &RpdcConfig::default().with_k(k).with_seed(r)).map(|e| e.value))
            .collect::<Result<_>>()?;
        let mean = est.iter().sum::<f64>() / reps as f64;
        let rmse = (est.iter().map(|e| (e - exact).powi(2)).sum::<f64>() / reps as f64).sqrt();
        println!("K = {k:>4}: mean {mean:.6}, RMSE {rmse:.6}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
