// Exact univariate distance covariance in O(n log n), checked against the
// O(n²) definition.
//
// cargo run --release --example fast_dcov

use std::time::Instant;

use rand::Rng;
use rpdcov::{dcov_unbiased_bruteforce, dcov_unbiased_fast, pairwise_sums_fast, DataMatrix, Result, RngSeed};

pub fn run_example() -> Result<()> {
    let v = [0.0, 1.0, 2.0, 3.0];
    println!("Omega((0,1,2,3), (0,1,2,3)) = {:.15}", dcov_unbiased_fast(&v, &v)?.value);

    let sums = pairwise_sums_fast(&[3.0, -1.0, 4.0, 1.0, 5.0])?;
    println!("row sums of |x_i - x_j|: {:?}, total {}", sums.row_sums, sums.total);

    let mut rng = RngSeed::new(7).rng();
    for &n in &[100usize, 1000, 3000] {
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = x.iter().map(|v| (6.0 * v).sin() + 0.3 * rng.random::<f64>()).collect();

        let t = Instant::now();
        let fast = dcov_unbiased_fast(&x, &y)?.value;
        let t_fast = t.elapsed();

        let t = Instant::now();
        let brute = dcov_unbiased_bruteforce(&DataMatrix::from_column(&x)?, &DataMatrix::from_column(&y)?)?.value;
        let t_brute = t.elapsed();

        println!("n = {n:>5}: fast {fast:.10} ({t_fast:.2?}), direct {brute:.10} ({t_brute:.2?})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
