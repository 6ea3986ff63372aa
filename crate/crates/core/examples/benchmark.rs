// Wall time of the direct and projected estimators, and the sample size at
// which the projected one starts to win.
//
// cargo run --release --example benchmark

use rpdcov::harness::{benchmark, break_even, BenchConfig};
use rpdcov::Result;

pub fn run_example() -> Result<()> {
    let mut cfg = BenchConfig::new(vec![250, 500, 1000], 5, 5);
    cfg.k_projections = 20;
    cfg.repeats = 3;
    for row in benchmark(&cfg)? {
        println!(
            "n = {:>5} {:?}: median {:.5} s (mean {:.5}, sd {:.5})",
            row.n,
            row.method,
            row.median_seconds.unwrap_or(f64::NAN),
            row.mean_seconds.unwrap_or(f64::NAN),
            row.sd_seconds.unwrap_or(f64::NAN)
        );
    }
    for b in break_even(&[4, 20], &[200, 400, 800], 20, 3, 0)? {
        match b.n0 {
            Some(n0) => println!("p + q = {}: break-even near n = {n0:.0}", b.dim_sum),
            None => println!("p + q = {}: no crossing in range", b.dim_sum),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
