// Independence test with a moment-matched Gamma null, no resampling.
//
// cargo run --release --example gamma_test

use rpdcov::harness::{generate_example, ExampleId, ExampleSpec};
use rpdcov::io::to_json_string;
use rpdcov::{gamma_test, Result, RngSeed, RpdcConfig};

pub fn run_example() -> Result<()> {
    let cfg = RpdcConfig::default().with_k(50).with_seed(11);
    for (label, rho) in [("independent", 0.0), ("correlated (rho = 0.3)", 0.3)] {
        let data = generate_example(&ExampleSpec::new(ExampleId::Ex5, 500).rho(rho).seed(RngSeed::new(3)))?;
        let res = gamma_test(&data.x, &data.y, &cfg)?;
        let g = res.gamma.expect("calibrated");
        println!(
            "{label}: statistic {:.4}, threshold {:.4}, Gamma(shape {:.2}, rate {:.3}), reject = {}",
            res.statistic,
            res.threshold.unwrap_or(f64::NAN),
            g.shape,
            g.rate,
            res.reject
        );
    }

    let data = generate_example(&ExampleSpec::new(ExampleId::Ex6, 300).seed(RngSeed::new(4)))?;
    println!("{}", to_json_string(&gamma_test(&data.x, &data.y, &cfg)?)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
