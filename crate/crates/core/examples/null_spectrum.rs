// Eigenvalues of the double-centered distance kernel and the null law they
// induce: the Gamma approximation against a simulated weighted chi-square.
//
// cargo run --release --example null_spectrum

use rpdcov::harness::{generate_example, ExampleId, ExampleSpec};
use rpdcov::spectrum::{empirical_quantile, product_gamma_approximation, simulate_weighted_chisq};
use rpdcov::{centered_kernel_matrix, empirical_spectrum, gamma_quantile, tensor_spectrum, Result, RngSeed};

pub fn run_example() -> Result<()> {
    let data = generate_example(&ExampleSpec::new(ExampleId::Ex5, 200).dims(3, 3).seed(RngSeed::new(2)))?;
    let sx = empirical_spectrum(&centered_kernel_matrix(&data.x)?)?;
    let sy = empirical_spectrum(&centered_kernel_matrix(&data.y)?)?;
    println!("top X eigenvalues: {:.4?}", &sx.eigenvalues()[..5]);
    println!("sum {:.4}, sum of squares {:.5}", sx.sum(), sx.sum_of_squares());

    let gamma = product_gamma_approximation(&sx, &sy)?;
    let top = tensor_spectrum(&sx, &sy, 1000)?;
    let tail = sx.sum() * sy.sum() - top.sum();
    let draws = simulate_weighted_chisq(top.eigenvalues(), tail, 20_000, RngSeed::new(9));
    for p in [0.9, 0.95, 0.99] {
        println!(
            "quantile {p}: Gamma {:.4}, simulated {:.4}",
            gamma_quantile(gamma, p)?,
            empirical_quantile(&draws, p)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
