// A small rejection-rate grid over sample sizes and methods, printed as
// plot-ready CSV.
//
// cargo run --release --example power_simulation

use rpdcov::harness::{run_simulation, CellSpec, ExampleId, ExampleParams, SimulationConfig};
use rpdcov::{Result, TestMethod};

pub fn run_example() -> Result<()> {
    let params = ExampleParams { sigma: 1.0, ..Default::default() };
    let cells = [TestMethod::RpdcGamma, TestMethod::DdcGamma, TestMethod::Wilks]
        .into_iter()
        .flat_map(|m| [60, 120].map(|n| CellSpec::new(m, ExampleId::Ex6, n, 5, 5).params(params)))
        .collect();
    let cfg = SimulationConfig::new(cells).replicates(20).k(20).seed(42);
    let report = run_simulation(&cfg)?;
    print!("{}", report.to_csv());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
