// Reading samples from CSV, testing them, and writing them back losslessly.
//
// cargo run --release --example csv_io

use rpdcov::harness::{generate_example, ExampleId, ExampleSpec};
use rpdcov::io::{parse_csv, read_csv, write_csv};
use rpdcov::{gamma_test, Result, RngSeed, RpdcConfig};

pub fn run_example() -> Result<()> {
    let with_header = "height,weight\n1.70,65\n1.82,80\n1.65,59\n1.90,88\n1.75,70\n";
    let m = parse_csv(with_header.as_bytes())?;
    println!("parsed {} rows x {} columns, header skipped", m.nrows(), m.ncols());

    let dir = std::env::temp_dir().join(format!("rpdcov-csv-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let data = generate_example(&ExampleSpec::new(ExampleId::Ex2, 200).dims(3, 3).seed(RngSeed::new(6)))?;
    let (px, py) = (dir.join("x.csv"), dir.join("y.csv"));
    write_csv(&data.x, &px)?;
    write_csv(&data.y, &py)?;

    let (x, y) = (read_csv(&px)?, read_csv(&py)?);
    println!("round trip exact: {}", x == data.x && y == data.y);
    let res = gamma_test(&x, &y, &RpdcConfig::default())?;
    println!("reject independence: {} (statistic {:.4})", res.reject, res.statistic);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
