//! Experiment harness: synthetic data laws, Monte Carlo power/size grids, and
//! wall-clock benchmarks of the direct and projected estimators.

pub mod bench;
pub mod generators;
pub mod simulation;

pub use bench::{benchmark, break_even, BenchConfig, BenchMethod, BenchmarkRow, BreakEvenPoint};
pub use generators::{generate_example, ExampleId, ExampleParams, ExampleSpec};
pub use simulation::{run_simulation, run_test, CellReport, CellSpec, SimulationConfig, SimulationReport, SCHEMA_VERSION};
