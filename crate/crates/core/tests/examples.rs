// Every cargo example is compiled into this test and run once.

macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(fast_dcov, "fast_dcov.rs", fast_dcov_runs);
example!(projected_estimate, "projected_estimate.rs", projected_estimate_runs);
example!(gamma_test, "gamma_test.rs", gamma_test_runs);
example!(permutation_test, "permutation_test.rs", permutation_test_runs);
example!(baselines, "baselines.rs", baselines_run);
example!(null_spectrum, "null_spectrum.rs", null_spectrum_runs);
example!(power_simulation, "power_simulation.rs", power_simulation_runs);
example!(benchmark, "benchmark.rs", benchmark_runs);
example!(csv_io, "csv_io.rs", csv_io_runs);
