//! Monte Carlo rejection-rate grids.
//!
//! Every `(cell, replicate)` job is independent. The dataset of replicate `r`
//! is seeded from `(master, r, data law)` only, so all methods in a grid that
//! share a data law see identical datasets. Results are gathered by index, so
//! the report does not depend on scheduling.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{ddc_gamma_test, puri_sen_test, wilks_lambda_test};
use crate::data::PairedSample;
use crate::error::{Result, RpdcError};
use crate::harness::generators::{generate_example, ExampleId, ExampleParams, ExampleSpec};
use crate::rng::RngSeed;
use crate::rpdc::{gamma_test, permutation_test, RpdcConfig, TestMethod, TestResult};

pub const SCHEMA_VERSION: u32 = 1;

const TAG_DATA: u64 = 0x10;
const TAG_TEST: u64 = 0x11;

/// One grid cell: a test applied to one data law at one size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub method: TestMethod,
    pub example: ExampleId,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub params: ExampleParams,
}

impl CellSpec {
    pub fn new(method: TestMethod, example: ExampleId, n: usize, p: usize, q: usize) -> Self {
        Self { method, example, n, p, q, params: ExampleParams::default() }
    }

    pub fn params(mut self, params: ExampleParams) -> Self {
        self.params = params;
        self
    }

    fn data_key(&self) -> [u64; 7] {
        [
            self.example.number() as u64,
            self.n as u64,
            self.p as u64,
            self.q as u64,
            self.params.rho.to_bits(),
            self.params.sigma.to_bits(),
            self.params.t_fraction.to_bits(),
        ]
    }

    /// Data law of replicate `r` under `master`.
    pub fn example_spec(&self, master: RngSeed, replicate: usize) -> ExampleSpec {
        let seed = self
            .data_key()
            .iter()
            .fold(master.derive(TAG_DATA, replicate as u64), |s, &k| s.derive(TAG_DATA, k));
        ExampleSpec { id: self.example, n: self.n, p: self.p, q: self.q, params: self.params, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub cells: Vec<CellSpec>,
    /// Replicates per cell, `N`.
    pub replicates: usize,
    pub master_seed: u64,
    pub k_projections: usize,
    pub permutations: usize,
    pub significance: f64,
}

impl SimulationConfig {
    /// Desk-scale defaults: `N = 100`, `K = 50`, `L = 200`, `α_s = 0.05`.
    pub fn new(cells: Vec<CellSpec>) -> Self {
        Self { cells, replicates: 100, master_seed: 0, k_projections: 50, permutations: 200, significance: 0.05 }
    }

    pub fn replicates(mut self, n: usize) -> Self {
        self.replicates = n;
        self
    }

    pub fn seed(mut self, master: u64) -> Self {
        self.master_seed = master;
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k_projections = k;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    #[serde(flatten)]
    pub cell: CellSpec,
    pub replicates: usize,
    pub rejections: usize,
    /// `rejections / (replicates - failures)`; degenerate replicates count as non-rejections.
    pub rejection_rate: f64,
    pub degenerate: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failure_messages: Vec<String>,
    /// Summed wall time of this cell's jobs.
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub master_seed: u64,
    pub replicates: usize,
    pub k_projections: usize,
    pub permutations: usize,
    pub significance: f64,
    pub cells: Vec<CellReport>,
}

impl SimulationReport {
    /// Plot-ready CSV, one line per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,example,n,p,q,rho,sigma,t_fraction,replicates,rejections,rejection_rate,degenerate,failures,wall_time_seconds\n",
        );
        for c in &self.cells {
            let s = &c.cell;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.method.name(),
                s.example.number(),
                s.n,
                s.p,
                s.q,
                s.params.rho,
                s.params.sigma,
                s.params.t_fraction,
                c.replicates,
                c.rejections,
                c.rejection_rate,
                c.degenerate,
                c.failures,
                c.wall_time_seconds
            ));
        }
        out
    }
}

/// Runs one test on one dataset.
pub fn run_test(method: TestMethod, data: &PairedSample, cfg: &RpdcConfig) -> Result<TestResult> {
    match method {
        TestMethod::RpdcGamma => gamma_test(&data.x, &data.y, cfg),
        TestMethod::RpdcPermutation => permutation_test(&data.x, &data.y, cfg),
        TestMethod::DdcGamma => ddc_gamma_test(&data.x, &data.y, cfg.significance),
        TestMethod::Wilks => wilks_lambda_test(&data.x, &data.y, cfg.significance),
        TestMethod::PuriSen => puri_sen_test(&data.x, &data.y, cfg.significance),
    }
}

enum Outcome {
    Reject,
    Accept,
    Degenerate,
    Failed(String),
}

/// Runs every cell for `replicates` datasets and tallies rejections.
///
/// A failing replicate is recorded and excluded from the rate; the run goes on.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationReport> {
    if cfg.cells.is_empty() {
        return Err(RpdcError::InvalidParameter("simulation grid is empty".into()));
    }
    if cfg.replicates == 0 {
        return Err(RpdcError::InvalidParameter("replicates must be >= 1".into()));
    }
    let master = RngSeed::new(cfg.master_seed);
    let base = RpdcConfig {
        k_projections: cfg.k_projections,
        seed: master,
        significance: cfg.significance,
        permutations: cfg.permutations,
    };
    base.validate()?;
    for c in &cfg.cells {
        c.example_spec(master, 0).validate()?;
    }

    let jobs: Vec<(usize, usize)> =
        (0..cfg.cells.len()).flat_map(|c| (0..cfg.replicates).map(move |r| (c, r))).collect();
    let results: Vec<(Outcome, f64)> = jobs
        .par_iter()
        .map(|&(c, r)| {
            let cell = &cfg.cells[c];
            let start = Instant::now();
            let test_cfg = RpdcConfig { seed: master.derive(TAG_TEST, r as u64), ..base };
            let outcome = match generate_example(&cell.example_spec(master, r))
                .and_then(|d| run_test(cell.method, &d, &test_cfg))
            {
                Ok(t) if t.degenerate => Outcome::Degenerate,
                Ok(t) if t.reject => Outcome::Reject,
                Ok(_) => Outcome::Accept,
                Err(e) => Outcome::Failed(e.to_string()),
            };
            (outcome, start.elapsed().as_secs_f64())
        })
        .collect();

    let cells = cfg
        .cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let chunk = &results[c * cfg.replicates..(c + 1) * cfg.replicates];
            let mut rep = CellReport {
                cell: *cell,
                replicates: cfg.replicates,
                rejections: 0,
                rejection_rate: 0.0,
                degenerate: 0,
                failures: 0,
                failure_messages: Vec::new(),
                wall_time_seconds: chunk.iter().map(|(_, t)| t).sum(),
            };
            for (o, _) in chunk {
                match o {
                    Outcome::Reject => rep.rejections += 1,
                    Outcome::Accept => {}
                    Outcome::Degenerate => rep.degenerate += 1,
                    Outcome::Failed(m) => {
                        rep.failures += 1;
                        if !rep.failure_messages.contains(m) {
                            rep.failure_messages.push(m.clone());
                        }
                    }
                }
            }
            let valid = cfg.replicates - rep.failures;
            rep.rejection_rate = if valid == 0 { 0.0 } else { rep.rejections as f64 / valid as f64 };
            rep
        })
        .collect();

    Ok(SimulationReport {
        schema_version: SCHEMA_VERSION,
        master_seed: cfg.master_seed,
        replicates: cfg.replicates,
        k_projections: cfg.k_projections,
        permutations: cfg.permutations,
        significance: cfg.significance,
        cells,
    })
}
