use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rpdcov::harness::{benchmark, break_even, run_simulation, BenchConfig, CellSpec, ExampleId, ExampleParams, SimulationConfig};
use rpdcov::io::{read_csv, to_json_string, write_json};
use rpdcov::{dcov_unbiased_bruteforce, dcov_unbiased_fast, rpdc_estimate, RpdcConfig, RpdcError, Result, TestMethod};

#[derive(Parser)]
#[command(name = "rpdcov", version, about = "Distance covariance estimates and independence tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimateMethod {
    Fast,
    Brute,
    Rpdc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random projections.
    #[arg(long, default_value_t = 50)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    perms: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl Common {
    fn rpdc(&self) -> RpdcConfig {
        RpdcConfig::default()
            .with_k(self.k)
            .with_seed(self.seed)
            .with_permutations(self.perms)
            .with_significance(self.alpha)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate distance covariance of two samples.
    Dcov {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = EstimateMethod::Rpdc)]
        method: EstimateMethod,
        #[command(flatten)]
        common: Common,
    },
    /// Run an independence test.
    Test {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// rpdc-gamma, rpdc-perm, ddc, wilks or puri-sen.
        #[arg(long, default_value = "rpdc-gamma")]
        method: String,
        #[command(flatten)]
        common: Common,
    },
    /// Rejection rates over simulated datasets.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=7))]
        example: u32,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', default_value = "100")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        p: usize,
        #[arg(long, default_value_t = 10)]
        q: usize,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long = "t-frac", default_value_t = 0.5)]
        t_frac: f64,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        /// Use 400 replicates per cell.
        #[arg(long)]
        full: bool,
        #[arg(long, value_delimiter = ',', default_value = "rpdc-gamma,ddc")]
        methods: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Time the direct and projected estimators.
    Bench {
        #[arg(long = "n-list", value_delimiter = ',', default_value = "500,1000,2000,4000")]
        n_list: Vec<usize>,
        /// Comma-separated values of p + q, split evenly.
        #[arg(long, value_delimiter = ',', default_value = "20")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Fit the timing models and report break-even sample sizes.
        #[arg(long = "break-even")]
        break_even: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn emit(common: &Common, json: &impl serde::Serialize, csv: impl FnOnce() -> String) -> Result<()> {
    match (&common.out, common.format) {
        (Some(path), Format::Json) => write_json(json, path),
        (Some(path), Format::Csv) => Ok(std::fs::write(path, csv())?),
        (None, Format::Json) => {
            println!("{}", to_json_string(json)?);
            Ok(())
        }
        (None, Format::Csv) => {
            print!("{}", csv());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Dcov { x, y, method, common } => {
            let (x, y) = (read_csv(x)?, read_csv(y)?);
            let est = match method {
                EstimateMethod::Fast => {
                    if x.ncols() != 1 || y.ncols() != 1 {
                        return Err(RpdcError::DimensionMismatch { expected: 1, got: x.ncols().max(y.ncols()) });
                    }
                    dcov_unbiased_fast(x.as_slice(), y.as_slice())?
                }
                EstimateMethod::Brute => dcov_unbiased_bruteforce(&x, &y)?,
                EstimateMethod::Rpdc => rpdc_estimate(&x, &y, &common.rpdc())?,
            };
            emit(&common, &est, || format!("method,n,value\n{:?},{},{}\n", est.method, est.n, est.value))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Test { x, y, method, common } => {
            let method: TestMethod = method.parse()?;
            let data = rpdcov::PairedSample::new(read_csv(x)?, read_csv(y)?)?;
            let res = rpdcov::harness::run_test(method, &data, &common.rpdc())?;
            emit(&common, &res, || {
                format!(
                    "method,statistic,p_value,threshold,reject,degenerate\n{},{},{},{},{},{}\n",
                    res.method.name(),
                    res.statistic,
                    res.p_value.map(|v| v.to_string()).unwrap_or_default(),
                    res.threshold.map(|v| v.to_string()).unwrap_or_default(),
                    res.reject,
                    res.degenerate
                )
            })?;
            Ok(if res.degenerate { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Simulate { example, n, p, q, rho, sigma, t_frac, reps, full, methods, common } => {
            let id = ExampleId::from_number(example)?;
            let params = ExampleParams { rho, sigma, t_fraction: t_frac };
            let methods = methods.iter().map(|m| m.parse()).collect::<Result<Vec<TestMethod>>>()?;
            let cells = methods
                .iter()
                .flat_map(|&m| n.iter().map(move |&ni| CellSpec::new(m, id, ni, p, q).params(params)))
                .collect();
            let cfg = SimulationConfig {
                replicates: if full { 400 } else { reps },
                permutations: common.perms,
                significance: common.alpha,
                ..SimulationConfig::new(cells).seed(common.seed).k(common.k)
            };
            let report = run_simulation(&cfg)?;
            emit(&common, &report, || report.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { n_list, dims, repeats, break_even: fit, common } => {
            if fit {
                let pts = break_even(&dims, &n_list, common.k, repeats, common.seed)?;
                emit(&common, &pts, || {
                    let mut s = String::from("dim_sum,k,c_ddc,c_rpdc,n0\n");
                    for b in &pts {
                        let n0 = b.n0.map(|v| v.to_string()).unwrap_or_default();
                        s.push_str(&format!("{},{},{},{},{}\n", b.dim_sum, b.k_projections, b.c_ddc, b.c_rpdc, n0));
                    }
                    s
                })?;
            } else {
                let mut rows = Vec::new();
                for &d in &dims {
                    if d < 2 {
                        return Err(RpdcError::InvalidParameter("each --dims value must be >= 2".into()));
                    }
                    let cfg = BenchConfig { k_projections: common.k, repeats, seed: common.seed, ..BenchConfig::new(n_list.clone(), d / 2, d - d / 2) };
                    rows.extend(benchmark(&cfg)?);
                }
                emit(&common, &rows, || {
                    let mut s = String::from("n,p,q,method,mean_seconds,sd_seconds,median_seconds,repeats\n");
                    let f = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
                    for r in &rows {
                        let m = if r.method == rpdcov::harness::BenchMethod::Ddc { "ddc" } else { "rpdc" };
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            r.n,
                            r.p,
                            r.q,
                            m,
                            f(r.mean_seconds),
                            f(r.sd_seconds),
                            f(r.median_seconds),
                            r.repeats
                        ));
                    }
                    s
                })?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RPDCOV_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| RpdcError::InvalidParameter(format!("RPDCOV_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RpdcError::InvalidParameter(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
