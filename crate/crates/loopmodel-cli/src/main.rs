//! Command-line driver for the loop model: graph generation, exact
//! identity verification, estimation sweeps, sparsity certification,
//! bound evaluation, and exact small-system references.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource or budget exhaustion.

// `!(a > b)` rejects NaN flag values; `a <= b` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use loopmodel::bounds::{
    averaged_lower_bound, criterion_report, drift_const, pointwise_lower_bound, threshold_time,
    window_const, BoundInputs, CriterionReport,
};
use loopmodel::graphs::{
    condition_simple, gen_erdos_renyi, gen_random_regular_with_attempts, read_degree_file,
    read_graph_file, sparsity_check, write_graph_file, Graph, SearchMode, SparsityVerdict,
};
use loopmodel::loopcore::{read_marks_file, sample_marks, trace_loops, MarkConfig};
use loopmodel::measure::{
    estimate_drift, estimate_max_support_fraction, estimate_prob_macroscopic, estimate_z,
    Estimate, Estimator,
};
use loopmodel::observables::{
    insertion_volumes, integrated_identity_tolerance, integrated_slice_value,
    pointwise_slice_check,
};
use loopmodel::oracle::{log_z_curvature_grid, spectrum, DEFAULT_DIM_CAP};
use loopmodel::seeds::derive_seed;
use loopmodel::surgery::verify;
use loopmodel::Error;

use manifest::RunManifest;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "loopmodel", version, about = "Random loop model experiments")]
struct Cli {
    /// Bound worker parallelism (default: all cores). Results do not
    /// depend on the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from one of the random ensembles.
    Gen(GenArgs),
    /// Run the exact identity suites on sampled configurations.
    Verify(VerifyArgs),
    /// Estimate Z, the macroscopic-loop probability, and the drift at one t.
    Estimate(EstimateArgs),
    /// Estimate over a uniform t-grid (one estimate row per grid point).
    Sweep(SweepArgs),
    /// Check the small-set sparsity condition.
    Sparsity(SparsityArgs),
    /// Evaluate the bound formulas and criterion report.
    Bounds(BoundsArgs),
    /// Exact partition function and log-convexity on a t-grid.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    /// Random regular graph.
    Rrg,
    /// Sparse Erdos-Renyi G(n, lambda/n).
    Er,
    /// Configuration model conditioned on simplicity.
    Cm,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    ensemble: Ensemble,
    /// Vertex count (rrg, er).
    #[arg(long)]
    n: Option<usize>,
    /// Degree (rrg).
    #[arg(long)]
    d: Option<usize>,
    /// Mean-degree parameter of G(n, lambda/n) (er).
    #[arg(long)]
    lambda: Option<f64>,
    /// Degree sequence file, one integer per line (cm).
    #[arg(long)]
    degrees: Option<PathBuf>,
    /// Pairing attempts before giving up (rrg, cm).
    #[arg(long, default_value_t = 10_000_000)]
    max_attempts: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    u: f64,
    /// Number of sampled configurations.
    #[arg(long, default_value_t = 1000)]
    configs: usize,
    #[arg(long)]
    seed: u64,
    /// Check one stored configuration instead of sampling.
    #[arg(long)]
    marks: Option<PathBuf>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    u: f64,
    /// Support threshold of the macroscopic event.
    #[arg(long)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = CliEstimator::Importance)]
    estimator: CliEstimator,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    /// Number of grid points (>= 2).
    #[arg(long)]
    t_steps: usize,
    #[arg(long, value_enum, default_value_t = CliEstimator::Importance)]
    estimator: CliEstimator,
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliEstimator {
    Importance,
    Mcmc,
}

impl From<CliEstimator> for Estimator {
    fn from(e: CliEstimator) -> Self {
        match e {
            CliEstimator::Importance => Estimator::Importance,
            CliEstimator::Mcmc => Estimator::Mcmc,
        }
    }
}

#[derive(Args)]
struct SparsityArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = CliMode::Exhaustive)]
    mode: CliMode,
    /// Candidate budget (exhaustive) or growth-step budget (heuristic).
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Exhaustive,
    Heuristic,
}

#[derive(Args)]
struct BoundsArgs {
    /// Graph file; alternatively give --n and --edges.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    u: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    eta: f64,
    /// Window length for the averaged bound.
    #[arg(long)]
    s: Option<f64>,
    /// Time for the pointwise bound (integer theta > 1).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value_t = CliMode::Heuristic)]
    sparsity_mode: CliMode,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Integer loop weight >= 2.
    #[arg(long)]
    theta: usize,
    #[arg(long)]
    u: f64,
    /// Grid as start:end:steps, e.g. 0.2:2.0:10.
    #[arg(long)]
    t_grid: String,
    /// Cap on the theta^n state-space dimension.
    #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
    dim_cap: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let start = Instant::now();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args, start),
        Command::Verify(args) => cmd_verify(args, start),
        Command::Estimate(args) => cmd_estimate(args, start),
        Command::Sweep(args) => cmd_sweep(args, start),
        Command::Sparsity(args) => cmd_sparsity(args, start),
        Command::Bounds(args) => cmd_bounds(args, start),
        Command::Oracle(args) => cmd_oracle(args, start),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. }
        | Error::MaxAttemptsExhausted { .. }
        | Error::DimensionCapExceeded { .. }
        | Error::Io(_) => EXIT_RESOURCE,
        Error::TracerInvariant(_) => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

/// Seventeen significant digits, enough to reproduce every f64 exactly.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn finish_manifest(
    mut manifest: RunManifest,
    outputs: &[&Path],
    beside: &Path,
) -> Result<(), Error> {
    for path in outputs {
        manifest.add_output(path)?;
    }
    manifest.write_beside(beside)?;
    Ok(())
}

fn cmd_gen(args: GenArgs, start: Instant) -> Result<ExitCode, Error> {
    let (graph, params) = match args.ensemble {
        Ensemble::Rrg => {
            let n = require(args.n, "--n")?;
            let d = require(args.d, "--d")?;
            let g = gen_random_regular_with_attempts(n, d, args.seed, args.max_attempts)?;
            (g, json!({"ensemble": "rrg", "n": n, "d": d}))
        }
        Ensemble::Er => {
            let n = require(args.n, "--n")?;
            let lambda = require(args.lambda, "--lambda")?;
            let g = gen_erdos_renyi(n, lambda, args.seed)?;
            (g, json!({"ensemble": "er", "n": n, "lambda": lambda}))
        }
        Ensemble::Cm => {
            let path = require(args.degrees, "--degrees")?;
            let degrees = read_degree_file(&path)?;
            let (g, attempts) = condition_simple(&degrees, args.seed, args.max_attempts)?;
            (
                g,
                json!({
                    "ensemble": "cm",
                    "degrees_file": path.display().to_string(),
                    "n": degrees.len(),
                    "attempts": attempts
                }),
            )
        }
    };
    write_graph_file(&graph, &args.out)?;
    let manifest = RunManifest::new(params, Some(args.seed), start.elapsed().as_secs_f64());
    finish_manifest(manifest, &[&args.out], &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn require<T>(opt: Option<T>, flag: &str) -> Result<T, Error> {
    opt.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required for this ensemble")))
}

#[derive(Serialize)]
struct CheckCounts {
    checks: u64,
    failures: u64,
}

#[derive(Serialize)]
struct VerifyReport {
    graph: String,
    t: f64,
    u: f64,
    configs: usize,
    surgery: CheckCounts,
    pointwise_slice: CheckCounts,
    integrated_slice: CheckCounts,
    all_pass: bool,
    manifest: RunManifest,
}

fn cmd_verify(args: VerifyArgs, start: Instant) -> Result<ExitCode, Error> {
    use rand::{Rng, SeedableRng};
    let g = read_graph_file(&args.graph)?;
    let mut surgery = CheckCounts { checks: 0, failures: 0 };
    let mut pointwise = CheckCounts { checks: 0, failures: 0 };
    let mut integrated = CheckCounts { checks: 0, failures: 0 };
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(derive_seed(args.seed, u64::MAX));
    let stored: Option<MarkConfig> = match &args.marks {
        Some(path) => Some(read_marks_file(path, g.edge_count())?.0),
        None => None,
    };
    let configs = if stored.is_some() { 1 } else { args.configs };
    for i in 0..configs {
        let marks = match &stored {
            Some(cfg) => cfg.clone(),
            None => sample_marks(&g, args.t, args.u, derive_seed(args.seed, i as u64))?,
        };
        let loops = trace_loops(&g, &marks)?;
        if g.edge_count() > 0 {
            let mut done = 0;
            while done < 4 {
                let e = rng.random_range(0..g.edge_count());
                let s: f64 = rng.random();
                if !marks.is_regular(s) {
                    continue;
                }
                done += 1;
                surgery.checks += 1;
                if !verify(&g, &marks, &loops, e, s)? {
                    surgery.failures += 1;
                }
            }
            let mut done = 0;
            while done < 4 {
                let s: f64 = rng.random();
                if !marks.is_regular(s) {
                    continue;
                }
                done += 1;
                pointwise.checks += 1;
                if !pointwise_slice_check(&g, &marks, &loops, s)? {
                    pointwise.failures += 1;
                }
            }
        }
        integrated.checks += 1;
        let volumes = insertion_volumes(&g, &marks, &loops)?;
        let slice = integrated_slice_value(&g, &marks, &loops)?;
        let tol = integrated_identity_tolerance(g.edge_count(), marks.len());
        if (volumes.total() - slice).abs() > tol {
            integrated.failures += 1;
        }
    }
    let all_pass =
        surgery.failures == 0 && pointwise.failures == 0 && integrated.failures == 0;
    let params = json!({
        "graph": args.graph.display().to_string(),
        "t": args.t, "u": args.u, "configs": args.configs
    });
    let report = VerifyReport {
        graph: args.graph.display().to_string(),
        t: args.t,
        u: args.u,
        configs,
        surgery,
        pointwise_slice: pointwise,
        integrated_slice: integrated,
        all_pass,
        manifest: RunManifest::new(params, Some(args.seed), start.elapsed().as_secs_f64()),
    };
    write_json(&report, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let manifest = RunManifest::new(
            json!({"graph": args.graph.display().to_string()}),
            Some(args.seed),
            start.elapsed().as_secs_f64(),
        );
        finish_manifest(manifest, &[out], out)?;
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VERIFICATION) })
}

const CSV_HEADER: &str = "t,z_hat,se_z,prob_a,se_prob,drift,se_drift,max_support_frac_mean";

struct EstimateRow {
    t: f64,
    z: Estimate,
    prob: Estimate,
    drift: Estimate,
    support: Estimate,
}

impl EstimateRow {
    fn json(&self) -> serde_json::Value {
        json!({
            "t": self.t,
            "z": self.z,
            "prob_a": self.prob,
            "drift": self.drift,
            "max_support_frac": self.support,
        })
    }

    fn csv(&self) -> String {
        [
            fmt17(self.t),
            fmt17(self.z.mean),
            fmt17(self.z.std_error),
            fmt17(self.prob.mean),
            fmt17(self.prob.std_error),
            fmt17(self.drift.mean),
            fmt17(self.drift.std_error),
            fmt17(self.support.mean),
        ]
        .join(",")
    }
}

#[allow(clippy::too_many_arguments)]
fn estimate_row(
    g: &Graph,
    theta: f64,
    t: f64,
    u: f64,
    eta: f64,
    estimator: Estimator,
    samples: usize,
    seed: u64,
) -> Result<EstimateRow, Error> {
    let z = estimate_z(g, theta, t, u, samples, derive_seed(seed, 1))?;
    let prob =
        estimate_prob_macroscopic(g, theta, t, u, eta, samples, derive_seed(seed, 2), estimator)?;
    let drift = estimate_drift(g, theta, t, u, samples, derive_seed(seed, 3), estimator)?;
    let support =
        estimate_max_support_fraction(g, theta, t, u, samples, derive_seed(seed, 4), estimator)?;
    Ok(EstimateRow { t, z, prob, drift, support })
}

fn cmd_estimate(args: EstimateArgs, start: Instant) -> Result<ExitCode, Error> {
    let g = read_graph_file(&args.graph)?;
    let row = estimate_row(
        &g,
        args.theta,
        args.t,
        args.u,
        args.eta,
        args.estimator.into(),
        args.samples,
        args.seed,
    )?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(file, "{CSV_HEADER}")?;
    writeln!(file, "{}", row.csv())?;
    drop(file);
    let params = json!({
        "graph": args.graph.display().to_string(),
        "theta": args.theta, "t": args.t, "u": args.u, "eta": args.eta,
        "estimator": match args.estimator { CliEstimator::Importance => "importance", CliEstimator::Mcmc => "mcmc" },
        "samples": args.samples
    });
    let mut manifest = RunManifest::new(params, Some(args.seed), start.elapsed().as_secs_f64());
    manifest.results = Some(row.json());
    finish_manifest(manifest, &[&args.out], &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs, start: Instant) -> Result<ExitCode, Error> {
    if args.t_steps < 2 {
        return Err(Error::InvalidParameter("--t-steps must be at least 2".into()));
    }
    if !(args.t_max > args.t_min) {
        return Err(Error::InvalidParameter("--t-max must exceed --t-min".into()));
    }
    let g = read_graph_file(&args.graph)?;
    let step = (args.t_max - args.t_min) / (args.t_steps - 1) as f64;
    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(file, "{CSV_HEADER}")?;
    let mut rows_json = Vec::with_capacity(args.t_steps);
    for j in 0..args.t_steps {
        let t = args.t_min + step * j as f64;
        let row = estimate_row(
            &g,
            args.theta,
            t,
            args.u,
            args.eta,
            args.estimator.into(),
            args.samples,
            derive_seed(args.seed, j as u64),
        )?;
        writeln!(file, "{}", row.csv())?;
        rows_json.push(row.json());
    }
    drop(file);
    let params = json!({
        "graph": args.graph.display().to_string(),
        "theta": args.theta, "u": args.u, "eta": args.eta,
        "t_min": args.t_min, "t_max": args.t_max, "t_steps": args.t_steps,
        "estimator": match args.estimator { CliEstimator::Importance => "importance", CliEstimator::Mcmc => "mcmc" },
        "samples": args.samples
    });
    let mut manifest = RunManifest::new(params, Some(args.seed), start.elapsed().as_secs_f64());
    manifest.results = Some(serde_json::Value::Array(rows_json));
    finish_manifest(manifest, &[&args.out], &args.out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SparsityReport {
    graph: String,
    verdict: SparsityVerdict,
    manifest: RunManifest,
}

fn cmd_sparsity(args: SparsityArgs, start: Instant) -> Result<ExitCode, Error> {
    let g = read_graph_file(&args.graph)?;
    let mode = match args.mode {
        CliMode::Exhaustive => SearchMode::Exhaustive,
        CliMode::Heuristic => SearchMode::Heuristic,
    };
    let verdict = sparsity_check(&g, args.eta, args.eps, mode, args.budget)?;
    let params = json!({
        "graph": args.graph.display().to_string(),
        "eta": args.eta, "eps": args.eps,
        "mode": match args.mode { CliMode::Exhaustive => "exhaustive", CliMode::Heuristic => "heuristic" },
        "budget": args.budget
    });
    let report = SparsityReport {
        graph: args.graph.display().to_string(),
        verdict,
        manifest: RunManifest::new(params, None, start.elapsed().as_secs_f64()),
    };
    write_json(&report, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let manifest = RunManifest::new(
            json!({"graph": args.graph.display().to_string()}),
            None,
            start.elapsed().as_secs_f64(),
        );
        finish_manifest(manifest, &[out], out)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundsReport {
    inputs: BoundInputs,
    c_theta_u: f64,
    window_const: f64,
    threshold_time: Option<f64>,
    averaged_lower_bound: Option<f64>,
    pointwise_lower_bound: Option<f64>,
    criterion: Option<CriterionReport>,
    manifest: RunManifest,
}

fn cmd_bounds(args: BoundsArgs, start: Instant) -> Result<ExitCode, Error> {
    let (inputs, criterion) = match (&args.graph, args.n, args.edges) {
        (Some(path), _, _) => {
            let g = read_graph_file(path)?;
            let inputs = BoundInputs::from_graph(&g, args.theta, args.u, args.eps, args.eta)?;
            let mode = match args.sparsity_mode {
                CliMode::Exhaustive => SearchMode::Exhaustive,
                CliMode::Heuristic => SearchMode::Heuristic,
            };
            let verdict = sparsity_check(&g, args.eta, args.eps, mode, args.budget)?;
            let report = criterion_report(&g, args.theta, args.u, args.eps, args.eta, &verdict)?;
            (inputs, Some(report))
        }
        (None, Some(n), Some(edges)) => {
            let density = edges as f64 / n as f64;
            let inputs = BoundInputs {
                n,
                edge_count: edges,
                theta: args.theta,
                u: args.u,
                eps: args.eps,
                eta: args.eta,
                m_minus: density,
                m_plus: density,
            };
            inputs.validate()?;
            (inputs, None)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give --graph, or both --n and --edges".into(),
            ))
        }
    };
    let c = drift_const(args.theta, args.u)?;
    let cw = window_const(args.theta)?;
    let mean_degree = 2.0 * inputs.m_minus;
    let threshold = if args.theta >= 2.0
        && args.theta.fract() == 0.0
        && mean_degree > 2.0 * c
    {
        Some(threshold_time(args.theta, args.u, mean_degree)?)
    } else {
        None
    };
    let averaged = match args.s {
        Some(s) => Some(averaged_lower_bound(&inputs, s)?),
        None => None,
    };
    let pointwise = match args.t {
        Some(t) => Some(pointwise_lower_bound(&inputs, t)?),
        None => None,
    };
    let params = json!({
        "theta": args.theta, "u": args.u, "eps": args.eps, "eta": args.eta,
        "s": args.s, "t": args.t
    });
    let report = BoundsReport {
        inputs,
        c_theta_u: c,
        window_const: cw,
        threshold_time: threshold,
        averaged_lower_bound: averaged,
        pointwise_lower_bound: pointwise,
        criterion,
        manifest: RunManifest::new(params, None, start.elapsed().as_secs_f64()),
    };
    write_json(&report, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let manifest =
            RunManifest::new(json!({}), None, start.elapsed().as_secs_f64());
        finish_manifest(manifest, &[out], out)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParameter(format!(
            "grid {spec:?} must be start:end:steps"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("bad grid start: {e}")))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("bad grid end: {e}")))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("bad grid steps: {e}")))?;
    if steps < 2 || !(end > start) {
        return Err(Error::InvalidParameter("grid needs steps >= 2 and end > start".into()));
    }
    let h = (end - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| start + h * i as f64).collect())
}

fn cmd_oracle(args: OracleArgs, start: Instant) -> Result<ExitCode, Error> {
    let g = read_graph_file(&args.graph)?;
    let grid = parse_grid(&args.t_grid)?;
    let sp = spectrum(&g, args.theta, args.u, args.dim_cap)?;
    let curvature = log_z_curvature_grid(&g, args.theta, args.u, &grid, args.dim_cap)?;
    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(file, "t,z_exact,log_z_curvature")?;
    for (t, c) in grid.iter().zip(&curvature) {
        writeln!(file, "{},{},{}", fmt17(*t), fmt17(sp.z(*t)), fmt17(*c))?;
    }
    drop(file);
    let params = json!({
        "graph": args.graph.display().to_string(),
        "theta": args.theta, "u": args.u, "t_grid": args.t_grid, "dim_cap": args.dim_cap
    });
    let manifest = RunManifest::new(params, None, start.elapsed().as_secs_f64());
    finish_manifest(manifest, &[&args.out], &args.out)?;
    Ok(ExitCode::SUCCESS)
}
