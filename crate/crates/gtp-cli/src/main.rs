//! `gtp` — solve, benchmark, and generate guided team-partitioning
//! instances.
//!
//! Subcommands:
//! - `solve`: one instance, one algorithm, JSON report out.
//! - `bench`: seeded sweeps over l, k, or n with a CSV results table.
//! - `synth`: write a planted synthetic instance to CSV files.
//! - `oracle`: exact brute-force solve of small instances (size-guarded).
//!
//! All randomness flows from `--seed` (plus the repetition index in
//! `bench`), so repeated runs write identical bytes. Wall-clock timings are
//! only recorded with `--timing`; without it timing fields are zero to keep
//! outputs reproducible.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use gtp_core::cis::CisMethod;
use gtp_core::datagen::{gen_synthetic, targets_mean, targets_sample, targets_sobol, SynthConfig};
use gtp_core::experiment::{
    run_algorithm, run_experiment, Algorithm, ExperimentConfig, SweepVariable, TargetMethod,
};
use gtp_core::io;
use gtp_core::oracle;
use gtp_core::types::{CandidatePool, TargetSet};

#[derive(Parser)]
#[command(name = "gtp", version, about = "Guided team-partitioning solver and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with one algorithm and write a JSON report.
    Solve(SolveArgs),
    /// Run a seeded sweep over l, k, or n and write a CSV results table.
    Bench(BenchArgs),
    /// Generate a planted synthetic instance and write pool, targets, and
    /// ground-truth labels as CSV.
    Synth(SynthArgs),
    /// Exact brute-force solve of a small instance (hard size guards).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Candidate pool CSV (id,f1,...,fd).
    #[arg(long)]
    pool: PathBuf,
    /// Target set CSV (t_id,f1,...,fd); alternative to --target-method.
    #[arg(long)]
    targets: Option<PathBuf>,
    /// Generate targets instead of loading them: mean, sample, or sobol.
    #[arg(long)]
    target_method: Option<String>,
    /// Number of teams (required with --target-method).
    #[arg(long)]
    k: Option<usize>,
    /// Removal budget.
    #[arg(long, default_value_t = 0)]
    l: usize,
    /// Algorithm name; see `bench --help` for the list.
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CIS solver backing removals: cvx or greedy.
    #[arg(long, default_value = "cvx")]
    cis_method: String,
    /// Record wall-clock time in the report (breaks byte-reproducibility).
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Report path (JSON). Without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Swept parameter: l, k, or n.
    #[arg(long)]
    sweep: String,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<usize>,
    /// Comma-separated algorithm names, or "all".
    #[arg(long, value_delimiter = ',', default_value = "all")]
    algos: Vec<String>,
    /// Fixed pool CSV; omit to use the synthetic generator.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Targets CSV for --target-method file.
    #[arg(long)]
    targets: Option<PathBuf>,
    /// planted, mean, sample, sobol, or file.
    #[arg(long, default_value = "planted")]
    target_method: String,
    /// Pool size for synthetic instances (realized as k*m+l with m = (n-l)/k).
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    l: usize,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 0.2)]
    sigma: f64,
    /// Repetitions per cell; the instance seed is seed + repetition.
    #[arg(long, default_value_t = 25)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "cvx")]
    cis_method: String,
    /// Record wall-clock times (breaks byte-reproducibility).
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Results CSV path; a per-cell mean summary lands next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    k: usize,
    /// Points per planted team.
    #[arg(long)]
    m: usize,
    /// Noise points.
    #[arg(long, default_value_t = 0)]
    l: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <prefix>-pool.csv, <prefix>-targets.csv,
    /// <prefix>-labels.csv.
    #[arg(long)]
    out: String,
}

#[derive(Args)]
struct OracleArgs {
    /// cis, cp, or gtp.
    #[arg(long)]
    problem: String,
    #[arg(long)]
    pool: PathBuf,
    /// Targets CSV; cis uses the first target only.
    #[arg(long)]
    targets: PathBuf,
    #[arg(long, default_value_t = 0)]
    l: usize,
    /// Output path (JSON). Without it the result goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Synth(args) => synth(args),
        Command::Oracle(args) => oracle_cmd(args),
    };
    if let Err(e) = result {
        let error = serde_json::json!({ "error": format!("{e:#}") });
        eprintln!("{error}");
        std::process::exit(1);
    }
}

fn resolve_targets(
    pool: &CandidatePool,
    targets: &Option<PathBuf>,
    method: &Option<String>,
    k: Option<usize>,
    seed: u64,
) -> anyhow::Result<TargetSet> {
    match (targets, method) {
        (Some(path), None) => Ok(io::load_targets(path)?),
        (None, Some(m)) => {
            let k = k.context("--target-method requires --k")?;
            match m.as_str() {
                "mean" => Ok(targets_mean(pool, k)?),
                "sample" => Ok(targets_sample(pool, k, seed)?),
                "sobol" => Ok(targets_sobol(k, pool.dim(), 1)?),
                other => bail!("unknown target method '{other}' (mean, sample, sobol)"),
            }
        }
        (Some(_), Some(_)) => bail!("--targets and --target-method are mutually exclusive"),
        (None, None) => bail!("one of --targets or --target-method is required"),
    }
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let pool = io::load_pool(&args.pool)?;
    let targets =
        resolve_targets(&pool, &args.targets, &args.target_method, args.k, args.seed)?;
    let algorithm: Algorithm = args.algo.parse()?;
    let cis_method: CisMethod = args.cis_method.parse()?;
    let mut report =
        run_algorithm(algorithm, &pool, &targets, args.l, args.seed, cis_method)?;
    if !args.timing {
        report.wall_time_s = 0.0;
    }
    let config = serde_json::json!({
        "pool": args.pool,
        "targets": args.targets,
        "target_method": args.target_method,
        "k": targets.k(),
        "l": args.l,
        "algo": args.algo,
        "seed": args.seed,
        "cis_method": args.cis_method,
        "timing": args.timing,
    });
    let doc = io::ReportDocument::from_report(&report, &pool, algorithm.name(), config);
    match &args.out {
        Some(path) => {
            io::save_report(&doc, path)?;
            println!("cost {}", report.cost);
        }
        None => println!("{}", serde_json::to_string_pretty(&doc)?),
    }
    Ok(())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let algorithms: Vec<Algorithm> =
        if args.algos.len() == 1 && args.algos[0] == "all" {
            Algorithm::ALL.to_vec()
        } else {
            args.algos
                .iter()
                .map(|name| name.parse())
                .collect::<Result<_, _>>()?
        };
    let target_method = match args.target_method.as_str() {
        "file" => TargetMethod::File(
            args.targets.clone().context("--target-method file requires --targets")?,
        ),
        other => TargetMethod::parse(other)?,
    };
    let config = ExperimentConfig {
        algorithms,
        sweep: args.sweep.parse::<SweepVariable>()?,
        sweep_values: args.values.clone(),
        n: args.n,
        k: args.k,
        l: args.l,
        d: args.d,
        sigma: args.sigma,
        target_method,
        repetitions: args.reps,
        base_seed: args.seed,
        cis_method: args.cis_method.parse()?,
        pool_path: args.pool.clone(),
    };
    let table = run_experiment(&config)?;
    gtp_core::experiment::write_results_csv(&table, &args.out, args.timing)?;
    let summary_path = summary_path(&args.out);
    gtp_core::experiment::write_summary_csv(&table, &summary_path, args.timing)?;
    println!("wrote {} rows to {}", table.rows.len(), args.out.display());
    println!("wrote summary to {}", summary_path.display());
    if !table.errors.is_empty() {
        for e in &table.errors {
            eprintln!(
                "{}",
                serde_json::json!({
                    "error": e.message,
                    "sweep_value": e.sweep_value,
                    "algorithm": e.algorithm.name(),
                    "repetition": e.repetition,
                })
            );
        }
        bail!("{} experiment cell(s) failed", table.errors.len());
    }
    Ok(())
}

fn summary_path(out: &std::path::Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    out.with_file_name(format!("{stem}-summary.csv"))
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let config = SynthConfig {
        k: args.k,
        m: args.m,
        l: args.l,
        d: args.d,
        sigma: args.sigma,
        seed: args.seed,
    };
    let instance = gen_synthetic(&config)?;
    let pool_path = PathBuf::from(format!("{}-pool.csv", args.out));
    let targets_path = PathBuf::from(format!("{}-targets.csv", args.out));
    let labels_path = PathBuf::from(format!("{}-labels.csv", args.out));
    io::save_pool(&instance.pool, &pool_path)?;
    io::save_targets(&instance.targets, &targets_path)?;
    io::save_labels(&instance, &labels_path)?;
    println!(
        "wrote {} candidates to {} (+targets, +labels)",
        instance.pool.len(),
        pool_path.display()
    );
    Ok(())
}

fn oracle_cmd(args: OracleArgs) -> anyhow::Result<()> {
    let pool = io::load_pool(&args.pool)?;
    let targets = io::load_targets(&args.targets)?;
    let value = match args.problem.as_str() {
        "cis" => {
            let res = oracle::brute_cis(&pool, targets.target(0), args.l)?;
            serde_json::json!({
                "problem": "cis",
                "optimum": res.optimum,
                "removed_ids": res.witness.iter().map(|&i| pool.id(i)).collect::<Vec<_>>(),
                "enumerated": res.enumerated,
            })
        }
        "cp" => {
            let res = oracle::brute_cp(&pool, &targets)?;
            serde_json::json!({
                "problem": "cp",
                "optimum": res.unrestricted.optimum,
                "assignment": assignment_json(&pool, &res.unrestricted.witness),
                "nonempty_optimum": res.nonempty.as_ref().map(|r| r.optimum),
                "enumerated": res.unrestricted.enumerated,
            })
        }
        "gtp" => {
            let res = oracle::brute_gtp(&pool, &targets, args.l)?;
            serde_json::json!({
                "problem": "gtp",
                "optimum": res.optimum,
                "assignment": assignment_json(&pool, &res.witness),
                "enumerated": res.enumerated,
            })
        }
        other => bail!("unknown oracle problem '{other}' (cis, cp, gtp)"),
    };
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn assignment_json(
    pool: &CandidatePool,
    part: &gtp_core::types::Partitioning,
) -> serde_json::Value {
    let map: std::collections::BTreeMap<String, serde_json::Value> = (0..pool.len())
        .map(|i| {
            let value = match part.slot(i) {
                gtp_core::types::Assignment::Team(t) => serde_json::json!(t + 1),
                gtp_core::types::Assignment::Removed => serde_json::json!("removed"),
            };
            (pool.id(i).to_string(), value)
        })
        .collect();
    serde_json::json!(map)
}
