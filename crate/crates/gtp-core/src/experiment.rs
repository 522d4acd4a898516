//! Experiment sweeps: run a set of algorithms over synthetic (or loaded)
//! instances while varying one parameter, with full seed discipline. Cell
//! `(sweep value, algorithm, repetition)` always uses instance seed
//! `base_seed + repetition`, so reruns are byte-identical.

use std::path::{Path, PathBuf};

use crate::baselines::{
    btf, kmeans_minus_minus, kmeans_partition, knn_then_kmeans, post_pipeline, random_partition,
    relabel_to_targets, KMeansInit,
};
use crate::cis::CisMethod;
use crate::datagen::{gen_synthetic, targets_mean, targets_sample, targets_sobol, SynthConfig};
use crate::guided::{build_report, guided_split, GuidedSplitConfig};
use crate::timing::measure;
use crate::types::{CandidatePool, Error, Result, SolveReport, TargetSet};

/// Every solver the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    GuidedSplit,
    Random,
    KMeans,
    KMeansTargets,
    KMeansMM,
    KnnKMeans,
    BtfCvx,
    BtfGreedy,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::GuidedSplit,
        Algorithm::Random,
        Algorithm::KMeans,
        Algorithm::KMeansTargets,
        Algorithm::KMeansMM,
        Algorithm::KnnKMeans,
        Algorithm::BtfCvx,
        Algorithm::BtfGreedy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GuidedSplit => "guided-split",
            Algorithm::Random => "random",
            Algorithm::KMeans => "kmeans",
            Algorithm::KMeansTargets => "kmeans-targets",
            Algorithm::KMeansMM => "kmeans-mm",
            Algorithm::KnnKMeans => "knn-kmeans",
            Algorithm::BtfCvx => "btf-cvx",
            Algorithm::BtfGreedy => "btf-greedy",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|a| a.name()).collect::<Vec<_>>().join(", ")
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| Error::UnknownAlgorithm {
                name: s.to_string(),
                valid: Self::valid_names(),
            })
    }
}

/// Runs one algorithm on one instance, measuring wall time around the solve
/// only (no I/O inside). Stochastic algorithms consume `seed`; deterministic
/// ones ignore it beyond echoing it in the report.
pub fn run_algorithm(
    algorithm: Algorithm,
    pool: &CandidatePool,
    targets: &TargetSet,
    l: usize,
    seed: u64,
    cis_method: CisMethod,
) -> Result<SolveReport> {
    let n = pool.len();
    let k = targets.k();
    if n < l || n - l < k {
        return Err(Error::Infeasible(format!(
            "cannot form {k} nonempty teams from {n} points with {l} removals"
        )));
    }
    match algorithm {
        Algorithm::GuidedSplit => {
            let config = GuidedSplitConfig { cis_method, seed, ..Default::default() };
            guided_split(pool, targets, l, &config)
        }
        Algorithm::Random => {
            let (part, wall) = measure(|| -> Result<_> {
                let raw = random_partition(pool, k, seed)?;
                post_pipeline(&raw, pool, targets, l, cis_method)
            });
            build_report(pool, targets, part?, 1, wall, seed)
        }
        Algorithm::KMeans | Algorithm::KMeansTargets => {
            let init = if algorithm == Algorithm::KMeans {
                KMeansInit::PlusPlus
            } else {
                KMeansInit::Targets
            };
            let (out, wall) = measure(|| -> Result<_> {
                let res = kmeans_partition(pool, k, seed, init, Some(targets))?;
                let part = post_pipeline(&res.partitioning, pool, targets, l, cis_method)?;
                Ok((part, res.iterations))
            });
            let (part, iterations) = out?;
            build_report(pool, targets, part, iterations, wall, seed)
        }
        Algorithm::KMeansMM => {
            let (out, wall) = measure(|| -> Result<_> {
                let res = kmeans_minus_minus(pool, k, l, seed)?;
                let part = relabel_to_targets(&res.partitioning, pool, targets)?;
                Ok((part, res.iterations))
            });
            let (part, iterations) = out?;
            build_report(pool, targets, part, iterations, wall, seed)
        }
        Algorithm::KnnKMeans => {
            let (out, wall) = measure(|| -> Result<_> {
                let res = knn_then_kmeans(pool, k, l, seed)?;
                let part = relabel_to_targets(&res.partitioning, pool, targets)?;
                Ok((part, res.iterations))
            });
            let (part, iterations) = out?;
            build_report(pool, targets, part, iterations, wall, seed)
        }
        Algorithm::BtfCvx | Algorithm::BtfGreedy => {
            let method = if algorithm == Algorithm::BtfCvx {
                CisMethod::Cvx
            } else {
                CisMethod::Greedy
            };
            let (part, wall) = measure(|| btf(pool, targets, l, method));
            build_report(pool, targets, part?, 1, wall, seed)
        }
    }
}

/// Where an instance's targets come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetMethod {
    /// The targets the synthetic generator planted (synthetic pools only).
    Planted,
    /// All targets equal to the pool mean.
    Mean,
    /// Targets drawn from the pool without replacement.
    Sample,
    /// Low-discrepancy targets from the Sobol sequence (skip 1).
    Sobol,
    /// Targets loaded from a CSV file.
    File(PathBuf),
}

impl TargetMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "planted" => Ok(TargetMethod::Planted),
            "mean" => Ok(TargetMethod::Mean),
            "sample" => Ok(TargetMethod::Sample),
            "sobol" => Ok(TargetMethod::Sobol),
            other => Err(Error::InvalidInput(format!(
                "unknown target method '{other}' (expected planted, mean, sample, sobol, or a file)"
            ))),
        }
    }
}

/// Which parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    L,
    K,
    N,
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l" => Ok(SweepVariable::L),
            "k" => Ok(SweepVariable::K),
            "n" => Ok(SweepVariable::N),
            other => {
                Err(Error::InvalidInput(format!("unknown sweep variable '{other}' (l, k, or n)")))
            }
        }
    }
}

/// Full description of a sweep experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub sweep: SweepVariable,
    pub sweep_values: Vec<usize>,
    /// Fixed parameters; the swept one is overridden per value. For
    /// synthetic pools the per-team count is `m = max(1, (n - l) / k)`, so
    /// the realized pool size is `k * m + l` (nearest feasible to `n`).
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub d: usize,
    pub sigma: f64,
    pub target_method: TargetMethod,
    pub repetitions: usize,
    pub base_seed: u64,
    pub cis_method: CisMethod,
    /// Fixed pool loaded from a file instead of the synthetic generator.
    pub pool_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidInput("no algorithms selected".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidInput("repetitions must be at least 1".into()));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::InvalidInput("no sweep values".into()));
        }
        for &v in &self.sweep_values {
            let (n, k, l) = self.cell_params(v);
            if k == 0 || n == 0 {
                return Err(Error::InvalidInput(format!("sweep value {v} gives an empty instance")));
            }
            if n < l || n - l < k {
                return Err(Error::Infeasible(format!(
                    "sweep value {v}: cannot form {k} teams from {n} points with {l} removals"
                )));
            }
        }
        if self.pool_path.is_some() && self.sweep == SweepVariable::N {
            return Err(Error::InvalidInput(
                "sweeping n requires the synthetic generator, not a fixed pool file".into(),
            ));
        }
        if self.pool_path.is_some() && self.target_method == TargetMethod::Planted {
            return Err(Error::InvalidInput(
                "planted targets only exist for synthetic pools".into(),
            ));
        }
        Ok(())
    }

    fn cell_params(&self, sweep_value: usize) -> (usize, usize, usize) {
        match self.sweep {
            SweepVariable::L => (self.n, self.k, sweep_value),
            SweepVariable::K => (self.n, sweep_value, self.l),
            SweepVariable::N => (sweep_value, self.k, self.l),
        }
    }
}

/// One successful table row.
#[derive(Debug, Clone)]
pub struct RunRow {
    pub sweep_value: usize,
    pub algorithm: Algorithm,
    pub repetition: usize,
    pub cost: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// A failed cell, kept alongside the successful rows.
#[derive(Debug, Clone)]
pub struct RunError {
    pub sweep_value: usize,
    pub algorithm: Algorithm,
    pub repetition: usize,
    pub message: String,
}

/// Per-(sweep value, algorithm) arithmetic means over repetitions.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub sweep_value: usize,
    pub algorithm: Algorithm,
    pub mean_cost: f64,
    pub mean_wall_time_s: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub rows: Vec<RunRow>,
    pub errors: Vec<RunError>,
}

impl ExperimentTable {
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        for row in &self.rows {
            match out
                .iter_mut()
                .find(|s| s.sweep_value == row.sweep_value && s.algorithm == row.algorithm)
            {
                Some(s) => {
                    s.mean_cost += row.cost;
                    s.mean_wall_time_s += row.wall_time_s;
                    s.repetitions += 1;
                }
                None => out.push(SummaryRow {
                    sweep_value: row.sweep_value,
                    algorithm: row.algorithm,
                    mean_cost: row.cost,
                    mean_wall_time_s: row.wall_time_s,
                    repetitions: 1,
                }),
            }
        }
        for s in &mut out {
            s.mean_cost /= s.repetitions as f64;
            s.mean_wall_time_s /= s.repetitions as f64;
        }
        out
    }
}

fn instance_for(
    config: &ExperimentConfig,
    fixed_pool: Option<&CandidatePool>,
    file_targets: Option<&TargetSet>,
    sweep_value: usize,
    seed: u64,
) -> Result<(CandidatePool, TargetSet, usize)> {
    let (n, k, l) = config.cell_params(sweep_value);
    let (pool, planted) = match fixed_pool {
        Some(p) => (p.clone(), None),
        None => {
            let m = ((n - l) / k).max(1);
            let synth = gen_synthetic(&SynthConfig { k, m, l, d: config.d, sigma: config.sigma, seed })?;
            (synth.pool, Some(synth.targets))
        }
    };
    let targets = match &config.target_method {
        TargetMethod::Planted => planted.ok_or_else(|| {
            Error::InvalidInput("planted targets only exist for synthetic pools".into())
        })?,
        TargetMethod::Mean => targets_mean(&pool, k)?,
        TargetMethod::Sample => targets_sample(&pool, k, seed)?,
        TargetMethod::Sobol => targets_sobol(k, pool.dim(), 1)?,
        TargetMethod::File(path) => file_targets
            .cloned()
            .ok_or_else(|| Error::InvalidInput(format!("targets file {path:?} not loaded")))?,
    };
    Ok((pool, targets, l))
}

/// Runs the full sweep. Rows come out sorted by (sweep value, algorithm
/// name, repetition); failed cells are recorded, never silently dropped.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentTable> {
    config.validate()?;
    let fixed_pool = match &config.pool_path {
        Some(path) => Some(crate::io::load_pool(path)?),
        None => None,
    };
    let file_targets = match &config.target_method {
        TargetMethod::File(path) => Some(crate::io::load_targets(path)?),
        _ => None,
    };
    let mut algorithms = config.algorithms.clone();
    algorithms.sort_by_key(|a| a.name());
    algorithms.dedup();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut sweep_values = config.sweep_values.clone();
    sweep_values.sort_unstable();
    sweep_values.dedup();
    for &value in &sweep_values {
        for &algorithm in &algorithms {
            for repetition in 0..config.repetitions {
                let seed = config.base_seed + repetition as u64;
                let outcome = instance_for(config, fixed_pool.as_ref(), file_targets.as_ref(), value, seed)
                    .and_then(|(pool, targets, l)| {
                        run_algorithm(algorithm, &pool, &targets, l, seed, config.cis_method)
                    });
                match outcome {
                    Ok(report) => rows.push(RunRow {
                        sweep_value: value,
                        algorithm,
                        repetition,
                        cost: report.cost,
                        wall_time_s: report.wall_time_s,
                        seed,
                    }),
                    Err(e) => errors.push(RunError {
                        sweep_value: value,
                        algorithm,
                        repetition,
                        message: e.to_string(),
                    }),
                }
            }
        }
    }
    Ok(ExperimentTable { rows, errors })
}

/// Writes the raw results table (`sweep_value,algorithm,repetition,cost,
/// wall_time_s,seed`). With `timing` off the wall-time column is written as
/// zero so identical runs produce identical bytes.
pub fn write_results_csv(table: &ExperimentTable, path: &Path, timing: bool) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["sweep_value", "algorithm", "repetition", "cost", "wall_time_s", "seed"])?;
    for row in &table.rows {
        let wall = if timing { row.wall_time_s } else { 0.0 };
        writer.write_record([
            row.sweep_value.to_string(),
            row.algorithm.name().to_string(),
            row.repetition.to_string(),
            row.cost.to_string(),
            wall.to_string(),
            row.seed.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the per-cell mean summary.
pub fn write_summary_csv(table: &ExperimentTable, path: &Path, timing: bool) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["sweep_value", "algorithm", "mean_cost", "mean_wall_time_s", "repetitions"])?;
    for s in table.summary() {
        let wall = if timing { s.mean_wall_time_s } else { 0.0 };
        writer.write_record([
            s.sweep_value.to_string(),
            s.algorithm.name().to_string(),
            s.mean_cost.to_string(),
            wall.to_string(),
            s.repetitions.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        match "does-not-exist".parse::<Algorithm>() {
            Err(Error::UnknownAlgorithm { valid, .. }) => {
                assert!(valid.contains("guided-split"));
                assert!(valid.contains("btf-greedy"));
            }
            other => panic!("expected unknown-algorithm error, got {other:?}"),
        }
    }

    #[test]
    fn every_algorithm_emits_a_valid_partitioning() {
        let synth = gen_synthetic(&SynthConfig { k: 3, m: 8, l: 4, d: 3, sigma: 0.1, seed: 2 })
            .unwrap();
        for algorithm in Algorithm::ALL {
            let report = run_algorithm(
                algorithm,
                &synth.pool,
                &synth.targets,
                4,
                7,
                CisMethod::Greedy,
            )
            .unwrap();
            report.partitioning.validate(&synth.pool, Some(4)).unwrap();
            assert_eq!(report.removed_ids.len(), 4, "{algorithm}");
            assert!(report.cost.is_finite());
            let recomputed: f64 = report.per_team_cost.iter().sum();
            assert!((report.cost - recomputed).abs() <= 1e-9 * report.cost.max(1.0));
        }
    }

    #[test]
    fn stochastic_algorithms_are_seed_deterministic() {
        let synth = gen_synthetic(&SynthConfig { k: 2, m: 10, l: 2, d: 2, sigma: 0.2, seed: 3 })
            .unwrap();
        for algorithm in Algorithm::ALL {
            let a = run_algorithm(algorithm, &synth.pool, &synth.targets, 2, 11, CisMethod::Cvx)
                .unwrap();
            let b = run_algorithm(algorithm, &synth.pool, &synth.targets, 2, 11, CisMethod::Cvx)
                .unwrap();
            assert_eq!(a.partitioning, b.partitioning, "{algorithm}");
            assert_eq!(a.cost.to_bits(), b.cost.to_bits(), "{algorithm}");
        }
    }

    #[test]
    fn one_cell_experiment_yields_one_row() {
        let config = ExperimentConfig {
            algorithms: vec![Algorithm::Random],
            sweep: SweepVariable::L,
            sweep_values: vec![2],
            n: 20,
            k: 2,
            l: 0,
            d: 2,
            sigma: 0.1,
            target_method: TargetMethod::Planted,
            repetitions: 1,
            base_seed: 5,
            cis_method: CisMethod::Greedy,
            pool_path: None,
        };
        let table = run_experiment(&config).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.errors.is_empty());
        assert_eq!(table.rows[0].seed, 5);
    }

    #[test]
    fn rerun_produces_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            algorithms: vec![Algorithm::Random, Algorithm::KMeansTargets],
            sweep: SweepVariable::K,
            sweep_values: vec![2, 3],
            n: 24,
            k: 2,
            l: 2,
            d: 2,
            sigma: 0.15,
            target_method: TargetMethod::Planted,
            repetitions: 3,
            base_seed: 0,
            cis_method: CisMethod::Greedy,
            pool_path: None,
        };
        let path_a = dir.path().join("a.csv");
        let path_b = dir.path().join("b.csv");
        write_results_csv(&run_experiment(&config).unwrap(), &path_a, false).unwrap();
        write_results_csv(&run_experiment(&config).unwrap(), &path_b, false).unwrap();
        assert_eq!(std::fs::read(&path_a).unwrap(), std::fs::read(&path_b).unwrap());
    }

    #[test]
    fn infeasible_sweep_values_are_rejected_up_front() {
        let config = ExperimentConfig {
            algorithms: vec![Algorithm::Random],
            sweep: SweepVariable::K,
            sweep_values: vec![30],
            n: 20,
            k: 2,
            l: 5,
            d: 2,
            sigma: 0.1,
            target_method: TargetMethod::Planted,
            repetitions: 1,
            base_seed: 0,
            cis_method: CisMethod::Cvx,
            pool_path: None,
        };
        assert!(run_experiment(&config).is_err());
    }
}
