//! Target-vector generators and the planted-cluster synthetic benchmark:
//! `k` target vectors drawn uniformly from `[0,1]^d`, `m` normal points per
//! target, and `l` uniform noise points whose identity is recorded as ground
//! truth.

use crate::cost::mean;
use crate::rng::SeededRng;
use crate::sobol::sobol_points;
use crate::types::{CandidatePool, Error, FeatureVector, Result, TargetSet};

/// Parameters of one synthetic instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub k: usize,
    /// Points per planted team.
    pub m: usize,
    /// Uniform noise points appended to the pool.
    pub l: usize,
    pub d: usize,
    /// Sampling standard deviation around each target.
    pub sigma: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.m == 0 || self.d == 0 {
            return Err(Error::InvalidInput("k, m, and d must be at least 1".into()));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidInput(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.k * self.m + self.l
    }
}

/// Ground truth for one generated candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedLabel {
    Team(usize),
    Noise,
}

/// A generated instance: the pool, the targets the clusters were planted
/// around, and the per-candidate ground truth.
#[derive(Debug, Clone)]
pub struct SynthInstance {
    pub pool: CandidatePool,
    pub targets: TargetSet,
    pub labels: Vec<PlantedLabel>,
}

/// `k` identical copies of the pool mean.
pub fn targets_mean(pool: &CandidatePool, k: usize) -> Result<TargetSet> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let m = mean(pool.vectors().iter(), pool.dim())?;
    TargetSet::new(vec![m; k])
}

/// `k` distinct rows drawn without replacement from the seeded generator.
pub fn targets_sample(pool: &CandidatePool, k: usize, seed: u64) -> Result<TargetSet> {
    if k == 0 || k > pool.len() {
        return Err(Error::InvalidInput(format!(
            "cannot sample {k} distinct targets from {} candidates",
            pool.len()
        )));
    }
    let mut rng = SeededRng::new(seed);
    let picks = rng.sample_without_replacement(pool.len(), k);
    TargetSet::new(picks.into_iter().map(|i| pool.vector(i).clone()).collect())
}

/// The first `k` points of the `d`-dimensional Sobol sequence after `skip`
/// points. Seedless and fully deterministic.
pub fn targets_sobol(k: usize, d: usize, skip: usize) -> Result<TargetSet> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let rows = sobol_points(k, d, skip)?;
    TargetSet::new(
        rows.into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Generates a planted instance: targets uniform in `[0,1]^d`, `m` points
/// per target from coordinatewise normals with mean `t_i` and the configured
/// sigma (values are not clipped to the unit cube), then `l` uniform noise
/// points. Deterministic for a fixed seed.
pub fn gen_synthetic(config: &SynthConfig) -> Result<SynthInstance> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    let targets: Vec<FeatureVector> = (0..config.k)
        .map(|_| FeatureVector::new((0..config.d).map(|_| rng.uniform()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(config.n());
    let mut labels = Vec::with_capacity(config.n());
    for (team, target) in targets.iter().enumerate() {
        for _ in 0..config.m {
            rows.push(
                target
                    .values()
                    .iter()
                    .map(|&t| t + config.sigma * rng.standard_normal())
                    .collect(),
            );
            labels.push(PlantedLabel::Team(team));
        }
    }
    for _ in 0..config.l {
        rows.push((0..config.d).map(|_| rng.uniform()).collect());
        labels.push(PlantedLabel::Noise);
    }
    Ok(SynthInstance {
        pool: CandidatePool::from_rows(rows)?,
        targets: TargetSet::new(targets)?,
        labels,
    })
}
