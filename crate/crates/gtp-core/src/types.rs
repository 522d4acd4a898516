//! Domain types shared by every solver: feature vectors, candidate pools,
//! target sets, partitionings, and solve reports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("removal budget {budget} out of range for {n} points")]
    BudgetOutOfRange { budget: usize, n: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid partitioning: {0}")]
    InvalidPartitioning(String),
    #[error("instance too large for exhaustive search: {0}")]
    SizeGuard(String),
    #[error("unknown algorithm '{name}'; valid names: {valid}")]
    UnknownAlgorithm { name: String, valid: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// A `d`-dimensional real feature (skill) vector. Entries are finite and
/// `d >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "feature vector must have at least one dimension".into(),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("feature value {v}")));
        }
        Ok(Self(values))
    }

    /// Zero vector of dimension `d` (the empty-team centroid convention).
    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

/// The input pool: `n` candidates, each with an opaque unique id and a
/// feature vector of common dimensionality `d`.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    ids: Vec<String>,
    vectors: Vec<FeatureVector>,
}

impl CandidatePool {
    pub fn new(candidates: Vec<(String, FeatureVector)>) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::InvalidInput("pool must contain at least one candidate".into()));
        }
        let d = candidates[0].1.dim();
        let mut seen = std::collections::HashSet::new();
        for (id, v) in &candidates {
            if v.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.dim() });
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate candidate id '{id}'")));
            }
        }
        let (ids, vectors) = candidates.into_iter().unzip();
        Ok(Self { ids, vectors })
    }

    /// Convenience constructor with ids `c000..`, mostly for tests and
    /// generated data.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.len().to_string().len().max(3);
        Self::new(
            rows.into_iter()
                .enumerate()
                .map(|(i, r)| Ok((format!("c{i:0width$}"), FeatureVector::new(r)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn vector(&self, index: usize) -> &FeatureVector {
        &self.vectors[index]
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    /// Sub-pool containing the given candidate indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<CandidatePool> {
        CandidatePool::new(
            indices
                .iter()
                .map(|&i| (self.ids[i].clone(), self.vectors[i].clone()))
                .collect(),
        )
    }
}

/// The `k` target vectors guiding the partitioning.
#[derive(Debug, Clone)]
pub struct TargetSet {
    targets: Vec<FeatureVector>,
}

impl TargetSet {
    pub fn new(targets: Vec<FeatureVector>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidInput("target set must contain at least one target".into()));
        }
        let d = targets[0].dim();
        for t in &targets {
            if t.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: t.dim() });
            }
        }
        Ok(Self { targets })
    }

    pub fn k(&self) -> usize {
        self.targets.len()
    }

    pub fn dim(&self) -> usize {
        self.targets[0].dim()
    }

    pub fn target(&self, i: usize) -> &FeatureVector {
        &self.targets[i]
    }

    pub fn targets(&self) -> &[FeatureVector] {
        &self.targets
    }
}

/// Where a candidate ended up: one of the `k` teams (0-based internally) or
/// the removed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assignment {
    Team(usize),
    Removed,
}

/// An assignment of every pool candidate to a team in `0..k` or to the
/// removed set. Indexed by pool position.
#[derive(Debug, Clone, PartialEq)]
pub struct Partitioning {
    k: usize,
    slots: Vec<Assignment>,
}

impl Partitioning {
    pub fn new(k: usize, slots: Vec<Assignment>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPartitioning("k must be at least 1".into()));
        }
        for (i, s) in slots.iter().enumerate() {
            if let Assignment::Team(t) = s {
                if *t >= k {
                    return Err(Error::InvalidPartitioning(format!(
                        "candidate {i} assigned to team {t} but k = {k}"
                    )));
                }
            }
        }
        Ok(Self { k, slots })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, index: usize) -> Assignment {
        self.slots[index]
    }

    pub fn slots(&self) -> &[Assignment] {
        &self.slots
    }

    /// Candidate indices of team `team`, ascending.
    pub fn team_members(&self, team: usize) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| (*s == Assignment::Team(team)).then_some(i))
            .collect()
    }

    /// Removed candidate indices, ascending.
    pub fn removed(&self) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| (*s == Assignment::Removed).then_some(i))
            .collect()
    }

    pub fn team_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for s in &self.slots {
            if let Assignment::Team(t) = s {
                sizes[*t] += 1;
            }
        }
        sizes
    }

    /// Checks that this partitioning covers `pool` exactly (one slot per
    /// candidate) and, when `budget` is given, that exactly that many
    /// candidates are removed.
    pub fn validate(&self, pool: &CandidatePool, budget: Option<usize>) -> Result<()> {
        if self.slots.len() != pool.len() {
            return Err(Error::InvalidPartitioning(format!(
                "partitioning covers {} candidates, pool has {}",
                self.slots.len(),
                pool.len()
            )));
        }
        if let Some(l) = budget {
            let removed = self.removed().len();
            if removed != l {
                return Err(Error::InvalidPartitioning(format!(
                    "expected {l} removed candidates, found {removed}"
                )));
            }
        }
        Ok(())
    }

    /// Relabel teams: `perm[old_team] = new_team`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::InvalidPartitioning(format!(
                "permutation has {} entries, k = {}",
                perm.len(),
                self.k
            )));
        }
        let slots = self
            .slots
            .iter()
            .map(|s| match s {
                Assignment::Team(t) => Assignment::Team(perm[*t]),
                Assignment::Removed => Assignment::Removed,
            })
            .collect();
        Self::new(self.k, slots)
    }
}

/// Outcome of one solver run: the partitioning plus the cost breakdown and
/// bookkeeping needed to reproduce and audit it.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub partitioning: Partitioning,
    pub cost: f64,
    pub per_team_cost: Vec<f64>,
    pub centroids: Vec<FeatureVector>,
    pub removed_ids: Vec<String>,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub seed: u64,
}
