//! The max-benefit heuristic for characteristic partitioning: a one-pass
//! benefit-greedy assignment followed by reassignment sweeps that move a
//! point whenever the destination's gain outweighs the source team's loss.


use crate::types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, TargetSet,
};

/// Stopping parameters for the reassignment sweeps.
#[derive(Debug, Clone, Copy)]
pub struct MaxBenefitConfig {
    pub max_sweeps: usize,
    /// Stop when a full pass improves the cost by less than this.
    pub epsilon: f64,
}

impl Default for MaxBenefitConfig {
    fn default() -> Self {
        Self { max_sweeps: 100, epsilon: 1e-9 }
    }
}

/// Working state of the heuristic: the current assignment plus per-team
/// coordinate sums and sizes, maintained incrementally as points move.
#[derive(Debug, Clone)]
pub struct PartitionState {
    k: usize,
    teams: Vec<usize>,
    pub team_sums: Vec<Vec<f64>>,
    pub team_sizes: Vec<usize>,
    pub sweep_count: usize,
}

impl PartitionState {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn team_of(&self, candidate: usize) -> usize {
        self.teams[candidate]
    }

    pub fn partitioning(&self) -> Partitioning {
        Partitioning::new(self.k, self.teams.iter().map(|&t| Assignment::Team(t)).collect())
            .expect("state teams are in range")
    }

    /// Rebuilds sums and sizes from scratch in candidate order, clamping any
    /// incremental drift. Called at every sweep boundary.
    fn refresh_sums(&mut self, pool: &CandidatePool) {
        let d = pool.dim();
        self.team_sums = vec![vec![0.0; d]; self.k];
        self.team_sizes = vec![0; self.k];
        for (i, &t) in self.teams.iter().enumerate() {
            for (s, v) in self.team_sums[t].iter_mut().zip(pool.vector(i).values()) {
                *s += v;
            }
            self.team_sizes[t] += 1;
        }
    }

    /// `D(t, mean(C_j))` with the zero-vector convention for empty teams.
    fn team_distance(&self, team: usize, target: &FeatureVector) -> f64 {
        distance_of(&self.team_sums[team], self.team_sizes[team], target)
    }

    /// `D(t, mean(C_j u {r}))`.
    fn distance_with(&self, team: usize, point: &FeatureVector, target: &FeatureVector) -> f64 {
        let denom = (self.team_sizes[team] + 1) as f64;
        let sum = &self.team_sums[team];
        let mut acc = 0.0;
        for ((s, p), t) in sum.iter().zip(point.values()).zip(target.values()) {
            let c = (s + p) / denom;
            acc += (c - t) * (c - t);
        }
        acc
    }

    /// `D(t, mean(C_h \ {r}))`; the team must currently contain the point.
    fn distance_without(&self, team: usize, point: &FeatureVector, target: &FeatureVector) -> f64 {
        let size = self.team_sizes[team];
        debug_assert!(size >= 1);
        let sum = &self.team_sums[team];
        if size == 1 {
            return target.values().iter().map(|t| t * t).sum();
        }
        let denom = (size - 1) as f64;
        let mut acc = 0.0;
        for ((s, p), t) in sum.iter().zip(point.values()).zip(target.values()) {
            let c = (s - p) / denom;
            acc += (c - t) * (c - t);
        }
        acc
    }

    fn move_point(&mut self, candidate: usize, point: &FeatureVector, to: usize) {
        let from = self.teams[candidate];
        for (s, v) in self.team_sums[from].iter_mut().zip(point.values()) {
            *s -= v;
        }
        self.team_sizes[from] -= 1;
        for (s, v) in self.team_sums[to].iter_mut().zip(point.values()) {
            *s += v;
        }
        self.team_sizes[to] += 1;
        self.teams[candidate] = to;
    }

    /// Objective value from the maintained sums.
    fn cost(&self, targets: &TargetSet) -> f64 {
        (0..self.k).map(|t| self.team_distance(t, targets.target(t))).sum()
    }
}

fn distance_of(sum: &[f64], size: usize, target: &FeatureVector) -> f64 {
    if size == 0 {
        return target.values().iter().map(|t| t * t).sum();
    }
    let denom = size as f64;
    let mut acc = 0.0;
    for (s, t) in sum.iter().zip(target.values()) {
        let c = s / denom;
        acc += (c - t) * (c - t);
    }
    acc
}

fn check_dims(pool: &CandidatePool, targets: &TargetSet) -> Result<()> {
    if targets.dim() != pool.dim() {
        return Err(Error::DimensionMismatch { expected: pool.dim(), got: targets.dim() });
    }
    Ok(())
}

/// One pass over the candidates in id order; each point joins the team whose
/// mean it improves the most. Gain ties prefer an empty destination (filling
/// all k teams when possible), then the smallest team index.
pub fn initial_assign(pool: &CandidatePool, targets: &TargetSet) -> Result<PartitionState> {
    check_dims(pool, targets)?;
    let k = targets.k();
    let d = pool.dim();
    let mut state = PartitionState {
        k,
        teams: Vec::with_capacity(pool.len()),
        team_sums: vec![vec![0.0; d]; k],
        team_sizes: vec![0; k],
        sweep_count: 0,
    };
    for i in 0..pool.len() {
        let point = pool.vector(i);
        let mut best_team = 0usize;
        let mut best_gain = f64::NEG_INFINITY;
        let mut best_empty = false;
        for j in 0..k {
            let gain =
                state.team_distance(j, targets.target(j)) - state.distance_with(j, point, targets.target(j));
            let empty = state.team_sizes[j] == 0;
            let better = gain > best_gain || (gain == best_gain && empty && !best_empty);
            if better {
                best_gain = gain;
                best_team = j;
                best_empty = empty;
            }
        }
        for (s, v) in state.team_sums[best_team].iter_mut().zip(point.values()) {
            *s += v;
        }
        state.team_sizes[best_team] += 1;
        state.teams.push(best_team);
    }
    Ok(state)
}

/// Full reassignment passes until no point moves, a pass improves the cost by
/// less than `epsilon`, or `max_sweeps` is reached. A move is accepted only
/// when the destination gain strictly exceeds the source loss (so the cost
/// strictly decreases), and a point never leaves a singleton team.
pub fn reassign_sweeps(
    mut state: PartitionState,
    pool: &CandidatePool,
    targets: &TargetSet,
    max_sweeps: usize,
    epsilon: f64,
) -> Result<PartitionState> {
    check_dims(pool, targets)?;
    if state.teams.len() != pool.len() {
        return Err(Error::InvalidPartitioning(format!(
            "state covers {} candidates, pool has {}",
            state.teams.len(),
            pool.len()
        )));
    }
    let k = state.k;
    for _ in 0..max_sweeps {
        state.refresh_sums(pool);
        let cost_before = state.cost(targets);
        let mut moved = false;
        for i in 0..pool.len() {
            let h = state.teams[i];
            if state.team_sizes[h] <= 1 {
                continue; // keep every team nonempty
            }
            let point = pool.vector(i);
            let loss = state.distance_without(h, point, targets.target(h))
                - state.team_distance(h, targets.target(h));
            let mut best_team = h;
            let mut best_gain = f64::NEG_INFINITY;
            for j in 0..k {
                if j == h {
                    continue;
                }
                let gain = state.team_distance(j, targets.target(j))
                    - state.distance_with(j, point, targets.target(j));
                if gain > best_gain {
                    best_gain = gain;
                    best_team = j;
                }
            }
            if best_team != h && best_gain - loss > 0.0 {
                state.move_point(i, point, best_team);
                moved = true;
            }
        }
        state.sweep_count += 1;
        let cost_after = state.cost(targets);
        if !moved || cost_before - cost_after < epsilon {
            break;
        }
    }
    state.refresh_sums(pool);
    Ok(state)
}

/// The full heuristic: benefit-greedy initial assignment, then reassignment
/// sweeps. Deterministic for fixed input.
pub fn max_benefit_partition(
    pool: &CandidatePool,
    targets: &TargetSet,
    config: &MaxBenefitConfig,
) -> Result<PartitionState> {
    let state = initial_assign(pool, targets)?;
    reassign_sweeps(state, pool, targets, config.max_sweeps, config.epsilon)
}
