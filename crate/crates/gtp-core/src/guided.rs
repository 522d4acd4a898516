//! The full budgeted solver: max-benefit partitioning, per-team removal
//! benefit matrices, and a dynamic program that spreads the global removal
//! budget across teams to maximize the total benefit.

use crate::cis::{removal_benefit, CisMethod};
use crate::cost::{centroids, per_team_costs};
use crate::partition::{max_benefit_partition, MaxBenefitConfig};
use crate::timing::measure;
use crate::types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, SolveReport, TargetSet,
};

/// `B[i][q]`: best found benefit of removing `q` points from team `i`,
/// together with the removal set realizing it (team-local indices). Cells
/// beyond a team's feasible range (`q > |C_i| - 1`) are `-inf` with an empty
/// set: a team is never emptied.
#[derive(Debug, Clone)]
pub struct BenefitMatrix {
    pub benefits: Vec<Vec<f64>>,
    pub removal_sets: Vec<Vec<Vec<usize>>>,
}

impl BenefitMatrix {
    pub fn k(&self) -> usize {
        self.benefits.len()
    }

    pub fn budget(&self) -> usize {
        self.benefits.first().map_or(0, |row| row.len() - 1)
    }
}

/// How a removal budget is split across teams.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalAllocation {
    pub per_team: Vec<usize>,
    pub total_benefit: f64,
}

/// Options for [`guided_split`].
#[derive(Debug, Clone)]
pub struct GuidedSplitConfig {
    pub max_benefit: MaxBenefitConfig,
    pub cis_method: CisMethod,
    /// Re-run partition + removal until the cost stops improving. Off by
    /// default: the base algorithm is a single pass.
    pub iterate: bool,
    /// Echoed into the report; the solver itself is deterministic.
    pub seed: u64,
}

impl Default for GuidedSplitConfig {
    fn default() -> Self {
        Self {
            max_benefit: MaxBenefitConfig::default(),
            cis_method: CisMethod::Cvx,
            iterate: false,
            seed: 0,
        }
    }
}

/// Computes the benefit of removing `q` points from every team, for every
/// `q` up to `budget` (capped per team so at least one point remains). Cells
/// are independent; evaluation order never changes the result.
pub fn build_benefit_matrix(
    teams: &[Vec<FeatureVector>],
    targets: &TargetSet,
    budget: usize,
    method: CisMethod,
) -> Result<BenefitMatrix> {
    if teams.len() != targets.k() {
        return Err(Error::InvalidInput(format!(
            "{} teams but {} targets",
            teams.len(),
            targets.k()
        )));
    }
    let mut benefits = Vec::with_capacity(teams.len());
    let mut removal_sets = Vec::with_capacity(teams.len());
    for (i, team) in teams.iter().enumerate() {
        let feasible_max = budget.min(team.len().saturating_sub(1));
        let mut row = Vec::with_capacity(budget + 1);
        let mut sets = Vec::with_capacity(budget + 1);
        for q in 0..=budget {
            if q == 0 {
                // removing nothing never changes a team, empty or not
                row.push(0.0);
                sets.push(Vec::new());
            } else if q <= feasible_max {
                let (benefit, removed) = removal_benefit(team, targets.target(i), q, method)?;
                row.push(benefit);
                sets.push(removed);
            } else {
                row.push(f64::NEG_INFINITY);
                sets.push(Vec::new());
            }
        }
        benefits.push(row);
        removal_sets.push(sets);
    }
    Ok(BenefitMatrix { benefits, removal_sets })
}

/// Spreads a removal budget of exactly `budget` points across the teams so
/// the summed benefit is maximal. Ties prefer smaller removal counts for
/// lower-indexed teams (lexicographically smallest allocation).
pub fn allocate_removals_dp(matrix: &BenefitMatrix, budget: usize) -> Result<RemovalAllocation> {
    let k = matrix.k();
    if k == 0 {
        return Err(Error::InvalidInput("benefit matrix has no teams".into()));
    }
    if budget > matrix.budget() {
        return Err(Error::Infeasible(format!(
            "budget {budget} exceeds matrix budget {}",
            matrix.budget()
        )));
    }
    // suffix[i][j]: best benefit removing exactly j points from teams i..k
    let mut suffix = vec![vec![f64::NEG_INFINITY; budget + 1]; k + 1];
    suffix[k][0] = 0.0;
    for i in (0..k).rev() {
        for j in 0..=budget {
            let mut best = f64::NEG_INFINITY;
            for q in 0..=j {
                let b = matrix.benefits[i][q];
                let rest = suffix[i + 1][j - q];
                if b.is_finite() && rest.is_finite() {
                    let total = b + rest;
                    if total > best {
                        best = total;
                    }
                }
            }
            suffix[i][j] = best;
        }
    }
    if !suffix[0][budget].is_finite() {
        return Err(Error::Infeasible(format!(
            "teams are too small to remove {budget} points without emptying one"
        )));
    }
    // forward backtrack, taking the smallest q that attains the optimum
    let mut per_team = Vec::with_capacity(k);
    let mut j = budget;
    for i in 0..k {
        let mut chosen = None;
        for q in 0..=j {
            let b = matrix.benefits[i][q];
            let rest = suffix[i + 1][j - q];
            if b.is_finite() && rest.is_finite() && b + rest == suffix[i][j] {
                chosen = Some(q);
                break;
            }
        }
        let q = chosen.expect("finite table entry has a realizing split");
        per_team.push(q);
        j -= q;
    }
    debug_assert_eq!(j, 0);
    // recompute the total left-to-right from the chosen cells
    let total_benefit = per_team
        .iter()
        .enumerate()
        .map(|(i, &q)| matrix.benefits[i][q])
        .sum();
    Ok(RemovalAllocation { per_team, total_benefit })
}

/// Apply an allocation to a partitioning: mark each team's realizing removal
/// set as removed. `team_members[i]` must list team `i`'s pool indices in the
/// order the benefit matrix saw them.
fn apply_removals(
    part: &Partitioning,
    team_members: &[Vec<usize>],
    matrix: &BenefitMatrix,
    allocation: &RemovalAllocation,
) -> Result<Partitioning> {
    let mut slots = part.slots().to_vec();
    for (i, &q) in allocation.per_team.iter().enumerate() {
        for &local in &matrix.removal_sets[i][q] {
            slots[team_members[i][local]] = Assignment::Removed;
        }
    }
    Partitioning::new(part.k(), slots)
}

fn solve_once(
    pool: &CandidatePool,
    targets: &TargetSet,
    budget: usize,
    config: &GuidedSplitConfig,
) -> Result<(Partitioning, usize)> {
    let state = max_benefit_partition(pool, targets, &config.max_benefit)?;
    let part = state.partitioning();
    if budget == 0 {
        return Ok((part, state.sweep_count));
    }
    let member_lists: Vec<Vec<usize>> =
        (0..targets.k()).map(|t| part.team_members(t)).collect();
    let teams: Vec<Vec<FeatureVector>> = member_lists
        .iter()
        .map(|members| members.iter().map(|&i| pool.vector(i).clone()).collect())
        .collect();
    let matrix = build_benefit_matrix(&teams, targets, budget, config.cis_method)?;
    let allocation = allocate_removals_dp(&matrix, budget)?;
    let final_part = apply_removals(&part, &member_lists, &matrix, &allocation)?;
    Ok((final_part, state.sweep_count))
}

/// The guided team-partitioning solver: partition with the max-benefit
/// heuristic, build per-team benefit matrices with the configured CIS
/// method, allocate the removal budget with the dynamic program, and drop
/// the realizing sets. Exactly `budget` candidates end up removed and every
/// team stays nonempty.
pub fn guided_split(
    pool: &CandidatePool,
    targets: &TargetSet,
    budget: usize,
    config: &GuidedSplitConfig,
) -> Result<SolveReport> {
    let n = pool.len();
    let k = targets.k();
    if budget > n.saturating_sub(k) {
        return Err(Error::Infeasible(format!(
            "budget {budget} > n - k = {}",
            n.saturating_sub(k)
        )));
    }
    let (solved, wall_time_s) = measure(|| -> Result<(Partitioning, usize)> {
        let (mut part, mut iterations) = solve_once(pool, targets, budget, config)?;
        if config.iterate {
            let mut cost = crate::cost::partition_cost(pool, &part, targets)?;
            loop {
                let kept: Vec<usize> = (0..n)
                    .filter(|&i| part.slot(i) != Assignment::Removed)
                    .collect();
                if kept.len() == n {
                    break;
                }
                let sub = pool.subset(&kept)?;
                let (sub_part, sweeps) = solve_once(&sub, targets, 0, config)?;
                let mut slots = part.slots().to_vec();
                for (local, &global) in kept.iter().enumerate() {
                    slots[global] = sub_part.slot(local);
                }
                let candidate = Partitioning::new(k, slots)?;
                let candidate_cost = crate::cost::partition_cost(pool, &candidate, targets)?;
                if candidate_cost < cost - 1e-12 {
                    part = candidate;
                    cost = candidate_cost;
                    iterations += sweeps;
                } else {
                    break;
                }
            }
        }
        Ok((part, iterations))
    });
    let (part, iterations) = solved?;
    build_report(pool, targets, part, iterations, wall_time_s, config.seed)
}

/// Assembles a [`SolveReport`] for a finished partitioning.
pub(crate) fn build_report(
    pool: &CandidatePool,
    targets: &TargetSet,
    part: Partitioning,
    iterations: usize,
    wall_time_s: f64,
    seed: u64,
) -> Result<SolveReport> {
    let per_team_cost = per_team_costs(pool, &part, targets)?;
    let cost = per_team_cost.iter().sum();
    let cents = centroids(pool, &part)?;
    let removed_ids = part.removed().iter().map(|&i| pool.id(i).to_string()).collect();
    Ok(SolveReport {
        partitioning: part,
        cost,
        per_team_cost,
        centroids: cents,
        removed_ids,
        iterations,
        wall_time_s,
        seed,
    })
}
