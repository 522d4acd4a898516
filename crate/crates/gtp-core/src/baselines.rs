//! The comparison algorithms: random assignment, three k-means variants
//! (plain, target-seeded, and k-means with simultaneous outlier removal),
//! nearest-neighbor pre-filtering, and the best-team-first family. All are
//! pure functions of their inputs and an explicit seed.

use crate::cis::{cvx_select, greedy_remove, CisMethod};
use crate::cost::sq_dist;
use crate::guided::{allocate_removals_dp, build_benefit_matrix};
use crate::hungarian::hungarian_match;
use crate::rng::SeededRng;
use crate::types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, TargetSet,
};

/// How k-means chooses its initial centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMeansInit {
    /// Weighted farthest-point seeding: the first center is uniform, each
    /// next one is drawn with probability proportional to the squared
    /// distance to the nearest chosen center.
    PlusPlus,
    /// Start the centers at the target vectors.
    Targets,
}

/// Outcome of a k-means style run.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub centers: Vec<FeatureVector>,
    pub partitioning: Partitioning,
    pub iterations: usize,
    /// Clustering objective (summed squared distance of non-outlier points
    /// to their centers) after each assignment step.
    pub objective_trace: Vec<f64>,
}

const LLOYD_MAX_ITER: usize = 300;
const LLOYD_TOL: f64 = 1e-9;

fn plus_plus_centers(pool: &CandidatePool, k: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    let n = pool.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(pool.vector(rng.below(n)).values().to_vec());
    let mut dist: Vec<f64> = (0..n)
        .map(|i| sq_dist(pool.vector(i).values(), &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let idx = if total > 0.0 {
            let mut r = rng.uniform() * total;
            let mut chosen = n - 1;
            for (i, &w) in dist.iter().enumerate() {
                if r < w {
                    chosen = i;
                    break;
                }
                r -= w;
            }
            chosen
        } else {
            rng.below(n)
        };
        centers.push(pool.vector(idx).values().to_vec());
        for (i, d) in dist.iter_mut().enumerate() {
            let nd = sq_dist(pool.vector(i).values(), centers.last().unwrap());
            if nd < *d {
                *d = nd;
            }
        }
    }
    centers
}

/// Lloyd iterations with an optional per-iteration outlier budget: each pass
/// ranks every point by the distance to its nearest center, marks the
/// `outliers` farthest as removed for that pass (ties: smallest index), and
/// updates centers from the rest. `outliers = 0` is plain k-means.
fn lloyd(
    pool: &CandidatePool,
    k: usize,
    outliers: usize,
    mut centers: Vec<Vec<f64>>,
) -> KMeansResult {
    let n = pool.len();
    let d = pool.dim();
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut iterations = 0;
    let mut trace = Vec::new();
    loop {
        // nearest center for every point
        let mut nearest = vec![0usize; n];
        let mut nearest_d = vec![f64::INFINITY; n];
        for i in 0..n {
            for (c, center) in centers.iter().enumerate() {
                let dd = sq_dist(pool.vector(i).values(), center);
                if dd < nearest_d[i] {
                    nearest_d[i] = dd;
                    nearest[i] = c;
                }
            }
        }
        // mark the farthest `outliers` points as removed this pass
        let mut removed = vec![false; n];
        if outliers > 0 {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                nearest_d[b].partial_cmp(&nearest_d[a]).expect("finite distances").then(a.cmp(&b))
            });
            for &i in order.iter().take(outliers) {
                removed[i] = true;
            }
        }
        for i in 0..n {
            labels[i] = if removed[i] { None } else { Some(nearest[i]) };
        }
        // empty-cluster repair: reseed with the point farthest from its
        // center, stealing only from clusters that keep at least one member
        let mut sizes = vec![0usize; k];
        for l in labels.iter().flatten() {
            sizes[*l] += 1;
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far = (f64::NEG_INFINITY, usize::MAX);
            for i in 0..n {
                if let Some(l) = labels[i] {
                    if sizes[l] >= 2 && nearest_d[i] > far.0 {
                        far = (nearest_d[i], i);
                    }
                }
            }
            if far.1 != usize::MAX {
                sizes[labels[far.1].unwrap()] -= 1;
                labels[far.1] = Some(c);
                sizes[c] = 1;
            }
        }
        trace.push(
            (0..n)
                .filter_map(|i| labels[i].map(|l| sq_dist(pool.vector(i).values(), &centers[l])))
                .sum(),
        );
        // recompute centers; an empty cluster keeps its previous center
        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            if let Some(l) = labels[i] {
                for (s, v) in sums[l].iter_mut().zip(pool.vector(i).values()) {
                    *s += v;
                }
                counts[l] += 1;
            }
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            for s in &mut sums[c] {
                *s /= counts[c] as f64;
            }
            movement = movement.max(sq_dist(&sums[c], &centers[c]).sqrt());
            centers[c] = sums[c].clone();
        }
        iterations += 1;
        if movement <= LLOYD_TOL || iterations >= LLOYD_MAX_ITER {
            break;
        }
    }
    let slots = labels
        .iter()
        .map(|l| match l {
            Some(t) => Assignment::Team(*t),
            None => Assignment::Removed,
        })
        .collect();
    KMeansResult {
        centers: centers
            .into_iter()
            .map(|c| FeatureVector::new(c).expect("centers remain finite"))
            .collect(),
        partitioning: Partitioning::new(k, slots).expect("labels are in range"),
        iterations,
        objective_trace: trace,
    }
}

fn init_centers(
    pool: &CandidatePool,
    k: usize,
    seed: u64,
    init: KMeansInit,
    targets: Option<&TargetSet>,
) -> Result<Vec<Vec<f64>>> {
    if k > pool.len() {
        return Err(Error::Infeasible(format!("k = {k} clusters but only {} points", pool.len())));
    }
    match init {
        KMeansInit::PlusPlus => {
            Ok(plus_plus_centers(pool, k, &mut SeededRng::new(seed)))
        }
        KMeansInit::Targets => {
            let t = targets.ok_or_else(|| {
                Error::InvalidInput("target-seeded k-means needs a target set".into())
            })?;
            if t.dim() != pool.dim() {
                return Err(Error::DimensionMismatch { expected: pool.dim(), got: t.dim() });
            }
            Ok(t.targets().iter().map(|v| v.values().to_vec()).collect())
        }
    }
}

/// Plain or target-seeded k-means (Lloyd) to a local optimum.
pub fn kmeans_partition(
    pool: &CandidatePool,
    k: usize,
    seed: u64,
    init: KMeansInit,
    targets: Option<&TargetSet>,
) -> Result<KMeansResult> {
    let centers = init_centers(pool, k, seed, init, targets)?;
    Ok(lloyd(pool, k, 0, centers))
}

/// k-means with simultaneous outlier discovery: every iteration the `l`
/// points farthest from their nearest centers sit out, and the final pass's
/// outliers become the removed set. With `l = 0` this is exactly plain
/// k-means.
pub fn kmeans_minus_minus(
    pool: &CandidatePool,
    k: usize,
    l: usize,
    seed: u64,
) -> Result<KMeansResult> {
    if k > pool.len().saturating_sub(l) {
        return Err(Error::Infeasible(format!(
            "k = {k} clusters but only {} points after removing {l}",
            pool.len().saturating_sub(l)
        )));
    }
    let centers = init_centers(pool, k, seed, KMeansInit::PlusPlus, None)?;
    Ok(lloyd(pool, k, l, centers))
}

/// Removes the `l` points with the largest nearest-neighbor distance (ties:
/// smallest index), then runs plain k-means on the remainder.
pub fn knn_then_kmeans(
    pool: &CandidatePool,
    k: usize,
    l: usize,
    seed: u64,
) -> Result<KMeansResult> {
    let n = pool.len();
    if n < 2 {
        return Err(Error::InvalidInput("nearest-neighbor filtering needs at least 2 points".into()));
    }
    if k > n.saturating_sub(l) {
        return Err(Error::Infeasible(format!(
            "k = {k} clusters but only {} points after removing {l}",
            n.saturating_sub(l)
        )));
    }
    let mut nn = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = sq_dist(pool.vector(i).values(), pool.vector(j).values());
                if d < nn[i] {
                    nn[i] = d;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| nn[b].partial_cmp(&nn[a]).expect("finite distances").then(a.cmp(&b)));
    let mut removed = vec![false; n];
    for &i in order.iter().take(l) {
        removed[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    let sub = pool.subset(&kept)?;
    let result = kmeans_partition(&sub, k, seed, KMeansInit::PlusPlus, None)?;
    let mut slots = vec![Assignment::Removed; n];
    for (local, &global) in kept.iter().enumerate() {
        slots[global] = result.partitioning.slot(local);
    }
    Ok(KMeansResult {
        centers: result.centers,
        partitioning: Partitioning::new(k, slots)?,
        iterations: result.iterations,
        objective_trace: result.objective_trace,
    })
}

/// Uniform random team assignment from the seeded generator. The caller is
/// expected to run [`post_pipeline`] afterwards, like the other
/// cluster-first baselines.
pub fn random_partition(pool: &CandidatePool, k: usize, seed: u64) -> Result<Partitioning> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let mut rng = SeededRng::new(seed);
    let slots = (0..pool.len()).map(|_| Assignment::Team(rng.below(k))).collect();
    Partitioning::new(k, slots)
}

/// Best-team-first: walks the targets in order and extracts a team of the
/// planned size from the remaining pool with the chosen CIS solver; the `l`
/// points left over at the end are the removed set. Team sizes are
/// `(n - l) / k`, with the remainder spread over the earliest teams.
pub fn btf(
    pool: &CandidatePool,
    targets: &TargetSet,
    l: usize,
    method: CisMethod,
) -> Result<Partitioning> {
    let n = pool.len();
    let k = targets.k();
    if targets.dim() != pool.dim() {
        return Err(Error::DimensionMismatch { expected: pool.dim(), got: targets.dim() });
    }
    if n < l || n - l < k {
        return Err(Error::Infeasible(format!(
            "cannot form {k} nonempty teams from {n} points with {l} removals"
        )));
    }
    let assigned = n - l;
    let base = assigned / k;
    let remainder = assigned % k;
    let mut slots = vec![Assignment::Removed; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    for team in 0..k {
        let size = base + usize::from(team < remainder);
        let points: Vec<FeatureVector> =
            remaining.iter().map(|&i| pool.vector(i).clone()).collect();
        let drop = points.len() - size;
        let kept_local: Vec<usize> = match method {
            CisMethod::Cvx => cvx_select(&points, targets.target(team), drop)?,
            CisMethod::Greedy => {
                let removed = greedy_remove(&points, targets.target(team), drop)?;
                let mut removed_iter = removed.iter().peekable();
                (0..points.len())
                    .filter(|i| {
                        if removed_iter.peek() == Some(&i) {
                            removed_iter.next();
                            false
                        } else {
                            true
                        }
                    })
                    .collect()
            }
        };
        let mut taken = vec![false; remaining.len()];
        for &local in &kept_local {
            slots[remaining[local]] = Assignment::Team(team);
            taken[local] = true;
        }
        remaining = remaining
            .iter()
            .enumerate()
            .filter_map(|(local, &global)| (!taken[local]).then_some(global))
            .collect();
    }
    Partitioning::new(k, slots)
}

/// The shared tail of the cluster-first baselines: relabel teams by optimal
/// centroid-to-target matching, then remove `l` points with the benefit
/// matrix and removal-budget dynamic program. `l = 0` relabels only.
pub fn post_pipeline(
    part: &Partitioning,
    pool: &CandidatePool,
    targets: &TargetSet,
    l: usize,
    method: CisMethod,
) -> Result<Partitioning> {
    let relabeled = relabel_to_targets(part, pool, targets)?;
    if l == 0 {
        return Ok(relabeled);
    }
    let member_lists: Vec<Vec<usize>> =
        (0..targets.k()).map(|t| relabeled.team_members(t)).collect();
    let teams: Vec<Vec<FeatureVector>> = member_lists
        .iter()
        .map(|members| members.iter().map(|&i| pool.vector(i).clone()).collect())
        .collect();
    let matrix = build_benefit_matrix(&teams, targets, l, method)?;
    let allocation = allocate_removals_dp(&matrix, l)?;
    let mut slots = relabeled.slots().to_vec();
    for (team, &q) in allocation.per_team.iter().enumerate() {
        for &local in &matrix.removal_sets[team][q] {
            slots[member_lists[team][local]] = Assignment::Removed;
        }
    }
    Partitioning::new(relabeled.k(), slots)
}

/// Relabels teams so each is matched to the target minimizing the summed
/// centroid-to-target distance (empty teams use the zero-vector centroid).
pub fn relabel_to_targets(
    part: &Partitioning,
    pool: &CandidatePool,
    targets: &TargetSet,
) -> Result<Partitioning> {
    let cents = crate::cost::centroids(pool, part)?;
    let matching = hungarian_match(&cents, targets)?;
    part.relabel(&matching.perm)
}
