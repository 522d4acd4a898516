//! Exact brute-force solvers for small instances. These are the ground truth
//! the heuristics are tested against, so size guards are hard errors: an
//! oracle either enumerates everything or refuses to run.

use crate::cost::sq_dist;
use crate::types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, TargetSet,
};

/// Result of an exhaustive search: the exact optimum, the witness realizing
/// it, and how many candidates were examined.
#[derive(Debug, Clone)]
pub struct OracleResult<W> {
    pub optimum: f64,
    pub witness: W,
    pub enumerated: u64,
}

/// Both answers to the partitioning problem, which does not say whether
/// empty teams are legal: the unrestricted optimum (empty teams allowed,
/// charged against the zero vector) and the optimum over all-nonempty
/// assignments (absent when k > n).
#[derive(Debug, Clone)]
pub struct CpOracle {
    pub unrestricted: OracleResult<Partitioning>,
    pub nonempty: Option<OracleResult<Partitioning>>,
}

/// A characteristic-item-selection instance produced by a reduction.
#[derive(Debug, Clone)]
pub struct CisInstance {
    pub pool: CandidatePool,
    pub target: FeatureVector,
    pub budget: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn pow_u128(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(u32::try_from(exp).ok()?)
}

/// Visits all `l`-subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, l: usize, mut visit: impl FnMut(&[usize])) {
    if l == 0 {
        visit(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..l).collect();
    loop {
        visit(&idx);
        // advance to the next combination
        let mut i = l;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - l {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..l {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact minimum of `D(mean(pool \ S), target)` over all `l`-subsets `S`.
/// Guard: `C(n, l) <= 1e6`.
pub fn brute_cis(
    pool: &CandidatePool,
    target: &FeatureVector,
    l: usize,
) -> Result<OracleResult<Vec<usize>>> {
    let n = pool.len();
    if l >= n {
        return Err(Error::BudgetOutOfRange { budget: l, n });
    }
    if target.dim() != pool.dim() {
        return Err(Error::DimensionMismatch { expected: pool.dim(), got: target.dim() });
    }
    let combos = binomial(n, l);
    if combos > 1_000_000 {
        return Err(Error::SizeGuard(format!("C({n}, {l}) = {combos} > 1e6")));
    }
    let d = pool.dim();
    let keep = (n - l) as f64;
    let mut best = f64::INFINITY;
    let mut witness: Vec<usize> = Vec::new();
    let mut enumerated = 0u64;
    for_each_subset(n, l, |removed| {
        enumerated += 1;
        // kept-point sum, ascending index order
        let mut sum = vec![0.0; d];
        let mut r = 0usize;
        for i in 0..n {
            if r < removed.len() && removed[r] == i {
                r += 1;
                continue;
            }
            for (s, v) in sum.iter_mut().zip(pool.vector(i).values()) {
                *s += v;
            }
        }
        for s in &mut sum {
            *s /= keep;
        }
        let obj = sq_dist(&sum, target.values());
        if obj < best {
            best = obj;
            witness = removed.to_vec();
        }
    });
    Ok(OracleResult { optimum: best, witness, enumerated })
}

fn assignment_cost(
    pool: &CandidatePool,
    targets: &TargetSet,
    members: &[usize],
    teams: &[usize],
) -> (f64, Vec<usize>) {
    let d = pool.dim();
    let k = targets.k();
    let mut sums = vec![vec![0.0; d]; k];
    let mut sizes = vec![0usize; k];
    for (&i, &t) in members.iter().zip(teams) {
        for (s, v) in sums[t].iter_mut().zip(pool.vector(i).values()) {
            *s += v;
        }
        sizes[t] += 1;
    }
    let mut cost = 0.0;
    for t in 0..k {
        if sizes[t] > 0 {
            for s in &mut sums[t] {
                *s /= sizes[t] as f64;
            }
        }
        cost += sq_dist(&sums[t], targets.target(t).values());
    }
    (cost, sizes)
}

fn enumerate_assignments(
    pool: &CandidatePool,
    targets: &TargetSet,
    members: &[usize],
) -> (OracleResult<Vec<usize>>, Option<(f64, Vec<usize>)>, u64) {
    let k = targets.k();
    let m = members.len();
    let mut teams = vec![0usize; m];
    let mut best = f64::INFINITY;
    let mut best_teams = teams.clone();
    let mut best_nonempty: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let (cost, sizes) = assignment_cost(pool, targets, members, &teams);
        if cost < best {
            best = cost;
            best_teams = teams.clone();
        }
        if sizes.iter().all(|&s| s > 0) {
            match &best_nonempty {
                Some((c, _)) if *c <= cost => {}
                _ => best_nonempty = Some((cost, teams.clone())),
            }
        }
        // next base-k counter value
        let mut pos = 0;
        loop {
            if pos == m {
                return (
                    OracleResult { optimum: best, witness: best_teams, enumerated },
                    best_nonempty,
                    enumerated,
                );
            }
            teams[pos] += 1;
            if teams[pos] < k {
                break;
            }
            teams[pos] = 0;
            pos += 1;
        }
    }
}

fn to_partitioning(
    n: usize,
    k: usize,
    members: &[usize],
    teams: &[usize],
    removed: &[usize],
) -> Partitioning {
    let mut slots = vec![Assignment::Removed; n];
    for (&i, &t) in members.iter().zip(teams) {
        slots[i] = Assignment::Team(t);
    }
    debug_assert_eq!(members.len() + removed.len(), n);
    Partitioning::new(k, slots).expect("oracle assignment is valid")
}

/// Exact minimum of the partitioning cost over all `k^n` assignments.
/// Reports both the unrestricted optimum (empty teams charged against the
/// zero vector) and the all-nonempty optimum. Guard: `k^n <= 1e7`.
pub fn brute_cp(pool: &CandidatePool, targets: &TargetSet) -> Result<CpOracle> {
    let n = pool.len();
    let k = targets.k();
    if targets.dim() != pool.dim() {
        return Err(Error::DimensionMismatch { expected: pool.dim(), got: targets.dim() });
    }
    match pow_u128(k, n) {
        Some(total) if total <= 10_000_000 => {}
        _ => return Err(Error::SizeGuard(format!("k^n = {k}^{n} > 1e7"))),
    }
    let members: Vec<usize> = (0..n).collect();
    let (res, nonempty, _) = enumerate_assignments(pool, targets, &members);
    Ok(CpOracle {
        unrestricted: OracleResult {
            optimum: res.optimum,
            witness: to_partitioning(n, k, &members, &res.witness, &[]),
            enumerated: res.enumerated,
        },
        nonempty: nonempty.map(|(cost, teams)| OracleResult {
            optimum: cost,
            witness: to_partitioning(n, k, &members, &teams, &[]),
            enumerated: res.enumerated,
        }),
    })
}

/// Exact minimum over all removal sets of size `l` crossed with all team
/// assignments of the remaining points. Guard: `C(n,l) * k^(n-l) <= 1e7`.
pub fn brute_gtp(
    pool: &CandidatePool,
    targets: &TargetSet,
    l: usize,
) -> Result<OracleResult<Partitioning>> {
    let n = pool.len();
    let k = targets.k();
    if l >= n {
        return Err(Error::BudgetOutOfRange { budget: l, n });
    }
    if targets.dim() != pool.dim() {
        return Err(Error::DimensionMismatch { expected: pool.dim(), got: targets.dim() });
    }
    let total = match pow_u128(k, n - l) {
        Some(p) => binomial(n, l).checked_mul(p),
        None => None,
    };
    match total {
        Some(t) if t <= 10_000_000 => {}
        _ => {
            return Err(Error::SizeGuard(format!(
                "C({n},{l}) * {k}^{} exceeds 1e7",
                n - l
            )))
        }
    }
    let mut best = f64::INFINITY;
    let mut best_part: Option<Partitioning> = None;
    let mut enumerated = 0u64;
    for_each_subset(n, l, |removed| {
        let members: Vec<usize> =
            (0..n).filter(|i| !removed.contains(i)).collect();
        let (res, _, count) = enumerate_assignments(pool, targets, &members);
        enumerated += count;
        if res.optimum < best {
            best = res.optimum;
            best_part = Some(to_partitioning(n, k, &members, &res.witness, removed));
        }
    });
    Ok(OracleResult {
        optimum: best,
        witness: best_part.expect("at least one removal set exists"),
        enumerated,
    })
}

/// Translate a subset-sum question ("does a `j`-subset of `U` sum to `J`?")
/// into a one-dimensional CIS instance whose oracle optimum is zero exactly
/// when the answer is yes: keep `j` points whose mean is `J / j`.
pub fn subset_sum_to_cis(universe: &[i64], j: usize, target_sum: i64) -> Result<CisInstance> {
    let n = universe.len();
    if j == 0 || j > n {
        return Err(Error::InvalidInput(format!("subset size {j} out of range for {n} numbers")));
    }
    let budget = n - j;
    let pool = CandidatePool::from_rows(universe.iter().map(|&x| vec![x as f64]).collect())?;
    let target = FeatureVector::new(vec![target_sum as f64 / (n - budget) as f64])?;
    Ok(CisInstance { pool, target, budget })
}
