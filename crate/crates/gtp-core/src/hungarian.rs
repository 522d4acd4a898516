//! Exact minimum-cost matching of discovered team centroids to targets: the
//! Hungarian algorithm with row/column potentials, O(k^3) for the square
//! matrices this crate needs.

use crate::cost::sq_dist;
use crate::types::{Error, FeatureVector, Result, TargetSet};

/// A bijection from team index to target index with the total matched cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub perm: Vec<usize>,
    pub total: f64,
}

/// Minimum-cost perfect assignment on a square cost matrix. Returns the
/// column matched to each row and the summed cost of the matched cells.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = cost.len();
    if n == 0 {
        return Err(Error::InvalidInput("cost matrix must be nonempty".into()));
    }
    for row in cost {
        if row.len() != n {
            return Err(Error::InvalidInput(format!(
                "cost matrix must be square: row has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("cost entry {v}")));
        }
    }
    // potentials over rows (u) and columns (v); p[j] = row matched to column
    // j, with index 0 as the sentinel. 1-based internally.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            perm[p[j] - 1] = j - 1;
        }
    }
    // total from the matching itself, summed in row order
    let total = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok((perm, total))
}

/// Matches `k` centroids to `k` targets minimizing the summed squared
/// distances.
pub fn hungarian_match(centroids: &[FeatureVector], targets: &TargetSet) -> Result<Matching> {
    let k = targets.k();
    if centroids.len() != k {
        return Err(Error::InvalidInput(format!(
            "{} centroids but {k} targets",
            centroids.len()
        )));
    }
    let d = targets.dim();
    for c in centroids {
        if c.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: c.dim() });
        }
    }
    let cost: Vec<Vec<f64>> = centroids
        .iter()
        .map(|c| targets.targets().iter().map(|t| sq_dist(c.values(), t.values())).collect())
        .collect();
    let (perm, total) = min_cost_assignment(&cost)?;
    Ok(Matching { perm, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn brute_force_min(cost: &[Vec<f64>]) -> f64 {
        let n = cost.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permute(&mut perm, 0, cost, &mut best);
        return best;

        fn permute(perm: &mut Vec<usize>, at: usize, cost: &[Vec<f64>], best: &mut f64) {
            if at == perm.len() {
                let total: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
                if total < *best {
                    *best = total;
                }
                return;
            }
            for i in at..perm.len() {
                perm.swap(at, i);
                permute(perm, at + 1, cost, best);
                perm.swap(at, i);
            }
        }
    }

    #[test]
    fn identity_when_centroids_equal_targets() {
        let targets = TargetSet::new(vec![fv(&[0.0, 1.0]), fv(&[2.0, 3.0])]).unwrap();
        let cents = vec![fv(&[0.0, 1.0]), fv(&[2.0, 3.0])];
        let m = hungarian_match(&cents, &targets).unwrap();
        assert_eq!(m.perm, vec![0, 1]);
        assert_eq!(m.total, 0.0);
    }

    #[test]
    fn swapped_centroids_get_the_swap_permutation() {
        let targets = TargetSet::new(vec![fv(&[10.0]), fv(&[0.0])]).unwrap();
        let cents = vec![fv(&[0.0]), fv(&[10.0])];
        let m = hungarian_match(&cents, &targets).unwrap();
        assert_eq!(m.perm, vec![1, 0]);
        assert_eq!(m.total, 0.0);
    }

    #[test]
    fn two_by_two_tie_structure() {
        let cost = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let (perm, total) = min_cost_assignment(&cost).unwrap();
        assert_eq!(perm, vec![0, 1]);
        assert_eq!(total, 2.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(min_cost_assignment(&[]).is_err());
        assert!(min_cost_assignment(&[vec![1.0, 2.0]]).is_err());
        assert!(min_cost_assignment(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn matches_permutation_enumeration() {
        let mut seed = 11u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let k = 1 + (next() * 7.0) as usize;
            let cost: Vec<Vec<f64>> =
                (0..k).map(|_| (0..k).map(|_| next() * 10.0).collect()).collect();
            let (perm, total) = min_cost_assignment(&cost).unwrap();
            // perm is a permutation
            let mut seen = vec![false; k];
            for &j in &perm {
                assert!(!seen[j]);
                seen[j] = true;
            }
            assert_eq!(total, brute_force_min(&cost), "k = {k}");
        }
    }
}
