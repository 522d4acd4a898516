//! Characteristic-item selection: choose `l` points to drop so the mean of
//! the remainder lands near a target.
//!
//! Two solvers are provided. [`greedy_remove`] peels off one point at a time.
//! [`cvx_select`] relaxes the binary selection indicators to `[0, 1]`, solves
//! the resulting convex QP by projected gradient descent, and keeps the
//! `n - l` largest entries.

use crate::cost::sq_dist;
use crate::types::{Error, FeatureVector, Result};

/// Which CIS solver backs an operation that needs one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CisMethod {
    Cvx,
    Greedy,
}

impl std::str::FromStr for CisMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cvx" => Ok(CisMethod::Cvx),
            "greedy" => Ok(CisMethod::Greedy),
            other => Err(Error::InvalidInput(format!(
                "unknown CIS method '{other}' (expected 'cvx' or 'greedy')"
            ))),
        }
    }
}

/// Stationarity tolerance on the projected-gradient norm.
pub const DEFAULT_QP_TOL: f64 = 1e-7;
/// Iteration cap for the projected-gradient solver.
pub const DEFAULT_QP_MAX_ITER: usize = 5000;

/// Solution of the relaxed selection QP.
#[derive(Debug, Clone)]
pub struct RelaxedSolution {
    /// Fractional keep indicators, one per point, in `[0, 1]`.
    pub x: Vec<f64>,
    /// `D(sum_i x_i r_i / (n - l), target)` at `x`.
    pub objective: f64,
    /// Projected-gradient stationarity residual at `x`.
    pub kkt_residual: f64,
    pub iterations: usize,
    /// False when the iteration cap was reached before the residual dropped
    /// below tolerance. Not an error; the best iterate is still returned.
    pub converged: bool,
}

fn check_instance(points: &[FeatureVector], target: &FeatureVector, l: usize) -> Result<usize> {
    let n = points.len();
    if l >= n {
        return Err(Error::BudgetOutOfRange { budget: l, n });
    }
    let d = target.dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(d)
}

/// Iteratively removes `l` points; each step drops the point whose removal
/// brings the mean of the remainder closest to `target` (ties: smallest
/// index). Returns the removed indices, ascending.
pub fn greedy_remove(
    points: &[FeatureVector],
    target: &FeatureVector,
    l: usize,
) -> Result<Vec<usize>> {
    let d = check_instance(points, target, l)?;
    let n = points.len();
    let mut in_play: Vec<bool> = vec![true; n];
    // running sum over the remaining points, accumulated in index order
    let mut sum = vec![0.0; d];
    for p in points {
        for (s, v) in sum.iter_mut().zip(p.values()) {
            *s += v;
        }
    }
    let mut remaining = n;
    let mut removed = Vec::with_capacity(l);
    let mut scratch = vec![0.0; d];
    for _ in 0..l {
        let mut best_idx = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            if !in_play[i] {
                continue;
            }
            let denom = (remaining - 1) as f64;
            for ((sc, s), v) in scratch.iter_mut().zip(&sum).zip(p.values()) {
                *sc = (s - v) / denom;
            }
            let obj = sq_dist(&scratch, target.values());
            if obj < best_obj {
                best_obj = obj;
                best_idx = i;
            }
        }
        in_play[best_idx] = false;
        for (s, v) in sum.iter_mut().zip(points[best_idx].values()) {
            *s -= v;
        }
        remaining -= 1;
        removed.push(best_idx);
    }
    removed.sort_unstable();
    Ok(removed)
}

/// Euclidean projection onto `{x : 0 <= x <= 1, sum(x) >= keep}`: clip to the
/// box, then if the sum constraint is violated shift by the Lagrange
/// multiplier found by bisection (the shifted clipped sum is monotone in the
/// shift).
fn project(y: &[f64], keep: f64) -> Vec<f64> {
    let clipped: Vec<f64> = y.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    if clipped.iter().sum::<f64>() >= keep {
        return clipped;
    }
    let mut lo = 0.0;
    let mut hi = y.iter().fold(1.0f64, |acc, &v| acc.max(1.0 - v));
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let s: f64 = y.iter().map(|v| (v + mid).clamp(0.0, 1.0)).sum();
        if s < keep {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y.iter().map(|v| (v + hi).clamp(0.0, 1.0)).collect()
}

/// Largest eigenvalue of the Gram matrix `sum_i r_i r_i^T`, estimated with 50
/// power-iteration steps from a deterministic start.
fn gram_spectral_bound(points: &[FeatureVector], d: usize) -> f64 {
    let gram_mul = |v: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for p in points {
            let dot: f64 = p.values().iter().zip(v).map(|(a, b)| a * b).sum();
            for (o, pv) in out.iter_mut().zip(p.values()) {
                *o += dot * pv;
            }
        }
    };
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut gv = vec![0.0; d];
    for _ in 0..50 {
        gram_mul(&v, &mut gv);
        let norm = gv.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return 0.0;
        }
        for (vi, g) in v.iter_mut().zip(&gv) {
            *vi = g / norm;
        }
    }
    gram_mul(&v, &mut gv);
    v.iter().zip(&gv).map(|(a, b)| a * b).sum()
}

/// Solves the relaxed selection QP
/// `min D(sum_i x_i r_i / (n - l), target)` over
/// `{0 <= x <= 1, sum(x) >= n - l}` by projected gradient descent from the
/// all-ones start, with step `1/L` (L from the Gram spectral bound) and
/// halving fallback whenever a step would increase the objective.
pub fn solve_relaxed_qp(
    points: &[FeatureVector],
    target: &FeatureVector,
    l: usize,
    tol: f64,
    max_iter: usize,
) -> Result<RelaxedSolution> {
    let d = check_instance(points, target, l)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let n = points.len();
    let keep = (n - l) as f64;

    let objective = |x: &[f64]| {
        let mut mu = vec![0.0; d];
        for (xi, p) in x.iter().zip(points) {
            for (m, v) in mu.iter_mut().zip(p.values()) {
                *m += xi * v;
            }
        }
        for m in &mut mu {
            *m /= keep;
        }
        (sq_dist(&mu, target.values()), mu)
    };
    let gradient = |mu: &[f64]| {
        let scale = 2.0 / keep;
        points
            .iter()
            .map(|p| {
                scale
                    * p.values()
                        .iter()
                        .zip(mu.iter().zip(target.values()))
                        .map(|(r, (m, t))| r * (m - t))
                        .sum::<f64>()
            })
            .collect::<Vec<f64>>()
    };

    let lipschitz = (2.0 * gram_spectral_bound(points, d) / (keep * keep)).max(1e-12);
    let mut step = 1.0 / lipschitz;

    let mut x = vec![1.0; n];
    let (mut fx, mut mu) = objective(&x);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let g = gradient(&mu);
        let stationary: Vec<f64> =
            x.iter().zip(&g).map(|(xi, gi)| xi - gi).collect();
        residual = project(&stationary, keep)
            .iter()
            .zip(&x)
            .map(|(p, xi)| (p - xi) * (p - xi))
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            converged = true;
            break;
        }
        let mut next = project(
            &x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect::<Vec<f64>>(),
            keep,
        );
        let (mut fn_, mut mun) = objective(&next);
        let mut halvings = 0;
        while fn_ > fx && halvings < 60 {
            step *= 0.5;
            halvings += 1;
            next = project(
                &x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect::<Vec<f64>>(),
                keep,
            );
            let r = objective(&next);
            fn_ = r.0;
            mun = r.1;
        }
        x = next;
        fx = fn_;
        mu = mun;
        iterations += 1;
    }

    Ok(RelaxedSolution { x, objective: fx, kkt_residual: residual, iterations, converged })
}

/// Solves the relaxation with default tolerances and keeps the `n - l`
/// candidates with the largest indicator values (ties: smallest index).
/// Returns the kept indices, ascending.
pub fn cvx_select(
    points: &[FeatureVector],
    target: &FeatureVector,
    l: usize,
) -> Result<Vec<usize>> {
    let relaxed = solve_relaxed_qp(points, target, l, DEFAULT_QP_TOL, DEFAULT_QP_MAX_ITER)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        relaxed.x[b]
            .partial_cmp(&relaxed.x[a])
            .expect("indicators are finite")
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = order.into_iter().take(points.len() - l).collect();
    kept.sort_unstable();
    Ok(kept)
}

/// Benefit of removing `q` points from a team: how much the removal moves the
/// team mean toward the target, as an exact cost decrement
/// `D(mean(C), t) - D(mean(C \ S), t)`. Returns the benefit and the removed
/// indices (ascending). Negative benefits are possible; `q = 0` yields zero.
pub fn removal_benefit(
    team: &[FeatureVector],
    target: &FeatureVector,
    q: usize,
    method: CisMethod,
) -> Result<(f64, Vec<usize>)> {
    if q == 0 {
        check_instance(team, target, 0)?;
        return Ok((0.0, Vec::new()));
    }
    let removed = match method {
        CisMethod::Greedy => greedy_remove(team, target, q)?,
        CisMethod::Cvx => {
            let kept = cvx_select(team, target, q)?;
            let mut kept_iter = kept.iter().peekable();
            (0..team.len())
                .filter(|i| {
                    if kept_iter.peek() == Some(&i) {
                        kept_iter.next();
                        false
                    } else {
                        true
                    }
                })
                .collect()
        }
    };
    let before = mean_distance(team, target, &[]);
    let after = mean_distance(team, target, &removed);
    Ok((before - after, removed))
}

/// `D(mean(team \ removed), target)`, sums accumulated in index order.
/// `removed` must be sorted ascending.
fn mean_distance(team: &[FeatureVector], target: &FeatureVector, removed: &[usize]) -> f64 {
    let d = target.dim();
    let mut sum = vec![0.0; d];
    let mut r = 0usize;
    let mut count = 0usize;
    for (i, p) in team.iter().enumerate() {
        if r < removed.len() && removed[r] == i {
            r += 1;
            continue;
        }
        for (s, v) in sum.iter_mut().zip(p.values()) {
            *s += v;
        }
        count += 1;
    }
    if count > 0 {
        for s in &mut sum {
            *s /= count as f64;
        }
    }
    sq_dist(&sum, target.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_cis;
    use crate::types::CandidatePool;

    fn fv(values: &[f64]) -> FeatureVector {
        FeatureVector::new(values.to_vec()).unwrap()
    }

    fn points_1d(values: &[f64]) -> Vec<FeatureVector> {
        values.iter().map(|&v| fv(&[v])).collect()
    }

    #[test]
    fn greedy_remove_examples() {
        let pts = points_1d(&[1.0, 2.0, 3.0, 9.0]);
        assert_eq!(greedy_remove(&pts, &fv(&[2.0]), 1).unwrap(), vec![3]);
        assert_eq!(greedy_remove(&pts, &fv(&[2.0]), 0).unwrap(), Vec::<usize>::new());
        let two = points_1d(&[0.0, 4.0]);
        assert_eq!(greedy_remove(&two, &fv(&[0.0]), 1).unwrap(), vec![1]);
        assert!(greedy_remove(&two, &fv(&[0.0]), 2).is_err());
    }

    #[test]
    fn greedy_first_step_matches_exhaustive_scan() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let n = 4 + (next() * 6.0) as usize;
            let d = 1 + (next() * 3.0) as usize;
            let pts: Vec<FeatureVector> =
                (0..n).map(|_| fv(&(0..d).map(|_| next()).collect::<Vec<_>>())).collect();
            let target = fv(&(0..d).map(|_| next()).collect::<Vec<_>>());
            let removed = greedy_remove(&pts, &target, 1).unwrap();
            // exhaustive scan over single removals
            let mut best = (f64::INFINITY, usize::MAX);
            for skip in 0..n {
                let rest: Vec<FeatureVector> = pts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, p)| p.clone())
                    .collect();
                let mean = crate::cost::mean(rest.iter(), d).unwrap();
                let obj = crate::cost::squared_l2(&mean, &target).unwrap();
                if obj < best.0 {
                    best = (obj, skip);
                }
            }
            assert_eq!(removed[0], best.1);
        }
    }

    #[test]
    fn qp_budget_zero_pins_all_ones() {
        let pts = points_1d(&[1.0, 2.0, 3.0, 9.0]);
        let sol = solve_relaxed_qp(&pts, &fv(&[2.0]), 0, 1e-7, 5000).unwrap();
        assert!(sol.converged);
        assert!(sol.x.iter().all(|&v| v == 1.0));
        // objective equals D(mean(pool), target) = (3.75 - 2)^2
        assert!((sol.objective - 3.0625).abs() < 1e-15);
    }

    #[test]
    fn qp_reaches_binary_optimum_when_it_is_feasible() {
        let pts = points_1d(&[1.0, 2.0, 3.0, 9.0]);
        let sol = solve_relaxed_qp(&pts, &fv(&[2.0]), 1, 1e-7, 5000).unwrap();
        assert!(sol.converged, "residual {}", sol.kkt_residual);
        assert!(sol.objective <= 1e-7, "objective {}", sol.objective);
    }

    #[test]
    fn qp_solution_is_feasible_and_consistent() {
        let pts = points_1d(&[0.1, 0.9, 0.4, 0.7, 0.2]);
        let sol = solve_relaxed_qp(&pts, &fv(&[0.3]), 2, 1e-7, 5000).unwrap();
        let keep = 3.0;
        assert!(sol.x.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)));
        assert!(sol.x.iter().sum::<f64>() >= keep - 1e-8);
        // objective recomputes from x
        let mu: f64 = sol.x.iter().zip(&pts).map(|(x, p)| x * p.values()[0]).sum::<f64>() / keep;
        assert!((sol.objective - (mu - 0.3) * (mu - 0.3)).abs() < 1e-9);
    }

    #[test]
    fn relaxation_lower_bounds_binary_optimum() {
        let mut seed = 123u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..25 {
            let n = 5 + (next() * 7.0) as usize;
            let d = 1 + (next() * 3.0) as usize;
            let l = (next() * 3.0) as usize % (n - 1);
            let rows: Vec<Vec<f64>> =
                (0..n).map(|_| (0..d).map(|_| next()).collect()).collect();
            let pool = CandidatePool::from_rows(rows.clone()).unwrap();
            let target = fv(&(0..d).map(|_| next()).collect::<Vec<_>>());
            let pts: Vec<FeatureVector> = rows.into_iter().map(|r| fv(&r)).collect();
            let sol = solve_relaxed_qp(&pts, &target, l, 1e-7, 5000).unwrap();
            let exact = brute_cis(&pool, &target, l).unwrap();
            assert!(
                sol.objective <= exact.optimum + 1e-6,
                "trial {trial}: relaxed {} > binary {}",
                sol.objective,
                exact.optimum
            );
        }
    }

    #[test]
    fn cvx_select_examples() {
        let pts = points_1d(&[1.0, 2.0, 3.0, 9.0]);
        assert_eq!(cvx_select(&pts, &fv(&[2.0]), 1).unwrap(), vec![0, 1, 2]);
        assert_eq!(cvx_select(&pts, &fv(&[2.0]), 0).unwrap(), vec![0, 1, 2, 3]);
        // duplicates all equal to the target: deterministic lowest-index keep
        let dup = points_1d(&[5.0, 5.0, 5.0, 5.0]);
        assert_eq!(cvx_select(&dup, &fv(&[5.0]), 2).unwrap(), vec![0, 1]);
    }

    #[test]
    fn removal_benefit_examples() {
        let team = points_1d(&[1.0, 2.0, 3.0, 9.0]);
        let (b0, r0) = removal_benefit(&team, &fv(&[2.0]), 0, CisMethod::Cvx).unwrap();
        assert_eq!((b0, r0.len()), (0.0, 0));
        for method in [CisMethod::Cvx, CisMethod::Greedy] {
            let (b, r) = removal_benefit(&team, &fv(&[2.0]), 1, method).unwrap();
            assert!((b - 3.0625).abs() < 1e-12);
            assert_eq!(r, vec![3]);
        }
        // a team whose mean already equals the target cannot gain
        let perfect = points_1d(&[1.0, 3.0]);
        let (b, _) = removal_benefit(&perfect, &fv(&[2.0]), 1, CisMethod::Greedy).unwrap();
        assert!(b <= 0.0);
        assert!(removal_benefit(&perfect, &fv(&[2.0]), 2, CisMethod::Cvx).is_err());
    }

    #[test]
    fn deterministic_repeat_runs() {
        let pts = points_1d(&[0.3, 0.8, 0.1, 0.55, 0.42, 0.9]);
        let t = fv(&[0.5]);
        let a = solve_relaxed_qp(&pts, &t, 2, 1e-7, 5000).unwrap();
        let b = solve_relaxed_qp(&pts, &t, 2, 1e-7, 5000).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        assert_eq!(cvx_select(&pts, &t, 2).unwrap(), cvx_select(&pts, &t, 2).unwrap());
    }
}
