//! Browser bindings for the partitioning solvers, specialized to the 2-D
//! case so everything can be drawn on a canvas. All functions speak JSON
//! strings across the wasm boundary.

use wasm_bindgen::prelude::*;

use gtp_core::cis::CisMethod;
use gtp_core::datagen::{gen_synthetic, PlantedLabel, SynthConfig};
use gtp_core::experiment::{run_algorithm, Algorithm};
use gtp_core::sobol::sobol_points;
use gtp_core::types::{Assignment, CandidatePool, FeatureVector, TargetSet};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Generates a 2-D planted instance. Returns JSON:
/// `{ "points": [[x,y],...], "targets": [[x,y],...], "labels": [t|-1,...] }`
/// where label `-1` marks planted noise and other labels are 0-based team
/// indices.
#[wasm_bindgen]
pub fn generate_instance(
    k: usize,
    points_per_team: usize,
    noise: usize,
    sigma: f64,
    seed: u64,
) -> Result<String, String> {
    let config = SynthConfig { k, m: points_per_team, l: noise, d: 2, sigma, seed };
    let inst = gen_synthetic(&config).map_err(err)?;
    let points: Vec<Vec<f64>> =
        inst.pool.vectors().iter().map(|v| v.values().to_vec()).collect();
    let targets: Vec<Vec<f64>> =
        inst.targets.targets().iter().map(|v| v.values().to_vec()).collect();
    let labels: Vec<i64> = inst
        .labels
        .iter()
        .map(|l| match l {
            PlantedLabel::Team(t) => *t as i64,
            PlantedLabel::Noise => -1,
        })
        .collect();
    Ok(serde_json::json!({ "points": points, "targets": targets, "labels": labels })
        .to_string())
}

/// Runs one solver on an instance produced by [`generate_instance`] (or any
/// JSON with the same shape). Returns JSON:
/// `{ "assignment": [t|-1,...], "centroids": [[x,y],...],
///    "per_team_cost": [...], "cost": c, "removed": [i,...] }`
/// with `-1` marking removed points.
#[wasm_bindgen]
pub fn solve_instance(
    instance_json: &str,
    algorithm: &str,
    removals: usize,
    seed: u64,
) -> Result<String, String> {
    let value: serde_json::Value = serde_json::from_str(instance_json).map_err(err)?;
    let points: Vec<Vec<f64>> =
        serde_json::from_value(value["points"].clone()).map_err(err)?;
    let targets: Vec<Vec<f64>> =
        serde_json::from_value(value["targets"].clone()).map_err(err)?;
    let pool = CandidatePool::from_rows(points).map_err(err)?;
    let targets = TargetSet::new(
        targets
            .into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?,
    )
    .map_err(err)?;
    let algorithm: Algorithm = algorithm.parse().map_err(err)?;
    let report = run_algorithm(algorithm, &pool, &targets, removals, seed, CisMethod::Cvx)
        .map_err(err)?;
    let assignment: Vec<i64> = (0..pool.len())
        .map(|i| match report.partitioning.slot(i) {
            Assignment::Team(t) => t as i64,
            Assignment::Removed => -1,
        })
        .collect();
    let centroids: Vec<Vec<f64>> =
        report.centroids.iter().map(|c| c.values().to_vec()).collect();
    let removed = report.partitioning.removed();
    Ok(serde_json::json!({
        "assignment": assignment,
        "centroids": centroids,
        "per_team_cost": report.per_team_cost,
        "cost": report.cost,
        "removed": removed,
    })
    .to_string())
}

/// First `count` 2-D Sobol points after `skip`, for the low-discrepancy
/// target preview. Returns JSON `[[x,y],...]`.
#[wasm_bindgen]
pub fn sobol_preview(count: usize, skip: usize) -> Result<String, String> {
    let pts = sobol_points(count, 2, skip).map_err(err)?;
    Ok(serde_json::json!(pts).to_string())
}

/// Names accepted by [`solve_instance`], JSON array of strings.
#[wasm_bindgen]
pub fn algorithm_names() -> String {
    let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
    serde_json::json!(names).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_and_solve_round_trip() {
        let inst = generate_instance(3, 10, 4, 0.08, 7).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&inst).unwrap();
        assert_eq!(parsed["points"].as_array().unwrap().len(), 34);
        assert_eq!(parsed["targets"].as_array().unwrap().len(), 3);
        let solved = solve_instance(&inst, "guided-split", 4, 7).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&solved).unwrap();
        assert_eq!(parsed["removed"].as_array().unwrap().len(), 4);
        assert!(parsed["cost"].as_f64().unwrap() >= 0.0);
        assert_eq!(parsed["assignment"].as_array().unwrap().len(), 34);
    }

    #[test]
    fn bad_algorithm_is_reported() {
        let inst = generate_instance(2, 5, 0, 0.1, 1).unwrap();
        assert!(solve_instance(&inst, "bogus", 0, 1).is_err());
    }

    #[test]
    fn sobol_preview_is_json_points() {
        let pts: Vec<Vec<f64>> =
            serde_json::from_str(&sobol_preview(4, 1).unwrap()).unwrap();
        assert_eq!(pts[0], vec![0.5, 0.5]);
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn algorithm_names_include_the_solver() {
        let names: Vec<String> = serde_json::from_str(&algorithm_names()).unwrap();
        assert!(names.contains(&"guided-split".to_string()));
        assert_eq!(names.len(), 8);
    }
}
