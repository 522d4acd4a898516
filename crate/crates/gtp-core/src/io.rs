//! File formats: candidate pools and target sets as headed CSV, solve
//! reports as versioned JSON, and benchmark tables as CSV. All writers are
//! deterministic (sorted keys, shortest round-trip float encoding) so
//! identical runs produce identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::datagen::{PlantedLabel, SynthInstance};
use crate::types::{
    Assignment, CandidatePool, Error, FeatureVector, Partitioning, Result, SolveReport, TargetSet,
};

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn read_vector_csv(path: &Path, id_header: &str) -> Result<Vec<(String, FeatureVector)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() || headers.get(0) != Some(id_header) {
        return Err(parse_err(1, format!("expected header starting with '{id_header}'")));
    }
    let d = headers.len() - 1;
    if d == 0 {
        return Err(parse_err(1, "no feature columns"));
    }
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d + 1 {
            return Err(parse_err(
                line,
                format!("expected {} cells, found {}", d + 1, record.len()),
            ));
        }
        let id = record.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(parse_err(line, "empty id"));
        }
        if !seen.insert(id.clone()) {
            return Err(parse_err(line, format!("duplicate id '{id}'")));
        }
        let mut values = Vec::with_capacity(d);
        for cell in record.iter().skip(1) {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric cell '{cell}'")))?;
            values.push(v);
        }
        let vector = FeatureVector::new(values)
            .map_err(|e| parse_err(line, format!("invalid vector: {e}")))?;
        rows.push((id, vector));
    }
    Ok(rows)
}

fn write_vector_csv(
    path: &Path,
    id_header: &str,
    rows: impl Iterator<Item = (String, Vec<f64>)>,
    d: usize,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![id_header.to_string()];
    header.extend((1..=d).map(|i| format!("f{i}")));
    writer.write_record(&header)?;
    for (id, values) in rows {
        let mut record = vec![id];
        record.extend(values.iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a candidate pool from a `id,f1,...,fd` CSV file.
pub fn load_pool(path: &Path) -> Result<CandidatePool> {
    let rows = read_vector_csv(path, "id")?;
    if rows.is_empty() {
        return Err(parse_err(1, "pool file has no rows"));
    }
    CandidatePool::new(rows)
}

pub fn save_pool(pool: &CandidatePool, path: &Path) -> Result<()> {
    write_vector_csv(
        path,
        "id",
        (0..pool.len()).map(|i| (pool.id(i).to_string(), pool.vector(i).values().to_vec())),
        pool.dim(),
    )
}

/// Reads a target set from a `t_id,f1,...,fd` CSV file.
pub fn load_targets(path: &Path) -> Result<TargetSet> {
    let rows = read_vector_csv(path, "t_id")?;
    if rows.is_empty() {
        return Err(parse_err(1, "targets file has no rows"));
    }
    TargetSet::new(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn save_targets(targets: &TargetSet, path: &Path) -> Result<()> {
    write_vector_csv(
        path,
        "t_id",
        targets
            .targets()
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("t{i}"), t.values().to_vec())),
        targets.dim(),
    )
}

/// Writes the ground-truth labels of a synthetic instance (`id,label` with
/// 1-based team numbers or `noise`).
pub fn save_labels(instance: &SynthInstance, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["id", "label"])?;
    for (i, label) in instance.labels.iter().enumerate() {
        let value = match label {
            PlantedLabel::Team(t) => (t + 1).to_string(),
            PlantedLabel::Noise => "noise".to_string(),
        };
        writer.write_record([instance.pool.id(i), &value])?;
    }
    writer.flush()?;
    Ok(())
}

/// One solve serialized for downstream tooling. Teams are 1-based in the
/// assignment map; removed candidates map to `"removed"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub algorithm: String,
    pub cost: f64,
    pub per_team_cost: Vec<f64>,
    pub centroids: Vec<Vec<f64>>,
    pub removed_ids: Vec<String>,
    pub assignment: BTreeMap<String, serde_json::Value>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub iterations: u64,
    pub wall_time_s: f64,
}

impl ReportDocument {
    pub fn from_report(
        report: &SolveReport,
        pool: &CandidatePool,
        algorithm: &str,
        config: serde_json::Value,
    ) -> Self {
        let assignment = (0..pool.len())
            .map(|i| {
                let value = match report.partitioning.slot(i) {
                    Assignment::Team(t) => serde_json::json!(t + 1),
                    Assignment::Removed => serde_json::json!("removed"),
                };
                (pool.id(i).to_string(), value)
            })
            .collect();
        Self {
            schema_version: "1".to_string(),
            algorithm: algorithm.to_string(),
            cost: report.cost,
            per_team_cost: report.per_team_cost.clone(),
            centroids: report.centroids.iter().map(|c| c.values().to_vec()).collect(),
            removed_ids: report.removed_ids.clone(),
            assignment,
            config,
            seed: report.seed,
            iterations: report.iterations as u64,
            wall_time_s: report.wall_time_s,
        }
    }

    /// Reconstructs the partitioning against a pool (ids must match).
    pub fn partitioning(&self, pool: &CandidatePool, k: usize) -> Result<Partitioning> {
        let mut slots = Vec::with_capacity(pool.len());
        for i in 0..pool.len() {
            let id = pool.id(i);
            let value = self
                .assignment
                .get(id)
                .ok_or_else(|| Error::InvalidInput(format!("id '{id}' missing from report")))?;
            let slot = if value == "removed" {
                Assignment::Removed
            } else {
                let team = value
                    .as_u64()
                    .ok_or_else(|| Error::InvalidInput(format!("bad team value for '{id}'")))?;
                Assignment::Team(team as usize - 1)
            };
            slots.push(slot);
        }
        Partitioning::new(k, slots)
    }
}

pub fn save_report(doc: &ReportDocument, path: &Path) -> Result<()> {
    let mut data = serde_json::to_vec_pretty(doc)?;
    data.push(b'\n');
    std::fs::write(path, data)?;
    Ok(())
}

pub fn load_report(path: &Path) -> Result<ReportDocument> {
    Ok(serde_json::from_slice(&std::fs::read(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{gen_synthetic, SynthConfig};

    #[test]
    fn pool_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pool.csv");
        let config = SynthConfig { k: 2, m: 5, l: 3, d: 4, sigma: 0.7, seed: 5 };
        let inst = gen_synthetic(&config).unwrap();
        save_pool(&inst.pool, &path).unwrap();
        let loaded = load_pool(&path).unwrap();
        assert_eq!(loaded.len(), inst.pool.len());
        assert_eq!(loaded.dim(), inst.pool.dim());
        for i in 0..loaded.len() {
            assert_eq!(loaded.id(i), inst.pool.id(i));
            for (a, b) in loaded.vector(i).values().iter().zip(inst.pool.vector(i).values()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn small_pool_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pool.csv");
        std::fs::write(&path, "id,f1,f2\nalice,1.5,2\nbob,-3,0.25\n").unwrap();
        let pool = load_pool(&path).unwrap();
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.dim(), 2);
        assert_eq!(pool.id(0), "alice");
        assert_eq!(pool.vector(1).values(), &[-3.0, 0.25]);
    }

    #[test]
    fn ragged_and_bad_rows_name_their_line() {
        let dir = tempfile::tempdir().unwrap();
        let ragged = dir.path().join("ragged.csv");
        std::fs::write(&ragged, "id,f1,f2\na,1,2\nb,1,2,3\n").unwrap();
        match load_pool(&ragged) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            // the csv crate reports unequal row lengths itself
            Err(Error::Csv(e)) => {
                assert!(e.to_string().contains("3"), "error does not name the line: {e}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "id,f1\na,1\nb,zebra\n").unwrap();
        match load_pool(&bad) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("zebra"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let dup = dir.path().join("dup.csv");
        std::fs::write(&dup, "id,f1\na,1\na,2\n").unwrap();
        assert!(matches!(load_pool(&dup), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn empty_targets_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("targets.csv");
        std::fs::write(&path, "t_id,f1,f2\n").unwrap();
        assert!(load_targets(&path).is_err());
    }

    #[test]
    fn report_round_trip_preserves_cost_bits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let pool = CandidatePool::from_rows(vec![vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        let targets = TargetSet::new(vec![
            FeatureVector::new(vec![0.25, 0.5]).unwrap(),
            FeatureVector::new(vec![0.75, 0.5]).unwrap(),
        ])
        .unwrap();
        let report =
            crate::guided::guided_split(&pool, &targets, 0, &Default::default()).unwrap();
        let doc = ReportDocument::from_report(
            &report,
            &pool,
            "guided-split",
            serde_json::json!({"l": 0}),
        );
        save_report(&doc, &path).unwrap();
        let loaded = load_report(&path).unwrap();
        assert_eq!(loaded.cost.to_bits(), report.cost.to_bits());
        assert_eq!(loaded.schema_version, "1");
        let part = loaded.partitioning(&pool, 2).unwrap();
        assert_eq!(part, report.partitioning);
    }
}
