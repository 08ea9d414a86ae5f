//! CSV and JSON artifacts. All output is byte-deterministic for equal input.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{DiversityReport, ReductionCurve};
use crate::clustering::{ClusterSet, PartitionError, RankedModelSet};
use crate::similarity::{DistanceMatrix, MatrixError, MeasureId};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn opt6(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

fn csv_string(rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), ExportError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| ExportError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Headered square CSV, `id` in the corner, values with six decimals.
pub fn matrix_csv(matrix: &DistanceMatrix) -> String {
    let mut rows = Vec::with_capacity(matrix.len() + 1);
    rows.push(std::iter::once("id".to_string()).chain(matrix.ids().iter().cloned()).collect());
    for i in 0..matrix.len() {
        let mut row = vec![matrix.id(i).to_string()];
        row.extend((0..matrix.len()).map(|j| fmt6(matrix.get(i, j))));
        rows.push(row);
    }
    csv_string(&rows)
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixMeta {
    measure: String,
    models: usize,
    approximate_pairs: Vec<(String, String)>,
}

pub fn matrix_json(matrix: &DistanceMatrix) -> String {
    let meta = MatrixMeta {
        measure: matrix.measure().to_string(),
        models: matrix.len(),
        approximate_pairs: matrix
            .approximate_pairs()
            .into_iter()
            .map(|(i, j)| (matrix.id(i).to_string(), matrix.id(j).to_string()))
            .collect(),
    };
    serde_json::to_string_pretty(&meta).expect("serializable") + "\n"
}

/// The metadata file stored next to a matrix CSV.
pub fn matrix_meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the CSV and its JSON metadata (measure, approximate pairs).
pub fn export_matrix(matrix: &DistanceMatrix, csv_path: &Path) -> Result<(), ExportError> {
    write_file(csv_path, &matrix_csv(matrix))?;
    write_file(&matrix_meta_path(csv_path), &matrix_json(matrix))
}

/// Reads a matrix written by [`export_matrix`]; equals the quantized
/// original.
pub fn read_matrix(csv_path: &Path) -> Result<DistanceMatrix, ExportError> {
    let meta_path = matrix_meta_path(csv_path);
    let raw = fs::read_to_string(&meta_path).map_err(|source| ExportError::Io {
        path: meta_path.clone(),
        source,
    })?;
    let meta: MatrixMeta = serde_json::from_str(&raw).map_err(|source| ExportError::Json {
        path: meta_path.clone(),
        source,
    })?;
    let format_err = |message: String| ExportError::Format {
        path: csv_path.to_path_buf(),
        message,
    };
    let measure: MeasureId = meta.measure.parse().map_err(|e| format_err(format!("{e}")))?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(csv_path)
        .map_err(|source| ExportError::Csv {
            path: csv_path.to_path_buf(),
            source,
        })?;
    let header = reader.headers().map_err(|source| ExportError::Csv {
        path: csv_path.to_path_buf(),
        source,
    })?;
    let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = ids.len();
    let mut values = Vec::with_capacity(n * n);
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|source| ExportError::Csv {
            path: csv_path.to_path_buf(),
            source,
        })?;
        if record.get(0) != ids.get(row).map(String::as_str) {
            return Err(format_err(format!("row {} is not labeled `{}`", row + 1, ids.get(row).map_or("", |s| s))));
        }
        for cell in record.iter().skip(1) {
            values.push(cell.parse::<f64>().map_err(|_| format_err(format!("invalid value `{cell}`")))?);
        }
    }
    if meta.models != n {
        return Err(format_err(format!("metadata lists {} models, CSV has {n}", meta.models)));
    }
    let mut approximate = vec![false; n * n];
    let index = |id: &str| ids.iter().position(|x| x == id).ok_or_else(|| format_err(format!("unknown id `{id}`")));
    for (a, b) in &meta.approximate_pairs {
        let (i, j) = (index(a)?, index(b)?);
        approximate[i * n + j] = true;
        approximate[j * n + i] = true;
    }
    Ok(DistanceMatrix::from_parts(measure, ids, values, approximate)?)
}

/// Clusters ordered by their best rank, members by rank.
fn ordered_clusters(clusters: &ClusterSet, ranks: &[u32]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = clusters
        .clusters()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_by_key(|&i| ranks[i]);
            c
        })
        .collect();
    out.sort_by_key(|c| ranks[c[0]]);
    out
}

/// One row per model: `model_id,cluster_id,rank,is_representative`.
///
/// `clusters` and `representatives` hold indices of `matrix`; cluster ids
/// count from 1 in order of each cluster's best rank.
pub fn clusters_csv(
    clusters: &ClusterSet,
    representatives: &[usize],
    ranked: &RankedModelSet,
    matrix: &DistanceMatrix,
) -> String {
    let ranks: Vec<u32> = matrix.ids().iter().map(|id| ranked.rank(id).unwrap_or(u32::MAX)).collect();
    let mut rows = vec![vec![
        "model_id".to_string(),
        "cluster_id".to_string(),
        "rank".to_string(),
        "is_representative".to_string(),
    ]];
    for (c, members) in ordered_clusters(clusters, &ranks).iter().enumerate() {
        for &i in members {
            rows.push(vec![
                matrix.id(i).to_string(),
                (c + 1).to_string(),
                ranks[i].to_string(),
                representatives.contains(&i).to_string(),
            ]);
        }
    }
    csv_string(&rows)
}

/// Cluster rows read back: `(model_id, cluster_id, rank, is_representative)`.
pub fn read_clusters_csv(path: &Path) -> Result<Vec<(String, usize, u32, bool)>, ExportError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| ExportError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|source| ExportError::Csv {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}

pub fn reduction_csv(curve: &ReductionCurve) -> String {
    let mut rows = vec![["measure", "n", "size", "representative_count", "threshold", "silhouette", "degenerate"]
        .map(str::to_string)
        .to_vec()];
    for p in &curve.points {
        rows.push(vec![
            curve.measure.to_string(),
            p.n.to_string(),
            p.size.to_string(),
            p.representative_count.to_string(),
            p.threshold.map(|t| format!("{t:.3}")).unwrap_or_default(),
            opt6(p.silhouette),
            p.degenerate.to_string(),
        ]);
    }
    csv_string(&rows)
}

pub fn diversity_csv(report: &DiversityReport) -> String {
    let mut rows = vec![[
        "measure",
        "n",
        "original_size",
        "representative_size",
        "original_mean",
        "representative_mean",
        "clamped",
    ]
    .map(str::to_string)
    .to_vec()];
    for p in &report.points {
        rows.push(vec![
            report.measure.to_string(),
            p.n.to_string(),
            p.original_size.to_string(),
            p.representative_size.to_string(),
            opt6(p.original_mean),
            opt6(p.representative_mean),
            p.clamped.to_string(),
        ]);
    }
    csv_string(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_csv() {
        let m = DistanceMatrix::from_parts(
            MeasureId::Transition,
            vec!["a".into(), "b".into()],
            vec![0.0; 4],
            vec![false; 4],
        )
        .unwrap();
        assert_eq!(matrix_csv(&m), "id,a,b\na,0.000000,0.000000\nb,0.000000,0.000000\n");
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let third = 1.0 / 3.0;
        let m = DistanceMatrix::from_parts(
            MeasureId::Efg(4),
            vec!["x,1".into(), "y".into(), "z".into()],
            vec![0.0, third, 0.5, third, 0.0, 1.0, 0.5, 1.0, 0.0],
            vec![false, true, false, true, false, false, false, false, false],
        )
        .unwrap();
        let path = dir.path().join("out/matrix.csv");
        export_matrix(&m, &path).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back, m.quantized());
        assert_eq!(back.approximate_pairs(), [(0, 1)]);
        assert_eq!(back.measure(), MeasureId::Efg(4));
    }
}
