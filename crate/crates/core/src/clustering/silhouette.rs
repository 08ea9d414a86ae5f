use thiserror::Error;

use super::{ClusterSet, Dendrogram, Linkage};
use crate::similarity::DistanceMatrix;

/// Mean silhouette width, or `None` when there is a single cluster or one
/// cluster per point.
///
/// Members of singleton clusters contribute 0; a point with `a = b = 0`
/// also contributes 0.
pub fn silhouette(matrix: &DistanceMatrix, clusters: &ClusterSet) -> Option<f64> {
    let n = clusters.points();
    if clusters.is_degenerate() || n == 0 {
        return None;
    }
    let labels = clusters.labels();
    let k = clusters.len();
    let mut sums = vec![0.0; k];
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        if clusters.clusters()[own].len() == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if j != i {
                sums[labels[j]] += matrix.get(i, j);
            }
        }
        let a = sums[own] / (clusters.clusters()[own].len() - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / clusters.clusters()[c].len() as f64)
            .fold(f64::INFINITY, f64::min);
        let scale = a.max(b);
        if scale > 0.0 {
            total += (b - a) / scale;
        }
    }
    Some(total / n as f64)
}

/// `0.1, 0.2, …, 1.0`.
pub fn default_thresholds() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("no thresholds given")]
    NoThresholds,
    #[error("threshold {0} is outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub threshold: f64,
    pub clusters: ClusterSet,
    /// `None` for degenerate clusterings.
    pub silhouette: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    best: Option<usize>,
    dendrogram: Dendrogram,
}

impl SweepResult {
    /// The clustering with maximal silhouette, ties going to the larger
    /// threshold. `None` if every threshold was degenerate.
    pub fn best(&self) -> Option<&SweepPoint> {
        self.best.map(|i| &self.points[i])
    }

    /// The point at the largest threshold; what [`SweepResult::selected`]
    /// falls back to when nothing is selectable.
    pub fn fallback(&self) -> &SweepPoint {
        self.points
            .iter()
            .reduce(|acc, p| if p.threshold >= acc.threshold { p } else { acc })
            .expect("sweep has at least one point")
    }

    pub fn selected(&self) -> &SweepPoint {
        self.best().unwrap_or_else(|| self.fallback())
    }

    pub fn is_degenerate(&self) -> bool {
        self.best.is_none()
    }

    pub fn dendrogram(&self) -> &Dendrogram {
        &self.dendrogram
    }
}

/// Clusters at every threshold from one shared dendrogram.
pub fn sweep(matrix: &DistanceMatrix, thresholds: &[f64]) -> Result<SweepResult, SweepError> {
    if thresholds.is_empty() {
        return Err(SweepError::NoThresholds);
    }
    if let Some(&t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(SweepError::OutOfRange(t));
    }
    let dendrogram = Dendrogram::build(matrix, Linkage::Complete);
    let points: Vec<SweepPoint> = thresholds
        .iter()
        .map(|&threshold| {
            let clusters = dendrogram.cut(threshold);
            let silhouette = silhouette(matrix, &clusters);
            SweepPoint {
                threshold,
                clusters,
                silhouette,
            }
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        let Some(s) = p.silhouette else { continue };
        let better = match best {
            None => true,
            Some(b) => {
                let (bs, bt) = (points[b].silhouette.unwrap(), points[b].threshold);
                s > bs || (s == bs && p.threshold > bt)
            }
        };
        if better {
            best = Some(i);
        }
    }
    Ok(SweepResult {
        points,
        best,
        dendrogram,
    })
}
