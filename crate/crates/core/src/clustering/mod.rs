//! Complete-linkage agglomerative clustering, threshold sweeps and
//! representative selection.

mod agglomerative;
mod ranked;
mod representative;
mod silhouette;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use agglomerative::{agglomerate, cluster, Dendrogram, Merge};
pub use ranked::{RankError, RankedModelSet};
pub use representative::{repr_dist, repr_rank, representatives, RepresentativeStrategy, UnrankedModel};
pub use silhouette::{default_thresholds, silhouette, sweep, SweepError, SweepPoint, SweepResult};

use crate::similarity::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Linkage {
    #[default]
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringParams {
    pub linkage: Linkage,
    /// Clusters are merged only while their linkage distance is strictly below this.
    pub threshold: f64,
}

impl ClusteringParams {
    pub fn complete(threshold: f64) -> Self {
        Self {
            linkage: Linkage::Complete,
            threshold,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("index {0} is out of range")]
    OutOfRange(usize),
    #[error("index {0} appears in more than one cluster")]
    Overlap(usize),
    #[error("index {0} is not covered by any cluster")]
    Uncovered(usize),
}

/// A partition of `0..n` (matrix indices) into non-empty clusters.
///
/// Stored canonically: members ascending, clusters ordered by their
/// smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusterSet {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

impl ClusterSet {
    pub fn new(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; n];
        let mut clusters = clusters;
        for (c, members) in clusters.iter_mut().enumerate() {
            if members.is_empty() {
                return Err(PartitionError::EmptyCluster(c));
            }
            for &i in members.iter() {
                let slot = seen.get_mut(i).ok_or(PartitionError::OutOfRange(i))?;
                if *slot {
                    return Err(PartitionError::Overlap(i));
                }
                *slot = true;
            }
            members.sort_unstable();
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(PartitionError::Uncovered(i));
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        Ok(Self { n, clusters })
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            n,
            clusters: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Number of points partitioned.
    pub fn points(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// One cluster, or one cluster per point.
    pub fn is_degenerate(&self) -> bool {
        self.clusters.len() <= 1 || self.clusters.len() == self.n
    }

    /// Cluster index of every point.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                labels[i] = c;
            }
        }
        labels
    }

    pub fn ids(&self, matrix: &DistanceMatrix) -> Vec<Vec<String>> {
        self.clusters
            .iter()
            .map(|c| c.iter().map(|&i| matrix.id(i).to_string()).collect())
            .collect()
    }
}

impl fmt::Display for ClusterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clusters
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for RepresentativeStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rank" => Ok(RepresentativeStrategy::Rank),
            "dist" => Ok(RepresentativeStrategy::Dist),
            other => Err(format!("unknown representative strategy `{other}` (expected rank or dist)")),
        }
    }
}
