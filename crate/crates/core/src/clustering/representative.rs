use thiserror::Error;

use super::{ClusterSet, RankedModelSet};
use crate::similarity::DistanceMatrix;

/// How one model is picked per cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RepresentativeStrategy {
    /// Best-ranked member.
    Rank,
    /// Medoid: smallest mean distance to the other members.
    #[default]
    Dist,
}

impl RepresentativeStrategy {
    pub fn name(self) -> &'static str {
        match self {
            RepresentativeStrategy::Rank => "rank",
            RepresentativeStrategy::Dist => "dist",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("model `{0}` has no rank")]
pub struct UnrankedModel(pub String);

fn ranks_of(matrix: &DistanceMatrix, ranked: &RankedModelSet) -> Result<Vec<u32>, UnrankedModel> {
    matrix
        .ids()
        .iter()
        .map(|id| ranked.rank(id).ok_or_else(|| UnrankedModel(id.clone())))
        .collect()
}

/// Best-ranked member; `ranks` is indexed like the matrix.
pub fn repr_rank(cluster: &[usize], ranks: &[u32]) -> usize {
    *cluster.iter().min_by_key(|&&i| ranks[i]).expect("non-empty cluster")
}

/// The medoid of `cluster`. Ties go to the better rank when `ranks` is
/// given, otherwise to the smallest model id.
pub fn repr_dist(cluster: &[usize], matrix: &DistanceMatrix, ranks: Option<&[u32]>) -> usize {
    assert!(!cluster.is_empty(), "non-empty cluster");
    if cluster.len() == 1 {
        return cluster[0];
    }
    let others = (cluster.len() - 1) as f64;
    let mean = |i: usize| cluster.iter().filter(|&&j| j != i).map(|&j| matrix.get(i, j)).sum::<f64>() / others;
    let mut best = cluster[0];
    let mut best_mean = mean(best);
    for &i in &cluster[1..] {
        let m = mean(i);
        let wins = m < best_mean
            || (m == best_mean
                && match ranks {
                    Some(r) => r[i] < r[best],
                    None => matrix.id(i) < matrix.id(best),
                });
        if wins {
            best = i;
            best_mean = m;
        }
    }
    best
}

/// One representative per cluster, in cluster order.
pub fn representatives(
    clusters: &ClusterSet,
    strategy: RepresentativeStrategy,
    ranked: &RankedModelSet,
    matrix: &DistanceMatrix,
) -> Result<Vec<usize>, UnrankedModel> {
    let ranks = ranks_of(matrix, ranked)?;
    Ok(clusters
        .clusters()
        .iter()
        .map(|c| match strategy {
            RepresentativeStrategy::Rank => repr_rank(c, &ranks),
            RepresentativeStrategy::Dist => repr_dist(c, matrix, Some(&ranks)),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::MeasureId;

    fn matrix(n: usize, entries: &[(usize, usize, f64)]) -> DistanceMatrix {
        let mut v = vec![0.0; n * n];
        for &(i, j, d) in entries {
            v[i * n + j] = d;
            v[j * n + i] = d;
        }
        DistanceMatrix::from_parts(MeasureId::Node, (0..n).map(|i| format!("m{i}")).collect(), v, vec![false; n * n])
            .unwrap()
    }

    #[test]
    fn rank_picks_smallest() {
        let ranks = [7, 2, 5];
        assert_eq!(repr_rank(&[0, 1], &ranks), 1);
        assert_eq!(repr_rank(&[2], &ranks), 2);
    }

    #[test]
    fn medoid_example() {
        let m = matrix(3, &[(0, 1, 0.1), (0, 2, 0.1), (1, 2, 0.5)]);
        assert_eq!(repr_dist(&[0, 1, 2], &m, None), 0);
        assert_eq!(repr_dist(&[2], &m, None), 2);
    }

    #[test]
    fn medoid_ties() {
        let m = matrix(2, &[(0, 1, 0.3)]);
        assert_eq!(repr_dist(&[0, 1], &m, None), 0);
        assert_eq!(repr_dist(&[0, 1], &m, Some(&[4, 3])), 1);
    }
}
