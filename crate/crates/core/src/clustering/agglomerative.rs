use super::{ClusterSet, ClusteringParams, Linkage};
use crate::similarity::DistanceMatrix;

/// One merge step. Leaves are numbered `0..n`, the cluster created by
/// step `k` is `n + k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// The full merge history down to a single cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    linkage: Linkage,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Complete-linkage agglomeration of every point.
    ///
    /// Each step merges the closest pair; among equally close pairs the one
    /// whose smallest members are lexicographically smallest wins.
    pub fn build(matrix: &DistanceMatrix, linkage: Linkage) -> Self {
        let n = matrix.len();
        // Clusters live in the slot of their smallest member.
        let mut dist: Vec<f64> = (0..n * n).map(|k| matrix.get(k / n, k % n)).collect();
        let mut node = (0..n).collect::<Vec<usize>>();
        let mut size = vec![1usize; n];
        let mut active: Vec<usize> = (0..n).collect();
        let mut merges = Vec::with_capacity(n.saturating_sub(1));

        while active.len() > 1 {
            let mut best = (f64::INFINITY, 0, 0);
            for (x, &i) in active.iter().enumerate() {
                let row = &dist[i * n..(i + 1) * n];
                for &j in &active[x + 1..] {
                    if row[j] < best.0 {
                        best = (row[j], i, j);
                    }
                }
            }
            let (d, i, j) = best;
            match linkage {
                Linkage::Complete => {
                    for &k in &active {
                        if k != i && k != j {
                            let merged = dist[i * n + k].max(dist[j * n + k]);
                            dist[i * n + k] = merged;
                            dist[k * n + i] = merged;
                        }
                    }
                }
            }
            size[i] += size[j];
            merges.push(Merge {
                left: node[i],
                right: node[j],
                distance: d,
                size: size[i],
            });
            node[i] = n + merges.len() - 1;
            active.retain(|&k| k != j);
        }
        Self { n, linkage, merges }
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn linkage(&self) -> Linkage {
        self.linkage
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Merges whose distance is strictly below `threshold`.
    ///
    /// Merge distances never decrease, so this is the prefix a
    /// threshold-limited agglomeration would perform.
    pub fn merges_below(&self, threshold: f64) -> &[Merge] {
        let k = self.merges.iter().take_while(|m| m.distance < threshold).count();
        &self.merges[..k]
    }

    pub fn cut(&self, threshold: f64) -> ClusterSet {
        let n = self.n;
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for m in self.merges_below(threshold) {
            let mut right = std::mem::take(&mut members[m.right]);
            let mut merged = std::mem::take(&mut members[m.left]);
            merged.append(&mut right);
            members.push(merged);
        }
        let clusters: Vec<Vec<usize>> = members.into_iter().filter(|c| !c.is_empty()).collect();
        ClusterSet::new(n, clusters).expect("dendrogram cut is a partition")
    }
}

/// Clusters at `params.threshold` together with the full dendrogram.
pub fn agglomerate(matrix: &DistanceMatrix, params: &ClusteringParams) -> (ClusterSet, Dendrogram) {
    let dendrogram = Dendrogram::build(matrix, params.linkage);
    (dendrogram.cut(params.threshold), dendrogram)
}

pub fn cluster(matrix: &DistanceMatrix, params: &ClusteringParams) -> ClusterSet {
    agglomerate(matrix, params).0
}
