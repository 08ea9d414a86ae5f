//! Evaluation analytics over a ranked model set: top-n selection,
//! reduction curves, mean pairwise diversity and rank mapping.

use thiserror::Error;

use crate::clustering::{
    representatives, sweep, RankError, RankedModelSet, RepresentativeStrategy, SweepError, SweepResult, UnrankedModel,
};
use crate::exec::Execution;
use crate::petri::LocalProcessModel;
use crate::similarity::{DistanceMatrix, MatrixError, MeasureId};

pub const DEFAULT_REDUCTION_NS: [usize; 6] = [5, 10, 20, 50, 100, 500];
pub const DEFAULT_DIVERSITY_NS: [usize; 4] = [5, 10, 50, 100];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no top-n sizes given")]
    NoSizes,
    #[error("top-n size must be positive")]
    ZeroSize,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Unranked(#[from] UnrankedModel),
}

/// The `min(n, len)` best-ranked models, best first.
pub fn top_n(ranked: &RankedModelSet, n: usize) -> Vec<(&LocalProcessModel, u32)> {
    let mut v = ranked.by_rank();
    v.truncate(n);
    v
}

fn top_n_ids(ranked: &RankedModelSet, n: usize) -> Vec<&str> {
    top_n(ranked, n).into_iter().map(|(m, _)| m.id()).collect()
}

/// Mean over the distinct pairs of `ids`; `None` for fewer than two.
///
/// Pairs are summed in matrix order, so any permutation of `ids` gives
/// the same value.
pub fn mean_pairwise_distance<S: AsRef<str>>(ids: &[S], matrix: &DistanceMatrix) -> Result<Option<f64>, MatrixError> {
    let mut idx = ids
        .iter()
        .map(|id| matrix.index_of(id.as_ref()).ok_or_else(|| MatrixError::UnknownId(id.as_ref().to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    idx.sort_unstable();
    let k = idx.len();
    if k < 2 {
        return Ok(None);
    }
    let mut sum = 0.0;
    for (x, &i) in idx.iter().enumerate() {
        for &j in &idx[x + 1..] {
            sum += matrix.get(i, j);
        }
    }
    Ok(Some(sum / (k * (k - 1) / 2) as f64))
}

/// The silhouette-selected clustering of a model set and its representatives.
#[derive(Debug, Clone)]
pub struct Grouping {
    pub matrix: DistanceMatrix,
    pub sweep: SweepResult,
    /// Matrix indices, one per selected cluster.
    pub representatives: Vec<usize>,
}

impl Grouping {
    pub fn representative_ids(&self) -> Vec<&str> {
        self.representatives.iter().map(|&i| self.matrix.id(i)).collect()
    }

    /// The representatives as a ranked set with their original ranks.
    pub fn representative_set(&self, ranked: &RankedModelSet) -> Result<RankedModelSet, RankError> {
        ranked.subset(&self.representative_ids())
    }

    pub fn is_degenerate(&self) -> bool {
        self.sweep.is_degenerate()
    }
}

/// Sweeps `thresholds` over `matrix` (restricted to `ranked`'s models),
/// takes the selected clustering and picks representatives.
pub fn group(
    ranked: &RankedModelSet,
    matrix: &DistanceMatrix,
    thresholds: &[f64],
    strategy: RepresentativeStrategy,
) -> Result<Grouping, AnalysisError> {
    let ids: Vec<&str> = ranked.models().iter().map(|m| m.id()).collect();
    let matrix = if ids.iter().copied().eq(matrix.ids().iter().map(|s| s.as_str())) {
        matrix.clone()
    } else {
        matrix.restrict_ids(&ids)?
    };
    let result = sweep(&matrix, thresholds)?;
    let reps = representatives(&result.selected().clusters, strategy, ranked, &matrix)?;
    Ok(Grouping {
        matrix,
        sweep: result,
        representatives: reps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionPoint {
    /// Requested size.
    pub n: usize,
    /// Models actually in the top-n set.
    pub size: usize,
    pub representative_count: usize,
    /// Threshold of the selected clustering, `None` for sets below two models.
    pub threshold: Option<f64>,
    pub silhouette: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCurve {
    pub measure: MeasureId,
    pub points: Vec<ReductionPoint>,
}

/// For every `n`, re-clusters the top-n models and counts the clusters of
/// the selected clustering.
pub fn reduction_curve(
    ranked: &RankedModelSet,
    matrix: &DistanceMatrix,
    thresholds: &[f64],
    ns: &[usize],
    exec: Execution,
) -> Result<ReductionCurve, AnalysisError> {
    check_sizes(ns)?;
    let points = exec.map(ns, |&n| -> Result<ReductionPoint, AnalysisError> {
        let ids = top_n_ids(ranked, n);
        if ids.len() < 2 {
            return Ok(ReductionPoint {
                n,
                size: ids.len(),
                representative_count: ids.len(),
                threshold: None,
                silhouette: None,
                degenerate: true,
            });
        }
        let sub = matrix.restrict_ids(&ids)?;
        let result = sweep(&sub, thresholds)?;
        let selected = result.selected();
        Ok(ReductionPoint {
            n,
            size: ids.len(),
            representative_count: selected.clusters.len(),
            threshold: Some(selected.threshold),
            silhouette: selected.silhouette,
            degenerate: result.is_degenerate(),
        })
    });
    Ok(ReductionCurve {
        measure: matrix.measure(),
        points: points.into_iter().collect::<Result<_, _>>()?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityPoint {
    pub n: usize,
    pub original_size: usize,
    pub representative_size: usize,
    pub original_mean: Option<f64>,
    pub representative_mean: Option<f64>,
    /// Set when either set holds fewer than `n` models.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub measure: MeasureId,
    pub points: Vec<DiversityPoint>,
}

/// Mean pairwise distance of the top-n originals against the top-n
/// representatives, which carry their original ranks.
pub fn diversity_report(
    ranked: &RankedModelSet,
    repr_ranked: &RankedModelSet,
    matrix: &DistanceMatrix,
    ns: &[usize],
) -> Result<DiversityReport, AnalysisError> {
    check_sizes(ns)?;
    let points = ns
        .iter()
        .map(|&n| {
            let original = top_n_ids(ranked, n);
            let reps = top_n_ids(repr_ranked, n);
            Ok(DiversityPoint {
                n,
                original_size: original.len(),
                representative_size: reps.len(),
                original_mean: mean_pairwise_distance(&original, matrix)?,
                representative_mean: mean_pairwise_distance(&reps, matrix)?,
                clamped: original.len() < n || reps.len() < n,
            })
        })
        .collect::<Result<_, AnalysisError>>()?;
    Ok(DiversityReport {
        measure: matrix.measure(),
        points,
    })
}

/// Original ranks of `ids`, ascending.
pub fn map_ranks<S: AsRef<str>>(ids: &[S], ranked: &RankedModelSet) -> Result<Vec<u32>, RankError> {
    let mut ranks = ids
        .iter()
        .map(|id| ranked.rank(id.as_ref()).ok_or_else(|| RankError::UnknownId(id.as_ref().to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    ranks.sort_unstable();
    Ok(ranks)
}

fn check_sizes(ns: &[usize]) -> Result<(), AnalysisError> {
    if ns.is_empty() {
        return Err(AnalysisError::NoSizes);
    }
    if ns.contains(&0) {
        return Err(AnalysisError::ZeroSize);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::default_thresholds;
    use crate::synth::chain_lpm;

    fn ranked(n: usize) -> RankedModelSet {
        let models = (0..n).map(|i| chain_lpm(format!("m{i}"), &[format!("a{i}")])).collect();
        let ranks = (0..n as u32).map(|i| (i * 7) % n as u32 + 1).collect();
        RankedModelSet::new(models, ranks).unwrap()
    }

    fn matrix(ids: &[&str], f: impl Fn(usize, usize) -> f64) -> DistanceMatrix {
        let n = ids.len();
        let v = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { f(k / n, k % n) })
            .collect();
        DistanceMatrix::from_parts(MeasureId::Transition, ids.iter().map(|s| s.to_string()).collect(), v, vec![false; n * n])
            .unwrap()
    }

    #[test]
    fn top_n_clamps_and_orders() {
        let set = ranked(3);
        assert_eq!(top_n(&set, 5).len(), 3);
        assert_eq!(top_n(&set, 1)[0].1, 1);
        let ranks: Vec<u32> = top_n(&set, 3).iter().map(|&(_, r)| r).collect();
        assert_eq!(ranks, [1, 2, 3]);
    }

    #[test]
    fn mean_distances() {
        let m = matrix(&["a", "b", "c", "d"], |i, j| (i + j) as f64 / 10.0);
        assert_eq!(mean_pairwise_distance(&["a"], &m).unwrap(), None);
        assert_eq!(mean_pairwise_distance(&["a", "b"], &m).unwrap(), Some(0.1));
        let all = mean_pairwise_distance(&["a", "b", "c", "d"], &m).unwrap().unwrap();
        let manual = (0.1 + 0.2 + 0.3 + 0.3 + 0.4 + 0.5) / 6.0;
        assert!((all - manual).abs() < 1e-15);
        assert_eq!(mean_pairwise_distance(&["d", "b", "c", "a"], &m).unwrap(), Some(all));
        assert!(mean_pairwise_distance(&["zz", "a"], &m).is_err());
    }

    #[test]
    fn rank_mapping() {
        let set = ranked(5);
        assert_eq!(map_ranks(&["m0"], &set).unwrap(), [1]);
        let ids: Vec<&str> = set.by_rank().iter().take(3).map(|(m, _)| m.id()).collect();
        assert_eq!(map_ranks(&ids, &set).unwrap(), [1, 2, 3]);
    }

    #[test]
    fn identical_models_reduce_to_one() {
        let set = ranked(6);
        let ids: Vec<String> = set.models().iter().map(|m| m.id().to_string()).collect();
        let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let m = matrix(&refs, |_, _| 0.0);
        let curve = reduction_curve(&set, &m, &default_thresholds(), &[1, 3, 6, 10], Execution::Sequential).unwrap();
        let counts: Vec<usize> = curve.points.iter().map(|p| p.representative_count).collect();
        assert_eq!(counts, [1, 1, 1, 1]);
        assert!(curve.points.iter().all(|p| p.degenerate));
        assert!(reduction_curve(&set, &m, &default_thresholds(), &[], Execution::Sequential).is_err());
    }

    #[test]
    fn same_set_same_means() {
        let set = ranked(4);
        let ids: Vec<String> = set.models().iter().map(|m| m.id().to_string()).collect();
        let refs: Vec<&str> = ids.iter().map(|s| s.as_str()).collect();
        let m = matrix(&refs, |i, j| 0.1 * (i.max(j) as f64));
        let report = diversity_report(&set, &set, &m, &[2, 4, 8]).unwrap();
        for p in &report.points {
            assert_eq!(p.original_mean, p.representative_mean);
        }
        assert!(report.points[2].clamped);
    }
}
