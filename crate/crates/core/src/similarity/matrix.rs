use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::measures::{efg_from_relations, full_from_languages, ged_similarity_nets, model_key, sim_node_nets};
use super::{dice, MeasureId, Score, SimilarityConfig};
use crate::exec::Execution;
use crate::petri::{bounded_language, ef_relation, BoundedLanguage, EFRelation, LocalProcessModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("duplicate model id `{0}`")]
    DuplicateId(String),
    #[error("at least two models are required, got {0}")]
    TooFewModels(usize),
    #[error("expected {expected} entries, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("entry ({0}, {1}) differs from ({1}, {0})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry {0} is not zero")]
    NonZeroDiagonal(usize),
    #[error("entry ({0}, {1}) = {2} is outside [0, 1]")]
    OutOfRange(usize, usize, f64),
    #[error("unknown model id `{0}`")]
    UnknownId(String),
}

/// Dense symmetric table of pairwise distances under one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    measure: MeasureId,
    ids: Vec<String>,
    values: Vec<f64>,
    approximate: Vec<bool>,
    index: HashMap<String, usize>,
}

impl DistanceMatrix {
    /// Checks shape, symmetry, zero diagonal and range.
    pub fn from_parts(
        measure: MeasureId,
        ids: Vec<String>,
        values: Vec<f64>,
        approximate: Vec<bool>,
    ) -> Result<Self, MatrixError> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(MatrixError::DuplicateId(id.clone()));
            }
        }
        for len in [values.len(), approximate.len()] {
            if len != n * n {
                return Err(MatrixError::Shape {
                    expected: n * n,
                    actual: len,
                });
            }
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(MatrixError::NonZeroDiagonal(i));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(MatrixError::OutOfRange(i, j, v));
                }
                if v != values[j * n + i] || approximate[i * n + j] != approximate[j * n + i] {
                    return Err(MatrixError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self {
            measure,
            ids,
            values,
            approximate,
            index,
        })
    }

    pub fn measure(&self) -> MeasureId {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn is_approximate(&self, i: usize, j: usize) -> bool {
        self.approximate[i * self.ids.len() + j]
    }

    /// Unordered pairs `(i, j)`, `i < j`, whose distance is approximate.
    pub fn approximate_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_approximate(i, j))
            .collect()
    }

    /// Sub-matrix over `indices`, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> DistanceMatrix {
        let ids: Vec<String> = indices.iter().map(|&i| self.ids[i].clone()).collect();
        let mut values = Vec::with_capacity(indices.len() * indices.len());
        let mut approximate = Vec::with_capacity(values.capacity());
        for &i in indices {
            for &j in indices {
                values.push(self.get(i, j));
                approximate.push(self.is_approximate(i, j));
            }
        }
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        DistanceMatrix {
            measure: self.measure,
            ids,
            values,
            approximate,
            index,
        }
    }

    pub fn restrict_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<DistanceMatrix, MatrixError> {
        let indices = ids
            .iter()
            .map(|id| {
                self.index_of(id.as_ref())
                    .ok_or_else(|| MatrixError::UnknownId(id.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.restrict(&indices))
    }

    /// Every entry rounded to six decimals, exactly as the CSV export
    /// writes and re-reads it.
    pub fn quantized(&self) -> DistanceMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = quantize(*v);
        }
        out
    }
}

pub(crate) fn quantize(v: f64) -> f64 {
    format!("{v:.6}").parse().expect("formatted float parses")
}

/// Per-model data computed once per matrix.
struct Profile<'m> {
    model: &'m LocalProcessModel,
    key: String,
    labels: BTreeSet<&'m str>,
    language: Option<BoundedLanguage>,
    ef: Option<EFRelation>,
}

impl<'m> Profile<'m> {
    fn new(model: &'m LocalProcessModel, measure: MeasureId, config: &SimilarityConfig) -> Self {
        let language = measure
            .bound()
            .map(|n| bounded_language(model, n, config.exploration_cap));
        let ef = match measure {
            MeasureId::Efg(_) => language.as_ref().map(ef_relation),
            _ => None,
        };
        Self {
            model,
            key: model_key(model),
            labels: model.net().activity_labels(),
            language,
            ef,
        }
    }
}

fn pair_similarity(measure: MeasureId, a: &Profile, b: &Profile, config: &SimilarityConfig) -> Score {
    let (x, y) = if a.key <= b.key { (a, b) } else { (b, a) };
    match measure {
        MeasureId::Transition => Score::exact(dice(&a.labels, &b.labels)),
        MeasureId::Node => Score::exact(sim_node_nets(x.model.net(), y.model.net())),
        MeasureId::Efg(_) => {
            let (la, lb) = (a.language.as_ref().expect("language"), b.language.as_ref().expect("language"));
            Score {
                value: efg_from_relations(a.ef.as_ref().expect("ef"), b.ef.as_ref().expect("ef")),
                approximate: la.truncated || lb.truncated,
            }
        }
        MeasureId::Full(_) => full_from_languages(
            x.language.as_ref().expect("language"),
            y.language.as_ref().expect("language"),
            config.language_cap,
        ),
        MeasureId::Ged => ged_similarity_nets(x.model.net(), y.model.net(), config.ged_budget),
    }
}

/// All pairwise distances under `measure`.
///
/// Per-model languages are computed once; pairs are evaluated
/// independently, so the result does not depend on `exec`.
pub fn distance_matrix(
    models: &[LocalProcessModel],
    measure: MeasureId,
    config: &SimilarityConfig,
    exec: Execution,
) -> Result<DistanceMatrix, MatrixError> {
    let n = models.len();
    if n < 2 {
        return Err(MatrixError::TooFewModels(n));
    }
    let mut seen = BTreeSet::new();
    for m in models {
        if !seen.insert(m.id()) {
            return Err(MatrixError::DuplicateId(m.id().to_string()));
        }
    }

    let indices: Vec<usize> = (0..n).collect();
    let profiles = exec.map(&indices, |&i| Profile::new(&models[i], measure, config));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let scores = exec.map(&pairs, |&(i, j)| pair_similarity(measure, &profiles[i], &profiles[j], config));

    let mut values = vec![0.0; n * n];
    let mut approximate = vec![false; n * n];
    for (&(i, j), score) in pairs.iter().zip(&scores) {
        let d = 1.0 - score.value;
        values[i * n + j] = d;
        values[j * n + i] = d;
        approximate[i * n + j] = score.approximate;
        approximate[j * n + i] = score.approximate;
    }
    DistanceMatrix::from_parts(measure, models.iter().map(|m| m.id().to_string()).collect(), values, approximate)
}
