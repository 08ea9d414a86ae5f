use std::collections::HashMap;

use thiserror::Error;

use crate::petri::LocalProcessModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("models and ranks differ in length ({models} vs {ranks})")]
    Length { models: usize, ranks: usize },
    #[error("duplicate model id `{0}`")]
    DuplicateId(String),
    #[error("rank {rank} is shared by `{first}` and `{second}`")]
    DuplicateRank { rank: u32, first: String, second: String },
    #[error("model `{0}` has rank 0; ranks start at 1")]
    ZeroRank(String),
    #[error("model `{0}` is not in the set")]
    UnknownId(String),
}

/// Models with a unique positive rank each; rank 1 is best.
#[derive(Debug, Clone)]
pub struct RankedModelSet {
    models: Vec<LocalProcessModel>,
    ranks: Vec<u32>,
    index: HashMap<String, usize>,
}

impl RankedModelSet {
    pub fn new(models: Vec<LocalProcessModel>, ranks: Vec<u32>) -> Result<Self, RankError> {
        if models.len() != ranks.len() {
            return Err(RankError::Length {
                models: models.len(),
                ranks: ranks.len(),
            });
        }
        let mut index = HashMap::with_capacity(models.len());
        let mut by_rank: HashMap<u32, usize> = HashMap::with_capacity(models.len());
        for (i, (m, &r)) in models.iter().zip(&ranks).enumerate() {
            if r == 0 {
                return Err(RankError::ZeroRank(m.id().to_string()));
            }
            if index.insert(m.id().to_string(), i).is_some() {
                return Err(RankError::DuplicateId(m.id().to_string()));
            }
            if let Some(&other) = by_rank.get(&r) {
                return Err(RankError::DuplicateRank {
                    rank: r,
                    first: models[other].id().to_string(),
                    second: m.id().to_string(),
                });
            }
            by_rank.insert(r, i);
        }
        Ok(Self { models, ranks, index })
    }

    /// Ranks 1, 2, … in the given order.
    pub fn in_order(models: Vec<LocalProcessModel>) -> Result<Self, RankError> {
        let ranks = (1..=models.len() as u32).collect();
        Self::new(models, ranks)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[LocalProcessModel] {
        &self.models
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    pub fn rank(&self, id: &str) -> Option<u32> {
        self.index.get(id).map(|&i| self.ranks[i])
    }

    pub fn model(&self, id: &str) -> Option<&LocalProcessModel> {
        self.index.get(id).map(|&i| &self.models[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LocalProcessModel, u32)> {
        self.models.iter().zip(self.ranks.iter().copied())
    }

    /// Models in rank order, best first.
    pub fn by_rank(&self) -> Vec<(&LocalProcessModel, u32)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_unstable_by_key(|&(_, r)| r);
        v
    }

    /// The models named by `ids`, keeping their ranks.
    pub fn subset<S: AsRef<str>>(&self, ids: &[S]) -> Result<RankedModelSet, RankError> {
        let mut models = Vec::with_capacity(ids.len());
        let mut ranks = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            let &i = self.index.get(id).ok_or_else(|| RankError::UnknownId(id.to_string()))?;
            models.push(self.models[i].clone());
            ranks.push(self.ranks[i]);
        }
        RankedModelSet::new(models, ranks)
    }
}
