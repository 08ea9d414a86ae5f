use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pnml::{read_pnml, write_lpm, PnmlError};
use crate::clustering::{RankError, RankedModelSet};
use crate::petri::{InvalidModel, LocalProcessModel};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid manifest: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("manifest lists no models")]
    Empty,
    #[error("model id `{id}` appears in entries {first} and {second}")]
    DuplicateId { id: String, first: usize, second: usize },
    #[error("rank {rank} is given to both `{first}` and `{second}`")]
    DuplicateRank { rank: u32, first: String, second: String },
    #[error("model `{0}` has rank 0; ranks start at 1")]
    ZeroRank(String),
    #[error("model `{id}`: {source}")]
    Model {
        id: String,
        #[source]
        source: PnmlError,
    },
    #[error(transparent)]
    Invalid(#[from] InvalidModel),
    #[error(transparent)]
    Rank(#[from] RankError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    pub rank: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    pub models: Vec<ManifestEntry>,
}

impl Manifest {
    /// Checks id and rank uniqueness without touching the model files.
    pub fn check(&self) -> Result<(), ManifestError> {
        if self.models.is_empty() {
            return Err(ManifestError::Empty);
        }
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut ranks: HashMap<u32, &str> = HashMap::new();
        for (i, e) in self.models.iter().enumerate() {
            if let Some(&first) = ids.get(e.id.as_str()) {
                return Err(ManifestError::DuplicateId {
                    id: e.id.clone(),
                    first,
                    second: i,
                });
            }
            ids.insert(&e.id, i);
            if e.rank == 0 {
                return Err(ManifestError::ZeroRank(e.id.clone()));
            }
            if let Some(first) = ranks.get(&e.rank) {
                return Err(ManifestError::DuplicateRank {
                    rank: e.rank,
                    first: first.to_string(),
                    second: e.id.clone(),
                });
            }
            ranks.insert(e.rank, &e.id);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub manifest: Manifest,
    pub ranked: RankedModelSet,
    /// Models dropped under `skip_invalid`.
    pub skipped: Vec<InvalidModel>,
}

/// Reads a manifest and every model it lists.
///
/// Invalid models abort the load unless `skip_invalid` is set, in which
/// case they are dropped and reported in [`LoadedManifest::skipped`].
pub fn load_manifest(path: &Path, skip_invalid: bool) -> Result<LoadedManifest, ManifestError> {
    let raw = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let manifest: Manifest = serde_json::from_str(&raw).map_err(|source| ManifestError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    manifest.check()?;
    let base = path.parent().unwrap_or(Path::new("."));

    let mut models = Vec::with_capacity(manifest.models.len());
    let mut ranks = Vec::with_capacity(manifest.models.len());
    let mut skipped = Vec::new();
    for entry in &manifest.models {
        let file = base.join(&entry.path);
        let (net, initial, final_marking) = read_pnml(&file).map_err(|source| ManifestError::Model {
            id: entry.id.clone(),
            source,
        })?;
        match LocalProcessModel::new(entry.id.clone(), net, initial, final_marking) {
            Ok(m) => {
                models.push(m);
                ranks.push(entry.rank);
            }
            Err(invalid) if skip_invalid => skipped.push(invalid),
            Err(invalid) => return Err(invalid.into()),
        }
    }
    let ranked = RankedModelSet::new(models, ranks)?;
    Ok(LoadedManifest {
        manifest,
        ranked,
        skipped,
    })
}

/// Writes every model as `<dir>/models/<id>.pnml` plus `<dir>/manifest.json`
/// and returns the manifest path.
pub fn write_model_set(
    dir: &Path,
    ranked: &RankedModelSet,
    bound: Option<usize>,
    measure: Option<&str>,
) -> std::io::Result<PathBuf> {
    let models_dir = dir.join("models");
    fs::create_dir_all(&models_dir)?;
    let mut entries = Vec::with_capacity(ranked.len());
    for (model, rank) in ranked.iter() {
        let rel = PathBuf::from("models").join(format!("{}.pnml", model.id()));
        fs::write(dir.join(&rel), write_lpm(model))?;
        entries.push(ManifestEntry {
            id: model.id().to_string(),
            path: rel,
            rank,
        });
    }
    let manifest = Manifest {
        bound,
        measure: measure.map(str::to_string),
        models: entries,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")?;
    Ok(path)
}
