//! File formats: PNML models, JSON manifests, CSV/JSON exports and DOT.

mod dot;
mod export;
mod manifest;
mod pnml;

pub use dot::to_dot;
pub use export::{
    clusters_csv, diversity_csv, export_matrix, matrix_csv, matrix_json, matrix_meta_path, read_clusters_csv,
    read_matrix, reduction_csv, write_file, ExportError,
};
pub use manifest::{load_manifest, write_model_set, LoadedManifest, Manifest, ManifestEntry, ManifestError};
pub use pnml::{parse_pnml, read_pnml, sidecar_path, write_lpm, write_pnml, Location, PnmlError, PnmlNet};
