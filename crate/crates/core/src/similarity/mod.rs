//! Model similarity measures, their combinatorial kernels and pairwise
//! distance matrices.

mod assignment;
mod ged;
mod levenshtein;
mod matrix;
mod measures;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use assignment::{optimal_assignment, Assignment, GainMatrix};
pub use ged::{ged_raw, GedOutcome, DEFAULT_GED_BUDGET};
pub use levenshtein::{levenshtein, normalized_levenshtein};
pub use matrix::{distance_matrix, DistanceMatrix, MatrixError};
pub use measures::{
    dice, distance, place_gain, sim_efg, sim_full, sim_ged, sim_node, sim_transition, similarity,
};

use crate::petri::{DEFAULT_BOUND, DEFAULT_EXPLORATION_CAP};

/// Default number of traces kept per language by the full-trace measure.
pub const DEFAULT_LANGUAGE_CAP: usize = 1_000;

/// Which measure to use; the behavioral ones carry the sequence bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureId {
    Transition,
    Node,
    Efg(usize),
    Full(usize),
    Ged,
}

impl MeasureId {
    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Transition => "transition",
            MeasureId::Node => "node",
            MeasureId::Efg(_) => "efg",
            MeasureId::Full(_) => "full",
            MeasureId::Ged => "ged",
        }
    }

    pub fn bound(self) -> Option<usize> {
        match self {
            MeasureId::Efg(n) | MeasureId::Full(n) => Some(n),
            _ => None,
        }
    }

    /// Builds a measure from its name, using `bound` for efg and full.
    pub fn from_name(name: &str, bound: usize) -> Result<Self, ParseMeasureError> {
        match name {
            "transition" => Ok(MeasureId::Transition),
            "node" => Ok(MeasureId::Node),
            "efg" => Ok(MeasureId::Efg(bound)),
            "full" => Ok(MeasureId::Full(bound)),
            "ged" => Ok(MeasureId::Ged),
            other => Err(ParseMeasureError(other.to_string())),
        }
    }

    pub fn all(bound: usize) -> [MeasureId; 5] {
        [
            MeasureId::Transition,
            MeasureId::Node,
            MeasureId::Efg(bound),
            MeasureId::Full(bound),
            MeasureId::Ged,
        ]
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound() {
            Some(n) => write!(f, "{}:{n}", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown measure `{0}` (expected transition, node, efg, full or ged)")]
pub struct ParseMeasureError(pub String);

impl FromStr for MeasureId {
    type Err = ParseMeasureError;

    /// Accepts `name` or `name:bound`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((name, bound)) => {
                let n: usize = bound.parse().map_err(|_| ParseMeasureError(s.to_string()))?;
                if n == 0 {
                    return Err(ParseMeasureError(s.to_string()));
                }
                let m = MeasureId::from_name(name, n)?;
                if m.bound().is_none() {
                    return Err(ParseMeasureError(s.to_string()));
                }
                Ok(m)
            }
            None => MeasureId::from_name(s, DEFAULT_BOUND),
        }
    }
}

/// Limits that keep the combinatorial kernels bounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityConfig {
    /// Explored search nodes per language enumeration.
    pub exploration_cap: usize,
    /// Traces per side for the full-trace measure.
    pub language_cap: usize,
    /// Search nodes per graph-edit-distance pair.
    pub ged_budget: usize,
}

impl Default for SimilarityConfig {
    fn default() -> Self {
        Self {
            exploration_cap: DEFAULT_EXPLORATION_CAP,
            language_cap: DEFAULT_LANGUAGE_CAP,
            ged_budget: DEFAULT_GED_BUDGET,
        }
    }
}

/// A similarity or distance value with its approximation marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    /// Set when a language was truncated, capped, or GED search ran out.
    pub approximate: bool,
}

impl Score {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            approximate: false,
        }
    }
}
