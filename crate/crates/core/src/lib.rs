//! Grouping of local process models.
//!
//! Models are compared pairwise under one of five similarity measures,
//! clustered with complete-linkage agglomeration, and reduced to one
//! representative per cluster. The [`analysis`] module quantifies how much
//! the representative set shrinks and diversifies the original ranking.

pub mod analysis;
pub mod clustering;
pub mod exec;
pub mod io;
pub mod petri;
pub mod similarity;
pub mod synth;
