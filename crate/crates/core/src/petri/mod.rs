//! Petri-net data model, token game and bounded behavioral abstractions.

mod language;
mod net;
mod semantics;

pub use language::{bounded_language, ef_relation, BoundedLanguage, EFRelation, Trace, DEFAULT_BOUND};
pub use net::{
    validate_lpm, Arc, InvalidModel, Label, LabeledPetriNet, LocalProcessModel, Marking, NetBuilder, NetError,
    PlaceId, TransitionId, ValidationReport, Violation,
};
pub use semantics::{
    complete_firing_sequences, enabled, fire, unrestricted_transitions, valid_complete_firing_sequences,
    FireError, FiringSequence, FiringSequences, FreePlaces, DEFAULT_EXPLORATION_CAP,
};
