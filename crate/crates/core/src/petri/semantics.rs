//! Token game with the one-free-token-per-place restriction on
//! unrestricted transitions, and bounded enumeration of complete runs.

use std::collections::BTreeSet;

use thiserror::Error;

use super::net::{LabeledPetriNet, LocalProcessModel, Marking, PlaceId, TransitionId};

/// Places that already received a token from an unrestricted transition.
pub type FreePlaces = BTreeSet<PlaceId>;

/// Default cap on explored prefixes during enumeration.
pub const DEFAULT_EXPLORATION_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FireError {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
}

/// Transitions with an empty preset.
pub fn unrestricted_transitions(net: &LabeledPetriNet) -> BTreeSet<TransitionId> {
    net.transitions().filter(|&t| net.preset(t).is_empty()).collect()
}

fn is_enabled(net: &LabeledPetriNet, marking: &Marking, used: &FreePlaces, t: TransitionId) -> bool {
    let pre = net.preset(t);
    if pre.is_empty() {
        net.postset(t).iter().all(|p| !used.contains(p))
    } else {
        pre.iter().all(|&p| marking.count(p) > 0)
    }
}

/// Transitions enabled in `marking`, given the free-token history `used`.
pub fn enabled(net: &LabeledPetriNet, marking: &Marking, used: &FreePlaces) -> BTreeSet<TransitionId> {
    net.transitions()
        .filter(|&t| is_enabled(net, marking, used, t))
        .collect()
}

/// Fires `t`, returning the successor marking and updated free-token history.
pub fn fire(
    net: &LabeledPetriNet,
    marking: &Marking,
    t: TransitionId,
    used: &FreePlaces,
) -> Result<(Marking, FreePlaces), FireError> {
    if !is_enabled(net, marking, used, t) {
        return Err(FireError::NotEnabled(net.transition_name(t).to_string()));
    }
    let mut next = marking.clone();
    for &p in net.preset(t) {
        next.remove_one(p);
    }
    for &p in net.postset(t) {
        next.add(p, 1);
    }
    let mut used = used.clone();
    if net.preset(t).is_empty() {
        used.extend(net.postset(t).iter().copied());
    }
    Ok((next, used))
}

/// A sequence of transition firings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiringSequence(pub Vec<TransitionId>);

impl FiringSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Replays the sequence from `initial`; returns the reached marking.
    pub fn replay(&self, net: &LabeledPetriNet, initial: &Marking) -> Result<Marking, FireError> {
        let mut marking = initial.clone();
        let mut used = FreePlaces::new();
        for &t in &self.0 {
            let (m, u) = fire(net, &marking, t, &used)?;
            marking = m;
            used = u;
        }
        Ok(marking)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringSequences {
    pub sequences: BTreeSet<FiringSequence>,
    pub truncated: bool,
}

/// Dense, hashable state used by the enumerators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct State {
    pub tokens: Box<[u32]>,
    pub used: Box<[bool]>,
}

/// Precomputed dense view of a model for fast successor generation.
pub(crate) struct Stepper<'a> {
    net: &'a LabeledPetriNet,
    final_tokens: Vec<u32>,
}

impl<'a> Stepper<'a> {
    pub fn new(net: &'a LabeledPetriNet, final_marking: &Marking) -> Self {
        Self {
            net,
            final_tokens: final_marking.to_dense(net.place_count()),
        }
    }

    pub fn initial(&self, initial: &Marking) -> State {
        State {
            tokens: initial.to_dense(self.net.place_count()).into_boxed_slice(),
            used: vec![false; self.net.place_count()].into_boxed_slice(),
        }
    }

    pub fn is_final(&self, state: &State) -> bool {
        *state.tokens == *self.final_tokens
    }

    pub fn step(&self, state: &State, t: TransitionId) -> Option<State> {
        let pre = self.net.preset(t);
        let post = self.net.postset(t);
        if pre.is_empty() {
            if post.iter().any(|p| state.used[p.0]) {
                return None;
            }
        } else if pre.iter().any(|p| state.tokens[p.0] == 0) {
            return None;
        }
        let mut next = state.clone();
        for p in pre {
            next.tokens[p.0] -= 1;
        }
        for p in post {
            next.tokens[p.0] += 1;
            if pre.is_empty() {
                next.used[p.0] = true;
            }
        }
        Some(next)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransitionId> {
        self.net.transitions()
    }
}

/// All valid complete firing sequences of length `1..=bound`.
///
/// Enumeration is depth first in transition order and stops once more than
/// `cap` prefixes were explored, in which case `truncated` is set.
pub fn valid_complete_firing_sequences(lpm: &LocalProcessModel, bound: usize, cap: usize) -> FiringSequences {
    complete_firing_sequences(lpm.net(), lpm.initial(), lpm.final_marking(), bound, cap)
}

/// Same enumeration on an arbitrary accepting net (no well-formedness check).
pub fn complete_firing_sequences(
    net: &LabeledPetriNet,
    initial: &Marking,
    final_marking: &Marking,
    bound: usize,
    cap: usize,
) -> FiringSequences {
    let stepper = Stepper::new(net, final_marking);
    let mut sequences = BTreeSet::new();
    let mut explored = 0usize;
    let mut truncated = false;
    let mut stack: Vec<(State, Vec<TransitionId>)> = vec![(stepper.initial(initial), Vec::new())];

    'search: while let Some((state, prefix)) = stack.pop() {
        if prefix.len() >= bound {
            continue;
        }
        let mut children = Vec::new();
        for t in stepper.transitions() {
            if let Some(next) = stepper.step(&state, t) {
                explored += 1;
                if explored > cap {
                    truncated = true;
                    break 'search;
                }
                let mut seq = prefix.clone();
                seq.push(t);
                if stepper.is_final(&next) {
                    sequences.insert(FiringSequence(seq.clone()));
                }
                children.push((next, seq));
            }
        }
        stack.extend(children.into_iter().rev());
    }

    FiringSequences { sequences, truncated }
}
