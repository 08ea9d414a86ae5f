//! Bounded languages and the eventually-follows relation.

use std::collections::{BTreeSet, HashSet};

use super::net::{Label, LocalProcessModel};
use super::semantics::{State, Stepper};

/// Default maximum firing-sequence length.
pub const DEFAULT_BOUND: usize = 10;

/// A silent-free sequence of activity names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Trace(pub Vec<String>);

impl Trace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Trace(labels.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Projection of a label sequence onto activities.
    pub fn project<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        Trace(
            labels
                .into_iter()
                .filter_map(|l| l.as_activity().map(str::to_string))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub bound: usize,
    pub traces: BTreeSet<Trace>,
    pub truncated: bool,
}

impl BoundedLanguage {
    pub fn from_traces(bound: usize, traces: impl IntoIterator<Item = Trace>) -> Self {
        Self {
            bound,
            traces: traces.into_iter().collect(),
            truncated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Silent-free traces of all valid complete firing sequences of length
/// `1..=bound`.
///
/// Breadth first over `(state, projected trace)` nodes: prefixes that agree
/// on both have the same futures, so they are merged. More than `cap`
/// distinct nodes sets `truncated` and keeps what was found so far.
pub fn bounded_language(lpm: &LocalProcessModel, bound: usize, cap: usize) -> BoundedLanguage {
    let net = lpm.net();
    let stepper = Stepper::new(net, lpm.final_marking());

    // Label indices keep the frontier compact; u32::MAX marks silent.
    let activities: Vec<&str> = net.activity_labels().into_iter().collect();
    let label_index: Vec<u32> = net
        .transitions()
        .map(|t| match net.label(t).as_activity() {
            Some(a) => activities.binary_search(&a).expect("label listed") as u32,
            None => u32::MAX,
        })
        .collect();

    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut frontier: Vec<(State, Vec<u32>)> = vec![(stepper.initial(lpm.initial()), Vec::new())];
    let mut explored = 0usize;
    let mut truncated = false;

    'levels: for _ in 0..bound {
        let mut seen: HashSet<(State, Vec<u32>)> = HashSet::new();
        let mut next_frontier = Vec::new();
        for (state, trace) in &frontier {
            for t in stepper.transitions() {
                let Some(next) = stepper.step(state, t) else {
                    continue;
                };
                let mut next_trace = trace.clone();
                if label_index[t.0] != u32::MAX {
                    next_trace.push(label_index[t.0]);
                }
                let node = (next, next_trace);
                if seen.contains(&node) {
                    continue;
                }
                explored += 1;
                if explored > cap {
                    truncated = true;
                    break 'levels;
                }
                if stepper.is_final(&node.0) {
                    found.insert(node.1.clone());
                }
                seen.insert(node.clone());
                next_frontier.push(node);
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }

    BoundedLanguage {
        bound,
        traces: found
            .into_iter()
            .map(|idx| Trace(idx.into_iter().map(|i| activities[i as usize].to_string()).collect()))
            .collect(),
        truncated,
    }
}

/// Ordered activity pairs `(a, b)` with `a` strictly before `b` in some trace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EFRelation {
    pub pairs: BTreeSet<(String, String)>,
}

impl EFRelation {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn ef_relation(language: &BoundedLanguage) -> EFRelation {
    let mut pairs = BTreeSet::new();
    for trace in &language.traces {
        for (i, a) in trace.0.iter().enumerate() {
            for b in &trace.0[i + 1..] {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    EFRelation { pairs }
}
