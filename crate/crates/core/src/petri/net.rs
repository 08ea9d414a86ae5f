//! Labeled Petri nets, markings and local process models.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Transition label: an activity name or the silent step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Activity(String),
    Silent,
}

impl Label {
    /// Builds an activity label; an empty (or whitespace-only) name is silent.
    pub fn activity(name: impl Into<String>) -> Self {
        let name = name.into();
        if name.trim().is_empty() {
            Label::Silent
        } else {
            Label::Activity(name)
        }
    }

    pub fn is_silent(&self) -> bool {
        matches!(self, Label::Silent)
    }

    pub fn as_activity(&self) -> Option<&str> {
        match self {
            Label::Activity(name) => Some(name),
            Label::Silent => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Activity(name) => f.write_str(name),
            Label::Silent => f.write_str("τ"),
        }
    }
}

/// Index of a place inside its net. Places are ordered by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

/// Index of a transition inside its net. Transitions are ordered by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

/// A directed arc of the flow relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arc {
    PlaceToTransition(PlaceId, TransitionId),
    TransitionToPlace(TransitionId, PlaceId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("node id `{0}` is used both as place and as transition")]
    NamespaceClash(String),
    #[error("arc references unknown node `{0}`")]
    UnknownNode(String),
    #[error("arc `{0}` -> `{1}` connects two nodes of the same kind")]
    SameKindArc(String, String),
    #[error("marking references unknown place `{0}`")]
    UnknownPlace(String),
}

/// Name-based builder; [`NetBuilder::build`] sorts nodes by name so that
/// structurally equal nets get identical indices.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<(String, Label)>,
    arcs: Vec<(String, String)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(&mut self, id: impl Into<String>) -> &mut Self {
        self.places.push(id.into());
        self
    }

    pub fn transition(&mut self, id: impl Into<String>, label: Label) -> &mut Self {
        self.transitions.push((id.into(), label));
        self
    }

    pub fn arc(&mut self, source: impl Into<String>, target: impl Into<String>) -> &mut Self {
        self.arcs.push((source.into(), target.into()));
        self
    }

    pub fn build(&self) -> Result<LabeledPetriNet, NetError> {
        let mut place_names: Vec<String> = self.places.clone();
        place_names.sort();
        if let Some(dup) = first_duplicate(&place_names) {
            return Err(NetError::DuplicateNode(dup.to_string()));
        }
        let mut transitions = self.transitions.clone();
        transitions.sort_by(|a, b| a.0.cmp(&b.0));
        let transition_names: Vec<String> = transitions.iter().map(|(n, _)| n.clone()).collect();
        if let Some(dup) = first_duplicate(&transition_names) {
            return Err(NetError::DuplicateNode(dup.to_string()));
        }
        let place_index: HashMap<&str, usize> = place_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let transition_index: HashMap<&str, usize> = transition_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        if let Some(clash) = transition_names
            .iter()
            .find(|n| place_index.contains_key(n.as_str()))
        {
            return Err(NetError::NamespaceClash(clash.clone()));
        }

        let mut arcs = BTreeSet::new();
        for (source, target) in &self.arcs {
            let arc = match (
                place_index.get(source.as_str()),
                transition_index.get(source.as_str()),
                place_index.get(target.as_str()),
                transition_index.get(target.as_str()),
            ) {
                (Some(&p), _, _, Some(&t)) => Arc::PlaceToTransition(PlaceId(p), TransitionId(t)),
                (_, Some(&t), Some(&p), _) => Arc::TransitionToPlace(TransitionId(t), PlaceId(p)),
                (None, None, _, _) => return Err(NetError::UnknownNode(source.clone())),
                (_, _, None, None) => return Err(NetError::UnknownNode(target.clone())),
                _ => return Err(NetError::SameKindArc(source.clone(), target.clone())),
            };
            arcs.insert(arc);
        }

        Ok(LabeledPetriNet::assemble(
            place_names,
            transitions,
            arcs.into_iter().collect(),
        ))
    }
}

fn first_duplicate(sorted: &[String]) -> Option<&str> {
    sorted
        .windows(2)
        .find(|w| w[0] == w[1])
        .map(|w| w[0].as_str())
}

/// A labeled Petri net `(P, T, F, l)` with cached presets and postsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPetriNet {
    place_names: Vec<String>,
    transition_names: Vec<String>,
    labels: Vec<Label>,
    arcs: Vec<Arc>,
    transition_pre: Vec<Vec<PlaceId>>,
    transition_post: Vec<Vec<PlaceId>>,
    place_pre: Vec<Vec<TransitionId>>,
    place_post: Vec<Vec<TransitionId>>,
}

impl LabeledPetriNet {
    fn assemble(place_names: Vec<String>, transitions: Vec<(String, Label)>, arcs: Vec<Arc>) -> Self {
        let (transition_names, labels): (Vec<_>, Vec<_>) = transitions.into_iter().unzip();
        let mut transition_pre = vec![Vec::new(); transition_names.len()];
        let mut transition_post = vec![Vec::new(); transition_names.len()];
        let mut place_pre = vec![Vec::new(); place_names.len()];
        let mut place_post = vec![Vec::new(); place_names.len()];
        for arc in &arcs {
            match *arc {
                Arc::PlaceToTransition(p, t) => {
                    transition_pre[t.0].push(p);
                    place_post[p.0].push(t);
                }
                Arc::TransitionToPlace(t, p) => {
                    transition_post[t.0].push(p);
                    place_pre[p.0].push(t);
                }
            }
        }
        for list in transition_pre.iter_mut().chain(transition_post.iter_mut()) {
            list.sort();
        }
        for list in place_pre.iter_mut().chain(place_post.iter_mut()) {
            list.sort();
        }
        Self {
            place_names,
            transition_names,
            labels,
            arcs,
            transition_pre,
            transition_post,
            place_pre,
            place_post,
        }
    }

    pub fn place_count(&self) -> usize {
        self.place_names.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transition_names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `|P| + |T| + |F|`.
    pub fn size(&self) -> usize {
        self.place_count() + self.transition_count() + self.arc_count()
    }

    pub fn places(&self) -> impl ExactSizeIterator<Item = PlaceId> {
        (0..self.place_names.len()).map(PlaceId)
    }

    pub fn transitions(&self) -> impl ExactSizeIterator<Item = TransitionId> {
        (0..self.transition_names.len()).map(TransitionId)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.place_names[p.0]
    }

    pub fn transition_name(&self, t: TransitionId) -> &str {
        &self.transition_names[t.0]
    }

    pub fn label(&self, t: TransitionId) -> &Label {
        &self.labels[t.0]
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.place_names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(PlaceId)
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        self.transition_names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(TransitionId)
    }

    /// Input places of `t`, sorted.
    pub fn preset(&self, t: TransitionId) -> &[PlaceId] {
        &self.transition_pre[t.0]
    }

    /// Output places of `t`, sorted.
    pub fn postset(&self, t: TransitionId) -> &[PlaceId] {
        &self.transition_post[t.0]
    }

    /// Transitions producing into `p`.
    pub fn place_preset(&self, p: PlaceId) -> &[TransitionId] {
        &self.place_pre[p.0]
    }

    /// Transitions consuming from `p`.
    pub fn place_postset(&self, p: PlaceId) -> &[TransitionId] {
        &self.place_post[p.0]
    }

    pub fn has_arc(&self, arc: Arc) -> bool {
        self.arcs.binary_search(&arc).is_ok()
    }

    /// Set of non-silent labels, `l(T) \ {τ}`.
    pub fn activity_labels(&self) -> BTreeSet<&str> {
        self.labels.iter().filter_map(Label::as_activity).collect()
    }

    /// Labels of the transitions around a place, silent included.
    pub fn place_input_labels(&self, p: PlaceId) -> BTreeSet<&Label> {
        self.place_pre[p.0].iter().map(|&t| self.label(t)).collect()
    }

    pub fn place_output_labels(&self, p: PlaceId) -> BTreeSet<&Label> {
        self.place_post[p.0].iter().map(|&t| self.label(t)).collect()
    }

    /// A string that identifies the net up to equality. Used to fix the
    /// operand order of asymmetric computations.
    pub fn canonical_key(&self) -> String {
        let mut key = String::new();
        for name in &self.place_names {
            key.push_str("p:");
            key.push_str(name);
            key.push('\u{1}');
        }
        for (name, label) in self.transition_names.iter().zip(&self.labels) {
            key.push_str("t:");
            key.push_str(name);
            key.push('=');
            match label {
                Label::Activity(a) => {
                    key.push('a');
                    key.push_str(a)
                }
                Label::Silent => key.push('s'),
            }
            key.push('\u{1}');
        }
        for arc in &self.arcs {
            match arc {
                Arc::PlaceToTransition(p, t) => key.push_str(&format!("f:{}>{}", p.0, t.0)),
                Arc::TransitionToPlace(t, p) => key.push_str(&format!("f:{}<{}", p.0, t.0)),
            }
            key.push('\u{1}');
        }
        key
    }
}

/// Multiset of places.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    tokens: BTreeMap<PlaceId, u32>,
}

impl Marking {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_places(places: impl IntoIterator<Item = PlaceId>) -> Self {
        let mut marking = Self::empty();
        for p in places {
            marking.add(p, 1);
        }
        marking
    }

    /// Builds a marking from `(place name, count)` pairs.
    pub fn from_named<'a>(
        net: &LabeledPetriNet,
        entries: impl IntoIterator<Item = (&'a str, u32)>,
    ) -> Result<Self, NetError> {
        let mut marking = Self::empty();
        for (name, count) in entries {
            let p = net
                .place_id(name)
                .ok_or_else(|| NetError::UnknownPlace(name.to_string()))?;
            marking.add(p, count);
        }
        Ok(marking)
    }

    pub fn add(&mut self, p: PlaceId, count: u32) {
        if count > 0 {
            *self.tokens.entry(p).or_insert(0) += count;
        }
    }

    /// Removes one token; returns false when `p` holds none.
    pub fn remove_one(&mut self, p: PlaceId) -> bool {
        match self.tokens.get_mut(&p) {
            Some(count) if *count > 1 => {
                *count -= 1;
                true
            }
            Some(_) => {
                self.tokens.remove(&p);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, p: PlaceId) -> u32 {
        self.tokens.get(&p).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, u32)> + '_ {
        self.tokens.iter().map(|(&p, &c)| (p, c))
    }

    pub fn total(&self) -> u64 {
        self.tokens.values().map(|&c| c as u64).sum()
    }

    pub(crate) fn to_dense(&self, places: usize) -> Vec<u32> {
        let mut dense = vec![0; places];
        for (p, c) in self.iter() {
            dense[p.0] = c;
        }
        dense
    }
}

/// A violated well-formedness constraint of a local process model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than one weakly connected component; lists the node names of each.
    Disconnected { components: Vec<Vec<String>> },
    PlaceWithoutIncomingArc(String),
    PlaceWithoutOutgoingArc(String),
    /// Marking refers to a place index outside the net.
    MarkingOutOfRange { marking: &'static str, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Disconnected { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| format!("{{{}}}", c.join(", ")))
                    .collect();
                write!(f, "disconnected: {}", parts.join(" "))
            }
            Violation::PlaceWithoutIncomingArc(p) => write!(f, "place without incoming arc: {p}"),
            Violation::PlaceWithoutOutgoingArc(p) => write!(f, "place without outgoing arc: {p}"),
            Violation::MarkingOutOfRange { marking, index } => {
                write!(f, "{marking} marking references unknown place #{index}")
            }
        }
    }
}

/// Outcome of [`validate_lpm`]; empty means the model is well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Checks connectivity, place arcs and marking ranges. Violations are data.
pub fn validate_lpm(net: &LabeledPetriNet, initial: &Marking, final_marking: &Marking) -> ValidationReport {
    let mut violations = Vec::new();

    let components = weak_components(net);
    if components.len() > 1 {
        violations.push(Violation::Disconnected {
            components: components
                .iter()
                .map(|c| c.iter().map(|&n| node_name(net, n).to_string()).collect())
                .collect(),
        });
    }
    for p in net.places() {
        if net.place_preset(p).is_empty() {
            violations.push(Violation::PlaceWithoutIncomingArc(net.place_name(p).to_string()));
        }
        if net.place_postset(p).is_empty() {
            violations.push(Violation::PlaceWithoutOutgoingArc(net.place_name(p).to_string()));
        }
    }
    for (which, marking) in [("initial", initial), ("final", final_marking)] {
        for (p, _) in marking.iter() {
            if p.0 >= net.place_count() {
                violations.push(Violation::MarkingOutOfRange {
                    marking: which,
                    index: p.0,
                });
            }
        }
    }
    ValidationReport { violations }
}

// Nodes are numbered places first, then transitions.
fn node_name(net: &LabeledPetriNet, node: usize) -> &str {
    if node < net.place_count() {
        net.place_name(PlaceId(node))
    } else {
        net.transition_name(TransitionId(node - net.place_count()))
    }
}

fn weak_components(net: &LabeledPetriNet) -> Vec<Vec<usize>> {
    let n = net.place_count() + net.transition_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let offset = net.place_count();
    for arc in net.arcs() {
        let (a, b) = match *arc {
            Arc::PlaceToTransition(p, t) | Arc::TransitionToPlace(t, p) => (p.0, offset + t.0),
        };
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for node in 0..n {
        let root = find(&mut parent, node);
        groups.entry(root).or_default().push(node);
    }
    groups.into_values().collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("model `{id}` is not a valid local process model: {report}")]
pub struct InvalidModel {
    pub id: String,
    pub report: ValidationReport,
}

/// An accepting labeled Petri net that satisfies the well-formedness rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalProcessModel {
    id: String,
    net: LabeledPetriNet,
    initial: Marking,
    final_marking: Marking,
}

impl LocalProcessModel {
    pub fn new(
        id: impl Into<String>,
        net: LabeledPetriNet,
        initial: Marking,
        final_marking: Marking,
    ) -> Result<Self, InvalidModel> {
        let id = id.into();
        let report = validate_lpm(&net, &initial, &final_marking);
        if !report.is_ok() {
            return Err(InvalidModel { id, report });
        }
        Ok(Self {
            id,
            net,
            initial,
            final_marking,
        })
    }

    /// Model with empty initial and final marking.
    pub fn with_empty_markings(id: impl Into<String>, net: LabeledPetriNet) -> Result<Self, InvalidModel> {
        Self::new(id, net, Marking::empty(), Marking::empty())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn net(&self) -> &LabeledPetriNet {
        &self.net
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    pub fn with_id(&self, id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            ..self.clone()
        }
    }
}
