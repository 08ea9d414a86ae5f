//! Graph edit distance between labeled Petri nets.
//!
//! Nodes are places and transitions, edges are arcs. Node substitution costs
//! 1 across kinds or between differently labeled transitions, 0 between
//! equally labeled transitions and `1 - g(p, q)` between places. Insertions
//! and deletions cost 1. A substituted edge costs the mean of its two
//! endpoint substitution costs.
//!
//! The search is a depth-first branch and bound over node maps. It runs in
//! `f64`; the cost of the winning map is then recomputed with big
//! rationals, so distinct optima can never be confused by rounding.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::measures::{place_gain, place_gain_exact};
use crate::petri::{Arc, LabeledPetriNet, PlaceId, TransitionId};

/// Default search-node budget per pair.
pub const DEFAULT_GED_BUDGET: usize = 1_000_000;

// Pruning slack; distinct rational costs of realistic nets differ by far more.
const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GedOutcome {
    pub cost: f64,
    /// False when the budget ran out and `cost` is the best map found.
    pub exact: bool,
    /// Image in `b` of each node of `a` (places first, then transitions).
    pub mapping: Vec<Option<usize>>,
    pub expanded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

/// Node and edge view of a net, places first.
pub(crate) struct Graph<'a> {
    pub net: &'a LabeledPetriNet,
    pub nodes: Vec<Node>,
    pub edges: Vec<(usize, usize)>,
    pub adjacent: Vec<bool>,
    pub neighbours: Vec<Vec<usize>>,
}

impl<'a> Graph<'a> {
    pub fn new(net: &'a LabeledPetriNet) -> Self {
        let np = net.place_count();
        let mut nodes: Vec<Node> = net.places().map(Node::Place).collect();
        nodes.extend(net.transitions().map(Node::Transition));
        let n = nodes.len();
        let mut adjacent = vec![false; n * n];
        let mut neighbours = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(net.arc_count());
        for arc in net.arcs() {
            let (u, v) = match *arc {
                Arc::PlaceToTransition(p, t) => (p.0, np + t.0),
                Arc::TransitionToPlace(t, p) => (np + t.0, p.0),
            };
            edges.push((u, v));
            adjacent[u * n + v] = true;
            neighbours[u].push(v);
            neighbours[v].push(u);
        }
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
        }
        Self {
            net,
            nodes,
            edges,
            adjacent,
            neighbours,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacent[u * self.nodes.len() + v]
    }
}

fn substitution_cost(a: &Graph, u: usize, b: &Graph, x: usize) -> f64 {
    match (a.nodes[u], b.nodes[x]) {
        (Node::Place(p), Node::Place(q)) => 1.0 - place_gain(a.net, p, b.net, q),
        (Node::Transition(s), Node::Transition(t)) => {
            if a.net.label(s) == b.net.label(t) {
                0.0
            } else {
                1.0
            }
        }
        _ => 1.0,
    }
}

fn substitution_cost_exact(a: &Graph, u: usize, b: &Graph, x: usize) -> BigRational {
    match (a.nodes[u], b.nodes[x]) {
        (Node::Place(p), Node::Place(q)) => BigRational::one() - place_gain_exact(a.net, p, b.net, q),
        (Node::Transition(s), Node::Transition(t)) if a.net.label(s) == b.net.label(t) => BigRational::zero(),
        _ => BigRational::one(),
    }
}

/// Exact cost of a complete node map from `a` into `b`.
pub(crate) fn mapping_cost_exact(a: &Graph, b: &Graph, mapping: &[Option<usize>]) -> BigRational {
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let mut used = vec![false; b.len()];
    let mut cost = BigRational::zero();
    let sub: Vec<Option<BigRational>> = mapping
        .iter()
        .enumerate()
        .map(|(u, x)| x.map(|x| substitution_cost_exact(a, u, b, x)))
        .collect();
    for (u, x) in mapping.iter().enumerate() {
        match x {
            Some(x) => {
                used[*x] = true;
                cost += sub[u].clone().expect("mapped");
            }
            None => cost += &one,
        }
    }
    cost += BigRational::from_integer(used.iter().filter(|&&u| !u).count().into());
    let mut covered = 0usize;
    for &(u, v) in &a.edges {
        match (mapping[u], mapping[v]) {
            (Some(x), Some(y)) if b.has_edge(x, y) => {
                covered += 1;
                cost += (sub[u].clone().expect("mapped") + sub[v].clone().expect("mapped")) / &two;
            }
            _ => cost += &one,
        }
    }
    cost += BigRational::from_integer((b.edges.len() - covered).into());
    cost
}

struct Search<'g, 'a> {
    a: &'g Graph<'a>,
    b: &'g Graph<'a>,
    order: Vec<usize>,
    position: Vec<usize>,
    sub: Vec<f64>,
    // A edges with at least one endpoint at order position >= k.
    a_edges_remaining: Vec<usize>,
    mapping: Vec<Option<usize>>,
    preimage: Vec<Option<usize>>,
    b_edges_within_used: usize,
    best_cost: f64,
    best_mapping: Vec<Option<usize>>,
    budget: usize,
    expanded: usize,
    exhausted: bool,
}

impl Search<'_, '_> {
    fn sub(&self, u: usize, x: usize) -> f64 {
        self.sub[u * self.b.len() + x]
    }

    /// Cost added by mapping `u` to `target`, given the already placed nodes.
    fn increment(&self, u: usize, target: Option<usize>) -> f64 {
        let mut cost = match target {
            Some(x) => self.sub(u, x),
            None => 1.0,
        };
        let pos_u = self.position[u];
        for &w in &self.a.neighbours[u] {
            if self.position[w] >= pos_u {
                continue;
            }
            let y = self.mapping[w];
            for (from, to, img_from, img_to) in [(u, w, target, y), (w, u, y, target)] {
                if !self.a.has_edge(from, to) {
                    continue;
                }
                match (img_from, img_to) {
                    (Some(s), Some(t)) if self.b.has_edge(s, t) => {
                        cost += 0.5 * (self.sub(from, s) + self.sub(to, t));
                    }
                    _ => cost += 1.0,
                }
            }
        }
        if let Some(x) = target {
            for &y in &self.b.neighbours[x] {
                let Some(w) = self.preimage[y] else { continue };
                if self.b.has_edge(x, y) && !self.a.has_edge(u, w) {
                    cost += 1.0;
                }
                if self.b.has_edge(y, x) && !self.a.has_edge(w, u) {
                    cost += 1.0;
                }
            }
        }
        cost
    }

    fn lower_bound(&self, depth: usize) -> f64 {
        let remaining_a = &self.order[depth..];
        let free_b: Vec<usize> = (0..self.b.len()).filter(|&x| self.preimage[x].is_none()).collect();
        let mut min_a = vec![1.0f64; remaining_a.len()];
        let mut min_b = vec![1.0f64; free_b.len()];
        for (i, &u) in remaining_a.iter().enumerate() {
            for (j, &x) in free_b.iter().enumerate() {
                let c = self.sub(u, x);
                min_a[i] = min_a[i].min(c);
                min_b[j] = min_b[j].min(c);
            }
        }
        let spread = remaining_a.len().abs_diff(free_b.len()) as f64;
        let halves = 0.5 * (min_a.iter().sum::<f64>() + min_b.iter().sum::<f64>());
        let b_edges_remaining = self.b.edges.len() - self.b_edges_within_used;
        let edges = self.a_edges_remaining[depth].abs_diff(b_edges_remaining) as f64;
        spread.max(halves) + edges
    }

    fn b_edges_to_used(&self, x: usize) -> usize {
        self.b.neighbours[x]
            .iter()
            .filter(|&&y| self.preimage[y].is_some())
            .map(|&y| usize::from(self.b.has_edge(x, y)) + usize::from(self.b.has_edge(y, x)))
            .sum()
    }

    fn run(&mut self, depth: usize, cost: f64) {
        if self.exhausted {
            return;
        }
        if depth == self.order.len() {
            let free = self.preimage.iter().filter(|p| p.is_none()).count();
            let total = cost + free as f64 + (self.b.edges.len() - self.b_edges_within_used) as f64;
            if total < self.best_cost - SLACK {
                self.best_cost = total;
                self.best_mapping = self.mapping.clone();
            }
            return;
        }
        let u = self.order[depth];
        let mut candidates: Vec<(f64, Option<usize>)> = (0..self.b.len())
            .filter(|&x| self.preimage[x].is_none())
            .map(|x| (self.increment(u, Some(x)), Some(x)))
            .collect();
        candidates.push((self.increment(u, None), None));
        // Stable sort keeps B-index order among equal increments.
        candidates.sort_by(|l, r| l.0.total_cmp(&r.0));

        for (inc, target) in candidates {
            if self.expanded >= self.budget {
                self.exhausted = true;
                return;
            }
            self.expanded += 1;
            let added_within = target.map_or(0, |x| self.b_edges_to_used(x));
            self.mapping[u] = target;
            if let Some(x) = target {
                self.preimage[x] = Some(u);
            }
            self.b_edges_within_used += added_within;
            let bound = cost + inc + self.lower_bound(depth + 1);
            if bound < self.best_cost - SLACK {
                self.run(depth + 1, cost + inc);
            }
            self.b_edges_within_used -= added_within;
            if let Some(x) = target {
                self.preimage[x] = None;
            }
            self.mapping[u] = None;
            if self.exhausted {
                return;
            }
        }
    }
}

/// Breadth-first order from the highest-degree node, so that arcs between
/// placed nodes are charged early.
fn search_order(g: &Graph) -> Vec<usize> {
    let n = g.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&u| std::cmp::Reverse(g.neighbours[u].len()));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = g.neighbours[u].iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| std::cmp::Reverse(g.neighbours[w].len()));
            for w in next {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

/// Minimum edit cost from `a` to `b` within `budget` search nodes.
pub fn ged_raw(a: &LabeledPetriNet, b: &LabeledPetriNet, budget: usize) -> GedOutcome {
    let ga = Graph::new(a);
    let gb = Graph::new(b);
    let delete_all: Vec<Option<usize>> = vec![None; ga.len()];
    if a == b {
        let identity: Vec<Option<usize>> = (0..ga.len()).map(Some).collect();
        return GedOutcome {
            cost: 0.0,
            exact: true,
            mapping: identity,
            expanded: 0,
        };
    }

    let order = search_order(&ga);
    let mut position = vec![0; ga.len()];
    for (i, &u) in order.iter().enumerate() {
        position[u] = i;
    }
    let mut a_edges_remaining = vec![0usize; order.len() + 1];
    for &(u, v) in &ga.edges {
        let last = position[u].max(position[v]);
        for slot in a_edges_remaining.iter_mut().take(last + 1) {
            *slot += 1;
        }
    }
    let mut sub = vec![0.0; ga.len() * gb.len()];
    for u in 0..ga.len() {
        for x in 0..gb.len() {
            sub[u * gb.len() + x] = substitution_cost(&ga, u, &gb, x);
        }
    }

    let mut search = Search {
        a: &ga,
        b: &gb,
        order,
        position,
        sub,
        a_edges_remaining,
        mapping: vec![None; ga.len()],
        preimage: vec![None; gb.len()],
        b_edges_within_used: 0,
        best_cost: (a.size() + b.size()) as f64,
        best_mapping: delete_all,
        budget: budget.max(1),
        expanded: 0,
        exhausted: false,
    };
    search.run(0, 0.0);

    let exact_cost = mapping_cost_exact(&ga, &gb, &search.best_mapping);
    GedOutcome {
        cost: exact_cost.to_f64().expect("finite cost"),
        exact: !search.exhausted,
        mapping: search.best_mapping,
        expanded: search.expanded,
    }
}
