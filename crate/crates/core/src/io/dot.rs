use std::fmt::Write as _;

use crate::petri::{Arc, Label, LocalProcessModel};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: places are circles (showing initial tokens),
/// transitions boxes, silent transitions unlabeled black boxes.
pub fn to_dot(model: &LocalProcessModel) -> String {
    let net = model.net();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(model.id()));
    out.push_str("  rankdir=LR;\n");
    for p in net.places() {
        let tokens = model.initial().count(p);
        let label = if tokens > 0 { tokens.to_string() } else { String::new() };
        let _ = writeln!(
            out,
            "  {} [shape=circle, label={}, xlabel={}];",
            quote(net.place_name(p)),
            quote(&label),
            quote(net.place_name(p))
        );
    }
    for t in net.transitions() {
        let name = quote(net.transition_name(t));
        match net.label(t) {
            Label::Activity(a) => {
                let _ = writeln!(out, "  {name} [shape=box, label={}];", quote(a));
            }
            Label::Silent => {
                let _ = writeln!(out, "  {name} [shape=box, style=filled, fillcolor=black, label=\"\"];");
            }
        }
    }
    for arc in net.arcs() {
        let (source, target) = match *arc {
            Arc::PlaceToTransition(p, t) => (net.place_name(p), net.transition_name(t)),
            Arc::TransitionToPlace(t, p) => (net.transition_name(t), net.place_name(p)),
        };
        let _ = writeln!(out, "  {} -> {};", quote(source), quote(target));
    }
    out.push_str("}\n");
    out
}
