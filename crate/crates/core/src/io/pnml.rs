//! A PNML subset: `net/page/{place,transition,arc}`, transition labels from
//! `name/text`, initial markings from `initialMarking/text`, and final
//! markings from a `finalmarkings/marking` block (as written by ProM) or a
//! `<stem>.final.json` sidecar.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use roxmltree::{Document, Node};
use thiserror::Error;

use crate::petri::{Arc, Label, LabeledPetriNet, LocalProcessModel, Marking, NetBuilder, NetError};

/// Line and column in the source document, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum PnmlError {
    #[error("malformed XML: {0}")]
    Xml(#[from] roxmltree::Error),
    #[error("no <net> element found")]
    MissingNet,
    #[error("{at}: <{element}> without id attribute")]
    MissingId { element: &'static str, at: Location },
    #[error("{at}: duplicate node id `{id}` (first defined at {first})")]
    DuplicateId { id: String, at: Location, first: Location },
    #[error("{at}: arc `{arc}` references unknown node `{node}`")]
    DanglingArc { arc: String, node: String, at: Location },
    #[error("{at}: arc `{arc}` connects two nodes of the same kind")]
    SameKindArc { arc: String, at: Location },
    #[error("{at}: invalid token count `{text}`")]
    TokenCount { text: String, at: Location },
    #[error("{at}: final marking references unknown place `{place}`")]
    UnknownMarkingPlace { place: String, at: Location },
    #[error("invalid net: {0}")]
    Net(#[from] NetError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid final-marking sidecar: {source}")]
    Sidecar {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// A parsed accepting net. `final_marking` is `None` when the document
/// has no final-marking block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmlNet {
    pub net: LabeledPetriNet,
    pub initial: Marking,
    pub final_marking: Option<Marking>,
}

fn location(doc: &Document, node: Node) -> Location {
    let pos = doc.text_pos_at(node.range().start);
    Location {
        line: pos.row,
        column: pos.col,
    }
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(name))
}

fn text_of<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    child(node, "text").map(|t| t.text().unwrap_or(""))
}

fn token_count(doc: &Document, node: Node) -> Result<u32, PnmlError> {
    let text = text_of(node).unwrap_or("0").trim();
    if text.is_empty() {
        return Ok(0);
    }
    text.parse().map_err(|_| PnmlError::TokenCount {
        text: text.to_string(),
        at: location(doc, node),
    })
}

fn is_structural(node: Node) -> bool {
    node.parent_element()
        .is_some_and(|p| p.has_tag_name("net") || p.has_tag_name("page"))
}

fn label_of(node: Node) -> Label {
    let invisible = node
        .children()
        .any(|c| c.has_tag_name("toolspecific") && c.attribute("activity") == Some("$invisible$"));
    if invisible {
        return Label::Silent;
    }
    match child(node, "name").and_then(text_of) {
        Some(name) => Label::activity(name),
        None => Label::Silent,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Place,
    Transition,
}

/// Parses the first `<net>` element of a PNML document.
pub fn parse_pnml(text: &str) -> Result<PnmlNet, PnmlError> {
    let doc = Document::parse(text)?;
    let net = doc
        .descendants()
        .find(|n| n.has_tag_name("net"))
        .ok_or(PnmlError::MissingNet)?;

    let mut builder = NetBuilder::new();
    let mut kinds: HashMap<&str, (Kind, Location)> = HashMap::new();
    let mut initial: Vec<(&str, u32)> = Vec::new();
    let mut arcs = Vec::new();

    for node in net.descendants().filter(|n| n.is_element() && is_structural(*n)) {
        let tag = node.tag_name().name();
        let kind = match tag {
            "place" => Kind::Place,
            "transition" => Kind::Transition,
            "arc" => {
                arcs.push(node);
                continue;
            }
            _ => continue,
        };
        let at = location(&doc, node);
        let id = node.attribute("id").ok_or(PnmlError::MissingId {
            element: if kind == Kind::Place { "place" } else { "transition" },
            at,
        })?;
        if let Some(&(_, first)) = kinds.get(id) {
            return Err(PnmlError::DuplicateId {
                id: id.to_string(),
                at,
                first,
            });
        }
        kinds.insert(id, (kind, at));
        match kind {
            Kind::Place => {
                builder.place(id);
                if let Some(m) = child(node, "initialMarking") {
                    let count = token_count(&doc, m)?;
                    if count > 0 {
                        initial.push((id, count));
                    }
                }
            }
            Kind::Transition => {
                builder.transition(id, label_of(node));
            }
        }
    }

    for node in arcs {
        let at = location(&doc, node);
        let arc_id = node.attribute("id").unwrap_or("").to_string();
        let mut ends = [None; 2];
        for (slot, attr) in ends.iter_mut().zip(["source", "target"]) {
            let end = node.attribute(attr).ok_or(PnmlError::MissingId { element: "arc", at })?;
            let &(kind, _) = kinds.get(end).ok_or_else(|| PnmlError::DanglingArc {
                arc: arc_id.clone(),
                node: end.to_string(),
                at,
            })?;
            *slot = Some((end, kind));
        }
        let [Some((source, sk)), Some((target, tk))] = ends else {
            unreachable!()
        };
        if sk == tk {
            return Err(PnmlError::SameKindArc { arc: arc_id, at });
        }
        builder.arc(source, target);
    }

    let built = builder.build()?;
    let initial = Marking::from_named(&built, initial)?;
    let final_marking = match net.descendants().find(|n| n.has_tag_name("finalmarkings")) {
        Some(block) => Some(final_marking_block(&doc, &built, block)?),
        None => None,
    };
    Ok(PnmlNet {
        net: built,
        initial,
        final_marking,
    })
}

fn final_marking_block(doc: &Document, net: &LabeledPetriNet, block: Node) -> Result<Marking, PnmlError> {
    let mut marking = Marking::empty();
    let Some(first) = block.children().find(|c| c.has_tag_name("marking")) else {
        return Ok(marking);
    };
    for place in first.children().filter(|c| c.has_tag_name("place")) {
        let at = location(doc, place);
        let name = place.attribute("idref").ok_or(PnmlError::MissingId { element: "place", at })?;
        let p = net.place_id(name).ok_or_else(|| PnmlError::UnknownMarkingPlace {
            place: name.to_string(),
            at,
        })?;
        let count = token_count(doc, place)?;
        if count > 0 {
            marking.add(p, count);
        }
    }
    Ok(marking)
}

/// `<dir>/<stem>.final.json` next to a `<stem>.pnml` file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.final.json"))
}

/// Reads a PNML file; without an embedded final marking the sidecar is
/// consulted, and failing that the final marking is empty.
pub fn read_pnml(path: &Path) -> Result<(LabeledPetriNet, Marking, Marking), PnmlError> {
    let text = fs::read_to_string(path).map_err(|source| PnmlError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parsed = parse_pnml(&text)?;
    let final_marking = match parsed.final_marking {
        Some(m) => m,
        None => {
            let sidecar = sidecar_path(path);
            if sidecar.is_file() {
                let raw = fs::read_to_string(&sidecar).map_err(|source| PnmlError::Io {
                    path: sidecar.clone(),
                    source,
                })?;
                let counts: BTreeMap<String, u32> =
                    serde_json::from_str(&raw).map_err(|source| PnmlError::Sidecar { path: sidecar, source })?;
                Marking::from_named(&parsed.net, counts.iter().map(|(k, &v)| (k.as_str(), v)))?
            } else {
                Marking::empty()
            }
        }
    };
    Ok((parsed.net, parsed.initial, final_marking))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Deterministic serialization: nodes in id order, arcs in net order.
/// Empty markings produce no marking elements at all.
pub fn write_pnml(net: &LabeledPetriNet, initial: &Marking, final_marking: &Marking) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pnml>\n");
    out.push_str("  <net id=\"net\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n");
    out.push_str("    <page id=\"page\">\n");
    for p in net.places() {
        let id = escape(net.place_name(p));
        let _ = write!(out, "      <place id=\"{id}\">\n        <name><text>{id}</text></name>\n");
        let count = initial.count(p);
        if count > 0 {
            let _ = writeln!(out, "        <initialMarking><text>{count}</text></initialMarking>");
        }
        out.push_str("      </place>\n");
    }
    for t in net.transitions() {
        let id = escape(net.transition_name(t));
        let _ = writeln!(out, "      <transition id=\"{id}\">");
        match net.label(t) {
            Label::Activity(name) => {
                let _ = writeln!(out, "        <name><text>{}</text></name>", escape(name));
            }
            Label::Silent => {
                out.push_str("        <toolspecific tool=\"ProM\" version=\"6.4\" activity=\"$invisible$\"/>\n");
            }
        }
        out.push_str("      </transition>\n");
    }
    for (k, arc) in net.arcs().iter().enumerate() {
        let (source, target) = match *arc {
            Arc::PlaceToTransition(p, t) => (net.place_name(p), net.transition_name(t)),
            Arc::TransitionToPlace(t, p) => (net.transition_name(t), net.place_name(p)),
        };
        let _ = writeln!(
            out,
            "      <arc id=\"arc{k}\" source=\"{}\" target=\"{}\"/>",
            escape(source),
            escape(target)
        );
    }
    out.push_str("    </page>\n");
    if !final_marking.is_empty() {
        out.push_str("    <finalmarkings>\n      <marking>\n");
        for (p, count) in final_marking.iter() {
            let _ = writeln!(
                out,
                "        <place idref=\"{}\"><text>{count}</text></place>",
                escape(net.place_name(p))
            );
        }
        out.push_str("      </marking>\n    </finalmarkings>\n");
    }
    out.push_str("  </net>\n</pnml>\n");
    out
}

pub fn write_lpm(model: &LocalProcessModel) -> String {
    write_pnml(model.net(), model.initial(), model.final_marking())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petri::PlaceId;

    const TWO: &str = r#"<?xml version="1.0"?>
<pnml><net id="n"><page id="pg">
  <place id="p"/>
  <transition id="t1"><name><text>a</text></name></transition>
  <transition id="t2"><name><text>b</text></name></transition>
  <arc id="x" source="t1" target="p"/>
  <arc id="y" source="p" target="t2"/>
</page></net></pnml>"#;

    #[test]
    fn two_transition_net() {
        let parsed = parse_pnml(TWO).unwrap();
        let net = &parsed.net;
        assert_eq!((net.place_count(), net.transition_count(), net.arc_count()), (1, 2, 2));
        assert!(parsed.initial.is_empty());
        assert_eq!(parsed.final_marking, None);
    }

    #[test]
    fn unnamed_and_invisible_transitions_are_silent() {
        let doc = r#"<pnml><net id="n"><page id="pg">
  <transition id="a"/>
  <transition id="b"><name><text></text></name></transition>
  <transition id="c"><name><text>x</text></name><toolspecific tool="ProM" activity="$invisible$"/></transition>
  <transition id="d"><name><text>y</text></name></transition>
</page></net></pnml>"#;
        let net = parse_pnml(doc).unwrap().net;
        let labels: Vec<bool> = net.transitions().map(|t| net.label(t).is_silent()).collect();
        assert_eq!(labels, [true, true, true, false]);
    }

    #[test]
    fn markings() {
        let doc = r#"<pnml><net id="n"><page id="pg">
  <place id="p"><initialMarking><text>2</text></initialMarking></place>
  <place id="q"/>
  <transition id="t"><name><text>a</text></name></transition>
  <arc id="1" source="p" target="t"/><arc id="2" source="t" target="q"/>
</page>
<finalmarkings><marking><place idref="q"><text>1</text></place><place idref="p"><text>0</text></place></marking></finalmarkings>
</net></pnml>"#;
        let parsed = parse_pnml(doc).unwrap();
        assert_eq!(parsed.initial.count(PlaceId(0)), 2);
        let fm = parsed.final_marking.unwrap();
        assert_eq!((fm.count(PlaceId(0)), fm.count(PlaceId(1))), (0, 1));
    }

    #[test]
    fn errors_carry_locations() {
        let dup = "<pnml><net><page>\n<place id=\"p\"/>\n<transition id=\"p\"/></page></net></pnml>";
        match parse_pnml(dup) {
            Err(PnmlError::DuplicateId { id, at, first }) => {
                assert_eq!(id, "p");
                assert_eq!((first.line, at.line), (2, 3));
            }
            other => panic!("{other:?}"),
        }
        let dangling = "<pnml><net><page><place id=\"p\"/>\n<arc id=\"a\" source=\"p\" target=\"t\"/></page></net></pnml>";
        assert!(matches!(parse_pnml(dangling), Err(PnmlError::DanglingArc { at: Location { line: 2, .. }, .. })));
        assert!(matches!(parse_pnml("<pnml><net>"), Err(PnmlError::Xml(_))));
        assert!(matches!(parse_pnml("<pnml/>"), Err(PnmlError::MissingNet)));
        let bad = "<pnml><net><page><place id=\"p\"><initialMarking><text>x</text></initialMarking></place></page></net></pnml>";
        assert!(matches!(parse_pnml(bad), Err(PnmlError::TokenCount { .. })));
    }

    #[test]
    fn writing_is_deterministic_and_round_trips() {
        let parsed = parse_pnml(TWO).unwrap();
        let written = write_pnml(&parsed.net, &parsed.initial, &Marking::empty());
        assert_eq!(written, write_pnml(&parsed.net, &parsed.initial, &Marking::empty()));
        assert!(!written.contains("initialMarking"));
        assert!(!written.contains("finalmarkings"));
        let back = parse_pnml(&written).unwrap();
        assert_eq!(back.net, parsed.net);
    }

    #[test]
    fn names_are_escaped() {
        let mut b = NetBuilder::new();
        b.place("p&1").transition("t<", Label::activity("say \"hi\" & <go>")).arc("t<", "p&1");
        let net = b.build().unwrap();
        let back = parse_pnml(&write_pnml(&net, &Marking::empty(), &Marking::empty())).unwrap();
        assert_eq!(back.net, net);
    }
}
