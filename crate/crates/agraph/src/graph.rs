//! The core model: labeled directed acyclic graphs over identified nodes,
//! with a partial, order-preserving assignment of times to nodes.
//!
//! A graph is immutable once built. Construction validates acyclicity and
//! order preservation; arcs between two nodes anchored to the same time are
//! admitted (instants), but graph cycles are rejected even among same-time
//! nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::time::TimeRef;

/// An opaque node identifier.
///
/// Non-empty, with no whitespace and none of `/`, `<`, `>`, so identifiers
/// embed unambiguously in the flat tuple encoding.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<NodeId, GraphError> {
        let id = id.into();
        if id.is_empty() || id.chars().any(|c| c.is_whitespace() || matches!(c, '/' | '<' | '>')) {
            return Err(GraphError::InvalidNodeId(id));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({})", self.0)
    }
}

/// An arc label: a type and a content string.
///
/// The serialized form is `type/content`; the first `/` is the separator, so
/// the type may not contain `/` (nor whitespace, `<`, `>` or `%`) while the
/// content is arbitrary and gets percent-escaped on output.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    type_: String,
    content: String,
}

impl Label {
    pub fn new(type_: impl Into<String>, content: impl Into<String>) -> Result<Label, GraphError> {
        let type_ = type_.into();
        let content = content.into();
        if type_.is_empty()
            || type_
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '/' | '<' | '>' | '%'))
        {
            return Err(GraphError::InvalidLabelType(type_));
        }
        Ok(Label { type_, content })
    }

    /// Splits `type/content` at the first slash.
    pub fn parse(s: &str) -> Result<Label, GraphError> {
        match s.split_once('/') {
            Some((t, c)) => Label::new(t, c),
            None => Err(GraphError::InvalidLabelType(s.to_string())),
        }
    }

    pub fn type_(&self) -> &str {
        &self.type_
    }

    pub fn content(&self) -> &str {
        &self.content
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.type_, self.content)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({}/{})", self.type_, self.content)
    }
}

/// A labeled arc between two nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub src: NodeId,
    pub label: Label,
    pub dst: NodeId,
}

impl Arc {
    pub fn new(src: NodeId, label: Label, dst: NodeId) -> Arc {
        Arc { src, label, dst }
    }
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Arc({} -{}-> {})", self.src, self.label, self.dst)
    }
}

/// How completely a graph is anchored to the timeline.
///
/// Ordered: `General < Anchored < TotallyAnchored`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AnchorClass {
    /// No structural guarantee.
    General,
    /// Every node without incoming arcs and every node without outgoing arcs
    /// carries a time, so bounds exist for every arc.
    Anchored,
    /// Every node carries a time.
    TotallyAnchored,
}

impl fmt::Display for AnchorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AnchorClass::General => "general",
            AnchorClass::Anchored => "anchored",
            AnchorClass::TotallyAnchored => "totally-anchored",
        };
        f.write_str(s)
    }
}

/// Errors from graph construction and relation queries.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid node id {0:?}: must be non-empty without whitespace, '/', '<' or '>'")]
    InvalidNodeId(String),
    #[error("invalid label type {0:?}: must be non-empty without whitespace, '/', '<', '>' or '%'")]
    InvalidLabelType(String),
    #[error("cycle through nodes {}", .0.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(" -> "))]
    Cycle(Vec<NodeId>),
    #[error("arc {arc:?} runs backwards in time: {src} > {dst}")]
    OrderViolation { arc: Arc, src: TimeRef, dst: TimeRef },
    #[error("node {node} anchored to both {first} and {second}")]
    AnchorConflict { node: NodeId, first: TimeRef, second: TimeRef },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown arc {0:?}")]
    UnknownArc(Arc),
}

/// An immutable annotation graph: a set of labeled arcs plus a partial map
/// from nodes to times.
///
/// The node set is implicit: every arc endpoint and every anchored node.
#[derive(Clone)]
pub struct AnnotationGraph {
    arcs: BTreeSet<Arc>,
    anchors: BTreeMap<NodeId, TimeRef>,
    nodes: BTreeSet<NodeId>,
    pub(crate) succ: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pub(crate) pred: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl AnnotationGraph {
    /// Builds a graph, validating that the arcs form a DAG and that no arc
    /// runs backwards in time. Duplicate arcs collapse; a node anchored twice
    /// must be anchored to the same time.
    pub fn build(
        arcs: impl IntoIterator<Item = Arc>,
        anchors: impl IntoIterator<Item = (NodeId, TimeRef)>,
    ) -> Result<AnnotationGraph, GraphError> {
        let arcs: BTreeSet<Arc> = arcs.into_iter().collect();
        let mut anchor_map: BTreeMap<NodeId, TimeRef> = BTreeMap::new();
        for (node, time) in anchors {
            if let Some(prev) = anchor_map.get(&node) {
                if *prev != time {
                    return Err(GraphError::AnchorConflict {
                        node,
                        first: prev.clone(),
                        second: time,
                    });
                }
            } else {
                anchor_map.insert(node, time);
            }
        }

        let mut nodes: BTreeSet<NodeId> = anchor_map.keys().cloned().collect();
        let mut succ: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        let mut pred: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for arc in &arcs {
            nodes.insert(arc.src.clone());
            nodes.insert(arc.dst.clone());
            succ.entry(arc.src.clone()).or_default().insert(arc.dst.clone());
            pred.entry(arc.dst.clone()).or_default().insert(arc.src.clone());
        }

        if let Some(cycle) = find_cycle(&nodes, &succ) {
            return Err(GraphError::Cycle(cycle));
        }

        for arc in &arcs {
            if let (Some(s), Some(d)) = (anchor_map.get(&arc.src), anchor_map.get(&arc.dst)) {
                if s > d {
                    return Err(GraphError::OrderViolation {
                        arc: arc.clone(),
                        src: s.clone(),
                        dst: d.clone(),
                    });
                }
            }
        }

        Ok(AnnotationGraph { arcs, anchors: anchor_map, nodes, succ, pred })
    }

    /// The empty graph.
    pub fn empty() -> AnnotationGraph {
        AnnotationGraph::build([], []).expect("empty graph is valid")
    }

    pub fn arcs(&self) -> impl Iterator<Item = &Arc> {
        self.arcs.iter()
    }

    pub fn arc_set(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    pub fn anchors(&self) -> &BTreeMap<NodeId, TimeRef> {
        &self.anchors
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, n: &NodeId) -> bool {
        self.nodes.contains(n)
    }

    pub fn contains_arc(&self, a: &Arc) -> bool {
        self.arcs.contains(a)
    }

    /// The time a node is anchored to, if any.
    pub fn time_of(&self, n: &NodeId) -> Option<&TimeRef> {
        self.anchors.get(n)
    }

    /// The distinct times in use, ascending.
    pub fn anchor_times(&self) -> Vec<TimeRef> {
        let mut times: Vec<TimeRef> = Vec::new();
        for t in self.anchors.values() {
            if !times.contains(t) {
                times.push(t.clone());
            }
        }
        times.sort();
        times
    }

    /// Where this graph sits in the anchoring hierarchy.
    pub fn classify_anchoring(&self) -> AnchorClass {
        if self.nodes.iter().all(|n| self.anchors.contains_key(n)) {
            return AnchorClass::TotallyAnchored;
        }
        let anchored_where_needed = self.nodes.iter().all(|n| {
            let has_in = self.pred.get(n).is_some_and(|p| !p.is_empty());
            let has_out = self.succ.get(n).is_some_and(|s| !s.is_empty());
            (has_in && has_out) || self.anchors.contains_key(n)
        });
        if anchored_where_needed {
            AnchorClass::Anchored
        } else {
            AnchorClass::General
        }
    }

    /// Weakly connected components, each as a set of nodes.
    pub fn components(&self) -> Vec<BTreeSet<NodeId>> {
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.nodes {
            if seen.contains(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start.clone()];
            while let Some(n) = stack.pop() {
                if !comp.insert(n.clone()) {
                    continue;
                }
                seen.insert(n.clone());
                for m in self.succ.get(&n).into_iter().flatten() {
                    stack.push(m.clone());
                }
                for m in self.pred.get(&n).into_iter().flatten() {
                    stack.push(m.clone());
                }
            }
            out.push(comp);
        }
        out
    }

    /// The distinct label types present, ascending.
    pub fn types(&self) -> BTreeSet<String> {
        self.arcs.iter().map(|a| a.label.type_().to_string()).collect()
    }

    pub(crate) fn require_node(&self, n: &NodeId) -> Result<(), GraphError> {
        if self.contains_node(n) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(n.clone()))
        }
    }

    pub(crate) fn require_arc(&self, a: &Arc) -> Result<(), GraphError> {
        if self.contains_arc(a) {
            Ok(())
        } else {
            Err(GraphError::UnknownArc(a.clone()))
        }
    }
}

impl PartialEq for AnnotationGraph {
    fn eq(&self, other: &Self) -> bool {
        self.arcs == other.arcs && self.anchors == other.anchors
    }
}

impl Eq for AnnotationGraph {}

impl fmt::Debug for AnnotationGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AnnotationGraph({} nodes, {} arcs, {} anchored)",
            self.nodes.len(),
            self.arcs.len(),
            self.anchors.len()
        )
    }
}

/// Depth-first search for a directed cycle; returns one if present.
fn find_cycle(
    nodes: &BTreeSet<NodeId>,
    succ: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&NodeId, Mark> = BTreeMap::new();
    let mut path: Vec<&NodeId> = Vec::new();

    enum Step<'a> {
        Enter(&'a NodeId),
        Leave(&'a NodeId),
    }

    for start in nodes {
        if marks.contains_key(start) {
            continue;
        }
        let mut stack = vec![Step::Enter(start)];
        while let Some(step) = stack.pop() {
            match step {
                Step::Enter(n) => {
                    match marks.get(n) {
                        Some(Mark::Done) => continue,
                        Some(Mark::Open) => continue,
                        None => {}
                    }
                    marks.insert(n, Mark::Open);
                    path.push(n);
                    stack.push(Step::Leave(n));
                    for m in succ.get(n).into_iter().flatten() {
                        match marks.get(m) {
                            Some(Mark::Open) => {
                                let pos = path.iter().position(|x| *x == m).unwrap_or(0);
                                let mut cycle: Vec<NodeId> =
                                    path[pos..].iter().map(|x| (*x).clone()).collect();
                                cycle.push(m.clone());
                                return Some(cycle);
                            }
                            Some(Mark::Done) => {}
                            None => stack.push(Step::Enter(m)),
                        }
                    }
                }
                Step::Leave(n) => {
                    marks.insert(n, Mark::Done);
                    path.pop();
                }
            }
        }
    }
    None
}
