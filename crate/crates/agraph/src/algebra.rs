//! Set operations over graphs that share a time base.
//!
//! Two graphs are compatible when no node id is anchored to two different
//! times across them. Union re-validates acyclicity (two valid graphs can
//! combine into a cycle); intersection and complement of valid graphs are
//! always valid because the arc set only shrinks.

use std::collections::BTreeMap;

use crate::graph::{AnnotationGraph, GraphError, NodeId};
use crate::time::TimeRef;

fn merged_anchors(
    a: &AnnotationGraph,
    b: &AnnotationGraph,
) -> Result<BTreeMap<NodeId, TimeRef>, GraphError> {
    let mut merged = a.anchors().clone();
    for (node, time) in b.anchors() {
        match merged.get(node) {
            Some(prev) if prev != time => {
                return Err(GraphError::AnchorConflict {
                    node: node.clone(),
                    first: prev.clone(),
                    second: time.clone(),
                });
            }
            _ => {
                merged.insert(node.clone(), time.clone());
            }
        }
    }
    Ok(merged)
}

/// Arc-set union with the union of both anchor maps.
pub fn union(a: &AnnotationGraph, b: &AnnotationGraph) -> Result<AnnotationGraph, GraphError> {
    let anchors = merged_anchors(a, b)?;
    let arcs = a.arcs().chain(b.arcs()).cloned();
    AnnotationGraph::build(arcs, anchors)
}

/// Arc-set intersection, anchors restricted to surviving nodes.
pub fn intersection(
    a: &AnnotationGraph,
    b: &AnnotationGraph,
) -> Result<AnnotationGraph, GraphError> {
    let arcs: Vec<_> = a.arcs().filter(|arc| b.contains_arc(arc)).cloned().collect();
    let anchors = surviving_anchors(merged_anchors(a, b)?, &arcs);
    AnnotationGraph::build(arcs, anchors)
}

/// Arcs of `a` not in `b`, anchors restricted to surviving nodes.
pub fn relative_complement(
    a: &AnnotationGraph,
    b: &AnnotationGraph,
) -> Result<AnnotationGraph, GraphError> {
    let arcs: Vec<_> = a.arcs().filter(|arc| !b.contains_arc(arc)).cloned().collect();
    let anchors = surviving_anchors(merged_anchors(a, b)?, &arcs);
    AnnotationGraph::build(arcs, anchors)
}

fn surviving_anchors(
    anchors: std::collections::BTreeMap<NodeId, TimeRef>,
    arcs: &[crate::graph::Arc],
) -> Vec<(NodeId, TimeRef)> {
    let kept: std::collections::BTreeSet<&NodeId> =
        arcs.iter().flat_map(|arc| [&arc.src, &arc.dst]).collect();
    anchors.into_iter().filter(|(n, _)| kept.contains(n)).collect()
}
