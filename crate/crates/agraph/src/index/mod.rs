//! Derived access structures: by time, by type, by dominance.
//!
//! All three are pure functions of an immutable graph and are immutable
//! once built. Postings are full serialized arc lines rather than
//! references, so the right-hand side of every index is itself parseable
//! annotation text.

mod hierarchy;
mod time_local;
mod type_local;

pub use hierarchy::{s_dominates, HierarchyGroup, HierarchyIndex};
pub use time_local::{Interval, TimeLocalIndex};
pub use type_local::{TypeGroup, TypeLocalIndex};

use std::cmp::Reverse;

use crate::graph::{AnnotationGraph, Arc, GraphError};
use crate::time::TimeRef;

/// Errors from index construction and lookups.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    /// The graph has arcs but not a single anchored node, so no time
    /// interval exists to hang anything on.
    #[error("graph has arcs but no anchored nodes")]
    NotAnchored,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn require_some_anchor(g: &AnnotationGraph) -> Result<(), IndexError> {
    if g.arc_count() > 0 && g.anchors().is_empty() {
        return Err(IndexError::NotAnchored);
    }
    Ok(())
}

/// Sort key shared by the type-local and hierarchy indexes: label first,
/// then least glb, then greatest lub, then the serialized line. Missing
/// bounds sort as unbounded (glb -inf, lub +inf).
fn arc_order_key(g: &AnnotationGraph, arc: &Arc) -> ArcOrderKey {
    (
        arc.label.type_().to_string(),
        arc.label.content().to_string(),
        g.glb_unchecked(arc),
        g.lub_unchecked(arc).map(Reverse),
        crate::encoding::line_for(g, arc),
    )
}

type ArcOrderKey = (String, String, Option<TimeRef>, Option<Reverse<TimeRef>>, String);

fn sort_arcs(g: &AnnotationGraph, arcs: &mut [Arc]) {
    arcs.sort_by_cached_key(|a| arc_order_key(g, a));
}
