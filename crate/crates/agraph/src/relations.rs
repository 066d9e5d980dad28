//! Ordering relations over nodes and arcs.
//!
//! Structural precedence follows chains of arcs; temporal precedence compares
//! anchor times; the combined relation is the transitive closure of their
//! union. Inclusion lifts the same idea to arcs, and `glb`/`lub` bound an
//! arc's possible extent in time.

use std::collections::BTreeSet;

use crate::graph::{AnnotationGraph, Arc, GraphError, NodeId};
use crate::time::TimeRef;

/// Which inclusion relation to use where either will do.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RelationMode {
    /// Structural only.
    S,
    /// Temporal only.
    T,
    /// The transitive closure of both.
    General,
}

impl AnnotationGraph {
    /// Structural precedence: a chain of one or more arcs leads from `a` to `b`.
    ///
    /// Irreflexive: `s_precedes(n, n)` is false.
    pub fn s_precedes(&self, a: &NodeId, b: &NodeId) -> Result<bool, GraphError> {
        self.require_node(a)?;
        self.require_node(b)?;
        Ok(a != b && self.reaches(a, b))
    }

    /// Temporal precedence: both nodes are anchored and `a`'s time is strictly
    /// earlier.
    pub fn t_precedes(&self, a: &NodeId, b: &NodeId) -> Result<bool, GraphError> {
        self.require_node(a)?;
        self.require_node(b)?;
        match (self.time_of(a), self.time_of(b)) {
            (Some(ta), Some(tb)) => Ok(ta < tb),
            _ => Ok(false),
        }
    }

    /// The transitive closure of structural and temporal precedence.
    pub fn precedes(&self, a: &NodeId, b: &NodeId) -> Result<bool, GraphError> {
        self.require_node(a)?;
        self.require_node(b)?;
        if a == b {
            return Ok(false);
        }
        // Breadth-first search over arc steps and strictly-later anchored nodes.
        let anchored: Vec<(&TimeRef, &NodeId)> =
            self.anchors().iter().map(|(n, t)| (t, n)).collect();
        let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
        let mut queue: Vec<&NodeId> = vec![a];
        seen.insert(a);
        while let Some(x) = queue.pop() {
            if x == b && x != a {
                return Ok(true);
            }
            for m in self.succ.get(x).into_iter().flatten() {
                if m == b {
                    return Ok(true);
                }
                if seen.insert(m) {
                    queue.push(m);
                }
            }
            if let Some(tx) = self.time_of(x) {
                for (tm, m) in &anchored {
                    if *tm > tx {
                        if *m == b {
                            return Ok(true);
                        }
                        if seen.insert(m) {
                            queue.push(m);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    /// Structural inclusion, non-strict: `outer`'s source reaches (or is)
    /// `inner`'s source and `inner`'s destination reaches (or is) `outer`'s.
    pub fn s_includes(&self, outer: &Arc, inner: &Arc) -> Result<bool, GraphError> {
        self.require_arc(outer)?;
        self.require_arc(inner)?;
        Ok(self.reaches_or_is(&outer.src, &inner.src) && self.reaches_or_is(&inner.dst, &outer.dst))
    }

    /// Temporal inclusion, non-strict: all four endpoints anchored, with
    /// `inner`'s span inside `outer`'s.
    pub fn t_includes(&self, outer: &Arc, inner: &Arc) -> Result<bool, GraphError> {
        self.require_arc(outer)?;
        self.require_arc(inner)?;
        Ok(self.t_includes_unchecked(outer, inner))
    }

    fn t_includes_unchecked(&self, outer: &Arc, inner: &Arc) -> bool {
        match (
            self.time_of(&outer.src),
            self.time_of(&inner.src),
            self.time_of(&inner.dst),
            self.time_of(&outer.dst),
        ) {
            (Some(os), Some(is_), Some(id), Some(od)) => os <= is_ && id <= od,
            _ => false,
        }
    }

    /// The transitive closure of structural and temporal inclusion.
    pub fn includes(&self, outer: &Arc, inner: &Arc) -> Result<bool, GraphError> {
        self.require_arc(outer)?;
        self.require_arc(inner)?;
        if outer == inner {
            // Non-strict: every arc includes itself.
            return Ok(true);
        }
        let arcs: Vec<&Arc> = self.arcs().collect();
        let mut seen: BTreeSet<&Arc> = BTreeSet::new();
        let mut queue: Vec<&Arc> = vec![outer];
        seen.insert(outer);
        while let Some(p) = queue.pop() {
            for q in &arcs {
                if seen.contains(*q) {
                    continue;
                }
                let direct = (self.reaches_or_is(&p.src, &q.src)
                    && self.reaches_or_is(&q.dst, &p.dst))
                    || self.t_includes_unchecked(p, q);
                if direct {
                    if *q == inner {
                        return Ok(true);
                    }
                    seen.insert(*q);
                    queue.push(*q);
                }
            }
        }
        Ok(false)
    }

    /// Inclusion under an explicit mode.
    pub fn includes_mode(
        &self,
        outer: &Arc,
        inner: &Arc,
        mode: RelationMode,
    ) -> Result<bool, GraphError> {
        match mode {
            RelationMode::S => self.s_includes(outer, inner),
            RelationMode::T => self.t_includes(outer, inner),
            RelationMode::General => self.includes(outer, inner),
        }
    }

    /// The greatest anchor time from which the arc's source is reachable
    /// (or at which it sits). Absent when no anchored node reaches the source.
    pub fn glb(&self, arc: &Arc) -> Result<Option<TimeRef>, GraphError> {
        self.require_arc(arc)?;
        Ok(self.glb_unchecked(arc))
    }

    /// The least anchor time reachable from the arc's destination (or at
    /// which it sits). Absent when the destination reaches no anchored node.
    pub fn lub(&self, arc: &Arc) -> Result<Option<TimeRef>, GraphError> {
        self.require_arc(arc)?;
        Ok(self.lub_unchecked(arc))
    }

    pub(crate) fn glb_unchecked(&self, arc: &Arc) -> Option<TimeRef> {
        let back = self.closure(&arc.src, false);
        back.into_iter().filter_map(|n| self.time_of(&n)).max().cloned()
    }

    pub(crate) fn lub_unchecked(&self, arc: &Arc) -> Option<TimeRef> {
        let fwd = self.closure(&arc.dst, true);
        fwd.into_iter().filter_map(|n| self.time_of(&n)).min().cloned()
    }

    /// `[glb, lub)` with missing bounds widened to the graph's extreme anchor
    /// times. `None` when the graph has no anchors at all.
    pub(crate) fn potential_span(&self, arc: &Arc) -> Option<(TimeRef, TimeRef)> {
        let times = self.anchor_times();
        let first = times.first()?.clone();
        let last = times.last()?.clone();
        let lo = self.glb_unchecked(arc).unwrap_or(first);
        let hi = self.lub_unchecked(arc).unwrap_or(last);
        Some((lo, hi))
    }

    fn reaches(&self, from: &NodeId, to: &NodeId) -> bool {
        let mut seen: BTreeSet<&NodeId> = BTreeSet::new();
        let mut queue: Vec<&NodeId> = self.succ.get(from).into_iter().flatten().collect();
        while let Some(n) = queue.pop() {
            if n == to {
                return true;
            }
            if seen.insert(n) {
                queue.extend(self.succ.get(n).into_iter().flatten());
            }
        }
        false
    }

    pub(crate) fn reaches_or_is(&self, from: &NodeId, to: &NodeId) -> bool {
        from == to || self.reaches(from, to)
    }

    /// All nodes reachable from `start` including itself, forward or backward.
    fn closure(&self, start: &NodeId, forward: bool) -> BTreeSet<NodeId> {
        let adj = if forward { &self.succ } else { &self.pred };
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut queue = vec![start.clone()];
        while let Some(n) = queue.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            queue.extend(adj.get(&n).into_iter().flatten().cloned());
        }
        seen
    }
}
