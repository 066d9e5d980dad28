//! Equivalence classes of arcs.
//!
//! Arcs are linked into a class by jointly carrying class-typed labels with a
//! shared identifier: a `license/w35` arc over a word span and `license/w35`
//! arcs over gesture spans put all those spans in one class. The class map is
//! keyed by the full class label and supports span lookup back into the graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{AnnotationGraph, Arc, Label};

/// Classes of arcs grouped by class-typed labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceClassMap {
    classes: BTreeMap<Label, BTreeSet<Arc>>,
}

impl EquivalenceClassMap {
    pub fn classes(&self) -> impl Iterator<Item = (&Label, &BTreeSet<Arc>)> {
        self.classes.iter()
    }

    pub fn get(&self, label: &Label) -> Option<&BTreeSet<Arc>> {
        self.classes.get(label)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Arcs of `g` sharing a span (source and destination) with any member of
    /// the class, excluding the class-typed arcs themselves.
    pub fn co_spanning(&self, g: &AnnotationGraph, label: &Label) -> BTreeSet<Arc> {
        let Some(members) = self.classes.get(label) else {
            return BTreeSet::new();
        };
        let spans: BTreeSet<(&_, &_)> =
            members.iter().map(|a| (&a.src, &a.dst)).collect();
        g.arcs()
            .filter(|a| a.label.type_() != label.type_())
            .filter(|a| spans.contains(&(&a.src, &a.dst)))
            .cloned()
            .collect()
    }
}

/// Groups every arc whose label type is in `class_types` into the class named
/// by its full label.
pub fn resolve_equivalence_classes(
    g: &AnnotationGraph,
    class_types: &BTreeSet<String>,
) -> EquivalenceClassMap {
    let mut classes: BTreeMap<Label, BTreeSet<Arc>> = BTreeMap::new();
    for arc in g.arcs() {
        if class_types.contains(arc.label.type_()) {
            classes.entry(arc.label.clone()).or_default().insert(arc.clone());
        }
    }
    EquivalenceClassMap { classes }
}
