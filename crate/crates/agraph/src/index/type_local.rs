//! Per-type arc listings under the three-key sort.

use super::{arc_order_key, require_some_anchor, IndexError};
use crate::encoding;
use crate::graph::{AnnotationGraph, Arc};

/// All arcs of one type, sorted by content, then least glb, then greatest
/// lub, with the serialized line as the final tiebreak.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeGroup {
    pub type_: String,
    arcs: Vec<Arc>,
    lines: Vec<String>,
}

impl TypeGroup {
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    /// Arcs whose content equals `content`, in index order.
    pub fn with_content<'a>(&'a self, content: &'a str) -> impl Iterator<Item = &'a Arc> {
        self.arcs.iter().filter(move |a| a.label.content() == content)
    }
}

/// The graph's arcs partitioned by type, each partition sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeLocalIndex {
    groups: Vec<TypeGroup>,
}

impl TypeLocalIndex {
    pub fn build(g: &AnnotationGraph) -> Result<TypeLocalIndex, IndexError> {
        require_some_anchor(g)?;
        let mut sorted: Vec<&Arc> = g.arcs().collect();
        sorted.sort_by_cached_key(|a| arc_order_key(g, a));
        let mut groups: Vec<TypeGroup> = Vec::new();
        for arc in sorted {
            let line = encoding::line_for(g, arc);
            match groups.last_mut() {
                Some(group) if group.type_ == arc.label.type_() => {
                    group.arcs.push(arc.clone());
                    group.lines.push(line);
                }
                _ => groups.push(TypeGroup {
                    type_: arc.label.type_().to_string(),
                    arcs: vec![arc.clone()],
                    lines: vec![line],
                }),
            }
        }
        Ok(TypeLocalIndex { groups })
    }

    pub fn groups(&self) -> &[TypeGroup] {
        &self.groups
    }

    pub fn types(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.type_.as_str())
    }

    pub fn group(&self, type_: &str) -> Option<&TypeGroup> {
        self.groups.iter().find(|g| g.type_ == type_)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Plain-text layout: type and content columns flush left, the type
    /// named only on its first row, then the full arc line.
    pub fn render(&self) -> String {
        let w_type = self.groups.iter().map(|g| g.type_.len()).max().unwrap_or(0) + 1;
        let w_content = self
            .groups
            .iter()
            .flat_map(|g| g.arcs.iter())
            .map(|a| escaped_content(a).len())
            .max()
            .unwrap_or(0)
            + 2;
        let mut out = String::new();
        for group in &self.groups {
            for (i, (arc, line)) in group.arcs.iter().zip(&group.lines).enumerate() {
                let type_cell = if i == 0 { group.type_.as_str() } else { "" };
                out.push_str(&format!(
                    "{type_cell:<w_type$}{:<w_content$}{line}\n",
                    escaped_content(arc)
                ));
            }
        }
        out
    }
}

fn escaped_content(arc: &Arc) -> String {
    encoding::escape(arc.label.content())
}
