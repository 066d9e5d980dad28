//! Flat tuple encoding: one line per arc, readable and order-insensitive.
//!
//! ```text
//! <13/2391.11> W/country <14/2391.60>
//! ```
//!
//! Each line is `node SP label SP node` where a node is `<id/time>` or
//! `<id/>` when unanchored, SP is one or more spaces, and the label is
//! `type/content` with space, `<`, `>`, `%` and newline percent-escaped in
//! the content. Blank lines and `#` comments are skipped. Files are UTF-8
//! with LF line endings. Because the graph is a set of arcs plus an anchor
//! map, serializing sorts lines lexicographically, merging files is
//! concatenation, and deltas are line-level edits. Every line carries an
//! arc, so a node on no arc has nowhere to live and is not encoded.

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{AnnotationGraph, Arc, GraphError, Label, NodeId};
use crate::time::TimeRef;

/// Errors from reading tuple text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One parsed line: an arc with the anchor times written at its endpoints.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleLine {
    pub src: NodeId,
    pub src_time: Option<TimeRef>,
    pub label: Label,
    pub dst: NodeId,
    pub dst_time: Option<TimeRef>,
}

impl TupleLine {
    pub fn arc(&self) -> Arc {
        Arc::new(self.src.clone(), self.label.clone(), self.dst.clone())
    }

    /// The line an arc would occupy in `g`'s serialization.
    pub fn of_arc(g: &AnnotationGraph, arc: &Arc) -> TupleLine {
        TupleLine {
            src: arc.src.clone(),
            src_time: g.time_of(&arc.src).cloned(),
            label: arc.label.clone(),
            dst: arc.dst.clone(),
            dst_time: g.time_of(&arc.dst).cloned(),
        }
    }
}

impl fmt::Display for TupleLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{} {}",
            node_token(&self.src, self.src_time.as_ref()),
            self.label.type_(),
            escape(self.label.content()),
            node_token(&self.dst, self.dst_time.as_ref()),
        )
    }
}

impl fmt::Debug for TupleLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TupleLine({self})")
    }
}

fn node_token(id: &NodeId, time: Option<&TimeRef>) -> String {
    match time {
        Some(t) => format!("<{id}/{t}>"),
        None => format!("<{id}/>"),
    }
}

pub(crate) fn escape(content: &str) -> String {
    let mut out = String::with_capacity(content.len());
    for c in content.chars() {
        match c {
            ' ' => out.push_str("%20"),
            '<' => out.push_str("%3C"),
            '>' => out.push_str("%3E"),
            '%' => out.push_str("%25"),
            '\n' => out.push_str("%0A"),
            other => out.push(other),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        let hex: String = chars.by_ref().take(2).collect();
        match hex.as_str() {
            "20" => out.push(' '),
            "3C" => out.push('<'),
            "3E" => out.push('>'),
            "25" => out.push('%'),
            "0A" => out.push('\n'),
            other => return Err(format!("invalid escape %{other}")),
        }
    }
    Ok(out)
}

/// Renders one arc as its serialized line within `g`.
pub fn line_for(g: &AnnotationGraph, arc: &Arc) -> String {
    TupleLine::of_arc(g, arc).to_string()
}

/// Serializes a graph canonically: one line per arc, lexicographically
/// sorted, each with a trailing newline. The empty graph is empty text.
/// Anchor times print in the lexical form they were read or built with.
pub fn serialize(g: &AnnotationGraph) -> String {
    let mut lines: Vec<String> =
        g.arcs().map(|a| TupleLine::of_arc(g, a).to_string()).collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Parses tuple text into a graph. Line order is irrelevant; repeated arcs
/// collapse; a node mentioned with two different times is a conflict, while
/// a time mentioned on one line and omitted on another is not.
pub fn parse(text: &str) -> Result<AnnotationGraph, ParseError> {
    let (arcs, anchors) = parse_parts(text)?;
    Ok(AnnotationGraph::build(arcs, anchors)?)
}

/// Parses tuple text into raw arcs and anchors without the structural
/// checks of [`AnnotationGraph::build`], so that a checker can report on
/// ill-formed material instead of refusing it.
pub fn parse_parts(
    text: &str,
) -> Result<(Vec<Arc>, Vec<(NodeId, TimeRef)>), ParseError> {
    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_matches(' ');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tuple = parse_line(raw, line_no)?;
        if let Some(t) = &tuple.src_time {
            anchors.push((tuple.src.clone(), t.clone()));
        }
        if let Some(t) = &tuple.dst_time {
            anchors.push((tuple.dst.clone(), t.clone()));
        }
        arcs.push(tuple.arc());
    }
    Ok((arcs, anchors))
}

/// Parses a single tuple line.
pub fn parse_line(raw: &str, line_no: usize) -> Result<TupleLine, ParseError> {
    let err = |column: usize, message: String| ParseError::Syntax {
        line: line_no,
        column,
        message,
    };

    // Tokens are maximal runs of non-space characters; columns are 1-based
    // character positions.
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    let mut col = 0;
    let mut start: Option<(usize, usize)> = None;
    for (byte, c) in raw.char_indices() {
        col += 1;
        if c == ' ' {
            if let Some((sc, sb)) = start.take() {
                tokens.push((sc, &raw[sb..byte]));
            }
        } else if start.is_none() {
            start = Some((col, byte));
        }
    }
    if let Some((sc, sb)) = start {
        tokens.push((sc, &raw[sb..]));
    }

    if tokens.len() != 3 {
        return Err(err(
            1,
            format!("expected `<id/time> type/content <id/time>`, found {} fields", tokens.len()),
        ));
    }

    let (src_col, src_tok) = tokens[0];
    let (label_col, label_tok) = tokens[1];
    let (dst_col, dst_tok) = tokens[2];

    let (src, src_time) = parse_node(src_tok).map_err(|m| err(src_col, m))?;
    let (dst, dst_time) = parse_node(dst_tok).map_err(|m| err(dst_col, m))?;
    let label = parse_label(label_tok).map_err(|m| err(label_col, m))?;

    Ok(TupleLine { src, src_time, label, dst, dst_time })
}

fn parse_node(tok: &str) -> Result<(NodeId, Option<TimeRef>), String> {
    let inner = tok
        .strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .ok_or_else(|| format!("expected `<id/time>`, got {tok:?}"))?;
    let (id, time) = inner
        .split_once('/')
        .ok_or_else(|| format!("node {tok:?} is missing the `/` before its time"))?;
    let id = NodeId::new(id).map_err(|e| e.to_string())?;
    let time = if time.is_empty() {
        None
    } else {
        Some(TimeRef::parse(time).map_err(|e| e.to_string())?)
    };
    Ok((id, time))
}

fn parse_label(tok: &str) -> Result<Label, String> {
    let (type_, content) = tok
        .split_once('/')
        .ok_or_else(|| format!("label {tok:?} is missing the `/` separator"))?;
    let content = unescape(content)?;
    Label::new(type_, content).map_err(|e| e.to_string())
}

/// Parses the concatenation of several texts: file merge is graph union.
pub fn merge<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<AnnotationGraph, ParseError> {
    let joined: Vec<&str> = texts.into_iter().collect();
    parse(&joined.join("\n"))
}

/// The line-level difference between two graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArcDelta {
    pub added: BTreeSet<TupleLine>,
    pub removed: BTreeSet<TupleLine>,
}

impl ArcDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    /// Renders removals then additions, each line-sorted.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut removed: Vec<String> = self.removed.iter().map(|l| l.to_string()).collect();
        removed.sort();
        for line in removed {
            out.push_str("- ");
            out.push_str(&line);
            out.push('\n');
        }
        let mut added: Vec<String> = self.added.iter().map(|l| l.to_string()).collect();
        added.sort();
        for line in added {
            out.push_str("+ ");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Lines to remove from and add to `old` to obtain `new`.
pub fn delta(old: &AnnotationGraph, new: &AnnotationGraph) -> ArcDelta {
    let old_lines: BTreeSet<TupleLine> =
        old.arcs().map(|a| TupleLine::of_arc(old, a)).collect();
    let new_lines: BTreeSet<TupleLine> =
        new.arcs().map(|a| TupleLine::of_arc(new, a)).collect();
    ArcDelta {
        added: new_lines.difference(&old_lines).cloned().collect(),
        removed: old_lines.difference(&new_lines).cloned().collect(),
    }
}

/// Applies a delta with set semantics: remove, then add, then rebuild.
pub fn apply(delta: &ArcDelta, g: &AnnotationGraph) -> Result<AnnotationGraph, ParseError> {
    let mut lines: BTreeSet<TupleLine> = g.arcs().map(|a| TupleLine::of_arc(g, a)).collect();
    for line in &delta.removed {
        lines.remove(line);
    }
    for line in &delta.added {
        lines.insert(line.clone());
    }
    let mut arcs = Vec::new();
    let mut anchors = Vec::new();
    for line in lines {
        if let Some(t) = &line.src_time {
            anchors.push((line.src.clone(), t.clone()));
        }
        if let Some(t) = &line.dst_time {
            anchors.push((line.dst.clone(), t.clone()));
        }
        arcs.push(line.arc());
    }
    Ok(AnnotationGraph::build(arcs, anchors)?)
}
