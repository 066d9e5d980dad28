//! Predicates over arcs with set-algebraic results.
//!
//! A query selects the subgraph of arcs satisfying a predicate; because
//! arc sets are closed under union, intersection and complement, results
//! compose with [`combine`] and selection distributes over the boolean
//! connectives. Results are general graphs: anchors are kept only for
//! nodes the selected arcs still touch, and nothing requires the result
//! to stay anchored.
//!
//! The textual form accepted by [`Predicate::parse`] covers the label
//! tests: `type=W & content~"^th"`, with `!`, `|`, and parentheses, plus
//! `class=TYPE/ID` for equivalence-class membership. Relational
//! predicates anchored on a specific arc or node pair are built
//! programmatically.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;

use crate::algebra;
use crate::classes::resolve_equivalence_classes;
use crate::graph::{AnnotationGraph, Arc, GraphError, Label, NodeId};
use crate::index::{IndexError, TimeLocalIndex, TypeLocalIndex};
use crate::relations::RelationMode;
use crate::time::TimeRef;

#[derive(Debug, thiserror::Error)]
pub enum QueryError {
    #[error("bad pattern: {0}")]
    BadPattern(String),
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// An arc test. Relational variants take an anchor arc or node pair that
/// must belong to the graph being queried.
#[derive(Clone, Debug)]
pub enum Predicate {
    /// The arc's label type equals the string.
    LabelType(String),
    /// The pattern matches somewhere in the content; anchor with `^`/`$`
    /// to force a full match.
    LabelContent(Regex),
    /// The arc's potential span overlaps the anchor arc's, excluding the
    /// anchor itself. Spans are half-open; an instant overlaps a span
    /// containing its point and another instant only at the same time.
    Overlaps(Arc),
    /// The anchor arc includes the arc under `mode`, excluding the anchor
    /// itself.
    Includes { anchor: Arc, mode: RelationMode },
    /// Constant over the graph: holds of every arc when `before` precedes
    /// `after` under `mode`, of none otherwise. A guard for conditional
    /// selection.
    Precedes { before: NodeId, after: NodeId, mode: RelationMode },
    /// The arc is linked into the equivalence class `class_type/id`,
    /// either carrying the class label itself or co-spanning an arc that
    /// does.
    InClass { class_type: String, id: String },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

impl Predicate {
    /// Content test from a pattern in the standard regex dialect.
    pub fn content(pattern: &str) -> Result<Predicate, QueryError> {
        let re = Regex::new(pattern).map_err(|e| QueryError::BadPattern(e.to_string()))?;
        Ok(Predicate::LabelContent(re))
    }

    /// Content test matching exactly `text`.
    pub fn content_exact(text: &str) -> Predicate {
        let re = Regex::new(&format!("^{}$", regex::escape(text)))
            .expect("escaped literals are valid patterns");
        Predicate::LabelContent(re)
    }

    pub fn and(self, other: Predicate) -> Predicate {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Predicate) -> Predicate {
        Predicate::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Predicate {
        Predicate::Not(Box::new(self))
    }

    /// Whether `arc` of `g` satisfies the predicate.
    pub fn matches(&self, g: &AnnotationGraph, arc: &Arc) -> Result<bool, QueryError> {
        self.eval(g, &mut BTreeMap::new(), arc)
    }

    fn eval(
        &self,
        g: &AnnotationGraph,
        classes: &mut BTreeMap<Label, BTreeSet<Arc>>,
        arc: &Arc,
    ) -> Result<bool, QueryError> {
        Ok(match self {
            Predicate::LabelType(t) => arc.label.type_() == t,
            Predicate::LabelContent(re) => re.is_match(arc.label.content()),
            Predicate::Overlaps(anchor) => {
                if !g.contains_arc(anchor) {
                    return Err(GraphError::UnknownArc(anchor.clone()).into());
                }
                arc != anchor
                    && match (g.potential_span(anchor), g.potential_span(arc)) {
                        (Some(a), Some(b)) => spans_overlap(&a, &b),
                        _ => false,
                    }
            }
            Predicate::Includes { anchor, mode } => {
                arc != anchor && g.includes_mode(anchor, arc, *mode)?
            }
            Predicate::Precedes { before, after, mode } => match mode {
                RelationMode::S => g.s_precedes(before, after)?,
                RelationMode::T => g.t_precedes(before, after)?,
                RelationMode::General => g.precedes(before, after)?,
            },
            Predicate::InClass { class_type, id } => {
                let key = Label::new(class_type, id)?;
                if !classes.contains_key(&key) {
                    let types: BTreeSet<String> = [class_type.clone()].into();
                    let map = resolve_equivalence_classes(g, &types);
                    let mut set = map.get(&key).cloned().unwrap_or_default();
                    set.extend(map.co_spanning(g, &key));
                    classes.insert(key.clone(), set);
                }
                classes[&key].contains(arc)
            }
            Predicate::And(a, b) => a.eval(g, classes, arc)? && b.eval(g, classes, arc)?,
            Predicate::Or(a, b) => a.eval(g, classes, arc)? || b.eval(g, classes, arc)?,
            Predicate::Not(p) => !p.eval(g, classes, arc)?,
        })
    }

    /// A superset of the matching arcs, read off the indexes; `None`
    /// when the predicate gives the indexes nothing to narrow by.
    fn candidates(
        &self,
        g: &AnnotationGraph,
        time: &TimeLocalIndex,
        types: &TypeLocalIndex,
    ) -> Result<Option<BTreeSet<Arc>>, QueryError> {
        Ok(match self {
            Predicate::LabelType(t) => Some(
                types
                    .group(t)
                    .map(|grp| grp.arcs().iter().cloned().collect())
                    .unwrap_or_default(),
            ),
            Predicate::Overlaps(anchor) => {
                if !g.contains_arc(anchor) {
                    return Err(GraphError::UnknownArc(anchor.clone()).into());
                }
                if time.intervals_of(anchor)?.is_empty() {
                    // Posted nowhere: an instant at the timeline's end,
                    // visible only to a full scan.
                    None
                } else {
                    Some(time.overlapping_arcs(anchor)?)
                }
            }
            Predicate::Includes { anchor, .. } => {
                if !g.contains_arc(anchor) {
                    return Err(GraphError::UnknownArc(anchor.clone()).into());
                }
                if time.intervals_of(anchor)?.is_empty() {
                    return Ok(None);
                }
                let (_, hi) = g.potential_span(anchor).expect("posted arcs have spans");
                // An included instant sitting exactly on the anchor's
                // upper bound shares no interval with it; pull in the
                // interval opening there as well.
                match time.intervals().iter().position(|iv| iv.lo == hi) {
                    Some(i) => {
                        let mut set = time.overlapping_arcs(anchor)?;
                        set.extend(time.postings(i).iter().cloned());
                        set.remove(anchor);
                        Some(set)
                    }
                    // The bound is the timeline's end, where instants
                    // are not posted at all.
                    None => None,
                }
            }
            Predicate::And(a, b) => {
                match (a.candidates(g, time, types)?, b.candidates(g, time, types)?) {
                    (Some(x), Some(y)) => Some(x.intersection(&y).cloned().collect()),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                }
            }
            Predicate::Or(a, b) => {
                match (a.candidates(g, time, types)?, b.candidates(g, time, types)?) {
                    (Some(mut x), Some(y)) => {
                        x.extend(y);
                        Some(x)
                    }
                    _ => None,
                }
            }
            Predicate::LabelContent(_)
            | Predicate::Precedes { .. }
            | Predicate::InClass { .. }
            | Predicate::Not(_) => None,
        })
    }

    /// Parses the textual form: `|` over `&` over `!`, parentheses,
    /// atoms `type=T`, `content=literal`, `content~"pattern"`, and
    /// `class=TYPE/ID`.
    pub fn parse(text: &str) -> Result<Predicate, QueryError> {
        let mut p = Parser { text, pos: 0 };
        let pred = p.or_expr()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(pred)
    }
}

/// `[lo, hi)` overlap; a degenerate span is the single point `lo`.
fn spans_overlap(a: &(TimeRef, TimeRef), b: &(TimeRef, TimeRef)) -> bool {
    let (sa, ea) = a;
    let (sb, eb) = b;
    match (sa == ea, sb == eb) {
        (false, false) => sa < eb && sb < ea,
        (true, false) => sb <= sa && sa < eb,
        (false, true) => sa <= sb && sb < ea,
        (true, true) => sa == sb,
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            return true;
        }
        false
    }

    fn or_expr(&mut self) -> Result<Predicate, QueryError> {
        let mut p = self.and_expr()?;
        while self.eat('|') {
            p = p.or(self.and_expr()?);
        }
        Ok(p)
    }

    fn and_expr(&mut self) -> Result<Predicate, QueryError> {
        let mut p = self.not_expr()?;
        while self.eat('&') {
            p = p.and(self.not_expr()?);
        }
        Ok(p)
    }

    fn not_expr(&mut self) -> Result<Predicate, QueryError> {
        if self.eat('!') {
            return Ok(self.not_expr()?.not());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Predicate, QueryError> {
        if self.eat('(') {
            let p = self.or_expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(p);
        }
        self.skip_ws();
        let key = self.ident()?;
        if self.eat('~') {
            if key != "content" {
                return Err(self.error(format!("`~` applies to content, not {key}")));
            }
            self.skip_ws();
            if self.peek() != Some('"') {
                return Err(self.error("expected a quoted pattern after `~`"));
            }
            return Predicate::content(&self.quoted()?);
        }
        if !self.eat('=') {
            return Err(self.error("expected `=` or `~` after the key"));
        }
        let value = self.value()?;
        match key.as_str() {
            "type" => Ok(Predicate::LabelType(value)),
            "content" => Ok(Predicate::content_exact(&value)),
            "class" => match value.split_once('/') {
                Some((class_type, id)) if !class_type.is_empty() && !id.is_empty() => {
                    Ok(Predicate::InClass {
                        class_type: class_type.to_string(),
                        id: id.to_string(),
                    })
                }
                _ => Err(self.error("expected class=TYPE/ID")),
            },
            _ => Err(self.error(format!(
                "unknown key {key:?} (expected type, content, or class)"
            ))),
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected a key"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn value(&mut self) -> Result<String, QueryError> {
        self.skip_ws();
        if self.peek() == Some('"') {
            return self.quoted();
        }
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| !c.is_whitespace() && !"&|!()=~\"".contains(c))
        {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected a value"));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn quoted(&mut self) -> Result<String, QueryError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => out.push(c),
                    Some(c) => {
                        out.push('\\');
                        out.push(c);
                    }
                    None => return Err(self.error("unterminated string")),
                },
                Some(c) => out.push(c),
                None => return Err(self.error("unterminated string")),
            }
        }
    }
}

/// The subgraph of exactly the arcs satisfying `p`, anchors restricted
/// to the nodes those arcs keep.
pub fn select(g: &AnnotationGraph, p: &Predicate) -> Result<AnnotationGraph, QueryError> {
    let mut classes = BTreeMap::new();
    let mut arcs = Vec::new();
    for arc in g.arcs() {
        if p.eval(g, &mut classes, arc)? {
            arcs.push(arc.clone());
        }
    }
    Ok(project(g, arcs)?)
}

/// [`select`] narrowed through the indexes first; same result, fewer
/// arcs tested. The indexes must have been built from `g`.
pub fn select_indexed(
    g: &AnnotationGraph,
    time: &TimeLocalIndex,
    types: &TypeLocalIndex,
    p: &Predicate,
) -> Result<AnnotationGraph, QueryError> {
    let mut classes = BTreeMap::new();
    let mut arcs = Vec::new();
    match p.candidates(g, time, types)? {
        Some(set) => {
            for arc in set {
                if p.eval(g, &mut classes, &arc)? {
                    arcs.push(arc);
                }
            }
        }
        None => {
            for arc in g.arcs() {
                if p.eval(g, &mut classes, arc)? {
                    arcs.push(arc.clone());
                }
            }
        }
    }
    Ok(project(g, arcs)?)
}

fn project(g: &AnnotationGraph, arcs: Vec<Arc>) -> Result<AnnotationGraph, GraphError> {
    let kept: BTreeSet<&NodeId> = arcs.iter().flat_map(|a| [&a.src, &a.dst]).collect();
    let anchors: Vec<(NodeId, TimeRef)> = g
        .anchors()
        .iter()
        .filter(|(n, _)| kept.contains(n))
        .map(|(n, t)| (n.clone(), t.clone()))
        .collect();
    AnnotationGraph::build(arcs, anchors)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

/// Combines two results over the same base graph.
pub fn combine(
    a: &AnnotationGraph,
    b: &AnnotationGraph,
    op: SetOp,
) -> Result<AnnotationGraph, QueryError> {
    Ok(match op {
        SetOp::Union => algebra::union(a, b)?,
        SetOp::Intersection => algebra::intersection(a, b)?,
        SetOp::Difference => algebra::relative_complement(a, b)?,
    })
}

/// The arcs posted to the elementary interval containing `t`; empty when
/// `t` falls outside the timeline.
pub fn find_spanning(idx: &TimeLocalIndex, t: &TimeRef) -> BTreeSet<Arc> {
    match idx.interval_at(t) {
        Some(i) => idx.postings(i).iter().cloned().collect(),
        None => BTreeSet::new(),
    }
}
