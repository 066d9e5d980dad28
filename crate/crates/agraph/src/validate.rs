//! Checks that report findings instead of failing.
//!
//! Three layers: structural soundness (the same rules graph construction
//! enforces, plus anchoring-class shortfalls), content vocabularies, and
//! hierarchy coverage (is every phone inside some word). Checks never
//! mutate or repair; structural violations are errors, vocabulary and
//! hierarchy findings warnings.
//!
//! Structure checks run on raw arcs and anchors so that material a strict
//! parser would refuse can still be described finding by finding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::encoding::TupleLine;
use crate::graph::{AnchorClass, AnnotationGraph, Arc, NodeId};
use crate::relations::RelationMode;
use crate::time::TimeRef;
use crate::typeorder::TypeOrder;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// What a finding points at: a node or an arc rendered as the line it
/// would occupy in a serialized file.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Locus {
    Node(NodeId),
    Arc(TupleLine),
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locus::Node(n) => write!(f, "{n}"),
            Locus::Arc(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub locus: Locus,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.severity, self.code, self.locus, self.message)
    }
}

/// Findings ordered by locus, then code; empty iff every check passed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ValidationReport {
    findings: Vec<Finding>,
}

impl ValidationReport {
    fn new(mut findings: Vec<Finding>) -> ValidationReport {
        findings.sort_by(|a, b| (&a.locus, &a.code).cmp(&(&b.locus, &b.code)));
        findings.dedup();
        ValidationReport { findings }
    }

    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    /// Concatenation, re-sorted.
    pub fn combine(reports: impl IntoIterator<Item = ValidationReport>) -> ValidationReport {
        ValidationReport::new(reports.into_iter().flat_map(|r| r.findings).collect())
    }

    /// One `SEVERITY CODE LOCUS MESSAGE` line per finding.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for finding in &self.findings {
            out.push_str(&finding.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "findings": self
                .findings
                .iter()
                .map(|f| {
                    serde_json::json!({
                        "severity": f.severity.to_string(),
                        "code": f.code,
                        "locus": f.locus.to_string(),
                        "message": f.message,
                    })
                })
                .collect::<Vec<_>>(),
        })
    }
}

fn finding(severity: Severity, code: &str, locus: Locus, message: impl Into<String>) -> Finding {
    Finding { severity, code: code.to_string(), locus, message: message.into() }
}

/// Structural soundness of raw material: anchor conflicts, cycles, arcs
/// that run backwards in time, anchoring below `required`, and interior
/// nodes squeezed into zero duration.
pub fn validate_structure(
    arcs: &[Arc],
    anchors: &[(NodeId, TimeRef)],
    required: AnchorClass,
) -> ValidationReport {
    let mut findings = Vec::new();

    let mut times: BTreeMap<&NodeId, &TimeRef> = BTreeMap::new();
    for (node, time) in anchors {
        match times.get(node) {
            Some(first) if *first != time => findings.push(finding(
                Severity::Error,
                "anchor-conflict",
                Locus::Node(node.clone()),
                format!("anchored at both {first} and {time}"),
            )),
            Some(_) => {}
            None => {
                times.insert(node, time);
            }
        }
    }

    let mut nodes: BTreeSet<&NodeId> = times.keys().copied().collect();
    let mut succ: BTreeMap<&NodeId, BTreeSet<&NodeId>> = BTreeMap::new();
    let mut pred: BTreeMap<&NodeId, BTreeSet<&NodeId>> = BTreeMap::new();
    for arc in arcs {
        nodes.insert(&arc.src);
        nodes.insert(&arc.dst);
        succ.entry(&arc.src).or_default().insert(&arc.dst);
        pred.entry(&arc.dst).or_default().insert(&arc.src);
    }

    let line = |arc: &Arc| {
        Locus::Arc(TupleLine {
            src: arc.src.clone(),
            src_time: times.get(&arc.src).map(|t| (*t).clone()),
            label: arc.label.clone(),
            dst: arc.dst.clone(),
            dst_time: times.get(&arc.dst).map(|t| (*t).clone()),
        })
    };

    for arc in arcs {
        if let (Some(s), Some(d)) = (times.get(&arc.src), times.get(&arc.dst)) {
            if s > d {
                findings.push(finding(
                    Severity::Error,
                    "order-violation",
                    line(arc),
                    format!("runs backwards in time: {s} > {d}"),
                ));
            }
        }
    }

    // Kahn peeling; whatever survives lies on a cycle.
    let mut degree: BTreeMap<&NodeId, usize> =
        nodes.iter().map(|n| (*n, pred.get(*n).map_or(0, BTreeSet::len))).collect();
    let mut queue: Vec<&NodeId> =
        degree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut order: Vec<&NodeId> = Vec::with_capacity(nodes.len());
    while let Some(node) = queue.pop() {
        order.push(node);
        for next in succ.get(node).into_iter().flatten() {
            let d = degree.get_mut(next).expect("every endpoint is a node");
            *d -= 1;
            if *d == 0 {
                queue.push(next);
            }
        }
    }
    let acyclic = order.len() == nodes.len();
    for node in &nodes {
        if !order.contains(node) {
            findings.push(finding(
                Severity::Error,
                "cycle",
                Locus::Node((*node).clone()),
                "lies on a cycle",
            ));
        }
    }

    if required >= AnchorClass::Anchored {
        for node in &nodes {
            if times.contains_key(*node) {
                continue;
            }
            if pred.get(*node).is_none_or(BTreeSet::is_empty) {
                findings.push(finding(
                    Severity::Error,
                    "dangling-source",
                    Locus::Node((*node).clone()),
                    "unanchored node with no incoming arcs",
                ));
            }
            if succ.get(*node).is_none_or(BTreeSet::is_empty) {
                findings.push(finding(
                    Severity::Error,
                    "dangling-sink",
                    Locus::Node((*node).clone()),
                    "unanchored node with no outgoing arcs",
                ));
            }
            if required == AnchorClass::TotallyAnchored {
                findings.push(finding(
                    Severity::Error,
                    "unanchored-node",
                    Locus::Node((*node).clone()),
                    "node carries no time",
                ));
            }
        }
    }

    // An unanchored node whose anchored surroundings leave it no room is
    // a zero-length stretch that is not a deliberate instant.
    if acyclic {
        let mut lo: BTreeMap<&NodeId, TimeRef> = BTreeMap::new();
        let mut hi: BTreeMap<&NodeId, TimeRef> = BTreeMap::new();
        for node in &order {
            let mut best: Option<TimeRef> = times.get(*node).map(|t| (*t).clone());
            for prev in pred.get(*node).into_iter().flatten() {
                if let Some(t) = lo.get(prev) {
                    if best.as_ref().is_none_or(|b| t > b) {
                        best = Some(t.clone());
                    }
                }
            }
            if let Some(t) = best {
                lo.insert(node, t);
            }
        }
        for node in order.iter().rev() {
            let mut best: Option<TimeRef> = times.get(*node).map(|t| (*t).clone());
            for next in succ.get(*node).into_iter().flatten() {
                if let Some(t) = hi.get(next) {
                    if best.as_ref().is_none_or(|b| t < b) {
                        best = Some(t.clone());
                    }
                }
            }
            if let Some(t) = best {
                hi.insert(node, t);
            }
        }
        for node in &nodes {
            if times.contains_key(*node) {
                continue;
            }
            if let (Some(a), Some(b)) = (lo.get(*node), hi.get(*node)) {
                if a == b {
                    findings.push(finding(
                        Severity::Warning,
                        "zero-span-chain",
                        Locus::Node((*node).clone()),
                        format!("squeezed to exactly {a} between anchored nodes"),
                    ));
                }
            }
        }
    }

    ValidationReport::new(findings)
}

/// Structure checks over an already-built graph.
pub fn validate_graph(g: &AnnotationGraph, required: AnchorClass) -> ValidationReport {
    let arcs: Vec<Arc> = g.arcs().cloned().collect();
    let anchors: Vec<(NodeId, TimeRef)> =
        g.anchors().iter().map(|(n, t)| (n.clone(), t.clone())).collect();
    validate_structure(&arcs, &anchors, required)
}

/// One warning per arc whose type has a vocabulary and whose content is
/// not in it.
pub fn validate_content(
    g: &AnnotationGraph,
    vocab: &BTreeMap<String, BTreeSet<String>>,
) -> ValidationReport {
    let mut findings = Vec::new();
    for arc in g.arcs() {
        let Some(permitted) = vocab.get(arc.label.type_()) else { continue };
        if !permitted.contains(arc.label.content()) {
            findings.push(finding(
                Severity::Warning,
                "vocabulary",
                Locus::Arc(TupleLine::of_arc(g, arc)),
                format!(
                    "content {:?} is not in the {} vocabulary",
                    arc.label.content(),
                    arc.label.type_()
                ),
            ));
        }
    }
    ValidationReport::new(findings)
}

/// Coverage rules: for every `(outer, inner)` pair, each inner-typed arc
/// must be included in some outer-typed arc under `mode`. Pairs come from
/// `containment` and from the direct pairs of `order`.
pub fn validate_hierarchy(
    g: &AnnotationGraph,
    order: &TypeOrder,
    containment: &[(String, String)],
    mode: RelationMode,
) -> ValidationReport {
    let mut rules: BTreeSet<(&str, &str)> =
        containment.iter().map(|(o, i)| (o.as_str(), i.as_str())).collect();
    rules.extend(order.pairs());

    let mut findings = Vec::new();
    for (outer, inner) in rules {
        let covers: Vec<&Arc> = g.arcs().filter(|a| a.label.type_() == outer).collect();
        for arc in g.arcs().filter(|a| a.label.type_() == inner) {
            let covered = covers
                .iter()
                .any(|c| g.includes_mode(c, arc, mode).expect("arcs of g"));
            if !covered {
                findings.push(finding(
                    Severity::Warning,
                    "uncovered",
                    Locus::Arc(TupleLine::of_arc(g, arc)),
                    format!("no {outer} arc covers it"),
                ));
            }
        }
    }
    ValidationReport::new(findings)
}

/// `TYPE: item item ...` lines; later lines for the same type accumulate.
pub fn parse_vocab(text: &str) -> Result<BTreeMap<String, BTreeSet<String>>, String> {
    let mut vocab: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (type_, items) = line
            .split_once(':')
            .ok_or_else(|| format!("line {}: expected `TYPE: item item ...`", i + 1))?;
        let type_ = type_.trim();
        if type_.is_empty() {
            return Err(format!("line {}: empty type", i + 1));
        }
        vocab
            .entry(type_.to_string())
            .or_default()
            .extend(items.split_whitespace().map(String::from));
    }
    Ok(vocab)
}

/// `OUTER contains INNER` lines.
pub fn parse_containment(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut rules = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            [outer, "contains", inner] => rules.push((outer.to_string(), inner.to_string())),
            _ => return Err(format!("line {}: expected `OUTER contains INNER`", i + 1)),
        }
    }
    Ok(rules)
}
