//! NIST Universal Transcription Format.
//!
//! Each `<turn>` becomes its own connected subgraph: a `speaker/` and a
//! `spkrtype/` arc span the whole turn, and the words chain between them
//! through fresh nodes. `<time>` marks anchor the word boundary they sit
//! on; `<b_overlap>`/`<e_overlap>` contribute only their times, so overlap
//! between speakers stays implicit in the anchoring, never in the graph
//! structure. A `<contraction>` adds one `L/` arc per expanded form across
//! the surface token's span, and an enamex pair adds a named-entity arc
//! over the tokens it encloses.
//!
//! A time mark that does not extend the current word chain (for instance
//! a turn whose transcript starts somewhere after its `startTime`) starts
//! a new chain piece; the spanning turn arcs keep the component together.

use std::collections::BTreeMap;

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::markup::{self, Event, Tag};
use super::{Fresh, ImportError, ImportOptions};

struct Token {
    surface: String,
    expansions: Option<Vec<String>>,
}

struct OpenTurn {
    speaker: String,
    spkrtype: String,
    start: TimeRef,
    end: TimeRef,
    tokens: Vec<Token>,
    /// Times asserted at a word boundary, keyed by gap index: gap i sits
    /// between token i and token i+1, with gap 0 before the first token.
    gap_times: BTreeMap<usize, Vec<TimeRef>>,
    overlap_ends: Vec<TimeRef>,
    open_names: Vec<(usize, String)>,
    names: Vec<(usize, usize, String)>,
    pending_expansion: Option<Vec<(String, String)>>,
    glue: bool,
}

pub fn import_utf(text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    let events = markup::scan(text).map_err(ImportError::Xml)?;

    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    let mut fresh = Fresh::default();
    let mut turn: Option<OpenTurn> = None;

    for event in &events {
        match event {
            Event::Text(text) => {
                let t = in_turn(&mut turn, "text")?;
                let mut parts = text.split_whitespace();
                if t.glue {
                    let first = parts.next().expect("text events are never blank");
                    t.tokens.last_mut().expect("glue follows a token").surface.push_str(first);
                    t.glue = false;
                }
                for part in parts {
                    let expansions = match t.pending_expansion.take() {
                        None => None,
                        Some(forms) => {
                            let surface: String =
                                forms.iter().map(|(s, _)| s.as_str()).collect();
                            if surface != part {
                                return Err(ImportError::Xml(format!(
                                    "contraction {surface:?} does not match token {part:?}"
                                )));
                            }
                            Some(forms.into_iter().map(|(_, l)| l).collect())
                        }
                    };
                    t.tokens.push(Token { surface: part.to_string(), expansions });
                }
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("turn") => {
                if turn.is_some() {
                    return Err(ImportError::Xml("turns do not nest".into()));
                }
                turn = Some(OpenTurn {
                    speaker: required(tag, "speaker")?.to_string(),
                    spkrtype: required(tag, "spkrtype")?.to_string(),
                    start: time_attr(tag, "startTime")?,
                    end: time_attr(tag, "endTime")?,
                    tokens: Vec::new(),
                    gap_times: BTreeMap::new(),
                    overlap_ends: Vec::new(),
                    open_names: Vec::new(),
                    names: Vec::new(),
                    pending_expansion: None,
                    glue: false,
                });
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("time") => {
                let sec = time_attr(tag, "sec")?;
                let t = in_turn(&mut turn, "<time>")?;
                t.gap_times.entry(t.tokens.len()).or_default().push(sec);
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("b_overlap") => {
                let start = time_attr(tag, "startTime")?;
                let end = time_attr(tag, "endTime")?;
                let t = in_turn(&mut turn, "<b_overlap>")?;
                t.gap_times.entry(t.tokens.len()).or_default().push(start);
                t.overlap_ends.push(end);
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("e_overlap") => {
                let t = in_turn(&mut turn, "<e_overlap>")?;
                let end = t
                    .overlap_ends
                    .pop()
                    .ok_or_else(|| ImportError::UnbalancedTag("e_overlap".into()))?;
                t.gap_times.entry(t.tokens.len()).or_default().push(end);
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("b_enamex") => {
                let type_ = required(tag, "type")?.to_string();
                let t = in_turn(&mut turn, "<b_enamex>")?;
                t.open_names.push((t.tokens.len(), type_));
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("e_enamex") => {
                let t = in_turn(&mut turn, "<e_enamex>")?;
                let (from, type_) = t
                    .open_names
                    .pop()
                    .ok_or_else(|| ImportError::UnbalancedTag("e_enamex".into()))?;
                if from == t.tokens.len() {
                    return Err(ImportError::Xml("enamex encloses no tokens".into()));
                }
                t.names.push((from, t.tokens.len(), type_));
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("contraction") => {
                let forms = parse_e_form(required(tag, "e_form")?)?;
                let t = in_turn(&mut turn, "<contraction>")?;
                if t.pending_expansion.replace(forms).is_some() {
                    return Err(ImportError::Xml("contraction without a token between".into()));
                }
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("hyphen") => {
                let t = in_turn(&mut turn, "<hyphen>")?;
                match t.tokens.last_mut() {
                    Some(token) => token.surface.push('-'),
                    None => return Err(ImportError::Xml("hyphen without a token".into())),
                }
                t.glue = true;
            }
            Event::Open(tag) => {
                return Err(ImportError::Xml(format!("unexpected <{}>", tag.name)))
            }
            Event::Close(name) if name.eq_ignore_ascii_case("turn") => {
                let t = turn
                    .take()
                    .ok_or_else(|| ImportError::Xml("</turn> without <turn>".into()))?;
                finish_turn(t, opts, &mut arcs, &mut anchors, &mut fresh)?;
            }
            Event::Close(name) => {
                return Err(ImportError::Xml(format!("unexpected </{name}>")))
            }
        }
    }
    if turn.is_some() {
        return Err(ImportError::Xml("unclosed <turn>".into()));
    }

    Ok(AnnotationGraph::build(arcs, anchors)?)
}

fn finish_turn(
    mut t: OpenTurn,
    opts: &ImportOptions,
    arcs: &mut Vec<Arc>,
    anchors: &mut Vec<(NodeId, TimeRef)>,
    fresh: &mut Fresh,
) -> Result<(), ImportError> {
    if !t.overlap_ends.is_empty() {
        return Err(ImportError::UnbalancedTag("b_overlap".into()));
    }
    if !t.open_names.is_empty() {
        return Err(ImportError::UnbalancedTag("b_enamex".into()));
    }
    if t.pending_expansion.is_some() {
        return Err(ImportError::Xml("contraction without a following token".into()));
    }
    if t.glue {
        return Err(ImportError::Xml("hyphen at end of turn".into()));
    }

    let n = t.tokens.len();
    let s = fresh.next();
    anchors.push((s.clone(), t.start.clone()));
    let e = fresh.next();
    anchors.push((e.clone(), t.end.clone()));

    // One node run per gap. The first recorded time anchors the end of
    // the preceding token; a later, different time starts a new chain
    // piece at a fresh anchored node.
    let mut entry: Vec<NodeId> = Vec::with_capacity(n + 1);
    let mut exit: Vec<NodeId> = Vec::with_capacity(n + 1);
    for gap in 0..=n {
        let mut times = t.gap_times.remove(&gap).unwrap_or_default();
        if gap == 0 {
            times.insert(0, t.start.clone());
        }
        if gap == n {
            times.push(t.end.clone());
        }
        times.dedup();
        if gap == 0 && gap == n && times.len() == 1 {
            times.push(times[0].clone());
        }
        if times.is_empty() {
            let node = fresh.next();
            entry.push(node.clone());
            exit.push(node);
            continue;
        }
        let last = times.len() - 1;
        let mut nodes = Vec::with_capacity(times.len());
        for (i, time) in times.iter().enumerate() {
            if gap == 0 && i == 0 {
                nodes.push(s.clone());
            } else if gap == n && i == last {
                nodes.push(e.clone());
            } else {
                let node = fresh.next();
                anchors.push((node.clone(), time.clone()));
                nodes.push(node);
            }
        }
        entry.push(nodes[0].clone());
        exit.push(nodes[last].clone());
    }

    let w = opts.mapped_type("W");
    let l = opts.mapped_type("L");
    for (i, token) in t.tokens.iter().enumerate() {
        let src = exit[i].clone();
        let dst = entry[i + 1].clone();
        arcs.push(Arc::new(src.clone(), Label::new(w, &token.surface)?, dst.clone()));
        if let Some(forms) = &token.expansions {
            let mut cur = src;
            for (j, form) in forms.iter().enumerate() {
                let next = if j + 1 == forms.len() { dst.clone() } else { fresh.next() };
                arcs.push(Arc::new(cur, Label::new(l, form)?, next.clone()));
                cur = next;
            }
        }
    }
    for (from, to, type_) in &t.names {
        let label = Label::new(opts.mapped_type("enamex"), type_)?;
        arcs.push(Arc::new(exit[*from].clone(), label, entry[*to].clone()));
    }
    arcs.push(Arc::new(s.clone(), Label::new(opts.mapped_type("speaker"), &t.speaker)?, e.clone()));
    arcs.push(Arc::new(s, Label::new(opts.mapped_type("spkrtype"), &t.spkrtype)?, e));
    Ok(())
}

fn in_turn<'t>(
    turn: &'t mut Option<OpenTurn>,
    what: &str,
) -> Result<&'t mut OpenTurn, ImportError> {
    turn.as_mut()
        .ok_or_else(|| ImportError::Xml(format!("{what} outside any turn")))
}

fn required<'t>(tag: &'t Tag, attr: &str) -> Result<&'t str, ImportError> {
    tag.attr(attr)
        .ok_or_else(|| ImportError::Xml(format!("<{}> without {attr}", tag.name)))
}

fn time_attr(tag: &Tag, attr: &str) -> Result<TimeRef, ImportError> {
    TimeRef::parse(required(tag, attr)?).map_err(|e| ImportError::Xml(e.to_string()))
}

/// `[you=>you]['ve=>have]` pairs of surface fragment and expanded form.
fn parse_e_form(raw: &str) -> Result<Vec<(String, String)>, ImportError> {
    let bad = || ImportError::Xml(format!("malformed e_form {raw:?}"));
    let mut rest = raw;
    let mut forms = Vec::new();
    while !rest.is_empty() {
        let (inner, tail) = rest.strip_prefix('[').and_then(|r| r.split_once(']')).ok_or_else(bad)?;
        let (surface, lexical) = inner.split_once("=>").ok_or_else(bad)?;
        forms.push((surface.to_string(), lexical.to_string()));
        rest = tail;
    }
    if forms.is_empty() {
        return Err(bad());
    }
    Ok(forms)
}
