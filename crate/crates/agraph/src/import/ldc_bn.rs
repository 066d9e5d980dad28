//! LDC Broadcast News SGML transcripts.
//!
//! Sections span sets of segments; every word between a segment's tags
//! belongs to it, with `Sync` marks pinning interior word boundaries to
//! the signal. All those times share one registry, so abutting segments
//! and their section meet at the same anchored nodes, and each segment's
//! words chain from boundary to boundary through fresh unanchored nodes.
//! A boundary pair with no words between them simply has no arc: the
//! spanning segment arcs keep the piece connected.
//!
//! `Background` events live outside the hierarchy on their own chain of
//! anchored nodes, one chain per background type, each arc running to the
//! next event of that type or to the end of the annotated material; this
//! lets a stretch of background music bridge segment boundaries.

use std::collections::BTreeMap;

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::markup::{self, Event, Tag};
use super::{Fresh, ImportError, ImportOptions};

struct OpenSegment {
    end: TimeRef,
    prev: TimeRef,
    prev_node: NodeId,
    tokens: Vec<String>,
}

pub fn import_ldc_bn(text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    let events = markup::scan(text).map_err(ImportError::Xml)?;

    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    let mut fresh = Fresh::default();
    let mut registry: BTreeMap<TimeRef, NodeId> = BTreeMap::new();
    let mut backgrounds: Vec<(String, TimeRef, String)> = Vec::new();
    let mut doc_end: Option<TimeRef> = None;
    let mut segment: Option<OpenSegment> = None;
    let w_type = opts.mapped_type("W");

    let mut boundary = |t: &TimeRef, fresh: &mut Fresh, anchors: &mut Vec<(NodeId, TimeRef)>| {
        registry
            .entry(t.clone())
            .or_insert_with(|| {
                let n = fresh.next();
                anchors.push((n.clone(), t.clone()));
                n
            })
            .clone()
    };

    for event in &events {
        match event {
            Event::Text(t) => match &mut segment {
                Some(seg) => seg.tokens.extend(t.split_whitespace().map(String::from)),
                None => {
                    return Err(ImportError::Xml(format!(
                        "text outside any segment: {:?}",
                        t.trim()
                    )))
                }
            },
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("Background") => {
                backgrounds.push((
                    required(tag, "Type")?.to_string(),
                    time_attr(tag, "Time")?,
                    required(tag, "Level")?.to_lowercase(),
                ));
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("Section") => {
                let s = time_attr(tag, "S_time")?;
                let e = time_attr(tag, "E_time")?;
                let label = Label::new(opts.mapped_type("section"), required(tag, "Type")?)?;
                let src = boundary(&s, &mut fresh, &mut anchors);
                let dst = boundary(&e, &mut fresh, &mut anchors);
                arcs.push(Arc::new(src, label, dst));
                doc_end = Some(doc_end.map_or(e.clone(), |d: TimeRef| d.max(e)));
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("Segment") => {
                if segment.is_some() {
                    return Err(ImportError::Xml("segments do not nest".into()));
                }
                let s = time_attr(tag, "S_time")?;
                let e = time_attr(tag, "E_time")?;
                let src = boundary(&s, &mut fresh, &mut anchors);
                let dst = boundary(&e, &mut fresh, &mut anchors);
                let speaker = Label::new(opts.mapped_type("speaker"), required(tag, "Speaker")?)?;
                arcs.push(Arc::new(src.clone(), speaker, dst.clone()));
                for (attr, type_) in [("Fidelity", "fidelity"), ("Mode", "mode")] {
                    if let Some(v) = tag.attr(attr) {
                        let label = Label::new(opts.mapped_type(type_), v)?;
                        arcs.push(Arc::new(src.clone(), label, dst.clone()));
                    }
                }
                doc_end = Some(doc_end.map_or(e.clone(), |d: TimeRef| d.max(e.clone())));
                segment = Some(OpenSegment { end: e, prev: s, prev_node: src, tokens: Vec::new() });
            }
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("Sync") => {
                let seg = segment
                    .as_mut()
                    .ok_or_else(|| ImportError::Xml("sync outside any segment".into()))?;
                let t = time_attr(tag, "Time")?;
                let node = boundary(&t, &mut fresh, &mut anchors);
                advance(seg, t, node, &mut arcs, &mut fresh, w_type)?;
            }
            Event::Open(tag) => {
                return Err(ImportError::Xml(format!("unexpected <{}>", tag.name)))
            }
            Event::Close(name) if name.eq_ignore_ascii_case("Segment") => {
                let mut seg = segment
                    .take()
                    .ok_or_else(|| ImportError::Xml("</Segment> without <Segment>".into()))?;
                let t = seg.end.clone();
                let node = boundary(&t, &mut fresh, &mut anchors);
                advance(&mut seg, t, node, &mut arcs, &mut fresh, w_type)?;
            }
            Event::Close(name)
                if ["Section", "Background", "Sync"]
                    .iter()
                    .any(|n| name.eq_ignore_ascii_case(n)) => {}
            Event::Close(name) => {
                return Err(ImportError::Xml(format!("unexpected </{name}>")))
            }
        }
    }
    if segment.is_some() {
        return Err(ImportError::Xml("unclosed <Segment>".into()));
    }

    // Background chains: per type, own anchored nodes, arc to the next
    // event of the same type or to the end of the annotated material.
    let mut chains: BTreeMap<&str, Vec<(&TimeRef, &str)>> = BTreeMap::new();
    for (type_, time, level) in &backgrounds {
        chains.entry(type_).or_default().push((time, level));
    }
    for (type_, events) in chains {
        let short = type_.chars().next().map(|c| c.to_uppercase().to_string());
        let short = short.as_deref().unwrap_or("B");
        let arc_type = opts.mapped_or(type_, short);
        let mut cur: Option<(NodeId, &TimeRef, &str)> = None;
        for (time, level) in events {
            let node = fresh.next();
            anchors.push((node.clone(), time.clone()));
            if let Some((prev_node, prev_time, prev_level)) = cur {
                if time < prev_time {
                    return Err(ImportError::NonMonotonicSync { time: time.to_string() });
                }
                arcs.push(Arc::new(prev_node, Label::new(arc_type, prev_level)?, node.clone()));
            }
            cur = Some((node, time, level));
        }
        if let Some((last_node, last_time, last_level)) = cur {
            let end = doc_end.clone().filter(|e| e > last_time).unwrap_or(last_time.clone());
            let terminal = fresh.next();
            anchors.push((terminal.clone(), end));
            arcs.push(Arc::new(last_node, Label::new(arc_type, last_level)?, terminal));
        }
    }

    Ok(AnnotationGraph::build(arcs, anchors)?)
}

/// Closes the word run ending at `node`, which sits at time `t`.
fn advance(
    seg: &mut OpenSegment,
    t: TimeRef,
    node: NodeId,
    arcs: &mut Vec<Arc>,
    fresh: &mut Fresh,
    w_type: &str,
) -> Result<(), ImportError> {
    if t < seg.prev || (t == seg.prev && !seg.tokens.is_empty()) {
        return Err(ImportError::NonMonotonicSync { time: t.to_string() });
    }
    let words = std::mem::take(&mut seg.tokens);
    let mut cur = seg.prev_node.clone();
    for (i, word) in words.iter().enumerate() {
        let next = if i + 1 == words.len() { node.clone() } else { fresh.next() };
        arcs.push(Arc::new(cur, Label::new(w_type, word)?, next.clone()));
        cur = next;
    }
    seg.prev = t;
    seg.prev_node = node;
    Ok(())
}

fn required<'t>(tag: &'t Tag, attr: &str) -> Result<&'t str, ImportError> {
    tag.attr(attr)
        .ok_or_else(|| ImportError::Xml(format!("<{}> without {attr}", tag.name)))
}

fn time_attr(tag: &Tag, attr: &str) -> Result<TimeRef, ImportError> {
    TimeRef::parse(required(tag, attr)?).map_err(|e| ImportError::Xml(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AnchorClass;

    const HUB4: &str = include_str!("../../data/hub4.sgml");

    fn by_type<'g>(g: &'g AnnotationGraph, t: &str) -> Vec<&'g Arc> {
        g.arcs().filter(|a| a.label.type_() == t).collect()
    }

    fn time_str(g: &AnnotationGraph, n: &NodeId) -> String {
        g.time_of(n).map(ToString::to_string).unwrap_or_default()
    }

    #[test]
    fn the_hierarchy_and_the_background_are_separate_components() {
        let g = import_ldc_bn(HUB4, &ImportOptions::default()).unwrap();
        assert_eq!(by_type(&g, "W").len(), 112);
        assert_eq!(by_type(&g, "M").len(), 3);
        assert_eq!(by_type(&g, "speaker").len(), 2);
        assert_eq!(by_type(&g, "fidelity").len(), 2);
        assert_eq!(by_type(&g, "mode").len(), 2);
        assert_eq!(by_type(&g, "section").len(), 1);
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.classify_anchoring(), AnchorClass::Anchored);
        assert_eq!(g.anchors().len(), 16);
    }

    #[test]
    fn segments_meet_their_section_at_shared_nodes() {
        let g = import_ldc_bn(HUB4, &ImportOptions::default()).unwrap();
        let speakers = by_type(&g, "speaker");
        let tad = speakers.iter().find(|a| a.label.content() == "Tad_Bile").unwrap();
        let noah = speakers.iter().find(|a| a.label.content() == "Noah_Adams").unwrap();
        assert_eq!(tad.dst, noah.src);
        let section = by_type(&g, "section")[0];
        assert_eq!(section.label.content(), "Filler");
        assert_eq!(section.src, tad.src);
        assert_eq!(time_str(&g, &section.dst), "59.989");
        let fid = by_type(&g, "fidelity");
        assert!(fid.iter().any(|a| a.label.content() == "Low" && a.src == tad.src));
    }

    #[test]
    fn words_chain_between_sync_marks() {
        let g = import_ldc_bn(HUB4, &ImportOptions::default()).unwrap();
        let so = g.arcs().find(|a| a.label.to_string() == "W/so").unwrap();
        assert_eq!(time_str(&g, &so.src), "8.015");
        let republican = g.arcs().find(|a| a.label.content() == "republican").unwrap();
        assert_eq!(time_str(&g, &republican.dst), "11.040");
        let pay = g.arcs().find(|a| a.label.content() == "pay").unwrap();
        assert_eq!(time_str(&g, &pay.dst), "40.840");
        assert_eq!(g.arcs().filter(|a| a.label.content() == "{breath}").count(), 4);
    }

    #[test]
    fn boundary_pairs_with_no_words_have_no_arc() {
        let g = import_ldc_bn(HUB4, &ImportOptions::default()).unwrap();
        let empty_run_start = g
            .arcs()
            .filter(|a| a.label.type_() == "W")
            .filter(|a| time_str(&g, &a.src) == "18.960")
            .count();
        assert_eq!(empty_run_start, 0);
        assert!(g.arcs().any(|a| a.label.type_() == "W" && time_str(&g, &a.src) == "23.613"));
    }

    #[test]
    fn background_events_span_to_the_next_change_or_the_end() {
        let g = import_ldc_bn(HUB4, &ImportOptions::default()).unwrap();
        let m = by_type(&g, "M");
        let high = m.iter().find(|a| a.label.content() == "high").unwrap();
        assert_eq!(time_str(&g, &high.src), "0.000");
        assert_eq!(time_str(&g, &high.dst), "4.233");
        let mut lows: Vec<(String, String)> = m
            .iter()
            .filter(|a| a.label.content() == "low")
            .map(|a| (time_str(&g, &a.src), time_str(&g, &a.dst)))
            .collect();
        lows.sort();
        assert_eq!(
            lows,
            [
                ("23.613".to_string(), "59.989".to_string()),
                ("4.233".to_string(), "23.613".to_string()),
            ]
        );
        // Independent of the hierarchy: same times, distinct nodes.
        let section = by_type(&g, "section")[0];
        assert!(m.iter().all(|a| a.src != section.src && a.dst != section.dst));
    }

    #[test]
    fn segment_without_syncs_anchors_only_its_endpoints() {
        let text = "<Segment S_time=1.0 E_time=2.0 Speaker=X>\nhello there\n</Segment>\n";
        let g = import_ldc_bn(text, &ImportOptions::default()).unwrap();
        assert_eq!(g.anchors().len(), 2);
        assert_eq!(by_type(&g, "W").len(), 2);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn sync_marks_must_not_run_backwards() {
        let text = "<Segment S_time=5.0 E_time=9.0 Speaker=X>\nhi\n<Sync Time=4.0>\n</Segment>\n";
        let err = import_ldc_bn(text, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::NonMonotonicSync { time: "4.0".into() });
        let text = "<Segment S_time=5.0 E_time=6.0 Speaker=X>\n<Sync Time=7.0>\n</Segment>\n";
        let err = import_ldc_bn(text, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::NonMonotonicSync { time: "6.0".into() });
    }

    #[test]
    fn stray_material_is_rejected() {
        for text in [
            "words in the void\n",
            "<Sync Time=1.0>\n",
            "<Turnip S_time=1.0>\n",
            "<Segment S_time=1.0 E_time=2.0>\n</Segment>\n",
            "<Segment S_time=1.0 E_time=2.0 Speaker=X>\n",
        ] {
            let err = import_ldc_bn(text, &ImportOptions::default()).unwrap_err();
            assert!(matches!(err, ImportError::Xml(_)), "{text:?}: {err:?}");
        }
    }
}
