//! LACITO archive documents: transcribed sentences with an interlinear
//! gloss and a phrasal translation.
//!
//! Each `S` element yields one chain of nodes named `<id>.0`, `<id>.1`,
//! ... The `TRANSCR` words become `W/` arcs along the chain and the
//! `MOTAMOT` gloss words become `M/` arcs over the same nodes, one-to-one.
//! The `TRADUC` translation is a single `T/` arc across the sentence; only
//! its endpoints can carry times, taken from the `AUDIO` element. Interior
//! boundaries stay unanchored, and the `T/` arc's interior has no
//! boundaries at all: a phrasal translation has no word-level timing.

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::markup::{self, Event};
use super::{ImportError, ImportOptions};

pub fn import_lacito(xml_text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    let events = markup::scan(xml_text).map_err(ImportError::Xml)?;
    let mut arcs = Vec::new();
    let mut anchors = Vec::new();
    let mut ordinal = 0usize;
    let mut i = 0;
    while i < events.len() {
        match &events[i] {
            Event::Open(tag) if tag.name.eq_ignore_ascii_case("S") => {
                let id = match tag.attr("id") {
                    Some(id) => id.to_string(),
                    None => format!("s{ordinal}"),
                };
                ordinal += 1;
                i = read_sentence(&events, i + 1, &id, opts, &mut arcs, &mut anchors)?;
            }
            _ => i += 1,
        }
    }
    Ok(AnnotationGraph::build(arcs, anchors)?)
}

fn read_sentence(
    events: &[Event],
    mut i: usize,
    id: &str,
    opts: &ImportOptions,
    arcs: &mut Vec<Arc>,
    anchors: &mut Vec<(NodeId, TimeRef)>,
) -> Result<usize, ImportError> {
    let mut words: Vec<String> = Vec::new();
    let mut glosses: Vec<String> = Vec::new();
    let mut translation: Option<String> = None;
    let mut audio: Option<(TimeRef, TimeRef)> = None;

    loop {
        match events.get(i) {
            Some(Event::Open(tag)) if tag.name.eq_ignore_ascii_case("TRANSCR") => {
                (words, i) = read_words(events, i + 1, "TRANSCR")?;
            }
            Some(Event::Open(tag)) if tag.name.eq_ignore_ascii_case("MOTAMOT") => {
                (glosses, i) = read_words(events, i + 1, "MOTAMOT")?;
            }
            Some(Event::Open(tag)) if tag.name.eq_ignore_ascii_case("TRADUC") => {
                let mut text = String::new();
                i += 1;
                loop {
                    match events.get(i) {
                        Some(Event::Text(t)) => {
                            text.push_str(t);
                            i += 1;
                        }
                        Some(Event::Close(name)) if name.eq_ignore_ascii_case("TRADUC") => {
                            i += 1;
                            break;
                        }
                        _ => return Err(ImportError::Xml("TRADUC holds only text".into())),
                    }
                }
                let text = markup::decode_entities(text.trim()).map_err(ImportError::Xml)?;
                translation = Some(text);
            }
            Some(Event::Open(tag)) if tag.name.eq_ignore_ascii_case("AUDIO") => {
                let time = |attr: &str| -> Result<TimeRef, ImportError> {
                    let v = tag
                        .attr(attr)
                        .ok_or_else(|| ImportError::Xml(format!("AUDIO without {attr}")))?;
                    TimeRef::parse(v).map_err(|e| ImportError::Xml(e.to_string()))
                };
                audio = Some((time("start")?, time("end")?));
                i += 1;
                if !tag.self_closing {
                    match events.get(i) {
                        Some(Event::Close(name)) if name.eq_ignore_ascii_case("AUDIO") => i += 1,
                        _ => return Err(ImportError::Xml("AUDIO element holds nothing".into())),
                    }
                }
            }
            Some(Event::Close(name)) if name.eq_ignore_ascii_case("S") => {
                i += 1;
                break;
            }
            Some(Event::Text(t)) => {
                return Err(ImportError::Xml(format!("stray text {:?} inside <S>", t.trim())))
            }
            Some(other) => {
                return Err(ImportError::Xml(format!("unexpected {other:?} inside <S>")))
            }
            None => return Err(ImportError::Xml("unclosed <S>".into())),
        }
    }

    if !glosses.is_empty() && glosses.len() != words.len() {
        return Err(ImportError::AlignmentMismatch {
            transcription: words.len(),
            gloss: glosses.len(),
        });
    }

    let spans = words.len().max(1);
    let nodes: Vec<NodeId> = (0..=spans)
        .map(|k| NodeId::new(format!("{id}.{k}")))
        .collect::<Result<_, _>>()?;
    for (k, w) in words.iter().enumerate() {
        let label = Label::new(opts.mapped_type("W"), w)?;
        arcs.push(Arc::new(nodes[k].clone(), label, nodes[k + 1].clone()));
    }
    for (k, m) in glosses.iter().enumerate() {
        let label = Label::new(opts.mapped_type("M"), m)?;
        arcs.push(Arc::new(nodes[k].clone(), label, nodes[k + 1].clone()));
    }
    if let Some(t) = translation {
        let label = Label::new(opts.mapped_type("T"), t)?;
        arcs.push(Arc::new(nodes[0].clone(), label, nodes[spans].clone()));
    }
    if let Some((start, end)) = audio {
        anchors.push((nodes[0].clone(), start));
        anchors.push((nodes[spans].clone(), end));
    }
    Ok(i)
}

fn read_words(
    events: &[Event],
    mut i: usize,
    container: &str,
) -> Result<(Vec<String>, usize), ImportError> {
    let mut words = Vec::new();
    loop {
        match events.get(i) {
            Some(Event::Open(tag)) if tag.name.eq_ignore_ascii_case("W") => {
                if tag.self_closing {
                    words.push(String::new());
                    i += 1;
                    continue;
                }
                let mut text = String::new();
                i += 1;
                loop {
                    match events.get(i) {
                        Some(Event::Text(t)) => {
                            text.push_str(t);
                            i += 1;
                        }
                        Some(Event::Close(name)) if name.eq_ignore_ascii_case("W") => {
                            i += 1;
                            break;
                        }
                        _ => return Err(ImportError::Xml("<W> holds only text".into())),
                    }
                }
                words.push(markup::decode_entities(text.trim()).map_err(ImportError::Xml)?);
            }
            Some(Event::Close(name)) if name.eq_ignore_ascii_case(container) => {
                return Ok((words, i + 1))
            }
            _ => {
                return Err(ImportError::Xml(format!("expected <W> inside <{container}>")))
            }
        }
    }
}
