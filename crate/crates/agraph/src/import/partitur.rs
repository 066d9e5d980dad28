//! BAS Partitur tier bundles.
//!
//! A Partitur file is a sequence of `TIER: ...` lines. The KAN tier
//! declares numbered words; ORT, TRL and DAS lines hang material off those
//! numbers; MAU lines carry sample offsets and durations plus a word
//! number (or -1 for material outside any word). Conventional short types
//! are emitted: `K/` canonical, `O/` orthography, `TRL/` transliteration,
//! `D/` dialogue act, `M/` phonetic segment.
//!
//! A MAU segment covers samples offset .. offset+duration inclusive, so
//! its end node sits at offset+duration+1; with that reading, abutting
//! segments share nodes exactly. A word spans its first segment's start
//! to its last segment's end. Words with no speech material get fresh
//! unanchored endpoints, chained to their neighbours.

use std::collections::BTreeMap;

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::{Fresh, ImportError, ImportOptions};

struct MauLine {
    start: u64,
    end: u64,
    word: Option<usize>,
    label: String,
}

pub fn import_partitur(text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    if opts.sample_rate == 0 {
        return Err(ImportError::InvalidOptions("sample rate must be positive".into()));
    }

    let mut kan: BTreeMap<usize, String> = BTreeMap::new();
    let mut ort: Vec<(usize, String)> = Vec::new();
    let mut trl: Vec<(usize, String)> = Vec::new();
    let mut das: Vec<(Vec<usize>, String)> = Vec::new();
    let mut mau: Vec<MauLine> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (key, rest) = trimmed.split_once(':').ok_or_else(|| {
            ImportError::syntax(line, format!("expected `TIER: ...`, got {trimmed:?}"))
        })?;
        let rest = rest.trim();
        match key {
            "KAN" => {
                let (k, label) = split_anchor(line, rest)?;
                if kan.insert(k, label.to_string()).is_some() {
                    return Err(ImportError::syntax(line, format!("anchor {k} declared twice")));
                }
            }
            "ORT" => {
                let (k, label) = split_anchor(line, rest)?;
                ort.push((k, label.to_string()));
            }
            "TRL" => {
                let (k, label) = split_anchor(line, rest)?;
                trl.push((k, label.to_string()));
            }
            "DAS" => {
                let (ks, label) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let anchors: Vec<usize> = ks
                    .split(',')
                    .map(|p| p.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ImportError::syntax(line, format!("bad anchor list {ks:?}")))?;
                if !anchors.windows(2).all(|w| w[1] == w[0] + 1) {
                    return Err(ImportError::syntax(
                        line,
                        "anchor list must be a contiguous ascending run",
                    ));
                }
                das.push((anchors, label.trim_start().to_string()));
            }
            "MAU" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() < 4 {
                    return Err(ImportError::syntax(
                        line,
                        "expected `MAU: offset duration word label`",
                    ));
                }
                let bad = |what: &str| ImportError::syntax(line, format!("bad {what}"));
                let start: u64 = fields[0].parse().map_err(|_| bad("offset"))?;
                let duration: u64 = fields[1].parse().map_err(|_| bad("duration"))?;
                let word: i64 = fields[2].parse().map_err(|_| bad("word number"))?;
                let word = match word {
                    -1 => None,
                    k if k >= 0 => Some(k as usize),
                    _ => return Err(bad("word number")),
                };
                mau.push(MauLine {
                    start,
                    end: start + duration + 1,
                    word,
                    label: fields[3..].join(" "),
                });
            }
            _ => {} // header or foreign tier
        }
    }

    let mut arcs = Vec::new();
    let mut anchors = Vec::new();
    let mut fresh = Fresh::default();
    let rate = opts.sample_rate;

    let mut word_start: BTreeMap<usize, u64> = BTreeMap::new();
    let mut word_end: BTreeMap<usize, u64> = BTreeMap::new();
    for m in &mau {
        if let Some(k) = m.word {
            if !kan.contains_key(&k) {
                return Err(ImportError::DanglingAnchor { tier: "MAU".into(), anchor: k as i64 });
            }
            word_start
                .entry(k)
                .and_modify(|s| *s = (*s).min(m.start))
                .or_insert(m.start);
            word_end.entry(k).and_modify(|e| *e = (*e).max(m.end)).or_insert(m.end);
        }
    }

    let m_type = opts.mapped_or("MAU", "M");
    for m in &mau {
        let src = sample_node(m.start, rate, &mut anchors);
        let dst = sample_node(m.end, rate, &mut anchors);
        arcs.push(Arc::new(src, Label::new(m_type, &m.label)?, dst));
    }

    // Word endpoints: anchored where speech material exists, otherwise
    // fresh nodes shared with the neighbouring word so chains stay whole.
    let mut starts: BTreeMap<usize, NodeId> = BTreeMap::new();
    let mut ends: BTreeMap<usize, NodeId> = BTreeMap::new();
    for (&k, &s) in &word_start {
        starts.insert(k, sample_node(s, rate, &mut anchors));
    }
    for (&k, &e) in &word_end {
        ends.insert(k, sample_node(e, rate, &mut anchors));
    }
    let ks: Vec<usize> = kan.keys().copied().collect();
    for &k in &ks {
        if !starts.contains_key(&k) {
            let prev = k.checked_sub(1).and_then(|p| ends.get(&p).cloned());
            starts.insert(k, prev.unwrap_or_else(|| fresh.next()));
        }
        if !ends.contains_key(&k) {
            let next = starts.get(&(k + 1)).cloned();
            ends.insert(k, next.unwrap_or_else(|| fresh.next()));
        }
    }

    let k_type = opts.mapped_or("KAN", "K");
    for (k, label) in &kan {
        arcs.push(Arc::new(starts[k].clone(), Label::new(k_type, label)?, ends[k].clone()));
    }

    let o_type = opts.mapped_or("ORT", "O");
    for (k, label) in &ort {
        let (src, dst) = word_nodes(&starts, &ends, *k, "ORT")?;
        arcs.push(Arc::new(src, Label::new(o_type, label)?, dst));
    }

    let trl_type = opts.mapped_or("TRL", "TRL");
    let mut trl_by_word: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (k, label) in &trl {
        if !kan.contains_key(k) {
            return Err(ImportError::DanglingAnchor { tier: "TRL".into(), anchor: *k as i64 });
        }
        trl_by_word.entry(*k).or_default().push(label);
    }
    for (k, fragments) in &trl_by_word {
        let mut cur = starts[k].clone();
        for (i, fragment) in fragments.iter().enumerate() {
            let next = if i + 1 == fragments.len() { ends[k].clone() } else { fresh.next() };
            arcs.push(Arc::new(cur, Label::new(trl_type, *fragment)?, next.clone()));
            cur = next;
        }
    }

    let d_type = opts.mapped_or("DAS", "D");
    for (anchor_run, label) in &das {
        for k in anchor_run {
            if !kan.contains_key(k) {
                return Err(ImportError::DanglingAnchor { tier: "DAS".into(), anchor: *k as i64 });
            }
        }
        let first = anchor_run.first().expect("nonempty run");
        let last = anchor_run.last().expect("nonempty run");
        arcs.push(Arc::new(starts[first].clone(), Label::new(d_type, label)?, ends[last].clone()));
    }

    Ok(AnnotationGraph::build(arcs, anchors)?)
}

fn split_anchor<'a>(line: usize, rest: &'a str) -> Result<(usize, &'a str), ImportError> {
    let (k, label) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let k = k
        .parse()
        .map_err(|_| ImportError::syntax(line, format!("bad anchor {k:?}")))?;
    Ok((k, label.trim_start()))
}

fn sample_node(s: u64, rate: u64, anchors: &mut Vec<(NodeId, TimeRef)>) -> NodeId {
    let id = NodeId::new(s.to_string()).expect("digits are a valid id");
    anchors.push((id.clone(), TimeRef::from_ratio(s, rate)));
    id
}

fn word_nodes(
    starts: &BTreeMap<usize, NodeId>,
    ends: &BTreeMap<usize, NodeId>,
    k: usize,
    tier: &str,
) -> Result<(NodeId, NodeId), ImportError> {
    match (starts.get(&k), ends.get(&k)) {
        (Some(s), Some(e)) => Ok((s.clone(), e.clone())),
        _ => Err(ImportError::DanglingAnchor { tier: tier.into(), anchor: k as i64 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AnchorClass;

    const VERBMOBIL: &str = include_str!("../../data/verbmobil.par");

    fn n(id: &str) -> NodeId {
        NodeId::new(id).unwrap()
    }

    fn arc(src: &str, label: &str, dst: &str) -> Arc {
        Arc::new(n(src), Label::parse(label).unwrap(), n(dst))
    }

    fn type_count(g: &AnnotationGraph, t: &str) -> usize {
        g.arcs().filter(|a| a.label.type_() == t).count()
    }

    #[test]
    fn all_five_tiers_become_arcs() {
        let g = import_partitur(VERBMOBIL, &ImportOptions::default()).unwrap();
        assert_eq!(type_count(&g, "K"), 7);
        assert_eq!(type_count(&g, "O"), 7);
        assert_eq!(type_count(&g, "TRL"), 9);
        assert_eq!(type_count(&g, "D"), 2);
        assert_eq!(type_count(&g, "M"), 23);
        assert_eq!(g.arc_count(), 48);
        assert_eq!(g.classify_anchoring(), AnchorClass::Anchored);
    }

    #[test]
    fn inclusive_durations_make_abutting_segments_share_nodes() {
        let g = import_partitur(VERBMOBIL, &ImportOptions::default()).unwrap();
        assert!(g.contains_arc(&arc("4160", "M/j", "5280")));
        assert!(g.contains_arc(&arc("5280", "M/a:", "7520")));
        assert!(g.contains_arc(&arc("12480", "M/<nib>", "12960")));
        assert!(g.contains_arc(&arc("32000", "M/<p:>", "34560")));
        assert_eq!(g.time_of(&n("4160")).unwrap().to_string(), "0.26");
        assert_eq!(g.time_of(&n("5280")).unwrap().to_string(), "0.33");
    }

    #[test]
    fn words_span_their_speech_material() {
        let g = import_partitur(VERBMOBIL, &ImportOptions::default()).unwrap();
        assert!(g.contains_arc(&arc("4160", "K/j'a:", "7520")));
        assert!(g.contains_arc(&arc("4160", "O/ja", "7520")));
        assert!(g.contains_arc(&arc("7520", "O/sch\"onen", "12480")));
        assert!(g.contains_arc(&arc("12960", "O/Dank", "17120")));
    }

    #[test]
    fn dialogue_acts_span_their_anchor_runs() {
        let g = import_partitur(VERBMOBIL, &ImportOptions::default()).unwrap();
        assert!(g.contains_arc(&arc("4160", "D/@(THANK_INIT BA)", "17120")));
        assert!(g.contains_arc(&arc("17120", "D/@(FEEDBACK_ACKNOWLEDGEMENT BA)", "32000")));
    }

    #[test]
    fn transliteration_fragments_chain_through_fresh_nodes() {
        let g = import_partitur(VERBMOBIL, &ImportOptions::default()).unwrap();
        let frags: Vec<&Arc> = g
            .arcs()
            .filter(|a| a.label.type_() == "TRL" && (a.src == n("4160") || a.dst == n("7520")))
            .collect();
        assert_eq!(frags.len(), 2);
        let first = frags.iter().find(|a| a.src == n("4160")).unwrap();
        let second = frags.iter().find(|a| a.dst == n("7520")).unwrap();
        assert_eq!(first.label.to_string(), "TRL/<A>");
        assert_eq!(second.label.to_string(), "TRL/ja ,");
        assert_eq!(first.dst, second.src);
        assert_eq!(g.time_of(&first.dst), None);
    }

    #[test]
    fn kan_only_input_chains_unanchored_words() {
        let text = "KAN: 0 j'a:\nKAN: 1 S'2:n@n\nKAN: 2 d'aNk\n";
        let g = import_partitur(text, &ImportOptions::default()).unwrap();
        assert_eq!(g.arc_count(), 3);
        assert_eq!(g.components().len(), 1);
        assert!(g.anchors().is_empty());
        let first = g.arcs().find(|a| a.label.content() == "j'a:").unwrap();
        let second = g.arcs().find(|a| a.label.content() == "S'2:n@n").unwrap();
        assert_eq!(first.dst, second.src);
    }

    #[test]
    fn words_without_speech_material_borrow_neighbour_boundaries() {
        let text = "\
KAN: 0 a
KAN: 1 b
KAN: 2 c
MAU: 100 99 1 b
";
        let g = import_partitur(text, &ImportOptions::default()).unwrap();
        assert_eq!(g.components().len(), 1);
        let a = g.arcs().find(|x| x.label.content() == "a").unwrap();
        let b = g.arcs().find(|x| x.label.content() == "b").unwrap();
        let c = g.arcs().find(|x| x.label.content() == "c").unwrap();
        assert_eq!(a.dst, b.src);
        assert_eq!(b.dst, c.src);
        assert_eq!(b.src, n("100"));
        assert_eq!(b.dst, n("200"));
        assert_eq!(g.time_of(&a.src), None);
        assert_eq!(g.time_of(&c.dst), None);
    }

    #[test]
    fn references_to_undeclared_words_are_dangling() {
        let base = "KAN: 0 a\n";
        let err = import_partitur(&format!("{base}ORT: 9 x\n"), &ImportOptions::default());
        assert_eq!(err.unwrap_err(), ImportError::DanglingAnchor { tier: "ORT".into(), anchor: 9 });
        let err = import_partitur(&format!("{base}DAS: 7 z\n"), &ImportOptions::default());
        assert_eq!(err.unwrap_err(), ImportError::DanglingAnchor { tier: "DAS".into(), anchor: 7 });
        let err = import_partitur(&format!("{base}MAU: 0 10 4 x\n"), &ImportOptions::default());
        assert_eq!(err.unwrap_err(), ImportError::DanglingAnchor { tier: "MAU".into(), anchor: 4 });
        let err = import_partitur(&format!("{base}TRL: 3 x\n"), &ImportOptions::default());
        assert_eq!(err.unwrap_err(), ImportError::DanglingAnchor { tier: "TRL".into(), anchor: 3 });
    }

    #[test]
    fn anchor_runs_must_be_contiguous() {
        let text = "KAN: 0 a\nKAN: 1 b\nKAN: 2 c\nDAS: 0,2 x\n";
        assert!(matches!(
            import_partitur(text, &ImportOptions::default()),
            Err(ImportError::Syntax { line: 4, .. })
        ));
    }

    #[test]
    fn lines_without_a_tier_key_are_rejected() {
        assert!(matches!(
            import_partitur("KAN: 0 a\ngarbage here\n", &ImportOptions::default()),
            Err(ImportError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn unknown_tiers_are_header_material() {
        let g = import_partitur("LHD: Partitur 1.2\nDBN: none\n", &ImportOptions::default())
            .unwrap();
        assert!(g.is_empty());
    }
}
