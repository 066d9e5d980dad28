//! Emu hierarchical annotations over xwaves label files.
//!
//! An Emu annotation splits across files: the hierarchy file declares the
//! levels, their immediate dominance, per-level attributes and the link
//! to an external ESPS label file; lists every element as a numbered id
//! with its labels; and finishes with dominance lines giving, for each
//! higher element, every id it directly or indirectly dominates. The
//! label file supplies the times, scaled down by the declared
//! time-factor, with an END mark meaning each time closes its segment.
//!
//! Timed segments chain through shared boundary nodes starting at zero.
//! Every other element becomes an arc between the extremal nodes of the
//! timed material its dominance line covers; an element whose line covers
//! no timed material is omitted. Attribute labels (accent, text, pitch
//! accent) become parallel arcs over the same span as their element.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::{Fresh, ImportError, ImportOptions};

struct Entry {
    id: u64,
    level: String,
    /// Column name paired with the element's value, primary first.
    pairs: Vec<(String, String)>,
}

struct Labfile {
    event: bool,
    factor: u64,
}

pub fn import_emu(
    hierarchy: &str,
    label_texts: &BTreeMap<String, String>,
    opts: &ImportOptions,
) -> Result<AnnotationGraph, ImportError> {
    let mut levels: BTreeMap<String, Option<String>> = BTreeMap::new();
    let mut attr_decls: BTreeSet<(String, String)> = BTreeSet::new();
    let mut labfiles: BTreeMap<String, Labfile> = BTreeMap::new();
    let mut entries: Vec<Entry> = Vec::new();
    let mut declared: BTreeMap<u64, usize> = BTreeMap::new();
    let mut dominance: Vec<(u64, Vec<u64>, usize)> = Vec::new();
    let mut section: Option<Vec<String>> = None;

    for (i, raw) in hierarchy.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        let Some(&first) = tokens.first() else { continue };
        match first {
            "level" => {
                let name = *tokens
                    .get(1)
                    .ok_or_else(|| ImportError::syntax(line, "level declaration without a name"))?;
                if let Some(flag) = tokens.get(3) {
                    if *flag != "many-to-many" || tokens.len() > 4 {
                        return Err(ImportError::syntax(line, "malformed level declaration"));
                    }
                }
                if let Some(parent) = tokens.get(2) {
                    if !levels.contains_key(*parent) {
                        return Err(ImportError::syntax(
                            line,
                            format!("parent level {parent:?} is not declared"),
                        ));
                    }
                }
                let parent = tokens.get(2).map(|p| p.to_string());
                if levels.insert(name.to_string(), parent).is_some() {
                    return Err(ImportError::syntax(line, format!("duplicate level {name:?}")));
                }
            }
            "label" => {
                let [_, level, attr] = tokens[..] else {
                    return Err(ImportError::syntax(line, "label declaration takes a level and an attribute"));
                };
                if !levels.contains_key(level) {
                    return Err(ImportError::syntax(line, format!("unknown level {level:?}")));
                }
                attr_decls.insert((level.to_string(), attr.to_string()));
            }
            "labfile" => {
                let level = *tokens
                    .get(1)
                    .ok_or_else(|| ImportError::syntax(line, "labfile declaration without a level"))?;
                if !levels.contains_key(level) {
                    return Err(ImportError::syntax(line, format!("unknown level {level:?}")));
                }
                if tokens.len() % 2 != 0 {
                    return Err(ImportError::syntax(line, "labfile options must be :key value pairs"));
                }
                let mut type_ = None;
                let mut mark = None;
                let mut factor = 1u64;
                for pair in tokens[2..].chunks(2) {
                    let key = pair[0].strip_prefix(':').ok_or_else(|| {
                        ImportError::syntax(line, format!("expected an option, found {:?}", pair[0]))
                    })?;
                    match key {
                        "format" => {
                            if pair[1] != "ESPS" {
                                return Err(ImportError::syntax(
                                    line,
                                    format!("unsupported label file format {:?}", pair[1]),
                                ));
                            }
                        }
                        "type" => match pair[1] {
                            "SEGMENT" => type_ = Some(false),
                            "EVENT" => type_ = Some(true),
                            other => {
                                return Err(ImportError::syntax(
                                    line,
                                    format!("labfile type must be SEGMENT or EVENT, not {other:?}"),
                                ))
                            }
                        },
                        "mark" => mark = Some(pair[1]),
                        "extension" => {}
                        "time-factor" => {
                            factor = pair[1]
                                .parse()
                                .ok()
                                .filter(|f| *f > 0)
                                .ok_or_else(|| ImportError::syntax(line, "bad time-factor"))?;
                        }
                        other => {
                            return Err(ImportError::syntax(line, format!("unknown labfile option :{other}")))
                        }
                    }
                }
                let event = type_
                    .ok_or_else(|| ImportError::syntax(line, "labfile declaration needs a :type"))?;
                if !event && mark != Some("END") {
                    return Err(ImportError::syntax(line, "only END-marked segments are supported"));
                }
                if labfiles.insert(level.to_string(), Labfile { event, factor }).is_some() {
                    return Err(ImportError::syntax(line, format!("duplicate labfile for {level:?}")));
                }
            }
            _ if first.parse::<u64>().is_ok() => {
                let ids: Option<Vec<u64>> = tokens.iter().map(|t| t.parse().ok()).collect();
                if let Some(ids) = ids {
                    if declared.contains_key(&ids[0]) {
                        dominance.push((ids[0], ids[1..].to_vec(), line));
                        continue;
                    }
                }
                let columns = section.as_ref().ok_or_else(|| {
                    ImportError::syntax(line, "identifier outside any level listing")
                })?;
                for token in &tokens {
                    match token.parse::<u64>() {
                        Ok(id) => {
                            if declared.insert(id, entries.len()).is_some() {
                                return Err(ImportError::syntax(line, format!("duplicate identifier {id}")));
                            }
                            entries.push(Entry {
                                id,
                                level: columns[0].clone(),
                                pairs: Vec::new(),
                            });
                        }
                        Err(_) => {
                            let entry = entries.last_mut().expect("a label follows an identifier");
                            let idx = entry.pairs.len();
                            if idx >= columns.len() {
                                return Err(ImportError::syntax(
                                    line,
                                    format!("element {} has more labels than declared columns", entry.id),
                                ));
                            }
                            entry.pairs.push((columns[idx].clone(), token.to_string()));
                        }
                    }
                }
            }
            name => {
                if !levels.contains_key(name) {
                    return Err(ImportError::syntax(line, format!("unknown level {name:?}")));
                }
                let columns: Vec<String> = tokens[1..].iter().map(|t| t.to_string()).collect();
                if columns.first().map(String::as_str) != Some(name) {
                    return Err(ImportError::syntax(line, "the first column must repeat the level name"));
                }
                for attr in &columns[1..] {
                    if !attr_decls.contains(&(name.to_string(), attr.clone())) {
                        return Err(ImportError::syntax(
                            line,
                            format!("column {attr:?} is not a declared label of {name}"),
                        ));
                    }
                }
                section = Some(columns);
            }
        }
    }

    let mut dominated: BTreeMap<u64, &[u64]> = BTreeMap::new();
    for (id, doms, line) in &dominance {
        if labfiles.contains_key(&entries[declared[id]].level) {
            return Err(ImportError::syntax(*line, "timed elements do not dominate"));
        }
        if dominated.insert(*id, doms).is_some() {
            return Err(ImportError::syntax(*line, format!("duplicate dominance line for {id}")));
        }
    }
    for level in labfiles.keys() {
        if !label_texts.contains_key(level) {
            return Err(ImportError::InvalidOptions(format!("missing label file for level {level}")));
        }
    }
    for key in label_texts.keys() {
        if !labfiles.contains_key(key) {
            return Err(ImportError::InvalidOptions(format!("unexpected label file for level {key}")));
        }
    }

    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    let mut fresh = Fresh::default();
    let mut spans: BTreeMap<u64, (NodeId, NodeId, TimeRef, TimeRef)> = BTreeMap::new();

    for (level, lf) in &labfiles {
        let list: Vec<&Entry> = entries.iter().filter(|e| &e.level == level).collect();
        let records = parse_label_file(&label_texts[level])?;
        if list.len() != records.len() {
            return Err(ImportError::syntax(
                records.last().map(|r| r.2).unwrap_or(0),
                format!(
                    "level {level} lists {} elements but its label file has {} records",
                    list.len(),
                    records.len()
                ),
            ));
        }
        if list.is_empty() {
            continue;
        }
        let mut prev_time = TimeRef::zero();
        let mut prev_node = None;
        if !lf.event {
            let node = fresh.next();
            anchors.push((node.clone(), prev_time.clone()));
            prev_node = Some(node);
        }
        for (entry, (time, lab, rec_line)) in list.iter().zip(&records) {
            let t = time.div_by(lf.factor);
            let primary = entry.pairs.first().map(|(_, v)| v.as_str()).unwrap_or("");
            if lab.as_str() != primary {
                return Err(ImportError::syntax(
                    *rec_line,
                    format!("label file says {lab:?} but the listing says {primary:?}"),
                ));
            }
            let (src, dst, from) = if lf.event {
                let a = fresh.next();
                let b = fresh.next();
                anchors.push((a.clone(), t.clone()));
                anchors.push((b.clone(), t.clone()));
                (a, b, t.clone())
            } else {
                if t <= prev_time {
                    return Err(ImportError::syntax(*rec_line, "label times must increase".to_string()));
                }
                let node = fresh.next();
                anchors.push((node.clone(), t.clone()));
                let src = prev_node.replace(node.clone()).expect("segment chain head");
                let from = std::mem::replace(&mut prev_time, t.clone());
                (src, node, from)
            };
            emit(&mut arcs, entry, opts, &src, &dst)?;
            spans.insert(entry.id, (src, dst, from, t));
        }
    }

    for entry in &entries {
        if labfiles.contains_key(&entry.level) {
            continue;
        }
        let Some(doms) = dominated.get(&entry.id) else { continue };
        let mut lo: Option<&(NodeId, NodeId, TimeRef, TimeRef)> = None;
        let mut hi: Option<&(NodeId, NodeId, TimeRef, TimeRef)> = None;
        for id in *doms {
            if !declared.contains_key(id) {
                return Err(ImportError::DanglingDominance { id: id.to_string() });
            }
            let Some(span) = spans.get(id) else { continue };
            if lo.is_none_or(|l| span.2 < l.2) {
                lo = Some(span);
            }
            if hi.is_none_or(|h| span.3 > h.3) {
                hi = Some(span);
            }
        }
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let (src, dst) = (lo.0.clone(), hi.1.clone());
            emit(&mut arcs, entry, opts, &src, &dst)?;
        }
    }

    Ok(AnnotationGraph::build(arcs, anchors)?)
}

/// The element's primary arc plus one parallel arc per attribute label.
fn emit(
    arcs: &mut Vec<Arc>,
    entry: &Entry,
    opts: &ImportOptions,
    src: &NodeId,
    dst: &NodeId,
) -> Result<(), ImportError> {
    let primary = entry.pairs.first().map(|(_, v)| v.as_str()).unwrap_or("");
    let label = Label::new(opts.mapped_type(&entry.level), primary)?;
    arcs.push(Arc::new(src.clone(), label, dst.clone()));
    for (attr, value) in entry.pairs.iter().skip(1) {
        let label = Label::new(opts.mapped_type(attr), value)?;
        arcs.push(Arc::new(src.clone(), label, dst.clone()));
    }
    Ok(())
}

/// ESPS xlabel records: header up to a lone `#`, then one record per
/// line, first field the time and last field the label.
fn parse_label_file(text: &str) -> Result<Vec<(TimeRef, String, usize)>, ImportError> {
    let mut records = Vec::new();
    let mut body = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if !body {
            body = trimmed == "#";
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(ImportError::syntax(line, "label record needs a time and a label"));
        }
        let time = TimeRef::parse(fields[0])
            .map_err(|e| ImportError::syntax(line, e.to_string()))?;
        records.push((time, fields.last().unwrap().to_string(), line));
    }
    if !body {
        return Err(ImportError::syntax(
            text.lines().count(),
            "label file has no `#` separator",
        ));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AnchorClass;

    const HIERARCHY: &str = include_str!("../../data/emu_hierarchy.txt");

    const PHONETIC_LAB: &str = include_str!("../../data/Phonetic.lab");

    fn options() -> ImportOptions {
        let mut opts = ImportOptions::default();
        for (level, short) in [("Phonetic", "S"), ("Phoneme", "P"), ("Syllable", "Syl")] {
            opts.type_prefix_map.insert(level.into(), short.into());
        }
        opts
    }

    fn graph() -> AnnotationGraph {
        let mut texts = BTreeMap::new();
        texts.insert("Phonetic".to_string(), PHONETIC_LAB.to_string());
        import_emu(HIERARCHY, &texts, &options()).unwrap()
    }

    fn by_time<'g>(g: &'g AnnotationGraph, t: &str) -> Vec<&'g Arc> {
        let mut arcs: Vec<&Arc> = g.arcs().filter(|a| a.label.type_() == t).collect();
        arcs.sort_by_key(|a| g.time_of(&a.src).cloned());
        arcs
    }

    fn span(g: &AnnotationGraph, a: &Arc) -> (String, String) {
        (g.time_of(&a.src).unwrap().to_string(), g.time_of(&a.dst).unwrap().to_string())
    }

    #[test]
    fn segments_chain_through_shared_boundary_nodes() {
        let g = graph();
        let segs = by_time(&g, "S");
        let contents: Vec<&str> = segs.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["D", "@", "p", "H", "Or", "r", "ai", "s", "Or", "r", "ei", "n", "Z"]);
        for pair in segs.windows(2) {
            assert_eq!(pair[0].dst, pair[1].src);
        }
        assert_eq!(span(&g, segs[0]), ("0".to_string(), "0.1".to_string()));
        assert_eq!(span(&g, segs[12]), ("0.93".to_string(), "1.01".to_string()));
    }

    #[test]
    fn higher_levels_span_the_extremes_of_their_material() {
        let g = graph();
        let phonemes = by_time(&g, "P");
        let contents: Vec<&str> = phonemes.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["D", "@", "p", "r", "ai", "s", "r", "ei", "n", "Z"]);
        let segs = by_time(&g, "S");
        assert_eq!(phonemes[0].src, segs[0].src);
        assert_eq!(phonemes[0].dst, segs[0].dst);
        // /r/ in price swallows the aspiration around it.
        assert_eq!(span(&g, phonemes[3]), ("0.28".to_string(), "0.42".to_string()));

        let words = by_time(&g, "Word");
        let contents: Vec<&str> = words.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["F", "C", "C"]);
        let spans: Vec<(String, String)> = words.iter().map(|a| span(&g, a)).collect();
        assert_eq!(
            spans,
            [
                ("0".to_string(), "0.18".to_string()),
                ("0.18".to_string(), "0.64".to_string()),
                ("0.64".to_string(), "1.01".to_string()),
            ]
        );
        let texts = by_time(&g, "Text");
        let contents: Vec<&str> = texts.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["the", "price", "range"]);
        assert_eq!(texts[1].src, words[1].src);
        assert_eq!(texts[1].dst, words[1].dst);
        let accents = by_time(&g, "Accent");
        let contents: Vec<&str> = accents.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["W", "S", "S"]);

        let syls = by_time(&g, "Syl");
        let contents: Vec<&str> = syls.iter().map(|a| a.label.content()).collect();
        assert_eq!(contents, ["W", "S", "S"]);
        let pitches = by_time(&g, "Pitch_Accent");
        assert_eq!(pitches.len(), 2);
        assert_eq!(pitches[0].label.content(), "H*");
        assert_eq!(span(&g, pitches[0]), span(&g, words[1]));
        assert_eq!(pitches[1].label.content(), "!H*");

        for type_ in ["Intermediate", "Intonational", "Utterance"] {
            let arcs = by_time(&g, type_);
            assert_eq!(arcs.len(), 1, "{type_}");
            assert_eq!(span(&g, arcs[0]), ("0".to_string(), "1.01".to_string()));
        }
        assert_eq!(by_time(&g, "Intermediate")[0].label.content(), "L-");
        assert_eq!(by_time(&g, "Intonational")[0].label.content(), "L%");
        assert_eq!(by_time(&g, "Utterance")[0].label.content(), "");
    }

    #[test]
    fn every_node_comes_from_the_timed_chain() {
        let g = graph();
        assert_eq!(g.arcs().count(), 40);
        assert_eq!(g.nodes().count(), 14);
        assert_eq!(g.anchors().len(), 14);
        assert_eq!(g.classify_anchoring(), AnchorClass::TotallyAnchored);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn events_are_instantaneous() {
        let hierarchy = "\
level Tone
labfile Tone :format ESPS :type EVENT :extension tone :time-factor 1000
Tone Tone
1 H*   2 L-
";
        let lab = "#\n 100 121 H*\n 300 121 L-\n";
        let mut texts = BTreeMap::new();
        texts.insert("Tone".to_string(), lab.to_string());
        let g = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap();
        assert_eq!(g.arcs().count(), 2);
        assert_eq!(g.components().len(), 2);
        for arc in g.arcs() {
            assert_ne!(arc.src, arc.dst);
            assert_eq!(g.time_of(&arc.src), g.time_of(&arc.dst));
        }
        let h = g.arcs().find(|a| a.label.content() == "H*").unwrap();
        assert_eq!(g.time_of(&h.src).unwrap().to_string(), "0.1");
    }

    #[test]
    fn elements_without_dominance_lines_are_omitted() {
        let keep: String = HIERARCHY
            .lines()
            .take_while(|l| !l.starts_with("1 0"))
            .map(|l| format!("{l}\n"))
            .collect();
        let mut texts = BTreeMap::new();
        texts.insert("Phonetic".to_string(), PHONETIC_LAB.to_string());
        let g = import_emu(&keep, &texts, &options()).unwrap();
        assert_eq!(g.arcs().count(), 13);
        assert!(g.arcs().all(|a| a.label.type_() == "S"));
    }

    #[test]
    fn the_time_factor_defaults_to_unit() {
        let hierarchy = "\
level Seg
labfile Seg :format ESPS :type SEGMENT :mark END
Seg Seg
0 a   1 b
";
        let lab = "#\n 0.5 121 a\n 1.25 121 b\n";
        let mut texts = BTreeMap::new();
        texts.insert("Seg".to_string(), lab.to_string());
        let g = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap();
        let b = g.arcs().find(|a| a.label.content() == "b").unwrap();
        assert_eq!(g.time_of(&b.src).unwrap().to_string(), "0.5");
        assert_eq!(g.time_of(&b.dst).unwrap().to_string(), "1.25");
    }

    #[test]
    fn the_label_file_must_agree_with_the_listing() {
        let hierarchy = "\
level Seg
labfile Seg :format ESPS :type SEGMENT :mark END
Seg Seg
0 a   1 b
";
        let mut texts = BTreeMap::new();
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n 1.25 121 X\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert_eq!(
            err,
            ImportError::syntax(3, "label file says \"X\" but the listing says \"b\"")
        );
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert!(matches!(err, ImportError::Syntax { .. }), "{err:?}");
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n 0.5 121 b\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::syntax(3, "label times must increase"));
    }

    #[test]
    fn dangling_dominance_is_reported() {
        let hierarchy = "\
level Word
level Seg Word
labfile Seg :format ESPS :type SEGMENT :mark END
Seg Seg
0 a
Word Word
1 w
1 0 99
";
        let mut texts = BTreeMap::new();
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::DanglingDominance { id: "99".into() });
    }

    #[test]
    fn label_files_must_match_the_declarations() {
        let hierarchy = "\
level Seg
labfile Seg :format ESPS :type SEGMENT :mark END
Seg Seg
0 a
";
        let err = import_emu(hierarchy, &BTreeMap::new(), &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::InvalidOptions("missing label file for level Seg".into()));
        let mut texts = BTreeMap::new();
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n".to_string());
        texts.insert("Other".to_string(), "#\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::InvalidOptions("unexpected label file for level Other".into()));
    }

    #[test]
    fn bad_structure_is_rejected() {
        let texts = BTreeMap::new();
        for hierarchy in [
            "level Seg Word\n",
            "level Seg\nlevel Seg\n",
            "level Seg\nlevel Word Seg many-to-one\n",
            "label Seg Attr\n",
            "level Seg\nlabel Seg\n",
            "labfile Seg :format ESPS\n",
            "level Seg\nlabfile Seg :format XLABEL :type SEGMENT :mark END\n",
            "level Seg\nlabfile Seg :format ESPS :type POINT\n",
            "level Seg\nlabfile Seg :format ESPS :type SEGMENT :mark BEGIN\n",
            "level Seg\nlabfile Seg :format ESPS :type SEGMENT :mark END :time-factor 0\n",
            "level Seg\nlabfile Seg :format ESPS :type SEGMENT :mark END :snacks yes\n",
            "level Seg\nlabfile Seg :format ESPS :type SEGMENT :mark\n",
            "level Seg\nlabfile Seg format ESPS\n",
            "0 a\n",
            "level Seg\nSeg Seg\n0 a 0 b\n",
            "level Seg\nSeg Seg\n0 a b\n",
            "level Seg\nSeg Other\n",
            "level Seg\nSeg Seg Tone\n",
            "Wibble Wibble\n",
            "level Seg\nSeg Seg\n0 a\n0 1\n0 2\n",
        ] {
            let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
            assert!(matches!(err, ImportError::Syntax { .. }), "{hierarchy:?}: {err:?}");
        }
    }

    #[test]
    fn timed_elements_do_not_dominate() {
        let hierarchy = "\
level Seg
labfile Seg :format ESPS :type SEGMENT :mark END
Seg Seg
0 a   1 b
0 1
";
        let mut texts = BTreeMap::new();
        texts.insert("Seg".to_string(), "#\n 0.5 121 a\n 1.0 121 b\n".to_string());
        let err = import_emu(hierarchy, &texts, &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::syntax(5, "timed elements do not dominate"));
    }
}
