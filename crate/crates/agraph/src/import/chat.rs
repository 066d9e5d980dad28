//! CHAT transcripts.
//!
//! `@` lines are file-level headers, `*SPK:` lines are utterances, and `%`
//! lines are dependent tiers attached to the utterance above. Indented
//! lines continue the previous line. Utterance tokens chain along fresh
//! nodes: ordinary words get `W/`, terminal punctuation splits off as
//! `punct/`, and transcription markers (`[...]`, `#`, `+...`, `&...`)
//! become `meta/` so no token is dropped. A `speaker/` arc spans each
//! utterance. Only the `%snd` tier is modelled: it anchors the utterance
//! endpoints (milliseconds) and adds a `file/` arc; other dependent tiers
//! carry analyses outside this model and are skipped.

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::{Fresh, ImportError, ImportOptions};

pub fn import_chat(text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    Ok(import_chat_with_meta(text, opts)?.0)
}

/// Like [`import_chat`], but also returns the header lines, since headers
/// describe the file rather than any stretch of time.
pub fn import_chat_with_meta(
    text: &str,
    opts: &ImportOptions,
) -> Result<(AnnotationGraph, Vec<String>), ImportError> {
    let mut logical: Vec<(usize, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if raw.starts_with(char::is_whitespace) {
            match logical.last_mut() {
                Some((_, prev)) => {
                    prev.push(' ');
                    prev.push_str(raw.trim());
                }
                None => {
                    return Err(ImportError::syntax(line, "continuation with nothing to continue"))
                }
            }
        } else {
            logical.push((line, raw.trim_end().to_string()));
        }
    }

    let mut headers = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    let mut fresh = Fresh::default();
    let mut last_span: Option<(NodeId, NodeId)> = None;

    for (line, entry) in logical {
        if entry.starts_with('@') {
            headers.push(entry);
        } else if let Some(rest) = entry.strip_prefix('*') {
            let (code, utterance) = rest
                .split_once(':')
                .ok_or_else(|| ImportError::syntax(line, "expected `*SPK: ...`"))?;
            let code = code.trim();
            if code.is_empty() {
                return Err(ImportError::syntax(line, "empty speaker code"));
            }
            let start = fresh.next();
            let mut cur = start.clone();
            for (type_, content) in utterance.split_whitespace().flat_map(token_parts) {
                let next = fresh.next();
                arcs.push(Arc::new(
                    cur,
                    Label::new(opts.mapped_type(type_), content)?,
                    next.clone(),
                ));
                cur = next;
            }
            if cur == start {
                cur = fresh.next();
            }
            let speaker = Label::new(opts.mapped_type("speaker"), code)?;
            arcs.push(Arc::new(start.clone(), speaker, cur.clone()));
            last_span = Some((start, cur));
        } else if let Some(rest) = entry.strip_prefix('%') {
            let (tier, body) = rest
                .split_once(':')
                .ok_or_else(|| ImportError::syntax(line, "expected `%tier: ...`"))?;
            if tier.trim() != "snd" {
                continue; // analysis tiers outside this model
            }
            let (file, start_ms, end_ms) = parse_snd(line, body.trim())?;
            let (a, b) = last_span
                .clone()
                .ok_or(ImportError::OrphanDependentTier { line })?;
            anchors.push((a.clone(), TimeRef::from_ratio(start_ms, 1000)));
            anchors.push((b.clone(), TimeRef::from_ratio(end_ms, 1000)));
            arcs.push(Arc::new(a, Label::new(opts.mapped_type("file"), file)?, b));
        } else {
            return Err(ImportError::syntax(line, "expected `@`, `*SPK:` or `%tier:` line"));
        }
    }

    Ok((AnnotationGraph::build(arcs, anchors)?, headers))
}

/// `"file" start end` with millisecond offsets; quotes optional.
fn parse_snd(line: usize, body: &str) -> Result<(String, u64, u64), ImportError> {
    let bad = |what: &str| ImportError::syntax(line, format!("%snd: {what}"));
    let (file, rest) = if let Some(r) = body.strip_prefix('"') {
        let close = r.find('"').ok_or_else(|| bad("unterminated filename"))?;
        (&r[..close], &r[close + 1..])
    } else {
        body.split_once(char::is_whitespace)
            .ok_or_else(|| bad("expected `\"file\" start end`"))?
    };
    let mut nums = rest.split_whitespace();
    let (s, e) = match (nums.next(), nums.next(), nums.next()) {
        (Some(s), Some(e), None) => (s, e),
        _ => return Err(bad("expected two millisecond offsets")),
    };
    let start: u64 = s.parse().map_err(|_| bad("bad start offset"))?;
    let end: u64 = e.parse().map_err(|_| bad("bad end offset"))?;
    if start >= end {
        return Err(ImportError::NonMonotonicSpan { line, start, end });
    }
    Ok((file.to_string(), start, end))
}

/// One source token to its labels: transcription markers stay whole as
/// `meta/`, terminal punctuation splits off, overlap scope brackets drop.
fn token_parts(token: &str) -> Vec<(&'static str, String)> {
    if token.starts_with('[') || token.starts_with('#') || token.starts_with('+') || token.starts_with('&')
    {
        return vec![("meta", token.to_string())];
    }
    let token = token.trim_start_matches('<').trim_end_matches('>');
    if token.is_empty() {
        return Vec::new();
    }
    if let Some(p) = token.chars().last().filter(|c| matches!(c, '.' | '?' | '!' | ',')) {
        let head = &token[..token.len() - p.len_utf8()];
        if head.is_empty() {
            return vec![("punct", token.to_string())];
        }
        return vec![("W", head.to_string()), ("punct", p.to_string())];
    }
    vec![("W", token.to_string())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AnchorClass;

    const BOYS73: &str = include_str!("../../data/boys73.cha");

    fn type_count(g: &AnnotationGraph, t: &str) -> usize {
        g.arcs().filter(|a| a.label.type_() == t).count()
    }

    fn contents(g: &AnnotationGraph, t: &str) -> Vec<String> {
        let mut v: Vec<String> = g
            .arcs()
            .filter(|a| a.label.type_() == t)
            .map(|a| a.label.content().to_string())
            .collect();
        v.sort();
        v
    }

    #[test]
    fn utterances_become_disconnected_token_chains() {
        let g = import_chat(BOYS73, &ImportOptions::default()).unwrap();
        assert_eq!(type_count(&g, "W"), 20);
        assert_eq!(type_count(&g, "punct"), 3);
        assert_eq!(type_count(&g, "meta"), 3);
        assert_eq!(type_count(&g, "speaker"), 4);
        assert_eq!(g.arc_count(), 30);
        assert_eq!(g.components().len(), 4);
        assert!(g.anchors().is_empty());
    }

    #[test]
    fn tokens_keep_order_and_markers_survive() {
        let g = import_chat(BOYS73, &ImportOptions::default()).unwrap();
        let yahoo = g.arcs().find(|a| a.label.content() == "yahoo").unwrap();
        let stop = g
            .arcs()
            .find(|a| a.label.type_() == "punct" && a.src == yahoo.dst)
            .unwrap();
        assert_eq!(stop.label.content(), ".");
        let ros = g
            .arcs()
            .find(|a| a.label.type_() == "speaker" && a.label.content() == "ROS")
            .unwrap();
        assert_eq!(ros.src, yahoo.src);
        assert_eq!(ros.dst, stop.dst);
        assert_eq!(contents(&g, "meta"), ["#", "+/.", "[>]"]);
        assert_eq!(contents(&g, "punct"), [".", ".", "?"]);
        assert!(g.arcs().any(|a| a.label.content() == "don't"));
    }

    #[test]
    fn continuation_lines_fold_into_the_utterance() {
        let g = import_chat(BOYS73, &ImportOptions::default()).unwrap();
        assert!(g.arcs().any(|a| a.label.to_string() == "W/bathroom"));
        assert!(g.arcs().any(|a| a.label.to_string() == "W/the"));
    }

    #[test]
    fn headers_come_back_folded() {
        let (_, headers) = import_chat_with_meta(BOYS73, &ImportOptions::default()).unwrap();
        assert_eq!(headers.len(), 11);
        assert_eq!(headers[0], "@Begin");
        assert_eq!(
            headers[2],
            "@Participants:  ROS Ross Child, MAR Mark Child, FAT Brian Father, MOT Mary Mother"
        );
    }

    #[test]
    fn snd_tier_anchors_the_previous_utterance() {
        let text = "*ROS:   yahoo.\n%snd:   \"boys73.aiff\" 4362 6065\n";
        let g = import_chat(text, &ImportOptions::default()).unwrap();
        let times: Vec<String> = g.anchor_times().iter().map(|t| t.to_string()).collect();
        assert_eq!(times, ["4.362", "6.065"]);
        let file = g.arcs().find(|a| a.label.type_() == "file").unwrap();
        assert_eq!(file.label.content(), "boys73.aiff");
        let ros = g.arcs().find(|a| a.label.type_() == "speaker").unwrap();
        assert_eq!((file.src.clone(), file.dst.clone()), (ros.src.clone(), ros.dst.clone()));
        assert_eq!(g.time_of(&file.src).unwrap().to_string(), "4.362");
        assert_eq!(g.classify_anchoring(), AnchorClass::Anchored);
    }

    #[test]
    fn empty_utterances_still_get_a_speaker_span() {
        let text = "*ROS:\n%snd: \"boys73.aiff\" 4362 6065\n";
        let g = import_chat(text, &ImportOptions::default()).unwrap();
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.classify_anchoring(), AnchorClass::TotallyAnchored);
    }

    #[test]
    fn snd_without_an_utterance_is_orphaned() {
        let err = import_chat("%snd: \"f.aiff\" 1 2\n", &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::OrphanDependentTier { line: 1 });
    }

    #[test]
    fn analysis_tiers_are_skipped() {
        let text = "*ROS:   yahoo.\n%mor:   int|yahoo .\n";
        let g = import_chat(text, &ImportOptions::default()).unwrap();
        assert_eq!(g.arc_count(), 3);
    }

    #[test]
    fn malformed_lines_are_errors() {
        assert!(matches!(
            import_chat("hello there\n", &ImportOptions::default()),
            Err(ImportError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            import_chat("*ROS yahoo\n", &ImportOptions::default()),
            Err(ImportError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            import_chat("*ROS: hi.\n%snd: \"f\" 9 2\n", &ImportOptions::default()),
            Err(ImportError::NonMonotonicSpan { line: 2, start: 9, end: 2 })
        ));
        assert!(matches!(
            import_chat("  dangling continuation\n", &ImportOptions::default()),
            Err(ImportError::Syntax { line: 1, .. })
        ));
    }
}
