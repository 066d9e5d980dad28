//! CALLHOME-style telephone transcripts.
//!
//! Each stretch of speech is `start end SPK: text` in seconds, optionally
//! preceded by `*` (total overlap) or `+` (partial overlap); lines that do
//! not open a stretch continue the previous one. Overlap markers are
//! presentation hints: overlap stays implicit in the times, so they parse
//! but add nothing. Every token, including punctuation and disfluencies,
//! becomes a `W/` arc, and one `speaker/` arc spans each turn.
//!
//! With `merge_same_speaker`, runs of consecutive stretches by the same
//! speaker collapse into one turn, keeping the stretch boundaries as
//! anchored nodes; the silent interval between two stretches is bridged by
//! a contentless `gap/` arc so a turn stays one connected piece. Speakers
//! never share nodes, so distinct turns are disconnected no matter how
//! their times interleave.

use std::collections::BTreeMap;

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::{Fresh, ImportError, ImportOptions};

struct Stretch {
    line: usize,
    start: TimeRef,
    end: TimeRef,
    speaker: String,
    text: String,
}

pub fn import_callhome(text: &str, opts: &ImportOptions) -> Result<AnnotationGraph, ImportError> {
    let mut stretches: Vec<Stretch> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let marked = trimmed.starts_with(['*', '+']);
        let body = if marked { trimmed[1..].trim_start() } else { trimmed };
        match parse_header(body) {
            Some((start, end, speaker, rest)) => {
                if start >= end {
                    return Err(ImportError::syntax(
                        line,
                        format!("stretch runs backwards ({start} >= {end})"),
                    ));
                }
                stretches.push(Stretch {
                    line,
                    start,
                    end,
                    speaker: speaker.to_string(),
                    text: rest.to_string(),
                });
            }
            None if marked => {
                return Err(ImportError::syntax(line, "overlap marker without a stretch"))
            }
            None => match stretches.last_mut() {
                Some(prev) => {
                    prev.text.push(' ');
                    prev.text.push_str(trimmed);
                }
                None => {
                    return Err(ImportError::syntax(line, "continuation with nothing to continue"))
                }
            },
        }
    }

    let mut turns: Vec<Vec<Stretch>> = Vec::new();
    for stretch in stretches {
        match turns.last_mut() {
            Some(turn)
                if opts.merge_same_speaker
                    && turn.last().expect("turns are nonempty").speaker == stretch.speaker =>
            {
                turn.push(stretch)
            }
            _ => turns.push(vec![stretch]),
        }
    }

    let mut arcs: Vec<Arc> = Vec::new();
    let mut anchors: Vec<(NodeId, TimeRef)> = Vec::new();
    let mut fresh = Fresh::default();
    let w_type = opts.mapped_type("W");
    let gap = Label::new(opts.mapped_type("gap"), "")?;

    for turn in &turns {
        let mut boundary: BTreeMap<TimeRef, NodeId> = BTreeMap::new();
        let mut node = |t: &TimeRef, fresh: &mut Fresh| -> NodeId {
            boundary
                .entry(t.clone())
                .or_insert_with(|| fresh.next())
                .clone()
        };

        for (i, stretch) in turn.iter().enumerate() {
            let s = node(&stretch.start, &mut fresh);
            let e = node(&stretch.end, &mut fresh);
            let words = tokens(&stretch.text);
            if words.is_empty() {
                if turn.len() > 1 {
                    arcs.push(Arc::new(s, gap.clone(), e.clone()));
                }
            } else {
                let mut cur = s;
                for (j, word) in words.iter().enumerate() {
                    let next = if j + 1 == words.len() { e.clone() } else { fresh.next() };
                    arcs.push(Arc::new(cur, Label::new(w_type, word)?, next.clone()));
                    cur = next;
                }
            }
            if let Some(following) = turn.get(i + 1) {
                if stretch.end > following.start {
                    return Err(ImportError::syntax(
                        following.line,
                        "stretch starts before the previous one ends",
                    ));
                }
                let ns = node(&following.start, &mut fresh);
                if ns != e {
                    arcs.push(Arc::new(e, gap.clone(), ns));
                }
            }
        }

        let first = turn.first().expect("turns are nonempty");
        let last = turn.last().expect("turns are nonempty");
        let speaker = Label::new(opts.mapped_type("speaker"), &first.speaker)?;
        let src = node(&first.start, &mut fresh);
        let dst = node(&last.end, &mut fresh);
        arcs.push(Arc::new(src, speaker, dst));
        anchors.extend(boundary.into_iter().map(|(t, n)| (n, t)));
    }

    Ok(AnnotationGraph::build(arcs, anchors)?)
}

/// `start end SPK:` plus the rest of the line, or None if the line does
/// not open a stretch.
fn parse_header(body: &str) -> Option<(TimeRef, TimeRef, &str, &str)> {
    let (t1, rest) = body.split_once(char::is_whitespace)?;
    let start = TimeRef::parse(t1).ok()?;
    let rest = rest.trim_start();
    let (t2, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let end = TimeRef::parse(t2).ok()?;
    let rest = rest.trim_start();
    let (spk, text) = match rest.split_once(char::is_whitespace) {
        Some((s, t)) => (s, t.trim()),
        None => (rest, ""),
    };
    let speaker = spk.strip_suffix(':')?;
    if speaker.is_empty() {
        return None;
    }
    Some((start, end, speaker, text))
}

/// Whitespace tokens, with terminal punctuation split off as its own
/// token. Everything stays type `W/`.
fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        if let Some(p) = tok.chars().last().filter(|c| matches!(c, '.' | '?' | '!' | ',')) {
            let head = &tok[..tok.len() - p.len_utf8()];
            if !head.is_empty() {
                out.push(head.to_string());
                out.push(p.to_string());
                continue;
            }
        }
        out.push(tok.to_string());
    }
    out
}
