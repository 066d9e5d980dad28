//! Interval partition of the timeline with arc postings.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use super::{require_some_anchor, IndexError};
use crate::encoding;
use crate::graph::{AnnotationGraph, Arc, GraphError};
use crate::time::TimeRef;

/// A half-open span `[lo, hi)` between two consecutive anchor times.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interval {
    pub lo: TimeRef,
    pub hi: TimeRef,
}

impl Interval {
    /// Whether `t` falls inside `[lo, hi)`.
    pub fn contains(&self, t: &TimeRef) -> bool {
        self.lo <= *t && *t < self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// Arcs bucketed into the elementary intervals of the graph's timeline.
///
/// The intervals partition `[min anchor time, max anchor time)`. An arc is
/// posted to every interval inside its potential span: `[glb, lub)`, with a
/// missing bound widened to the corresponding timeline extreme. An arc
/// whose span is a single point is posted to the one interval starting
/// there, or nowhere when that point is the timeline's end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeLocalIndex {
    intervals: Vec<Interval>,
    postings: Vec<Vec<Arc>>,
    lines: Vec<Vec<String>>,
    spans: BTreeMap<Arc, Range<usize>>,
}

impl TimeLocalIndex {
    pub fn build(g: &AnnotationGraph) -> Result<TimeLocalIndex, IndexError> {
        require_some_anchor(g)?;
        let times = g.anchor_times();
        let intervals: Vec<Interval> = times
            .windows(2)
            .map(|w| Interval { lo: w[0].clone(), hi: w[1].clone() })
            .collect();

        let mut postings: Vec<Vec<(String, Arc)>> = vec![Vec::new(); intervals.len()];
        let mut spans = BTreeMap::new();
        for arc in g.arcs() {
            let Some((lo, hi)) = g.potential_span(arc) else { continue };
            let range = if lo == hi {
                // An instant: the single interval opening at that time.
                match intervals.iter().position(|iv| iv.lo == lo) {
                    Some(i) => i..i + 1,
                    None => 0..0,
                }
            } else {
                let start = intervals.iter().position(|iv| iv.lo == lo).unwrap_or(0);
                let end = intervals.iter().rposition(|iv| iv.hi == hi).map_or(0, |i| i + 1);
                start..end
            };
            for i in range.clone() {
                postings[i].push((encoding::line_for(g, arc), arc.clone()));
            }
            spans.insert(arc.clone(), range);
        }

        let mut arcs = Vec::with_capacity(intervals.len());
        let mut lines = Vec::with_capacity(intervals.len());
        for mut bucket in postings {
            bucket.sort();
            lines.push(bucket.iter().map(|(l, _)| l.clone()).collect());
            arcs.push(bucket.into_iter().map(|(_, a)| a).collect());
        }
        Ok(TimeLocalIndex { intervals, postings: arcs, lines, spans })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Arcs posted to interval `i`, in line order.
    pub fn postings(&self, i: usize) -> &[Arc] {
        &self.postings[i]
    }

    /// Serialized lines posted to interval `i`.
    pub fn posting_lines(&self, i: usize) -> &[String] {
        &self.lines[i]
    }

    /// Index of the interval containing `t`, if any.
    pub fn interval_at(&self, t: &TimeRef) -> Option<usize> {
        self.intervals.iter().position(|iv| iv.contains(t))
    }

    /// The contiguous run of intervals an arc is posted to.
    pub fn intervals_of(&self, arc: &Arc) -> Result<Range<usize>, IndexError> {
        self.spans
            .get(arc)
            .cloned()
            .ok_or(IndexError::Graph(GraphError::UnknownArc(arc.clone())))
    }

    /// All arcs sharing at least one interval with `arc`, excluding it.
    pub fn overlapping_arcs(&self, arc: &Arc) -> Result<BTreeSet<Arc>, IndexError> {
        let range = self.intervals_of(arc)?;
        let mut out = BTreeSet::new();
        for i in range {
            out.extend(self.postings[i].iter().cloned());
        }
        out.remove(arc);
        Ok(out)
    }

    /// Overlapping arcs narrowed to those `arc` includes under `mode`,
    /// still excluding `arc` itself.
    pub fn included_arcs(
        &self,
        g: &AnnotationGraph,
        arc: &Arc,
        mode: crate::relations::RelationMode,
    ) -> Result<BTreeSet<Arc>, IndexError> {
        let mut out = self.overlapping_arcs(arc)?;
        out.retain(|cand| g.includes_mode(arc, cand, mode).unwrap_or(false));
        Ok(out)
    }

    /// Plain-text layout: interval bounds flush left, postings indented to
    /// a shared column, one posting per line.
    pub fn render(&self) -> String {
        let w_lo = self.intervals.iter().map(|iv| iv.lo.to_string().len()).max().unwrap_or(0);
        let w_hi = self.intervals.iter().map(|iv| iv.hi.to_string().len()).max().unwrap_or(0);
        let mut out = String::new();
        for (i, iv) in self.intervals.iter().enumerate() {
            let head = format!("{:<w_lo$}  {:<w_hi$}  ", iv.lo.to_string(), iv.hi.to_string());
            let mut first = true;
            for line in &self.lines[i] {
                if first {
                    out.push_str(&head);
                    first = false;
                } else {
                    out.push_str(&" ".repeat(head.len()));
                }
                out.push_str(line);
                out.push('\n');
            }
            if first {
                out.push_str(head.trim_end());
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::parse;
    use crate::relations::RelationMode;

    const OVERLAP_TUPLES: &str = "\
<11/2348.81> speaker/Roger-Hedgecock <14/2391.60>
<11/2348.81> spkrtype/male <14/2391.60>
<12/> W/this <13/2391.11>
<13/2391.11> W/country <14/2391.60>
<21/2391.29> W/well <22/>
<21/2391.29> speaker/Gloria-Allred <25/2439.82>
<21/2391.29> spkrtype/female <25/2439.82>
<22/> W/i <23/2391.60>
<23/2391.60> W/think <24/>
";

    const RENDERED: &str = "\
2348.81  2391.11  <11/2348.81> speaker/Roger-Hedgecock <14/2391.60>
                  <11/2348.81> spkrtype/male <14/2391.60>
                  <12/> W/this <13/2391.11>
2391.11  2391.29  <11/2348.81> speaker/Roger-Hedgecock <14/2391.60>
                  <11/2348.81> spkrtype/male <14/2391.60>
                  <13/2391.11> W/country <14/2391.60>
2391.29  2391.60  <11/2348.81> speaker/Roger-Hedgecock <14/2391.60>
                  <11/2348.81> spkrtype/male <14/2391.60>
                  <13/2391.11> W/country <14/2391.60>
                  <21/2391.29> W/well <22/>
                  <21/2391.29> speaker/Gloria-Allred <25/2439.82>
                  <21/2391.29> spkrtype/female <25/2439.82>
                  <22/> W/i <23/2391.60>
2391.60  2439.82  <21/2391.29> speaker/Gloria-Allred <25/2439.82>
                  <21/2391.29> spkrtype/female <25/2439.82>
                  <23/2391.60> W/think <24/>
";

    fn arc(g: &AnnotationGraph, label: &str) -> Arc {
        g.arcs().find(|a| format!("{}/{}", a.label.type_(), a.label.content()) == label)
            .unwrap()
            .clone()
    }

    #[test]
    fn four_intervals_from_five_times() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        assert_eq!(idx.len(), 4);
        let bounds: Vec<String> = idx
            .intervals()
            .iter()
            .map(|iv| format!("{} {}", iv.lo, iv.hi))
            .collect();
        assert_eq!(
            bounds,
            [
                "2348.81 2391.11",
                "2391.11 2391.29",
                "2391.29 2391.60",
                "2391.60 2439.82"
            ]
        );
    }

    #[test]
    fn third_interval_posts_seven_arcs() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        let lines = idx.posting_lines(2);
        assert_eq!(lines.len(), 7);
        assert!(lines.contains(&"<22/> W/i <23/2391.60>".to_string()));
        assert_eq!(idx.posting_lines(0).len(), 3);
        assert_eq!(idx.posting_lines(1).len(), 3);
        assert_eq!(idx.posting_lines(3).len(), 3);
    }

    #[test]
    fn renders_the_documented_layout() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        assert_eq!(idx.render(), RENDERED);
    }

    #[test]
    fn postings_are_parseable_annotation_text() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        for i in 0..idx.len() {
            let text = idx.posting_lines(i).join("\n");
            let sub = parse(&text).unwrap();
            assert_eq!(sub.arc_count(), idx.postings(i).len());
        }
    }

    #[test]
    fn single_arc_graph_has_one_interval_one_posting() {
        let g = parse("<1/1.5> W/a <2/2.5>\n").unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        assert_eq!(idx.len(), 1);
        assert_eq!(idx.postings(0).len(), 1);
    }

    #[test]
    fn anchorless_graph_is_rejected_but_empty_graph_is_fine() {
        let g = parse("<1/> W/a <2/>\n").unwrap();
        assert_eq!(TimeLocalIndex::build(&g), Err(IndexError::NotAnchored));
        let idx = TimeLocalIndex::build(&AnnotationGraph::empty()).unwrap();
        assert!(idx.is_empty());
        assert_eq!(idx.render(), "");
    }

    #[test]
    fn instants_post_to_the_interval_opening_at_their_time() {
        let g = parse("<1/1> W/a <2/2>\n<2/2> ding/x <3/2>\n<3/2> W/b <4/3>\n").unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        let ding = arc(&g, "ding/x");
        assert_eq!(idx.intervals_of(&ding).unwrap(), 1..2);
        // At the timeline's end there is no interval to receive it.
        let g2 = parse("<1/1> W/a <2/2>\n<2/2> ding/x <3/2>\n").unwrap();
        let idx2 = TimeLocalIndex::build(&g2).unwrap();
        let ding2 = arc(&g2, "ding/x");
        assert_eq!(idx2.intervals_of(&ding2).unwrap(), 0..0);
        assert!(idx2.overlapping_arcs(&ding2).unwrap().is_empty());
    }

    #[test]
    fn partial_anchoring_widens_spans_to_the_extremes() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        // No anchored node reaches W/this's source, so its span opens at
        // the timeline minimum; dually W/think runs to the maximum.
        assert_eq!(idx.intervals_of(&arc(&g, "W/this")).unwrap(), 0..1);
        assert_eq!(idx.intervals_of(&arc(&g, "W/think")).unwrap(), 3..4);
        assert_eq!(idx.intervals_of(&arc(&g, "W/i")).unwrap(), 2..3);
        assert_eq!(idx.intervals_of(&arc(&g, "spkrtype/male")).unwrap(), 0..3);
    }

    #[test]
    fn overlap_queries_follow_shared_intervals() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        let i = arc(&g, "W/i");
        let ga = arc(&g, "speaker/Gloria-Allred");
        assert!(idx.overlapping_arcs(&i).unwrap().contains(&ga));
        let this = arc(&g, "W/this");
        let well = arc(&g, "W/well");
        assert!(!idx.overlapping_arcs(&this).unwrap().contains(&well));
        let unknown = Arc::new(
            crate::graph::NodeId::new("99").unwrap(),
            crate::graph::Label::new("W", "zzz").unwrap(),
            crate::graph::NodeId::new("98").unwrap(),
        );
        assert!(matches!(
            idx.overlapping_arcs(&unknown),
            Err(IndexError::Graph(GraphError::UnknownArc(_)))
        ));
    }

    #[test]
    fn included_arcs_filter_overlaps_by_inclusion() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        let rh = arc(&g, "speaker/Roger-Hedgecock");
        let inc = idx.included_arcs(&g, &rh, RelationMode::T).unwrap();
        assert!(inc.contains(&arc(&g, "W/country")));
        assert!(inc.contains(&arc(&g, "spkrtype/male")));
        assert!(!inc.contains(&arc(&g, "W/this")));
        assert!(!inc.contains(&rh));
    }

    #[test]
    fn every_posting_is_span_covered() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        for (i, iv) in idx.intervals().iter().enumerate() {
            for a in idx.postings(i) {
                let (lo, hi) = g.potential_span(a).unwrap();
                assert!(lo <= iv.lo && iv.hi <= hi, "{a:?} outside its span in {iv}");
            }
        }
    }

    #[test]
    fn dropping_an_anchor_leaves_unrelated_spans_alone() {
        let g = parse(OVERLAP_TUPLES).unwrap();
        let idx = TimeLocalIndex::build(&g).unwrap();
        assert_eq!(idx.len(), 4);
        // Drop node 13's anchor (interior to the first turn). Arcs not
        // incident on 13 keep their spans; their postings land inside the
        // same bounds even though the interval partition is now coarser.
        let arcs: Vec<Arc> = g.arcs().cloned().collect();
        let anchors: Vec<_> = g
            .anchors()
            .iter()
            .filter(|(n, _)| n.as_str() != "13")
            .map(|(n, t)| (n.clone(), t.clone()))
            .collect();
        let g2 = AnnotationGraph::build(arcs, anchors).unwrap();
        let idx2 = TimeLocalIndex::build(&g2).unwrap();
        assert_eq!(idx2.len(), 3);
        for a in g2.arcs() {
            if a.src.as_str() == "13" || a.dst.as_str() == "13" {
                continue;
            }
            let (lo, hi) = g.potential_span(a).unwrap();
            assert_eq!(g2.potential_span(a).unwrap(), (lo.clone(), hi.clone()));
            for i in idx2.intervals_of(a).unwrap() {
                let iv = &idx2.intervals()[i];
                assert!(lo <= iv.lo && iv.hi <= hi, "{a:?} posted outside its span");
            }
        }
    }
}
