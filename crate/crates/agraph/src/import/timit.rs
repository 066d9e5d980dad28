//! TIMIT word and phone segmentations.
//!
//! Each line is `start-sample end-sample label`. Word lines become `W/`
//! arcs and phone lines `P/` arcs. The sample number serves as the node
//! identity, so boundaries shared between the two files become shared
//! nodes, and dividing by the sample rate gives the node's time.

use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
use crate::time::TimeRef;

use super::{ImportError, ImportOptions};

/// Reads a TIMIT `.wrd` file and `.phn` file into one graph.
///
/// Either text may be empty. The result is totally anchored: every node is
/// a sample boundary.
pub fn import_timit(
    wrd: &str,
    phn: &str,
    opts: &ImportOptions,
) -> Result<AnnotationGraph, ImportError> {
    if opts.sample_rate == 0 {
        return Err(ImportError::InvalidOptions("sample rate must be positive".into()));
    }
    let mut arcs = Vec::new();
    let mut anchors = Vec::new();
    read_tier(wrd, opts.mapped_type("W"), opts, &mut arcs, &mut anchors)?;
    read_tier(phn, opts.mapped_type("P"), opts, &mut arcs, &mut anchors)?;
    Ok(AnnotationGraph::build(arcs, anchors)?)
}

fn read_tier(
    text: &str,
    type_: &str,
    opts: &ImportOptions,
    arcs: &mut Vec<Arc>,
    anchors: &mut Vec<(NodeId, TimeRef)>,
) -> Result<(), ImportError> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (start, end, label) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(e), Some(l)) => (s, e, l),
            _ => {
                return Err(ImportError::syntax(
                    line,
                    format!("expected `start end label`, got {trimmed:?}"),
                ))
            }
        };
        if let Some(extra) = fields.next() {
            return Err(ImportError::syntax(line, format!("unexpected field {extra:?}")));
        }
        let start: u64 = start
            .parse()
            .map_err(|_| ImportError::syntax(line, format!("bad sample number {start:?}")))?;
        let end: u64 = end
            .parse()
            .map_err(|_| ImportError::syntax(line, format!("bad sample number {end:?}")))?;
        if start >= end {
            return Err(ImportError::NonMonotonicSpan { line, start, end });
        }
        let src = NodeId::new(start.to_string())?;
        let dst = NodeId::new(end.to_string())?;
        anchors.push((src.clone(), TimeRef::from_ratio(start, opts.sample_rate)));
        anchors.push((dst.clone(), TimeRef::from_ratio(end, opts.sample_rate)));
        arcs.push(Arc::new(src, Label::new(type_, label)?, dst));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::AnchorClass;

    pub(crate) const SA1_WRD: &str = include_str!("../../data/sa1.wrd");

    pub(crate) const SA1_PHN: &str = include_str!("../../data/sa1.phn");

    fn n(id: &str) -> NodeId {
        NodeId::new(id).unwrap()
    }

    #[test]
    fn words_and_phones_share_boundary_nodes() {
        let g = import_timit(SA1_WRD, SA1_PHN, &ImportOptions::default()).unwrap();
        assert_eq!(g.arc_count(), 21);
        assert_eq!(g.node_count(), 20);

        let mut at_5200: Vec<String> = g
            .arcs()
            .filter(|a| a.src == n("5200") || a.dst == n("5200"))
            .map(|a| a.label.to_string())
            .collect();
        at_5200.sort();
        assert_eq!(at_5200, ["P/hv", "P/iy", "W/had", "W/she"]);
    }

    #[test]
    fn samples_convert_to_exact_seconds() {
        let g = import_timit(SA1_WRD, "", &ImportOptions::default()).unwrap();
        assert_eq!(g.time_of(&n("2360")).unwrap().to_string(), "0.1475");
        assert_eq!(g.time_of(&n("5200")).unwrap().to_string(), "0.325");
        assert_eq!(g.time_of(&n("49066")).unwrap().to_string(), "3.066625");
    }

    #[test]
    fn result_is_totally_anchored() {
        let g = import_timit(SA1_WRD, SA1_PHN, &ImportOptions::default()).unwrap();
        assert_eq!(g.classify_anchoring(), AnchorClass::TotallyAnchored);
    }

    #[test]
    fn empty_inputs_give_the_empty_graph() {
        let g = import_timit("", "", &ImportOptions::default()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn tier_names_can_be_remapped() {
        let mut opts = ImportOptions::default();
        opts.type_prefix_map.insert("W".into(), "Word".into());
        opts.type_prefix_map.insert("P".into(), "Phone".into());
        let g = import_timit("0 10 hi", "0 5 h", &opts).unwrap();
        let types = g.types();
        assert!(types.contains("Word") && types.contains("Phone"));
    }

    #[test]
    fn backwards_and_empty_spans_are_rejected() {
        let err = import_timit("5200 2360 she", "", &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::NonMonotonicSpan { line: 1, start: 5200, end: 2360 });
        let err = import_timit("", "100 100 h#", &ImportOptions::default()).unwrap_err();
        assert_eq!(err, ImportError::NonMonotonicSpan { line: 1, start: 100, end: 100 });
    }

    #[test]
    fn malformed_lines_are_syntax_errors() {
        for bad in ["2360 5200", "2360 she five", "x 5200 she", "2360 5200 she extra"] {
            let err = import_timit(bad, "", &ImportOptions::default()).unwrap_err();
            assert!(matches!(err, ImportError::Syntax { line: 1, .. }), "{bad:?}: {err}");
        }
    }

    #[test]
    fn zero_sample_rate_is_rejected() {
        let opts = ImportOptions { sample_rate: 0, ..Default::default() };
        assert!(matches!(
            import_timit("0 1 x", "", &opts),
            Err(ImportError::InvalidOptions(_))
        ));
    }
}
