//! Single-canvas SVG score.
//!
//! Same layout as the text pages, drawn once at a fixed cell size with
//! hue standing in for the text shading. Page-breaking is left to the
//! text form; SVG viewers scroll.

use std::fmt::Write;

use super::{Layout, RenderError, RenderOptions};

const CELL: f64 = 8.0;
const ROW_H: f64 = 28.0;
const RECT_H: f64 = 18.0;
const TOP: f64 = 10.0;
const MIN_COLS: usize = 8;

pub(crate) fn render(l: &Layout, opts: &RenderOptions) -> Result<String, RenderError> {
    let margin = l.strips.iter().map(|s| s.name.chars().count()).max().unwrap_or(0) + 1;
    if opts.width < margin + MIN_COLS {
        return Err(RenderError::LayoutOverflow {
            width: opts.width,
            needed: margin + MIN_COLS,
        });
    }
    let width = opts.width as f64 * CELL;
    let margin_px = margin as f64 * CELL;

    let timeline_extra = if opts.timeline { 44.0 } else { 0.0 };
    let height = TOP + l.strips.len() as f64 * ROW_H + timeline_extra;
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"11\">\n"
    );

    if l.strips.is_empty() {
        if opts.timeline {
            let y = TOP + 14.0;
            let _ = write!(
                out,
                "  <line x1=\"{margin_px}\" y1=\"{y}\" x2=\"{width}\" y2=\"{y}\" \
                 stroke=\"#333\"/>\n"
            );
        }
        out.push_str("</svg>\n");
        return Ok(out);
    }

    let t0 = l.times.first().expect("anchored layouts have times").to_f64();
    let t1 = l.times.last().expect("anchored layouts have times").to_f64();
    let range = t1 - t0;
    let scale = if range > 0.0 { (width - margin_px - CELL) / range } else { 0.0 };
    let x = |t: f64| margin_px + (t - t0) * scale;
    let y = |strip: usize| TOP + strip as f64 * ROW_H;

    for (i, strip) in l.strips.iter().enumerate() {
        if !strip.name.is_empty() {
            let _ = write!(
                out,
                "  <text x=\"2\" y=\"{}\">{}</text>\n",
                y(i) + 13.0,
                escape(&strip.name)
            );
        }
    }

    for r in &l.rects {
        let (x1, x2) = (x(r.lo), x(r.hi));
        let yr = y(r.strip);
        if x2 - x1 < 0.5 {
            let _ = write!(
                out,
                "  <line x1=\"{x1}\" y1=\"{yr}\" x2=\"{x1}\" y2=\"{}\" stroke=\"#333\" \
                 stroke-width=\"2\"/>\n",
                yr + RECT_H
            );
            continue;
        }
        let _ = write!(
            out,
            "  <rect x=\"{x1}\" y=\"{yr}\" width=\"{}\" height=\"{RECT_H}\" fill=\"{}\" \
             stroke=\"#333\"/>\n",
            x2 - x1,
            super::fill_color(&r.type_)
        );
        let label = match r.label.split_once('^') {
            Some((base, ids)) => format!(
                "{}<tspan baseline-shift=\"super\" font-size=\"70%\">{}</tspan>",
                escape(base),
                escape(ids)
            ),
            None => escape(&r.label),
        };
        let _ = write!(out, "  <text x=\"{}\" y=\"{}\">{label}</text>\n", x1 + 3.0, yr + 13.0);
    }

    for c in &l.connectors {
        let xc = x(c.pos);
        let y1 = y(l.top(c)) + RECT_H;
        let y2 = y(l.bottom(c));
        let _ = write!(
            out,
            "  <line x1=\"{xc}\" y1=\"{y1}\" x2=\"{xc}\" y2=\"{y2}\" stroke=\"#333\"/>\n"
        );
        if opts.show_node_ids {
            let _ = write!(
                out,
                "  <text x=\"{}\" y=\"{}\" font-size=\"8\">{}</text>\n",
                xc + 2.0,
                y1 + 9.0,
                escape(&c.node.to_string())
            );
        }
    }

    if opts.timeline {
        let yt = TOP + l.strips.len() as f64 * ROW_H + 14.0;
        let _ = write!(
            out,
            "  <line x1=\"{}\" y1=\"{yt}\" x2=\"{}\" y2=\"{yt}\" stroke=\"#333\"/>\n",
            x(t0),
            x(t1)
        );
        for (i, t) in l.times.iter().enumerate() {
            let xt = x(t.to_f64());
            let _ = write!(
                out,
                "  <line x1=\"{xt}\" y1=\"{}\" x2=\"{xt}\" y2=\"{}\" stroke=\"#333\" \
                 stroke-dasharray=\"2,2\"/>\n",
                yt - 12.0,
                yt + 3.0
            );
            let drop = if i % 2 == 0 { 14.0 } else { 24.0 };
            let _ = write!(
                out,
                "  <text x=\"{xt}\" y=\"{}\" font-size=\"9\" text-anchor=\"middle\">{}</text>\n",
                yt + drop,
                escape(&t.to_string())
            );
        }
    }

    out.push_str("</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{render_score, OutputFormat, RenderError, RenderOptions};
    use crate::graph::{AnnotationGraph, Arc, Label, NodeId};
    use crate::time::TimeRef;

    fn n(id: &str) -> NodeId {
        NodeId::new(id).unwrap()
    }

    fn t(s: &str) -> TimeRef {
        TimeRef::parse(s).unwrap()
    }

    fn arc(src: &str, label: &str, dst: &str) -> Arc {
        let (ty, c) = label.split_once('/').unwrap();
        Arc::new(n(src), Label::new(ty, c).unwrap(), n(dst))
    }

    fn svg_opts() -> RenderOptions {
        RenderOptions { output: OutputFormat::Svg, ..RenderOptions::default() }
    }

    #[test]
    fn a_document_with_one_rect_per_spanning_arc() {
        let g = AnnotationGraph::build(
            [arc("a", "W/w", "c"), arc("a", "P/p1", "b"), arc("b", "P/p2", "c")],
            [(n("a"), t("0")), (n("b"), t("1")), (n("c"), t("2"))],
        )
        .unwrap();
        let svg = render_score(&g, &svg_opts()).unwrap();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect ").count(), 3);
        assert!(svg.contains(">p1</text>"));
        // Ticks and labels for each of the three anchor times.
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        assert_eq!(svg, render_score(&g, &svg_opts()).unwrap());
    }

    #[test]
    fn markup_in_labels_is_escaped() {
        let g = AnnotationGraph::build(
            [arc("a", "W/a<b&c", "b")],
            [(n("a"), t("0")), (n("b"), t("1"))],
        )
        .unwrap();
        let svg = render_score(&g, &svg_opts()).unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b"));
    }

    #[test]
    fn instants_draw_as_strokes_not_rects() {
        let g = AnnotationGraph::build(
            [arc("p", "T/bang", "q")],
            [(n("p"), t("1")), (n("q"), t("1"))],
        )
        .unwrap();
        let svg = render_score(&g, &svg_opts()).unwrap();
        assert_eq!(svg.matches("<rect ").count(), 0);
        assert!(svg.contains("stroke-width=\"2\""));
    }

    #[test]
    fn coindex_marks_become_superscripts() {
        let g = AnnotationGraph::build(
            [arc("1", "W/she", "2"), arc("1", "license/w35", "2")],
            [(n("1"), t("0")), (n("2"), t("1"))],
        )
        .unwrap();
        let mut opts = svg_opts();
        opts.class_types.insert("license".into());
        let svg = render_score(&g, &opts).unwrap();
        assert!(svg.contains("she<tspan baseline-shift=\"super\""));
        assert!(svg.contains(">w35</tspan>"));
    }

    #[test]
    fn empty_graph_yields_a_bare_canvas() {
        let g = AnnotationGraph::empty();
        let svg = render_score(&g, &svg_opts()).unwrap();
        assert!(svg.contains("<line"));
        let no_line = RenderOptions { timeline: false, ..svg_opts() };
        let bare = render_score(&g, &no_line).unwrap();
        assert!(!bare.contains("<line"));
        assert!(bare.contains("</svg>"));
    }

    #[test]
    fn narrow_width_is_rejected() {
        let g = AnnotationGraph::build(
            [arc("a", "W/w", "b")],
            [(n("a"), t("0")), (n("b"), t("1"))],
        )
        .unwrap();
        let opts = RenderOptions { width: 5, ..svg_opts() };
        assert!(matches!(
            render_score(&g, &opts),
            Err(RenderError::LayoutOverflow { .. })
        ));
    }
}
