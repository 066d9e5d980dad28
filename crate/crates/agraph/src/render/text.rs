//! Monospaced score pages.
//!
//! One line per lane, connector lines between, and a dotted-off timeline
//! at the bottom. The horizontal scale is uniform, chosen so the tightest
//! anchor gap still gets a few cells when that fits in a reasonable
//! number of pages; wider scores are cut into pages and rectangles
//! crossing a cut repeat their label on both sides.

use super::{Layout, RenderError, RenderOptions};

const MIN_COLS: usize = 8;
const GAP_CELLS: f64 = 4.0;
const MAX_PAGES: f64 = 40.0;

pub(crate) fn render(l: &Layout, opts: &RenderOptions) -> Result<String, RenderError> {
    let margin = l.strips.iter().map(|s| s.name.chars().count()).max().unwrap_or(0) + 1;
    if opts.width < margin + MIN_COLS {
        return Err(RenderError::LayoutOverflow {
            width: opts.width,
            needed: margin + MIN_COLS,
        });
    }
    let usable = opts.width - margin;

    if l.strips.is_empty() {
        if !opts.timeline {
            return Ok(String::new());
        }
        let mut line = "─".repeat(usable);
        line.insert_str(0, &" ".repeat(margin));
        return Ok(line.trim_end().to_string() + "\n");
    }

    let t0 = l.times.first().expect("anchored layouts have times").to_f64();
    let t1 = l.times.last().expect("anchored layouts have times").to_f64();
    let range = t1 - t0;
    let scale = if range > 0.0 {
        let base = (usable - 1) as f64 / range;
        let min_gap = l
            .times
            .windows(2)
            .map(|w| w[1].to_f64() - w[0].to_f64())
            .filter(|d| *d > 0.0)
            .fold(f64::INFINITY, f64::min);
        base.max((GAP_CELLS / min_gap).min(base * MAX_PAGES))
    } else {
        0.0
    };
    let col = |x: f64| ((x - t0) * scale).round() as usize;
    let total_cols = if range > 0.0 { (range * scale).round() as usize + 1 } else { 1 };

    // Canvas rows: lane, connector, lane, ..., then the timeline block.
    let strip_line = |strip: usize| strip * 2;
    let mut height = l.strips.len() * 2 - 1;
    let dotted_line = if opts.timeline {
        height += 2;
        Some(height - 1)
    } else {
        None
    };
    let mut canvas = vec![vec![' '; total_cols]; height];

    let free = |c: char| c == ' ';
    for r in &l.rects {
        let (c1, c2) = (col(r.lo), col(r.hi));
        let row = &mut canvas[strip_line(r.strip)];
        if c1 == c2 {
            row[c1] = '│';
            continue;
        }
        let shade = super::shade_char(&r.type_);
        row[c1] = '│';
        row[c2] = '│';
        for cell in row.iter_mut().take(c2).skip(c1 + 1) {
            *cell = shade;
        }
        write_label(row, c1 + 1, c2, &r.label, shade);
    }

    for c in &l.connectors {
        let x = ((c.pos - t0) * scale).round() as usize;
        let from = strip_line(l.top(c)) + 1;
        let to = strip_line(l.bottom(c));
        for line in canvas.iter_mut().take(to).skip(from) {
            if free(line[x]) || is_shade(line[x]) {
                line[x] = '│';
            }
        }
        if opts.show_node_ids {
            let line = &mut canvas[from.min(height - 1)];
            let id: Vec<char> = c.node.to_string().chars().collect();
            if x + 1 + id.len() <= total_cols
                && line[x + 1..=x + id.len()].iter().all(|&ch| free(ch))
            {
                line[x + 1..=x + id.len()].copy_from_slice(&id);
            }
        }
    }

    let mut label_rows: Vec<Vec<char>> = Vec::new();
    if let Some(dotted) = dotted_line {
        for cell in canvas[dotted].iter_mut().take(total_cols) {
            *cell = '─';
        }
        for t in &l.times {
            let x = col(t.to_f64());
            if free(canvas[dotted - 1][x]) {
                canvas[dotted - 1][x] = '┊';
            }
            canvas[dotted][x] = '┼';
            let text: Vec<char> = t.to_string().chars().collect();
            if x + text.len() > total_cols {
                continue;
            }
            // A label that would cross a page cut slides left until it
            // ends at the cut; it still covers its own tick column.
            let page_end = (x / usable + 1) * usable;
            let x = if x + text.len() > page_end {
                match page_end.checked_sub(text.len()) {
                    Some(x2) if x2 >= x / usable * usable => x2,
                    _ => continue,
                }
            } else {
                x
            };
            let row = match label_rows
                .iter()
                .position(|row| fits(row, x, text.len(), total_cols))
            {
                Some(i) => i,
                None => {
                    label_rows.push(vec![' '; total_cols]);
                    label_rows.len() - 1
                }
            };
            label_rows[row][x..x + text.len()].copy_from_slice(&text);
        }
    }
    canvas.extend(label_rows);

    // Slice into pages, repeating the label of any rectangle cut at a
    // page's left edge.
    let pages = total_cols.div_ceil(usable);
    let mut out = String::new();
    for page in 0..pages {
        if page > 0 {
            out.push('\n');
        }
        let w0 = page * usable;
        let w1 = (w0 + usable).min(total_cols);
        let mut slices: Vec<Vec<char>> =
            canvas.iter().map(|line| line[w0..w1].to_vec()).collect();
        if page > 0 {
            for r in &l.rects {
                let (c1, c2) = (col(r.lo), col(r.hi));
                if c1 < w0 && c2 > w0 {
                    let line = &mut slices[strip_line(r.strip)];
                    let end = (c2 - w0).min(line.len());
                    write_label(line, 0, end, &r.label, super::shade_char(&r.type_));
                }
            }
        }
        for (i, slice) in slices.iter().enumerate() {
            let name = if i % 2 == 0 && i / 2 < l.strips.len() {
                &l.strips[i / 2].name
            } else {
                ""
            };
            let mut line = format!("{name:<margin$}");
            line.extend(slice);
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
    Ok(out)
}

/// Writes as much of the label as fits strictly before `end`, only over
/// this rectangle's own shading.
fn write_label(row: &mut [char], start: usize, end: usize, label: &str, shade: char) {
    let mut x = start;
    for ch in label.chars() {
        if x >= end || x >= row.len() || row[x] != shade {
            break;
        }
        row[x] = ch;
        x += 1;
    }
}

fn is_shade(c: char) -> bool {
    super::SHADES.contains(&c)
}

fn fits(row: &[char], x: usize, len: usize, total: usize) -> bool {
    if x + len > total {
        return false;
    }
    let from = x.saturating_sub(1);
    let to = (x + len + 1).min(total);
    row[from..to].iter().all(|&c| c == ' ')
}

#[cfg(test)]
mod tests {
    use super::super::{layout, render_score, OutputFormat, RenderError, RenderOptions};
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

    fn two_tier() -> AnnotationGraph {
        AnnotationGraph::build(
            [arc("a", "W/w", "c"), arc("a", "P/p1", "b"), arc("b", "P/p2", "c")],
            [(n("a"), t("0")), (n("b"), t("1")), (n("c"), t("2"))],
        )
        .unwrap()
    }

    #[test]
    fn a_small_score_comes_out_cell_for_cell() {
        let g = two_tier();
        let opts = RenderOptions { width: 30, ..RenderOptions::default() };
        let sw = super::super::shade_char("W");
        let sp = super::super::shade_char("P");
        let expected = [
            format!("W |w{}|", sw.to_string().repeat(25)),
            format!("  |{}|", " ".repeat(26)),
            format!("P |p1{}|p2{}|", sp.to_string().repeat(11), sp.to_string().repeat(10)),
            format!("  ┊{}┊{}┊", " ".repeat(13), " ".repeat(12)),
            format!("  ┼{}┼{}┼", "─".repeat(13), "─".repeat(12)),
            format!("  0{}1{}2", " ".repeat(13), " ".repeat(12)),
        ]
        .join("\n")
            + "\n";
        let got = render_score(&g, &opts).unwrap().replace('│', "|");
        assert_eq!(got, expected);
    }

    #[test]
    fn lines_never_exceed_the_width() {
        let g = crate::import::import_timit(
            crate::import::timit::tests::SA1_WRD,
            crate::import::timit::tests::SA1_PHN,
            &crate::import::ImportOptions::default(),
        )
        .unwrap();
        for width in [24, 40, 80, 120] {
            let opts = RenderOptions { width, ..RenderOptions::default() };
            let text = render_score(&g, &opts).unwrap();
            for line in text.lines() {
                assert!(
                    line.chars().count() <= width,
                    "width {width} exceeded: {line:?}"
                );
            }
        }
    }

    #[test]
    fn shared_boundaries_line_up_across_rows() {
        let g = two_tier();
        let opts = RenderOptions { width: 30, ..RenderOptions::default() };
        let text = render_score(&g, &opts).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let w_cols: Vec<usize> = lines[0]
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == '│')
            .map(|(i, _)| i)
            .collect();
        let p_cols: Vec<usize> = lines[2]
            .chars()
            .enumerate()
            .filter(|(_, c)| *c == '│')
            .map(|(i, _)| i)
            .collect();
        assert_eq!(w_cols.len(), 2);
        assert_eq!(p_cols.len(), 3);
        assert_eq!(w_cols[0], p_cols[0]);
        assert_eq!(w_cols[1], p_cols[2]);
    }

    #[test]
    fn tight_gaps_push_the_score_onto_more_pages() {
        let g = AnnotationGraph::build(
            [arc("a", "W/stretch", "c"), arc("a", "P/blip", "b"), arc("b", "P/rest", "c")],
            [(n("a"), t("0")), (n("b"), t("0.01")), (n("c"), t("10"))],
        )
        .unwrap();
        let opts = RenderOptions { width: 30, ..RenderOptions::default() };
        let text = render_score(&g, &opts).unwrap();
        let pages: Vec<&str> = text.split("\n\n").collect();
        assert!(pages.len() > 1, "expected a page break:\n{text}");
        for line in text.lines() {
            assert!(line.chars().count() <= 30);
        }
        // The long rectangle is cut, so its label shows up again.
        assert!(text.matches("stretch").count() >= 2, "{text}");
    }

    #[test]
    fn width_floor_is_enforced() {
        let g = two_tier();
        let narrow = RenderOptions { width: 9, ..RenderOptions::default() };
        assert_eq!(
            render_score(&g, &narrow).unwrap_err(),
            RenderError::LayoutOverflow { width: 9, needed: 10 }
        );
        let just_enough = RenderOptions { width: 10, ..RenderOptions::default() };
        assert!(render_score(&g, &just_enough).is_ok());
    }

    #[test]
    fn empty_graphs_render_an_empty_canvas() {
        let g = AnnotationGraph::empty();
        let bare = RenderOptions { timeline: false, ..RenderOptions::default() };
        assert_eq!(render_score(&g, &bare).unwrap(), "");
        let with_line = RenderOptions::default();
        let text = render_score(&g, &with_line).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.contains('─'));
    }

    #[test]
    fn instants_collapse_to_a_single_tick() {
        let g = AnnotationGraph::build(
            [arc("a", "W/w", "b"), arc("p", "T/bang", "q")],
            [(n("a"), t("0")), (n("b"), t("2")), (n("p"), t("1")), (n("q"), t("1"))],
        )
        .unwrap();
        let text =
            render_score(&g, &RenderOptions { width: 30, ..RenderOptions::default() })
                .unwrap();
        let t_line = text
            .lines()
            .find(|l| l.starts_with("T"))
            .expect("instant row");
        assert_eq!(t_line.matches('│').count(), 1);
    }

    #[test]
    fn node_ids_decorate_connectors_on_request() {
        let g = two_tier();
        let opts = RenderOptions {
            width: 40,
            show_node_ids: true,
            ..RenderOptions::default()
        };
        let text = render_score(&g, &opts).unwrap();
        let connector = text.lines().nth(1).unwrap();
        assert!(connector.contains('a') || connector.contains('c'), "{text}");
    }

    #[test]
    fn svg_and_text_share_the_option_surface() {
        let g = two_tier();
        let opts = RenderOptions { output: OutputFormat::Svg, ..RenderOptions::default() };
        let svg = render_score(&g, &opts).unwrap();
        assert!(svg.starts_with("<svg"));
        let l = layout(&g, &opts).unwrap();
        assert_eq!(l.rects.len(), 3);
    }
}
