//! Score-notation views.
//!
//! Every arc becomes a shaded rectangle drawn to scale between its end
//! nodes; an unanchored node sits at a longest-path interpolation
//! between the nearest anchored times, so a chain of arcs through it
//! draws end to end inside its `[glb, lub)` window. Arcs of one type
//! share a row, splitting into as many lanes as overlaps force; arcs
//! meeting at a node across rows are joined by vertical connectors,
//! and anchored times hang off a dotted timeline. Rectangle labels
//! carry content only, never the type, which the row name and shading
//! already give.
//!
//! Output is either a monospaced text score cut into pages or a single
//! SVG canvas.

mod svg;
mod text;

use std::collections::{BTreeMap, BTreeSet};

use crate::classes::resolve_equivalence_classes;
use crate::encoding;
use crate::graph::{AnnotationGraph, Arc, NodeId};
use crate::time::TimeRef;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Text,
    Svg,
}

#[derive(Clone, Debug)]
pub struct RenderOptions {
    pub output: OutputFormat,
    /// Explicit row for a type; unassigned types get their own rows, in
    /// order of decreasing mean span, below any assigned ones.
    pub level_assignment: BTreeMap<String, usize>,
    /// Decorate connectors with the node identifier.
    pub show_node_ids: bool,
    pub timeline: bool,
    /// Total width in character cells; the SVG canvas uses the same
    /// count at a fixed cell size.
    pub width: usize,
    /// Types drawn as coindexing superscripts on the arcs they span
    /// rather than as rectangles of their own.
    pub class_types: BTreeSet<String>,
}

impl Default for RenderOptions {
    fn default() -> RenderOptions {
        RenderOptions {
            output: OutputFormat::Text,
            level_assignment: BTreeMap::new(),
            show_node_ids: false,
            timeline: true,
            width: 100,
            class_types: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("cannot lay out unanchored material: {0} has no bounded span")]
    NotAnchored(String),
    #[error("width {width} leaves fewer than {needed} drawable columns")]
    LayoutOverflow { width: usize, needed: usize },
}

/// Renders the score in the requested format.
pub fn render_score(g: &AnnotationGraph, opts: &RenderOptions) -> Result<String, RenderError> {
    let l = layout(g, opts)?;
    match opts.output {
        OutputFormat::Text => text::render(&l, opts),
        OutputFormat::Svg => svg::render(&l, opts),
    }
}

/// Whether some ordering of the rows can be drawn with no connector
/// passing through a rectangle. Exhaustive up to eight rows, first-fit
/// beyond; a diagnostic, not a validity condition.
pub fn check_rightward_planar(g: &AnnotationGraph) -> bool {
    let Ok(l) = layout(g, &RenderOptions::default()) else {
        return false;
    };
    let n = l.strips.len();
    if n <= 2 {
        return true;
    }
    let mut rects: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n];
    for r in &l.rects {
        rects[r.strip].push((r.lo, r.hi));
    }
    if n > 8 {
        let identity: Vec<usize> = (0..n).collect();
        return crossings(&identity, &l.connectors, &rects) == 0;
    }
    let mut position: Vec<usize> = (0..n).collect();
    permutations(&mut position, 0, &mut |pos| crossings(pos, &l.connectors, &rects) == 0)
}

fn crossings(position: &[usize], connectors: &[Connector], rects: &[Vec<(f64, f64)>]) -> usize {
    let mut total = 0;
    for c in connectors {
        let rows: Vec<usize> = c.strips.iter().map(|s| position[*s]).collect();
        let top = *rows.iter().min().expect("connectors span strips");
        let bottom = *rows.iter().max().expect("connectors span strips");
        for (strip, spans) in rects.iter().enumerate() {
            let row = position[strip];
            if row <= top || row >= bottom {
                continue;
            }
            total += spans.iter().filter(|(lo, hi)| *lo < c.pos && c.pos < *hi).count();
        }
    }
    total
}

fn permutations(
    position: &mut Vec<usize>,
    k: usize,
    accept: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if k == position.len() {
        return accept(position);
    }
    for i in k..position.len() {
        position.swap(k, i);
        if permutations(position, k + 1, accept) {
            return true;
        }
        position.swap(k, i);
    }
    false
}

pub(crate) struct Rect {
    pub(crate) lo: f64,
    pub(crate) hi: f64,
    pub(crate) strip: usize,
    pub(crate) type_: String,
    pub(crate) label: String,
}

pub(crate) struct Strip {
    /// Row name, shown on the first lane of a row and blank on the rest.
    pub(crate) name: String,
}

pub(crate) struct Connector {
    pub(crate) node: NodeId,
    pub(crate) pos: f64,
    pub(crate) strips: BTreeSet<usize>,
}

pub(crate) struct Layout {
    pub(crate) strips: Vec<Strip>,
    pub(crate) rects: Vec<Rect>,
    pub(crate) connectors: Vec<Connector>,
    pub(crate) times: Vec<TimeRef>,
}

impl Layout {
    pub(crate) fn top(&self, c: &Connector) -> usize {
        *c.strips.first().expect("connectors span strips")
    }

    pub(crate) fn bottom(&self, c: &Connector) -> usize {
        *c.strips.last().expect("connectors span strips")
    }
}

/// Horizontal position for every node that is pinned from both sides:
/// the anchor time itself, or a longest-path interpolation between the
/// nearest anchored times, so chain arcs draw side by side instead of
/// piling onto their shared uncertainty window.
fn node_positions(g: &AnnotationGraph) -> BTreeMap<NodeId, Option<f64>> {
    let mut indegree: BTreeMap<&NodeId, usize> = g
        .nodes()
        .map(|n| (n, g.pred.get(n).map_or(0, BTreeSet::len)))
        .collect();
    let mut ready: Vec<&NodeId> =
        indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    let mut topo: Vec<&NodeId> = Vec::new();
    while let Some(n) = ready.pop() {
        topo.push(n);
        for s in g.succ.get(n).into_iter().flatten() {
            let d = indegree.get_mut(s).expect("successors are nodes");
            *d -= 1;
            if *d == 0 {
                ready.push(s);
            }
        }
    }

    // (nearest anchored time, longest arc distance to it) on each side.
    let mut before: BTreeMap<&NodeId, (f64, usize)> = BTreeMap::new();
    for n in &topo {
        if let Some(t) = g.time_of(n) {
            before.insert(n, (t.to_f64(), 0));
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for p in g.pred.get(*n).into_iter().flatten() {
            if let Some((t, d)) = before.get(p) {
                let cand = (*t, d + 1);
                best = Some(match best {
                    Some(b) if b.0 > cand.0 || (b.0 == cand.0 && b.1 >= cand.1) => b,
                    _ => cand,
                });
            }
        }
        if let Some(b) = best {
            before.insert(n, b);
        }
    }
    let mut after: BTreeMap<&NodeId, (f64, usize)> = BTreeMap::new();
    for n in topo.iter().rev() {
        if let Some(t) = g.time_of(n) {
            after.insert(n, (t.to_f64(), 0));
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for s in g.succ.get(*n).into_iter().flatten() {
            if let Some((t, d)) = after.get(s) {
                let cand = (*t, d + 1);
                best = Some(match best {
                    Some(b) if b.0 < cand.0 || (b.0 == cand.0 && b.1 >= cand.1) => b,
                    _ => cand,
                });
            }
        }
        if let Some(b) = best {
            after.insert(n, b);
        }
    }

    g.nodes()
        .map(|n| {
            let p = match (before.get(n), after.get(n)) {
                (Some((t, 0)), _) => Some(*t),
                (Some((lo, db)), Some((hi, df))) => {
                    Some(lo + (hi - lo) * *db as f64 / (db + df) as f64)
                }
                _ => None,
            };
            (n.clone(), p)
        })
        .collect()
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    if parent[i] != i {
        let root = find(parent, parent[i]);
        parent[i] = root;
    }
    parent[i]
}

pub(crate) fn layout(g: &AnnotationGraph, opts: &RenderOptions) -> Result<Layout, RenderError> {
    // Coindex marks: class arcs vanish and their ids decorate whatever
    // they span.
    let mut marks: BTreeMap<Arc, Vec<String>> = BTreeMap::new();
    if !opts.class_types.is_empty() {
        let classes = resolve_equivalence_classes(g, &opts.class_types);
        for (label, _) in classes.classes() {
            for arc in classes.co_spanning(g, label) {
                marks.entry(arc).or_default().push(label.content().to_string());
            }
        }
    }

    let pos = node_positions(g);
    let mut spans: Vec<(&Arc, f64, f64)> = Vec::new();
    for arc in g.arcs() {
        if opts.class_types.contains(arc.label.type_()) {
            continue;
        }
        let (Some(lo), Some(hi)) = (pos[&arc.src], pos[&arc.dst]) else {
            return Err(RenderError::NotAnchored(encoding::line_for(g, arc)));
        };
        spans.push((arc, lo, hi));
    }

    // Rows: assigned types keep their indexes; the rest get fresh rows
    // ordered by decreasing mean span, then name.
    let mut mean: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for (arc, lo, hi) in &spans {
        let e = mean.entry(arc.label.type_()).or_insert((0.0, 0));
        e.0 += hi - lo;
        e.1 += 1;
    }
    let mut order: Vec<&str> = mean.keys().copied().collect();
    order.sort_by(|a, b| {
        let avg = |t: &str| {
            let (sum, n) = mean[t];
            sum / n as f64
        };
        avg(b).partial_cmp(&avg(a)).expect("finite spans").then(a.cmp(b))
    });
    let mut rows: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    let mut next = opts.level_assignment.values().map(|i| i + 1).max().unwrap_or(0);
    for t in order {
        match opts.level_assignment.get(t) {
            Some(i) => rows.entry(*i).or_default().push(t),
            None => {
                rows.entry(next).or_default().push(t);
                next += 1;
            }
        }
    }

    // Lanes: arcs chained through shared nodes stay together, so each
    // cluster packs its own lanes and whole clusters then stack
    // first-fit. A dialogue thus gets one lane per overlapping voice
    // rather than one per word.
    let mut strips = Vec::new();
    let mut rects = Vec::new();
    let mut edges: BTreeMap<&NodeId, BTreeSet<usize>> = BTreeMap::new();
    for types in rows.values() {
        let mut row_spans: Vec<&(&Arc, f64, f64)> = spans
            .iter()
            .filter(|(a, _, _)| types.contains(&a.label.type_()))
            .collect();
        row_spans.sort_by(|a, b| {
            a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)).then(a.0.cmp(b.0))
        });

        let mut parent: Vec<usize> = (0..row_spans.len()).collect();
        let mut owner: BTreeMap<&NodeId, usize> = BTreeMap::new();
        for (i, (arc, _, _)) in row_spans.iter().enumerate() {
            for end in [&arc.src, &arc.dst] {
                match owner.get(end) {
                    Some(&j) => {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                    None => {
                        owner.insert(end, i);
                    }
                }
            }
        }
        let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..row_spans.len() {
            let root = find(&mut parent, i);
            clusters.entry(root).or_default().push(i);
        }

        // lane within the cluster, then cluster -> band.
        let mut placed: Vec<(f64, f64, Vec<usize>, Vec<usize>)> = Vec::new();
        for members in clusters.values() {
            let lo = row_spans[members[0]].1;
            let mut hi = lo;
            let mut lanes: Vec<usize> = Vec::new();
            let mut lane_ends: Vec<f64> = Vec::new();
            for &i in members {
                let (_, s_lo, s_hi) = row_spans[i];
                hi = hi.max(*s_hi);
                let lane = match lane_ends.iter().position(|end| *end <= *s_lo) {
                    Some(l) => {
                        lane_ends[l] = *s_hi;
                        l
                    }
                    None => {
                        lane_ends.push(*s_hi);
                        lane_ends.len() - 1
                    }
                };
                lanes.push(lane);
            }
            placed.push((lo, hi, members.clone(), lanes));
        }
        placed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

        let mut bands: Vec<(f64, usize)> = Vec::new();
        let mut assignment: Vec<(usize, &Vec<usize>, &Vec<usize>)> = Vec::new();
        for (lo, hi, members, lanes) in &placed {
            let width = lanes.iter().max().expect("clusters are nonempty") + 1;
            let band = match bands.iter().position(|(end, _)| *end <= *lo) {
                Some(b) => {
                    bands[b] = (*hi, bands[b].1.max(width));
                    b
                }
                None => {
                    bands.push((*hi, width));
                    bands.len() - 1
                }
            };
            assignment.push((band, members, lanes));
        }
        let first_strip = strips.len();
        let mut band_base = vec![0usize; bands.len()];
        let mut offset = first_strip;
        for (b, (_, width)) in bands.iter().enumerate() {
            band_base[b] = offset;
            offset += width;
        }

        for (band, members, lanes) in assignment {
            for (&i, &lane) in members.iter().zip(lanes) {
                let (arc, lo, hi) = row_spans[i];
                let strip = band_base[band] + lane;
                let mut label = arc.label.content().to_string();
                if let Some(ids) = marks.get(arc) {
                    label.push('^');
                    label.push_str(&ids.join(","));
                }
                rects.push(Rect {
                    lo: *lo,
                    hi: *hi,
                    strip,
                    type_: arc.label.type_().to_string(),
                    label,
                });
                edges.entry(&arc.src).or_default().insert(strip);
                edges.entry(&arc.dst).or_default().insert(strip);
            }
        }
        for lane in first_strip..offset {
            strips.push(Strip {
                name: if lane == first_strip { types.join("+") } else { String::new() },
            });
        }
    }
    rects.sort_by(|a, b| {
        a.strip
            .cmp(&b.strip)
            .then(a.lo.total_cmp(&b.lo))
            .then(a.hi.total_cmp(&b.hi))
            .then(a.label.cmp(&b.label))
    });

    let mut connectors = Vec::new();
    for (node, at) in edges {
        if at.len() < 2 {
            continue;
        }
        let p = pos[node].expect("laid-out endpoints have positions");
        connectors.push(Connector { node: node.clone(), pos: p, strips: at });
    }

    Ok(Layout { strips, rects, connectors, times: g.anchor_times() })
}

/// Stable shading for a type: an FNV-1a pick from a fixed palette, the
/// same in every run and build.
pub(crate) fn stable_hash(type_: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in type_.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub(crate) const SHADES: [char; 6] = ['░', '▒', '▓', '·', '~', '='];

pub(crate) fn shade_char(type_: &str) -> char {
    SHADES[(stable_hash(type_) % SHADES.len() as u64) as usize]
}

pub(crate) fn fill_color(type_: &str) -> &'static str {
    const COLORS: [&str; 8] = [
        "#cfe8ff", "#ffd9b3", "#d6f5d6", "#f2d6f5", "#fff2b3", "#e0e0e0", "#ffcccc", "#ccf5f0",
    ];
    COLORS[(stable_hash(type_) % COLORS.len() as u64) as usize]
}
