//! Seeded random graphs and brute-force oracles for the integration
//! suites. The oracles only look at the public arc list and anchor map,
//! recomputing every relation from scratch, so agreement with the
//! library is meaningful.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use agraph::{AnnotationGraph, Arc, Label, NodeId, TimeRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn node(i: usize) -> NodeId {
    NodeId::new(format!("n{i:02}")).unwrap()
}

const CONTENTS: [&str; 6] = ["ok", "a b", "50%", "x<y>", "née", ""];

/// A valid graph with up to `max_nodes` nodes: forward arcs over a
/// non-decreasing time walk (repeats allowed, so instants occur), a
/// random subset of nodes anchored, contents that exercise escaping.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> AnnotationGraph {
    let n = rng.random_range(2..=max_nodes);
    let mut walk = 0u64;
    let mut times = Vec::with_capacity(n);
    for _ in 0..n {
        times.push(walk);
        walk += rng.random_range(0..=2);
    }
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.3) {
                let type_ = ["W", "P", "T"][rng.random_range(0..3)];
                let content = CONTENTS[rng.random_range(0..CONTENTS.len())];
                arcs.push(Arc::new(node(i), Label::new(type_, content).unwrap(), node(j)));
            }
        }
    }
    let anchors: Vec<(NodeId, TimeRef)> = (0..n)
        .filter(|_| rng.random_bool(0.7))
        .map(|i| (node(i), TimeRef::from_secs(times[i])))
        .collect();
    AnnotationGraph::build(arcs, anchors).expect("forward arcs over a monotone walk are valid")
}

/// Node precedence by matrix closure: the reflexive-free transitive
/// closure of arc steps unioned with strict anchored-time order.
pub struct PrecedesOracle {
    index: BTreeMap<NodeId, usize>,
    closed: Vec<Vec<bool>>,
}

impl PrecedesOracle {
    pub fn new(g: &AnnotationGraph) -> PrecedesOracle {
        let nodes: Vec<&NodeId> = g.nodes().collect();
        let index: BTreeMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, n)| ((*n).clone(), i)).collect();
        let n = nodes.len();
        let mut m = vec![vec![false; n]; n];
        for arc in g.arcs() {
            m[index[&arc.src]][index[&arc.dst]] = true;
        }
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate() {
                if let (Some(ta), Some(tb)) = (g.time_of(a), g.time_of(b)) {
                    if ta < tb {
                        m[i][j] = true;
                    }
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if m[i][k] && m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
        PrecedesOracle { index, closed: m }
    }

    pub fn precedes(&self, a: &NodeId, b: &NodeId) -> bool {
        a != b && self.closed[self.index[a]][self.index[b]]
    }
}

fn neighbours<'g>(g: &'g AnnotationGraph, of: &NodeId, forward: bool) -> Vec<&'g NodeId> {
    g.arcs()
        .filter_map(|a| {
            if forward && a.src == *of {
                Some(&a.dst)
            } else if !forward && a.dst == *of {
                Some(&a.src)
            } else {
                None
            }
        })
        .collect()
}

fn reachable_or_self(g: &AnnotationGraph, start: &NodeId, forward: bool) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = vec![start.clone()];
    while let Some(x) = queue.pop() {
        for next in neighbours(g, &x, forward) {
            if seen.insert(next.clone()) {
                queue.push(next.clone());
            }
        }
    }
    seen
}

/// Arc-step reachability recomputed from the arc list alone.
pub fn reaches_or_is(g: &AnnotationGraph, from: &NodeId, to: &NodeId) -> bool {
    reachable_or_self(g, from, true).contains(to)
}

/// Greatest anchored time among the source's ancestors (or itself).
pub fn glb_oracle(g: &AnnotationGraph, arc: &Arc) -> Option<TimeRef> {
    reachable_or_self(g, &arc.src, false)
        .into_iter()
        .filter_map(|n| g.time_of(&n).cloned())
        .max()
}

/// Least anchored time among the destination's descendants (or itself).
pub fn lub_oracle(g: &AnnotationGraph, arc: &Arc) -> Option<TimeRef> {
    reachable_or_self(g, &arc.dst, true)
        .into_iter()
        .filter_map(|n| g.time_of(&n).cloned())
        .min()
}
