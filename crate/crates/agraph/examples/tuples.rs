//! Parse tuple text, serialize it canonically, merge fragments, and
//! diff two revisions.
//!
//! Run with `cargo run --example tuples`.

use agraph::encoding::{delta, merge, parse, serialize};

const DIALOG: &str = include_str!("../data/utf.ag");

fn main() {
    let g = parse(DIALOG).expect("shipped tuples parse");
    println!(
        "{} arcs over {} nodes, {} anchored, {}",
        g.arc_count(),
        g.node_count(),
        g.anchors().len(),
        g.classify_anchoring()
    );

    // Serialization sorts the lines, so it is canonical: any reordering
    // of the input produces the same bytes.
    println!("\ncanonical form:\n{}", serialize(&g));

    // Merging is concatenation. A fragment can re-mention a node as long
    // as it never contradicts the time already on record.
    let more = "<24/> W/that <26/>\n<26/> W/you <27/>\n";
    let merged = merge([DIALOG, more]).expect("fragments agree");
    println!("after merge: {} arcs", merged.arc_count());

    // A diff is just added and removed lines; applying it to the old
    // graph yields the new one.
    let d = delta(&g, &merged);
    print!("{}", d.render());
}
