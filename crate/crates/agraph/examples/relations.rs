//! Precedence and inclusion questions over a partially anchored graph,
//! and the `[glb, lub)` window that bounds each arc in time.

use agraph::encoding::{line_for, parse};
use agraph::NodeId;

const DIALOG: &str = include_str!("../data/utf.ag");

fn main() {
    let g = parse(DIALOG).expect("shipped tuples parse");
    let n = |id: &str| NodeId::new(id).unwrap();

    // Structural precedence follows arc chains only; the general
    // relation may also hop between anchored nodes by time.
    println!("s_precedes(21, 24) = {}", g.s_precedes(&n("21"), &n("24")).unwrap());
    println!("s_precedes(11, 21) = {}", g.s_precedes(&n("11"), &n("21")).unwrap());
    println!("  precedes(11, 21) = {}", g.precedes(&n("11"), &n("21")).unwrap());

    let arc = |content: &str| {
        g.arcs().find(|a| a.label.content() == content).unwrap().clone()
    };
    let well = arc("well");
    let i = arc("i");
    let gloria = arc("Gloria-Allred");
    println!(
        "\nspeaker arc s-includes W/well: {}",
        g.s_includes(&gloria, &well).unwrap()
    );
    println!(
        "W/well t-includes W/i: {} (unanchored ends)",
        g.t_includes(&well, &i).unwrap()
    );

    // Every arc gets a time window even when its own ends are untimed:
    // the nearest anchored material before and after bounds it.
    println!();
    for a in g.arcs() {
        let lo = g.glb(a).unwrap().map_or("?".into(), |t| t.text().to_string());
        let hi = g.lub(a).unwrap().map_or("?".into(), |t| t.text().to_string());
        println!("[{lo:>8}, {hi:>8})  {}", line_for(&g, a));
    }
}
