//! The three derived access structures over one dialog fragment: by
//! time interval, by type, and by dominance under a type order.
//!
//! Each rendering is itself parseable tuple text (plus layout), so an
//! index can be shipped next to the data it indexes.

use agraph::encoding::parse;
use agraph::index::{HierarchyIndex, TimeLocalIndex, TypeLocalIndex};
use agraph::typeorder::TypeOrder;

const DIALOG: &str = include_str!("../data/utf.ag");
const ORDER: &str = include_str!("../data/typeorder.txt");

fn main() {
    let g = parse(DIALOG).expect("shipped tuples parse");

    let time = TimeLocalIndex::build(&g).unwrap();
    println!("== by time interval ==");
    print!("{}", time.render());

    let types = TypeLocalIndex::build(&g).unwrap();
    println!("\n== by type ==");
    print!("{}", types.render());

    let order = TypeOrder::parse(ORDER).unwrap();
    let hier = HierarchyIndex::build(&g, &order).unwrap();
    println!("\n== by dominance ({}) ==", {
        let pairs: Vec<String> =
            order.pairs().map(|(hi, lo)| format!("{hi} > {lo}")).collect();
        pairs.join(", ")
    });
    print!("{}", hier.render());

    // Overlap queries ride on the time index: collect everything sharing
    // an interval with the word, then refine as needed.
    let country = g.arcs().find(|a| a.label.content() == "country").unwrap();
    println!("\narcs overlapping W/country:");
    for a in time.overlapping_arcs(country).unwrap() {
        println!("  {}", a.label);
    }
}
