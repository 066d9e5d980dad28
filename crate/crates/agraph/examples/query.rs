//! Select subgraphs with predicates, written as text or built from
//! combinators. Every selection is itself a well-formed graph.

use agraph::encoding::{parse, serialize};
use agraph::import::{import_utf, ImportOptions};
use agraph::query::{select, select_indexed, Predicate};
use agraph::index::{TimeLocalIndex, TypeLocalIndex};

fn main() {
    let g = import_utf(
        include_str!("../data/hub4_97.utf"),
        &ImportOptions::default(),
    )
    .unwrap();

    // The textual form: `|` over `&` over `!`, with parentheses.
    let p = Predicate::parse(r#"type=W & content~"^re""#).unwrap();
    println!("words starting in re:");
    print!("{}", serialize(&select(&g, &p).unwrap()));

    // Combinators build the same predicates programmatically.
    let turns = Predicate::LabelType("speaker".into())
        .or(Predicate::LabelType("spkrtype".into()));
    println!("\nturn material:");
    print!("{}", serialize(&select(&g, &turns).unwrap()));

    // Anchored predicates take an arc from the graph itself: here,
    // everything overlapping one word in time.
    let country = g
        .arcs()
        .find(|a| a.label.type_() == "W" && a.label.content() == "country")
        .unwrap()
        .clone();
    let nearby = Predicate::Overlaps(country).and(Predicate::LabelType("W".into()));
    let time = TimeLocalIndex::build(&g).unwrap();
    let types = TypeLocalIndex::build(&g).unwrap();
    let hits = select_indexed(&g, &time, &types, &nearby).unwrap();
    println!("\nwords overlapping W/country:");
    print!("{}", serialize(&hits));

    // A selection round-trips like any other graph.
    let text = serialize(&hits);
    assert_eq!(parse(&text).unwrap().arc_set(), hits.arc_set());
}
