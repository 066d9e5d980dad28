//! Structural checks plus configurable vocabulary and coverage rules.

use agraph::encoding::parse;
use agraph::import::{import_utf, ImportOptions};
use agraph::relations::RelationMode;
use agraph::typeorder::TypeOrder;
use agraph::validate::{
    parse_containment, parse_vocab, validate_content, validate_graph, validate_hierarchy,
    ValidationReport,
};
use agraph::AnchorClass;

fn main() {
    // A graph can parse and still be unusable downstream: here the
    // chain's interior never resolves to any time.
    let sloppy = parse("<1/0> W/a <2/>\n<2/> W/b <3/>\n").unwrap();
    let report = validate_graph(&sloppy, AnchorClass::Anchored);
    print!("{}", report.render());

    // Project-specific rules come from three small text files: closed
    // vocabularies, a type order, and containment requirements.
    let g = import_utf(
        include_str!("../data/hub4_97.utf"),
        &ImportOptions::default(),
    )
    .unwrap();
    let vocab = parse_vocab(include_str!("../data/vocab.txt")).unwrap();
    let order = TypeOrder::parse(include_str!("../data/typeorder.txt")).unwrap();
    let contain = parse_containment(include_str!("../data/contain.txt")).unwrap();

    let combined = ValidationReport::combine([
        validate_graph(&g, AnchorClass::Anchored),
        validate_content(&g, &vocab),
        validate_hierarchy(&g, &order, &contain, RelationMode::General),
    ]);
    if combined.is_clean() {
        println!("dialog transcript: clean");
    } else {
        print!("{}", combined.render());
        println!(
            "dialog transcript: {} finding(s), errors: {}",
            combined.findings().len(),
            combined.has_errors()
        );
    }
}
