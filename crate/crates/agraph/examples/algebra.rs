//! Set operations over graphs that share a time base, and equivalence
//! classes linking arcs that carry one coindexing label.

use std::collections::BTreeSet;

use agraph::algebra::{intersection, relative_complement, union};
use agraph::classes::resolve_equivalence_classes;
use agraph::encoding::{parse, serialize};

fn main() {
    // Two annotators over the same recording: they agree on the first
    // word and differ afterwards.
    let ann1 = parse("<1/0> W/hello <2/0.8>\n<2/0.8> W/word <3/1.5>\n").unwrap();
    let ann2 = parse("<1/0> W/hello <2/0.8>\n<2/0.8> W/world <3/1.5>\n").unwrap();

    println!("union:\n{}", serialize(&union(&ann1, &ann2).unwrap()));
    println!("agreed:\n{}", serialize(&intersection(&ann1, &ann2).unwrap()));
    println!(
        "only first:\n{}",
        serialize(&relative_complement(&ann1, &ann2).unwrap())
    );

    // A gestural tier coindexed with the word licensing it: the class
    // label `license/w35` appears on the word span and on each gesture.
    let score = parse(
        "\
<1/0> W/ten <4/0.6>
<1/0> license/w35 <4/0.6>
<1/0> G/tongue-tip <2/>
<2/> G/closure <3/>
<1/0> license/w35 <2/>
<2/> license/w35 <3/>
",
    )
    .unwrap();
    let classes =
        resolve_equivalence_classes(&score, &BTreeSet::from(["license".to_string()]));
    for (label, members) in classes.classes() {
        println!("class {label}: {} spans", members.len());
        for arc in classes.co_spanning(&score, label) {
            println!("  carries {}", arc.label);
        }
    }
}
