//! One graph from each supported source format.
//!
//! Every reader produces the same in-memory structure, so everything
//! downstream (indexes, queries, rendering, the algebra) is format
//! agnostic. The summaries below print arc counts per label type, the
//! anchoring class, and the number of connected components.

use std::collections::BTreeMap;

use agraph::import::{
    import_callhome, import_chat, import_emu, import_lacito, import_ldc_bn, import_partitur,
    import_timit, import_utf, ImportOptions,
};
use agraph::AnnotationGraph;

fn summary(name: &str, g: &AnnotationGraph) {
    let mut per_type: BTreeMap<&str, usize> = BTreeMap::new();
    for a in g.arcs() {
        *per_type.entry(a.label.type_()).or_default() += 1;
    }
    let types: Vec<String> =
        per_type.iter().map(|(t, n)| format!("{n} {t}")).collect();
    println!(
        "{name:10} {:17} {} component(s), {}",
        g.classify_anchoring().to_string(),
        g.components().len(),
        types.join(", ")
    );
}

fn main() {
    let opts = ImportOptions::default();

    // Sample-addressed word and phone tiers; times become exact seconds
    // at the configured rate.
    let timit = import_timit(
        include_str!("../data/sa1.wrd"),
        include_str!("../data/sa1.phn"),
        &opts,
    )
    .unwrap();
    summary("timit", &timit);

    let partitur =
        import_partitur(include_str!("../data/verbmobil.par"), &opts).unwrap();
    summary("partitur", &partitur);

    // No time marks at all: each utterance is its own island.
    let chat = import_chat(include_str!("../data/boys73.cha"), &opts).unwrap();
    summary("chat", &chat);

    let lacito = import_lacito(include_str!("../data/hayu.xml"), &opts).unwrap();
    summary("lacito", &lacito);

    let bn = import_ldc_bn(include_str!("../data/hub4.sgml"), &opts).unwrap();
    summary("ldc-bn", &bn);

    let callhome =
        import_callhome(include_str!("../data/callhome.txt"), &opts).unwrap();
    summary("callhome", &callhome);

    let utf = import_utf(include_str!("../data/hub4_97.utf"), &opts).unwrap();
    summary("utf", &utf);

    let labels = BTreeMap::from([(
        "Phonetic".to_string(),
        include_str!("../data/Phonetic.lab").to_string(),
    )]);
    let emu =
        import_emu(include_str!("../data/emu_hierarchy.txt"), &labels, &opts).unwrap();
    summary("emu", &emu);
}
