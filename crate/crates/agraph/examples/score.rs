//! Score notation: one row of rectangles per label type over a shared
//! timeline, as plain text or SVG.

use agraph::encoding::parse;
use agraph::import::{import_timit, ImportOptions};
use agraph::render::{check_rightward_planar, render_score, OutputFormat, RenderOptions};

const DIALOG: &str = include_str!("../data/utf.ag");

fn main() {
    let words = import_timit(
        include_str!("../data/sa1.wrd"),
        include_str!("../data/sa1.phn"),
        &ImportOptions::default(),
    )
    .unwrap();
    let mut opts = RenderOptions { width: 110, ..RenderOptions::default() };
    println!("{}", render_score(&words, &opts).unwrap());

    // Partially anchored material still lays out: untimed nodes sit
    // between the nearest anchored times on either side.
    let dialog = parse(DIALOG).unwrap();
    println!("{}", render_score(&dialog, &opts).unwrap());
    println!(
        "rightward-planar: {}",
        if check_rightward_planar(&dialog) { "yes" } else { "no" }
    );

    opts.output = OutputFormat::Svg;
    let svg = render_score(&dialog, &opts).unwrap();
    println!("svg: {} bytes, starts {}", svg.len(), &svg[..38]);
}
