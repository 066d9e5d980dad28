//! Annotation graphs for time-aligned linguistic data.
//!
//! An annotation graph is a labeled acyclic digraph whose nodes may carry
//! time offsets. Arcs mark up the timeline with typed content: words,
//! phones, speaker turns, discourse moves, gestures. The model stays
//! agnostic about what the labels mean, which is what lets one structure
//! hold transcriptions from very different tools side by side.
//!
//! The crate covers:
//!
//! - building and validating graphs ([`graph`], [`validate`])
//! - exact time arithmetic on decimal offsets ([`time`])
//! - temporal and structural relations, spans, and set algebra
//!   ([`relations`], [`algebra`])
//! - a flat, mergeable one-arc-per-line file format ([`encoding`])
//! - tabular and hierarchical indexes ([`index`])
//! - readers for common transcription formats ([`import`])
//! - querying ([`query`]) and visualisation ([`render`])
//! - a pipe-friendly batch command line ([`cli`], the `ag` binary)
//!
//! Each capability has a runnable demo under `examples/`; start with
//! `examples/build_and_inspect.rs`.

pub mod algebra;
pub mod classes;
pub mod cli;
pub mod encoding;
pub mod graph;
pub mod import;
pub mod index;
pub mod query;
pub mod relations;
pub mod render;
pub mod time;
pub mod typeorder;
pub mod validate;

pub use graph::{AnchorClass, AnnotationGraph, Arc, GraphError, Label, NodeId};
pub use time::TimeRef;
