//! Readers that turn published transcription formats into graphs.
//!
//! Eight formats are covered: TIMIT word/phone files, BAS Partitur tiers,
//! CHAT transcripts, LACITO archive XML, LDC Broadcast News SGML, LDC
//! CALLHOME telephone transcripts, NIST UTF markup, and Emu hierarchies
//! with xwaves label files. Each reader is a pure text-to-graph function;
//! anything it cannot interpret is an error, never silently dropped.
//!
//! Conventions shared by all readers: sample counts and milliseconds are
//! converted to seconds by exact rational division, word tokens become
//! `W/` arcs, and a speaker's material is attributed with a `speaker/`
//! arc spanning the turn rather than by replicating types per speaker.

mod markup;

pub(crate) mod callhome;
mod chat;
mod emu;
mod lacito;
mod ldc_bn;
mod partitur;
pub(crate) mod timit;
pub(crate) mod utf;

pub use callhome::import_callhome;
pub use chat::{import_chat, import_chat_with_meta};
pub use emu::import_emu;
pub use lacito::import_lacito;
pub use ldc_bn::import_ldc_bn;
pub use partitur::import_partitur;
pub use timit::import_timit;
pub use utf::import_utf;

use std::collections::BTreeMap;

use crate::graph::GraphError;

/// Knobs shared across the readers.
#[derive(Clone, Debug)]
pub struct ImportOptions {
    /// Samples per second for sample-addressed formats.
    pub sample_rate: u64,
    /// Join adjacent same-speaker stretches into one turn, keeping the
    /// extra time marks as anchored nodes.
    pub merge_same_speaker: bool,
    /// Source tier or level name to label type. Unmapped names pass
    /// through unchanged.
    pub type_prefix_map: BTreeMap<String, String>,
}

impl Default for ImportOptions {
    fn default() -> Self {
        ImportOptions {
            sample_rate: 16_000,
            merge_same_speaker: true,
            type_prefix_map: BTreeMap::new(),
        }
    }
}

impl ImportOptions {
    fn mapped_type<'a>(&'a self, name: &'a str) -> &'a str {
        self.type_prefix_map.get(name).map(String::as_str).unwrap_or(name)
    }

    /// Type for a source tier whose conventional short form differs from
    /// its tier name, e.g. Partitur KAN is written `K/`.
    fn mapped_or<'a>(&'a self, tier: &str, default: &'a str) -> &'a str {
        self.type_prefix_map.get(tier).map(String::as_str).unwrap_or(default)
    }
}

/// Generator for node ids where the source names no boundary.
#[derive(Default)]
pub(crate) struct Fresh(usize);

impl Fresh {
    pub(crate) fn next(&mut self) -> crate::graph::NodeId {
        let id = crate::graph::NodeId::new(format!("n{}", self.0)).expect("generated id");
        self.0 += 1;
        id
    }
}

/// Errors from reading a source format.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImportError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: span runs backwards ({start} >= {end})")]
    NonMonotonicSpan { line: usize, start: u64, end: u64 },
    #[error("{tier} tier references anchor {anchor}, which no KAN line declares")]
    DanglingAnchor { tier: String, anchor: i64 },
    #[error("line {line}: dependent tier has no utterance to attach to")]
    OrphanDependentTier { line: usize },
    #[error("transcription has {transcription} words but the gloss has {gloss}")]
    AlignmentMismatch { transcription: usize, gloss: usize },
    #[error("markup error: {0}")]
    Xml(String),
    #[error("sync time {time} precedes an earlier boundary")]
    NonMonotonicSync { time: String },
    #[error("unbalanced {0} tag")]
    UnbalancedTag(String),
    #[error("dominance line references undeclared id {id}")]
    DanglingDominance { id: String },
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ImportError {
    fn syntax(line: usize, message: impl Into<String>) -> ImportError {
        ImportError::Syntax { line, message: message.into() }
    }
}
