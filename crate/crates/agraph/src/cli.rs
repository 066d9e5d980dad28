//! Batch front end behind the `ag` binary.
//!
//! One workflow per invocation: import a corpus format, validate, build
//! an index, query, merge, diff, or render. Results go to standard
//! output, diagnostics to standard error, and every command reads
//! standard input where a file name is `-` (or when no files are
//! given), so commands chain with pipes:
//!
//! ```text
//! ag import --format timit sa1.wrd sa1.phn | ag query 'type=W' | ag render --width 72
//! ```
//!
//! Exit codes: 0 on success, 1 when validation reports error-severity
//! findings or the data cannot support the request, 2 for usage and
//! syntax errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::encoding;
use crate::graph::{AnchorClass, AnnotationGraph};
use crate::import::{
    import_callhome, import_chat, import_emu, import_lacito, import_ldc_bn, import_partitur,
    import_timit, import_utf, ImportOptions,
};
use crate::index::{HierarchyIndex, TimeLocalIndex, TypeLocalIndex};
use crate::query::{self, Predicate};
use crate::relations::RelationMode;
use crate::render::{render_score, OutputFormat, RenderOptions};
use crate::typeorder::TypeOrder;
use crate::validate;

#[derive(Parser)]
#[command(name = "ag", version, about = "Annotation graph toolkit", max_term_width = 80)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Read a corpus format and write canonical tuple text
    Import(ImportArgs),
    /// Check structure, and content or coverage where rules are given
    Validate(ValidateArgs),
    /// Build an index over tuple text and print its table
    Index(IndexArgs),
    /// Keep the arcs matching an expression, as tuple text
    Query(QueryArgs),
    /// Union any number of tuple files
    Merge(MergeArgs),
    /// Arc- and anchor-level difference between two tuple files
    Diff(DiffArgs),
    /// Draw the score view
    Render(RenderArgs),
}

#[derive(Args)]
struct ImportArgs {
    /// Source format
    #[arg(long, value_enum)]
    format: Format,
    /// Samples per second for sample-addressed formats
    #[arg(long, default_value_t = 16_000)]
    rate: u64,
    /// Join adjacent same-speaker stretches into one turn
    #[arg(long)]
    merge_speaker: bool,
    /// Source files; `-` reads standard input
    files: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// `TYPE: item item ...` lines constraining label content
    #[arg(long)]
    vocab: Option<String>,
    /// `HIGH > LOW` lines; lower types must be covered by higher arcs
    #[arg(long)]
    order: Option<String>,
    /// `OUTER contains INNER` coverage rules
    #[arg(long)]
    contain: Option<String>,
    files: Vec<String>,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long, value_enum)]
    kind: IndexKind,
    /// `HIGH > LOW` lines for the hierarchy kind
    #[arg(long)]
    order: Option<String>,
    files: Vec<String>,
}

#[derive(Args)]
struct QueryArgs {
    /// Predicate such as `type=W & content~"^th"`
    expr: String,
    files: Vec<String>,
}

#[derive(Args)]
struct MergeArgs {
    files: Vec<String>,
}

#[derive(Args)]
struct DiffArgs {
    old: String,
    new: String,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, value_enum, default_value_t = RenderFormat::Text)]
    format: RenderFormat,
    /// Total width in character cells
    #[arg(long, default_value_t = 100)]
    width: usize,
    files: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Timit,
    Partitur,
    Chat,
    Lacito,
    LdcBn,
    Callhome,
    Utf,
    Emu,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexKind {
    Time,
    Type,
    Hierarchy,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderFormat {
    Text,
    Svg,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn data(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

/// Runs one command line. `argv[0]` is the program name, as in
/// `std::env::args`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(cli.cmd, stdout) {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(stderr, "ag: {message}");
            code
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Cmd::Import(a) => do_import(a, out),
        Cmd::Validate(a) => do_validate(a, out),
        Cmd::Index(a) => do_index(a, out),
        Cmd::Query(a) => do_query(a, out),
        Cmd::Merge(a) => {
            let g = load_graph(&a.files)?;
            emit(out, &encoding::serialize(&g))
        }
        Cmd::Diff(a) => {
            let old = load_graph(std::slice::from_ref(&a.old))?;
            let new = load_graph(std::slice::from_ref(&a.new))?;
            emit(out, &encoding::delta(&old, &new).render())
        }
        Cmd::Render(a) => do_render(a, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<i32, Failure> {
    out.write_all(text.as_bytes()).map_err(|e| data(format!("standard output: {e}")))?;
    Ok(0)
}

fn read_input(name: &str) -> Result<String, Failure> {
    if name == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| usage(format!("standard input: {e}")))?;
        Ok(text)
    } else {
        fs::read_to_string(name).map_err(|e| usage(format!("{name}: {e}")))
    }
}

fn named_inputs(files: &[String]) -> Result<Vec<(String, String)>, Failure> {
    let names: Vec<String> =
        if files.is_empty() { vec!["-".into()] } else { files.to_vec() };
    names
        .into_iter()
        .map(|n| read_input(&n).map(|text| (n, text)))
        .collect()
}

/// Reads tuple text from every file (standard input by default) and
/// merges it into one graph.
fn load_graph(files: &[String]) -> Result<AnnotationGraph, Failure> {
    let inputs = named_inputs(files)?;
    encoding::merge(inputs.iter().map(|(_, text)| text.as_str()))
        .map_err(|e| usage(e.to_string()))
}

fn do_import(a: ImportArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = ImportOptions {
        sample_rate: a.rate,
        merge_same_speaker: a.merge_speaker,
        ..ImportOptions::default()
    };
    let inputs = named_inputs(&a.files)?;
    let one = || -> Result<&str, Failure> {
        match &inputs[..] {
            [(_, text)] => Ok(text),
            _ => Err(usage("this format takes exactly one input")),
        }
    };
    let g = match a.format {
        Format::Timit => {
            // Word and phone files tell apart by extension; anything
            // else fills the two roles in order.
            let (mut wrd, mut phn) = (Vec::new(), Vec::new());
            for (name, text) in &inputs {
                match Path::new(name).extension().and_then(|e| e.to_str()) {
                    Some("wrd") => wrd.push(text.as_str()),
                    Some("phn") => phn.push(text.as_str()),
                    _ if wrd.is_empty() => wrd.push(text),
                    _ => phn.push(text),
                }
            }
            import_timit(&wrd.concat(), &phn.concat(), &opts)
        }
        Format::Emu => {
            // First input is the hierarchy; label files key by stem,
            // which must match a declared level.
            let [(_, hierarchy), labels @ ..] = &inputs[..] else {
                return Err(usage("emu takes a hierarchy file, then label files"));
            };
            let mut texts = BTreeMap::new();
            for (name, text) in labels {
                let stem = Path::new(name)
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| usage(format!("{name}: no usable stem")))?;
                texts.insert(stem.to_string(), text.clone());
            }
            import_emu(hierarchy, &texts, &opts)
        }
        Format::Partitur => import_partitur(one()?, &opts),
        Format::Chat => import_chat(one()?, &opts),
        Format::Lacito => import_lacito(one()?, &opts),
        Format::LdcBn => import_ldc_bn(one()?, &opts),
        Format::Callhome => import_callhome(one()?, &opts),
        Format::Utf => import_utf(one()?, &opts),
    }
    .map_err(|e| usage(e.to_string()))?;
    emit(out, &encoding::serialize(&g))
}

fn do_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = load_graph(&a.files)?;
    let mut reports = vec![validate::validate_graph(&g, AnchorClass::Anchored)];
    if let Some(path) = &a.vocab {
        let vocab = validate::parse_vocab(&read_input(path)?)
            .map_err(|e| usage(format!("{path}: {e}")))?;
        reports.push(validate::validate_content(&g, &vocab));
    }
    if a.order.is_some() || a.contain.is_some() {
        let order = match &a.order {
            Some(path) => TypeOrder::parse(&read_input(path)?)
                .map_err(|e| usage(format!("{path}: {e}")))?,
            None => TypeOrder::empty(),
        };
        let contain = match &a.contain {
            Some(path) => validate::parse_containment(&read_input(path)?)
                .map_err(|e| usage(format!("{path}: {e}")))?,
            None => Vec::new(),
        };
        reports.push(validate::validate_hierarchy(&g, &order, &contain, RelationMode::General));
    }
    let report = validate::ValidationReport::combine(reports);
    let errors = report.has_errors();
    emit(out, &report.render())?;
    Ok(if errors { 1 } else { 0 })
}

fn do_index(a: IndexArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = load_graph(&a.files)?;
    let table = match a.kind {
        IndexKind::Time => TimeLocalIndex::build(&g).map_err(|e| data(e.to_string()))?.render(),
        IndexKind::Type => TypeLocalIndex::build(&g).map_err(|e| data(e.to_string()))?.render(),
        IndexKind::Hierarchy => {
            let order = match &a.order {
                Some(path) => TypeOrder::parse(&read_input(path)?)
                    .map_err(|e| usage(format!("{path}: {e}")))?,
                None => TypeOrder::empty(),
            };
            HierarchyIndex::build(&g, &order).map_err(|e| data(e.to_string()))?.render()
        }
    };
    emit(out, &table)
}

fn do_query(a: QueryArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = Predicate::parse(&a.expr).map_err(|e| usage(e.to_string()))?;
    let g = load_graph(&a.files)?;
    let hits = query::select(&g, &p).map_err(|e| data(e.to_string()))?;
    emit(out, &encoding::serialize(&hits))
}

fn do_render(a: RenderArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = load_graph(&a.files)?;
    let opts = RenderOptions {
        output: match a.format {
            RenderFormat::Text => OutputFormat::Text,
            RenderFormat::Svg => OutputFormat::Svg,
        },
        width: a.width,
        ..RenderOptions::default()
    };
    emit(out, &render_score(&g, &opts).map_err(|e| data(e.to_string()))?)
}
