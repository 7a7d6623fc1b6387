//! `defclust` command-line front end.
//!
//! Exit statuses: 0 on success, 1 on usage errors, 2 on data or I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use defclust_core::distance::{energy_matrix, write_distance_csv, write_energy_csv};
use defclust_core::eval::{write_sweep_csv, write_zone_summary};
use defclust_core::patterns::{default_templates, parse_templates, write_candidates_jsonl};
use defclust_core::report::write_cluster_report;
use defclust_core::{
    candidates_to_corpus, classify_zone, cut_at_threshold, evaluate, expand_patterns,
    identify_intruders, load_corpus, prepare, run_sweep, scan_text, ClusteringRecord,
    CorpusFormat, DistanceKind, DistanceMode, Document, GoldAnnotation, SweepGrid, Tokenizer,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "defclust", version, about = "Cluster short definitions with the textual-energy distance")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract candidate definitional contexts from text files
    Extract(ExtractArgs),
    /// Cluster a corpus at one threshold and write the groups as JSON
    Cluster(ClusterArgs),
    /// Sweep the threshold grid and write precision/recall per threshold as CSV
    Sweep(SweepArgs),
    /// Score an existing clustering JSON against gold senses
    Eval(EvalArgs),
    /// Print the groups of a corpus at one threshold in readable form
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Distance between documents
    #[arg(long, default_value = "energy")]
    pub distance: DistanceKind,

    /// Orientation of the energy distance
    #[arg(long = "distance-mode", default_value = "inverted")]
    pub distance_mode: DistanceMode,

    /// Corpus file format: jsonl or plain_lines
    #[arg(long, default_value = "jsonl")]
    pub format: CorpusFormat,

    /// Stopword file, one token per line
    #[arg(long)]
    pub stopwords: Option<PathBuf>,

    /// Multi-word lexical entities, one per line
    #[arg(long)]
    pub phrases: Option<PathBuf>,

    /// Remove each document's own defined term from its entities
    #[arg(long)]
    pub drop_term: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Text files to scan; the file name is the source id
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Term to instantiate the templates with (repeatable)
    #[arg(long = "term", required = true)]
    pub terms: Vec<String>,

    /// Template file, `surface<TAB>def_type` per line (default: bundled Spanish list)
    #[arg(long)]
    pub patterns: Option<PathBuf>,

    /// Emit corpus documents (id, text, term, def_type) instead of raw candidates
    #[arg(long)]
    pub as_corpus: bool,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    pub corpus: PathBuf,

    /// Distance threshold in [0, 1]; merges at distance <= alpha are applied
    #[arg(long, required = true)]
    pub alpha: f64,

    /// Smallest group that is reported
    #[arg(long = "min-size", default_value_t = 2)]
    pub min_size: usize,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Also write the merge list as CSV
    #[arg(long)]
    pub dendrogram: Option<PathBuf>,

    /// Also write the pairwise distances as `id_i,id_j,distance` CSV
    #[arg(long)]
    pub dump_distances: Option<PathBuf>,

    /// Also write the energy matrix as CSV
    #[arg(long)]
    pub dump_energy: Option<PathBuf>,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub corpus: PathBuf,

    /// Gold senses as `{"id","sense"}` JSONL (default: the corpus `gold_sense` fields)
    pub gold: Option<PathBuf>,

    /// Threshold grid START:END:STEP
    #[arg(long, default_value = "0.01:1.00:0.01")]
    pub grid: SweepGrid,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Skip the per-zone summary on stderr
    #[arg(long)]
    pub quiet: bool,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Clustering JSON as written by `cluster`
    pub clustering: PathBuf,

    /// Gold senses as `{"id","sense"}` JSONL
    pub gold: PathBuf,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub corpus: PathBuf,

    #[arg(long, required = true)]
    pub alpha: f64,

    /// Gold senses; flags intruders when given (default: corpus `gold_sense` fields, if any)
    #[arg(long)]
    pub gold: Option<PathBuf>,

    #[arg(long = "min-size", default_value_t = 2)]
    pub min_size: usize,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&config) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<defclust_core::Error> for CliError {
    fn from(e: defclust_core::Error) -> Self {
        CliError::Data(e.into())
    }
}

pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    match &config.command {
        Command::Extract(a) => extract(a),
        Command::Cluster(a) => cluster(a),
        Command::Sweep(a) => sweep(a),
        Command::Eval(a) => eval(a),
        Command::Report(a) => report(a),
    }
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CliError::Usage(format!("--alpha must be in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn check_min_size(min_size: usize) -> Result<(), CliError> {
    if min_size == 0 {
        return Err(CliError::Usage("--min-size must be at least 1".into()));
    }
    Ok(())
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout when `path` is `None`.
fn emit<F>(path: Option<&Path>, write: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut dyn Write) -> anyhow::Result<()>,
{
    match path {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))?;
            {
                let mut buf = io::BufWriter::new(tmp.as_file_mut());
                write(&mut buf)?;
                buf.flush()?;
            }
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(())
}

fn load_docs(path: &Path, pipeline: &PipelineArgs) -> anyhow::Result<(Vec<Document>, Tokenizer)> {
    let docs = load_corpus(path, pipeline.format)
        .with_context(|| format!("loading corpus {}", path.display()))?;
    if docs.is_empty() {
        bail!("{}: corpus is empty", path.display());
    }
    let tok = Tokenizer::from_files(pipeline.stopwords.as_deref(), pipeline.phrases.as_deref())?
        .drop_defined_term(pipeline.drop_term);
    Ok((docs, tok))
}

fn load_gold(path: Option<&Path>, docs: &[Document]) -> anyhow::Result<GoldAnnotation> {
    match path {
        Some(p) => Ok(GoldAnnotation::load(p)?),
        None => Ok(GoldAnnotation::from_documents(docs)),
    }
}

fn extract(a: &ExtractArgs) -> Result<(), CliError> {
    let templates = match &a.patterns {
        Some(p) => {
            let src = fs::read_to_string(p)
                .with_context(|| format!("reading patterns {}", p.display()))?;
            parse_templates(&src).with_context(|| format!("parsing patterns {}", p.display()))?
        }
        None => default_templates(),
    };
    let terms: Vec<&str> = a.terms.iter().map(String::as_str).collect();
    let patterns = expand_patterns(&templates, &terms).map_err(|e| CliError::Usage(e.to_string()))?;

    let mut cands = Vec::new();
    for input in &a.inputs {
        let text = fs::read_to_string(input)
            .with_context(|| format!("reading {}", input.display()))?;
        let source_id = input
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| input.display().to_string());
        cands.extend(scan_text(&text, &source_id, &patterns));
    }

    if a.as_corpus {
        let (docs, skipped) = candidates_to_corpus(&cands);
        if skipped > 0 {
            eprintln!("warning: {skipped} candidates with an empty definition skipped");
        }
        emit(a.output.as_deref(), |out| {
            for d in &docs {
                serde_json::to_writer(&mut *out, d)?;
                writeln!(out)?;
            }
            Ok(())
        })?;
    } else {
        emit(a.output.as_deref(), |out| Ok(write_candidates_jsonl(&cands, out)?))?;
    }
    Ok(())
}

fn cluster(a: &ClusterArgs) -> Result<(), CliError> {
    check_alpha(a.alpha)?;
    check_min_size(a.min_size)?;
    let (docs, tok) = load_docs(&a.corpus, &a.pipeline)?;
    let prepared = prepare(&docs, &tok, a.pipeline.distance, a.pipeline.distance_mode)?;
    let clustering = cut_at_threshold(&prepared.dendrogram, a.alpha, a.min_size)?;

    if let Some(p) = &a.dendrogram {
        emit(Some(p), |out| Ok(prepared.dendrogram.write_csv(out)?))?;
    }
    if let Some(p) = &a.dump_distances {
        emit(Some(p), |out| Ok(write_distance_csv(&prepared.distances, prepared.ids(), out)?))?;
    }
    if let Some(p) = &a.dump_energy {
        let e = energy_matrix(&prepared.matrix)?;
        emit(Some(p), |out| Ok(write_energy_csv(&e, prepared.ids(), out)?))?;
    }

    let record = clustering.to_record(prepared.ids());
    emit(a.output.as_deref(), |out| {
        serde_json::to_writer(&mut *out, &record)?;
        writeln!(out)?;
        Ok(())
    })?;
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<(), CliError> {
    let (docs, tok) = load_docs(&a.corpus, &a.pipeline)?;
    let gold = load_gold(a.gold.as_deref(), &docs)?;
    if gold.is_empty() {
        return Err(CliError::Usage(
            "sweep needs gold senses: pass a gold file or add gold_sense to the corpus".into(),
        ));
    }
    let prepared = prepare(&docs, &tok, a.pipeline.distance, a.pipeline.distance_mode)?;
    let rows = run_sweep(&prepared.dendrogram, docs.len(), &gold, prepared.ids(), &a.grid)?;
    emit(a.output.as_deref(), |out| Ok(write_sweep_csv(&rows, out)?))?;
    if !a.quiet {
        write_zone_summary(&rows, io::stderr()).context("writing summary")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    alpha: f64,
    num_groups: usize,
    precision: f64,
    recall: f64,
    zone: &'static str,
    intruders: Vec<&'a str>,
}

fn eval(a: &EvalArgs) -> Result<(), CliError> {
    let raw = fs::read_to_string(&a.clustering)
        .with_context(|| format!("reading {}", a.clustering.display()))?;
    let record: ClusteringRecord = serde_json::from_str(&raw)
        .with_context(|| format!("parsing clustering {}", a.clustering.display()))?;
    let (clustering, ids) = record.to_clustering()?;
    if ids.is_empty() {
        return Err(anyhow::anyhow!("{}: clustering has no items", a.clustering.display()).into());
    }
    let gold = GoldAnnotation::load(&a.gold)?;
    let row = evaluate(&clustering, ids.len(), &gold, &ids)?;
    let intruders = identify_intruders(&clustering, &gold, &ids)?;
    let out_rec = EvalOutput {
        alpha: row.alpha,
        num_groups: row.num_groups,
        precision: row.precision,
        recall: row.recall,
        zone: classify_zone(row.alpha).as_str(),
        intruders: intruders.iter().map(|&i| ids[i].as_str()).collect(),
    };
    emit(a.output.as_deref(), |out| {
        serde_json::to_writer(&mut *out, &out_rec)?;
        writeln!(out)?;
        Ok(())
    })?;
    Ok(())
}

fn report(a: &ReportArgs) -> Result<(), CliError> {
    check_alpha(a.alpha)?;
    check_min_size(a.min_size)?;
    let (docs, tok) = load_docs(&a.corpus, &a.pipeline)?;
    let gold = load_gold(a.gold.as_deref(), &docs)?;
    let prepared = prepare(&docs, &tok, a.pipeline.distance, a.pipeline.distance_mode)?;
    let clustering = cut_at_threshold(&prepared.dendrogram, a.alpha, a.min_size)?;
    let gold = (!gold.is_empty()).then_some(&gold);
    emit(a.output.as_deref(), |out| {
        write_cluster_report(&clustering, &docs, gold, out)?;
        Ok(())
    })?;
    Ok(())
}
