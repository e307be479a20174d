//! End-to-end orchestration behind the CLI subcommands: corpus →
//! frequencies → vocabulary → matrices → graph → layout → artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{RunConfig, Similarity};
use crate::corpus::{ingest_directory, Corpus, CorpusError, IngestReport};
use crate::diachrony::{compare_snapshots, CompareError, SnapshotDiff};
use crate::export::native::{save_snapshot, SimilarityCells, SnapshotFile};
use crate::export::{pajek, svg, tables, ExportError};
use crate::layout::{kamada_kawai, target_distances};
use crate::netbuild::{build_graph, build_graph_from_similarity, mean_lower_triangle, GraphError};
use crate::textprep::{
    batch_document_frequencies, build_vocabulary, stem_plural, window_frequencies, StopList,
    TextprepError, Vocabulary,
};
use crate::vectorspace::{
    build_coword_matrix, build_word_doc_matrix, cosine_matrix, pearson_matrix, MatrixError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("textprep: {0}")]
    Textprep(#[from] TextprepError),
    #[error("vectorspace: {0}")]
    Matrix(#[from] MatrixError),
    #[error("netbuild: {0} (hint: lower the threshold or min_occurrences)")]
    Graph(#[from] GraphError),
    #[error("diachrony: {0}")]
    Compare(#[from] CompareError),
    #[error("export: {0}")]
    Export(#[from] ExportError),
}

/// Summary values of one `map` run; all of them can be re-derived from
/// the native snapshot file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub window_label: String,
    pub document_count: usize,
    pub vocabulary_size: usize,
    pub derived_threshold: f64,
    pub applied_threshold: f64,
    pub edge_count: usize,
    pub isolates_removed: usize,
    pub converged: bool,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "window: {}", self.window_label).unwrap();
        writeln!(out, "documents: {}", self.document_count).unwrap();
        writeln!(out, "vocabulary: {}", self.vocabulary_size).unwrap();
        writeln!(out, "derived_threshold: {}", self.derived_threshold).unwrap();
        writeln!(out, "applied_threshold: {}", self.applied_threshold).unwrap();
        writeln!(out, "edges: {}", self.edge_count).unwrap();
        writeln!(out, "isolates_removed: {}", self.isolates_removed).unwrap();
        writeln!(out, "layout_converged: {}", self.converged).unwrap();
        out
    }
}

/// Everything `map` produced, plus non-fatal warnings for stderr.
#[derive(Debug)]
pub struct MapOutcome {
    pub report: RunReport,
    pub snapshot_path: PathBuf,
    pub out_dir: PathBuf,
    pub warnings: Vec<String>,
}

fn ingest_warnings(report: &IngestReport) -> Vec<String> {
    let mut warnings = Vec::new();
    for (path, reason) in &report.skipped {
        warnings.push(format!("skipped {path}: {reason}"));
    }
    for (id, n) in &report.replaced_bytes {
        warnings.push(format!(
            "document {id:?}: {n} invalid UTF-8 sequence(s) replaced"
        ));
    }
    warnings.extend(report.warnings.iter().cloned());
    warnings
}

pub fn load_stoplist(config: &RunConfig) -> Result<StopList, PipelineError> {
    Ok(match &config.stopword_file {
        Some(path) => StopList::from_file(path)?,
        None => StopList::uspto(),
    })
}

fn prepare_corpus(config: &RunConfig) -> Result<(Corpus, Vec<String>), PipelineError> {
    let (mut corpus, ingest) = ingest_directory(&config.input_dir, config.date_rule)?;
    let mut warnings = ingest_warnings(&ingest);
    for w in &config.windows {
        let window = corpus.define_window(&w.label, w.start, w.end, config.include_undated)?;
        if window.document_ids.is_empty() {
            warnings.push(format!("window {:?} matched no documents", w.label));
        }
    }
    Ok((corpus, warnings))
}

fn safe_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Runs the full pipeline for one window and writes every artifact
/// under `out_dir/<label>/`: the native snapshot, Pajek `.net`, SVG
/// map, CSV matrices, vocabulary listing, and the run report.
pub fn run_map(
    config: &RunConfig,
    window_label: &str,
    out_dir: &Path,
) -> Result<MapOutcome, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    if config.window(window_label).is_none() {
        return Err(PipelineError::Config(format!(
            "window {window_label:?} is not defined in the config (available: {})",
            config
                .windows
                .iter()
                .map(|w| w.label.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }

    let stoplist = load_stoplist(config)?;
    let mut warnings = Vec::new();
    if stoplist.is_empty() {
        warnings.push("stopword list is empty; likely a misconfiguration".to_string());
    }
    let fingerprint = config.fingerprint(&stoplist);

    let (corpus, corpus_warnings) = prepare_corpus(config)?;
    warnings.extend(corpus_warnings);

    let docs = corpus.window_documents(window_label)?;
    if docs.is_empty() {
        return Err(PipelineError::Config(format!(
            "window {window_label:?} contains no documents; nothing to map"
        )));
    }
    let doc_texts: Vec<(&str, &str)> = docs
        .iter()
        .map(|d| (d.id.as_str(), d.text.as_str()))
        .collect();
    let per_doc = batch_document_frequencies(&doc_texts, &stoplist);
    let window_freq = window_frequencies(window_label, &per_doc);
    let vocab = build_vocabulary(
        &window_freq,
        &per_doc,
        config.min_occurrences,
        config.vocab_cap,
    )?;

    let window = corpus.window(window_label).expect("window defined above");
    let raw_matrix = build_word_doc_matrix(window, &vocab, &per_doc)?;
    let counted = if config.binary_counts {
        raw_matrix.binarized()
    } else {
        raw_matrix.clone()
    };
    let coword = build_coword_matrix(&counted);

    let sizing = config.node_sizing();
    let (similarity_cells, similarity_csv_name, similarity_csv, derived, graph) =
        match config.similarity {
            Similarity::Cosine => {
                let cosine = cosine_matrix(&counted)?;
                let derived = crate::netbuild::derive_threshold(&cosine)?;
                let applied = config.threshold_override.unwrap_or(derived);
                let graph = build_graph(&cosine, &vocab, applied, &sizing)?;
                (
                    SimilarityCells::from_cosine(&cosine),
                    "cosine.csv",
                    tables::cosine_csv(&cosine),
                    derived,
                    graph,
                )
            }
            Similarity::Pearson => {
                let pearson = pearson_matrix(&counted);
                if !pearson.undefined.is_empty() {
                    warnings.push(format!(
                        "pearson: {} zero-variance word(s) have undefined correlations: {}",
                        pearson.undefined.len(),
                        pearson.undefined.join(", ")
                    ));
                }
                let derived = mean_lower_triangle(counted.n_words(), pearson.cells())?;
                let applied = config.threshold_override.unwrap_or(derived);
                let freqs: Vec<u32> = counted
                    .words
                    .iter()
                    .map(|w| vocab.entry(w).map(|e| e.window_frequency).unwrap_or(0))
                    .collect();
                let graph = build_graph_from_similarity(
                    &pearson.words,
                    pearson.cells(),
                    &freqs,
                    applied,
                    &sizing,
                )?;
                (
                    SimilarityCells::from_pearson(&pearson),
                    "pearson.csv",
                    tables::pearson_csv(&pearson),
                    derived,
                    graph,
                )
            }
        };
    let applied = config.threshold_override.unwrap_or(derived);
    let isolates_removed = vocab.included_len() - graph.node_count();

    let params = config.layout_params();
    let td = target_distances(&graph, &params);
    let layout = kamada_kawai(&graph, &td, &params);
    if !layout.converged {
        warnings.push(format!(
            "layout did not converge within {} moves; positions are usable but not at rest",
            layout.iterations
        ));
    }

    let report = RunReport {
        window_label: window_label.to_string(),
        document_count: docs.len(),
        vocabulary_size: vocab.included_len(),
        derived_threshold: derived,
        applied_threshold: applied,
        edge_count: graph.edge_count(),
        isolates_removed,
        converged: layout.converged,
    };

    let snapshot_file = SnapshotFile {
        fingerprint,
        window_label: window_label.to_string(),
        doc_ids: window.document_ids.clone(),
        vocab: vocab.clone(),
        word_doc: raw_matrix.clone(),
        similarity: similarity_cells,
        derived_threshold: derived,
        applied_threshold: applied,
        graph: graph.clone(),
        layout: layout.clone(),
        report: report.clone(),
    };

    let dir = out_dir.join(safe_label(window_label));
    std::fs::create_dir_all(&dir).map_err(|source| {
        PipelineError::Export(ExportError::Write {
            path: dir.display().to_string(),
            source,
        })
    })?;
    let write = |name: &str, text: String| -> Result<(), PipelineError> {
        std::fs::write(dir.join(name), text).map_err(|source| {
            PipelineError::Export(ExportError::Write {
                path: dir.join(name).display().to_string(),
                source,
            })
        })
    };

    let snapshot_path = dir.join("snapshot.fsn");
    save_snapshot(&snapshot_file, &snapshot_path)?;
    pajek::write_pajek(&graph, &layout, &dir.join("map.net"))?;
    svg::render_svg(&graph, &layout, &svg::RenderOptions::default(), &dir.join("map.svg"))?;
    write("worddoc.csv", tables::word_doc_csv(&raw_matrix))?;
    write("coword.csv", tables::coword_csv(&coword))?;
    write(similarity_csv_name, similarity_csv)?;
    write("vocabulary.csv", tables::vocabulary_csv(&vocab))?;
    write("frequencies.csv", tables::frequency_csv(&window_freq))?;
    write("report.txt", report.to_text())?;

    Ok(MapOutcome {
        report,
        snapshot_path,
        out_dir: dir,
        warnings,
    })
}

/// Normalizes user-supplied focal words to stems the pipeline would
/// produce: lowercase, then plural-s removal.
pub fn normalize_focal(words: &[String]) -> Vec<String> {
    let mut out: Vec<String> = words
        .iter()
        .map(|w| stem_plural(w.trim().to_lowercase().as_str()))
        .filter(|w| !w.is_empty())
        .collect();
    out.dedup();
    out
}

#[derive(Debug)]
pub struct CompareOutcome {
    pub diff: SnapshotDiff,
    pub table: String,
}

/// Compares two saved snapshots over a focal word list.
pub fn run_compare(
    before_path: &Path,
    after_path: &Path,
    focal: &[String],
) -> Result<CompareOutcome, PipelineError> {
    let before = crate::export::native::load_snapshot(before_path)?;
    let after = crate::export::native::load_snapshot(after_path)?;
    let focal = normalize_focal(focal);
    let diff = compare_snapshots(&before.snapshot(), &after.snapshot(), &focal)?;
    let table = diff_table(&diff);
    Ok(CompareOutcome { diff, table })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "-".to_string(),
    }
}

/// Human-readable trajectory table plus the emerging-term list.
pub fn diff_table(diff: &SnapshotDiff) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "comparing {} -> {}",
        diff.before_label, diff.after_label
    )
    .unwrap();
    writeln!(
        out,
        "{:<20} {:>10} {:>10} {:>12} {:>12}  verdict",
        "focal word", "wdeg[A]", "wdeg[B]", "centdist[A]", "centdist[B]"
    )
    .unwrap();
    for t in &diff.trajectories {
        writeln!(
            out,
            "{:<20} {:>10} {:>10} {:>12} {:>12}  {}",
            t.stem,
            fmt_opt(t.centrality_before),
            fmt_opt(t.centrality_after),
            fmt_opt(t.centroid_distance_before),
            fmt_opt(t.centroid_distance_after),
            t.verdict
        )
        .unwrap();
    }
    for stem in &diff.missing {
        writeln!(out, "{stem:<20} absent from both snapshots").unwrap();
    }
    writeln!(out).unwrap();
    if diff.emerging.is_empty() {
        writeln!(out, "no emerging terms").unwrap();
    } else {
        writeln!(out, "emerging terms (new in {}):", diff.after_label).unwrap();
        for e in &diff.emerging {
            writeln!(
                out,
                "  {:<24} wdeg={:.4}{}",
                e.stem,
                e.weighted_degree,
                if e.is_compound { "  [compound]" } else { "" }
            )
            .unwrap();
        }
    }
    out
}

pub fn trajectories_csv(diff: &SnapshotDiff) -> String {
    let mut out = String::from(
        "stem,centrality_before,centrality_after,centroid_distance_before,centroid_distance_after,verdict\n",
    );
    for t in &diff.trajectories {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.stem,
            opt(t.centrality_before),
            opt(t.centrality_after),
            opt(t.centroid_distance_before),
            opt(t.centroid_distance_after),
            t.verdict
        )
        .unwrap();
    }
    for stem in &diff.missing {
        writeln!(out, "{stem},,,,,absent").unwrap();
    }
    out
}

pub fn emerging_csv(diff: &SnapshotDiff) -> String {
    let mut out = String::from("stem,weighted_degree,is_compound\n");
    for e in &diff.emerging {
        writeln!(out, "{},{:.6},{}", e.stem, e.weighted_degree, e.is_compound).unwrap();
    }
    out
}

/// Writes the comparison CSVs and table under `out_dir`.
pub fn write_compare_outputs(
    diff: &SnapshotDiff,
    table: &str,
    out_dir: &Path,
) -> Result<PathBuf, PipelineError> {
    let dir = out_dir.join(format!(
        "compare_{}_{}",
        safe_label(&diff.before_label),
        safe_label(&diff.after_label)
    ));
    std::fs::create_dir_all(&dir).map_err(|source| {
        PipelineError::Export(ExportError::Write {
            path: dir.display().to_string(),
            source,
        })
    })?;
    let write = |name: &str, text: &str| -> Result<(), PipelineError> {
        std::fs::write(dir.join(name), text).map_err(|source| {
            PipelineError::Export(ExportError::Write {
                path: dir.join(name).display().to_string(),
                source,
            })
        })
    };
    write("trajectories.csv", &trajectories_csv(diff))?;
    write("emerging.csv", &emerging_csv(diff))?;
    write("report.txt", table)?;
    Ok(dir)
}

/// The `vocab` subcommand: frequencies and inclusion flags for one window.
pub fn run_vocab(
    config: &RunConfig,
    window_label: &str,
) -> Result<(Vocabulary, Vec<String>), PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    let stoplist = load_stoplist(config)?;
    let (corpus, warnings) = prepare_corpus(config)?;
    let docs = corpus.window_documents(window_label)?;
    let doc_texts: Vec<(&str, &str)> = docs
        .iter()
        .map(|d| (d.id.as_str(), d.text.as_str()))
        .collect();
    let per_doc = batch_document_frequencies(&doc_texts, &stoplist);
    let window_freq = window_frequencies(window_label, &per_doc);
    let vocab = build_vocabulary(
        &window_freq,
        &per_doc,
        config.min_occurrences,
        config.vocab_cap,
    )?;
    Ok((vocab, warnings))
}

/// The `ingest-report` subcommand.
pub fn run_ingest_report(config: &RunConfig) -> Result<IngestReport, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    let (_, report) = ingest_directory(&config.input_dir, config.date_rule)?;
    Ok(report)
}
