//! Corpus ingestion: one plain-text file per document, optional dates
//! from a filename prefix or a `metadata.csv` sidecar, and partitioning
//! into labeled time windows.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no documents ingested from {0}")]
    NoDocuments(String),
    #[error("cannot read directory {path}: {source}")]
    DirUnreadable {
        path: String,
        source: std::io::Error,
    },
    #[error("duplicate window label {0:?}")]
    DuplicateLabel(String),
    #[error("window {label:?}: start {start} is after end {end}")]
    InvertedRange {
        label: String,
        start: NaiveDate,
        end: NaiveDate,
    },
    #[error("unknown window label {0:?}")]
    UnknownWindow(String),
}

/// How to extract a document date from its filename.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DateRule {
    /// No date extraction; dates may still come from the sidecar.
    None,
    /// Leading `YYYY-MM-DD` on the file stem, e.g. `1985-03-01_sweet.txt`.
    #[default]
    IsoPrefix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    /// Filename stem; unique within a corpus.
    pub id: String,
    pub text: String,
    pub date: Option<NaiveDate>,
    pub source_path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Ids of member documents, in corpus order.
    pub document_ids: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub windows: Vec<TimeWindow>,
}

/// What happened during ingestion: skipped files, lossy decodes, sidecar
/// problems. Warnings here are non-fatal; the caller decides how loudly
/// to report them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub directory: String,
    pub files_seen: usize,
    pub documents: usize,
    pub undated: usize,
    /// Bytes replaced with U+FFFD while decoding as UTF-8, per document.
    pub replaced_bytes: Vec<(String, usize)>,
    /// (path, reason) for every skipped file.
    pub skipped: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn total_replaced(&self) -> usize {
        self.replaced_bytes.iter().map(|(_, n)| n).sum()
    }
}

fn parse_iso_prefix(stem: &str) -> Option<NaiveDate> {
    let prefix = stem.get(..10)?;
    NaiveDate::parse_from_str(prefix, "%Y-%m-%d").ok()
}

fn read_lossy(path: &Path) -> std::io::Result<(String, usize)> {
    let bytes = std::fs::read(path)?;
    match String::from_utf8(bytes) {
        Ok(text) => Ok((text, 0)),
        Err(err) => {
            let bytes = err.into_bytes();
            let text = String::from_utf8_lossy(&bytes).into_owned();
            let replaced = text.matches('\u{FFFD}').count();
            Ok((text, replaced))
        }
    }
}

/// Reads the optional `metadata.csv` sidecar (`id,date` columns).
fn read_sidecar(dir: &Path, report: &mut IngestReport) -> Vec<(String, NaiveDate)> {
    let path = dir.join("metadata.csv");
    if !path.is_file() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let reader = match csv::Reader::from_path(&path) {
        Ok(r) => r,
        Err(e) => {
            report
                .warnings
                .push(format!("sidecar {}: {e}", path.display()));
            return Vec::new();
        }
    };
    for (lineno, record) in reader.into_records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report
                    .warnings
                    .push(format!("sidecar row {}: {e}", lineno + 2));
                continue;
            }
        };
        let id = record.get(0).unwrap_or("").trim().to_string();
        let raw_date = record.get(1).unwrap_or("").trim();
        match NaiveDate::parse_from_str(raw_date, "%Y-%m-%d") {
            Ok(d) => out.push((id, d)),
            Err(_) => report.warnings.push(format!(
                "sidecar row {}: bad date {raw_date:?} for id {id:?}",
                lineno + 2
            )),
        }
    }
    out
}

/// Ingests every `.txt` file in `dir` as one document.
///
/// Ids are the filename stems, ordering is by filename, and dates come
/// from `date_rule` with `metadata.csv` entries taking precedence.
/// Unreadable, empty, or duplicate-id files are skipped and recorded in
/// the report; ingesting zero documents is fatal.
pub fn ingest_directory(
    dir: &Path,
    date_rule: DateRule,
) -> Result<(Corpus, IngestReport), CorpusError> {
    let mut report = IngestReport {
        directory: dir.display().to_string(),
        ..Default::default()
    };

    let entries = std::fs::read_dir(dir).map_err(|source| CorpusError::DirUnreadable {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "txt").unwrap_or(false))
        .collect();
    paths.sort();
    report.files_seen = paths.len();

    // One task per file; collect preserves the sorted order.
    #[cfg(feature = "parallel")]
    let raw: Vec<(PathBuf, std::io::Result<(String, usize)>)> = {
        use rayon::prelude::*;
        paths
            .into_par_iter()
            .map(|p| {
                let read = read_lossy(&p);
                (p, read)
            })
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let raw: Vec<(PathBuf, std::io::Result<(String, usize)>)> = paths
        .into_iter()
        .map(|p| {
            let read = read_lossy(&p);
            (p, read)
        })
        .collect();

    let mut documents = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (path, read) in raw {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match read {
            Err(e) => {
                report
                    .skipped
                    .push((path.display().to_string(), format!("unreadable: {e}")));
            }
            Ok((text, replaced)) => {
                if text.trim().is_empty() {
                    report
                        .skipped
                        .push((path.display().to_string(), "empty document".to_string()));
                    continue;
                }
                if !seen_ids.insert(stem.clone()) {
                    report.skipped.push((
                        path.display().to_string(),
                        format!("duplicate id {stem:?}"),
                    ));
                    continue;
                }
                if replaced > 0 {
                    report.replaced_bytes.push((stem.clone(), replaced));
                }
                let date = match date_rule {
                    DateRule::None => None,
                    DateRule::IsoPrefix => parse_iso_prefix(&stem),
                };
                documents.push(Document {
                    id: stem,
                    text,
                    date,
                    source_path: path.display().to_string(),
                });
            }
        }
    }

    for (id, date) in read_sidecar(dir, &mut report) {
        match documents.iter_mut().find(|d| d.id == id) {
            Some(doc) => doc.date = Some(date),
            None => report
                .warnings
                .push(format!("sidecar id {id:?} matches no document")),
        }
    }

    if documents.is_empty() {
        return Err(CorpusError::NoDocuments(dir.display().to_string()));
    }
    report.documents = documents.len();
    report.undated = documents.iter().filter(|d| d.date.is_none()).count();

    Ok((
        Corpus {
            documents,
            windows: Vec::new(),
        },
        report,
    ))
}

impl Corpus {
    pub fn document(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn window(&self, label: &str) -> Option<&TimeWindow> {
        self.windows.iter().find(|w| w.label == label)
    }

    /// Defines a window containing every document whose date falls in
    /// `[start, end]`. Undated documents join only when `include_undated`
    /// is set. An empty window is created anyway; callers should warn.
    pub fn define_window(
        &mut self,
        label: &str,
        start: NaiveDate,
        end: NaiveDate,
        include_undated: bool,
    ) -> Result<&TimeWindow, CorpusError> {
        if start > end {
            return Err(CorpusError::InvertedRange {
                label: label.to_string(),
                start,
                end,
            });
        }
        if self.windows.iter().any(|w| w.label == label) {
            return Err(CorpusError::DuplicateLabel(label.to_string()));
        }
        let document_ids = self
            .documents
            .iter()
            .filter(|d| match d.date {
                Some(date) => start <= date && date <= end,
                None => include_undated,
            })
            .map(|d| d.id.clone())
            .collect();
        self.windows.push(TimeWindow {
            label: label.to_string(),
            start,
            end,
            document_ids,
        });
        Ok(self.windows.last().unwrap())
    }

    /// The documents of a window, in window order.
    pub fn window_documents(&self, label: &str) -> Result<Vec<&Document>, CorpusError> {
        let window = self
            .window(label)
            .ok_or_else(|| CorpusError::UnknownWindow(label.to_string()))?;
        Ok(window
            .document_ids
            .iter()
            .filter_map(|id| self.document(id))
            .collect())
    }
}
