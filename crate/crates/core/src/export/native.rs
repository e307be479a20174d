//! The native snapshot format: a `framescope-snapshot v1` header line
//! followed by a JSON body holding everything a run produced — config
//! fingerprint, vocabulary, matrices, graph, layout, and the run
//! report. Loading one back is enough to compare windows or re-derive
//! every report value without touching the corpus again.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diachrony::Snapshot;
use crate::layout::LayoutResult;
use crate::netbuild::SemanticGraph;
use crate::pipeline::RunReport;
use crate::textprep::Vocabulary;
use crate::vectorspace::{CosineMatrix, PearsonMatrix, WordDocMatrix};

use super::ExportError;

pub const SNAPSHOT_HEADER: &str = "framescope-snapshot v1";

/// Similarity cells in a JSON-safe shape: undefined (NaN) cells are
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityCells {
    pub kind: String,
    pub words: Vec<String>,
    pub cells: Vec<Option<f64>>,
    pub undefined_words: Vec<String>,
}

impl SimilarityCells {
    pub fn from_cosine(m: &CosineMatrix) -> Self {
        Self {
            kind: "cosine".to_string(),
            words: m.words.clone(),
            cells: m.cells().iter().map(|&v| Some(v)).collect(),
            undefined_words: Vec::new(),
        }
    }

    pub fn from_pearson(m: &PearsonMatrix) -> Self {
        Self {
            kind: "pearson".to_string(),
            words: m.words.clone(),
            cells: m
                .cells()
                .iter()
                .map(|&v| if v.is_finite() { Some(v) } else { None })
                .collect(),
            undefined_words: m.undefined.clone(),
        }
    }

    pub fn to_cosine(&self) -> Option<CosineMatrix> {
        if self.kind != "cosine" {
            return None;
        }
        let cells: Option<Vec<f64>> = self.cells.iter().copied().collect();
        CosineMatrix::from_cells(self.words.clone(), cells?).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFile {
    pub fingerprint: String,
    pub window_label: String,
    pub doc_ids: Vec<String>,
    pub vocab: Vocabulary,
    pub word_doc: WordDocMatrix,
    pub similarity: SimilarityCells,
    pub derived_threshold: f64,
    pub applied_threshold: f64,
    pub graph: SemanticGraph,
    pub layout: LayoutResult,
    pub report: RunReport,
}

impl SnapshotFile {
    /// The comparison view used by the diachrony module.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            window_label: self.window_label.clone(),
            config_fingerprint: self.fingerprint.clone(),
            vocab: self.vocab.clone(),
            graph: self.graph.clone(),
            layout: self.layout.clone(),
        }
    }
}

pub fn save_snapshot(file: &SnapshotFile, path: &Path) -> Result<(), ExportError> {
    let body = serde_json::to_string_pretty(file).map_err(|source| ExportError::Json {
        path: path.display().to_string(),
        source,
    })?;
    let text = format!("{SNAPSHOT_HEADER}\n{body}\n");
    std::fs::write(path, text).map_err(|source| ExportError::Write {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_snapshot(path: &Path) -> Result<SnapshotFile, ExportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExportError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let Some((header, body)) = text.split_once('\n') else {
        return Err(ExportError::BadHeader {
            path: path.display().to_string(),
            expected: SNAPSHOT_HEADER.to_string(),
        });
    };
    if header.trim_end() != SNAPSHOT_HEADER {
        return Err(ExportError::BadHeader {
            path: path.display().to_string(),
            expected: SNAPSHOT_HEADER.to_string(),
        });
    }
    serde_json::from_str(body).map_err(|source| ExportError::Json {
        path: path.display().to_string(),
        source,
    })
}
