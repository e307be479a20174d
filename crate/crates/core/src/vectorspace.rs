//! Word/document count matrices and word-by-word similarity.
//!
//! Words are represented as vectors of per-document counts; similarity
//! between two words is the cosine of their count vectors,
//!
//! ```text
//! cos(x, y) = Σᵢ xᵢyᵢ / (√Σᵢxᵢ² · √Σᵢyᵢ²)
//! ```
//!
//! summed over the documents of the window. For non-negative counts the
//! cosine lies in [0, 1]. A Pearson product-moment matrix is available
//! for side-by-side comparison; it is not the primary similarity
//! criterion because word-frequency distributions are heavily skewed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TimeWindow;
use crate::textprep::{FrequencyList, Vocabulary};

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("vocabulary word {0:?} has an all-zero document row; the vocabulary and frequency lists disagree")]
    ZeroRow(String),
    #[error("word {word:?}: row sum {row_sum} does not match vocabulary window frequency {expected}")]
    RowSumMismatch {
        word: String,
        row_sum: u64,
        expected: u32,
    },
    #[error("frequency lists cover {got} documents but the window has {expected}")]
    DocCountMismatch { got: usize, expected: usize },
    #[error("frequency list {got:?} out of order; expected document {expected:?}")]
    DocOrderMismatch { got: String, expected: String },
    #[error("vocabulary has no included words")]
    EmptyVocabulary,
    #[error("matrix cells are not a {n}×{n} square")]
    NotSquare { n: usize },
    #[error("cell ({i},{j})={value} breaks the {what} invariant")]
    BadCell {
        i: usize,
        j: usize,
        value: f64,
        what: &'static str,
    },
}

/// Word-by-document occurrence counts for one window.
///
/// Rows follow the included vocabulary order, columns the window's
/// document order. Every row has at least one nonzero cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordDocMatrix {
    pub words: Vec<String>,
    pub docs: Vec<String>,
    cells: Vec<u32>,
}

impl WordDocMatrix {
    pub fn count(&self, word: usize, doc: usize) -> u32 {
        self.cells[word * self.docs.len() + doc]
    }

    pub fn row(&self, word: usize) -> &[u32] {
        let n = self.docs.len();
        &self.cells[word * n..(word + 1) * n]
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// Builds a matrix from raw row-major cells, checking the row
    /// invariants. Intended for tests and deserialization.
    pub fn from_cells(
        words: Vec<String>,
        docs: Vec<String>,
        cells: Vec<u32>,
    ) -> Result<Self, MatrixError> {
        assert_eq!(cells.len(), words.len() * docs.len(), "cell count mismatch");
        let m = Self { words, docs, cells };
        for (w, word) in m.words.iter().enumerate() {
            if m.row(w).iter().all(|&c| c == 0) {
                return Err(MatrixError::ZeroRow(word.clone()));
            }
        }
        Ok(m)
    }

    /// Presence/absence version of the matrix: every nonzero count
    /// becomes 1.
    pub fn binarized(&self) -> Self {
        Self {
            words: self.words.clone(),
            docs: self.docs.clone(),
            cells: self.cells.iter().map(|&c| u32::from(c > 0)).collect(),
        }
    }
}

/// Builds the word/document occurrence matrix for a window.
///
/// `per_doc_freqs` must hold one frequency list per window document, in
/// window order. Each included vocabulary word must occur somewhere in
/// the window and its row must sum to the vocabulary's window frequency;
/// violations signal pipeline corruption, not user error.
pub fn build_word_doc_matrix(
    window: &TimeWindow,
    vocab: &Vocabulary,
    per_doc_freqs: &[FrequencyList],
) -> Result<WordDocMatrix, MatrixError> {
    if per_doc_freqs.len() != window.document_ids.len() {
        return Err(MatrixError::DocCountMismatch {
            got: per_doc_freqs.len(),
            expected: window.document_ids.len(),
        });
    }
    for (fl, id) in per_doc_freqs.iter().zip(&window.document_ids) {
        if &fl.scope != id {
            return Err(MatrixError::DocOrderMismatch {
                got: fl.scope.clone(),
                expected: id.clone(),
            });
        }
    }
    let words = vocab.included_stems();
    if words.is_empty() {
        return Err(MatrixError::EmptyVocabulary);
    }
    let docs = window.document_ids.clone();
    let mut cells = vec![0u32; words.len() * docs.len()];
    for (w, word) in words.iter().enumerate() {
        for (d, fl) in per_doc_freqs.iter().enumerate() {
            cells[w * docs.len() + d] = fl.get(word);
        }
    }
    let m = WordDocMatrix { words, docs, cells };

    for (w, word) in m.words.iter().enumerate() {
        let row_sum: u64 = m.row(w).iter().map(|&c| u64::from(c)).sum();
        if row_sum == 0 {
            return Err(MatrixError::ZeroRow(word.clone()));
        }
        let expected = vocab
            .entry(word)
            .map(|e| e.window_frequency)
            .unwrap_or_default();
        if row_sum != u64::from(expected) {
            return Err(MatrixError::RowSumMismatch {
                word: word.clone(),
                row_sum,
                expected,
            });
        }
    }
    Ok(m)
}

/// Document-level co-occurrence: how many documents contain both words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoWordMatrix {
    pub words: Vec<String>,
    cells: Vec<u32>,
}

impl CoWordMatrix {
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.words.len() + j]
    }

    /// Diagonal entry: the word's document frequency.
    pub fn doc_frequency(&self, i: usize) -> u32 {
        self.get(i, i)
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }
}

pub fn build_coword_matrix(m: &WordDocMatrix) -> CoWordMatrix {
    #[cfg(feature = "parallel")]
    {
        build_coword_matrix_par(m)
    }
    #[cfg(not(feature = "parallel"))]
    {
        build_coword_matrix_seq(m)
    }
}

fn coword_cell(m: &WordDocMatrix, i: usize, j: usize) -> u32 {
    m.row(i)
        .iter()
        .zip(m.row(j))
        .filter(|&(&a, &b)| a > 0 && b > 0)
        .count() as u32
}

pub fn build_coword_matrix_seq(m: &WordDocMatrix) -> CoWordMatrix {
    let n = m.n_words();
    let mut cells = vec![0u32; n * n];
    for i in 0..n {
        for j in i..n {
            let c = coword_cell(m, i, j);
            cells[i * n + j] = c;
            cells[j * n + i] = c;
        }
    }
    CoWordMatrix {
        words: m.words.clone(),
        cells,
    }
}

#[cfg(feature = "parallel")]
fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn build_coword_matrix_par(m: &WordDocMatrix) -> CoWordMatrix {
    use rayon::prelude::*;
    let n = m.n_words();
    // One task per word pair: evenly balanced, each cell summed once.
    let pairs = upper_pairs(n);
    let values: Vec<u32> = pairs
        .par_iter()
        .map(|&(i, j)| coword_cell(m, i, j))
        .collect();
    let mut cells = vec![0u32; n * n];
    for i in 0..n {
        cells[i * n + i] = coword_cell(m, i, i);
    }
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        cells[i * n + j] = v;
        cells[j * n + i] = v;
    }
    CoWordMatrix {
        words: m.words.clone(),
        cells,
    }
}

/// Symmetric cosine similarity between word rows; cells in [0, 1],
/// diagonal exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineMatrix {
    pub words: Vec<String>,
    cells: Vec<f64>,
}

impl CosineMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.words.len() + j]
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Builds a matrix from raw row-major cells, validating symmetry,
    /// range, and the unit diagonal. Intended for tests and
    /// deserialization.
    pub fn from_cells(words: Vec<String>, cells: Vec<f64>) -> Result<Self, MatrixError> {
        let n = words.len();
        if cells.len() != n * n {
            return Err(MatrixError::NotSquare { n });
        }
        for i in 0..n {
            for j in 0..n {
                let v = cells[i * n + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(MatrixError::BadCell {
                        i,
                        j,
                        value: v,
                        what: "range [0,1]",
                    });
                }
                if v != cells[j * n + i] {
                    return Err(MatrixError::BadCell {
                        i,
                        j,
                        value: v,
                        what: "symmetry",
                    });
                }
            }
            if cells[i * n + i] != 1.0 {
                return Err(MatrixError::BadCell {
                    i,
                    j: i,
                    value: cells[i * n + i],
                    what: "unit diagonal",
                });
            }
        }
        Ok(Self { words, cells })
    }
}

fn row_norms(m: &WordDocMatrix) -> Result<Vec<f64>, MatrixError> {
    m.words
        .iter()
        .enumerate()
        .map(|(i, word)| {
            let sq: f64 = m.row(i).iter().map(|&c| {
                let v = f64::from(c);
                v * v
            }).sum();
            if sq == 0.0 {
                Err(MatrixError::ZeroRow(word.clone()))
            } else {
                Ok(sq.sqrt())
            }
        })
        .collect()
}

fn cosine_cell(m: &WordDocMatrix, norms: &[f64], i: usize, j: usize) -> f64 {
    let dot: f64 = m
        .row(i)
        .iter()
        .zip(m.row(j))
        .map(|(&a, &b)| f64::from(a) * f64::from(b))
        .sum();
    (dot / (norms[i] * norms[j])).min(1.0)
}

/// Cosine similarity of every word pair over the document columns.
///
/// Dispatches to the rayon implementation when the `parallel` feature is
/// enabled. Each cell is summed by one task in document order, so the
/// two implementations produce bitwise-identical matrices.
pub fn cosine_matrix(m: &WordDocMatrix) -> Result<CosineMatrix, MatrixError> {
    #[cfg(feature = "parallel")]
    {
        cosine_matrix_par(m)
    }
    #[cfg(not(feature = "parallel"))]
    {
        cosine_matrix_seq(m)
    }
}

pub fn cosine_matrix_seq(m: &WordDocMatrix) -> Result<CosineMatrix, MatrixError> {
    let norms = row_norms(m)?;
    let n = m.n_words();
    let mut cells = vec![0.0f64; n * n];
    for i in 0..n {
        cells[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let c = cosine_cell(m, &norms, i, j);
            cells[i * n + j] = c;
            cells[j * n + i] = c;
        }
    }
    Ok(CosineMatrix {
        words: m.words.clone(),
        cells,
    })
}

#[cfg(feature = "parallel")]
pub fn cosine_matrix_par(m: &WordDocMatrix) -> Result<CosineMatrix, MatrixError> {
    use rayon::prelude::*;
    let norms = row_norms(m)?;
    let n = m.n_words();
    let pairs = upper_pairs(n);
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| cosine_cell(m, &norms, i, j))
        .collect();
    let mut cells = vec![0.0f64; n * n];
    for i in 0..n {
        cells[i * n + i] = 1.0;
    }
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        cells[i * n + j] = v;
        cells[j * n + i] = v;
    }
    Ok(CosineMatrix {
        words: m.words.clone(),
        cells,
    })
}

/// Pearson product-moment correlation between word rows, provided for
/// comparison runs only. Rows with zero variance have no defined
/// correlation; their cells are NaN and the words are listed in
/// `undefined` rather than silently zeroed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PearsonMatrix {
    pub words: Vec<String>,
    cells: Vec<f64>,
    pub undefined: Vec<String>,
}

impl PearsonMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.words.len() + j]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }
}

pub fn pearson_matrix(m: &WordDocMatrix) -> PearsonMatrix {
    let n = m.n_words();
    let n_docs = m.n_docs() as f64;
    let means: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().map(|&c| f64::from(c)).sum::<f64>() / n_docs)
        .collect();
    let sds: Vec<f64> = (0..n)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|&c| {
                    let d = f64::from(c) - means[i];
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let undefined: Vec<String> = (0..n)
        .filter(|&i| sds[i] == 0.0)
        .map(|i| m.words[i].clone())
        .collect();

    let mut cells = vec![f64::NAN; n * n];
    for i in 0..n {
        if sds[i] == 0.0 {
            continue;
        }
        cells[i * n + i] = 1.0;
        for j in (i + 1)..n {
            if sds[j] == 0.0 {
                continue;
            }
            let cov: f64 = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .map(|(&a, &b)| (f64::from(a) - means[i]) * (f64::from(b) - means[j]))
                .sum();
            let r = (cov / (sds[i] * sds[j])).clamp(-1.0, 1.0);
            cells[i * n + j] = r;
            cells[j * n + i] = r;
        }
    }
    PearsonMatrix {
        words: m.words.clone(),
        cells,
        undefined,
    }
}
