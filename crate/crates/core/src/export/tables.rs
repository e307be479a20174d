//! CSV renderings of matrices and frequency lists. Similarity cells are
//! fixed to six decimals so diffs stay stable; counts are plain
//! integers. Row and column headers carry the stems.

use std::fmt::Write as _;

use crate::textprep::{FrequencyList, Vocabulary};
use crate::vectorspace::{CoWordMatrix, CosineMatrix, PearsonMatrix, WordDocMatrix};

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn header(labels: &[String]) -> String {
    let mut line = String::new();
    for l in labels {
        line.push(',');
        line.push_str(&csv_field(l));
    }
    line.push('\n');
    line
}

pub fn word_doc_csv(m: &WordDocMatrix) -> String {
    let mut out = header(&m.docs);
    for (i, word) in m.words.iter().enumerate() {
        out.push_str(&csv_field(word));
        for &c in m.row(i) {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn coword_csv(m: &CoWordMatrix) -> String {
    let n = m.words.len();
    let mut out = header(&m.words);
    for i in 0..n {
        out.push_str(&csv_field(&m.words[i]));
        for j in 0..n {
            write!(out, ",{}", m.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn cosine_csv(m: &CosineMatrix) -> String {
    similarity_csv(&m.words, m.cells())
}

/// Pearson cells may be undefined (zero-variance rows); those print as
/// `NaN` rather than a fake zero.
pub fn pearson_csv(m: &PearsonMatrix) -> String {
    similarity_csv(&m.words, m.cells())
}

fn similarity_csv(words: &[String], cells: &[f64]) -> String {
    let n = words.len();
    let mut out = header(words);
    for i in 0..n {
        out.push_str(&csv_field(&words[i]));
        for j in 0..n {
            let v = cells[i * n + j];
            if v.is_finite() {
                write!(out, ",{v:.6}").unwrap();
            } else {
                out.push_str(",NaN");
            }
        }
        out.push('\n');
    }
    out
}

/// `stem,count` rows, most frequent first, ties alphabetical.
pub fn frequency_csv(fl: &FrequencyList) -> String {
    let mut rows: Vec<(&String, &u32)> = fl.counts.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = String::from("stem,count\n");
    for (stem, count) in rows {
        writeln!(out, "{},{count}", csv_field(stem)).unwrap();
    }
    out
}

/// Full vocabulary listing with inclusion flags.
pub fn vocabulary_csv(v: &Vocabulary) -> String {
    let mut out = String::from("stem,window_frequency,doc_frequency,included\n");
    for e in &v.entries {
        writeln!(
            out,
            "{},{},{},{}",
            csv_field(&e.stem),
            e.window_frequency,
            e.doc_frequency,
            e.included
        )
        .unwrap();
    }
    out
}
