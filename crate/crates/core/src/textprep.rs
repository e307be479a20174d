//! Text normalization: tokenization, plural-s stemming, stopword
//! filtering, frequency lists, and vocabulary construction.
//!
//! The stemmer deliberately does nothing beyond removing a trailing
//! plural "s" — a full stemmer would change which words the method
//! counts as distinct. Tokenization keeps internal hyphens so that
//! compounds like "aspartame-infused" survive as single analyzable
//! terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bundled stop word list of the U.S. Patent and Trademark Office
/// full-text search system. Callers may substitute their own list.
pub const USPTO_STOPWORDS: &str = include_str!("../data/uspto_stopwords.txt");

#[derive(Debug, Error)]
pub enum TextprepError {
    #[error("vocabulary empty; lower min_occurrences (cutoff {min_occurrences} excluded all {candidates} stems)")]
    EmptyVocabulary {
        min_occurrences: u32,
        candidates: usize,
    },
    #[error("stopword file {path}: {source}")]
    StoplistIo {
        path: String,
        source: std::io::Error,
    },
    #[error("stopword list entry {0:?} is not lowercase")]
    StoplistCase(String),
    #[error("vocabulary cap must be at least 1")]
    ZeroCap,
}

/// A single token: the lowercased surface form and its plural-stripped stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub stem: String,
}

/// Lowercases `text` and splits it into tokens.
///
/// A token is a maximal run of alphanumeric characters and internal
/// hyphens. Leading and trailing hyphens are stripped, and tokens
/// without any alphabetic character (pure numbers, digit ranges) are
/// dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .filter_map(|raw| {
            let trimmed = raw.trim_matches('-');
            if trimmed.is_empty() || !trimmed.chars().any(|c| c.is_alphabetic()) {
                return None;
            }
            Some(Token {
                surface: trimmed.to_string(),
                stem: stem_plural(trimmed),
            })
        })
        .collect()
}

/// Removes one trailing plural "s".
///
/// The "s" is stripped only when the token has at least four characters
/// and does not end in "ss"; short words ("gas") and double-s words
/// ("boss") pass through unchanged. Idempotent: a stripped token never
/// ends in "s" again.
pub fn stem_plural(token: &str) -> String {
    let n = token.chars().count();
    if n >= 4 && token.ends_with('s') && !token.ends_with("ss") {
        token[..token.len() - 1].to_string()
    } else {
        token.to_string()
    }
}

/// A stopword set loaded from a one-word-per-line file (`#` comments allowed).
#[derive(Debug, Clone, Default)]
pub struct StopList {
    words: BTreeSet<String>,
    sha256: String,
}

impl StopList {
    /// Parses a list from text: one lowercase word per line, blank lines
    /// and `#` comments ignored.
    pub fn parse(text: &str) -> Result<Self, TextprepError> {
        let mut words = BTreeSet::new();
        for line in text.lines() {
            let entry = line.split('#').next().unwrap_or("").trim();
            if entry.is_empty() {
                continue;
            }
            if entry != entry.to_lowercase() {
                return Err(TextprepError::StoplistCase(entry.to_string()));
            }
            words.insert(entry.to_string());
        }
        Ok(Self {
            words,
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, TextprepError> {
        let text = std::fs::read_to_string(path).map_err(|source| TextprepError::StoplistIo {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled USPTO list.
    pub fn uspto() -> Self {
        Self::parse(USPTO_STOPWORDS).expect("bundled stoplist is well-formed")
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Content hash of the source text, used in config fingerprints.
    pub fn sha256(&self) -> &str {
        &self.sha256
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        use fmt::Write;
        write!(out, "{b:02x}").unwrap();
    }
    out
}

/// Drops tokens whose stem or surface form is in the stoplist.
///
/// Checking the surface as well catches stopwords that the plural
/// stemmer would otherwise mangle out of the list ("this" → "thi").
pub fn remove_stopwords(tokens: Vec<Token>, stoplist: &StopList) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !(stoplist.contains(&t.stem) || stoplist.contains(&t.surface)))
        .collect()
}

/// Stem frequencies for one document or one window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyList {
    /// Document id or window label the counts belong to.
    pub scope: String,
    /// stem → count; stopword stems never appear, counts are ≥ 1.
    pub counts: BTreeMap<String, u32>,
}

impl FrequencyList {
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn get(&self, stem: &str) -> u32 {
        self.counts.get(stem).copied().unwrap_or(0)
    }
}

/// Tokenize → stem → stopword-filter → count, for one document.
pub fn document_frequencies(doc_id: &str, text: &str, stoplist: &StopList) -> FrequencyList {
    let tokens = remove_stopwords(tokenize(text), stoplist);
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for t in tokens {
        *counts.entry(t.stem).or_insert(0) += 1;
    }
    FrequencyList {
        scope: doc_id.to_string(),
        counts,
    }
}

/// Per-document frequency lists for a batch of `(id, text)` pairs,
/// preserving input order. Parallel over documents when the `parallel`
/// feature is enabled; each document is counted by exactly one task, so
/// the result is identical either way.
pub fn batch_document_frequencies(
    docs: &[(&str, &str)],
    stoplist: &StopList,
) -> Vec<FrequencyList> {
    #[cfg(feature = "parallel")]
    {
        batch_document_frequencies_par(docs, stoplist)
    }
    #[cfg(not(feature = "parallel"))]
    {
        batch_document_frequencies_seq(docs, stoplist)
    }
}

pub fn batch_document_frequencies_seq(
    docs: &[(&str, &str)],
    stoplist: &StopList,
) -> Vec<FrequencyList> {
    docs.iter()
        .map(|(id, text)| document_frequencies(id, text, stoplist))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn batch_document_frequencies_par(
    docs: &[(&str, &str)],
    stoplist: &StopList,
) -> Vec<FrequencyList> {
    use rayon::prelude::*;
    docs.par_iter()
        .map(|(id, text)| document_frequencies(id, text, stoplist))
        .collect()
}

/// Merges per-document counts into a window-level frequency list.
pub fn window_frequencies(label: &str, per_doc: &[FrequencyList]) -> FrequencyList {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for fl in per_doc {
        for (stem, &c) in &fl.counts {
            *counts.entry(stem.clone()).or_insert(0) += c;
        }
    }
    FrequencyList {
        scope: label.to_string(),
        counts,
    }
}

/// One vocabulary row; `included` marks membership in the analysis set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub stem: String,
    pub window_frequency: u32,
    pub doc_frequency: u32,
    pub included: bool,
}

/// The analysis vocabulary of one window: every observed stem with its
/// window and document frequencies, sorted by (frequency desc, stem asc).
/// Entries above the cutoff are `included`, truncated to `cap`; the rest
/// are retained for reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub entries: Vec<VocabEntry>,
    pub min_occurrences: u32,
    pub cap: usize,
}

impl Vocabulary {
    pub fn included(&self) -> impl Iterator<Item = &VocabEntry> {
        self.entries.iter().filter(|e| e.included)
    }

    pub fn included_len(&self) -> usize {
        self.included().count()
    }

    pub fn included_stems(&self) -> Vec<String> {
        self.included().map(|e| e.stem.clone()).collect()
    }

    /// True when `stem` occurs anywhere in the window, included or not.
    pub fn contains_stem(&self, stem: &str) -> bool {
        self.entries.iter().any(|e| e.stem == stem)
    }

    pub fn entry(&self, stem: &str) -> Option<&VocabEntry> {
        self.entries.iter().find(|e| e.stem == stem)
    }
}

/// Builds the vocabulary for one window.
///
/// A stem is included when its window frequency is strictly greater than
/// `min_occurrences` ("more than N times"); the included set is then
/// truncated to the `cap` most frequent stems, ties broken
/// lexicographically. `per_doc` supplies document frequencies and must
/// cover exactly the window's documents.
pub fn build_vocabulary(
    window_freq: &FrequencyList,
    per_doc: &[FrequencyList],
    min_occurrences: u32,
    cap: usize,
) -> Result<Vocabulary, TextprepError> {
    if cap == 0 {
        return Err(TextprepError::ZeroCap);
    }
    let mut doc_freq: BTreeMap<&str, u32> = BTreeMap::new();
    for fl in per_doc {
        for stem in fl.counts.keys() {
            *doc_freq.entry(stem).or_insert(0) += 1;
        }
    }

    let mut entries: Vec<VocabEntry> = window_freq
        .counts
        .iter()
        .map(|(stem, &wf)| VocabEntry {
            stem: stem.clone(),
            window_frequency: wf,
            doc_frequency: doc_freq.get(stem.as_str()).copied().unwrap_or(0),
            included: false,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.window_frequency
            .cmp(&a.window_frequency)
            .then_with(|| a.stem.cmp(&b.stem))
    });

    let mut taken = 0usize;
    for e in entries.iter_mut() {
        if taken < cap && e.window_frequency > min_occurrences {
            e.included = true;
            taken += 1;
        }
    }
    if taken == 0 {
        return Err(TextprepError::EmptyVocabulary {
            min_occurrences,
            candidates: entries.len(),
        });
    }
    Ok(Vocabulary {
        entries,
        min_occurrences,
        cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn tokenize_preserves_hyphenated_compounds() {
        let tokens = tokenize("Aspartame-infused ballads");
        assert_eq!(surfaces(&tokens), ["aspartame-infused", "ballads"]);
    }

    #[test]
    fn tokenize_empty_input() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_drops_numbers_and_lowers_case() {
        // hand-tokenized oracle: "FDA approved 2 products."
        let tokens = tokenize("FDA approved 2 products.");
        assert_eq!(surfaces(&tokens), ["fda", "approved", "products"]);
    }

    #[test]
    fn tokenize_trims_dangling_hyphens() {
        let tokens = tokenize("-pre- and post- -sugar-free-");
        assert_eq!(surfaces(&tokens), ["pre", "and", "post", "sugar-free"]);
    }

    #[test]
    fn tokenize_drops_digit_ranges() {
        assert!(tokenize("12 3-4 1985").is_empty());
        assert_eq!(surfaces(&tokenize("e951")), ["e951"]);
    }

    #[test]
    fn stem_plural_paper_example() {
        assert_eq!(stem_plural("cars"), "car");
    }

    #[test]
    fn stem_plural_double_s_guard() {
        assert_eq!(stem_plural("boss"), "boss");
        assert_eq!(stem_plural("gas"), "gas");
    }

    #[test]
    fn stem_plural_long_word() {
        assert_eq!(stem_plural("sweeteners"), "sweetener");
    }

    #[test]
    fn stem_plural_idempotent_on_samples() {
        for w in ["cars", "boss", "gas", "sweeteners", "glasses", "a", ""] {
            let once = stem_plural(w);
            assert_eq!(stem_plural(&once), once, "not idempotent for {w:?}");
        }
    }

    #[test]
    fn remove_stopwords_uspto() {
        let stoplist = StopList::uspto();
        assert_eq!(stoplist.len(), 99);
        let kept = remove_stopwords(tokenize("the sweetener"), &stoplist);
        assert_eq!(surfaces(&kept), ["sweetener"]);
    }

    #[test]
    fn remove_stopwords_empty_and_full() {
        let stoplist = StopList::uspto();
        assert!(remove_stopwords(vec![], &stoplist).is_empty());
        let all_stop = remove_stopwords(tokenize("the of and"), &stoplist);
        assert!(all_stop.is_empty());
    }

    #[test]
    fn remove_stopwords_catches_stemmed_surfaces() {
        // "this" stems to "thi", which is not in the list; the surface check
        // still removes it.
        let stoplist = StopList::uspto();
        let kept = remove_stopwords(tokenize("this sugar"), &stoplist);
        assert_eq!(surfaces(&kept), ["sugar"]);
    }

    #[test]
    fn stoplist_parse_comments_and_case() {
        let sl = StopList::parse("# header\nthe\n a # trailing\n\n").unwrap();
        assert_eq!(sl.len(), 2);
        assert!(sl.contains("the") && sl.contains("a"));
        assert!(StopList::parse("The").is_err());
    }

    #[test]
    fn document_counts_merge_plural_and_singular() {
        let stoplist = StopList::uspto();
        let fl = document_frequencies("d1", "Sweetener sweeteners SWEETENER.", &stoplist);
        assert_eq!(fl.get("sweetener"), 3);
    }

    #[test]
    fn window_counts_sum_document_counts() {
        let stoplist = StopList::uspto();
        let a = document_frequencies("d1", "car cars food", &stoplist);
        let b = document_frequencies("d2", "car", &stoplist);
        let w = window_frequencies("w", &[a, b]);
        assert_eq!(w.get("car"), 3);
        assert_eq!(w.get("food"), 1);
    }

    #[test]
    fn vocabulary_no_filtering_when_cutoff_zero() {
        let stoplist = StopList::uspto();
        let fl = document_frequencies("d", "apple banana cherry", &stoplist);
        let vocab = build_vocabulary(&fl.clone(), &[fl], 0, 100).unwrap();
        assert_eq!(vocab.included_len(), 3);
    }

    #[test]
    fn vocabulary_strict_cutoff() {
        let mut counts = BTreeMap::new();
        counts.insert("over".to_string(), 11);
        counts.insert("at".to_string(), 10); // == cutoff: excluded
        counts.insert("under".to_string(), 9);
        let wf = FrequencyList {
            scope: "w".into(),
            counts,
        };
        let vocab = build_vocabulary(&wf, std::slice::from_ref(&wf), 10, 100).unwrap();
        assert_eq!(vocab.included_stems(), ["over"]);
        assert_eq!(vocab.entries.len(), 3);
    }

    #[test]
    fn vocabulary_cap_breaks_ties_lexicographically() {
        // 150 qualifying stems; the tie straddles rank 100.
        // Stems q000..q098 have descending frequencies 200..102 (99 ranks);
        // t00..t50 all share frequency 50, so exactly one of them makes the
        // cut at rank 100 — the lexicographically smallest, "t00".
        let mut counts = BTreeMap::new();
        for i in 0..99u32 {
            counts.insert(format!("q{i:03}"), 200 - i);
        }
        for i in 0..51u32 {
            counts.insert(format!("t{i:02}"), 50);
        }
        let wf = FrequencyList {
            scope: "w".into(),
            counts,
        };
        let vocab = build_vocabulary(&wf, std::slice::from_ref(&wf), 10, 100).unwrap();
        assert_eq!(vocab.included_len(), 100);
        let included: Vec<_> = vocab.included_stems();
        assert!(included.contains(&"t00".to_string()));
        assert!(!included.contains(&"t01".to_string()));
    }

    #[test]
    fn vocabulary_empty_is_an_error() {
        let stoplist = StopList::uspto();
        let fl = document_frequencies("d", "apple banana", &stoplist);
        let err = build_vocabulary(&fl.clone(), &[fl], 10, 100).unwrap_err();
        assert!(err.to_string().contains("vocabulary empty"));
    }

    #[test]
    fn vocabulary_doc_frequencies() {
        let stoplist = StopList::uspto();
        let a = document_frequencies("d1", "car cars food", &stoplist);
        let b = document_frequencies("d2", "car", &stoplist);
        let w = window_frequencies("w", &[a.clone(), b.clone()]);
        let vocab = build_vocabulary(&w, &[a, b], 0, 100).unwrap();
        assert_eq!(vocab.entry("car").unwrap().doc_frequency, 2);
        assert_eq!(vocab.entry("food").unwrap().doc_frequency, 1);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn batch_frequencies_parallel_matches_sequential() {
        let stoplist = StopList::uspto();
        let docs: Vec<(String, String)> = (0..32)
            .map(|i| {
                (
                    format!("d{i}"),
                    format!("sweetener sugar diet drinks item{i} the of"),
                )
            })
            .collect();
        let borrowed: Vec<(&str, &str)> = docs
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        assert_eq!(
            batch_document_frequencies_par(&borrowed, &stoplist),
            batch_document_frequencies_seq(&borrowed, &stoplist)
        );
    }
}
