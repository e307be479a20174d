//! Run configuration: a single JSON file drives every subcommand, and
//! its analysis-relevant fields serialize to a canonical fingerprint
//! string. Two snapshots are comparable only when their fingerprints
//! match.

use std::path::PathBuf;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::DateRule;
use crate::layout::LayoutParams;
use crate::netbuild::NodeSizing;
use crate::textprep::StopList;

pub const DEFAULT_VOCAB_CAP: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// The paper's five focal words, the default for `compare`.
pub const DEFAULT_FOCAL_WORDS: [&str; 5] = ["product", "sweetener", "food", "sugar", "diet"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Similarity {
    #[default]
    Cosine,
    Pearson,
}

impl std::fmt::Display for Similarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Similarity::Cosine => f.write_str("cosine"),
            Similarity::Pearson => f.write_str("pearson"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input_dir: PathBuf,
    /// Stopword file; the bundled USPTO list when absent.
    #[serde(default)]
    pub stopword_file: Option<PathBuf>,
    #[serde(default)]
    pub date_rule: DateRule,
    #[serde(default)]
    pub include_undated: bool,
    /// Words must occur strictly more often than this to enter the
    /// vocabulary. Mandatory: the cutoff is a per-dataset choice.
    pub min_occurrences: u32,
    #[serde(default = "default_vocab_cap")]
    pub vocab_cap: usize,
    #[serde(default)]
    pub threshold_override: Option<f64>,
    #[serde(default)]
    pub similarity: Similarity,
    #[serde(default)]
    pub binary_counts: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_l0")]
    pub l0: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Base of the node-size logarithm.
    #[serde(default = "default_node_log_base")]
    pub node_log_base: f64,
    /// Display size for frequency-1 nodes, whose log would be zero.
    #[serde(default = "default_node_min_size")]
    pub node_min_size: f64,
    #[serde(default)]
    pub windows: Vec<WindowSpec>,
}

fn default_vocab_cap() -> usize {
    DEFAULT_VOCAB_CAP
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_l0() -> f64 {
    1.0
}
fn default_k() -> f64 {
    1.0
}
fn default_epsilon() -> f64 {
    1e-4
}
fn default_node_log_base() -> f64 {
    std::f64::consts::E
}
fn default_node_min_size() -> f64 {
    0.1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.vocab_cap == 0 {
            return Err("vocab_cap must be at least 1".to_string());
        }
        if let Some(t) = self.threshold_override {
            if !(0.0..=1.0).contains(&t) {
                return Err(format!("threshold_override {t} outside [0, 1]"));
            }
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.epsilon) {
            return Err(format!("epsilon {} must be positive", self.epsilon));
        }
        if !positive(self.l0) || !positive(self.k) {
            return Err(format!("l0 {} and k {} must be positive", self.l0, self.k));
        }
        if self.max_iter == Some(0) {
            return Err("max_iter must be at least 1".to_string());
        }
        if !self.node_log_base.is_finite() || self.node_log_base <= 1.0 {
            return Err(format!(
                "node_log_base {} must be greater than 1",
                self.node_log_base
            ));
        }
        if !positive(self.node_min_size) {
            return Err(format!(
                "node_min_size {} must be positive",
                self.node_min_size
            ));
        }
        let mut labels: Vec<&str> = self.windows.iter().map(|w| w.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.windows.len() {
            return Err("window labels must be distinct".to_string());
        }
        for w in &self.windows {
            if w.start > w.end {
                return Err(format!("window {:?}: start after end", w.label));
            }
        }
        Ok(())
    }

    pub fn window(&self, label: &str) -> Option<&WindowSpec> {
        self.windows.iter().find(|w| w.label == label)
    }

    pub fn layout_params(&self) -> LayoutParams {
        LayoutParams {
            seed: self.seed,
            epsilon: self.epsilon,
            max_iter: self.max_iter,
            unit_length: self.l0,
            spring_constant: self.k,
        }
    }

    pub fn node_sizing(&self) -> NodeSizing {
        NodeSizing {
            log_base: self.node_log_base,
            min_size: self.node_min_size,
        }
    }

    /// Canonical fingerprint over every field that changes analysis
    /// results. The stopword list enters as a content hash, so swapping
    /// the file's contents breaks comparability even under the same
    /// path. Window bounds and the input directory are deliberately
    /// excluded: comparing different windows is the point.
    pub fn fingerprint(&self, stoplist: &StopList) -> String {
        let threshold = match self.threshold_override {
            Some(t) => t.to_string(),
            None => "derived".to_string(),
        };
        let max_iter = match self.max_iter {
            Some(m) => m.to_string(),
            None => "default".to_string(),
        };
        let date_rule = match self.date_rule {
            DateRule::None => "none",
            DateRule::IsoPrefix => "iso-prefix",
        };
        format!(
            "framescope-config v1 min_occurrences={} vocab_cap={} similarity={} binary={} \
             threshold={} seed={} l0={} k={} epsilon={} max_iter={} node_log_base={} \
             node_min_size={} date_rule={} include_undated={} stopwords=sha256:{}",
            self.min_occurrences,
            self.vocab_cap,
            self.similarity,
            self.binary_counts,
            threshold,
            self.seed,
            self.l0,
            self.k,
            self.epsilon,
            max_iter,
            self.node_log_base,
            self.node_min_size,
            date_rule,
            self.include_undated,
            stoplist.sha256(),
        )
    }
}
