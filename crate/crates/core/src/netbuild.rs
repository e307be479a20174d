//! From similarity matrix to semantic graph: threshold derivation,
//! edge selection, log-frequency node sizing, isolate removal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::Vocabulary;
use crate::vectorspace::CosineMatrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("threshold undefined for a single-word matrix")]
    SingleWord,
    #[error("threshold too high; no edges survive at {0}")]
    NoEdges(f64),
    #[error("threshold {0} outside [-1, 1]")]
    BadThreshold(f64),
    #[error("stem {0:?} is not a node of the graph")]
    UnknownStem(String),
    #[error("matrix words and vocabulary included stems disagree at position {0}")]
    VocabMismatch(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub stem: String,
    pub frequency: u32,
    /// Display size: log(frequency), with a floor for frequency 1.
    pub size: f64,
}

/// Undirected edge; `a` and `b` index into `SemanticGraph::nodes` and
/// are ordered so that `nodes[a].stem < nodes[b].stem` lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// The thresholded word-similarity network. Isolates are removed, so
/// every node has degree ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub threshold_used: f64,
}

/// Node sizing parameters: size = ln(frequency)/ln(base), with
/// `min_size` standing in for frequency-1 nodes whose log would be 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeSizing {
    pub log_base: f64,
    pub min_size: f64,
}

impl Default for NodeSizing {
    fn default() -> Self {
        Self {
            log_base: std::f64::consts::E,
            min_size: 0.1,
        }
    }
}

impl NodeSizing {
    pub fn size_for(&self, frequency: u32) -> f64 {
        let s = f64::from(frequency).ln() / self.log_base.ln();
        if s > 0.0 {
            s
        } else {
            self.min_size
        }
    }
}

/// Mean of the strictly-lower-triangle cells (diagonal excluded, zeros
/// included). This is the default edge cutoff.
pub fn derive_threshold(c: &CosineMatrix) -> Result<f64, GraphError> {
    mean_lower_triangle(c.n_words(), c.cells())
}

/// Same cutoff rule for any symmetric similarity matrix; non-finite
/// cells (undefined Pearson rows) are excluded from the mean.
pub fn mean_lower_triangle(n: usize, cells: &[f64]) -> Result<f64, GraphError> {
    if n < 2 {
        return Err(GraphError::SingleWord);
    }
    let mut sum = 0.0;
    let mut count = 0u64;
    for i in 1..n {
        for j in 0..i {
            let v = cells[i * n + j];
            if v.is_finite() {
                sum += v;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(GraphError::SingleWord);
    }
    Ok(sum / count as f64)
}

/// Builds the semantic graph from a cosine matrix.
///
/// An edge (w, v) exists iff cosine(w, v) ≥ threshold (inclusive) and
/// w ≠ v. Nodes left without edges are removed; an empty result is an
/// error, pointing at a threshold set too high.
pub fn build_graph(
    c: &CosineMatrix,
    vocab: &Vocabulary,
    threshold: f64,
    sizing: &NodeSizing,
) -> Result<SemanticGraph, GraphError> {
    let freqs: Vec<u32> = c
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| {
            vocab
                .entry(w)
                .map(|e| e.window_frequency)
                .ok_or(GraphError::VocabMismatch(i))
        })
        .collect::<Result<_, _>>()?;
    build_graph_from_similarity(&c.words, c.cells(), &freqs, threshold, sizing)
}

/// Graph construction over raw similarity cells; used directly for the
/// Pearson comparison path. Non-finite cells never form edges.
pub fn build_graph_from_similarity(
    words: &[String],
    cells: &[f64],
    frequencies: &[u32],
    threshold: f64,
    sizing: &NodeSizing,
) -> Result<SemanticGraph, GraphError> {
    if !threshold.is_finite() || !(-1.0..=1.0).contains(&threshold) {
        return Err(GraphError::BadThreshold(threshold));
    }
    let n = words.len();
    let mut degree = vec![0usize; n];
    let mut raw_edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = cells[i * n + j];
            if v.is_finite() && v >= threshold {
                raw_edges.push((i, j, v));
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    if raw_edges.is_empty() {
        return Err(GraphError::NoEdges(threshold));
    }

    // Drop isolates and reindex the survivors, keeping vocabulary order.
    let mut new_index = vec![usize::MAX; n];
    let mut nodes = Vec::new();
    for i in 0..n {
        if degree[i] > 0 {
            new_index[i] = nodes.len();
            nodes.push(GraphNode {
                stem: words[i].clone(),
                frequency: frequencies[i],
                size: sizing.size_for(frequencies[i]),
            });
        }
    }
    let mut edges: Vec<GraphEdge> = raw_edges
        .into_iter()
        .map(|(i, j, weight)| {
            let (a, b) = if nodes[new_index[i]].stem <= nodes[new_index[j]].stem {
                (new_index[i], new_index[j])
            } else {
                (new_index[j], new_index[i])
            };
            GraphEdge { a, b, weight }
        })
        .collect();
    edges.sort_by(|x, y| {
        (&nodes[x.a].stem, &nodes[x.b].stem).cmp(&(&nodes[y.a].stem, &nodes[y.b].stem))
    });

    Ok(SemanticGraph {
        nodes,
        edges,
        threshold_used: threshold,
    })
}

impl SemanticGraph {
    pub fn node_index(&self, stem: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.stem == stem)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Adjacency list as (neighbor index, weight) pairs.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        adj
    }

    pub fn stems(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.stem.as_str())
    }
}

/// Sum of a node's incident edge weights, normalized by (node count − 1);
/// lies in [0, 1] for cosine-weighted graphs.
pub fn weighted_degree(g: &SemanticGraph, stem: &str) -> Result<f64, GraphError> {
    let idx = g
        .node_index(stem)
        .ok_or_else(|| GraphError::UnknownStem(stem.to_string()))?;
    let sum: f64 = g
        .edges
        .iter()
        .filter(|e| e.a == idx || e.b == idx)
        .map(|e| e.weight)
        .sum();
    Ok(sum / (g.node_count() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textprep::{FrequencyList, Vocabulary};
    use crate::vectorspace::CosineMatrix;
    use std::collections::BTreeMap;

    fn cosine3(c01: f64, c02: f64, c12: f64) -> CosineMatrix {
        let cells = vec![1.0, c01, c02, c01, 1.0, c12, c02, c12, 1.0];
        CosineMatrix::from_cells(vec!["a".into(), "b".into(), "c".into()], cells).unwrap()
    }

    fn vocab_for(stems: &[(&str, u32)]) -> Vocabulary {
        let counts: BTreeMap<String, u32> = stems
            .iter()
            .map(|(s, c)| (s.to_string(), *c))
            .collect();
        let wf = FrequencyList {
            scope: "w".into(),
            counts,
        };
        crate::textprep::build_vocabulary(&wf, std::slice::from_ref(&wf), 0, 100).unwrap()
    }

    #[test]
    fn threshold_is_the_lower_triangle_mean() {
        // lower-triangle cells {0.2, 0.4, 0.6} → mean 0.4
        let c = cosine3(0.2, 0.4, 0.6);
        let t = derive_threshold(&c).unwrap();
        assert_eq!(t, (0.2 + 0.4 + 0.6) / 3.0);
        assert!((t - 0.4).abs() < 1e-15);
    }

    #[test]
    fn threshold_of_zero_and_constant_matrices() {
        assert_eq!(derive_threshold(&cosine3(0.0, 0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(derive_threshold(&cosine3(0.3, 0.3, 0.3)).unwrap(), 0.3);
    }

    #[test]
    fn threshold_needs_two_words() {
        let c = CosineMatrix::from_cells(vec!["solo".into()], vec![1.0]).unwrap();
        assert!(matches!(derive_threshold(&c), Err(GraphError::SingleWord)));
    }

    #[test]
    fn build_graph_removes_isolates() {
        // pairwise cosines {ab: 0.6, ac: 0.3, bc: 0.3}, threshold 0.5:
        // one edge a—b survives, c is dropped.
        let c = cosine3(0.6, 0.3, 0.3);
        let vocab = vocab_for(&[("a", 10), ("b", 20), ("c", 30)]);
        let g = build_graph(&c, &vocab, 0.5, &NodeSizing::default()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.node_index("c").is_none());
    }

    #[test]
    fn threshold_zero_gives_complete_graph() {
        let c = cosine3(0.1, 0.2, 0.3);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let g = build_graph(&c, &vocab, 0.0, &NodeSizing::default()).unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn edge_exactly_at_threshold_is_kept() {
        let c = cosine3(0.51, 0.0, 0.0);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let g = build_graph(&c, &vocab, 0.51, &NodeSizing::default()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges[0].weight, 0.51);
    }

    #[test]
    fn too_high_threshold_is_an_error() {
        let c = cosine3(0.1, 0.2, 0.3);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let err = build_graph(&c, &vocab, 0.99, &NodeSizing::default()).unwrap_err();
        assert!(err.to_string().contains("threshold too high"));
    }

    #[test]
    fn node_sizes_are_log_frequency() {
        let sizing = NodeSizing::default();
        assert!((sizing.size_for(100) - 100f64.ln()).abs() < 1e-15);
        assert_eq!(sizing.size_for(1), 0.1);
        assert!(sizing.size_for(2) > 0.0);
    }

    #[test]
    fn weighted_degree_normalizes_by_node_count() {
        // single incident edge of weight 0.6 in a 3-node graph → 0.3
        let c = cosine3(0.6, 0.0, 0.5);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let g = build_graph(&c, &vocab, 0.5, &NodeSizing::default()).unwrap();
        assert_eq!(g.node_count(), 3);
        let wd = weighted_degree(&g, "a").unwrap();
        assert!((wd - 0.3).abs() < 1e-15);
    }

    #[test]
    fn weighted_degree_two_node_maximum() {
        let cells = vec![1.0, 1.0, 1.0, 1.0];
        let c = CosineMatrix::from_cells(vec!["a".into(), "b".into()], cells).unwrap();
        let vocab = vocab_for(&[("a", 2), ("b", 2)]);
        let g = build_graph(&c, &vocab, 0.5, &NodeSizing::default()).unwrap();
        assert_eq!(weighted_degree(&g, "a").unwrap(), 1.0);
    }

    #[test]
    fn weighted_degree_unknown_stem_errors() {
        let c = cosine3(0.6, 0.6, 0.6);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let g = build_graph(&c, &vocab, 0.5, &NodeSizing::default()).unwrap();
        assert!(weighted_degree(&g, "zzz").is_err());
    }

    #[test]
    fn edges_are_stored_lexicographically() {
        let c = cosine3(0.9, 0.8, 0.7);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let g = build_graph(&c, &vocab, 0.0, &NodeSizing::default()).unwrap();
        for e in &g.edges {
            assert!(g.nodes[e.a].stem < g.nodes[e.b].stem);
        }
        let pairs: Vec<(String, String)> = g
            .edges
            .iter()
            .map(|e| (g.nodes[e.a].stem.clone(), g.nodes[e.b].stem.clone()))
            .collect();
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
    }

    #[test]
    fn raising_threshold_never_adds_edges() {
        let c = cosine3(0.2, 0.5, 0.8);
        let vocab = vocab_for(&[("a", 2), ("b", 2), ("c", 2)]);
        let lo = build_graph(&c, &vocab, 0.1, &NodeSizing::default()).unwrap();
        let hi = build_graph(&c, &vocab, 0.45, &NodeSizing::default()).unwrap();
        let edge_set = |g: &SemanticGraph| -> Vec<(String, String)> {
            g.edges
                .iter()
                .map(|e| (g.nodes[e.a].stem.clone(), g.nodes[e.b].stem.clone()))
                .collect()
        };
        let lo_set = edge_set(&lo);
        for e in edge_set(&hi) {
            assert!(lo_set.contains(&e));
        }
        assert!(hi.edge_count() <= lo.edge_count());
    }
}
