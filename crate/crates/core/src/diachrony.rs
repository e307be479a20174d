//! Frame drift between two window snapshots.
//!
//! Movement toward the core requires agreement of two independent
//! signals: the word's weighted degree must rise *and* its distance to
//! the size-weighted layout centroid must fall. Layout coordinates
//! alone are seed-sensitive; when the signals disagree the verdict is
//! "stable". Emerging terms are stems that enter the later graph
//! without any trace (included or excluded) in the earlier vocabulary.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::LayoutResult;
use crate::netbuild::{weighted_degree, SemanticGraph};
use crate::textprep::{stem_plural, Vocabulary};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("snapshots not comparable: config fingerprints differ\n  before: {before}\n  after:  {after}")]
    FingerprintMismatch { before: String, after: String },
    #[error("stem {0:?} is not a node of snapshot {1:?}")]
    UnknownStem(String, String),
}

/// The full analysis state of one time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub window_label: String,
    pub config_fingerprint: String,
    pub vocab: Vocabulary,
    pub graph: SemanticGraph,
    pub layout: LayoutResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    MovedCoreward,
    MovedPeripheryward,
    Stable,
    Entered,
    Exited,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::MovedCoreward => "moved-coreward",
            Verdict::MovedPeripheryward => "moved-peripheryward",
            Verdict::Stable => "stable",
            Verdict::Entered => "entered",
            Verdict::Exited => "exited",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalTrajectory {
    pub stem: String,
    pub centrality_before: Option<f64>,
    pub centrality_after: Option<f64>,
    pub centroid_distance_before: Option<f64>,
    pub centroid_distance_after: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergingTerm {
    pub stem: String,
    pub weighted_degree: f64,
    /// True for hyphenated compounds whose head or tail is an already
    /// known vocabulary stem — the "aspartame-infused" pattern.
    pub is_compound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDiff {
    pub before_label: String,
    pub after_label: String,
    pub trajectories: Vec<FocalTrajectory>,
    /// Focal stems present in neither snapshot's graph.
    pub missing: Vec<String>,
    pub emerging: Vec<EmergingTerm>,
}

/// Normalized distance from a word to the size-weighted centroid of all
/// node positions: 0 at the centroid, 1 for the farthest node.
pub fn centroid_distance(s: &Snapshot, stem: &str) -> Result<f64, CompareError> {
    let idx = s
        .graph
        .node_index(stem)
        .ok_or_else(|| CompareError::UnknownStem(stem.to_string(), s.window_label.clone()))?;

    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut total = 0.0;
    let coords: Vec<(f64, f64)> = s
        .graph
        .nodes
        .iter()
        .map(|n| {
            let p = s.layout.position(&n.stem).unwrap_or((0.0, 0.0));
            cx += n.size * p.0;
            cy += n.size * p.1;
            total += n.size;
            p
        })
        .collect();
    if total > 0.0 {
        cx /= total;
        cy /= total;
    }

    let d = |p: (f64, f64)| ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt();
    let max = coords.iter().map(|&p| d(p)).fold(0.0f64, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    Ok(d(coords[idx]) / max)
}

fn metrics(s: &Snapshot, stem: &str) -> Option<(f64, f64)> {
    s.graph.node_index(stem)?;
    let wd = weighted_degree(&s.graph, stem).ok()?;
    let cd = centroid_distance(s, stem).ok()?;
    Some((wd, cd))
}

/// Compares two snapshots built under the same configuration.
///
/// Focal stems are looked up in both graphs; movement verdicts follow
/// the two-signal rule (see module docs). Emerging terms come from
/// [`detect_emerging_terms`].
pub fn compare_snapshots(
    before: &Snapshot,
    after: &Snapshot,
    focal: &[String],
) -> Result<SnapshotDiff, CompareError> {
    check_comparable(before, after)?;

    let mut trajectories = Vec::new();
    let mut missing = Vec::new();
    for stem in focal {
        let b = metrics(before, stem);
        let a = metrics(after, stem);
        let verdict = match (&b, &a) {
            (None, None) => {
                missing.push(stem.clone());
                continue;
            }
            (None, Some(_)) => Verdict::Entered,
            (Some(_), None) => Verdict::Exited,
            (Some((wd_b, cd_b)), Some((wd_a, cd_a))) => {
                if wd_a > wd_b && cd_a < cd_b {
                    Verdict::MovedCoreward
                } else if wd_a < wd_b && cd_a > cd_b {
                    Verdict::MovedPeripheryward
                } else {
                    Verdict::Stable
                }
            }
        };
        trajectories.push(FocalTrajectory {
            stem: stem.clone(),
            centrality_before: b.map(|(wd, _)| wd),
            centrality_after: a.map(|(wd, _)| wd),
            centroid_distance_before: b.map(|(_, cd)| cd),
            centroid_distance_after: a.map(|(_, cd)| cd),
            verdict,
        });
    }

    Ok(SnapshotDiff {
        before_label: before.window_label.clone(),
        after_label: after.window_label.clone(),
        trajectories,
        missing,
        emerging: detect_emerging_terms(before, after)?,
    })
}

fn check_comparable(before: &Snapshot, after: &Snapshot) -> Result<(), CompareError> {
    if before.config_fingerprint != after.config_fingerprint {
        return Err(CompareError::FingerprintMismatch {
            before: before.config_fingerprint.clone(),
            after: after.config_fingerprint.clone(),
        });
    }
    Ok(())
}

/// Stems of the later graph that the earlier vocabulary has never seen,
/// ranked by weighted degree. A word that was merely below the earlier
/// cutoff does not emerge — it "entered".
pub fn detect_emerging_terms(
    before: &Snapshot,
    after: &Snapshot,
) -> Result<Vec<EmergingTerm>, CompareError> {
    check_comparable(before, after)?;

    let known: BTreeSet<&str> = before
        .vocab
        .entries
        .iter()
        .map(|e| e.stem.as_str())
        .chain(after.vocab.entries.iter().map(|e| e.stem.as_str()))
        .collect();

    let mut out: Vec<EmergingTerm> = after
        .graph
        .stems()
        .filter(|stem| !before.vocab.contains_stem(stem))
        .map(|stem| {
            let wd = weighted_degree(&after.graph, stem).unwrap_or(0.0);
            EmergingTerm {
                stem: stem.to_string(),
                weighted_degree: wd,
                is_compound: compound_of_known(stem, &known),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.weighted_degree
            .partial_cmp(&a.weighted_degree)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.stem.cmp(&b.stem))
    });
    Ok(out)
}

fn compound_of_known(stem: &str, known: &BTreeSet<&str>) -> bool {
    if !stem.contains('-') {
        return false;
    }
    let head = stem.split('-').next().unwrap_or("");
    let tail = stem.rsplit('-').next().unwrap_or("");
    [head, tail]
        .iter()
        .filter(|part| !part.is_empty() && *part != &stem)
        .any(|part| known.contains(stem_plural(part).as_str()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::LayoutResult;
    use crate::netbuild::{GraphEdge, GraphNode, SemanticGraph};
    use crate::textprep::{FrequencyList, Vocabulary};
    use std::collections::BTreeMap;

    fn vocab(stems: &[(&str, u32)]) -> Vocabulary {
        let counts: BTreeMap<String, u32> =
            stems.iter().map(|(s, c)| (s.to_string(), *c)).collect();
        let wf = FrequencyList {
            scope: "w".into(),
            counts,
        };
        crate::textprep::build_vocabulary(&wf, std::slice::from_ref(&wf), 0, 100).unwrap()
    }

    fn snapshot(
        label: &str,
        nodes: &[(&str, u32, f64, (f64, f64))],
        edges: &[(usize, usize, f64)],
    ) -> Snapshot {
        let graph = SemanticGraph {
            nodes: nodes
                .iter()
                .map(|(stem, freq, size, _)| GraphNode {
                    stem: stem.to_string(),
                    frequency: *freq,
                    size: *size,
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(a, b, weight)| GraphEdge { a, b, weight })
                .collect(),
            threshold_used: 0.4,
        };
        let positions: BTreeMap<String, (f64, f64)> = nodes
            .iter()
            .map(|(stem, _, _, p)| (stem.to_string(), *p))
            .collect();
        Snapshot {
            window_label: label.to_string(),
            config_fingerprint: "fp1".to_string(),
            vocab: vocab(
                &nodes
                    .iter()
                    .map(|(s, f, _, _)| (*s, *f))
                    .collect::<Vec<_>>(),
            ),
            graph,
            layout: LayoutResult {
                positions,
                initial_energy: 1.0,
                final_energy: 0.5,
                iterations: 10,
                seed: 42,
                converged: true,
            },
        }
    }

    #[test]
    fn centroid_distance_extremes() {
        // equal sizes on a line: centroid at the middle node
        let s = snapshot(
            "w",
            &[
                ("a", 10, 1.0, (0.0, 0.0)),
                ("b", 10, 1.0, (1.0, 0.0)),
                ("c", 10, 1.0, (2.0, 0.0)),
            ],
            &[(0, 1, 0.5), (1, 2, 0.5)],
        );
        assert_eq!(centroid_distance(&s, "b").unwrap(), 0.0);
        assert_eq!(centroid_distance(&s, "a").unwrap(), 1.0);
        assert_eq!(centroid_distance(&s, "c").unwrap(), 1.0);
        assert!(centroid_distance(&s, "nope").is_err());
    }

    #[test]
    fn equilateral_triangle_is_all_periphery() {
        let h = 3f64.sqrt() / 2.0;
        let s = snapshot(
            "w",
            &[
                ("a", 10, 1.0, (0.0, 0.0)),
                ("b", 10, 1.0, (1.0, 0.0)),
                ("c", 10, 1.0, (0.5, h)),
            ],
            &[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)],
        );
        for stem in ["a", "b", "c"] {
            let d = centroid_distance(&s, stem).unwrap();
            assert!((d - 1.0).abs() < 1e-12, "{stem}: {d}");
        }
    }

    #[test]
    fn size_weighting_pulls_the_centroid() {
        let s = snapshot(
            "w",
            &[
                ("hub", 100, 10.0, (0.0, 0.0)),
                ("leaf", 2, 1.0, (1.0, 0.0)),
            ],
            &[(0, 1, 0.5)],
        );
        // centroid sits near the heavy hub
        assert!(centroid_distance(&s, "hub").unwrap() < centroid_distance(&s, "leaf").unwrap());
    }

    #[test]
    fn self_comparison_is_all_stable_with_nothing_emerging() {
        let s = snapshot(
            "w",
            &[
                ("diet", 20, 3.0, (0.0, 0.0)),
                ("food", 30, 3.4, (1.0, 0.0)),
            ],
            &[(0, 1, 0.8)],
        );
        let diff =
            compare_snapshots(&s, &s, &["diet".to_string(), "food".to_string()]).unwrap();
        assert!(diff
            .trajectories
            .iter()
            .all(|t| t.verdict == Verdict::Stable));
        assert!(diff.emerging.is_empty());
        assert!(diff.missing.is_empty());
    }

    #[test]
    fn coreward_needs_both_signals() {
        let before = snapshot(
            "A",
            &[
                ("core1", 40, 3.7, (0.0, 0.0)),
                ("core2", 40, 3.7, (0.5, 0.0)),
                ("diet", 12, 2.5, (4.0, 0.0)),
            ],
            &[(0, 1, 0.9), (1, 2, 0.45)],
        );
        let mut after = snapshot(
            "B",
            &[
                ("core1", 40, 3.7, (0.0, 0.0)),
                ("core2", 40, 3.7, (0.5, 0.0)),
                ("diet", 30, 3.4, (0.25, 0.1)),
            ],
            &[(0, 1, 0.9), (1, 2, 0.8), (0, 2, 0.8)],
        );
        after.config_fingerprint = before.config_fingerprint.clone();
        let diff = compare_snapshots(&before, &after, &["diet".to_string()]).unwrap();
        assert_eq!(diff.trajectories[0].verdict, Verdict::MovedCoreward);

        // reversed direction
        let diff = compare_snapshots(&after, &before, &["diet".to_string()]).unwrap();
        assert_eq!(diff.trajectories[0].verdict, Verdict::MovedPeripheryward);
    }

    #[test]
    fn disagreeing_signals_stay_stable() {
        // weighted degree rises but the word moves outward
        let before = snapshot(
            "A",
            &[
                ("a", 40, 3.7, (0.0, 0.0)),
                ("b", 40, 3.7, (1.0, 0.0)),
                ("diet", 12, 2.5, (0.5, 0.1)),
            ],
            &[(0, 1, 0.5), (1, 2, 0.4)],
        );
        let after = snapshot(
            "A2",
            &[
                ("a", 40, 3.7, (0.0, 0.0)),
                ("b", 40, 3.7, (1.0, 0.0)),
                ("diet", 12, 2.5, (3.0, 0.0)),
            ],
            &[(0, 1, 0.5), (1, 2, 0.6), (0, 2, 0.6)],
        );
        let diff = compare_snapshots(&before, &after, &["diet".to_string()]).unwrap();
        assert_eq!(diff.trajectories[0].verdict, Verdict::Stable);
    }

    #[test]
    fn entered_exited_and_missing() {
        let before = snapshot("A", &[("a", 10, 2.3, (0.0, 0.0)), ("b", 10, 2.3, (1.0, 0.0))], &[(0, 1, 0.6)]);
        let after = snapshot("B", &[("a", 10, 2.3, (0.0, 0.0)), ("c", 10, 2.3, (1.0, 0.0))], &[(0, 1, 0.6)]);
        let focal: Vec<String> = ["b", "c", "zz"].iter().map(|s| s.to_string()).collect();
        let diff = compare_snapshots(&before, &after, &focal).unwrap();
        assert_eq!(diff.trajectories[0].verdict, Verdict::Exited);
        assert_eq!(diff.trajectories[1].verdict, Verdict::Entered);
        assert_eq!(diff.missing, ["zz"]);
    }

    #[test]
    fn mismatched_fingerprints_are_rejected() {
        let a = snapshot("A", &[("a", 10, 2.3, (0.0, 0.0)), ("b", 10, 2.3, (1.0, 0.0))], &[(0, 1, 0.6)]);
        let mut b = a.clone();
        b.config_fingerprint = "fp2".to_string();
        assert!(matches!(
            compare_snapshots(&a, &b, &[]),
            Err(CompareError::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn emerging_terms_and_compound_detection() {
        let before = snapshot(
            "A",
            &[
                ("aspartame", 30, 3.4, (0.0, 0.0)),
                ("sugar", 30, 3.4, (1.0, 0.0)),
            ],
            &[(0, 1, 0.7)],
        );
        let after = snapshot(
            "B",
            &[
                ("aspartame", 30, 3.4, (0.0, 0.0)),
                ("sugar", 30, 3.4, (1.0, 0.0)),
                ("aspartame-infused", 12, 2.5, (0.2, 0.4)),
                ("splenda", 14, 2.6, (0.8, 0.4)),
            ],
            &[(0, 1, 0.7), (0, 2, 0.9), (1, 3, 0.8)],
        );
        let emerging = detect_emerging_terms(&before, &after).unwrap();
        let stems: Vec<&str> = emerging.iter().map(|e| e.stem.as_str()).collect();
        assert_eq!(stems.len(), 2);
        assert!(stems.contains(&"aspartame-infused"));
        assert!(stems.contains(&"splenda"));
        let infused = emerging
            .iter()
            .find(|e| e.stem == "aspartame-infused")
            .unwrap();
        assert!(infused.is_compound);
        let splenda = emerging.iter().find(|e| e.stem == "splenda").unwrap();
        assert!(!splenda.is_compound);
        // ranked by weighted degree
        assert!(emerging[0].weighted_degree >= emerging[1].weighted_degree);
    }

    #[test]
    fn below_cutoff_words_do_not_emerge() {
        let mut before = snapshot(
            "A",
            &[("a", 20, 3.0, (0.0, 0.0)), ("b", 20, 3.0, (1.0, 0.0))],
            &[(0, 1, 0.7)],
        );
        // "splenda" was observed in A but fell below the cutoff
        before.vocab.entries.push(crate::textprep::VocabEntry {
            stem: "splenda".into(),
            window_frequency: 3,
            doc_frequency: 1,
            included: false,
        });
        let after = snapshot(
            "B",
            &[
                ("a", 20, 3.0, (0.0, 0.0)),
                ("splenda", 15, 2.7, (1.0, 0.0)),
            ],
            &[(0, 1, 0.7)],
        );
        let emerging = detect_emerging_terms(&before, &after).unwrap();
        assert!(emerging.is_empty());
    }
}
