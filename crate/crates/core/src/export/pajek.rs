//! Pajek `.net` writer and reader for the subset this tool emits:
//! `*Vertices n` with per-vertex coordinates and size, then `*Edges`
//! with weights. Coordinates are min-max normalized into the unit
//! square, six fractional digits, LF line endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::layout::LayoutResult;
use crate::netbuild::{GraphEdge, GraphNode, SemanticGraph};

use super::ExportError;

fn normalize_axis(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    values
        .iter()
        .map(|&v| if span > 0.0 { (v - min) / span } else { 0.5 })
        .collect()
}

fn quote_label(label: &str) -> String {
    format!("\"{}\"", label.replace('"', "\"\""))
}

/// Renders the graph and layout as Pajek `.net` text.
pub fn pajek_string(g: &SemanticGraph, l: &LayoutResult) -> Result<String, ExportError> {
    let coords: Vec<(f64, f64)> = g
        .nodes
        .iter()
        .map(|n| {
            l.position(&n.stem)
                .ok_or_else(|| ExportError::MissingPosition(n.stem.clone()))
        })
        .collect::<Result<_, _>>()?;
    let xs = normalize_axis(&coords.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = normalize_axis(&coords.iter().map(|p| p.1).collect::<Vec<_>>());

    let mut out = String::new();
    writeln!(out, "*Vertices {}", g.nodes.len()).unwrap();
    for (i, node) in g.nodes.iter().enumerate() {
        writeln!(
            out,
            "{} {} {:.6} {:.6} {:.6}",
            i + 1,
            quote_label(&node.stem),
            xs[i],
            ys[i],
            node.size
        )
        .unwrap();
    }
    writeln!(out, "*Edges").unwrap();
    for e in &g.edges {
        writeln!(out, "{} {} {:.6}", e.a + 1, e.b + 1, e.weight).unwrap();
    }
    Ok(out)
}

pub fn write_pajek(
    g: &SemanticGraph,
    l: &LayoutResult,
    path: &Path,
) -> Result<(), ExportError> {
    let text = pajek_string(g, l)?;
    std::fs::write(path, text).map_err(|source| ExportError::Write {
        path: path.display().to_string(),
        source,
    })
}

struct LineParser<'a> {
    path: &'a str,
    line_no: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, message: impl Into<String>) -> ExportError {
        ExportError::Parse {
            path: self.path.to_string(),
            line: self.line_no,
            message: message.into(),
        }
    }
}

/// Splits `i "label" x y size` handling doubled inner quotes.
fn parse_vertex_line(p: &LineParser, line: &str) -> Result<(usize, String, f64, f64, f64), ExportError> {
    let line = line.trim_end();
    let (idx_str, rest) = line
        .split_once(' ')
        .ok_or_else(|| p.err("expected vertex index"))?;
    let index: usize = idx_str
        .parse()
        .map_err(|_| p.err(format!("bad vertex index {idx_str:?}")))?;
    let rest = rest.trim_start();
    if !rest.starts_with('"') {
        return Err(p.err("expected quoted label"));
    }
    let bytes = rest.as_bytes();
    let mut label = String::new();
    let mut i = 1;
    loop {
        if i >= bytes.len() {
            return Err(p.err("unterminated label"));
        }
        if bytes[i] == b'"' {
            if i + 1 < bytes.len() && bytes[i + 1] == b'"' {
                label.push('"');
                i += 2;
            } else {
                i += 1;
                break;
            }
        } else {
            let ch_start = i;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            label.push_str(&rest[ch_start..i]);
        }
    }
    let nums: Vec<&str> = rest[i..].split_whitespace().collect();
    if nums.len() != 3 {
        return Err(p.err(format!("expected x y size, found {} fields", nums.len())));
    }
    let parse = |s: &str| -> Result<f64, ExportError> {
        s.parse().map_err(|_| p.err(format!("bad number {s:?}")))
    };
    Ok((index, label, parse(nums[0])?, parse(nums[1])?, parse(nums[2])?))
}

/// Reads a `.net` file written by [`write_pajek`] back into a graph and
/// layout. Node frequencies are recovered from the stored log sizes;
/// the layout carries positions only (energies and counters are zeroed).
pub fn read_pajek(path: &Path) -> Result<(SemanticGraph, LayoutResult), ExportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExportError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate();

    let mut p = LineParser {
        path: &path_str,
        line_no: 1,
    };
    let (n0, first) = lines.next().ok_or_else(|| p.err("empty file"))?;
    p.line_no = n0 + 1;
    let n: usize = first
        .strip_prefix("*Vertices ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| p.err("expected `*Vertices n`"))?;

    let mut nodes = Vec::with_capacity(n);
    let mut positions = std::collections::BTreeMap::new();
    for expected in 1..=n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| p.err(format!("expected vertex {expected}")))?;
        p.line_no = ln + 1;
        let (index, label, x, y, size) = parse_vertex_line(&p, line)?;
        if index != expected {
            return Err(p.err(format!("vertex index {index} out of order; expected {expected}")));
        }
        let frequency = size.exp().round().max(1.0) as u32;
        positions.insert(label.clone(), (x, y));
        nodes.push(GraphNode {
            stem: label,
            frequency,
            size,
        });
    }

    let (ln, marker) = lines
        .next()
        .ok_or_else(|| p.err("missing *Edges section"))?;
    p.line_no = ln + 1;
    if marker.trim() != "*Edges" {
        return Err(p.err(format!("expected `*Edges`, found {marker:?}")));
    }

    let mut edges = Vec::new();
    for (ln, line) in lines {
        p.line_no = ln + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(p.err(format!("expected `i j weight`, found {line:?}")));
        }
        let a: usize = fields[0]
            .parse()
            .map_err(|_| p.err(format!("bad vertex index {:?}", fields[0])))?;
        let b: usize = fields[1]
            .parse()
            .map_err(|_| p.err(format!("bad vertex index {:?}", fields[1])))?;
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| p.err(format!("bad weight {:?}", fields[2])))?;
        if a == 0 || b == 0 || a > n || b > n {
            return Err(p.err(format!("edge ({a},{b}) references a missing vertex")));
        }
        if a == b {
            return Err(p.err(format!("self-loop on vertex {a}")));
        }
        edges.push(GraphEdge {
            a: a - 1,
            b: b - 1,
            weight,
        });
    }
    if edges.is_empty() {
        p.line_no = text.lines().count();
        return Err(p.err("no edges: every node would be an isolate"));
    }
    let mut degree = vec![0usize; n];
    for e in &edges {
        degree[e.a] += 1;
        degree[e.b] += 1;
    }
    if let Some(lonely) = degree.iter().position(|&d| d == 0) {
        return Err(ExportError::Parse {
            path: path_str,
            line: lonely + 2,
            message: format!("vertex {} has no edges (isolate)", lonely + 1),
        });
    }

    let threshold_used = edges.iter().map(|e| e.weight).fold(f64::INFINITY, f64::min);
    Ok((
        SemanticGraph {
            nodes,
            edges,
            threshold_used,
        },
        LayoutResult {
            positions,
            initial_energy: 0.0,
            final_energy: 0.0,
            iterations: 0,
            seed: 0,
            converged: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn sample() -> (SemanticGraph, LayoutResult) {
        let g = SemanticGraph {
            nodes: vec![
                GraphNode {
                    stem: "diet".into(),
                    frequency: 12,
                    size: 12f64.ln(),
                },
                GraphNode {
                    stem: "drink".into(),
                    frequency: 20,
                    size: 20f64.ln(),
                },
                GraphNode {
                    stem: "sugar".into(),
                    frequency: 7,
                    size: 7f64.ln(),
                },
            ],
            edges: vec![
                GraphEdge {
                    a: 0,
                    b: 1,
                    weight: 0.731234,
                },
                GraphEdge {
                    a: 1,
                    b: 2,
                    weight: 0.52,
                },
            ],
            threshold_used: 0.52,
        };
        let positions: BTreeMap<String, (f64, f64)> = [
            ("diet".to_string(), (-1.5, 0.25)),
            ("drink".to_string(), (0.5, 1.0)),
            ("sugar".to_string(), (2.0, -0.75)),
        ]
        .into();
        let l = LayoutResult {
            positions,
            initial_energy: 3.0,
            final_energy: 0.2,
            iterations: 17,
            seed: 42,
            converged: true,
        };
        (g, l)
    }

    #[test]
    fn minimal_file_shape() {
        let (mut g, mut l) = sample();
        g.nodes.truncate(2);
        g.edges.truncate(1);
        l.positions.remove("sugar");
        let text = pajek_string(&g, &l).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "*Vertices 2");
        assert_eq!(lines[3], "*Edges");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("1 2 0.731234"));
    }

    #[test]
    fn write_read_write_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let (g, l) = sample();
        let p1 = dir.path().join("one.net");
        let p2 = dir.path().join("two.net");
        write_pajek(&g, &l, &p1).unwrap();
        let (g2, l2) = read_pajek(&p1).unwrap();
        write_pajek(&g2, &l2, &p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap()
        );
    }

    #[test]
    fn roundtrip_preserves_structure_and_geometry() {
        let dir = tempfile::tempdir().unwrap();
        let (g, l) = sample();
        let p = dir.path().join("map.net");
        write_pajek(&g, &l, &p).unwrap();
        let (g2, l2) = read_pajek(&p).unwrap();
        assert_eq!(g2.nodes.len(), 3);
        assert_eq!(g2.edges.len(), 2);
        for (a, b) in g.nodes.iter().zip(&g2.nodes) {
            assert_eq!(a.stem, b.stem);
            assert_eq!(a.frequency, b.frequency);
            assert!((a.size - b.size).abs() < 1e-6);
        }
        for (a, b) in g.edges.iter().zip(&g2.edges) {
            assert_eq!((a.a, a.b), (b.a, b.b));
            assert!((a.weight - b.weight).abs() < 1e-6);
        }
        // positions come back normalized to the unit square
        let x_read: Vec<f64> = g2.nodes.iter().map(|n| l2.position(&n.stem).unwrap().0).collect();
        assert!((x_read[0] - 0.0).abs() < 1e-6);
        assert!((x_read[2] - 1.0).abs() < 1e-6);
        assert!((x_read[1] - (0.5 - (-1.5)) / 3.5).abs() < 1e-6);
    }

    #[test]
    fn quoted_labels_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let (mut g, mut l) = sample();
        g.nodes[0].stem = "say \"diet\"".to_string();
        let pos = l.positions.remove("diet").unwrap();
        l.positions.insert("say \"diet\"".to_string(), pos);
        let p = dir.path().join("q.net");
        write_pajek(&g, &l, &p).unwrap();
        let (g2, _) = read_pajek(&p).unwrap();
        assert_eq!(g2.nodes[0].stem, "say \"diet\"");
    }

    #[test]
    fn missing_edges_section_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.net");
        std::fs::write(&p, "*Vertices 1\n1 \"solo\" 0.500000 0.500000 1.000000\n").unwrap();
        let err = read_pajek(&p).unwrap_err();
        assert!(err.to_string().contains("*Edges"));
    }

    #[test]
    fn vertex_index_gap_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gap.net");
        std::fs::write(
            &p,
            "*Vertices 2\n1 \"a\" 0.0 0.0 1.0\n3 \"b\" 1.0 1.0 1.0\n*Edges\n1 2 0.5\n",
        )
        .unwrap();
        let err = read_pajek(&p).unwrap_err();
        match err {
            ExportError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("out of order"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unwritable_path_reports_the_path() {
        let (g, l) = sample();
        let err = write_pajek(&g, &l, Path::new("/nonexistent-dir/x.net")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.net"));
    }

    #[test]
    fn degenerate_axis_pins_to_center() {
        let (mut g, mut l) = sample();
        g.nodes.truncate(2);
        g.edges.truncate(1);
        l.positions.remove("sugar");
        // both nodes share the same y
        l.positions.insert("diet".into(), (0.0, 0.7));
        l.positions.insert("drink".into(), (1.0, 0.7));
        let text = pajek_string(&g, &l).unwrap();
        for line in text.lines().skip(1).take(2) {
            assert!(line.contains(" 0.500000 "), "line: {line}");
        }
    }
}
