//! Deterministic SVG rendering of a laid-out semantic map: one line per
//! edge, one circle and one label per node, radius proportional to the
//! node's log-frequency size and stroke width to the edge weight.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::layout::LayoutResult;
use crate::netbuild::SemanticGraph;

use super::ExportError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Pixels per layout unit.
    pub scale: f64,
    /// Canvas margin in pixels.
    pub margin: f64,
    /// Circle radius per unit of node size.
    pub radius_scale: f64,
    /// Stroke width per unit of edge weight.
    pub stroke_scale: f64,
    pub font_size: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            scale: 300.0,
            margin: 50.0,
            radius_scale: 5.0,
            stroke_scale: 2.0,
            font_size: 11.0,
        }
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the map as an SVG document string.
pub fn svg_string(
    g: &SemanticGraph,
    l: &LayoutResult,
    options: &RenderOptions,
) -> Result<String, ExportError> {
    let coords: Vec<(f64, f64)> = g
        .nodes
        .iter()
        .map(|n| {
            l.position(&n.stem)
                .ok_or_else(|| ExportError::MissingPosition(n.stem.clone()))
        })
        .collect::<Result<_, _>>()?;

    let min_x = coords.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = coords.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = coords.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = coords.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let max_radius = g
        .nodes
        .iter()
        .map(|n| n.size * options.radius_scale)
        .fold(0.0f64, f64::max);
    let pad = options.margin + max_radius;

    let width = (max_x - min_x) * options.scale + 2.0 * pad;
    let height = (max_y - min_y) * options.scale + 2.0 * pad;
    let px = |x: f64| (x - min_x) * options.scale + pad;
    let py = |y: f64| (y - min_y) * options.scale + pad;

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    for e in &g.edges {
        let (x1, y1) = coords[e.a];
        let (x2, y2) = coords[e.b];
        writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#8a8a8a" stroke-width="{:.3}"/>"##,
            px(x1),
            py(y1),
            px(x2),
            py(y2),
            e.weight.abs() * options.stroke_scale
        )
        .unwrap();
    }
    for (i, node) in g.nodes.iter().enumerate() {
        let (x, y) = coords[i];
        writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.3}" fill="#cfe0f0" stroke="#2c4a6e" stroke-width="1"/>"##,
            px(x),
            py(y),
            node.size * options.radius_scale
        )
        .unwrap();
    }
    for (i, node) in g.nodes.iter().enumerate() {
        let (x, y) = coords[i];
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="{:.1}" font-family="sans-serif" text-anchor="middle">{}</text>"#,
            px(x),
            py(y) - node.size * options.radius_scale - 2.0,
            options.font_size,
            escape_xml(&node.stem)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

pub fn render_svg(
    g: &SemanticGraph,
    l: &LayoutResult,
    options: &RenderOptions,
    path: &Path,
) -> Result<(), ExportError> {
    let text = svg_string(g, l, options)?;
    std::fs::write(path, text).map_err(|source| ExportError::Write {
        path: path.display().to_string(),
        source,
    })
}
