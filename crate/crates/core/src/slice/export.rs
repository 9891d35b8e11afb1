use std::fmt::Write as _;

use serde::Serialize;

use super::{ArcKind, BoundaryEvent, DirichletSlice, RadiusSample};
use crate::bounds::r_hex;
use crate::geometry::PlaneFrame;

/// JSON form of a slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceExport {
    pub frame: PlaneFrame,
    pub owner: usize,
    pub container_radius: f64,
    pub area: f64,
    pub samples: Vec<RadiusSample>,
    pub events: Vec<BoundaryEvent>,
    pub pieces: Vec<ExportPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExportPiece {
    pub start: f64,
    pub end: f64,
    pub kind: ArcKind,
}

impl SliceExport {
    pub fn new(s: &DirichletSlice, area: f64) -> SliceExport {
        SliceExport {
            frame: s.frame,
            owner: s.owner,
            container_radius: s.container_radius,
            area,
            samples: s.samples.clone(),
            events: s.events.clone(),
            pieces: s
                .pieces()
                .into_iter()
                .map(|(start, end, kind)| ExportPiece { start, end, kind })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub size: u32,
    /// Pixels per unit length.
    pub scale: f64,
    /// Polyline vertices.
    pub points: usize,
    /// Text for a `<metadata>` element; omitted when `None`.
    pub metadata: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            size: 512,
            scale: 100.0,
            points: 1440,
            metadata: None,
        }
    }
}

/// Renders the slice centered in a fixed viewport: the circles of radius 1
/// and `2/√3`, the boundary, and a marker at each event.
pub fn slice_svg(s: &DirichletSlice, opts: &SvgOptions) -> String {
    let c = opts.size as f64 / 2.0;
    let px = |x: f64, y: f64| (c + opts.scale * x, c - opts.scale * y);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    if let Some(m) = &opts.metadata {
        let esc = m.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(out, "  <metadata>{esc}</metadata>");
    }
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    for (r, color) in [(1.0, "#888888"), (r_hex(), "#4477aa")] {
        let _ = writeln!(
            out,
            r#"  <circle cx="{c:.2}" cy="{c:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            r * opts.scale
        );
    }
    let n = opts.points.max(3);
    let mut pts = String::new();
    for k in 0..n {
        let th = std::f64::consts::TAU * k as f64 / n as f64;
        let r = s.radius(th);
        let (x, y) = px(r * th.cos(), r * th.sin());
        let _ = write!(pts, "{x:.2},{y:.2} ");
    }
    let _ = writeln!(
        out,
        r##"  <polygon points="{}" fill="#ddeeff" fill-opacity="0.5" stroke="black"/>"##,
        pts.trim_end()
    );
    for e in &s.events {
        let (x, y) = px(e.r * e.theta.cos(), e.r * e.theta.sin());
        let color = match e.kind {
            super::EventKind::Type1 => "#228833",
            super::EventKind::Type2 => "#aa3377",
            super::EventKind::Type3 => "#ee6677",
        };
        let _ = writeln!(out, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
    }
    let (x, y) = px(0.0, 0.0);
    let _ = writeln!(out, r#"  <circle cx="{x:.2}" cy="{y:.2}" r="2" fill="black"/>"#);
    out.push_str("</svg>\n");
    out
}
