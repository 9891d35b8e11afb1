use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::DirichletSlice;
use crate::bounds::{alpha0, r_hex};
use crate::error::{Error, Result};
use crate::extremal::{piece_area_unchecked, piece_kind};
use crate::quadrature::area_from_radius_fn_with_breaks;

pub use crate::extremal::PieceKind;

/// A slice point at radius within this of `2/√3` counts as on the circle.
const ON_CIRCLE: f64 = 1e-9;
const SCAN: usize = 4096;
/// Arcs narrower than this are treated as a single vertex.
const POINT_ARC: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RearrangedPiece {
    /// Angle at which the piece starts.
    pub start: f64,
    pub beta: f64,
    pub kind: PieceKind,
    pub area: f64,
    /// Whether the piece subdivides an arc of `S_x(2/√3)`.
    pub on_circle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rearrangement {
    /// Area of `d_x ∩ disc(2/√3)`.
    pub area_dstar: f64,
    /// Total area of the replacement pieces.
    pub area_dstarstar: f64,
    /// Angles where the boundary meets `S_x(2/√3)`.
    pub vertices: Vec<f64>,
    pub pieces: Vec<RearrangedPiece>,
}

impl Rearrangement {
    pub fn total_angle(&self) -> f64 {
        self.pieces.iter().map(|p| p.beta).sum()
    }
}

/// Truncates the slice to the disc of radius `2/√3`, then replaces every
/// sector between consecutive vertices (arcs split into equal parts of at
/// most 60°) by its chord triangle or apex-tangent parabola piece.
pub fn truncate_rearrange(s: &DirichletSlice) -> Result<Rearrangement> {
    let rh = r_hex();
    let on = |theta: f64| s.radius(theta) >= rh - ON_CIRCLE;

    let mut grid: Vec<f64> = (0..SCAN).map(|k| TAU * k as f64 / SCAN as f64).collect();
    grid.extend(s.event_angles());
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    // (angle, entering the circle)
    let mut crossings: Vec<(f64, bool)> = Vec::new();
    let states: Vec<bool> = grid.iter().map(|&t| on(t)).collect();
    for k in 0..grid.len() {
        let (ta, sa) = (grid[k], states[k]);
        let (tb, sb) = if k + 1 == grid.len() {
            (grid[0] + TAU, states[0])
        } else {
            (grid[k + 1], states[k + 1])
        };
        if sa == sb {
            continue;
        }
        let (mut a, mut b) = (ta, tb);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if on(m) == sa {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-13 {
                break;
            }
        }
        crossings.push((0.5 * (a + b) % TAU, sb));
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut pieces = Vec::new();
    let mut vertices = Vec::new();
    if crossings.is_empty() {
        if !states[0] {
            return Err(Error::AngleExceedsAlpha0 {
                angle: TAU,
                alpha0: alpha0(),
            });
        }
        push_arc(&mut pieces, 0.0, TAU);
    } else {
        // alternating arcs and gaps as (start, angle, on circle)
        let m = crossings.len();
        let mut runs: Vec<(f64, f64, bool)> = (0..m)
            .map(|k| {
                let (start, entering) = crossings[k];
                let end = if k + 1 == m { crossings[0].0 + TAU } else { crossings[k + 1].0 };
                (start, end - start, entering)
            })
            .collect();
        // an arc narrower than the on-circle tolerance can resolve is a
        // single vertex: split it between its neighboring gaps
        let mut k = 0;
        while k < runs.len() && runs.len() > 2 {
            let (start, beta, arc) = runs[k];
            if arc && beta < POINT_ARC {
                let n = runs.len();
                runs[(k + n - 1) % n].1 += 0.5 * beta;
                let next = (k + 1) % n;
                runs[next].0 = start + 0.5 * beta;
                runs[next].1 += 0.5 * beta;
                runs.remove(k);
            } else {
                k += 1;
            }
        }
        for &(start, beta, arc) in &runs {
            vertices.push(start.rem_euclid(TAU));
            if arc {
                push_arc(&mut pieces, start, beta);
                continue;
            }
            if beta > alpha0() + 1e-9 {
                return Err(Error::AngleExceedsAlpha0 {
                    angle: beta,
                    alpha0: alpha0(),
                });
            }
            pieces.push(RearrangedPiece {
                start,
                beta,
                kind: piece_kind(beta),
                area: piece_area_unchecked(beta),
                on_circle: false,
            });
        }
    }

    let mut breaks = s.event_angles();
    breaks.extend(crossings.iter().map(|c| c.0));
    let area_dstar = area_from_radius_fn_with_breaks(|t| s.radius(t).min(rh), &breaks, 1e-11)?;
    let out = Rearrangement {
        area_dstar,
        area_dstarstar: pieces.iter().map(|p| p.area).sum(),
        vertices,
        pieces,
    };
    debug_assert!((out.total_angle() - TAU).abs() < 1e-9);
    Ok(out)
}

fn push_arc(pieces: &mut Vec<RearrangedPiece>, start: f64, beta: f64) {
    let parts = ((beta / (PI / 3.0)) - 1e-12).ceil().max(1.0) as usize;
    let each = beta / parts as f64;
    for k in 0..parts {
        pieces.push(RearrangedPiece {
            start: start + k as f64 * each,
            beta: each,
            kind: PieceKind::Chord,
            area: piece_area_unchecked(each),
            on_circle: true,
        });
    }
}
