//! Extremal computations behind the √12 slice floor: areas of the
//! rearranged pieces, their minimal total over angle compositions, and the
//! three-ball radius bound.
//!
//! A piece of angle `β` has its two vertices `y`, `z` on the circle of
//! radius `2/√3` about `x`. For `β ≤ 60°` it is the triangle `xyz`. Past
//! 60° the chord `yz` enters the unit disc and the piece is bounded instead
//! by the parabola through `y` and `z` whose apex touches the unit circle on
//! the bisector; its area is the triangle plus an Archimedes segment.

mod composition;
mod three_ball;

use std::f64::consts::PI;

use serde::Serialize;

use crate::bounds::{alpha0, r_hex};
use crate::error::{Error, Result};

pub use composition::{min_total_area, min_total_area_with, project_capped_simplex, MinAreaOptions, MinAreaResult};
pub use three_ball::{
    minimal_enclosing_radius, three_ball_min_radius, three_ball_min_radius_with, three_ball_solve,
    ThreeBallOptions, ThreeBallResult, ThreeBallSolution,
};

const SIXTY: f64 = PI / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Chord,
    Parabola,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PieceProfile {
    pub beta: f64,
    pub kind: PieceKind,
    pub area: f64,
}

pub fn piece_kind(beta: f64) -> PieceKind {
    if beta <= SIXTY {
        PieceKind::Chord
    } else {
        PieceKind::Parabola
    }
}

/// Piece area for any `β` in `[0, π)`, without the domain check.
pub fn piece_area_unchecked(beta: f64) -> f64 {
    let r = r_hex();
    let tri = 0.5 * r * r * beta.sin();
    if beta <= SIXTY {
        return tri;
    }
    let half = 0.5 * beta;
    let chord = 2.0 * r * half.sin();
    let sagitta = 1.0 - r * half.cos();
    tri + crate::geometry::parabola_segment_area(chord, sagitta)
}

/// Derivative of [`piece_area_unchecked`]; at 60° the right derivative.
pub fn piece_area_derivative(beta: f64) -> f64 {
    let r = r_hex();
    let tri = 0.5 * r * r * beta.cos();
    if beta < SIXTY {
        return tri;
    }
    let half = 0.5 * beta;
    tri + 2.0 / 3.0 * (r * half.cos() - r * r * beta.cos())
}

/// Area of the rearranged piece of angle `β ∈ (0, α₀]`.
pub fn piece_area(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= alpha0() + 1e-12) {
        return Err(Error::Domain(format!(
            "piece angle {beta} outside (0, {}]",
            alpha0()
        )));
    }
    Ok(piece_area_unchecked(beta))
}

pub fn piece_profile(beta: f64) -> Result<PieceProfile> {
    Ok(PieceProfile {
        beta,
        kind: piece_kind(beta),
        area: piece_area(beta)?,
    })
}

/// Per-radian area of the 60° chord piece, the smallest over `(0, α₀]`.
pub fn per_radian_floor() -> f64 {
    piece_area_unchecked(SIXTY) / SIXTY
}

/// Outcome of sweeping the axis direction of parabolas through `y`, `z`
/// that keep the unit disc on their convex side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParabolaSweep {
    pub beta: f64,
    /// Area with the axis along the bisector (apex on the unit circle).
    pub apex_area: f64,
    /// Smallest area found over the sweep.
    pub min_area: f64,
    /// Axis tilt from the bisector achieving `min_area`.
    pub argmin_tilt: f64,
}

/// For each axis tilt `φ`, finds the flattest parabola with that axis
/// direction through the piece vertices that stays outside the open unit
/// disc, and records the area it bounds with the two radii.
pub fn parabola_direction_sweep(beta: f64, tilts: usize) -> Result<ParabolaSweep> {
    if !(beta > SIXTY && beta <= alpha0() + 1e-12) {
        return Err(Error::Domain(format!("sweep needs 60° < β ≤ α₀, got {beta}")));
    }
    let r = r_hex();
    let half = 0.5 * beta;
    // bisector along +h; y on the left, z on the right
    let y = (-r * half.sin(), r * half.cos());
    let z = (r * half.sin(), r * half.cos());
    let tri = 0.5 * r * r * beta.sin();
    let limit = 0.8 * (0.5 * PI - half).min(SIXTY);

    let area_at = |phi: f64| -> f64 {
        // rotated coordinates: h' along the axis direction, s' across it
        let (sp, cp) = phi.sin_cos();
        let to_local = |(s, h): (f64, f64)| (s * cp - h * sp, s * sp + h * cp);
        let from_local = |(s, h): (f64, f64)| (s * cp + h * sp, -s * sp + h * cp);
        let (s1, h1) = to_local(y);
        let (s2, h2) = to_local(z);
        let slope = (h2 - h1) / (s2 - s1);
        // h'(s) = chord(s) + k (s - s1)(s2 - s): bulges along +h' for k > 0
        let point = |k: f64, s: f64| from_local((s, h1 + slope * (s - s1) + k * (s - s1) * (s2 - s)));
        let min_dist = |k: f64| -> f64 {
            let n = 256;
            let mut best = (f64::INFINITY, 0usize);
            for m in 0..=n {
                let s = s1 + (s2 - s1) * m as f64 / n as f64;
                let (a, b) = point(k, s);
                let d = a.hypot(b);
                if d < best.0 {
                    best = (d, m);
                }
            }
            let step = (s2 - s1) / n as f64;
            let lo = (s1 + step * best.1 as f64 - step).max(s1);
            let hi = (s1 + step * best.1 as f64 + step).min(s2);
            golden_min(|s| { let (a, b) = point(k, s); a.hypot(b) }, lo, hi, 1e-14)
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while min_dist(hi) < 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if min_dist(mid) >= 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        tri + hi * (s2 - s1).abs().powi(3) / 6.0
    };

    let apex_area = area_at(0.0);
    let mut out = ParabolaSweep {
        beta,
        apex_area,
        min_area: apex_area,
        argmin_tilt: 0.0,
    };
    let tilts = tilts.max(2);
    for m in 0..=tilts {
        let phi = -limit + 2.0 * limit * m as f64 / tilts as f64;
        let a = area_at(phi);
        if a < out.min_area {
            out.min_area = a;
            out.argmin_tilt = phi;
        }
    }
    Ok(out)
}

/// Golden-section minimum value of a unimodal `f` on `[a, b]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    f(golden_argmin(&f, a, b, tol))
}

/// Minimizer of a unimodal `f` on `[a, b]` by golden section.
pub(crate) fn golden_argmin<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn spec_piece_examples() {
        assert!((piece_area(deg(60.0)).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((piece_area(deg(30.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let a = piece_area(alpha0()).unwrap();
        assert!((a - 0.827204319201866).abs() < 1e-12, "{a}");
        assert!(piece_area(0.0).is_err());
        assert!(piece_area(alpha0() + 1e-6).is_err());
        assert_eq!(piece_profile(deg(70.0)).unwrap().kind, PieceKind::Parabola);
    }

    #[test]
    fn kink_at_sixty() {
        let l = piece_area_derivative(deg(60.0) - 1e-12);
        let r = piece_area_derivative(deg(60.0));
        assert!((l - 1.0 / 3.0).abs() < 1e-9);
        assert!((r - 5.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_differences() {
        for b in [0.3, 0.9, 1.2, 1.4, 1.49] {
            let h = 1e-6;
            let fd = (piece_area_unchecked(b + h) - piece_area_unchecked(b - h)) / (2.0 * h);
            assert!((fd - piece_area_derivative(b)).abs() < 1e-8, "β={b}");
        }
    }

    #[test]
    fn apex_tilt_is_minimal() {
        for b in [deg(65.0), deg(75.0), alpha0()] {
            let s = parabola_direction_sweep(b, 40).unwrap();
            assert!((s.apex_area - piece_area_unchecked(b)).abs() < 1e-9, "{s:?}");
            assert!(s.min_area >= s.apex_area - 1e-9, "{s:?}");
        }
    }
}
