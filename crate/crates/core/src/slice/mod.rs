//! Dirichlet slices: the cross-section, normal to axis `a_i` at a point `x`
//! of `a_i`, of the region of `B(R)` no farther from `a_i` than from any
//! other axis.
//!
//! Along a ray `x + r·d` in the slice plane the distance to `a_i` is `r`
//! (the plane is normal to `a_i` at `x`). A point is no farther from `x`
//! than from a point `s` iff `2 r d·(s - x) <= |s - x|²`, so the region
//! closer to `x` than to a whole segment is an intersection of half-planes
//! and is convex. Each neighbor therefore cuts the ray at
//! `min_s |s - x|² / (2 d·(s - x))`; with `s` linear in the segment
//! parameter the minimizer solves a quadratic. The container contributes
//! the positive root of `|x + r d| = R`.

mod angle;
mod export;
mod identity;
mod measure;
mod rearrange;

use std::f64::consts::TAU;

use serde::Serialize;

use crate::bounds::{hex_area, r_end};
use crate::error::{Error, Result};
use crate::geometry::{plane_frame, point_segment_distance, PlaneFrame, Point3, Segment, Vec3};
use crate::packing::Packing;
use crate::quadrature::area_from_radius_fn_with_breaks;

pub use angle::{equidistant_angle_max, equidistant_points};
pub use export::{slice_svg, SliceExport, SvgOptions};
pub use identity::{
    cell_volume_identity, cell_volume_identity_with, certified_bound_for_packing, CellVolumeIdentity,
    CertifiedBound, IdentityOptions,
};
pub use measure::{axis_measures, end_ball_axis_length, AxisIntervals, AxisMeasure};
pub use rearrange::{truncate_rearrange, PieceKind, RearrangedPiece, Rearrangement};

/// Which part of a neighbor's equidistant spline bounds the ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplinePart {
    /// Nearest point interior to the neighbor axis: parabolic arc.
    Parabola,
    /// Nearest point is the first end: straight line (ray of the spline).
    RayAtStart,
    /// Nearest point is the second end.
    RayAtEnd,
}

/// The constraint that determines the slice radius in a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "by", rename_all = "kebab-case")]
pub enum Active {
    Container,
    Axis { index: usize, part: SplinePart },
}

/// Kind of an analytic boundary piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    ParabolicArc,
    Line,
    ContainerCircle,
}

impl Active {
    pub fn arc_kind(self) -> ArcKind {
        match self {
            Active::Container => ArcKind::ContainerCircle,
            Active::Axis {
                part: SplinePart::Parabola,
                ..
            } => ArcKind::ParabolicArc,
            Active::Axis { .. } => ArcKind::Line,
        }
    }
}

/// Kind of a non-analytic boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    /// Junction of a parabolic arc and a ray of the same spline.
    Type1,
    /// Meets the container sphere.
    Type2,
    /// Equidistant from three or more axes.
    Type3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryEvent {
    pub theta: f64,
    pub r: f64,
    pub kind: EventKind,
    pub before: Active,
    pub after: Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusSample {
    pub theta: f64,
    pub r: f64,
    pub active: Active,
}

/// Numerical settings for slice construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceConfig {
    /// Uniform angular samples used to classify the boundary.
    pub samples: usize,
    /// Angular resolution of event localization.
    pub event_tol: f64,
    /// Relative tolerance of the area quadrature.
    pub area_tol: f64,
}

impl Default for SliceConfig {
    fn default() -> Self {
        SliceConfig {
            samples: 720,
            event_tol: 1e-11,
            area_tol: 1e-9,
        }
    }
}

/// A neighbor axis expressed relative to the slice center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Neighbor {
    index: usize,
    axis: Segment,
}

/// Dirichlet slice `d_x` of cylinder `owner` at `frame.origin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletSlice {
    pub frame: PlaneFrame,
    pub owner: usize,
    pub container_radius: f64,
    pub samples: Vec<RadiusSample>,
    pub events: Vec<BoundaryEvent>,
    #[serde(skip)]
    neighbors: Vec<Neighbor>,
}

/// Ray limit imposed by the segment `seg` on `x + r d`: the largest `r` such
/// that the point is no farther from `x` than from every point of `seg`.
pub fn ray_limit(x: Point3, d: Vec3, seg: &Segment) -> (f64, SplinePart) {
    let w0 = seg.p0 - x;
    let e = seg.p1 - seg.p0;
    let a = e.norm2();
    let b = w0.dot(e);
    let c = w0.norm2();
    let p = d.dot(w0);
    let m = d.dot(e);

    let ratio = |u: f64| {
        let den = 2.0 * (p + u * m);
        if den > 0.0 {
            (c + u * (2.0 * b + u * a)) / den
        } else {
            f64::INFINITY
        }
    };
    let mut best = (f64::INFINITY, SplinePart::Parabola);
    let mut consider = |u: f64, part: SplinePart| {
        let v = ratio(u);
        if v < best.0 {
            best = (v, part);
        }
    };
    consider(0.0, SplinePart::RayAtStart);
    if a == 0.0 {
        return best;
    }
    consider(1.0, SplinePart::RayAtEnd);
    // Stationary points of N/D: a m u² + 2 a p u + (2 b p - c m) = 0.
    let qa = a * m;
    let qb = 2.0 * a * p;
    let qc = 2.0 * b * p - c * m;
    for u in quadratic_roots(qa, qb, qc) {
        if u > 0.0 && u < 1.0 {
            consider(u, SplinePart::Parabola);
        }
    }
    best
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> impl Iterator<Item = f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    let mut out = [f64::NAN; 2];
    if scale == 0.0 {
        // identically zero: every u is stationary, endpoints suffice
    } else if a.abs() <= 1e-14 * scale {
        if b != 0.0 {
            out[0] = -c / b;
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (b + b.signum() * sq);
            if q != 0.0 {
                out[0] = q / a;
                out[1] = c / q;
            } else {
                out[0] = 0.0;
            }
        }
    }
    out.into_iter().filter(|u| u.is_finite())
}

/// Ray limit imposed by the container `B(R)`.
pub fn container_limit(x: Point3, d: Vec3, radius: f64) -> f64 {
    let xd = x.dot(d);
    let disc = xd * xd - x.norm2() + radius * radius;
    if disc <= 0.0 {
        return 0.0;
    }
    (-xd + disc.sqrt()).max(0.0)
}

impl DirichletSlice {
    /// Builds the slice of cylinder `i` of `p` at `x`, using every other axis
    /// of `p` and the container `B(p.radius)`.
    pub fn new(p: &Packing, i: usize, x: Point3, cfg: &SliceConfig) -> Result<DirichletSlice> {
        let own = p
            .cylinders
            .get(i)
            .ok_or_else(|| Error::Domain(format!("cylinder index {i} out of range")))?;
        let frame = plane_frame(&own.axis, x)?;
        let neighbors = relevant_neighbors(p, i, &frame);
        let mut slice = DirichletSlice {
            frame,
            owner: i,
            container_radius: p.radius,
            samples: Vec::new(),
            events: Vec::new(),
            neighbors,
        };
        slice.classify(cfg);
        Ok(slice)
    }

    /// Exact slice radius in direction `theta` with its active constraint.
    pub fn radius_with_active(&self, theta: f64) -> (f64, Active) {
        let x = self.frame.origin;
        let d = self.frame.direction(theta);
        let mut best = (container_limit(x, d, self.container_radius), Active::Container);
        for n in &self.neighbors {
            let (r, part) = ray_limit(x, d, &n.axis);
            if r < best.0 {
                best = (r, Active::Axis { index: n.index, part });
            }
        }
        best
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.radius_with_active(theta).0
    }

    pub fn center(&self) -> Point3 {
        self.frame.origin
    }

    fn classify(&mut self, cfg: &SliceConfig) {
        let n = cfg.samples.max(8);
        self.samples = (0..n)
            .map(|k| {
                let theta = TAU * k as f64 / n as f64;
                let (r, active) = self.radius_with_active(theta);
                RadiusSample { theta, r, active }
            })
            .collect();
        let mut events = Vec::new();
        for k in 0..n {
            let a = self.samples[k];
            let (tb, b_active) = if k + 1 == n {
                (TAU, self.samples[0].active)
            } else {
                (self.samples[k + 1].theta, self.samples[k + 1].active)
            };
            if a.active != b_active {
                self.locate(a.theta, a.active, tb, b_active, cfg.event_tol, 0, &mut events);
            }
        }
        for e in &mut events {
            e.theta = e.theta.rem_euclid(TAU);
        }
        events.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        self.events = events;
    }

    #[allow(clippy::too_many_arguments)]
    fn locate(
        &self,
        ta: f64,
        la: Active,
        tb: f64,
        lb: Active,
        tol: f64,
        depth: u32,
        out: &mut Vec<BoundaryEvent>,
    ) {
        if tb - ta <= tol || depth > 60 {
            let theta = 0.5 * (ta + tb);
            out.push(BoundaryEvent {
                theta,
                r: self.radius(theta),
                kind: event_kind(la, lb),
                before: la,
                after: lb,
            });
            return;
        }
        let tm = 0.5 * (ta + tb);
        let (_, lm) = self.radius_with_active(tm);
        if lm != la {
            self.locate(ta, la, tm, lm, tol, depth + 1, out);
        }
        if lm != lb {
            self.locate(tm, lm, tb, lb, tol, depth + 1, out);
        }
    }

    /// Angles of all located non-analytic points.
    pub fn event_angles(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.theta).collect()
    }

    /// Area by adaptive quadrature of `r²/2`, with panels split at events.
    pub fn area(&self, tol: f64) -> Result<f64> {
        area_from_radius_fn_with_breaks(|t| self.radius(t), &self.event_angles(), tol)
    }

    /// Boundary points in angular order from the classification samples.
    pub fn boundary_points(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|s| (s.r * s.theta.cos(), s.r * s.theta.sin()))
            .collect()
    }

    /// Discrete convexity: every sampled boundary point lies on or outside
    /// (within `tol`) the chord joining its two neighbors.
    pub fn is_discretely_convex(&self, tol: f64) -> bool {
        self.convexity_defect() <= tol
    }

    /// Largest inward offset of a boundary sample from its neighbors' chord.
    pub fn convexity_defect(&self) -> f64 {
        let pts = self.boundary_points();
        let n = pts.len();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (ax, ay) = pts[(k + n - 1) % n];
            let (bx, by) = pts[k];
            let (cx, cy) = pts[(k + 1) % n];
            let (ex, ey) = (cx - ax, cy - ay);
            let len = (ex * ex + ey * ey).sqrt();
            if len == 0.0 {
                continue;
            }
            // positive when b is on the far side of the chord from the center
            let outward = ((bx - ax) * ey - (by - ay) * ex) / len;
            let center_side = ((0.0 - ax) * ey - (0.0 - ay) * ex) / len;
            let signed = if center_side <= 0.0 { outward } else { -outward };
            worst = worst.max(-signed);
        }
        worst
    }

    /// Analytic pieces as `(start, end, kind)` in angular order, one entry
    /// per run of equal active constraints between events.
    pub fn pieces(&self) -> Vec<(f64, f64, ArcKind)> {
        if self.events.is_empty() {
            let kind = self.samples.first().map(|s| s.active.arc_kind());
            return kind.map(|k| vec![(0.0, TAU, k)]).unwrap_or_default();
        }
        let m = self.events.len();
        (0..m)
            .map(|k| {
                let e = &self.events[k];
                let next = &self.events[(k + 1) % m];
                let end = if k + 1 == m { next.theta + TAU } else { next.theta };
                (e.theta, end, e.after.arc_kind())
            })
            .collect()
    }
}

fn event_kind(a: Active, b: Active) -> EventKind {
    match (a, b) {
        (Active::Container, _) | (_, Active::Container) => EventKind::Type2,
        (Active::Axis { index: i, .. }, Active::Axis { index: j, .. }) if i == j => EventKind::Type1,
        _ => EventKind::Type3,
    }
}

/// Axes that can bound the slice. A neighbor `j` can only bind at radius
/// `r` if `dist(x, a_j) <= 2r`; the radius is bounded using the slice of a
/// few nearest axes, which contains the true slice.
fn relevant_neighbors(p: &Packing, i: usize, frame: &PlaneFrame) -> Vec<Neighbor> {
    const NEAREST: usize = 24;
    let x = frame.origin;
    let mut all: Vec<(f64, Neighbor)> = p
        .cylinders
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, c)| (point_segment_distance(x, &c.axis), Neighbor { index: j, axis: c.axis }))
        .collect();
    if all.len() <= NEAREST {
        return all.into_iter().map(|(_, n)| n).collect();
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.index.cmp(&b.1.index)));
    let near: Vec<Neighbor> = all[..NEAREST].iter().map(|(_, n)| *n).collect();
    let mut r_max: f64 = 0.0;
    for k in 0..360 {
        let d = frame.direction(TAU * k as f64 / 360.0);
        let mut r = container_limit(x, d, p.radius);
        for n in &near {
            r = r.min(ray_limit(x, d, &n.axis).0);
        }
        r_max = r_max.max(r);
    }
    let cutoff = 2.0 * 1.25 * r_max + 1e-9;
    all.into_iter()
        .filter(|(dist, _)| *dist <= cutoff)
        .map(|(_, n)| n)
        .collect()
}

/// Slice radius of cylinder `i` at `x` in direction `theta`.
pub fn slice_radius(p: &Packing, i: usize, x: Point3, theta: f64) -> Result<f64> {
    let frame = plane_frame(&p.cylinders[i].axis, x)?;
    let d = frame.direction(theta);
    let mut r = container_limit(x, d, p.radius);
    for (j, c) in p.cylinders.iter().enumerate() {
        if j != i {
            r = r.min(ray_limit(x, d, &c.axis).0);
        }
    }
    Ok(r)
}

/// Whether `q` (in the slice plane of `x`) belongs to `d_x`.
pub fn in_slice(p: &Packing, i: usize, x: Point3, q: Point3) -> bool {
    if q.norm() > p.radius {
        return false;
    }
    let own = q.distance(x);
    p.cylinders
        .iter()
        .enumerate()
        .all(|(j, c)| j == i || own <= point_segment_distance(q, &c.axis))
}

/// Slice radius by bisection on the membership predicate, absolute
/// tolerance `tol`. Independent of the closed-form ray limits.
pub fn slice_radius_bisect(p: &Packing, i: usize, x: Point3, theta: f64, tol: f64) -> Result<f64> {
    let frame = plane_frame(&p.cylinders[i].axis, x)?;
    let d = frame.direction(theta);
    let (mut lo, mut hi) = (0.0, p.radius + x.norm());
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if in_slice(p, i, x, x + d * mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Area of `d_x` with relative tolerance `tol`.
pub fn slice_area(p: &Packing, i: usize, x: Point3, tol: f64) -> Result<f64> {
    let cfg = SliceConfig {
        area_tol: tol,
        ..SliceConfig::default()
    };
    DirichletSlice::new(p, i, x, &cfg)?.area(tol)
}

/// Whether some axis end of `p` lies in the closed ball `B_x(4/√3)`. Pass
/// the restricted packing to test the ends that matter for qualification.
pub fn has_end_near(p: &Packing, x: Point3) -> bool {
    let lim = r_end();
    p.cylinders
        .iter()
        .flat_map(|c| c.ends())
        .any(|e| e.distance(x) <= lim)
}

/// Whether `d_x` has area greater than `√12` by more than the relative
/// tolerance `tol`.
pub fn is_qualified(p: &Packing, i: usize, x: Point3, tol: f64) -> Result<bool> {
    let area = slice_area(p, i, x, (tol * 1e-3).max(1e-12))?;
    Ok(area - hex_area() > tol * hex_area())
}
