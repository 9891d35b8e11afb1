//! Packings of congruent capped or uncapped unit-radius cylinders inside a
//! ball `B(R)` centered at the origin.

mod generate;
mod index;
mod io;
pub mod random;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segment_segment_distance, Point3, Segment, Vec3};

pub use generate::{gen_hexagonal_parallel, gen_laminated_perturbed, nest_capped, HEX_AXIAL_GAP};
pub use index::SpatialIndex;
pub use io::{read_packing, write_packing, PackingFile, PACKING_FORMAT_VERSION};

/// Tolerance for "closed" comparisons: tangency counts as disjoint and
/// touching the container counts as contained.
pub const CONTACT_TOL: f64 = 1e-9;

/// Tolerance on `|axis| == t` for congruent packings.
pub const LENGTH_TOL: f64 = 1e-9;

/// One unit-radius cylinder, described by its axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderSpec {
    pub axis: Segment,
    pub capped: bool,
    pub t: f64,
}

impl CylinderSpec {
    pub fn new(axis: Segment, capped: bool) -> Self {
        CylinderSpec {
            axis,
            capped,
            t: axis.length(),
        }
    }

    pub fn volume(&self) -> f64 {
        cylinder_volume(self.t, self.capped)
    }

    pub fn ends(&self) -> [Point3; 2] {
        self.axis.endpoints()
    }

    /// Unit axis direction; `None` for a zero-length (ball) cylinder.
    pub fn unit_direction(&self) -> Option<Vec3> {
        self.axis.direction().normalized()
    }

    /// Whether `q` lies in the closed solid.
    pub fn contains_point(&self, q: Point3) -> bool {
        if self.capped {
            return point_segment_distance(q, &self.axis) <= 1.0;
        }
        let Some(d) = self.unit_direction() else {
            return false;
        };
        let s = (q - self.axis.p0).dot(d);
        if s < 0.0 || s > self.t {
            return false;
        }
        let radial = (q - self.axis.p0) - d * s;
        radial.norm2() <= 1.0
    }
}

/// Volume of a unit-radius cylinder of length `t`, with two hemispherical
/// caps when `capped`.
pub fn cylinder_volume(t: f64, capped: bool) -> f64 {
    if capped {
        PI * t + 4.0 * PI / 3.0
    } else {
        PI * t
    }
}

/// Whether the closed cylinder lies in the closed ball `B(R)`.
///
/// A capped cylinder is the unit neighborhood of its axis, so both axis ends
/// must be within `R - 1`. An uncapped cylinder is the convex hull of its two
/// end discs; the farthest rim point of the disc at end `e` lies at
/// `sqrt(|e|² + 1 + 2|e⊥|)`, with `e⊥` the part of `e` normal to the axis.
pub fn contains_in_ball(c: &CylinderSpec, r: f64) -> bool {
    if c.capped {
        let lim = r - 1.0 + CONTACT_TOL;
        return lim >= 0.0 && c.ends().iter().all(|e| e.norm() <= lim);
    }
    let Some(d) = c.unit_direction() else {
        return false;
    };
    c.ends().iter().all(|e| {
        let perp = (*e - d * e.dot(d)).norm();
        (e.norm2() + 1.0 + 2.0 * perp).sqrt() <= r + CONTACT_TOL
    })
}

/// A finite family of cylinders in `B(R)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Packing {
    pub cylinders: Vec<CylinderSpec>,
    pub capped: bool,
    /// Common length, or the mean length for mixed packings.
    pub t: f64,
    /// Container radius.
    pub radius: f64,
    /// Lengths may differ.
    pub mixed: bool,
    /// Set by [`restrict`]: only cylinders inside `B(inner_radius)` are kept.
    pub inner_radius: Option<f64>,
}

impl Packing {
    /// Builds a congruent packing; every axis must have length `t`.
    pub fn new(axes: Vec<Segment>, t: f64, capped: bool, radius: f64) -> Result<Packing> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("cylinder length {t}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("container radius {radius}")));
        }
        let cylinders: Vec<CylinderSpec> =
            axes.into_iter().map(|a| CylinderSpec::new(a, capped)).collect();
        for (i, c) in cylinders.iter().enumerate() {
            if !(c.axis.p0.is_finite() && c.axis.p1.is_finite()) {
                return Err(Error::Domain(format!("cylinder {i} has non-finite coordinates")));
            }
            if (c.t - t).abs() > LENGTH_TOL * t.max(1.0) {
                return Err(Error::Domain(format!(
                    "cylinder {i} has length {} but the packing has t = {t}",
                    c.t
                )));
            }
        }
        Ok(Packing {
            cylinders,
            capped,
            t,
            radius,
            mixed: false,
            inner_radius: None,
        })
    }

    /// Builds a packing whose cylinders may have different lengths.
    pub fn new_mixed(axes: Vec<Segment>, capped: bool, radius: f64) -> Result<Packing> {
        let cylinders: Vec<CylinderSpec> =
            axes.into_iter().map(|a| CylinderSpec::new(a, capped)).collect();
        if cylinders.iter().any(|c| !c.t.is_finite()) {
            return Err(Error::Domain("non-finite axis".into()));
        }
        let t = if cylinders.is_empty() {
            0.0
        } else {
            cylinders.iter().map(|c| c.t).sum::<f64>() / cylinders.len() as f64
        };
        Ok(Packing {
            cylinders,
            capped,
            t,
            radius,
            mixed: true,
            inner_radius: None,
        })
    }

    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn axes(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.cylinders.iter().map(|c| &c.axis)
    }

    /// All axis endpoints, two per cylinder.
    pub fn ends(&self) -> Vec<Point3> {
        self.cylinders.iter().flat_map(|c| c.ends()).collect()
    }

    /// Total axis length `μ(A)`.
    pub fn total_axis_length(&self) -> f64 {
        self.cylinders.iter().map(|c| c.t).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.cylinders.iter().map(CylinderSpec::volume).sum()
    }

    fn with_cylinders(&self, cylinders: Vec<CylinderSpec>) -> Packing {
        Packing {
            cylinders,
            ..self.clone()
        }
    }
}

/// Outcome of [`is_valid_packing`].
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Pairs whose interiors overlap (for uncapped packings: whose axes are
    /// closer than 2, unless cleared by the sampled check).
    pub overlapping: Vec<(usize, usize)>,
    /// Uncapped pairs with axis distance below 2 for which the sampled
    /// surface check found no overlap. Reported, not counted as invalid.
    pub suspect: Vec<(usize, usize)>,
    /// Cylinders not contained in `B(R)`.
    pub uncontained: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ValidityOptions {
    /// For uncapped packings, run a sampled surface-clearance test on pairs
    /// failing the axis-distance test.
    pub sampled_uncapped_check: bool,
}

/// Checks pairwise disjoint interiors and containment in `B(R)`.
///
/// For capped cylinders axis distance `>= 2` is exact. For uncapped ones it
/// is a sufficient condition only; parallel uncapped pairs get an exact
/// test.
pub fn is_valid_packing(p: &Packing) -> ValidityReport {
    is_valid_packing_with(p, ValidityOptions::default())
}

pub fn is_valid_packing_with(p: &Packing, opts: ValidityOptions) -> ValidityReport {
    let mut report = ValidityReport::default();
    for (i, c) in p.cylinders.iter().enumerate() {
        if !contains_in_ball(c, p.radius) {
            report.uncontained.push(i);
        }
    }
    let index = SpatialIndex::build(p, 1.0);
    for (i, j) in index.candidate_pairs() {
        let (a, b) = (&p.cylinders[i], &p.cylinders[j]);
        if segment_segment_distance(&a.axis, &b.axis) >= 2.0 - CONTACT_TOL {
            continue;
        }
        if !p.capped {
            if let Some(disjoint) = parallel_uncapped_disjoint(a, b) {
                if !disjoint {
                    report.overlapping.push((i, j));
                }
                continue;
            }
        }
        if !p.capped && opts.sampled_uncapped_check && !sampled_overlap(a, b, 20_000) {
            report.suspect.push((i, j));
        } else {
            report.overlapping.push((i, j));
        }
    }
    report.valid = report.overlapping.is_empty() && report.uncontained.is_empty();
    report
}

/// Exact disjointness test for uncapped cylinders with parallel axes:
/// they are disjoint iff their axis lines are at least 2 apart or their
/// axial extents do not overlap. `None` if the axes are not parallel.
fn parallel_uncapped_disjoint(a: &CylinderSpec, b: &CylinderSpec) -> Option<bool> {
    let da = a.unit_direction()?;
    let db = b.unit_direction()?;
    if da.cross(db).norm() > 1e-12 {
        return None;
    }
    let w = b.axis.p0 - a.axis.p0;
    let lateral = (w - da * w.dot(da)).norm();
    if lateral >= 2.0 - CONTACT_TOL {
        return Some(true);
    }
    let (b0, b1) = (w.dot(da), (b.axis.p1 - a.axis.p0).dot(da));
    let (lo, hi) = (b0.min(b1), b0.max(b1));
    Some(hi <= CONTACT_TOL || lo >= a.t - CONTACT_TOL)
}

/// Deterministic sampled test: does some point of `a`'s surface lie in the
/// interior of `b` (or vice versa)?
pub fn sampled_overlap(a: &CylinderSpec, b: &CylinderSpec, samples: usize) -> bool {
    surface_points(a, samples).any(|q| strictly_inside(b, q))
        || surface_points(b, samples).any(|q| strictly_inside(a, q))
}

fn strictly_inside(c: &CylinderSpec, q: Point3) -> bool {
    const SHRINK: f64 = 1e-9;
    if c.capped {
        return point_segment_distance(q, &c.axis) < 1.0 - SHRINK;
    }
    let Some(d) = c.unit_direction() else {
        return false;
    };
    let s = (q - c.axis.p0).dot(d);
    if s <= SHRINK || s >= c.t - SHRINK {
        return false;
    }
    ((q - c.axis.p0) - d * s).norm2() < (1.0 - SHRINK) * (1.0 - SHRINK)
}

/// Quasi-uniform points on the boundary surface of a cylinder, from a
/// golden-ratio lattice so the sample set is deterministic.
pub fn surface_points(c: &CylinderSpec, n: usize) -> impl Iterator<Item = Point3> + '_ {
    let d = c.unit_direction().unwrap_or(Vec3::Z);
    let (u, v) = crate::geometry::orthonormal_basis(d);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let side = 2.0 * PI * c.t;
    let ends = if c.capped { 4.0 * PI } else { 2.0 * PI };
    let side_frac = side / (side + ends);
    (0..n).map(move |k| {
        let s = (k as f64 + 0.5) / n as f64;
        let phi = 2.0 * PI * (k as f64 * golden).fract();
        let ring = u * phi.cos() + v * phi.sin();
        if s < side_frac {
            c.axis.p0 + d * (c.t * s / side_frac) + ring
        } else {
            let w = (s - side_frac) / (1.0 - side_frac);
            let (end, sign, w) = if w < 0.5 {
                (c.axis.p0, -1.0, 2.0 * w)
            } else {
                (c.axis.p1, 1.0, 2.0 * w - 1.0)
            };
            if c.capped {
                // uniform on the hemisphere: height uniform in [0, 1]
                let h = w;
                end + d * (sign * h) + ring * (1.0 - h * h).sqrt()
            } else {
                // uniform on the flat disc
                end + ring * w.sqrt()
            }
        }
    })
}

/// Keeps exactly the cylinders contained in `B(r_inner)`.
pub fn restrict(p: &Packing, r_inner: f64) -> Packing {
    let kept = p
        .cylinders
        .iter()
        .filter(|c| contains_in_ball(c, r_inner))
        .copied()
        .collect();
    let mut out = p.with_cylinders(kept);
    out.inner_radius = Some(match p.inner_radius {
        Some(prev) => prev.min(r_inner),
        None => r_inner,
    });
    out
}

/// Density `ρ(𝒞, R, R')`: volume of the cylinders inside `B(R)` over the
/// volume of `B(R')`.
pub fn density(p: &Packing, r: f64, r_prime: f64) -> f64 {
    let inside: f64 = p
        .cylinders
        .iter()
        .filter(|c| contains_in_ball(c, r))
        .map(CylinderSpec::volume)
        .sum();
    inside / ball_volume(r_prime)
}

pub fn ball_volume(r: f64) -> f64 {
    4.0 / 3.0 * PI * r.powi(3)
}
