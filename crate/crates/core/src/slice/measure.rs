use std::collections::HashMap;

use serde::Serialize;

use crate::bounds::{r_end, t0};
use crate::geometry::{Point3, Segment};
use crate::packing::{restrict, Packing};

/// Protected (`Y`) and end-near (`Z`) parts of one axis, as parameter
/// intervals in arc length from `p0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisIntervals {
    pub length: f64,
    pub z: Vec<(f64, f64)>,
    pub y: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisMeasure {
    pub per_axis: Vec<AxisIntervals>,
    pub mu_y: f64,
    pub mu_z: f64,
    pub mu_a: f64,
    pub n: usize,
    /// `μ(Z) ≤ 2 n t₀`.
    pub z_within_end_budget: bool,
}

/// Arc-length interval of `axis` within `radius` of `e`, clipped to the axis.
fn ball_interval(axis: &Segment, e: Point3, radius: f64) -> Option<(f64, f64)> {
    let len = axis.length();
    if len == 0.0 {
        return (axis.p0.distance(e) <= radius).then_some((0.0, 0.0));
    }
    let d = axis.direction() / len;
    let w = e - axis.p0;
    let b = w.dot(d);
    let disc = b * b - (w.norm2() - radius * radius);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let lo = (b - sq).max(0.0);
    let hi = (b + sq).min(len);
    (lo <= hi).then_some((lo, hi))
}

fn union(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn complement(iv: &[(f64, f64)], len: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut at = 0.0;
    for &(a, b) in iv {
        if a > at {
            out.push((at, a));
        }
        at = at.max(b);
    }
    if at < len {
        out.push((at, len));
    }
    out
}

/// Uniform grid over points with cell size `cell`.
struct PointGrid {
    cell: f64,
    cells: HashMap<(i64, i64, i64), Vec<Point3>>,
}

impl PointGrid {
    fn new(points: &[Point3], cell: f64) -> PointGrid {
        let mut cells: HashMap<_, Vec<Point3>> = HashMap::new();
        for &p in points {
            cells.entry(Self::key(p, cell)).or_default().push(p);
        }
        PointGrid { cell, cells }
    }

    fn key(p: Point3, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    /// Points in cells meeting the box around `axis` grown by `margin`.
    fn near_segment(&self, axis: &Segment, margin: f64) -> impl Iterator<Item = Point3> + '_ {
        let lo = Self::key(
            crate::geometry::Vec3::new(
                axis.p0.x.min(axis.p1.x) - margin,
                axis.p0.y.min(axis.p1.y) - margin,
                axis.p0.z.min(axis.p1.z) - margin,
            ),
            self.cell,
        );
        let hi = Self::key(
            crate::geometry::Vec3::new(
                axis.p0.x.max(axis.p1.x) + margin,
                axis.p0.y.max(axis.p1.y) + margin,
                axis.p0.z.max(axis.p1.z) + margin,
            ),
            self.cell,
        );
        let mut keys = Vec::new();
        for i in lo.0..=hi.0 {
            for j in lo.1..=hi.1 {
                for k in lo.2..=hi.2 {
                    keys.push((i, j, k));
                }
            }
        }
        keys.into_iter()
            .filter_map(|k| self.cells.get(&k))
            .flat_map(|v| v.iter().copied())
    }
}

/// Splits every axis of `restrict(p, r_inner)` into the part whose points
/// have an end of the restricted packing in the closed ball `B_x(4/√3)`
/// (`Z`) and the rest (`Y`).
pub fn axis_measures(p: &Packing, r_inner: f64) -> AxisMeasure {
    let q = restrict(p, r_inner);
    let re = r_end();
    let ends = q.ends();
    let grid = PointGrid::new(&ends, re);
    let per_axis: Vec<AxisIntervals> = q
        .cylinders
        .iter()
        .map(|c| {
            let z = union(
                grid.near_segment(&c.axis, re)
                    .filter_map(|e| ball_interval(&c.axis, e, re))
                    .collect(),
            );
            let len = c.axis.length();
            let y = complement(&z, len);
            AxisIntervals { length: len, z, y }
        })
        .collect();
    let mu_z: f64 = per_axis.iter().flat_map(|a| &a.z).map(|(a, b)| b - a).sum();
    let mu_y: f64 = per_axis.iter().flat_map(|a| &a.y).map(|(a, b)| b - a).sum();
    let mu_a = q.total_axis_length();
    let n = q.len();
    AxisMeasure {
        per_axis,
        mu_y,
        mu_z,
        mu_a,
        n,
        z_within_end_budget: mu_z <= 2.0 * n as f64 * t0() + 1e-9,
    }
}

/// Total axis length of `p` inside the closed ball `B_e(4/√3)`.
pub fn end_ball_axis_length(p: &Packing, e: Point3) -> f64 {
    let re = r_end();
    p.cylinders
        .iter()
        .filter_map(|c| ball_interval(&c.axis, e, re))
        .map(|(a, b)| b - a)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn single(t: f64) -> Packing {
        let a = Segment::new(Vec3::new(0.0, 0.0, -t / 2.0), Vec3::new(0.0, 0.0, t / 2.0));
        Packing::new(vec![a], t, true, t + 10.0).unwrap()
    }

    #[test]
    fn single_cylinder_measures() {
        let p = single(10.0);
        let m = axis_measures(&p, p.radius);
        let re = r_end();
        assert!((m.mu_z - 2.0 * re).abs() < 1e-12);
        assert!((m.mu_y - (10.0 - 2.0 * re)).abs() < 1e-12);
        assert!((m.mu_y + m.mu_z - m.mu_a).abs() < 1e-12);
        assert!(m.z_within_end_budget);
    }

    #[test]
    fn end_ball_examples() {
        let p = single(10.0);
        let e = p.cylinders[0].axis.p0;
        assert!((end_ball_axis_length(&p, e) - r_end()).abs() < 1e-12);
        let short = single(1.5);
        assert!((end_ball_axis_length(&short, short.cylinders[0].axis.p0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn union_and_complement() {
        let u = union(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(u, vec![(0.0, 2.0), (3.0, 4.0)]);
        assert_eq!(complement(&u, 5.0), vec![(2.0, 3.0), (4.0, 5.0)]);
        assert_eq!(complement(&[], 5.0), vec![(0.0, 5.0)]);
    }
}
