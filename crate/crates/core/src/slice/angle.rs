use std::f64::consts::{PI, TAU};

use crate::bounds::r_hex;
use crate::error::{Error, Result};
use crate::geometry::{plane_frame, point_segment_distance, Point3};
use crate::packing::Packing;

const SCAN: usize = 4096;

/// Angles of the points of `S_x(2/√3)` equidistant from `x` and `a_j`,
/// found as sign changes of `|q − x| − dist(q, a_j)` refined by bisection.
pub fn equidistant_points(p: &Packing, i: usize, j: usize, x: Point3) -> Result<Vec<f64>> {
    if i == j {
        return Err(Error::Precondition("equidistance needs two distinct axes".into()));
    }
    let own = &p.cylinders[i].axis;
    let other = p
        .cylinders
        .get(j)
        .ok_or_else(|| Error::Domain(format!("cylinder index {j} out of range")))?
        .axis;
    let frame = plane_frame(own, x)?;
    let r = r_hex();
    let g = |theta: f64| r - point_segment_distance(frame.point(theta, r), &other);
    let mut roots = Vec::new();
    let mut prev = (0.0, g(0.0));
    for k in 1..=SCAN {
        let theta = TAU * k as f64 / SCAN as f64;
        let v = g(theta);
        if prev.1 == 0.0 {
            roots.push(prev.0);
        } else if prev.1 * v < 0.0 {
            let (mut a, mut b, fa) = (prev.0, theta, prev.1);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if (g(m) < 0.0) == (fa < 0.0) {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (theta, v);
    }
    Ok(roots)
}

/// Largest angle at `x` between two equidistant points on `S_x(2/√3)`, or
/// `None` if there are none.
pub fn equidistant_angle_max(p: &Packing, i: usize, j: usize, x: Point3) -> Result<Option<f64>> {
    let roots = equidistant_points(p, i, j, x)?;
    if roots.is_empty() {
        return Ok(None);
    }
    let mut best: f64 = 0.0;
    for (k, a) in roots.iter().enumerate() {
        for b in &roots[k + 1..] {
            let d = (a - b).abs().rem_euclid(TAU);
            best = best.max(d.min(TAU - d));
        }
    }
    Ok(Some(best.min(PI)))
}
