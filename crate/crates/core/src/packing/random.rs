//! Randomized valid packings for the property suites.

use rand::Rng;

use super::{contains_in_ball, CylinderSpec, Packing};
use crate::geometry::{orthonormal_basis, segment_segment_distance, Point3, Segment, Vec3};

/// How candidate cylinders are proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Uniform centers in the ball and uniform directions.
    Scattered,
    /// A nearly parallel bundle: jittered triangular-lattice sites around a
    /// random direction with small axis tilts and axial offsets.
    Bundle,
}

/// Uniform random unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n2 = v.norm2();
        if n2 > 1e-6 && n2 <= 1.0 {
            return v / n2.sqrt();
        }
    }
}

/// Uniform random point in the ball of radius `r`.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Point3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm2() <= 1.0 {
            return v * r;
        }
    }
}

/// Random sequential addition of capped `t`-cylinders into `B(R)`, rejecting
/// any candidate that overlaps a placed cylinder or leaves `B(r_fit)`.
/// Stops at `n` cylinders or after `max_attempts` proposals.
pub fn random_capped_packing<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    t: f64,
    r: f64,
    r_fit: f64,
    layout: Layout,
    max_attempts: usize,
) -> Packing {
    let bundle_dir = random_unit(rng);
    let (bu, bv) = orthonormal_basis(bundle_dir);
    let mut placed: Vec<Segment> = Vec::with_capacity(n);
    let mut attempts = 0;
    let mut site = 0usize;
    while placed.len() < n && attempts < max_attempts {
        attempts += 1;
        let axis = match layout {
            Layout::Scattered => {
                let c = random_in_ball(rng, (r_fit - 1.0 - t / 2.0).max(0.0));
                let d = random_unit(rng);
                Segment::new(c - d * (t / 2.0), c + d * (t / 2.0))
            }
            Layout::Bundle => {
                let (i, j) = spiral_site(site);
                site += 1;
                let spacing = 2.0 + rng.random_range(0.0..0.4);
                let lateral = bu * (spacing * (i as f64 + 0.5 * j as f64))
                    + bv * (spacing * 3f64.sqrt() / 2.0 * j as f64)
                    + bu * rng.random_range(-0.15..0.15)
                    + bv * rng.random_range(-0.15..0.15);
                let tilt = random_unit(rng) * rng.random_range(0.0..0.06);
                let d = (bundle_dir + tilt - bundle_dir * tilt.dot(bundle_dir))
                    .normalized()
                    .unwrap_or(bundle_dir);
                let along = rng.random_range(-0.3..0.3) * t;
                let c = lateral + bundle_dir * along;
                Segment::new(c - d * (t / 2.0), c + d * (t / 2.0))
            }
        };
        let cand = CylinderSpec::new(axis, true);
        if !contains_in_ball(&cand, r_fit) {
            continue;
        }
        if placed
            .iter()
            .all(|q| segment_segment_distance(q, &axis) >= 2.0)
        {
            placed.push(axis);
        }
    }
    Packing::new(placed, t, true, r).expect("all axes have length t")
}

/// Triangular-lattice sites `(i, j)` in order of increasing distance from
/// the origin (hexagonal rings).
fn spiral_site(k: usize) -> (i64, i64) {
    if k == 0 {
        return (0, 0);
    }
    // ring m holds 6m sites
    let mut m = 1usize;
    let mut rem = k - 1;
    while rem >= 6 * m {
        rem -= 6 * m;
        m += 1;
    }
    let side = rem / m;
    let step = (rem % m) as i64;
    let m = m as i64;
    // corners of ring m in axial coordinates, walking counter-clockwise
    let corners = [(m, 0), (0, m), (-m, m), (-m, 0), (0, -m), (m, -m)];
    let dirs = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    let (ci, cj) = corners[side];
    let (di, dj) = dirs[side];
    (ci + di * step, cj + dj * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::is_valid_packing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn spiral_sites_are_distinct_rings() {
        let sites: Vec<_> = (0..1 + 6 + 12 + 18).map(spiral_site).collect();
        let set: HashSet<_> = sites.iter().copied().collect();
        assert_eq!(set.len(), sites.len());
        // hex distance of ring members
        let hexd = |(i, j): (i64, i64)| (i.abs() + j.abs() + (i + j).abs()) / 2;
        assert_eq!(hexd(sites[0]), 0);
        assert!(sites[1..7].iter().all(|&s| hexd(s) == 1));
        assert!(sites[7..19].iter().all(|&s| hexd(s) == 2));
    }

    #[test]
    fn random_packings_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for layout in [Layout::Scattered, Layout::Bundle] {
            let p = random_capped_packing(&mut rng, 15, 20.0, 30.0, 29.0, layout, 5000);
            assert!(p.len() >= 5, "{layout:?} placed {}", p.len());
            assert!(is_valid_packing(&p).valid);
        }
    }
}
