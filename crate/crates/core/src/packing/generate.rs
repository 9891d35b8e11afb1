//! Deterministic packing generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{contains_in_ball, CylinderSpec, Packing};
use crate::error::{Error, Result};
use crate::geometry::{Segment, Vec3};

/// Axial gap between consecutive uncapped cylinders in a column.
pub const HEX_AXIAL_GAP: f64 = 1e-9;

/// Parallel packing along `z`: axes through the nodes of the triangular
/// lattice of spacing 2, stacked in columns with period `t + 2` (capped) or
/// `t + HEX_AXIAL_GAP` (uncapped). Cylinder centers sit at multiples of the
/// period, so layers are aligned; every such cylinder inside `B(R)` is kept.
pub fn gen_hexagonal_parallel(t: f64, r: f64, capped: bool) -> Result<Packing> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("cylinder length {t}")));
    }
    if !(r > t / 2.0 + 1.0) {
        return Err(Error::ContainerTooSmall {
            radius: r,
            what: format!("a {t}-cylinder"),
        });
    }
    let period = if capped { t + 2.0 } else { t + HEX_AXIAL_GAP };
    let s3 = 3f64.sqrt();
    let jmax = (r / s3).ceil() as i64 + 1;
    let mut axes = Vec::new();
    for j in -jmax..=jmax {
        let y = s3 * j as f64;
        let imax = (r / 2.0).ceil() as i64 + jmax.abs() + 1;
        for i in -imax..=imax {
            let x = 2.0 * i as f64 + j as f64;
            let rho2 = x * x + y * y;
            // largest |z| an axis end may reach in this column
            let zmax2 = if capped {
                (r - 1.0) * (r - 1.0) - rho2
            } else {
                let rim = rho2.sqrt() + 1.0;
                r * r - rim * rim
            };
            if zmax2 < 0.0 {
                continue;
            }
            // layers share one z grid, so every axis has aligned neighbors
            let half = zmax2.sqrt() - t / 2.0;
            if half < 0.0 {
                continue;
            }
            let kmax = (half / period).floor() as i64;
            for k in -kmax..=kmax {
                let z0 = k as f64 * period - t / 2.0;
                axes.push(Segment::new(Vec3::new(x, y, z0), Vec3::new(x, y, z0 + t)));
            }
        }
    }
    let mut p = Packing::new(axes, t, capped, r)?;
    p.cylinders.retain(|c| contains_in_ball(c, r));
    Ok(p)
}

/// Laminated packing of cubic blocks. Block `(a, b, c)` is filled with
/// parallel capped cylinders along coordinate axis `(a + b + c) mod 3`, on a
/// triangular lattice of spacing `2 + 2 eps` inside a cube of side `t + 2`;
/// the block's contents are then rotated about its center by a random angle
/// of at most `eps`. Blocks are laid out with pitch `(t + 2)(1 + √3 eps)`,
/// enough room for the rotated contents. Cylinders leaving their block or
/// `B(R)` are dropped.
pub fn gen_laminated_perturbed(t: f64, r: f64, eps: f64, seed: u64) -> Result<Packing> {
    if !(t > 0.0) || !(eps >= 0.0) {
        return Err(Error::Domain(format!("t = {t}, eps = {eps}")));
    }
    let side = t + 2.0;
    let pitch = side * (1.0 + 3f64.sqrt() * eps);
    if !(r >= 3f64.sqrt() * pitch / 2.0) {
        return Err(Error::ContainerTooSmall {
            radius: r,
            what: format!("one laminate block of side {side}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spacing = 2.0 + 2.0 * eps;
    let nblk = (r / pitch).ceil() as i64 + 1;
    let mut axes = Vec::new();
    for a in -nblk..=nblk {
        for b in -nblk..=nblk {
            for c in -nblk..=nblk {
                let center = Vec3::new(a as f64, b as f64, c as f64) * pitch;
                // Draw for every block whether or not it survives, so that a
                // block's perturbation depends only on its position.
                let rot = random_rotation(&mut rng, eps);
                if center.norm() - pitch * 3f64.sqrt() / 2.0 > r {
                    continue;
                }
                let axis_dir = (a + b + c).rem_euclid(3) as usize;
                let block = block_axes(center, side, t, spacing, axis_dir);
                for seg in block {
                    let s = Segment::new(
                        center + rot.apply(seg.p0 - center),
                        center + rot.apply(seg.p1 - center),
                    );
                    if inside_block(&s, center, pitch) {
                        axes.push(s);
                    }
                }
            }
        }
    }
    let mut p = Packing::new(axes, t, true, r)?;
    p.cylinders.retain(|c| contains_in_ball(c, r));
    if p.is_empty() {
        return Err(Error::ContainerTooSmall {
            radius: r,
            what: "any laminate cylinder".into(),
        });
    }
    Ok(p)
}

fn block_axes(center: Vec3, side: f64, t: f64, spacing: f64, axis: usize) -> Vec<Segment> {
    let e = [Vec3::X, Vec3::Y, Vec3::Z];
    let along = e[axis];
    let l1 = e[(axis + 1) % 3];
    let l2 = e[(axis + 2) % 3];
    // axis ends must stay 1 inside every face
    let half_inner = side / 2.0 - 1.0;
    let row_gap = spacing * 3f64.sqrt() / 2.0;
    let mut out = Vec::new();
    let mut row = 0usize;
    let mut w2 = -half_inner;
    while w2 <= half_inner + 1e-12 {
        let shift = if row % 2 == 1 { spacing / 2.0 } else { 0.0 };
        let mut w1 = -half_inner + shift;
        while w1 <= half_inner + 1e-12 {
            let base = center + l1 * w1 + l2 * w2;
            out.push(Segment::new(base - along * (t / 2.0), base + along * (t / 2.0)));
            w1 += spacing;
        }
        w2 += row_gap;
        row += 1;
    }
    out
}

fn inside_block(s: &Segment, center: Vec3, side: f64) -> bool {
    let lim = side / 2.0 - 1.0 + 1e-9;
    s.endpoints().iter().all(|p| {
        let d = *p - center;
        d.x.abs() <= lim && d.y.abs() <= lim && d.z.abs() <= lim
    })
}

/// Rotation about a unit axis (Rodrigues form).
#[derive(Debug, Clone, Copy)]
struct Rotation {
    axis: Vec3,
    sin: f64,
    cos: f64,
}

impl Rotation {
    fn apply(&self, v: Vec3) -> Vec3 {
        let k = self.axis;
        v * self.cos + k.cross(v) * self.sin + k * (k.dot(v) * (1.0 - self.cos))
    }
}

fn random_rotation(rng: &mut ChaCha8Rng, max_angle: f64) -> Rotation {
    let axis = loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n2 = v.norm2();
        if n2 > 1e-6 && n2 <= 1.0 {
            break v / n2.sqrt();
        }
    };
    let angle = max_angle * rng.random::<f64>();
    Rotation {
        axis,
        sin: angle.sin(),
        cos: angle.cos(),
    }
}

/// Nests a capped `(t-2)`-cylinder inside every uncapped `t`-cylinder by
/// pulling each axis end in by 1. The volume ratio is `(t - 2/3) / t`.
pub fn nest_capped(p: &Packing) -> Result<Packing> {
    if p.capped {
        return Err(Error::Precondition("nesting needs uncapped cylinders".into()));
    }
    if let Some(c) = p.cylinders.iter().find(|c| c.t < 2.0) {
        return Err(Error::Precondition(format!(
            "nesting needs t >= 2, found {}",
            c.t
        )));
    }
    let cylinders = p
        .cylinders
        .iter()
        .map(|c| {
            let d = c.unit_direction().expect("t >= 2 axis is nondegenerate");
            let mut axis = Segment::new(c.axis.p0 + d, c.axis.p1 - d);
            if c.t == 2.0 {
                let m = c.axis.midpoint();
                axis = Segment::new(m, m);
            }
            CylinderSpec::new(axis, true)
        })
        .collect();
    Ok(Packing {
        cylinders,
        capped: true,
        t: p.t - 2.0,
        radius: p.radius,
        mixed: p.mixed,
        inner_radius: p.inner_radius,
    })
}
