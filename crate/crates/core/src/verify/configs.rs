//! Randomized configurations shared by the suites and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{r_end, r_hex};
use crate::geometry::{segment_segment_distance, Point3, Segment, Vec3};
use crate::packing::random::{random_capped_packing, random_in_ball, random_unit, Layout};
use crate::packing::{gen_hexagonal_parallel, gen_laminated_perturbed, nest_capped, restrict, Packing};
use crate::slice::has_end_near;

/// A random capped packing and its restriction to `B(R − 2/√3)`.
#[derive(Debug, Clone)]
pub struct SuitePacking {
    pub index: u64,
    pub packing: Packing,
    pub restricted: Packing,
}

/// Packing `k` of the randomized family: 5–20 capped cylinders with
/// `t ∈ [10, 60]` in `B(R)`, `R ∈ [t, 2t]`, fitted inside `B(R − 2/√3)`.
/// Even indices are near-parallel bundles, odd ones scattered.
pub fn random_suite_packing(seed: u64, k: u64) -> SuitePacking {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let n = rng.random_range(5..=20);
    let t = rng.random_range(10.0..=60.0);
    let r = rng.random_range(t..=2.0 * t);
    let layout = if k % 2 == 0 { Layout::Bundle } else { Layout::Scattered };
    let packing = random_capped_packing(&mut rng, n, t, r, r - r_hex(), layout, 20_000);
    let restricted = restrict(&packing, r - r_hex());
    SuitePacking {
        index: k,
        packing,
        restricted,
    }
}

/// Up to `count` points `(i, x)` on axes of `q` with no end of `q` in
/// `B_x(4/√3)` and `x ∈ B(R − 2/√3)`.
pub fn protected_points(q: &Packing, count: usize, seed: u64, stream: u64) -> Vec<(usize, Point3)> {
    let mut out = Vec::new();
    if q.is_empty() {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_a11);
    rng.set_stream(stream);
    let lim = q.radius - r_hex();
    for _ in 0..200 * count {
        if out.len() == count {
            break;
        }
        let i = rng.random_range(0..q.len());
        let x = q.cylinders[i].axis.at(rng.random::<f64>());
        if x.norm() <= lim && !has_end_near(q, x) {
            out.push((i, x));
        }
    }
    out
}

/// Configuration `k` for the equidistance-angle suite: axis 0 along `z`
/// with `x` on it, and a second disjoint capped axis with no end within
/// `4/√3` of `x`. Three proposal modes cycle: passing near `x` in a random
/// direction, passing near `x` across the axis, and an end just outside the end ball.
pub fn random_two_cylinder_config(seed: u64, k: u64) -> (Packing, Point3) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa4_61e);
    rng.set_stream(k);
    let own = Segment::new(Vec3::new(0.0, 0.0, -30.0), Vec3::new(0.0, 0.0, 30.0));
    let x = Vec3::new(0.0, 0.0, rng.random_range(-10.0..10.0));
    let re = r_end();
    loop {
        let d = random_unit(&mut rng);
        let len = rng.random_range(1.0..30.0);
        let seg = match k % 3 {
            0 => {
                let c = x + random_unit(&mut rng) * rng.random_range(2.0..2.4) + random_in_ball(&mut rng, 0.2);
                let s = rng.random_range(0.0..1.0);
                Segment::new(c - d * (s * len), c + d * ((1.0 - s) * len))
            }
            1 => {
                // pass at distance 2 to 2.6 from the axis near x
                let u = random_unit(&mut rng);
                let off = (u - Vec3::Z * u.dot(Vec3::Z))
                    .normalized()
                    .unwrap_or(Vec3::X);
                let c = x + off * rng.random_range(2.0..2.6) + Vec3::Z * rng.random_range(-1.0..1.0);
                let s = rng.random_range(0.0..1.0);
                Segment::new(c - d * (s * len), c + d * ((1.0 - s) * len))
            }
            _ => {
                let e = x + random_unit(&mut rng) * (re + rng.random_range(1e-6..0.3));
                Segment::new(e, e + d * len)
            }
        };
        if segment_segment_distance(&own, &seg) < 2.0 {
            continue;
        }
        if seg.endpoints().iter().any(|e| e.distance(x) <= re) {
            continue;
        }
        let p = Packing::new_mixed(vec![own, seg], true, 200.0).expect("finite axes");
        return (p, x);
    }
}

/// The deterministic capped packings the certified and end-ball checks run
/// on, with labels.
pub fn generated_packings() -> Vec<(String, Packing)> {
    let mut out = Vec::new();
    for (t, r) in [(10.0, 30.0), (20.0, 40.0), (100.0, 100.0), (200.0, 150.0)] {
        if let Ok(p) = gen_hexagonal_parallel(t, r, true) {
            out.push((format!("hexagonal t={t} R={r}"), p));
        }
    }
    for eps in [0.0, 0.01] {
        if let Ok(p) = gen_laminated_perturbed(8.0, 25.0, eps, 7) {
            out.push((format!("laminated t=8 R=25 eps={eps}"), p));
        }
    }
    if let Ok(p) = gen_hexagonal_parallel(12.0, 30.0, false).and_then(|u| nest_capped(&u)) {
        out.push(("nested hexagonal t=12 R=30".to_string(), p));
    }
    out
}

/// The first `count` packings of the randomized family, with labels.
pub fn randomized_packings(seed: u64, count: usize) -> Vec<(String, Packing)> {
    (0..count as u64)
        .map(|k| (format!("random #{k}"), random_suite_packing(seed, k).packing))
        .collect()
}
