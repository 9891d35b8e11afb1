//! Hit-or-miss Monte Carlo volume estimation with reproducible parallel
//! streams.
//!
//! Samples are split into a fixed number of partitions. Partition `k` draws
//! from ChaCha8 seeded with `seed` on stream `k`, and hit counts are summed
//! as integers, so the estimate is bit-identical for any number of worker
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{Point3, Vec3};

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aabb {
    pub lo: Point3,
    pub hi: Point3,
}

impl Aabb {
    pub fn new(lo: Point3, hi: Point3) -> Aabb {
        Aabb { lo, hi }
    }

    pub fn cube(half: f64) -> Aabb {
        Aabb::new(Vec3::new(-half, -half, -half), Vec3::new(half, half, half))
    }

    pub fn volume(&self) -> f64 {
        let d = self.hi - self.lo;
        d.x.max(0.0) * d.y.max(0.0) * d.z.max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Number of independent sample streams.
    pub partitions: usize,
    /// When set, split the box into this many equal slabs along `x` and
    /// allocate samples proportionally.
    pub strata: Option<usize>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            partitions: 64,
            strata: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Volume of `{p in bounds : member(p)}` from `n` uniform samples.
pub fn mc_volume<F>(member: F, bounds: Aabb, n: u64, seed: u64) -> VolumeEstimate
where
    F: Fn(Point3) -> bool + Sync,
{
    mc_volume_with(member, bounds, n, seed, McOptions::default())
}

pub fn mc_volume_with<F>(member: F, bounds: Aabb, n: u64, seed: u64, opts: McOptions) -> VolumeEstimate
where
    F: Fn(Point3) -> bool + Sync,
{
    assert!(n >= 1, "need at least one sample");
    match opts.strata {
        None | Some(0) | Some(1) => plain(&member, bounds, n, seed, opts.partitions.max(1)),
        Some(m) => stratified(&member, bounds, n, seed, m),
    }
}

fn sample_box(rng: &mut ChaCha8Rng, b: &Aabb) -> Point3 {
    Vec3::new(
        b.lo.x + (b.hi.x - b.lo.x) * rng.random::<f64>(),
        b.lo.y + (b.hi.y - b.lo.y) * rng.random::<f64>(),
        b.lo.z + (b.hi.z - b.lo.z) * rng.random::<f64>(),
    )
}

fn count_hits<F: Fn(Point3) -> bool>(member: &F, b: &Aabb, n: u64, seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).filter(|_| member(sample_box(&mut rng, b))).count() as u64
}

fn split(n: u64, parts: usize, k: usize) -> u64 {
    let parts = parts as u64;
    let k = k as u64;
    n / parts + u64::from(k < n % parts)
}

fn plain<F>(member: &F, b: Aabb, n: u64, seed: u64, parts: usize) -> VolumeEstimate
where
    F: Fn(Point3) -> bool + Sync,
{
    let hits: u64 = (0..parts)
        .into_par_iter()
        .map(|k| count_hits(member, &b, split(n, parts, k), seed, k as u64))
        .sum();
    let p = hits as f64 / n as f64;
    let v = b.volume();
    VolumeEstimate {
        estimate: v * p,
        stderr: v * (p * (1.0 - p) / n as f64).sqrt(),
        hits,
        samples: n,
    }
}

fn stratified<F>(member: &F, b: Aabb, n: u64, seed: u64, m: usize) -> VolumeEstimate
where
    F: Fn(Point3) -> bool + Sync,
{
    let width = (b.hi.x - b.lo.x) / m as f64;
    let per: Vec<(u64, u64, f64)> = (0..m)
        .into_par_iter()
        .map(|s| {
            let mut sb = b;
            sb.lo.x = b.lo.x + width * s as f64;
            sb.hi.x = if s + 1 == m { b.hi.x } else { sb.lo.x + width };
            let ns = split(n, m, s);
            let hits = if ns == 0 { 0 } else { count_hits(member, &sb, ns, seed, s as u64) };
            (hits, ns, sb.volume())
        })
        .collect();
    let mut estimate = 0.0;
    let mut var = 0.0;
    let mut hits = 0;
    for (h, ns, vol) in per {
        hits += h;
        if ns == 0 {
            continue;
        }
        let p = h as f64 / ns as f64;
        estimate += vol * p;
        var += vol * vol * p * (1.0 - p) / ns as f64;
    }
    VolumeEstimate {
        estimate,
        stderr: var.sqrt(),
        hits,
        samples: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball() {
        let est = mc_volume(|p| p.norm2() <= 1.0, Aabb::cube(1.0), 1_000_000, 5);
        let exact = 4.0 * PI / 3.0;
        assert!((est.estimate - exact).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn capped_two_cylinder() {
        let axis = crate::geometry::Segment::new(Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 0.0, 1.0));
        let b = Aabb::new(Vec3::new(-1.0, -1.0, -2.0), Vec3::new(1.0, 1.0, 2.0));
        let est = mc_volume(
            |p| crate::geometry::point_segment_distance(p, &axis) <= 1.0,
            b,
            1_000_000,
            9,
        );
        let exact = 2.0 * PI + 4.0 * PI / 3.0;
        assert!((est.estimate - exact).abs() < 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn worker_count_does_not_change_the_estimate() {
        let f = |p: Point3| p.x * p.x + 2.0 * p.y * p.y + p.z * p.z.abs() <= 1.0;
        let base = mc_volume(f, Aabb::cube(1.0), 200_000, 77);
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let est = pool.install(|| mc_volume(f, Aabb::cube(1.0), 200_000, 77));
            assert_eq!(est, base);
        }
    }

    #[test]
    fn stratified_mode_is_unbiased_and_tighter() {
        let f = |p: Point3| p.norm2() <= 1.0;
        let opts = McOptions {
            strata: Some(16),
            ..McOptions::default()
        };
        let s = mc_volume_with(f, Aabb::cube(1.0), 400_000, 3, opts);
        let plain = mc_volume(f, Aabb::cube(1.0), 400_000, 3);
        assert!((s.estimate - 4.0 * PI / 3.0).abs() < 4.0 * s.stderr);
        assert!(s.stderr < plain.stderr);
    }
}
