use std::f64::consts::{PI, TAU};

use cylpack::bounds::{hex_area, r_end, r_hex};
use cylpack::slice::{slice_radius_bisect, truncate_rearrange, EventKind};
use cylpack::verify::{protected_points, random_suite_packing};
use cylpack::{
    axis_measures, end_ball_axis_length, gen_hexagonal_parallel, has_end_near, is_qualified,
    point_segment_distance, slice_area, DirichletSlice, Packing, Point3, Segment, SliceConfig, Vec3,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Membership in `d_x` straight from the definition.
fn member(p: &Packing, i: usize, q: Point3) -> bool {
    let own = point_segment_distance(q, &p.cylinders[i].axis);
    q.norm() <= p.radius
        && p.cylinders
            .iter()
            .enumerate()
            .all(|(j, c)| j == i || own <= point_segment_distance(q, &c.axis))
}

fn zaxis(x: f64, y: f64, t: f64) -> Segment {
    Segment::new(Vec3::new(x, y, -t / 2.0), Vec3::new(x, y, t / 2.0))
}

#[test]
fn radius_agrees_with_grid_membership() {
    let sp = random_suite_packing(5, 2);
    let q = &sp.restricted;
    let cfg = SliceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for (i, x) in protected_points(q, 3, 5, 2) {
        let s = DirichletSlice::new(q, i, x, &cfg).unwrap();
        let rmax = s.samples.iter().map(|r| r.r).fold(0.0, f64::max) * 1.2;
        for _ in 0..10_000 {
            let th = rng.random_range(0.0..TAU);
            let r = rng.random_range(0.0..rmax);
            let pt = s.frame.point(th, r);
            let boundary = s.radius(th);
            if (r - boundary).abs() < 1e-7 {
                continue;
            }
            assert_eq!(member(q, i, pt), r < boundary, "axis {i}, theta {th}, r {r}, boundary {boundary}");
            checked += 1;
        }
    }
    assert!(checked > 20_000);
}

#[test]
fn area_agrees_with_sampled_membership() {
    let sp = random_suite_packing(9, 1);
    let q = &sp.restricted;
    let (i, x) = protected_points(q, 1, 9, 1)[0];
    let s = DirichletSlice::new(q, i, x, &SliceConfig::default()).unwrap();
    let area = s.area(1e-10).unwrap();
    let rmax = s.samples.iter().map(|r| r.r).fold(0.0, f64::max) * 1.05;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let mut hits = 0u64;
    for _ in 0..n {
        let (u, v) = loop {
            let u: f64 = rng.random_range(-1.0..1.0);
            let v: f64 = rng.random_range(-1.0..1.0);
            if u * u + v * v <= 1.0 {
                break (u, v);
            }
        };
        let pt = x + s.frame.u * (u * rmax) + s.frame.v * (v * rmax);
        if member(q, i, pt) {
            hits += 1;
        }
    }
    let disc = PI * rmax * rmax;
    let frac = hits as f64 / n as f64;
    let est = frac * disc;
    let se = disc * (frac * (1.0 - frac) / n as f64).sqrt();
    assert!((est - area).abs() < 5.0 * se, "{est} ± {se} vs {area}");
}

#[test]
fn closed_form_radius_agrees_with_bisection() {
    let sp = random_suite_packing(21, 4);
    let q = &sp.restricted;
    for (i, x) in protected_points(q, 4, 21, 4) {
        let s = DirichletSlice::new(q, i, x, &SliceConfig::default()).unwrap();
        for k in 0..90 {
            let th = TAU * k as f64 / 90.0;
            let b = slice_radius_bisect(q, i, x, th, 1e-11).unwrap();
            assert!((s.radius(th) - b).abs() < 1e-9, "{} vs {b}", s.radius(th));
        }
    }
}

#[test]
fn tangent_pair_slice_is_a_cut_disc() {
    let r: f64 = 10.0;
    let p = Packing::new(vec![zaxis(0.0, 0.0, 16.0), zaxis(2.0, 0.0, 16.0)], 16.0, true, r).unwrap();
    let area = slice_area(&p, 0, Vec3::ZERO, 1e-12).unwrap();
    let cap = r * r * (1.0 / r).acos() - (r * r - 1.0).sqrt();
    let exact = PI * r * r - cap;
    assert!((area - exact).abs() < 1e-8, "{area} vs {exact}");
    let s = DirichletSlice::new(&p, 0, Vec3::ZERO, &SliceConfig::default()).unwrap();
    // two corners where the bisector line meets the container circle
    assert_eq!(s.events.len(), 2);
    assert!(s.events.iter().all(|e| e.kind == EventKind::Type2));
    assert!(s.events.iter().all(|e| (e.r - r).abs() < 1e-9));
}

#[test]
fn isolated_slice_is_container_section() {
    let r: f64 = 7.0;
    let p = Packing::new(vec![zaxis(0.0, 0.0, 8.0)], 8.0, true, r).unwrap();
    for z in [0.0, 1.5, 3.9] {
        let a = slice_area(&p, 0, Vec3::new(0.0, 0.0, z), 1e-12).unwrap();
        assert!((a - PI * (r * r - z * z)).abs() < 1e-8);
    }
}

#[test]
fn hexagonal_interior_slices_are_hexagons() {
    let p = gen_hexagonal_parallel(20.0, 40.0, true).unwrap();
    let i = (0..p.len())
        .min_by(|&a, &b| {
            p.cylinders[a]
                .axis
                .midpoint()
                .norm()
                .total_cmp(&p.cylinders[b].axis.midpoint().norm())
        })
        .unwrap();
    let x = p.cylinders[i].axis.midpoint();
    let s = DirichletSlice::new(&p, i, x, &SliceConfig::default()).unwrap();
    assert!((s.area(1e-12).unwrap() - hex_area()).abs() < 1e-9);
    assert!(!is_qualified(&p, i, x, 1e-9).unwrap());
    let corners: Vec<_> = s.events.iter().filter(|e| e.kind == EventKind::Type3).collect();
    assert_eq!(corners.len(), 6);
    assert!(corners.iter().all(|e| (e.r - r_hex()).abs() < 1e-9));
    let r = truncate_rearrange(&s).unwrap();
    assert!((r.area_dstarstar - hex_area()).abs() < 1e-9);
}

#[test]
fn end_near_measure_matches_sampling() {
    let sp = random_suite_packing(2, 0);
    let q = &sp.restricted;
    let m = axis_measures(q, q.radius);
    let samples = 4000;
    for (c, iv) in q.cylinders.iter().zip(&m.per_axis) {
        let len = c.axis.length();
        let near = (0..samples)
            .filter(|&k| has_end_near(q, c.axis.at((k as f64 + 0.5) / samples as f64)))
            .count();
        let z: f64 = iv.z.iter().map(|(a, b)| b - a).sum();
        let est = near as f64 / samples as f64 * len;
        let slack = len / samples as f64 * (2 * iv.z.len() + 1) as f64;
        assert!((est - z).abs() <= slack, "{est} vs {z}");
    }
    let total: f64 = m.per_axis.iter().map(|a| a.length).sum();
    assert!((m.mu_y + m.mu_z - total).abs() < 1e-9);
    assert!(m.z_within_end_budget);
}

#[test]
fn end_ball_length_matches_sampling() {
    let sp = random_suite_packing(4, 3);
    let p = &sp.packing;
    let re = r_end();
    for e in p.ends().into_iter().take(6) {
        let n = 20_000;
        let sampled: f64 = p
            .cylinders
            .iter()
            .map(|c| {
                let inside = (0..n)
                    .filter(|&k| c.axis.at((k as f64 + 0.5) / n as f64).distance(e) <= re)
                    .count();
                inside as f64 / n as f64 * c.axis.length()
            })
            .sum();
        let exact = end_ball_axis_length(p, e);
        assert!((sampled - exact).abs() < 1e-2, "{sampled} vs {exact}");
        assert!(exact <= cylpack::bounds::t0());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn protected_slices_clear_the_floor(seed in 0u64..1000, k in 0u64..100) {
        let sp = random_suite_packing(seed, k);
        let q = &sp.restricted;
        for (i, x) in protected_points(q, 3, seed, k) {
            let s = DirichletSlice::new(q, i, x, &SliceConfig::default()).unwrap();
            let area = s.area(1e-10).unwrap();
            prop_assert!(area > hex_area() - 1e-6);
            prop_assert!(s.convexity_defect() < 1e-9);
            prop_assert!(s.events.iter().all(|e| e.r >= r_hex() - 1e-9));
            let r = truncate_rearrange(&s).unwrap();
            prop_assert!(r.area_dstarstar <= r.area_dstar + 1e-9);
            prop_assert!(r.area_dstar <= area + 1e-9);
            prop_assert!(r.area_dstarstar >= hex_area() - 1e-6);
            prop_assert!((r.total_angle() - TAU).abs() < 1e-9);
        }
    }
}
