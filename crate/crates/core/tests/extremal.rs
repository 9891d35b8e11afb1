use std::f64::consts::{PI, TAU};

use cylpack::bounds::{alpha0, r_hex};
use cylpack::extremal::{
    min_total_area_with, minimal_enclosing_radius, parabola_direction_sweep, per_radian_floor, piece_area_derivative,
    piece_kind, project_capped_simplex, three_ball_min_radius_with, MinAreaOptions, PieceKind, ThreeBallOptions,
};
use cylpack::{piece_area, Vec3};
use proptest::prelude::*;

/// Shoelace area of the piece outline: `x`, `y`, the boundary curve, `z`.
fn piece_area_polygon(beta: f64) -> f64 {
    let r = r_hex();
    let half = beta / 2.0;
    let (sy, hy) = (-r * half.sin(), r * half.cos());
    let n = 20_000;
    let mut pts = vec![(0.0, 0.0)];
    if beta <= PI / 3.0 {
        pts.push((sy, hy));
        pts.push((-sy, hy));
    } else {
        // parabola with apex (0, 1) through (±|sy|, hy)
        let k = (1.0 - hy) / (sy * sy);
        for m in 0..=n {
            let s = sy + (-2.0 * sy) * m as f64 / n as f64;
            pts.push((s, 1.0 - k * s * s));
        }
    }
    let mut a = 0.0;
    for w in 0..pts.len() {
        let (x0, y0) = pts[w];
        let (x1, y1) = pts[(w + 1) % pts.len()];
        a += x0 * y1 - x1 * y0;
    }
    0.5 * a.abs()
}

#[test]
fn reference_piece_areas() {
    let sixty = piece_area(PI / 3.0).unwrap();
    assert!((sixty - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!((6.0 * sixty - 12f64.sqrt()).abs() < 1e-14);
    assert!((piece_area(alpha0()).unwrap() - 0.827204319201866).abs() < 1e-12);
    assert!(piece_area(alpha0() + 1e-6).is_err());
    assert!(piece_area(0.0).is_err());
    assert_eq!(piece_kind(PI / 3.0), PieceKind::Chord);
    assert_eq!(piece_kind(1.1), PieceKind::Parabola);
}

#[test]
fn alpha0_apex_parabola_reaches_the_circle_at_its_vertices() {
    // at α₀ the piece vertices are where the chord sits at height √3 − 1
    let half = alpha0() / 2.0;
    assert!((r_hex() * half.cos() - (2.0 - 2.0 / 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn derivative_kink_at_sixty() {
    let s = PI / 3.0;
    assert!((piece_area_derivative(s - 1e-12) - 1.0 / 3.0).abs() < 1e-9);
    assert!((piece_area_derivative(s) - 5.0 / 9.0).abs() < 1e-9);
}

#[test]
fn per_radian_floor_is_the_sixty_degree_piece() {
    let f = per_radian_floor();
    assert!((f - 12f64.sqrt() / TAU).abs() < 1e-15);
    for k in 1..=1000 {
        let b = alpha0() * k as f64 / 1000.0;
        assert!(piece_area(b).unwrap() / b >= f - 1e-12, "beta = {b}");
    }
}

#[test]
fn apex_parabola_is_minimal_among_directions() {
    for deg in [61.0f64, 70.0, 80.0] {
        let s = parabola_direction_sweep(deg.to_radians(), 120).unwrap();
        assert!(s.min_area >= s.apex_area - 1e-9, "{s:?}");
        assert!(s.argmin_tilt.abs() < 1e-6);
    }
    assert!(parabola_direction_sweep(0.5, 10).is_err());
}

#[test]
fn reduced_search_finds_the_hexagon() {
    let r = min_total_area_with(&MinAreaOptions {
        min_pieces: 5,
        max_pieces: 12,
        starts: 8,
        iterations: 300,
        scan_points: 100,
        seed: 9,
    });
    assert!((r.min_area - 12f64.sqrt()).abs() < 1e-9);
    assert!(r.argmin.iter().all(|b| (b - PI / 3.0).abs() < 1e-6));
    assert!(r.per_count.iter().all(|&(_, v)| v >= r.min_area - 1e-12));
    assert!(r.lowest_evaluated >= 12f64.sqrt() - 1e-9);
}

#[test]
fn three_ball_reduced() {
    let r = three_ball_min_radius_with(&ThreeBallOptions { seeds: 4, base_seed: 3 });
    assert_eq!(r.solutions.len(), 6);
    assert!((r.radius - (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-9);
    for s in &r.solutions {
        assert!(s.min_pair_distance >= 2.0 - 1e-6, "{s:?}");
    }
}

proptest! {
    #[test]
    fn piece_area_matches_polygon(beta in 0.01..1.4989f64) {
        let a = piece_area(beta).unwrap();
        prop_assert!((a - piece_area_polygon(beta)).abs() < 1e-8, "{} vs {}", a, piece_area_polygon(beta));
    }

    #[test]
    fn compositions_never_beat_sqrt12(w in proptest::collection::vec(0.05..1.0f64, 5..20)) {
        let mut beta = w;
        project_capped_simplex(&mut beta, TAU, 1e-9, alpha0());
        let s: f64 = beta.iter().sum();
        prop_assume!((s - TAU).abs() < 1e-9);
        let total: f64 = beta.iter().map(|&b| piece_area(b.max(1e-12)).unwrap()).sum();
        prop_assert!(total >= 12f64.sqrt() - 1e-9);
    }

    #[test]
    fn separated_triangles_need_the_radius(
        a in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        b in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        c in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
    ) {
        let p = [Vec3::new(a.0, a.1, a.2), Vec3::new(b.0, b.1, b.2), Vec3::new(c.0, c.1, c.2)];
        let dmin = p[0].distance(p[1]).min(p[1].distance(p[2])).min(p[2].distance(p[0]));
        prop_assume!(dmin > 1e-6);
        // scale so the closest pair touches
        let q = p.map(|v| v * (2.0 / dmin));
        prop_assert!(minimal_enclosing_radius(q) - 1.0 >= 2.0 / 3f64.sqrt() - 1.0 - 1e-12);
    }
}
