use std::f64::consts::PI;

use cylpack::bounds::{
    alpha0, capped_formula, half_infinite_bound, log_grid, mixed_length_bound_inf, planar_density, t0,
    uncapped_formula, TABLE_FLAG_THRESHOLD,
};
use cylpack::{
    capped_bound, conjectured_density, dominance_check, make_table, mixed_length_bound, rule_of_thumb,
    uncapped_bound, Shape,
};
use proptest::prelude::*;

/// Independent evaluation: volume of the cylinder plus caps over the
/// pointwise cell-volume floor, written out from scratch.
fn capped_oracle(t: f64) -> f64 {
    let t0 = 4.0 / 3.0 * (4.0 / 3f64.sqrt() + 1.0).powi(3);
    let s12 = 12f64.sqrt();
    let num = PI * t + 4.0 * PI / 3.0;
    let den = s12 * (t - 2.0 * t0) + PI * 2.0 * t0 + 4.0 * PI / 3.0;
    num / den
}

#[test]
fn constants() {
    assert!((t0() - 48.3266786).abs() < 1e-7);
    assert!((alpha0().to_degrees() - 85.8828).abs() < 1e-4);
    assert!((planar_density() - PI / 12f64.sqrt()).abs() < 1e-16);
}

#[test]
fn capped_matches_oracle() {
    for t in log_grid(2.0 * t0(), 1e9, 200) {
        let b = capped_bound(t);
        assert!(!b.trivial);
        assert!((b.bound - capped_oracle(t)).abs() < 1e-13 * capped_oracle(t), "t = {t}");
    }
}

#[test]
fn capped_threshold_is_exactly_one() {
    assert_eq!(capped_bound(2.0 * t0()).bound, 1.0);
    assert!(capped_bound(2.0 * t0() - 1.0).trivial);
}

#[test]
fn uncapped_below_domain_is_trivial() {
    let b = uncapped_bound(2.0 * t0() + 1.0);
    assert!(b.trivial && b.raw.is_none() && b.bound == 1.0);
    // just past the threshold the raw value still exceeds 1
    let b = uncapped_bound(2.0 * t0() + 2.5);
    assert!(b.raw.unwrap() > 1.0 && b.bound == 1.0);
}

#[test]
fn table_values() {
    let rows = make_table();
    let by = |label: &str| rows.iter().find(|r| r.label == label).unwrap().clone();
    assert_eq!(format!("{:.4}", by("Capellini").bound), "0.9219");
    assert_eq!(format!("{:.4}", by("Carbon Nanotube").bound), "0.9069");
    assert!((by("20' PVC Pipe").bound - 0.9353).abs() < 3e-4);
    let broom = by("Broomstick");
    assert!(broom.flagged);
    assert_eq!(format!("{:.5}", broom.bound), "0.99730");
    assert!(rows.iter().filter(|r| r.flagged).count() == 1);
    for r in &rows {
        assert_eq!(r.flagged, (r.bound - r.printed).abs() > TABLE_FLAG_THRESHOLD);
        assert!(r.bound <= r.rule_of_thumb);
        assert!(r.conjectured < r.bound);
    }
}

#[test]
fn asymptotic_coefficients() {
    let t = 1e7;
    let c_capped = t * (capped_formula(t) - planar_density());
    let c_uncapped = t * (uncapped_formula(t) - planar_density());
    assert!((8.2..8.4).contains(&c_capped), "{c_capped}");
    assert!((8.8..8.95).contains(&c_uncapped), "{c_uncapped}");
}

#[test]
fn dominance_on_default_grid() {
    let grid = log_grid(2.0 * t0(), 1e6, 2000);
    for shape in [Shape::Capped, Shape::Uncapped] {
        let d = dominance_check(shape, &grid);
        assert!(d.passed, "{shape:?} {d:?}");
        assert_eq!(d.points, grid.len());
    }
}

#[test]
fn nesting_identity() {
    for t in log_grid(2.0 * t0() + 2.0, 1e8, 300) {
        let lhs = uncapped_formula(t) * (t - 2.0 / 3.0) / t;
        assert!((lhs - capped_formula(t - 2.0)).abs() < 1e-12);
    }
}

#[test]
fn conjectured_density_limits() {
    assert!((conjectured_density(0.0) - PI / 18f64.sqrt()).abs() < 1e-12);
    assert!((conjectured_density(1e12) - planar_density()).abs() < 1e-11);
}

#[test]
fn mixed_lengths() {
    assert!(mixed_length_bound(10.0).is_err());
    let b = mixed_length_bound(200.0).unwrap();
    assert_eq!(b.bound, capped_bound(200.0).bound);
    let inf = mixed_length_bound_inf(&[300.0, 150.0, 1000.0]).unwrap();
    assert_eq!(inf.bound, capped_bound(150.0).bound);
    assert!(mixed_length_bound_inf(&[]).is_err());
}

#[test]
fn half_infinite_limit() {
    let h = half_infinite_bound();
    assert!(h.strictly_decreasing);
    assert!(h.grid_infimum > h.value);
    assert!(h.grid_infimum - h.value < 1e-10);
}

proptest! {
    #[test]
    fn bounds_decrease(t in 2.0 * 48.3266786 + 2.0..1e8, f in 1.0001..3.0f64) {
        prop_assert!(capped_formula(t * f) < capped_formula(t));
        prop_assert!(uncapped_formula(t * f) < uncapped_formula(t));
    }

    #[test]
    fn bounds_stay_above_planar_density(t in 100.0..1e10) {
        prop_assert!(capped_bound(t).bound > planar_density());
        prop_assert!(uncapped_bound(t).bound > planar_density());
        prop_assert!(uncapped_bound(t).bound <= rule_of_thumb(t));
    }

    #[test]
    fn uncapped_weaker_than_capped(t in 2.0 * 48.3266786 + 2.0..1e9) {
        let u = uncapped_bound(t).bound;
        let c = capped_bound(t).bound;
        prop_assert!(u >= c);
    }
}

#[test]
fn comparison_curves_at_table_lengths() {
    // written out independently of the library formulas
    let planar = PI / 12f64.sqrt();
    assert!((rule_of_thumb(108.0) - (planar + 10.0 / 108.0)).abs() < 1e-15);
    assert!((rule_of_thumb(108.0) - 0.999492).abs() < 1e-6);
    let stretched = planar * (600.0 + 4.0 / 3.0) / (600.0 + 2.0 * 6f64.sqrt() / 3.0);
    assert!((conjectured_density(600.0) - stretched).abs() < 1e-15);
    assert!((conjectured_density(600.0) - 0.906448).abs() < 1e-6);
    assert!(conjectured_density(600.0) < planar);
}
