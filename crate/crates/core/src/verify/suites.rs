use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;

use super::configs::{protected_points, random_suite_packing, random_two_cylinder_config};
use super::{Check, SuiteReport, VerifyOptions};
use crate::bounds::{
    alpha0, capped_bound, capped_formula, conjectured_density, dominance_check, hex_area, log_grid, planar_density,
    r_hex, t0, uncapped_formula, Shape,
};
use crate::extremal::{
    min_total_area_with, parabola_direction_sweep, per_radian_floor, piece_area_unchecked, three_ball_min_radius_with,
    three_ball_solve, MinAreaOptions, ThreeBallOptions,
};
use crate::geometry::{Point3, Segment, Vec3};
use crate::packing::{gen_hexagonal_parallel, is_valid_packing, Packing};
use crate::slice::{
    axis_measures, cell_volume_identity, certified_bound_for_packing, end_ball_axis_length, equidistant_angle_max,
    is_qualified, truncate_rearrange, DirichletSlice, SliceConfig,
};

const SIXTY: f64 = PI / 3.0;

pub fn extremal_suite(opts: &VerifyOptions) -> SuiteReport {
    let r = min_total_area_with(&MinAreaOptions {
        starts: opts.starts,
        seed: opts.seed,
        ..MinAreaOptions::default()
    });
    let hex = hex_area();
    let mut checks = vec![
        Check::near("min total area is √12", r.min_area, hex, 1e-6),
        Check::holds("argmin has six pieces", r.argmin.len() == 6),
        Check::at_most(
            "argmin pieces are 60°",
            r.argmin.iter().map(|b| (b - SIXTY).abs()).fold(0.0, f64::max),
            1e-4,
        )
        .with_witness(json!({ "argmin": r.argmin })),
        Check::at_least("no evaluated composition beats the minimum", r.lowest_evaluated, r.min_area - 1e-9),
    ];

    let h = 1e-9;
    let jump = (piece_area_unchecked(SIXTY + h) - piece_area_unchecked(SIXTY - h)).abs();
    checks.push(Check::at_most("piece area continuous at 60°", jump, 1e-8));

    // per-radian area never drops below the 60° chord piece's
    let floor = per_radian_floor();
    let (lo, hi) = (55f64.to_radians(), alpha0());
    let n = 10_000;
    let (worst, at) = (0..=n)
        .map(|k| {
            let b = lo + (hi - lo) * k as f64 / n as f64;
            (piece_area_unchecked(b) / b - floor, b)
        })
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    checks.push(
        Check::at_least("per-radian area floor on [55°, α₀]", worst, -1e-12).with_witness(json!({ "beta": at })),
    );

    for beta in [65f64.to_radians(), 75f64.to_radians(), alpha0()] {
        match parabola_direction_sweep(beta, 200) {
            Ok(s) => checks.push(
                Check::at_least(
                    format!("apex-tangent parabola minimal at β = {:.2}°", beta.to_degrees()),
                    s.min_area,
                    s.apex_area - 1e-9,
                )
                .with_witness(json!({ "argmin_tilt": s.argmin_tilt })),
            ),
            Err(e) => checks.push(Check::holds(format!("parabola sweep at {beta}: {e}"), false)),
        }
    }
    SuiteReport::new("extremal", checks)
}

pub fn three_ball_suite(opts: &VerifyOptions) -> SuiteReport {
    let res = three_ball_min_radius_with(&ThreeBallOptions {
        seeds: 20,
        base_seed: opts.seed,
    });
    let target = 2.0 / 3f64.sqrt() - 1.0;
    let worst = res
        .solutions
        .iter()
        .max_by(|a, b| (a.radius - target).abs().total_cmp(&(b.radius - target).abs()))
        .expect("starts");
    let mut checks = vec![
        Check::near("minimal radius is 2/√3 − 1", res.radius, target, 1e-6),
        Check::near("every start reaches 2/√3 − 1", worst.radius, target, 1e-6)
            .with_witness(json!({ "start": worst.start })),
        Check::at_most("spread over starts", res.spread, 1e-8),
    ];
    let t = |s: f64| {
        let h = s / 3f64.sqrt();
        [
            Vec3::new(h, 0.0, 0.0),
            Vec3::new(-0.5 * h, 0.5 * s, 0.0),
            Vec3::new(-0.5 * h, -0.5 * s, 0.0),
        ]
    };
    let spread = three_ball_solve("spread", t(2.5), Vec3::ZERO, 0.5);
    checks.push(Check::near("spread start pulled back to contact", spread.min_pair_distance, 2.0, 1e-6));
    SuiteReport::new("three-ball", checks)
}

#[derive(Debug, Clone)]
struct PointStats {
    points: usize,
    invalid: Vec<u64>,
    errors: Vec<String>,
    area_margin: (f64, serde_json::Value),
    event_margin: f64,
    convexity: f64,
    dss_margin: f64,
    monotone: f64,
    max_angle: f64,
}

impl PointStats {
    fn empty() -> Self {
        PointStats {
            points: 0,
            invalid: Vec::new(),
            errors: Vec::new(),
            area_margin: (f64::INFINITY, serde_json::Value::Null),
            event_margin: f64::INFINITY,
            convexity: 0.0,
            dss_margin: f64::INFINITY,
            monotone: f64::NEG_INFINITY,
            max_angle: 0.0,
        }
    }

    fn merge(mut self, o: PointStats) -> Self {
        self.points += o.points;
        self.invalid.extend(o.invalid);
        self.errors.extend(o.errors);
        if o.area_margin.0 < self.area_margin.0 {
            self.area_margin = o.area_margin;
        }
        self.event_margin = self.event_margin.min(o.event_margin);
        self.convexity = self.convexity.max(o.convexity);
        self.dss_margin = self.dss_margin.min(o.dss_margin);
        self.monotone = self.monotone.max(o.monotone);
        self.max_angle = self.max_angle.max(o.max_angle);
        self
    }
}

fn packing_stats(seed: u64, k: u64, points: usize) -> PointStats {
    let sp = random_suite_packing(seed, k);
    let mut st = PointStats::empty();
    if !is_valid_packing(&sp.packing).valid {
        st.invalid.push(k);
    }
    let q = &sp.restricted;
    let rh = r_hex();
    let hex = hex_area();
    let cfg = SliceConfig::default();
    for (i, x) in protected_points(q, points, seed, k) {
        st.points += 1;
        let s = match DirichletSlice::new(q, i, x, &cfg) {
            Ok(s) => s,
            Err(e) => {
                st.errors.push(format!("packing {k}, axis {i}: {e}"));
                continue;
            }
        };
        let area = match s.area(1e-10) {
            Ok(a) => a,
            Err(e) => {
                st.errors.push(format!("packing {k}, axis {i}: {e}"));
                continue;
            }
        };
        if area - hex < st.area_margin.0 {
            st.area_margin = (area - hex, json!({ "packing": k, "axis": i, "x": x.to_array(), "area": area }));
        }
        for e in &s.events {
            st.event_margin = st.event_margin.min(e.r - rh);
        }
        st.convexity = st.convexity.max(s.convexity_defect());
        match truncate_rearrange(&s) {
            Ok(r) => {
                st.dss_margin = st.dss_margin.min(r.area_dstarstar - hex);
                st.monotone = st
                    .monotone
                    .max(r.area_dstarstar - r.area_dstar)
                    .max(r.area_dstar - area);
            }
            Err(e) => st.errors.push(format!("packing {k}, axis {i}: {e}")),
        }
        for j in (0..q.len()).filter(|&j| j != i) {
            match equidistant_angle_max(q, i, j, x) {
                Ok(Some(a)) => st.max_angle = st.max_angle.max(a),
                Ok(None) => {}
                Err(e) => st.errors.push(format!("packing {k}, axes {i},{j}: {e}")),
            }
        }
    }
    st
}

/// Points at the middle of the `count` hexagonal-lattice cylinders nearest
/// the center, where every neighbor is a full-length parallel cylinder.
fn hex_interior_points(p: &Packing, count: usize) -> Vec<(usize, Point3)> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ma, mb) = (p.cylinders[a].axis.midpoint(), p.cylinders[b].axis.midpoint());
        ma.norm().total_cmp(&mb.norm()).then(a.cmp(&b))
    });
    idx.into_iter()
        .take(count)
        .map(|i| (i, p.cylinders[i].axis.midpoint()))
        .collect()
}

pub fn qualified_suite(opts: &VerifyOptions) -> SuiteReport {
    let hex = hex_area();
    let st = (0..opts.packings as u64)
        .into_par_iter()
        .map(|k| packing_stats(opts.seed, k, opts.points))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(PointStats::empty(), PointStats::merge);

    let mut checks = vec![
        Check::at_least("protected points sampled", st.points as f64, (opts.packings * opts.points) as f64 * 0.9),
        Check::holds("random packings valid", st.invalid.is_empty()).with_witness(json!({ "invalid": st.invalid })),
        Check::holds("slices constructed", st.errors.is_empty()).with_witness(json!({ "errors": st.errors })),
        Check::at_least("slice area exceeds √12", st.area_margin.0, -1e-6).with_witness(st.area_margin.1.clone()),
        Check::at_least("boundary events outside the 2/√3 circle", st.event_margin, -1e-9),
        Check::at_most("slices convex", st.convexity, 1e-9),
        Check::at_least("rearranged area at least √12", st.dss_margin, -1e-6),
        Check::at_most("truncation and rearrangement never add area", st.monotone, 1e-9),
        Check::at_most("equidistant angles at most α₀", st.max_angle, alpha0() + 1e-6),
    ];

    let cfg = SliceConfig::default();
    for capped in [true, false] {
        let label = if capped { "capped" } else { "uncapped" };
        let p = match gen_hexagonal_parallel(10.0, 30.0, capped) {
            Ok(p) => p,
            Err(e) => {
                checks.push(Check::holds(format!("{label} hexagonal lattice: {e}"), false));
                continue;
            }
        };
        let mut worst = 0.0f64;
        let mut qualified = false;
        let mut dss = 0.0f64;
        for (i, x) in hex_interior_points(&p, 7) {
            let s = DirichletSlice::new(&p, i, x, &cfg);
            let a = s.as_ref().map_err(|e| e.to_string()).and_then(|s| s.area(1e-10).map_err(|e| e.to_string()));
            match (s, a) {
                (Ok(s), Ok(a)) => {
                    worst = worst.max((a - hex).abs());
                    qualified |= is_qualified(&p, i, x, 1e-9).unwrap_or(true);
                    dss = match truncate_rearrange(&s) {
                        Ok(r) => dss.max((r.area_dstarstar - hex).abs()),
                        Err(_) => f64::INFINITY,
                    };
                }
                _ => worst = f64::INFINITY,
            }
        }
        checks.push(Check::at_most(format!("{label} hexagonal interior slice is √12"), worst, 1e-5));
        checks.push(Check::holds(format!("{label} hexagonal interior points not qualified"), !qualified));
        checks.push(Check::at_most(format!("{label} hexagonal rearranged area is √12"), dss, 1e-6));
    }
    SuiteReport::new("qualified", checks)
}

pub fn angle_suite(opts: &VerifyOptions) -> SuiteReport {
    let results: Vec<(u64, Result<Option<f64>, String>)> = (0..opts.angle_configs as u64)
        .into_par_iter()
        .map(|k| {
            let (p, x) = random_two_cylinder_config(opts.seed, k);
            (k, equidistant_angle_max(&p, 0, 1, x).map_err(|e| e.to_string()))
        })
        .collect();
    let errors: Vec<String> = results
        .iter()
        .filter_map(|(k, r)| r.as_ref().err().map(|e| format!("config {k}: {e}")))
        .collect();
    let hits = results.iter().filter(|(_, r)| matches!(r, Ok(Some(_)))).count();
    let (worst, at) = results
        .iter()
        .filter_map(|(k, r)| match r {
            Ok(Some(a)) => Some((*a, *k)),
            _ => None,
        })
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });

    let own = Segment::new(Vec3::new(0.0, 0.0, -20.0), Vec3::new(0.0, 0.0, 20.0));
    let other = Segment::new(Vec3::new(2.0, 0.0, -20.0), Vec3::new(2.0, 0.0, 20.0));
    let tangent = Packing::new(vec![own, other], 40.0, true, 60.0)
        .map_err(|e| e.to_string())
        .and_then(|p| equidistant_angle_max(&p, 0, 1, Vec3::ZERO).map_err(|e| e.to_string()));
    let tangent = match tangent {
        Ok(Some(a)) => a,
        _ => f64::NAN,
    };

    let checks = vec![
        Check::holds("configurations evaluated", errors.is_empty()).with_witness(json!({ "errors": errors })),
        Check::at_least(
            "configurations with equidistant points",
            hits as f64,
            (opts.angle_configs / 4) as f64,
        ),
        Check::at_most("equidistant angle at most α₀", worst, alpha0() + 1e-6)
            .with_witness(json!({ "config": at, "angle_deg": worst.to_degrees() })),
        Check::near("parallel tangent pair angle is 60°", tangent, SIXTY, 1e-6),
    ];
    SuiteReport::new("angle", checks)
}

/// The three reference configurations of the identity suite.
pub fn identity_configs() -> Vec<(&'static str, Packing)> {
    let seg = |x: f64, y: f64, t: f64| Segment::new(Vec3::new(x, y, -t / 2.0), Vec3::new(x, y, t / 2.0));
    let t = 4.0;
    let mut out = Vec::new();
    if let Ok(p) = Packing::new(vec![seg(0.0, 0.0, t)], t, true, 6.0) {
        out.push(("isolated cylinder", p));
    }
    if let Ok(p) = Packing::new(vec![seg(0.0, 0.0, t), seg(2.0, 0.0, t)], t, true, 6.0) {
        out.push(("tangent pair", p));
    }
    let mut cluster = vec![seg(0.0, 0.0, t)];
    cluster.extend((0..6).map(|k| {
        let a = k as f64 * SIXTY;
        seg(2.0 * a.cos(), 2.0 * a.sin(), t)
    }));
    if let Ok(p) = Packing::new(cluster, t, true, 8.0) {
        out.push(("hexagonal cluster", p));
    }
    out
}

pub fn identity_suite(opts: &VerifyOptions) -> SuiteReport {
    let mut checks = Vec::new();
    for (k, (name, p)) in identity_configs().into_iter().enumerate() {
        match cell_volume_identity(&p, 0, opts.mc_samples, opts.seed.wrapping_add(k as u64)) {
            Ok(id) => {
                let diff = (id.integral - id.mc).abs();
                let allowed = 4.0 * id.mc_stderr + id.quadrature_budget;
                checks.push(
                    Check::at_most(format!("{name}: integral matches sampled volume"), diff, allowed)
                        .with_witness(json!(id)),
                );
                if k == 0 {
                    let (r, t) = (p.radius, p.t);
                    let exact = PI * (r * r * t - t.powi(3) / 12.0);
                    checks.push(Check::near("isolated cylinder: closed form", id.integral, exact, 1e-6 * exact));
                }
            }
            Err(e) => checks.push(Check::holds(format!("{name}: {e}"), false)),
        }
    }
    SuiteReport::new("identity", checks)
}

pub fn dominance_suite(_opts: &VerifyOptions) -> SuiteReport {
    let lo = 2.0 * t0();
    let mut checks = vec![Check::holds("capped bound is 1 at 2t₀", capped_bound(lo).bound == 1.0)];

    let strictly_decreasing = |f: fn(f64) -> f64, from: f64| -> (bool, f64) {
        let grid = log_grid(from, 1e6, 4000);
        let bad = grid.windows(2).find(|w| f(w[1]) >= f(w[0]));
        (bad.is_none(), bad.map_or(f64::NAN, |w| w[0]))
    };
    let (ok, at) = strictly_decreasing(capped_formula, lo);
    checks.push(Check::holds("capped bound strictly decreasing", ok).with_witness(json!({ "t": at })));
    let (ok, at) = strictly_decreasing(uncapped_formula, lo + 2.0);
    checks.push(Check::holds("uncapped bound strictly decreasing", ok).with_witness(json!({ "t": at })));

    let grid = log_grid(lo, 1e6, 2000);
    for shape in [Shape::Capped, Shape::Uncapped] {
        let d = dominance_check(shape, &grid);
        checks.push(
            Check::at_least(format!("{} bound below π/√12 + 10/t", shape.as_str()), d.worst_margin, 0.0)
                .with_witness(json!({ "t": d.worst_t })),
        );
    }

    let worst = log_grid(lo + 2.0, 1e6, 2000)
        .into_iter()
        .map(|t| {
            let lhs = uncapped_formula(t) * (t - 2.0 / 3.0) / t;
            let rhs = capped_formula(t - 2.0);
            ((lhs - rhs) / rhs).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("nesting volume-ratio identity", worst, 1e-12));

    checks.push(Check::near(
        "conjectured density at t = 0 is π/√18",
        conjectured_density(0.0),
        PI / 18f64.sqrt(),
        1e-12,
    ));
    checks.push(Check::at_most(
        "conjectured density below π/√12",
        conjectured_density(1e9),
        planar_density(),
    ));
    SuiteReport::new("dominance", checks)
}

/// End-ball axis length and axis-measure accounting over `packings`. The
/// split `μ(Y) + μ(Z)` is compared with the axis length on every axis, and
/// in total with `n t` relative to its size.
pub fn end_ball_suite(packings: &[(String, Packing)]) -> SuiteReport {
    let per: Vec<(f64, f64, f64, usize)> = packings
        .par_iter()
        .map(|(_, p)| {
            let worst = p
                .ends()
                .iter()
                .map(|&e| end_ball_axis_length(p, e))
                .fold(0.0, f64::max);
            let m = axis_measures(p, p.radius);
            let per_axis = m
                .per_axis
                .iter()
                .map(|a| {
                    let covered: f64 = a.y.iter().chain(&a.z).map(|(u, v)| v - u).sum();
                    (covered - a.length).abs()
                })
                .fold(0.0, f64::max);
            let nt = if p.mixed { m.mu_a } else { m.n as f64 * p.t };
            let total = if nt > 0.0 { (m.mu_y + m.mu_z - nt).abs() / nt } else { 0.0 };
            (worst, per_axis, total, p.ends().len())
        })
        .collect();
    let (worst, at) = per
        .iter()
        .enumerate()
        .map(|(k, v)| (v.0, k))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let per_axis = per.iter().map(|v| v.1).fold(0.0, f64::max);
    let total = per.iter().map(|v| v.2).fold(0.0, f64::max);
    let ends: usize = per.iter().map(|v| v.3).sum();
    let checks = vec![
        Check::at_least("ends examined", ends as f64, 1.0),
        Check::at_most("axis length near an end at most t₀", worst, t0() + 1e-6)
            .with_witness(json!({ "packing": packings.get(at).map(|p| p.0.clone()) })),
        Check::at_most("Y and Z split every axis", per_axis, 1e-9),
        Check::at_most("μ(Y) + μ(Z) equals n t (relative)", total, 1e-9),
    ];
    SuiteReport::new("end-ball", checks)
}

/// Certified bound against measured density for capped `packings`, each
/// restricted to `B(R − 2/√3)`.
pub fn certified_suite(packings: &[(String, Packing)]) -> SuiteReport {
    let checks = packings
        .par_iter()
        .map(|(name, p)| match certified_bound_for_packing(p, p.radius - r_hex()) {
            Ok(c) => Check::at_most(format!("{name}: measured density within certified bound"), c.measured, c.bound)
                .with_witness(json!(c)),
            Err(e) => Check::holds(format!("{name}: {e}"), false),
        })
        .collect();
    SuiteReport::new("certified", checks)
}
