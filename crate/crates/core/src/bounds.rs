//! Closed-form upper bounds on the density of cylinder packings, their
//! domains, the dominating hyperbola and the reference table.

use std::f64::consts::PI;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed constants of the bound machinery, evaluated once from their
/// definitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    /// Largest axis length that fits in a ball of radius `4/√3 + 1`.
    pub t0: f64,
    /// Largest angle subtended at `x` by two equidistant points on the
    /// circle of radius `2/√3`.
    pub alpha0: f64,
    /// Circumradius of the unit-apothem hexagon, `2/√3`.
    pub r_hex: f64,
    /// Radius of the end-exclusion ball, `4/√3`.
    pub r_end: f64,
    /// Area of the unit-apothem hexagon, `√12`.
    pub hex_area: f64,
    /// Planar circle packing density `π/√12`.
    pub planar_density: f64,
}

static PARAMS: LazyLock<BoundParams> = LazyLock::new(|| {
    let s3 = 3f64.sqrt();
    let r_end = 4.0 / s3;
    BoundParams {
        t0: 4.0 / 3.0 * (r_end + 1.0).powi(3),
        alpha0: 2.0 * (s3 - 1.0).acos(),
        r_hex: 2.0 / s3,
        r_end,
        hex_area: 12f64.sqrt(),
        planar_density: PI / 12f64.sqrt(),
    }
});

impl BoundParams {
    pub fn get() -> &'static BoundParams {
        &PARAMS
    }
}

pub fn t0() -> f64 {
    PARAMS.t0
}

pub fn alpha0() -> f64 {
    PARAMS.alpha0
}

pub fn r_hex() -> f64 {
    PARAMS.r_hex
}

pub fn r_end() -> f64 {
    PARAMS.r_end
}

pub fn hex_area() -> f64 {
    PARAMS.hex_area
}

pub fn planar_density() -> f64 {
    PARAMS.planar_density
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Capped,
    Uncapped,
    MixedAverage,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Capped => "capped",
            Shape::Uncapped => "uncapped",
            Shape::MixedAverage => "mixed-average",
        }
    }
}

impl std::str::FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "capped" => Ok(Shape::Capped),
            "uncapped" => Ok(Shape::Uncapped),
            "mixed" | "mixed-average" => Ok(Shape::MixedAverage),
            other => Err(Error::Domain(format!("unknown shape {other:?}"))),
        }
    }
}

/// A density bound, clamped to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub t: f64,
    pub shape: Shape,
    pub bound: f64,
    /// Unclamped formula value; `None` below the formula's domain.
    pub raw: Option<f64>,
    pub formula_id: &'static str,
    /// Set when only the trivial bound 1 is available.
    pub trivial: bool,
}

impl BoundResult {
    fn from_raw(t: f64, shape: Shape, formula_id: &'static str, raw: Option<f64>) -> Self {
        let (bound, trivial) = match raw {
            Some(v) if v <= 1.0 => (v, false),
            _ => (1.0, true),
        };
        BoundResult {
            t,
            shape,
            bound,
            raw,
            formula_id,
            trivial,
        }
    }
}

/// Denominator `(√12/π)(t - 2t₀) + 2t₀ + 4/3` shared by the capped family.
fn capped_denominator(t: f64) -> f64 {
    let p = BoundParams::get();
    (p.hex_area / PI) * (t - 2.0 * p.t0) + 2.0 * p.t0 + 4.0 / 3.0
}

/// The capped-cylinder formula, evaluated without regard to its domain.
pub fn capped_formula(t: f64) -> f64 {
    (t + 4.0 / 3.0) / capped_denominator(t)
}

/// The uncapped-cylinder formula, evaluated without regard to its domain.
pub fn uncapped_formula(t: f64) -> f64 {
    t / capped_denominator(t - 2.0)
}

/// Upper density bound for packings of capped `t`-cylinders. Nontrivial for
/// `t >= 2t₀`, where the formula equals 1 at the threshold.
pub fn capped_bound(t: f64) -> BoundResult {
    let raw = (t >= 2.0 * t0()).then(|| capped_formula(t));
    BoundResult::from_raw(t, Shape::Capped, "capped-t", raw)
}

/// Upper density bound for packings of (uncapped) `t`-cylinders, obtained
/// by nesting capped `(t-2)`-cylinders. Defined for `t >= 2t₀ + 2`; the raw
/// value still exceeds 1 just above the threshold.
pub fn uncapped_bound(t: f64) -> BoundResult {
    let raw = (t >= 2.0 * t0() + 2.0).then(|| uncapped_formula(t));
    BoundResult::from_raw(t, Shape::Uncapped, "uncapped-t", raw)
}

/// The dominating hyperbola `π/√12 + 10/t`, unclamped.
pub fn rule_of_thumb(t: f64) -> f64 {
    planar_density() + 10.0 / t
}

/// Bound for capped cylinders of varying length with average `t_avg`; all
/// lengths must be at least `2t₀`.
pub fn mixed_length_bound(t_avg: f64) -> Result<BoundResult> {
    if !(t_avg >= 2.0 * t0()) {
        return Err(Error::Precondition(format!(
            "average length {t_avg} is below 2 t0 = {}",
            2.0 * t0()
        )));
    }
    Ok(BoundResult::from_raw(
        t_avg,
        Shape::MixedAverage,
        "mixed-average",
        Some(capped_formula(t_avg)),
    ))
}

/// Infimum-length variant of [`mixed_length_bound`]: since the bound
/// decreases in `t`, the shortest length gives a valid (weaker) bound.
pub fn mixed_length_bound_inf(lengths: &[f64]) -> Result<BoundResult> {
    let t_min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    if !t_min.is_finite() {
        return Err(Error::Precondition("no lengths given".into()));
    }
    let mut b = mixed_length_bound(t_min)?;
    b.formula_id = "mixed-infimum";
    Ok(b)
}

/// Density of the packing conjectured to be densest: a dense sphere packing
/// stretched along one direction. Comparison only, not a bound.
pub fn conjectured_density(t: f64) -> f64 {
    planar_density() * (t + 4.0 / 3.0) / (t + 2.0 * 6f64.sqrt() / 3.0)
}

/// Outcome of [`dominance_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dominance {
    pub passed: bool,
    /// Smallest `rule_of_thumb(t) - bound(t)` over the grid.
    pub worst_margin: f64,
    pub worst_t: f64,
    pub points: usize,
}

/// Checks that the clamped bound never exceeds the hyperbola on `grid`.
pub fn dominance_check(shape: Shape, grid: &[f64]) -> Dominance {
    let mut worst = Dominance {
        passed: true,
        worst_margin: f64::INFINITY,
        worst_t: f64::NAN,
        points: grid.len(),
    };
    for &t in grid {
        let b = match shape {
            Shape::Uncapped => uncapped_bound(t).bound,
            Shape::Capped | Shape::MixedAverage => capped_bound(t).bound,
        };
        let margin = rule_of_thumb(t) - b;
        if margin < worst.worst_margin {
            worst.worst_margin = margin;
            worst.worst_t = t;
        }
        if margin < 0.0 {
            worst.passed = false;
        }
    }
    worst
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k + 1 == n {
                hi
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// The exact half-infinite density together with its numeric witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfInfinite {
    pub value: f64,
    /// `uncapped_bound` decreases strictly along the witness grid.
    pub strictly_decreasing: bool,
    /// Smallest bound seen on the grid.
    pub grid_infimum: f64,
    pub grid_max_t: f64,
}

pub fn half_infinite_bound() -> HalfInfinite {
    let grid = log_grid(2.0 * t0() + 2.0, 1e12, 2000);
    let vals: Vec<f64> = grid.iter().map(|&t| uncapped_formula(t)).collect();
    HalfInfinite {
        value: planar_density(),
        strictly_decreasing: vals.windows(2).all(|w| w[1] < w[0]),
        grid_infimum: vals.iter().copied().fold(f64::INFINITY, f64::min),
        grid_max_t: 1e12,
    }
}

/// Table rows: label, length ratio `t`, and the value printed alongside it
/// in the reference table.
pub const TABLE_ITEMS: [(&str, f64, f64); 4] = [
    ("Broomstick", 108.0, 0.9956),
    ("20' PVC Pipe", 320.0, 0.9353),
    ("Capellini", 600.0, 0.9219),
    ("Carbon Nanotube", 2.64e8, 0.9069),
];

/// Rows whose evaluation differs from the printed value by more than this
/// are flagged.
pub const TABLE_FLAG_THRESHOLD: f64 = 5e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: &'static str,
    pub t: f64,
    pub shape: Shape,
    pub bound: f64,
    pub printed: f64,
    pub trivial: bool,
    pub flagged: bool,
    pub rule_of_thumb: f64,
    pub conjectured: f64,
}

pub fn make_table() -> Vec<TableRow> {
    TABLE_ITEMS
        .iter()
        .map(|&(label, t, printed)| {
            let b = uncapped_bound(t);
            TableRow {
                label,
                t,
                shape: Shape::Uncapped,
                bound: b.bound,
                printed,
                trivial: b.trivial,
                flagged: (b.bound - printed).abs() > TABLE_FLAG_THRESHOLD,
                rule_of_thumb: rule_of_thumb(t),
                conjectured: conjectured_density(t),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let p = BoundParams::get();
        assert!((p.t0 - 48.3266786).abs() < 1e-6);
        assert!((p.alpha0.to_degrees() - 85.88).abs() < 5e-3);
        assert!((p.r_hex * p.r_hex - 4.0 / 3.0).abs() < 1e-15);
        assert!((p.hex_area - 2.0 * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn capped_threshold_is_exactly_one() {
        let b = capped_bound(2.0 * t0());
        assert_eq!(b.bound, 1.0);
        assert_eq!(b.raw, Some(1.0));
        assert!(!b.trivial);
        let b = capped_bound(96.65);
        assert!(b.trivial);
        assert_eq!(b.bound, 1.0);
        assert_eq!(b.raw, None);
    }

    #[test]
    fn uncapped_just_above_threshold_is_clamped() {
        let b = uncapped_bound(2.0 * t0() + 2.0);
        assert!(b.trivial);
        assert_eq!(b.bound, 1.0);
        // mpmath: 1.00680364509323656
        assert!((b.raw.unwrap() - 1.006_803_645_093_236_6).abs() < 1e-12);
    }

    #[test]
    fn mixed_length_examples() {
        assert!((mixed_length_bound(2.0 * t0()).unwrap().bound - 1.0).abs() < 1e-15);
        assert!(mixed_length_bound(90.0).is_err());
        let avg = mixed_length_bound(110.0).unwrap().bound;
        assert!(avg < mixed_length_bound(100.0).unwrap().bound);
        assert_eq!(mixed_length_bound(300.0).unwrap().bound, capped_bound(300.0).bound);
        let inf = mixed_length_bound_inf(&[100.0, 120.0]).unwrap();
        assert_eq!(inf.bound, mixed_length_bound(100.0).unwrap().bound);
    }

    #[test]
    fn shape_parsing() {
        assert_eq!("capped".parse::<Shape>().unwrap(), Shape::Capped);
        assert_eq!("uncapped".parse::<Shape>().unwrap(), Shape::Uncapped);
        assert!("square".parse::<Shape>().is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(2.0, 2e6, 13);
        assert_eq!(g[0], 2.0);
        assert_eq!(*g.last().unwrap(), 2e6);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
