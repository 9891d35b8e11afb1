//! One-dimensional quadrature: adaptive Simpson for angular integrals and
//! adaptive Gauss–Legendre panels for integrals along an axis.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Absolute floor applied to every relative tolerance.
pub const ABS_FLOOR: f64 = 1e-12;

const MAX_DEPTH: u32 = 48;
const SEED_PANELS: usize = 32;

/// Adaptive Simpson integration of `f` over `[a, b]` with relative
/// tolerance `tol` (absolute floor [`ABS_FLOOR`]).
///
/// A coarse composite rule sets the absolute target; each seed panel is
/// then bisected until the interval-doubling test `|S2 - S1| <= 15 eps`
/// holds. Subdivision order is fixed, so results are deterministic.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(x))
        }
    };

    let h = (b - a) / SEED_PANELS as f64;
    let mut panels = Vec::with_capacity(SEED_PANELS);
    let mut coarse = 0.0;
    for k in 0..SEED_PANELS {
        let x0 = a + h * k as f64;
        let x1 = if k + 1 == SEED_PANELS { b } else { x0 + h };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (eval(x0)?, eval(xm)?, eval(x1)?);
        let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        coarse += s;
        panels.push((x0, x1, f0, fm, f1, s));
    }
    let target = (tol * coarse.abs()).max(ABS_FLOOR);
    let mut total = 0.0;
    for (x0, x1, f0, fm, f1, s) in panels {
        let eps = target * (x1 - x0) / (b - a);
        total += simpson_rec(&eval, x0, x1, f0, fm, f1, s, eps, MAX_DEPTH)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}

/// Area `1/2 ∫ r(θ)² dθ` of a star-shaped region given its radius function
/// about the star center.
pub fn area_from_radius_fn<F>(r: F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    area_from_radius_fn_with_breaks(r, &[], tol)
}

/// Like [`area_from_radius_fn`], but integrates each interval between the
/// given angles separately so that kinks of `r` sit on panel boundaries.
/// Break angles are taken modulo `2π`.
pub fn area_from_radius_fn_with_breaks<F>(r: F, breaks: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut cuts: Vec<f64> = breaks.iter().map(|b| b.rem_euclid(TAU)).collect();
    cuts.push(0.0);
    cuts.push(TAU);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let half_sq = |t: f64| {
        let v = r(t);
        0.5 * v * v
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += adaptive_simpson(half_sq, w[0], w[1], tol)?;
    }
    Ok(total)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(8))
}

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (xs, ws) = gl8();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    xs.iter()
        .zip(ws)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Result of an adaptive panel integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelIntegral {
    pub value: f64,
    /// Sum over accepted panels of `|two halves - whole|`.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Adaptive Gauss–Legendre integration over `[a, b]` with the given
/// breakpoints forced onto panel boundaries. Panels are refined in a fixed
/// left-to-right order, so the reduction is deterministic.
pub fn gauss_legendre_adaptive<F>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> PanelIntegral
where
    F: Fn(f64) -> f64,
{
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13);

    let coarse: f64 = cuts.windows(2).map(|w| gl_panel(&f, w[0], w[1])).sum();
    let target = (tol * coarse.abs()).max(ABS_FLOOR);
    let mut out = PanelIntegral {
        value: 0.0,
        error_estimate: 0.0,
        panels: 0,
    };
    for w in cuts.windows(2) {
        let eps = target * (w[1] - w[0]) / (b - a);
        let whole = gl_panel(&f, w[0], w[1]);
        gl_rec(&f, w[0], w[1], whole, eps, 30, &mut out);
    }
    out
}

fn gl_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    out: &mut PanelIntegral,
) {
    let m = 0.5 * (a + b);
    let l = gl_panel(f, a, m);
    let r = gl_panel(f, m, b);
    let err = (l + r - whole).abs();
    if depth == 0 || err <= eps {
        out.value += l + r;
        out.error_estimate += err;
        out.panels += 2;
        return;
    }
    gl_rec(f, a, m, l, 0.5 * eps, depth - 1, out);
    gl_rec(f, m, b, r, 0.5 * eps, depth - 1, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disc_and_hexagon() {
        let tol = 1e-10;
        let a = area_from_radius_fn(|_| 1.0, tol).unwrap();
        assert!((a - PI).abs() < tol * PI);

        let rc = 2.0 / 3f64.sqrt();
        let a = area_from_radius_fn(|_| rc, tol).unwrap();
        assert!((a - 4.0 * PI / 3.0).abs() < tol * 4.0);

        // Regular hexagon, circumradius rc, vertices at multiples of 60 degrees.
        let apothem = 1.0;
        let hex = |t: f64| {
            let phi = (t + PI / 6.0).rem_euclid(PI / 3.0) - PI / 6.0;
            apothem / phi.cos()
        };
        let breaks: Vec<f64> = (0..6).map(|k| k as f64 * PI / 3.0 + PI / 6.0).collect();
        let a = area_from_radius_fn_with_breaks(hex, &breaks, tol).unwrap();
        assert!((a - 12f64.sqrt()).abs() < tol * 4.0, "{a}");
        // without breaks the kinks still integrate to tolerance
        let a = area_from_radius_fn(hex, 1e-8).unwrap();
        assert!((a - 12f64.sqrt()).abs() < 1e-7, "{a}");
    }

    #[test]
    fn rejects_non_finite() {
        let err = area_from_radius_fn(|t| if t > 1.0 { f64::NAN } else { 1.0 }, 1e-6);
        assert!(matches!(err, Err(Error::NonFinite(_))));
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 8, 12] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact through degree 2n-1
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n} q={q}");
        }
    }

    #[test]
    fn adaptive_gl_handles_kinks_at_breaks() {
        let f = |x: f64| (x - 0.3).abs();
        let r = gauss_legendre_adaptive(f, 0.0, 1.0, &[0.3], 1e-12);
        let exact = 0.5 * 0.09 + 0.5 * 0.49;
        assert!((r.value - exact).abs() < 1e-14);
        let r = gauss_legendre_adaptive(f, 0.0, 1.0, &[], 1e-10);
        assert!((r.value - exact).abs() < 1e-9);
    }
}
