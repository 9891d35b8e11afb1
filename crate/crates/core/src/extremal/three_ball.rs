//! Smallest ball meeting three pairwise non-overlapping unit balls.
//!
//! Variables are the three centers, the ball center `q` and its radius
//! `ℓ`; the problem is `min ℓ` subject to `|c_i − c_j| ≥ 2` and
//! `|q − c_k| ≤ 1 + ℓ`. It is solved by an augmented Lagrangian with BFGS
//! inner solves, then made exactly feasible by rescaling the centers to a
//! minimum separation of 2 and taking `q` at their minimal enclosing circle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::Vec3;

const DIM: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBallOptions {
    /// Number of random starts.
    pub seeds: u64,
    pub base_seed: u64,
}

impl Default for ThreeBallOptions {
    fn default() -> Self {
        ThreeBallOptions {
            seeds: 20,
            base_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeBallSolution {
    /// Start description: `symmetric`, `spread`, or `seed <k>`.
    pub start: String,
    /// Radius from the optimizer before the feasibility polish.
    pub raw_radius: f64,
    /// Radius of an exactly feasible configuration.
    pub radius: f64,
    /// Smallest pairwise center distance at the optimizer's solution.
    pub min_pair_distance: f64,
    pub centers: [Vec3; 3],
    pub q: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreeBallResult {
    pub radius: f64,
    /// Largest minus smallest radius over all starts.
    pub spread: f64,
    pub solutions: Vec<ThreeBallSolution>,
}

/// Radius of the smallest ball containing three points.
pub fn minimal_enclosing_radius(p: [Vec3; 3]) -> f64 {
    let [a, b, c] = p;
    let (ab, bc, ca) = (a.distance(b), b.distance(c), c.distance(a));
    let mut sides = [ab, bc, ca];
    sides.sort_by(f64::total_cmp);
    let [s0, s1, s2] = sides;
    if s2 * s2 >= s0 * s0 + s1 * s1 {
        return 0.5 * s2;
    }
    let area2 = (b - a).cross(c - a).norm();
    ab * bc * ca / (2.0 * area2)
}

fn unpack(z: &[f64]) -> ([Vec3; 3], Vec3, f64) {
    let v = |k: usize| Vec3::new(z[3 * k], z[3 * k + 1], z[3 * k + 2]);
    ([v(0), v(1), v(2)], v(3), z[12])
}

fn pack(c: [Vec3; 3], q: Vec3, l: f64) -> [f64; DIM] {
    let mut z = [0.0; DIM];
    for (k, p) in c.iter().chain(std::iter::once(&q)).enumerate() {
        z[3 * k..3 * k + 3].copy_from_slice(&p.to_array());
    }
    z[12] = l;
    z
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// Constraint values `g ≤ 0` and their gradients.
fn constraints(z: &[f64]) -> [(f64, [f64; DIM]); 7] {
    let (c, q, l) = unpack(z);
    let mut out = [(0.0, [0.0; DIM]); 7];
    for (m, &(i, j)) in PAIRS.iter().enumerate() {
        let d = c[i] - c[j];
        out[m].0 = 4.0 - d.norm2();
        for k in 0..3 {
            let g = -2.0 * d.to_array()[k];
            out[m].1[3 * i + k] = g;
            out[m].1[3 * j + k] = -g;
        }
    }
    for k in 0..3 {
        let d = q - c[k];
        let m = 3 + k;
        out[m].0 = d.norm2() - (1.0 + l) * (1.0 + l);
        for a in 0..3 {
            let g = 2.0 * d.to_array()[a];
            out[m].1[9 + a] = g;
            out[m].1[3 * k + a] = -g;
        }
        out[m].1[12] = -2.0 * (1.0 + l);
    }
    out[6].0 = -(1.0 + l);
    out[6].1[12] = -1.0;
    out
}

fn lagrangian(z: &[f64], lam: &[f64; 7], mu: f64) -> (f64, [f64; DIM]) {
    let mut val = z[12];
    let mut grad = [0.0; DIM];
    grad[12] = 1.0;
    for (m, (g, dg)) in constraints(z).iter().enumerate() {
        let s = (lam[m] + mu * g).max(0.0);
        val += (s * s - lam[m] * lam[m]) / (2.0 * mu);
        for k in 0..DIM {
            grad[k] += s * dg[k];
        }
    }
    (val, grad)
}

fn dot(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking.
fn bfgs<F: Fn(&[f64; DIM]) -> (f64, [f64; DIM])>(f: F, mut x: [f64; DIM], iters: usize) -> [f64; DIM] {
    let mut h = [[0.0; DIM]; DIM];
    for (k, row) in h.iter_mut().enumerate() {
        row[k] = 1.0;
    }
    let (mut fx, mut g) = f(&x);
    for _ in 0..iters {
        if dot(&g, &g).sqrt() < 1e-13 {
            break;
        }
        let mut p = [0.0; DIM];
        for i in 0..DIM {
            p[i] = -(0..DIM).map(|j| h[i][j] * g[j]).sum::<f64>();
        }
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            // not a descent direction: reset to steepest descent
            for (i, row) in h.iter_mut().enumerate() {
                row.fill(0.0);
                row[i] = 1.0;
                p[i] = -g[i];
            }
            slope = dot(&p, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn = x;
            for i in 0..DIM {
                xn[i] += step * p[i];
            }
            let (fn_, gn) = f(&xn);
            if fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else { break };
        let mut s = [0.0; DIM];
        let mut y = [0.0; DIM];
        for i in 0..DIM {
            s[i] = xn[i] - x[i];
            y[i] = gn[i] - g[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-18 {
            let mut hy = [0.0; DIM];
            for i in 0..DIM {
                hy[i] = (0..DIM).map(|j| h[i][j] * y[j]).sum();
            }
            let yhy = dot(&y, &hy);
            for i in 0..DIM {
                for j in 0..DIM {
                    h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let done = (fx - fn_).abs() <= 1e-16 * (1.0 + fx.abs()) && dot(&s, &s).sqrt() < 1e-14;
        x = xn;
        fx = fn_;
        g = gn;
        if done {
            break;
        }
    }
    x
}

/// Local solve from `(centers, q, ℓ)`.
pub fn three_ball_solve(start: &str, c: [Vec3; 3], q: Vec3, l: f64) -> ThreeBallSolution {
    let mut z = pack(c, q, l);
    let mut lam = [0.0; 7];
    let mut mu = 10.0;
    let mut prev_viol = f64::INFINITY;
    for _ in 0..200 {
        let before = z;
        z = bfgs(|x| lagrangian(x, &lam, mu), z, 2000);
        let cons = constraints(&z);
        let viol = cons.iter().map(|(g, _)| g.max(0.0)).fold(0.0, f64::max);
        for (m, (g, _)) in cons.iter().enumerate() {
            lam[m] = (lam[m] + mu * g).max(0.0);
        }
        let moved = before.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if viol < 1e-13 && moved < 1e-13 {
            break;
        }
        if viol > 0.25 * prev_viol {
            mu = (mu * 10.0).min(1e6);
        }
        prev_viol = viol;
    }
    let (c, q, raw) = unpack(&z);
    let min_pair = PAIRS
        .iter()
        .map(|&(i, j)| c[i].distance(c[j]))
        .fold(f64::INFINITY, f64::min);
    let scale = 2.0 / min_pair;
    let scaled = c.map(|p| p * scale);
    ThreeBallSolution {
        start: start.to_string(),
        raw_radius: raw,
        radius: minimal_enclosing_radius(scaled) - 1.0,
        min_pair_distance: min_pair,
        centers: c,
        q,
    }
}

fn triangle(side: f64) -> [Vec3; 3] {
    let h = side * 3f64.sqrt() / 2.0;
    [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(side, 0.0, 0.0),
        Vec3::new(0.5 * side, h, 0.0),
    ]
}

fn centroid(c: &[Vec3; 3]) -> Vec3 {
    (c[0] + c[1] + c[2]) / 3.0
}

pub fn three_ball_min_radius() -> f64 {
    three_ball_min_radius_with(&ThreeBallOptions::default()).radius
}

/// Multi-start solve: the symmetric configuration, a spread-out equilateral
/// start, and `opts.seeds` random starts.
pub fn three_ball_min_radius_with(opts: &ThreeBallOptions) -> ThreeBallResult {
    let mut starts: Vec<(String, [Vec3; 3], Vec3, f64)> = Vec::new();
    let sym = triangle(2.0);
    starts.push(("symmetric".into(), sym, centroid(&sym), 2.0 / 3f64.sqrt() - 1.0));
    let wide = triangle(2.5);
    starts.push(("spread".into(), wide, centroid(&wide), 2.5 / 3f64.sqrt() - 1.0));
    for k in 0..opts.seeds {
        let seed = opts.base_seed + k;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let c = [v(), v(), v()];
        let q = v();
        let l = c.iter().map(|p| p.distance(q)).fold(0.0, f64::max) - 0.5;
        starts.push((format!("seed {seed}"), c, q, l));
    }
    let solutions: Vec<ThreeBallSolution> = starts
        .into_par_iter()
        .map(|(name, c, q, l)| three_ball_solve(&name, c, q, l))
        .collect();
    let lo = solutions.iter().map(|s| s.radius).fold(f64::INFINITY, f64::min);
    let hi = solutions.iter().map(|s| s.radius).fold(f64::NEG_INFINITY, f64::max);
    ThreeBallResult {
        radius: lo,
        spread: hi - lo,
        solutions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosing_radius_cases() {
        let eq = triangle(2.0);
        assert!((minimal_enclosing_radius(eq) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let obtuse = [Vec3::ZERO, Vec3::new(4.0, 0.0, 0.0), Vec3::new(2.0, 0.5, 0.0)];
        assert!((minimal_enclosing_radius(obtuse) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_differences() {
        let z = pack(triangle(2.2), Vec3::new(0.9, 0.4, 0.3), 0.3);
        let lam = [0.1, 0.0, 0.3, 0.2, 0.0, 0.5, 0.0];
        let (_, g) = lagrangian(&z, &lam, 7.0);
        for k in 0..DIM {
            let mut a = z;
            let mut b = z;
            a[k] += 1e-6;
            b[k] -= 1e-6;
            let fd = (lagrangian(&a, &lam, 7.0).0 - lagrangian(&b, &lam, 7.0).0) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-5, "component {k}: {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn spread_start_is_pulled_back() {
        let wide = triangle(2.5);
        let s = three_ball_solve("spread", wide, centroid(&wide), 0.5);
        assert!((s.radius - (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-7, "{s:?}");
        assert!((s.min_pair_distance - 2.0).abs() < 1e-6);
    }
}
