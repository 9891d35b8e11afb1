//! Minimal total piece area over compositions of the full angle.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{golden_argmin, piece_area_derivative, piece_area_unchecked};
use crate::bounds::alpha0;

/// Smallest admissible piece angle in the search.
const BETA_FLOOR: f64 = 1e-9;
/// Descents per piece count that get the exchange polish.
const POLISHED: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinAreaOptions {
    pub min_pieces: usize,
    pub max_pieces: usize,
    /// Local searches per piece count.
    pub starts: usize,
    pub iterations: usize,
    /// Grid resolution of the two-value composition scan.
    pub scan_points: usize,
    pub seed: u64,
}

impl Default for MinAreaOptions {
    fn default() -> Self {
        MinAreaOptions {
            min_pieces: 5,
            max_pieces: 64,
            starts: 32,
            iterations: 600,
            scan_points: 400,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinAreaResult {
    pub min_area: f64,
    /// Best composition, angles sorted ascending.
    pub argmin: Vec<f64>,
    /// Best total for each piece count.
    pub per_count: Vec<(usize, f64)>,
    /// Number of compositions evaluated.
    pub evaluations: u64,
    /// Smallest total among all evaluated compositions.
    pub lowest_evaluated: f64,
}

fn total(beta: &[f64]) -> f64 {
    beta.iter().map(|&b| piece_area_unchecked(b)).sum()
}

/// Euclidean projection onto `{Σβ = s, lo ≤ β ≤ hi}` by bisection on the
/// common shift.
pub fn project_capped_simplex(y: &mut [f64], s: f64, lo: f64, hi: f64) {
    let sum_at = |tau: f64, y: &[f64]| -> f64 { y.iter().map(|&v| (v - tau).clamp(lo, hi)).sum() };
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut a, mut b) = (ymin - hi, ymax - lo);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if sum_at(m, y) > s {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-16 * (1.0 + a.abs()) {
            break;
        }
    }
    let tau = 0.5 * (a + b);
    for v in y.iter_mut() {
        *v = (*v - tau).clamp(lo, hi);
    }
}

struct Search {
    evaluations: u64,
    lowest: f64,
}

impl Search {
    fn eval(&mut self, beta: &[f64]) -> f64 {
        let v = total(beta);
        self.evaluations += 1;
        self.lowest = self.lowest.min(v);
        v
    }
}

/// Projected subgradient descent, keeping the best iterate.
fn descend(start: Vec<f64>, iterations: usize, search: &mut Search) -> (f64, Vec<f64>) {
    let hi = alpha0();
    let mut beta = start;
    project_capped_simplex(&mut beta, TAU, BETA_FLOOR, hi);
    let mut best_v = search.eval(&beta);
    let mut best = beta.clone();
    for k in 0..iterations {
        let step = 0.05 / ((k + 1) as f64).sqrt();
        for b in beta.iter_mut() {
            *b -= step * piece_area_derivative(*b);
        }
        project_capped_simplex(&mut beta, TAU, BETA_FLOOR, hi);
        let v = search.eval(&beta);
        if v < best_v {
            best_v = v;
            best.clone_from(&beta);
        }
    }
    (best_v, best)
}

/// Exact line searches along pairwise exchanges `β_i + δ, β_j − δ`.
fn polish(beta: &mut [f64], search: &mut Search) {
    let hi = alpha0();
    let n = beta.len();
    for _sweep in 0..50 {
        let mut improved = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (bi, bj) = (beta[i], beta[j]);
                let lo_d = (BETA_FLOOR - bi).max(bj - hi);
                let hi_d = (hi - bi).min(bj - BETA_FLOOR);
                if hi_d - lo_d < 1e-15 {
                    continue;
                }
                let pair = |d: f64| piece_area_unchecked(bi + d) + piece_area_unchecked(bj - d);
                let here = pair(0.0);
                // the pair objective is piecewise concave with kinks where a
                // piece crosses 60°, so search each smooth stretch; the
                // minimum is at a kink, an end, or a stationary point
                let mut cands = vec![lo_d, 0.0, hi_d];
                for k in [super::SIXTY - bi, bj - super::SIXTY] {
                    if k > lo_d && k < hi_d {
                        cands.push(k);
                    }
                }
                cands.sort_by(f64::total_cmp);
                let mut best = (here, 0.0);
                for w in cands.windows(2) {
                    let d = golden_argmin(pair, w[0], w[1], 1e-15);
                    for x in [w[0], d, w[1]] {
                        let v = pair(x);
                        search.evaluations += 1;
                        if v < best.0 - 1e-16 {
                            best = (v, x);
                        }
                    }
                }
                if best.1 != 0.0 && best.0 < here - 1e-16 {
                    beta[i] = bi + best.1;
                    beta[j] = bj - best.1;
                    improved = true;
                }
            }
        }
        search.eval(beta);
        if !improved {
            break;
        }
    }
}

fn starts(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let hi = alpha0();
    let mut out = Vec::with_capacity(count);
    let sym = TAU / n as f64;
    if sym <= hi {
        out.push(vec![sym; n]);
    }
    // boundary starts: k pieces at α₀, the rest sharing what remains
    for k in 1..n {
        if out.len() >= count / 2 {
            break;
        }
        let rest = TAU - k as f64 * hi;
        if rest <= 0.0 {
            break;
        }
        let each = rest / (n - k) as f64;
        if each <= hi {
            let mut v = vec![hi; k];
            v.extend(std::iter::repeat_n(each, n - k));
            out.push(v);
        }
    }
    while out.len() < count {
        let w: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = w.iter().sum();
        out.push(w.iter().map(|x| x / s * TAU).collect());
    }
    out
}

/// Best composition made of `k` pieces of one angle and `n − k` of another.
fn two_value_scan(n: usize, points: usize, search: &mut Search) -> Option<(f64, Vec<f64>)> {
    let hi = alpha0();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 1..=n {
        for m in 0..=points {
            let a = BETA_FLOOR + (hi - BETA_FLOOR) * m as f64 / points as f64;
            let b = if k == n {
                if (k as f64 * a - TAU).abs() > 1e-12 {
                    continue;
                }
                a
            } else {
                (TAU - k as f64 * a) / (n - k) as f64
            };
            if !(BETA_FLOOR..=hi).contains(&b) {
                continue;
            }
            let mut comp = vec![a; k];
            comp.extend(std::iter::repeat_n(b, n - k));
            let v = search.eval(&comp);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, comp));
            }
        }
    }
    best
}

fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && lex_less(&a.1, &b.1))
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            _ => {}
        }
    }
    a.len() < b.len()
}

/// Minimal total piece area with default options.
pub fn min_total_area() -> MinAreaResult {
    min_total_area_with(&MinAreaOptions::default())
}

pub fn min_total_area_with(opts: &MinAreaOptions) -> MinAreaResult {
    let per_count: Vec<(usize, (f64, Vec<f64>), u64, f64)> = (opts.min_pieces..=opts.max_pieces)
        .into_par_iter()
        .filter(|&n| n as f64 * alpha0() >= TAU)
        .map(|n| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(n as u64);
            let mut search = Search {
                evaluations: 0,
                lowest: f64::INFINITY,
            };
            let mut local: Vec<(f64, Vec<f64>)> = starts(n, opts.starts, &mut rng)
                .into_iter()
                .map(|s| descend(s, opts.iterations, &mut search))
                .collect();
            local.sort_by(|a, b| a.0.total_cmp(&b.0));
            // exchange polish on the most promising descents
            let mut best: Option<(f64, Vec<f64>)> = None;
            for mut cand in local.into_iter().take(POLISHED) {
                polish(&mut cand.1, &mut search);
                cand.0 = search.eval(&cand.1);
                cand.1.sort_by(f64::total_cmp);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            if let Some(mut cand) = two_value_scan(n, opts.scan_points, &mut search) {
                polish(&mut cand.1, &mut search);
                cand.0 = search.eval(&cand.1);
                cand.1.sort_by(f64::total_cmp);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            let best = best.expect("at least one start");
            (n, best, search.evaluations, search.lowest)
        })
        .collect();

    let mut overall: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0;
    let mut lowest = f64::INFINITY;
    for (_, cand, evals, low) in &per_count {
        evaluations += evals;
        lowest = lowest.min(*low);
        if overall.as_ref().is_none_or(|b| better(cand, b)) {
            overall = Some(cand.clone());
        }
    }
    let (min_area, argmin) = overall.unwrap_or((f64::INFINITY, Vec::new()));
    MinAreaResult {
        min_area,
        argmin,
        per_count: per_count.iter().map(|(n, c, _, _)| (*n, c.0)).collect(),
        evaluations,
        lowest_evaluated: lowest,
    }
}
