use std::f64::consts::PI;

use serde::Serialize;

use super::{measure::axis_measures, DirichletSlice, SliceConfig};
use crate::bounds::{hex_area, r_end};
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_basis, point_segment_distance, Vec3};
use crate::montecarlo::{mc_volume, Aabb};
use crate::packing::{density, restrict, Packing};
use crate::quadrature::gauss_legendre_adaptive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityOptions {
    pub samples: u64,
    pub seed: u64,
    /// Relative tolerance of each slice area.
    pub area_tol: f64,
    /// Relative tolerance of the integral along the axis.
    pub axis_tol: f64,
}

impl Default for IdentityOptions {
    fn default() -> Self {
        IdentityOptions {
            samples: 1_000_000,
            seed: 0,
            area_tol: 1e-8,
            axis_tol: 1e-6,
        }
    }
}

/// Volume of `D_i ∩ L_i` two ways: integrating slice areas along the axis
/// and hit-or-miss sampling of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellVolumeIdentity {
    pub integral: f64,
    /// Error allowance of the integral.
    pub quadrature_budget: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub agrees: bool,
}

pub fn cell_volume_identity(p: &Packing, i: usize, n_mc: u64, seed: u64) -> Result<CellVolumeIdentity> {
    cell_volume_identity_with(
        p,
        i,
        &IdentityOptions {
            samples: n_mc,
            seed,
            ..IdentityOptions::default()
        },
    )
}

pub fn cell_volume_identity_with(p: &Packing, i: usize, opts: &IdentityOptions) -> Result<CellVolumeIdentity> {
    let axis = p
        .cylinders
        .get(i)
        .ok_or_else(|| Error::Domain(format!("cylinder index {i} out of range")))?
        .axis;
    let t = axis.length();
    if t < 1e-12 {
        return Err(Error::DegenerateAxis(t));
    }
    let dir = axis.direction() / t;
    let cfg = SliceConfig {
        area_tol: opts.area_tol,
        ..SliceConfig::default()
    };
    let slice_at = |u: f64| DirichletSlice::new(p, i, axis.p0 + dir * u, &cfg);
    let area_at = |u: f64| slice_at(u).and_then(|s| s.area(opts.area_tol)).unwrap_or(f64::NAN);

    // Area(d_x) is only piecewise smooth where end balls start and stop
    let ends = p.ends();
    let mut breaks = Vec::new();
    for e in &ends {
        let w = *e - axis.p0;
        let b = w.dot(dir);
        let disc = b * b - (w.norm2() - r_end() * r_end());
        if disc >= 0.0 {
            breaks.push(b - disc.sqrt());
            breaks.push(b + disc.sqrt());
        }
    }
    let quad = gauss_legendre_adaptive(area_at, 0.0, t, &breaks, opts.axis_tol);
    if !quad.value.is_finite() {
        return Err(Error::NonFinite(quad.value));
    }
    let budget = quad.error_estimate + (opts.axis_tol + opts.area_tol) * quad.value.abs();

    // sampling box in axis coordinates (s, a, b), wide enough for the cell
    let mut rho: f64 = 0.0;
    for k in 0..=32 {
        let s = slice_at(t * k as f64 / 32.0)?;
        rho = rho.max(s.samples.iter().map(|v| v.r).fold(0.0, f64::max));
    }
    let line_offset = {
        let w = -axis.p0;
        (w - dir * w.dot(dir)).norm()
    };
    let rho = (1.1 * rho + 1e-3).min(p.radius + line_offset);
    let (eu, ev) = orthonormal_basis(dir);
    let others: Vec<_> = p
        .cylinders
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, c)| c.axis)
        .collect();
    let r2 = p.radius * p.radius;
    let member = |l: Vec3| {
        let q = axis.p0 + dir * l.x + eu * l.y + ev * l.z;
        if q.norm2() > r2 {
            return false;
        }
        let own = l.y.hypot(l.z);
        others.iter().all(|a| own <= point_segment_distance(q, a))
    };
    let bounds = Aabb::new(Vec3::new(0.0, -rho, -rho), Vec3::new(t, rho, rho));
    let est = mc_volume(member, bounds, opts.samples, opts.seed);
    Ok(CellVolumeIdentity {
        integral: quad.value,
        quadrature_budget: budget,
        mc: est.estimate,
        mc_stderr: est.stderr,
        agrees: (quad.value - est.estimate).abs() <= 4.0 * est.stderr + budget,
    })
}

/// Density bound for a capped packing from the pointwise slice floors:
/// `√12` on protected axis points and `π` on end-near ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedBound {
    pub n: usize,
    pub mu_y: f64,
    pub mu_z: f64,
    /// Lower bound on `Σ Vol(D_i⁰)`.
    pub cell_volume_floor: f64,
    pub bound: f64,
    /// `ρ(restrict(p, R_inner), R_inner, R)`.
    pub measured: f64,
}

pub fn certified_bound_for_packing(p: &Packing, r_inner: f64) -> Result<CertifiedBound> {
    if !p.capped {
        return Err(Error::Precondition("certified bound needs capped cylinders".into()));
    }
    let m = axis_measures(p, r_inner);
    let caps = m.n as f64 * 4.0 / 3.0 * PI;
    let floor = hex_area() * m.mu_y + PI * m.mu_z;
    let bound = if m.n == 0 {
        0.0
    } else {
        (PI * m.mu_a + caps) / (floor + caps)
    };
    let q = restrict(p, r_inner);
    Ok(CertifiedBound {
        n: m.n,
        mu_y: m.mu_y,
        mu_z: m.mu_z,
        cell_volume_floor: floor,
        bound,
        measured: density(&q, r_inner, p.radius),
    })
}
