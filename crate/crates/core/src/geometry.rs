//! Points, segments, plane frames and the distance queries everything else
//! is built on. All lengths are in units of the cylinder radius.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or displacement in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Vec3, s: f64) -> Vec3 {
        self + (o - self) * s
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        v.to_array()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Closed line segment `p0 -> p1`. A point is a segment with `p0 == p1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub p0: Point3,
    pub p1: Point3,
}

impl Segment {
    pub const fn new(p0: Point3, p1: Point3) -> Self {
        Segment { p0, p1 }
    }

    pub fn direction(&self) -> Vec3 {
        self.p1 - self.p0
    }

    pub fn length(&self) -> f64 {
        self.direction().norm()
    }

    pub fn midpoint(&self) -> Point3 {
        self.p0.lerp(self.p1, 0.5)
    }

    /// Point at parameter `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> Point3 {
        self.p0.lerp(self.p1, s)
    }

    /// Parameter in `[0, 1]` of the point of the segment nearest `p`.
    pub fn closest_param(&self, p: Point3) -> f64 {
        let d = self.direction();
        let len2 = d.norm2();
        if len2 == 0.0 {
            return 0.0;
        }
        ((p - self.p0).dot(d) / len2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, p: Point3) -> Point3 {
        self.at(self.closest_param(p))
    }

    pub fn endpoints(&self) -> [Point3; 2] {
        [self.p0, self.p1]
    }
}

pub fn point_segment_distance(p: Point3, s: &Segment) -> f64 {
    p.distance(s.closest_point(p))
}

/// Minimum distance between two closed segments, covering the parallel,
/// skew, intersecting and degenerate cases.
pub fn segment_segment_distance(s1: &Segment, s2: &Segment) -> f64 {
    let (a, b) = closest_params(s1, s2);
    s1.at(a).distance(s2.at(b))
}

/// Parameters `(s, t)` of a closest pair of points between two segments.
pub fn closest_params(s1: &Segment, s2: &Segment) -> (f64, f64) {
    const EPS: f64 = 1e-300;
    let d1 = s1.direction();
    let d2 = s2.direction();
    let r = s1.p0 - s2.p0;
    let a = d1.norm2();
    let e = d2.norm2();
    let f = d2.dot(r);

    if a <= EPS && e <= EPS {
        return (0.0, 0.0);
    }
    if a <= EPS {
        return (0.0, (f / e).clamp(0.0, 1.0));
    }
    let c = d1.dot(r);
    if e <= EPS {
        return ((-c / a).clamp(0.0, 1.0), 0.0);
    }
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    // Parallel segments have denom ~ 0; any s works, so start from s = 0.
    let mut s = if denom > 1e-14 * a * e {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (s, t)
}

/// Orthonormal frame of the plane through `origin` normal to an axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFrame {
    pub origin: Point3,
    pub normal: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl PlaneFrame {
    /// Unit in-plane direction at angle `theta` measured from `u` towards `v`.
    #[inline]
    pub fn direction(&self, theta: f64) -> Vec3 {
        let (s, c) = theta.sin_cos();
        self.u * c + self.v * s
    }

    pub fn point(&self, theta: f64, r: f64) -> Point3 {
        self.origin + self.direction(theta) * r
    }

    /// In-plane coordinates of the projection of `p`.
    pub fn local(&self, p: Point3) -> (f64, f64) {
        let w = p - self.origin;
        (w.dot(self.u), w.dot(self.v))
    }
}

/// Deterministic orthonormal complement of a unit vector: `u` starts from
/// the coordinate axis along which `n` has the smallest component.
pub fn orthonormal_basis(n: Vec3) -> (Vec3, Vec3) {
    let (ax, ay, az) = (n.x.abs(), n.y.abs(), n.z.abs());
    let seed = if ax <= ay && ax <= az {
        Vec3::X
    } else if ay <= az {
        Vec3::Y
    } else {
        Vec3::Z
    };
    let u = (seed - n * seed.dot(n))
        .normalized()
        .expect("seed axis is never parallel to n");
    let v = n.cross(u);
    (u, v)
}

/// Frame of the plane through `x` normal to `axis`.
pub fn plane_frame(axis: &Segment, x: Point3) -> Result<PlaneFrame> {
    let len = axis.length();
    if !(len >= 1e-12) {
        return Err(Error::DegenerateAxis(len));
    }
    let off = point_segment_distance(x, axis);
    if off > 1e-9 {
        return Err(Error::OffAxis(off));
    }
    let normal = axis.direction() / len;
    let (u, v) = orthonormal_basis(normal);
    Ok(PlaneFrame {
        origin: x,
        normal,
        u,
        v,
    })
}

/// Area between a parabolic arc and a chord perpendicular to its axis
/// (Archimedes' quadrature): two thirds of the enclosing rectangle.
pub fn parabola_segment_area(chord: f64, sagitta: f64) -> f64 {
    2.0 / 3.0 * chord * sagitta
}
