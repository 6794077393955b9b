//! Exact 3D and 2D primitives: vectors, sphere inversion, plane reflection,
//! closest points between lines and segments, Rodrigues rotation and 2D
//! segment intersection.
//!
//! All functions are pure and operate on `Copy` values.

use std::fmt;
use std::ops::{Add, AddAssign, Deref, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Norm below which a point counts as the origin, and tolerance for unit norms.
pub const EPS_NORM: f64 = 1e-12;
/// Two unit directions with `|a·b| >= 1 - EPS_PARALLEL` are treated as parallel.
pub const EPS_PARALLEL: f64 = 1e-9;
/// Largest accepted condition number of the multi-line normal matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Checked constructor rejecting NaN and infinite components.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self::new(x, y, z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::DegenerateInput("non-finite vector component"))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, o: &Vec3) -> f64 {
        (*self - *o).norm()
    }

    pub fn normalize(&self) -> Result<UnitVec3> {
        UnitVec3::new_normalize(*self)
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
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
    #[inline]
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

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl std::iter::Sum for Vec3 {
    fn sum<I: Iterator<Item = Vec3>>(iter: I) -> Vec3 {
        iter.fold(Vec3::ZERO, |a, b| a + b)
    }
}

/// A direction of unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const X: UnitVec3 = UnitVec3(Vec3::X);
    pub const Y: UnitVec3 = UnitVec3(Vec3::Y);
    pub const Z: UnitVec3 = UnitVec3(Vec3::Z);

    pub fn new_normalize(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n <= EPS_NORM {
            return Err(Error::DegenerateInput("cannot normalize a zero vector"));
        }
        Ok(UnitVec3(v / n))
    }

    /// Wraps `v` without renormalizing. The caller guarantees `‖v‖ = 1`.
    pub fn new_unchecked(v: Vec3) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9, "not unit: {v}");
        UnitVec3(v)
    }

    #[inline]
    pub fn into_inner(self) -> Vec3 {
        self.0
    }

    /// Angle to another direction in radians, robust near 0 and π.
    pub fn angle_to(&self, o: &UnitVec3) -> f64 {
        let c = self.0.cross(&o.0).norm();
        let d = self.0.dot(&o.0);
        c.atan2(d)
    }

    /// Some unit vector orthogonal to `self`.
    pub fn any_orthogonal(&self) -> UnitVec3 {
        let v = self.0;
        let helper = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
            Vec3::X
        } else if v.y.abs() <= v.z.abs() {
            Vec3::Y
        } else {
            Vec3::Z
        };
        UnitVec3(v.cross(&helper).normalize().expect("helper axis is never parallel").0)
    }
}

impl Deref for UnitVec3 {
    type Target = Vec3;
    fn deref(&self) -> &Vec3 {
        &self.0
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line3 {
    pub anchor: Vec3,
    pub direction: UnitVec3,
}

impl Line3 {
    pub fn new(anchor: Vec3, direction: UnitVec3) -> Self {
        Self { anchor, direction }
    }

    pub fn point_at(&self, t: f64) -> Vec3 {
        self.anchor + *self.direction * t
    }

    pub fn distance_to(&self, p: &Vec3) -> f64 {
        let r = *p - self.anchor;
        (r - *self.direction * r.dot(&self.direction)).norm()
    }
}

/// A closed 2D segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment2 {
    a: [f64; 2],
    b: [f64; 2],
}

impl Segment2 {
    pub fn new(a: [f64; 2], b: [f64; 2]) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateInput("segment endpoints coincide"));
        }
        if !(a[0].is_finite() && a[1].is_finite() && b[0].is_finite() && b[1].is_finite()) {
            return Err(Error::DegenerateInput("non-finite segment endpoint"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> [f64; 2] {
        self.a
    }

    pub fn b(&self) -> [f64; 2] {
        self.b
    }
}

/// Unit sphere inversion `p ↦ p / ‖p‖²`.
pub fn invert_point(p: Vec3) -> Result<Vec3> {
    let n2 = p.norm_squared();
    if !(n2.sqrt() > EPS_NORM) {
        return Err(Error::DegenerateInput("cannot invert the origin"));
    }
    Ok(p / n2)
}

/// Mirror `p` across the plane `{x : x·unit_normal = distance}`.
pub fn reflect_across_plane(p: Vec3, unit_normal: UnitVec3, distance: f64) -> Vec3 {
    let n = *unit_normal;
    p - n * (2.0 * (p.dot(&n) - distance))
}

/// Mirror a direction across any plane with the given normal.
pub fn reflect_direction(d: UnitVec3, unit_normal: UnitVec3) -> UnitVec3 {
    let n = *unit_normal;
    UnitVec3(*d - n * (2.0 * d.dot(&n)))
}

/// Midpoint of the common perpendicular of two non-parallel lines.
pub fn closest_point_two_lines(g: &Line3, h: &Line3) -> Result<Vec3> {
    let (lambda, mu) = closest_parameters(g, h)?;
    Ok((g.point_at(lambda) + h.point_at(mu)) * 0.5)
}

/// Line parameters `(λ, μ)` of the mutually closest points.
pub fn closest_parameters(g: &Line3, h: &Line3) -> Result<(f64, f64)> {
    let b = g.direction.dot(&h.direction);
    if b.abs() >= 1.0 - EPS_PARALLEL {
        return Err(Error::ParallelLines(1.0 - b.abs()));
    }
    let w0 = g.anchor - h.anchor;
    let d = g.direction.dot(&w0);
    let e = h.direction.dot(&w0);
    let denom = 1.0 - b * b;
    Ok(((b * e - d) / denom, (e - b * d) / denom))
}

/// Least-squares point closest to every line, from the normal equations
/// `Σ (I − d dᵀ)(x − a) = 0`.
pub fn closest_point_n_lines(lines: &[Line3]) -> Result<Vec3> {
    if lines.len() < 2 {
        return Err(Error::DegenerateConfiguration("at least two lines are required"));
    }
    let mut m = Sym3::default();
    let mut rhs = Vec3::ZERO;
    for line in lines {
        let p = Sym3::projector(&line.direction);
        rhs += p.apply(&line.anchor);
        m = m + p;
    }
    let (lo, hi) = m.eigen_range();
    if !(lo > 0.0) || hi / lo > MAX_CONDITION {
        return Err(Error::DegenerateConfiguration("normal matrix is singular"));
    }
    m.solve(&rhs)
        .ok_or(Error::DegenerateConfiguration("normal matrix is singular"))
}

/// Symmetric 3×3 matrix stored as its upper triangle.
#[derive(Debug, Clone, Copy, Default)]
struct Sym3 {
    xx: f64,
    xy: f64,
    xz: f64,
    yy: f64,
    yz: f64,
    zz: f64,
}

impl Sym3 {
    /// `I − d dᵀ` for a unit `d`.
    fn projector(d: &Vec3) -> Self {
        Sym3 {
            xx: 1.0 - d.x * d.x,
            xy: -d.x * d.y,
            xz: -d.x * d.z,
            yy: 1.0 - d.y * d.y,
            yz: -d.y * d.z,
            zz: 1.0 - d.z * d.z,
        }
    }

    fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3::new(
            self.xx * v.x + self.xy * v.y + self.xz * v.z,
            self.xy * v.x + self.yy * v.y + self.yz * v.z,
            self.xz * v.x + self.yz * v.y + self.zz * v.z,
        )
    }

    fn det(&self) -> f64 {
        self.xx * (self.yy * self.zz - self.yz * self.yz)
            - self.xy * (self.xy * self.zz - self.yz * self.xz)
            + self.xz * (self.xy * self.yz - self.yy * self.xz)
    }

    fn solve(&self, rhs: &Vec3) -> Option<Vec3> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        // adjugate of a symmetric matrix is symmetric
        let adj = Sym3 {
            xx: self.yy * self.zz - self.yz * self.yz,
            xy: self.xz * self.yz - self.xy * self.zz,
            xz: self.xy * self.yz - self.xz * self.yy,
            yy: self.xx * self.zz - self.xz * self.xz,
            yz: self.xy * self.xz - self.xx * self.yz,
            zz: self.xx * self.yy - self.xy * self.xy,
        };
        Some(adj.apply(rhs) / det)
    }

    /// Smallest and largest eigenvalue (closed-form trigonometric solution).
    fn eigen_range(&self) -> (f64, f64) {
        let p1 = self.xy * self.xy + self.xz * self.xz + self.yz * self.yz;
        let q = (self.xx + self.yy + self.zz) / 3.0;
        if p1 == 0.0 {
            let d = [self.xx, self.yy, self.zz];
            let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return (lo, hi);
        }
        let p2 = (self.xx - q).powi(2) + (self.yy - q).powi(2) + (self.zz - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = Sym3 {
            xx: (self.xx - q) / p,
            yy: (self.yy - q) / p,
            zz: (self.zz - q) / p,
            xy: self.xy / p,
            xz: self.xz / p,
            yz: self.yz / p,
        };
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        (lo, hi)
    }
}

impl Add for Sym3 {
    type Output = Sym3;
    fn add(self, o: Sym3) -> Sym3 {
        Sym3 {
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yy: self.yy + o.yy,
            yz: self.yz + o.yz,
            zz: self.zz + o.zz,
        }
    }
}

/// Point of the closed segment `[a, b]` nearest to `p`.
pub fn closest_point_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let ab = *b - *a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((*p - *a).dot(&ab) / len2).clamp(0.0, 1.0);
    *a + ab * t
}

/// Mutually closest points of the closed segments `[p1, q1]` and `[p2, q2]`.
pub fn closest_points_segments(p1: &Vec3, q1: &Vec3, p2: &Vec3, q2: &Vec3) -> (Vec3, Vec3) {
    let d1 = *q1 - *p1;
    let d2 = *q2 - *p2;
    let r = *p1 - *p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);

    if a == 0.0 && e == 0.0 {
        return (*p1, *p2);
    }
    let (s, t);
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (*p1 + d1 * s, *p2 + d2 * t)
}

/// Rodrigues rotation of `v` by `angle` radians about `axis`.
pub fn rotate_about_axis(v: UnitVec3, axis: UnitVec3, angle: f64) -> UnitVec3 {
    let k = *axis;
    let (s, c) = angle.sin_cos();
    let r = *v * c + k.cross(&v) * s + k * (k.dot(&v) * (1.0 - c));
    // renormalize to keep the unit invariant tight under rounding
    UnitVec3(r / r.norm())
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Whether the closed segments share a point. Touching and collinear overlap count.
pub fn segments_intersect_2d(s1: &Segment2, s2: &Segment2) -> bool {
    let (p1, q1, p2, q2) = (s1.a, s1.b, s2.a, s2.b);
    let d1 = orient(p2, q2, p1);
    let d2 = orient(p2, q2, q1);
    let d3 = orient(p1, q1, p2);
    let d4 = orient(p1, q1, q2);

    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p2, q2, p1))
        || (d2 == 0.0 && on_segment(p2, q2, q1))
        || (d3 == 0.0 && on_segment(p1, q1, p2))
        || (d4 == 0.0 && on_segment(p1, q1, q2))
}

/// Whether `p` lies on the closed segment.
pub fn segment_contains_point(s: &Segment2, p: [f64; 2]) -> bool {
    orient(s.a, s.b, p) == 0.0 && on_segment(s.a, s.b, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn unit(x: f64, y: f64, z: f64) -> UnitVec3 {
        v(x, y, z).normalize().unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(invert_point(v(1.0, 0.0, 0.0)).unwrap(), v(1.0, 0.0, 0.0));
        assert_eq!(invert_point(v(2.0, 0.0, 0.0)).unwrap(), v(0.5, 0.0, 0.0));
        assert!(matches!(invert_point(Vec3::ZERO), Err(Error::DegenerateInput(_))));
        assert!(invert_point(v(1e-13, 0.0, 0.0)).is_err());
    }

    #[test]
    fn reflection_examples() {
        let n = UnitVec3::Z;
        assert_eq!(reflect_across_plane(Vec3::ZERO, n, 1.0), v(0.0, 0.0, 2.0));
        let on_plane = v(0.3, -2.0, 1.0);
        assert_eq!(reflect_across_plane(on_plane, n, 1.0), on_plane);
    }

    #[test]
    fn two_lines_symmetric_skew() {
        let g = Line3::new(Vec3::ZERO, UnitVec3::X);
        let h = Line3::new(v(0.0, 0.0, 1.0), UnitVec3::Y);
        assert!(close(closest_point_two_lines(&g, &h).unwrap(), v(0.0, 0.0, 0.5), 1e-15));
    }

    #[test]
    fn two_lines_intersecting() {
        let q = v(1.0, 2.0, 3.0);
        let g = Line3::new(q - *unit(1.0, 1.0, 0.0) * 3.0, unit(1.0, 1.0, 0.0));
        let h = Line3::new(q + *unit(0.0, 1.0, -2.0) * 0.7, unit(0.0, 1.0, -2.0));
        assert!(close(closest_point_two_lines(&g, &h).unwrap(), q, 1e-12));
    }

    #[test]
    fn parallel_lines_rejected() {
        let g = Line3::new(Vec3::ZERO, UnitVec3::X);
        let h = Line3::new(v(0.0, 1.0, 0.0), -UnitVec3::X);
        assert!(matches!(closest_point_two_lines(&g, &h), Err(Error::ParallelLines(_))));
        assert!(matches!(
            closest_point_n_lines(&[g, h]),
            Err(Error::DegenerateConfiguration(_))
        ));
        assert!(closest_point_n_lines(&[g]).is_err());
    }

    #[test]
    fn n_lines_concurrent() {
        let q = v(-0.4, 0.25, 0.9);
        let lines: Vec<Line3> = [unit(1.0, 0.0, 0.0), unit(0.3, 1.0, 0.0), unit(0.1, 0.2, 1.0)]
            .iter()
            .enumerate()
            .map(|(i, d)| Line3::new(q + **d * (i as f64 + 1.5), *d))
            .collect();
        assert!(close(closest_point_n_lines(&lines).unwrap(), q, 1e-12));
    }

    #[test]
    fn rotation_examples() {
        let r = rotate_about_axis(UnitVec3::X, UnitVec3::Z, std::f64::consts::FRAC_PI_2);
        assert!(close(*r, Vec3::Y, 1e-15));
        let r0 = rotate_about_axis(UnitVec3::X, UnitVec3::Z, 0.0);
        assert_eq!(*r0, Vec3::X);
    }

    #[test]
    fn segment_examples() {
        let s = |a: [f64; 2], b: [f64; 2]| Segment2::new(a, b).unwrap();
        assert!(segments_intersect_2d(&s([0.0, 0.0], [1.0, 1.0]), &s([0.0, 1.0], [1.0, 0.0])));
        assert!(!segments_intersect_2d(&s([0.0, 0.0], [1.0, 0.0]), &s([0.0, 1.0], [1.0, 1.0])));
        assert!(segments_intersect_2d(&s([0.0, 0.0], [1.0, 0.0]), &s([1.0, 0.0], [2.0, 3.0])));
        // collinear overlap and collinear disjoint
        assert!(segments_intersect_2d(&s([0.0, 0.0], [2.0, 0.0]), &s([1.0, 0.0], [3.0, 0.0])));
        assert!(!segments_intersect_2d(&s([0.0, 0.0], [1.0, 0.0]), &s([2.0, 0.0], [3.0, 0.0])));
        // T-junction
        assert!(segments_intersect_2d(&s([0.0, 0.0], [2.0, 0.0]), &s([1.0, 0.0], [1.0, 5.0])));
        assert!(Segment2::new([1.0, 1.0], [1.0, 1.0]).is_err());
    }

    #[test]
    fn segment_closest_points() {
        let (a, b) = closest_points_segments(
            &v(0.0, 0.0, 0.0),
            &v(2.0, 0.0, 0.0),
            &v(1.0, 1.0, -1.0),
            &v(1.0, 1.0, 1.0),
        );
        assert!(close(a, v(1.0, 0.0, 0.0), 1e-15));
        assert!(close(b, v(1.0, 1.0, 0.0), 1e-15));
        // clamped to endpoints
        let (a, b) = closest_points_segments(
            &v(0.0, 0.0, 0.0),
            &v(1.0, 0.0, 0.0),
            &v(3.0, 1.0, 0.0),
            &v(3.0, 2.0, 0.0),
        );
        assert_eq!(a, v(1.0, 0.0, 0.0));
        assert_eq!(b, v(3.0, 1.0, 0.0));
        // degenerate second segment
        let (_, b) = closest_points_segments(&Vec3::ZERO, &Vec3::X, &Vec3::Y, &Vec3::Y);
        assert_eq!(b, Vec3::Y);
    }

    #[test]
    fn circle_through_origin_inverts_to_line() {
        // circle of radius r centered at c with |c| = r lies in plane span{e1, e2}
        let c = v(0.3, -0.7, 0.2);
        let r = c.norm();
        let e1 = c.normalize().unwrap();
        let e2 = e1.any_orthogonal();
        let pts: Vec<Vec3> = (1..=20)
            .map(|k| {
                let t = k as f64 * 0.3;
                c + (*e1 * t.cos() + *e2 * t.sin()) * r
            })
            .filter(|p| p.norm() > 1e-6)
            .map(|p| invert_point(p).unwrap())
            .collect();
        let dir = (pts[1] - pts[0]).normalize().unwrap();
        let line = Line3::new(pts[0], dir);
        for p in &pts {
            assert!(line.distance_to(p) < 1e-9, "{}", line.distance_to(p));
        }
    }

    fn arb_vec(lo: f64, hi: f64) -> impl Strategy<Value = Vec3> {
        (lo..hi, lo..hi, lo..hi).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn arb_unit() -> impl Strategy<Value = UnitVec3> {
        arb_vec(-1.0, 1.0)
            .prop_filter("non-zero", |v| v.norm() > 1e-3)
            .prop_map(|v| v.normalize().unwrap())
    }

    proptest! {
        #[test]
        fn inversion_is_involution(dir in arb_unit(), log_r in -3.0f64..3.0) {
            let p = *dir * 10f64.powf(log_r);
            let back = invert_point(invert_point(p).unwrap()).unwrap();
            prop_assert!((back - p).norm() <= 1e-10 * p.norm());
        }

        #[test]
        fn reflection_involution_and_isometry(
            p in arb_vec(-5.0, 5.0), q in arb_vec(-5.0, 5.0), n in arb_unit(), d in 0.0f64..3.0
        ) {
            let rp = reflect_across_plane(p, n, d);
            let rq = reflect_across_plane(q, n, d);
            prop_assert!((reflect_across_plane(rp, n, d) - p).norm() < 1e-12 * (1.0 + p.norm()));
            prop_assert!(((rp - rq).norm() - (p - q).norm()).abs() < 1e-12 * (1.0 + p.norm() + q.norm()));
        }

        #[test]
        fn rotation_preserves_norm_and_inverts(v in arb_unit(), axis in arb_unit(), a in -6.3f64..6.3) {
            let r = rotate_about_axis(v, axis, a);
            prop_assert!((r.norm() - 1.0).abs() < 1e-12);
            let back = rotate_about_axis(r, axis, -a);
            prop_assert!((*back - *v).norm() < 1e-12);
        }

        #[test]
        fn n_lines_matches_two_lines(
            a1 in arb_vec(-3.0, 3.0), a2 in arb_vec(-3.0, 3.0), d1 in arb_unit(), d2 in arb_unit()
        ) {
            prop_assume!(d1.dot(&d2).abs() < 0.99);
            let g = Line3::new(a1, d1);
            let h = Line3::new(a2, d2);
            let two = closest_point_two_lines(&g, &h).unwrap();
            let many = closest_point_n_lines(&[g, h]).unwrap();
            prop_assert!((two - many).norm() < 1e-9);
        }

        #[test]
        fn segment_intersection_symmetric(
            a in (-2.0f64..2.0, -2.0f64..2.0), b in (-2.0f64..2.0, -2.0f64..2.0),
            c in (-2.0f64..2.0, -2.0f64..2.0), d in (-2.0f64..2.0, -2.0f64..2.0)
        ) {
            let s1 = Segment2::new([a.0, a.1], [b.0, b.1]);
            let s2 = Segment2::new([c.0, c.1], [d.0, d.1]);
            if let (Ok(s1), Ok(s2)) = (s1, s2) {
                prop_assert_eq!(segments_intersect_2d(&s1, &s2), segments_intersect_2d(&s2, &s1));
            }
        }
    }
}
