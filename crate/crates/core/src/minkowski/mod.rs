//! Primitives of the hyperboloid model in Minkowski space `E^{3,1}`.

mod construct;
mod export;
mod extract;
mod realization;

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

pub use construct::{build_prism, build_prism_exact, split_prism_angles, PrismParams};
pub use export::{export, ExportFormat};
pub use extract::{extract_combinatorics, same_cell_structure, Extraction};
pub use realization::Realization;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("planes do not intersect (<v,w> = {0})")]
    NotIntersecting(f64),
    #[error("angle {0} outside (0, pi/2]")]
    OutOfRange(f64),
    #[error("the three angles do not meet at a finite vertex")]
    NoFiniteVertex,
    #[error("the three planes have no common point")]
    NoCommonPoint,
    #[error("the three planes meet at a point at infinity")]
    IdealPoint,
    #[error("the three planes meet at a point of the closed hyperbolic space")]
    CommonPoint,
    #[error("vector is not spacelike")]
    NotSpacelike,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("polyhedron is not compact: {0}")]
    NonCompact(String),
    #[error("degenerate face: {0}")]
    DegenerateFace(String),
}

/// Causal type of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VectorKind {
    Timelike,
    Lightlike,
    Spacelike,
}

/// A vector of `E^{3,1}` with form `-x0 y0 + x1 y1 + x2 y2 + x3 y3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MVec<T> {
    pub x: [T; 4],
}

impl<T: Real> MVec<T> {
    pub fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Self { x: [x0, x1, x2, x3] }
    }

    pub fn zero() -> Self {
        Self { x: [T::zero(); 4] }
    }

    /// Basis vector `e_i`.
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.x[i] = T::one();
        v
    }

    pub fn inner(&self, o: &Self) -> T {
        -self.x[0] * o.x[0] + self.x[1] * o.x[1] + self.x[2] * o.x[2] + self.x[3] * o.x[3]
    }

    pub fn norm2(&self) -> T {
        self.inner(self)
    }

    pub fn kind(&self, tol: T) -> VectorKind {
        let q = self.norm2();
        if q < -tol {
            VectorKind::Timelike
        } else if q > tol {
            VectorKind::Spacelike
        } else {
            VectorKind::Lightlike
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|c| c.is_finite())
    }

    /// Rescales a spacelike vector to unit norm.
    pub fn unit_spacelike(&self) -> Option<Self> {
        let q = self.norm2();
        (q > T::zero()).then(|| *self * (T::one() / q.sqrt()))
    }

    /// Rescales a timelike vector onto the upper sheet of the hyperboloid.
    pub fn unit_timelike(&self) -> Option<Self> {
        let q = self.norm2();
        if q >= T::zero() {
            return None;
        }
        let s = T::one() / (-q).sqrt();
        Some(if self.x[0] < T::zero() { *self * -s } else { *self * s })
    }

    /// Poincaré ball coordinates of a point on the hyperboloid.
    pub fn to_ball(&self) -> [T; 3] {
        let d = T::one() + self.x[0];
        [self.x[1] / d, self.x[2] / d, self.x[3] / d]
    }

    /// Klein model coordinates.
    pub fn to_klein(&self) -> [T; 3] {
        [self.x[1] / self.x[0], self.x[2] / self.x[0], self.x[3] / self.x[0]]
    }

    pub fn cast<U: Real>(&self) -> MVec<U> {
        MVec {
            x: self.x.map(|c| U::from(c).unwrap()),
        }
    }

    pub fn max_abs_diff(&self, o: &Self) -> T {
        (0..4).fold(T::zero(), |m, i| m.max((self.x[i] - o.x[i]).abs()))
    }
}

impl<T: Real> Add for MVec<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            x: [self.x[0] + o.x[0], self.x[1] + o.x[1], self.x[2] + o.x[2], self.x[3] + o.x[3]],
        }
    }
}

impl<T: Real> Sub for MVec<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            x: [self.x[0] - o.x[0], self.x[1] - o.x[1], self.x[2] - o.x[2], self.x[3] - o.x[3]],
        }
    }
}

impl<T: Real> Mul<T> for MVec<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self { x: self.x.map(|c| c * s) }
    }
}

impl<T: Real> Neg for MVec<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { x: self.x.map(|c| -c) }
    }
}

/// Half-space `{x : <x, v> <= 0}` with unit spacelike outward normal `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace<T> {
    normal: MVec<T>,
}

impl<T: Real> HalfSpace<T> {
    pub fn new(v: MVec<T>) -> Result<Self, GeometryError> {
        v.unit_spacelike()
            .map(|normal| Self { normal })
            .ok_or(GeometryError::NotSpacelike)
    }

    pub fn normal(&self) -> MVec<T> {
        self.normal
    }

    pub fn contains(&self, p: &MVec<T>, tol: T) -> bool {
        p.inner(&self.normal) <= tol
    }
}

/// Dihedral angle `arccos(-<v, w>)` between two intersecting planes.
pub fn dihedral<T: Real>(v: &MVec<T>, w: &MVec<T>) -> Result<T, GeometryError> {
    let ip = v.inner(w);
    if ip * ip >= T::one() {
        return Err(GeometryError::NotIntersecting(ip.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((-ip).acos())
}

/// Determinant of the Gram matrix of three planes with the given dihedral angles.
pub fn vertex_determinant<T: Real>(a: T, b: T, c: T) -> T {
    let (ca, cb, cc) = (a.cos(), b.cos(), c.cos());
    T::one() - T::lit(2.0) * ca * cb * cc - ca * ca - cb * cb - cc * cc
}

/// The same determinant written as a product of four cosines.
pub fn vertex_determinant_product<T: Real>(a: T, b: T, c: T) -> T {
    let h = T::lit(0.5);
    -T::lit(4.0)
        * ((a + b + c) * h).cos()
        * ((a - b + c) * h).cos()
        * ((a + b - c) * h).cos()
        * ((-a + b + c) * h).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VertexClass {
    Finite,
    Ideal,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleClass<T> {
    pub class: VertexClass,
    pub det: T,
    pub product: T,
}

/// Whether three planes with the given pairwise angles meet in `H^3`, at infinity, or not at all.
pub fn triple_class<T: Real>(a: T, b: T, c: T) -> Result<TripleClass<T>, GeometryError> {
    let max = T::FRAC_PI_2() * (T::one() + T::epsilon() * T::lit(16.0));
    for x in [a, b, c] {
        if !(x > T::zero() && x <= max) {
            return Err(GeometryError::OutOfRange(x.to_f64().unwrap_or(f64::NAN)));
        }
    }
    triple_class_unchecked(a, b, c, T::lit(1e-9))
}

pub(crate) fn triple_class_unchecked<T: Real>(
    a: T,
    b: T,
    c: T,
    tol: T,
) -> Result<TripleClass<T>, GeometryError> {
    let det = vertex_determinant(a, b, c);
    let product = vertex_determinant_product(a, b, c);
    let class = if det > tol {
        VertexClass::Finite
    } else if det < -tol {
        VertexClass::None
    } else {
        VertexClass::Ideal
    };
    Ok(TripleClass { class, det, product })
}

/// Face angle opposite `alpha_i` at a finite vertex, by the spherical law of cosines.
pub fn face_angle<T: Real>(ai: T, aj: T, ak: T) -> Result<T, GeometryError> {
    if triple_class(ai, aj, ak)?.class != VertexClass::Finite {
        return Err(GeometryError::NoFiniteVertex);
    }
    let arg = (ai.cos() + aj.cos() * ak.cos()) / (aj.sin() * ak.sin());
    if arg >= T::one() {
        return Err(GeometryError::NoFiniteVertex);
    }
    Ok(arg.max(-T::one()).acos())
}

fn det3<T: Real>(m: [[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Vector Minkowski-orthogonal to `a`, `b`, `c` (cofactors of `det[x; a; b; c]`, index raised).
pub fn cross3<T: Real>(a: &MVec<T>, b: &MVec<T>, c: &MVec<T>) -> MVec<T> {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let row = |v: &MVec<T>| [v.x[cols[0]], v.x[cols[1]], v.x[cols[2]]];
        det3([row(a), row(b), row(c)])
    };
    let co = [minor(0), -minor(1), minor(2), -minor(3)];
    MVec::new(-co[0], co[1], co[2], co[3])
}

/// Determinant of the 4x4 matrix with rows `a, b, c, d`.
pub fn det4<T: Real>(a: &MVec<T>, b: &MVec<T>, c: &MVec<T>, d: &MVec<T>) -> T {
    a.inner(&cross3(b, c, d))
}

/// Gram determinant of three vectors.
pub fn gram_det3<T: Real>(a: &MVec<T>, b: &MVec<T>, c: &MVec<T>) -> T {
    let g = |u: &MVec<T>, v: &MVec<T>| u.inner(v);
    det3([
        [g(a, a), g(a, b), g(a, c)],
        [g(b, a), g(b, b), g(b, c)],
        [g(c, a), g(c, b), g(c, c)],
    ])
}

/// Common point of three planes in `H^3`.
pub fn vertex_point<T: Real>(v1: &MVec<T>, v2: &MVec<T>, v3: &MVec<T>) -> Result<MVec<T>, GeometryError> {
    vertex_point_tol(v1, v2, v3, T::lit(1e-9))
}

pub fn vertex_point_tol<T: Real>(
    v1: &MVec<T>,
    v2: &MVec<T>,
    v3: &MVec<T>,
    tol: T,
) -> Result<MVec<T>, GeometryError> {
    let d = gram_det3(v1, v2, v3);
    if d < -tol {
        return Err(GeometryError::NoCommonPoint);
    }
    if d <= tol {
        return Err(GeometryError::IdealPoint);
    }
    cross3(v1, v2, v3).unit_timelike().ok_or(GeometryError::IdealPoint)
}

/// Plane perpendicular to three pairwise intersecting planes with no common point,
/// oriented so that `inside` lies in its half-space.
pub fn perp_plane<T: Real>(
    v1: &MVec<T>,
    v2: &MVec<T>,
    v3: &MVec<T>,
    inside: &MVec<T>,
) -> Result<HalfSpace<T>, GeometryError> {
    let d = gram_det3(v1, v2, v3);
    if d >= -T::lit(1e-9) {
        return Err(GeometryError::CommonPoint);
    }
    let w = cross3(v1, v2, v3).unit_spacelike().ok_or(GeometryError::CommonPoint)?;
    let w = if inside.inner(&w) > T::zero() { -w } else { w };
    HalfSpace::new(w)
}

/// A linear map of `E^{3,1}` stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorentz<T> {
    pub m: [[T; 4]; 4],
}

impl<T: Real> Lorentz<T> {
    pub fn identity() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self { m }
    }

    pub fn apply(&self, v: &MVec<T>) -> MVec<T> {
        let mut out = [T::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).fold(T::zero(), |s, j| s + self.m[i][j] * v.x[j]);
        }
        MVec { x: out }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).fold(T::zero(), |s, k| s + self.m[i][k] * other.m[k][j]);
            }
        }
        Self { m }
    }

    /// Boost along the spatial unit direction `u` with rapidity `s`.
    pub fn boost(u: [T; 3], s: T) -> Self {
        let (ch, sh) = (s.cosh(), s.sinh());
        let mut m = Self::identity().m;
        m[0][0] = ch;
        for i in 0..3 {
            m[0][i + 1] = sh * u[i];
            m[i + 1][0] = sh * u[i];
            for j in 0..3 {
                m[i + 1][j + 1] = m[i + 1][j + 1] + (ch - T::one()) * u[i] * u[j];
            }
        }
        Self { m }
    }

    /// Spatial rotation by `angle` about the unit axis `k` (Rodrigues).
    pub fn rotation(k: [T; 3], angle: T) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let mut m = Self::identity().m;
        let kx = [[T::zero(), -k[2], k[1]], [k[2], T::zero(), -k[0]], [-k[1], k[0], T::zero()]];
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { T::one() } else { T::zero() };
                m[i + 1][j + 1] = c * id + s * kx[i][j] + (T::one() - c) * k[i] * k[j];
            }
        }
        Self { m }
    }

    /// Boost taking the hyperboloid point `p` to `(1, 0, 0, 0)`.
    pub fn to_origin(p: &MVec<T>) -> Self {
        let g = p.x[0];
        let s = [p.x[1], p.x[2], p.x[3]];
        let n2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        let mut m = Self::identity().m;
        m[0][0] = g;
        for i in 0..3 {
            m[0][i + 1] = -s[i];
            m[i + 1][0] = -s[i];
            for j in 0..3 {
                if n2 > T::zero() {
                    m[i + 1][j + 1] = m[i + 1][j + 1] + (g - T::one()) * s[i] * s[j] / n2;
                }
            }
        }
        Self { m }
    }

    /// Reflection in the plane with unit normal `b`.
    pub fn reflection(b: &MVec<T>) -> Self {
        let mut m = Self::identity().m;
        let lowered = [-b.x[0], b.x[1], b.x[2], b.x[3]];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = *cell - T::lit(2.0) * b.x[i] * lowered[j];
            }
        }
        Self { m }
    }

    /// Largest entry of `M^T J M - J`.
    pub fn lorentz_defect(&self) -> T {
        let sign = |i: usize| if i == 0 { -T::one() } else { T::one() };
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let s = (0..4).fold(T::zero(), |acc, k| acc + self.m[k][i] * sign(k) * self.m[k][j]);
                let target = if i == j { sign(i) } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn dihedral_examples() {
        let v = MVec::new(0.0, 1.0, 0.0, 0.0);
        assert!((dihedral(&v, &MVec::new(0.0, 0.0, 1.0, 0.0)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let w = MVec::new(0.0, -0.5, 3f64.sqrt() / 2.0, 0.0);
        assert!((dihedral(&v, &w).unwrap() - FRAC_PI_3).abs() < 1e-12);
        let t = MVec::new(1.0f64, -1.0, 1.0, 0.0);
        assert!((t.norm2() - 1.0).abs() < 1e-15);
        assert!(matches!(dihedral(&v, &t), Err(GeometryError::NotIntersecting(_))));
    }

    #[test]
    fn triple_examples() {
        let r = triple_class(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_eq!(r.class, VertexClass::Finite);
        assert!((r.det - 1.0).abs() < 1e-15);
        let r = triple_class(FRAC_PI_3, FRAC_PI_3, FRAC_PI_3).unwrap();
        assert_eq!(r.class, VertexClass::Ideal);
        let a = 2.0 * PI / 5.0;
        let r = triple_class(a, a, a).unwrap();
        assert_eq!(r.class, VertexClass::Finite);
        assert!((r.det - r.product).abs() < 1e-12);
        assert!(triple_class(0.0, 1.0, 1.0).is_err());
        assert_eq!(triple_class(0.3, 0.3, 0.3).unwrap().class, VertexClass::None);
    }

    #[test]
    fn single_precision_agrees() {
        let r = triple_class(1.2f32, 1.3f32, 1.1f32).unwrap();
        let s = triple_class(1.2f64, 1.3f64, 1.1f64).unwrap();
        assert!((r.det as f64 - s.det).abs() < 1e-5);
    }

    #[test]
    fn face_angle_examples() {
        assert!((face_angle(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let b = face_angle(FRAC_PI_2, FRAC_PI_3, FRAC_PI_3).unwrap();
        assert!((b - (1.0f64 / 3.0).acos()).abs() < 1e-12);
        assert_eq!(
            face_angle(FRAC_PI_3, FRAC_PI_3, FRAC_PI_3).unwrap_err(),
            GeometryError::NoFiniteVertex
        );
    }

    #[test]
    fn vertex_point_examples() {
        let e = |i| MVec::<f64>::basis(i);
        let p = vertex_point(&e(1), &e(2), &e(3)).unwrap();
        assert!(p.max_abs_diff(&MVec::new(1.0, 0.0, 0.0, 0.0)) < 1e-15);
        assert_eq!(perp_plane(&e(1), &e(2), &e(3), &p).unwrap_err(), GeometryError::CommonPoint);
    }

    #[test]
    fn cross_is_orthogonal() {
        let a = MVec::new(0.3f64, 1.1, -0.2, 0.5);
        let b = MVec::new(-0.7, 0.2, 0.9, 0.1);
        let c = MVec::new(0.1, 0.4, 0.3, -1.2);
        let w = cross3(&a, &b, &c);
        for v in [a, b, c] {
            assert!(w.inner(&v).abs() < 1e-12);
        }
        // <w, w> = -det G
        assert!((w.norm2() + gram_det3(&a, &b, &c)).abs() < 1e-12);
        let d = MVec::new(1.0, 0.2, -0.4, 0.3);
        assert!((det4(&d, &a, &b, &c) - d.inner(&w)).abs() < 1e-12);
        assert!((det4::<f64>(&MVec::basis(0), &MVec::basis(1), &MVec::basis(2), &MVec::basis(3)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lorentz_maps() {
        let b = Lorentz::boost([0.6, 0.0, 0.8], 0.7);
        assert!(b.lorentz_defect() < 1e-12);
        let p = b.apply(&MVec::basis(0));
        let back = Lorentz::to_origin(&p).apply(&p);
        assert!(back.max_abs_diff(&MVec::basis(0)) < 1e-12);
        let r = Lorentz::rotation([0.0, 0.0, 1.0], 0.4);
        assert!(r.lorentz_defect() < 1e-12);
        let f = Lorentz::reflection(&MVec::new(0.5, 1.0, 0.5, 0.0).unit_spacelike().unwrap());
        assert!(f.lorentz_defect() < 1e-12);
        assert!(f.compose(&f).apply(&p).max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn ball_map_origin() {
        assert_eq!(MVec::new(1.0, 0.0, 0.0, 0.0).to_ball(), [0.0, 0.0, 0.0]);
    }
}
