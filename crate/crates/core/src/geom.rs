//! Exact planar primitives: points, vectors, reflections and ray casting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{Scalar, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn to(&self, other: &Point2<T>) -> Vec2<T> {
        Vec2::new(
            other.x.clone() - self.x.clone(),
            other.y.clone() - self.y.clone(),
        )
    }

    pub fn translate(&self, v: &Vec2<T>) -> Point2<T> {
        Point2::new(self.x.clone() + v.x.clone(), self.y.clone() + v.y.clone())
    }

    /// Squared Euclidean distance, exact in the coordinate field.
    pub fn dist_sq(&self, other: &Point2<T>) -> T {
        self.to(other).norm_sq()
    }
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn neg(&self) -> Vec2<T> {
        Vec2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn scale(&self, s: &T) -> Vec2<T> {
        Vec2::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }

    pub fn add(&self, other: &Vec2<T>) -> Vec2<T> {
        Vec2::new(
            self.x.clone() + other.x.clone(),
            self.y.clone() + other.y.clone(),
        )
    }

    pub fn dot(&self, other: &Vec2<T>) -> T {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn cross(&self, other: &Vec2<T>) -> T {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    /// Reflect this vector in the line spanned by `axis` (which need not be
    /// normalized): `2 (d.u / u.u) u - d`.
    pub fn mirror(&self, axis: &Vec2<T>) -> Vec2<T> {
        let uu = axis.norm_sq();
        let du = self.dot(axis);
        let two = T::from_int(2);
        let k = two * du / uu;
        axis.scale(&k).add(&self.neg())
    }

    /// Scale-invariant canonical representative of the ray direction: clear
    /// denominators and divide out the integer content of all coordinates of
    /// (a_x, b_x, a_y, b_y).  Positive multiples map to the same value, so
    /// exact direction equality is well defined.
    pub fn canonical_direction(&self) -> Vec2<T> {
        let ax = self.x.rational_part();
        let bx = self.x.sqrt3_part();
        let ay = self.y.rational_part();
        let by = self.y.sqrt3_part();
        let mut den = BigInt::one();
        for q in [&ax, &bx, &ay, &by] {
            den = den.lcm(q.denom());
        }
        let ints: Vec<BigInt> = [&ax, &bx, &ay, &by]
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        let mut g = BigInt::zero();
        for i in &ints {
            g = g.gcd(i);
        }
        if g.is_zero() {
            return self.clone();
        }
        let factor = T::from_rational(BigRational::new(den, g));
        self.scale(&factor)
    }
}

/// How a ray meets a segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HitKind {
    Interior,
    /// The endpoint index within the segment: 0 for the start, 1 for the end.
    Endpoint(u8),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayHit<T> {
    /// Ray parameter, strictly positive.
    pub t: T,
    /// Segment parameter in [0, 1].
    pub u: T,
    pub point: Point2<T>,
    pub kind: HitKind,
}

/// Outcome of casting the ray `p + t d` (t > 0) against the segment `[a, b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayCast<T> {
    Miss,
    Hit(RayHit<T>),
    /// Ray and segment are collinear; the caller decides what that means.
    Degenerate,
}

/// Exact ray/segment intersection with the smallest positive parameter.
pub fn segment_intersect<T: Scalar>(
    p: &Point2<T>,
    d: &Vec2<T>,
    a: &Point2<T>,
    b: &Point2<T>,
) -> RayCast<T> {
    let ab = a.to(b);
    let pa = p.to(a);
    let det = d.cross(&ab);
    if det.is_zero() {
        // Parallel.  Collinear iff a - p is also parallel to d.
        return if pa.cross(d).is_zero() {
            RayCast::Degenerate
        } else {
            RayCast::Miss
        };
    }
    let t = pa.cross(&ab) / det.clone();
    let u = pa.cross(d) / det;
    if t.sign() != Sign::Positive {
        return RayCast::Miss;
    }
    let zero = T::zero();
    let one = T::one();
    if u < zero || u > one {
        return RayCast::Miss;
    }
    let kind = if u.is_zero() {
        HitKind::Endpoint(0)
    } else if u == one {
        HitKind::Endpoint(1)
    } else {
        HitKind::Interior
    };
    let point = p.translate(&d.scale(&t));
    RayCast::Hit(RayHit { t, u, point, kind })
}

/// Twice the signed area of a polygon (positive for counterclockwise).
pub fn polygon_area_doubled<T: Scalar>(vertices: &[Point2<T>]) -> T {
    let mut acc = T::zero();
    let n = vertices.len();
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        acc = acc + (p.x.clone() * q.y.clone() - q.x.clone() * p.y.clone());
    }
    acc
}

/// Exact point-in-polygon test for a simple polygon; boundary counts as
/// contained.  Crossing-number with exact arithmetic.
pub fn polygon_contains<T: Scalar>(vertices: &[Point2<T>], p: &Point2<T>) -> bool {
    let n = vertices.len();
    // On-boundary check first.
    for i in 0..n {
        if point_on_segment(p, &vertices[i], &vertices[(i + 1) % n]) {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let (ya, yb) = (&a.y, &b.y);
        let cond = (ya <= &p.y && &p.y < yb) || (yb <= &p.y && &p.y < ya);
        if cond {
            // x coordinate of the edge at height p.y
            let dy = b.y.clone() - a.y.clone();
            let t = (p.y.clone() - a.y.clone()) / dy;
            let x = a.x.clone() + t * (b.x.clone() - a.x.clone());
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn point_on_segment<T: Scalar>(p: &Point2<T>, a: &Point2<T>, b: &Point2<T>) -> bool {
    let ab = a.to(b);
    let ap = a.to(p);
    if !ab.cross(&ap).is_zero() {
        return false;
    }
    let d = ap.dot(&ab);
    let zero = T::zero();
    d >= zero && d <= ab.norm_sq()
}

/// An exact rigid motion `x -> M x + v` with `M` orthogonal (det = +-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry<T> {
    /// Row-major 2x2 linear part.
    pub m: [T; 4],
    pub v: Vec2<T>,
}

impl<T: Scalar> Isometry<T> {
    pub fn identity() -> Self {
        Isometry {
            m: [T::one(), T::zero(), T::zero(), T::one()],
            v: Vec2::new(T::zero(), T::zero()),
        }
    }

    /// Reflection in the line through `a` and `b`.
    pub fn reflection(a: &Point2<T>, b: &Point2<T>) -> Self {
        let d = a.to(b);
        let nn = d.norm_sq();
        let two = T::from_int(2);
        // M = 2/|d|^2 * [dx^2, dx dy; dx dy, dy^2] - I
        let dx2 = d.x.clone() * d.x.clone();
        let dy2 = d.y.clone() * d.y.clone();
        let dxy = d.x.clone() * d.y.clone();
        let m = [
            two.clone() * dx2 / nn.clone() - T::one(),
            two.clone() * dxy.clone() / nn.clone(),
            two.clone() * dxy / nn.clone(),
            two * dy2 / nn - T::one(),
        ];
        // Fix point a: v = a - M a
        let ma = apply_linear(&m, &Vec2::new(a.x.clone(), a.y.clone()));
        let v = Vec2::new(a.x.clone() - ma.x, a.y.clone() - ma.y);
        Isometry { m, v }
    }

    pub fn apply_point(&self, p: &Point2<T>) -> Point2<T> {
        let w = apply_linear(&self.m, &Vec2::new(p.x.clone(), p.y.clone()));
        Point2::new(w.x + self.v.x.clone(), w.y + self.v.y.clone())
    }

    pub fn apply_vec(&self, u: &Vec2<T>) -> Vec2<T> {
        apply_linear(&self.m, u)
    }

    /// `self` after `other`: `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Isometry<T>) -> Isometry<T> {
        let m = [
            self.m[0].clone() * other.m[0].clone() + self.m[1].clone() * other.m[2].clone(),
            self.m[0].clone() * other.m[1].clone() + self.m[1].clone() * other.m[3].clone(),
            self.m[2].clone() * other.m[0].clone() + self.m[3].clone() * other.m[2].clone(),
            self.m[2].clone() * other.m[1].clone() + self.m[3].clone() * other.m[3].clone(),
        ];
        let mv = apply_linear(&self.m, &other.v);
        let v = Vec2::new(mv.x + self.v.x.clone(), mv.y + self.v.y.clone());
        Isometry { m, v }
    }
}

fn apply_linear<T: Scalar>(m: &[T; 4], u: &Vec2<T>) -> Vec2<T> {
    Vec2::new(
        m[0].clone() * u.x.clone() + m[1].clone() * u.y.clone(),
        m[2].clone() * u.x.clone() + m[3].clone() * u.y.clone(),
    )
}
