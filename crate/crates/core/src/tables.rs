//! Prefractal billiard tables: Koch snowflake approximations, T-fractal
//! approximations and self-similar Sierpinski carpet approximations, all with
//! exact vertices and typed corners.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{point_on_segment, polygon_area_doubled, Point2, Vec2};
use crate::qsqrt3::QSqrt3;
use crate::scalar::{Scalar, Sign};
use crate::ternary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("carpet parameter must be an odd integer >= 3, got {0}")]
    BadCarpetParameter(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    KochSnowflake,
    TFractal,
    Carpet { a: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexType {
    Removable,
    Nonremovable,
}

/// A typed vertex; the interior angle is stored in units of pi/6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexInfo {
    pub kind: VertexType,
    pub angle_sixths: u8,
}

/// A closed loop of the table boundary.  The outer loop is counterclockwise;
/// obstacle loops are clockwise, so the billiard domain always lies to the
/// left of every directed side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loop<T> {
    pub points: Vec<Point2<T>>,
    pub vertex_info: Vec<VertexInfo>,
    pub obstacle: bool,
}

/// Identifies one directed side: loop index and segment index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SideId {
    pub loop_idx: u32,
    pub seg: u32,
}

/// Identifies one vertex: loop index and point index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub loop_idx: u32,
    pub vertex: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table<T> {
    pub family: Family,
    pub level: u32,
    /// Scale of the tiling polygon `D_n = c_n D_0`.
    pub cell_scale: BigRational,
    pub loops: Vec<Loop<T>>,
}

impl<T: Scalar> Table<T> {
    pub fn boundary(&self) -> &Loop<T> {
        &self.loops[0]
    }

    pub fn obstacles(&self) -> &[Loop<T>] {
        &self.loops[1..]
    }

    pub fn side_count(&self) -> usize {
        self.loops.iter().map(|l| l.points.len()).sum()
    }

    pub fn side(&self, id: SideId) -> (&Point2<T>, &Point2<T>) {
        let lp = &self.loops[id.loop_idx as usize];
        let n = lp.points.len();
        let i = id.seg as usize;
        (&lp.points[i], &lp.points[(i + 1) % n])
    }

    pub fn side_ids(&self) -> impl Iterator<Item = SideId> + '_ {
        self.loops.iter().enumerate().flat_map(|(li, lp)| {
            (0..lp.points.len()).map(move |s| SideId {
                loop_idx: li as u32,
                seg: s as u32,
            })
        })
    }

    pub fn vertex_point(&self, v: VertexId) -> &Point2<T> {
        &self.loops[v.loop_idx as usize].points[v.vertex as usize]
    }

    pub fn vertex_info(&self, v: VertexId) -> VertexInfo {
        self.loops[v.loop_idx as usize].vertex_info[v.vertex as usize]
    }

    /// The two directed side vectors that leave the vertex, one along each
    /// adjacent side.
    pub fn vertex_wings(&self, v: VertexId) -> (Vec2<T>, Vec2<T>) {
        let lp = &self.loops[v.loop_idx as usize];
        let n = lp.points.len();
        let i = v.vertex as usize;
        let p = &lp.points[i];
        let next = &lp.points[(i + 1) % n];
        let prev = &lp.points[(i + n - 1) % n];
        (p.to(prev), p.to(next))
    }

    /// The vertex at an endpoint of a side (0 = start, 1 = end).
    pub fn side_vertex(&self, id: SideId, endpoint: u8) -> VertexId {
        let n = self.loops[id.loop_idx as usize].points.len();
        let v = if endpoint == 0 {
            id.seg as usize
        } else {
            (id.seg as usize + 1) % n
        };
        VertexId {
            loop_idx: id.loop_idx,
            vertex: v as u32,
        }
    }

    /// Locate a point on the boundary (or an obstacle); returns the side and
    /// the exact parameter along it in `[0, 1]`.
    pub fn locate(&self, p: &Point2<T>) -> Option<(SideId, T)> {
        for id in self.side_ids() {
            let (a, b) = self.side(id);
            if point_on_segment(p, a, b) {
                let ab = a.to(b);
                let t = a.to(p).dot(&ab) / ab.norm_sq();
                return Some((id, t));
            }
        }
        None
    }

    /// Exact area enclosed by the outer boundary minus the obstacles.
    pub fn area(&self) -> T {
        let two = T::from_int(2);
        let mut total = polygon_area_doubled(&self.loops[0].points) / two.clone();
        for ob in self.obstacles() {
            // obstacle loops are clockwise, so their shoelace term is negative
            total = total + polygon_area_doubled(&ob.points) / two.clone();
        }
        total
    }

    /// True if the direction of a side is inward-pointing at a point of that
    /// side (the domain lies to the left of every directed side).
    pub fn is_inward(&self, side: SideId, d: &Vec2<T>) -> bool {
        let (a, b) = self.side(side);
        a.to(b).cross(d).sign() == Sign::Positive
    }
}

fn classify_vertices<T: Scalar>(points: &[Point2<T>]) -> Vec<VertexInfo> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let prev = &points[(i + n - 1) % n];
            let cur = &points[i];
            let next = &points[(i + 1) % n];
            let u = prev.to(cur);
            let v = cur.to(next);
            let c = u.cross(&v).sign();
            let d = u.dot(&v).sign();
            match (c, d) {
                // left turn by 2pi/3: interior angle pi/3
                (Sign::Positive, Sign::Negative) => VertexInfo {
                    kind: VertexType::Removable,
                    angle_sixths: 2,
                },
                // left turn by pi/2: interior angle pi/2
                (Sign::Positive, Sign::Zero) => VertexInfo {
                    kind: VertexType::Removable,
                    angle_sixths: 3,
                },
                // right turn by pi/3: interior angle 4pi/3
                (Sign::Negative, Sign::Positive) => VertexInfo {
                    kind: VertexType::Nonremovable,
                    angle_sixths: 8,
                },
                // right turn by pi/2: interior angle 3pi/2
                (Sign::Negative, Sign::Zero) => VertexInfo {
                    kind: VertexType::Nonremovable,
                    angle_sixths: 9,
                },
                other => panic!("unexpected corner shape {other:?} at vertex {i}"),
            }
        })
        .collect()
}

fn make_loop<T: Scalar>(points: Vec<Point2<T>>, obstacle: bool) -> Loop<T> {
    let vertex_info = classify_vertices(&points);
    Loop {
        points,
        vertex_info,
        obstacle,
    }
}

// ---------------------------------------------------------------------------
// Koch snowflake
// ---------------------------------------------------------------------------

fn q3(n: i64, d: i64) -> QSqrt3 {
    QSqrt3::from_ratio(n, d)
}

/// The n-th inner polygonal approximation of the Koch snowflake, base on the
/// x-axis with the left corner at the origin, counterclockwise.  3*4^n sides
/// of length 3^-n each.
pub fn build_koch_snowflake(n: u32) -> Table<QSqrt3> {
    let mut pts = vec![
        Point2::new(q3(0, 1), q3(0, 1)),
        Point2::new(q3(1, 1), q3(0, 1)),
        Point2::new(q3(1, 2), QSqrt3::sqrt3_times(1, 2)),
    ];
    for _ in 0..n {
        let m = pts.len();
        let mut next = Vec::with_capacity(m * 4);
        for i in 0..m {
            let a = pts[i].clone();
            let b = pts[(i + 1) % m].clone();
            let third = a.to(&b).scale(&q3(1, 3));
            let p = a.translate(&third);
            let q = p.translate(&third);
            // Outward bump for a counterclockwise boundary: rotate the middle
            // third clockwise by pi/3.
            let apex = p.translate(&rotate_minus_60(&third));
            next.extend([a, p, apex, q]);
        }
        pts = next;
    }
    let cell_scale = BigRational::new(BigInt::one(), BigInt::from(3).pow(n));
    Table {
        family: Family::KochSnowflake,
        level: n,
        cell_scale,
        loops: vec![make_loop(pts, false)],
    }
}

fn rotate_minus_60(v: &Vec2<QSqrt3>) -> Vec2<QSqrt3> {
    // [ 1/2  sqrt3/2; -sqrt3/2  1/2 ]
    let c = q3(1, 2);
    let s = QSqrt3::sqrt3_times(1, 2);
    Vec2::new(
        c.clone() * v.x.clone() + s.clone() * v.y.clone(),
        -(s * v.x.clone()) + c * v.y.clone(),
    )
}

// ---------------------------------------------------------------------------
// T-fractal
// ---------------------------------------------------------------------------

fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The n-th approximation of the T-fractal.  The base T is eight unit
/// squares: a 2x2 stem on [0,2]^2 capped by a 4x1 crossbar on [-1,3]x[2,3].
/// Each level appends two half-scale copies per crossbar, standing on the
/// crossbar's two outermost unit squares (bases [-1,0] and [2,3] for the base
/// T), so sibling crossbars overhang outward and never touch each other.
/// Height 3*sum(2^-i), area 8*sum(2^-i).
pub fn build_t_fractal(n: u32) -> Table<BigRational> {
    let mut pts: Vec<Point2<BigRational>> = Vec::new();
    let origin = Point2::new(BigRational::zero(), BigRational::zero());
    pts.push(origin.clone());
    pts.push(Point2::new(qr(2, 1), qr(0, 1)));
    emit_t_unit(&mut pts, &BigRational::one(), &origin, n);
    let last = pts.pop();
    debug_assert_eq!(last.as_ref(), Some(&origin));
    let pts = merge_collinear(pts);
    let cell_scale = BigRational::new(BigInt::one(), BigInt::from(2).pow(n));
    Table {
        family: Family::TFractal,
        level: n,
        cell_scale,
        loops: vec![make_loop(pts, false)],
    }
}

/// Emits the outline of one T unit from just after its base-right corner all
/// the way around to (and including) its base-left corner.
///
/// A child's base-right corner coincides with a point already emitted (the
/// crossbar corner for the right child, the parent's top edge stop for the
/// left one), and the left child ends exactly at the crossbar's top-left
/// corner; the collinear-merge pass cleans up the straight-through joints.
fn emit_t_unit(
    out: &mut Vec<Point2<BigRational>>,
    s: &BigRational,
    o: &Point2<BigRational>,
    depth: u32,
) {
    let at = |x: BigRational, y: BigRational| -> Point2<BigRational> {
        Point2::new(&o.x + s * x, &o.y + s * y)
    };
    out.push(at(qr(2, 1), qr(2, 1)));
    out.push(at(qr(3, 1), qr(2, 1)));
    out.push(at(qr(3, 1), qr(3, 1)));
    if depth > 0 {
        let half = s * qr(1, 2);
        // right child stands on [2, 3] x {3}; its base-right is (3, 3)
        emit_t_unit(out, &half, &at(qr(2, 1), qr(3, 1)), depth - 1);
        // left child stands on [-1, 0] x {3}; its base-right is (0, 3)
        out.push(at(qr(0, 1), qr(3, 1)));
        emit_t_unit(out, &half, &at(qr(-1, 1), qr(3, 1)), depth - 1);
        // the left child's outline ends at (-1, 3), the crossbar's top-left
    } else {
        out.push(at(qr(-1, 1), qr(3, 1)));
    }
    out.push(at(qr(-1, 1), qr(2, 1)));
    out.push(at(qr(0, 1), qr(2, 1)));
    out.push(at(qr(0, 1), qr(0, 1)));
}

/// Drop vertices where the boundary continues straight through.
fn merge_collinear<T: Scalar>(pts: Vec<Point2<T>>) -> Vec<Point2<T>> {
    let n = pts.len();
    let mut keep = Vec::with_capacity(n);
    for i in 0..n {
        let prev = &pts[(i + n - 1) % n];
        let cur = &pts[i];
        let next = &pts[(i + 1) % n];
        let u = prev.to(cur);
        let v = cur.to(next);
        if u.cross(&v).is_zero() && u.dot(&v).sign() == Sign::Positive {
            continue;
        }
        keep.push(cur.clone());
    }
    keep
}

// ---------------------------------------------------------------------------
// Sierpinski carpet
// ---------------------------------------------------------------------------

/// A cell of the level-k partition of the unit square into a^k x a^k squares.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub a: u32,
    pub level: u32,
    pub col: u64,
    pub row: u64,
}

impl Cell {
    /// Side length `a^-level`.
    pub fn side(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.a).pow(self.level))
    }

    pub fn origin(&self) -> Point2<BigRational> {
        let s = self.side();
        Point2::new(
            &s * BigRational::from_integer(self.col.into()),
            &s * BigRational::from_integer(self.row.into()),
        )
    }

    /// Midpoint of the cell's bottom edge.
    pub fn base_midpoint(&self) -> Point2<BigRational> {
        let o = self.origin();
        let s = self.side();
        Point2::new(o.x + s * qr(1, 2), o.y)
    }

    /// True if the cell survives the carpet construction (no ancestor is a
    /// removed middle square).
    pub fn retained(&self) -> bool {
        let mid = u64::from((self.a - 1) / 2);
        let a = u64::from(self.a);
        let (mut i, mut j) = (self.col, self.row);
        for _ in 0..self.level {
            if i % a == mid && j % a == mid {
                return false;
            }
            i /= a;
            j /= a;
        }
        true
    }
}

/// All retained cells of the level-k partition.
pub fn carpet_cells(a: u32, k: u32) -> Vec<Cell> {
    let n = u64::from(a).pow(k);
    let mut cells = Vec::new();
    for row in 0..n {
        for col in 0..n {
            let c = Cell {
                a,
                level: k,
                col,
                row,
            };
            if c.retained() {
                cells.push(c);
            }
        }
    }
    cells
}

/// Axis-aligned square obstacle, as exact corner coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeripheralSquare {
    /// Construction step at which the square was removed; its side is a^-level.
    pub level: u32,
    pub x0: BigRational,
    pub y0: BigRational,
    pub side: BigRational,
}

/// All peripheral squares of `S_{a,n}` (construction steps 1..=n).
pub fn peripheral_squares(a: u32, n: u32) -> Vec<PeripheralSquare> {
    let mid = BigRational::from_integer(BigInt::from((a - 1) / 2));
    let mut out = Vec::new();
    for m in 1..=n {
        let s = BigRational::new(BigInt::one(), BigInt::from(a).pow(m));
        for cell in carpet_cells(a, m - 1) {
            let o = cell.origin();
            out.push(PeripheralSquare {
                level: m,
                x0: o.x + &s * &mid,
                y0: o.y + &s * &mid,
                side: s.clone(),
            });
        }
    }
    out
}

/// The prefractal carpet billiard `S_{a,n}`: the unit square with every
/// peripheral square up to level n as a reflecting obstacle.
pub fn build_carpet(a: u32, n: u32) -> Result<Table<BigRational>, TableError> {
    if a < 3 || a.is_multiple_of(2) {
        return Err(TableError::BadCarpetParameter(a));
    }
    let z = BigRational::zero();
    let one = BigRational::one();
    let boundary = vec![
        Point2::new(z.clone(), z.clone()),
        Point2::new(one.clone(), z.clone()),
        Point2::new(one.clone(), one.clone()),
        Point2::new(z.clone(), one.clone()),
    ];
    let mut loops = vec![make_loop(boundary, false)];
    for sq in peripheral_squares(a, n) {
        let x1 = &sq.x0 + &sq.side;
        let y1 = &sq.y0 + &sq.side;
        // clockwise, so the billiard domain is to the left of each side
        let pts = vec![
            Point2::new(sq.x0.clone(), sq.y0.clone()),
            Point2::new(sq.x0.clone(), y1.clone()),
            Point2::new(x1.clone(), y1),
            Point2::new(x1, sq.y0.clone()),
        ];
        loops.push(make_loop(pts, true));
    }
    let cell_scale = BigRational::new(BigInt::one(), BigInt::from(a).pow(n));
    Ok(Table {
        family: Family::Carpet { a },
        level: n,
        cell_scale,
        loops,
    })
}

/// A plain unit-square table (level-0 carpet, any family parameter).
pub fn build_unit_square() -> Table<BigRational> {
    build_carpet(3, 0).expect("valid parameters")
}

// ---------------------------------------------------------------------------
// Point classification against the limit fractal
// ---------------------------------------------------------------------------

/// Where a point sits in the limit fractal's boundary taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    /// Vertex of some prefractal approximation.
    Corner,
    /// Non-corner point of the limit boundary around which the limit set is
    /// totally disconnected (Koch family).
    CantorPoint,
    /// Non-corner point of the limit boundary with a persistent tangent.
    SmoothFractalPoint,
    /// Not a point of the limit boundary (interior, exterior, or a transient
    /// prefractal boundary point that later generations swallow).
    NotOnBoundary,
}

/// Classify a boundary point of `t` against the limit fractal.  The `depth`
/// bound controls how many further generations are examined for the families
/// where persistence is checked constructively (T-fractal).
pub fn classify_point<T: Scalar>(t: &Table<T>, p: &Point2<T>, depth: u32) -> PointClass {
    match t.family {
        Family::KochSnowflake => classify_koch(t, p),
        Family::TFractal => classify_t(t, p, depth),
        Family::Carpet { .. } => classify_carpet(t, p),
    }
}

fn classify_koch<T: Scalar>(t: &Table<T>, p: &Point2<T>) -> PointClass {
    let Some((_side, param)) = t.locate(p) else {
        return PointClass::NotOnBoundary;
    };
    let Some(x) = param.as_rational() else {
        // irrational position along the side: not a vertex of any level and
        // not in the side's Cantor set scaffold we can certify
        return PointClass::NotOnBoundary;
    };
    if koch_side_param_is_corner(&x) {
        return PointClass::Corner;
    }
    match ternary::address_of(&x) {
        Ok(addr) if ternary::in_cantor(&addr) => PointClass::CantorPoint,
        _ => PointClass::NotOnBoundary,
    }
}

/// A side parameter marks a vertex of some deeper approximation iff the point
/// is an endpoint of a surviving subinterval: a ternary number whose
/// terminating base-3 digits are c-free before the last digit.
pub fn koch_side_param_is_corner(x: &BigRational) -> bool {
    if x.is_zero() || x.is_one() {
        return true;
    }
    if !ternary::is_ternary_number(x) {
        return false;
    }
    // terminating digits of p/3^y
    let mut p = x.numer().clone();
    let q = x.denom().clone();
    let three = BigInt::from(3);
    let mut digits = Vec::new();
    loop {
        p *= &three;
        let (d, rem) = num_integer::Integer::div_rem(&p, &q);
        digits.push(u32::try_from(&d).expect("digit"));
        if rem.is_zero() {
            break;
        }
        p = rem;
    }
    digits[..digits.len() - 1].iter().all(|&d| d != 1)
}

fn classify_t<T: Scalar>(t: &Table<T>, p: &Point2<T>, depth: u32) -> PointClass {
    if t.locate(p).is_none() {
        return PointClass::NotOnBoundary;
    }
    if !p.x.sqrt3_part().is_zero() || !p.y.sqrt3_part().is_zero() {
        return PointClass::NotOnBoundary;
    }
    let pq = Point2::new(p.x.rational_part(), p.y.rational_part());
    for m in t.level..=t.level.max(depth) {
        let deeper = build_t_fractal(m);
        let Some((_side, param)) = deeper.locate(&pq) else {
            return PointClass::NotOnBoundary;
        };
        if param.is_zero() || param.is_one() {
            return PointClass::Corner;
        }
    }
    PointClass::SmoothFractalPoint
}

fn classify_carpet<T: Scalar>(t: &Table<T>, p: &Point2<T>) -> PointClass {
    let Some((_side, param)) = t.locate(p) else {
        return PointClass::NotOnBoundary;
    };
    if param.is_zero() || param.is_one() {
        return PointClass::Corner;
    }
    // every carpet boundary or obstacle point persists at all deeper levels
    PointClass::SmoothFractalPoint
}
