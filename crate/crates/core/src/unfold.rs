//! Unfolding machinery: dihedral data of a rational table, straightening an
//! orbit into a line through reflected table copies, reflected-unfoldings
//! into larger tables tiled by a square, and folding orbits back down.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiard::{run_orbit, BilliardError, Contact, CornerPolicy, InitialCondition, Orbit};
use crate::geom::{Isometry, Point2, Vec2};
use crate::scalar::Scalar;
use crate::tables::{Table, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnfoldError {
    #[error("orbit is singular over the requested span")]
    SingularOrbit,
    #[error("orbit has fewer than two basepoints")]
    TooShort,
    #[error("folded path is not a legal orbit of the tile")]
    FoldMismatch,
    #[error(transparent)]
    Billiard(#[from] BilliardError),
}

/// Group data of the planar reflections generated by a rational table's
/// sides: `N = lcm(q_j)` over interior angles `p_j/q_j * pi`; the associated
/// translation surface uses `2N` reflected copies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DihedralData {
    pub angle_denominators: Vec<u32>,
    pub n: u32,
    pub copies: u32,
}

pub fn dihedral_of<T: Scalar>(table: &Table<T>) -> DihedralData {
    let mut denoms: Vec<u32> = Vec::new();
    for lp in &table.loops {
        for vi in &lp.vertex_info {
            // interior angle is angle_sixths/6 * pi; reduce to lowest terms
            let g = (vi.angle_sixths as u32).gcd(&6);
            denoms.push(6 / g);
        }
    }
    denoms.sort_unstable();
    denoms.dedup();
    let n = denoms.iter().fold(1u32, |acc, q| acc.lcm(q));
    DihedralData {
        angle_denominators: denoms,
        n,
        copies: 2 * n,
    }
}

/// One table copy in an unfolding, carrying the orbit leg it contains.
#[derive(Debug, Clone)]
pub struct UnfoldedCopy<T> {
    pub isometry: Isometry<T>,
    /// The leg in unfolded coordinates.
    pub segment: (Point2<T>, Point2<T>),
}

/// An orbit straightened into a single line; one table copy per leg.
#[derive(Debug, Clone)]
pub struct UnfoldedOrbit<T> {
    pub copies: Vec<UnfoldedCopy<T>>,
}

impl<T: Scalar> UnfoldedOrbit<T> {
    /// Every unfolded basepoint lies on the line through the first leg.
    pub fn is_collinear(&self) -> bool {
        if self.copies.is_empty() {
            return true;
        }
        let origin = &self.copies[0].segment.0;
        let dir = origin.to(&self.copies[0].segment.1);
        self.copies.iter().all(|c| {
            origin.to(&c.segment.0).cross(&dir).is_zero()
                && origin.to(&c.segment.1).cross(&dir).is_zero()
        })
    }

    /// Squared length of the full unfolded chord.
    pub fn chord_norm_sq(&self) -> T {
        let first = &self.copies.first().expect("nonempty").segment.0;
        let last = &self.copies.last().expect("nonempty").segment.1;
        first.to(last).norm_sq()
    }
}

/// The net isometry continuing the flow through a removable corner: a half
/// turn about a pi/2 vertex (two wall reflections), a reflection in the line
/// through a pi/3 vertex perpendicular to its bisector (three reflections).
fn corner_isometry<T: Scalar>(table: &Table<T>, v: VertexId) -> Result<Isometry<T>, UnfoldError> {
    let info = table.vertex_info(v);
    let p = table.vertex_point(v).clone();
    match info.angle_sixths {
        3 => {
            // rotation by pi about p: x -> 2p - x
            let m = [-T::one(), T::zero(), T::zero(), -T::one()];
            let two = T::from_int(2);
            let vtr = Vec2::new(two.clone() * p.x, two * p.y);
            Ok(Isometry { m, v: vtr })
        }
        2 => {
            let (w1, w2) = table.vertex_wings(v);
            let bis = w1.add(&w2);
            // line through p along rot90(bisector)
            let perp = Vec2::new(-bis.y.clone(), bis.x.clone());
            let q = p.translate(&perp);
            Ok(Isometry::reflection(&p, &q))
        }
        _ => Err(UnfoldError::SingularOrbit),
    }
}

/// Unfold an orbit into a straight chain of table copies: reflect the running
/// isometry in each side the orbit hits (removable corners contribute their
/// net reflection group element).  For a periodic orbit the number of copies
/// equals the period.
pub fn unfold_orbit<T: Scalar>(
    table: &Table<T>,
    orbit: &Orbit<T>,
) -> Result<UnfoldedOrbit<T>, UnfoldError> {
    if orbit.bounces.iter().any(|b| b.outgoing.is_none()) {
        return Err(UnfoldError::SingularOrbit);
    }
    let pts = orbit.path_points();
    let m = pts.len();
    if m < 2 {
        return Err(UnfoldError::TooShort);
    }
    let legs = if orbit.is_periodic() { m } else { m - 1 };
    let mut g = Isometry::identity();
    let mut copies = Vec::with_capacity(legs);
    for i in 0..legs {
        let a = &pts[i];
        let b = if i + 1 < m {
            pts[i + 1].clone()
        } else {
            orbit.init.point.clone()
        };
        copies.push(UnfoldedCopy {
            isometry: g.clone(),
            segment: (g.apply_point(a), g.apply_point(&b)),
        });
        if i + 1 < legs {
            let step = match orbit.bounces[i + 1].contact {
                Contact::Side(s) => {
                    let (sa, sb) = table.side(s);
                    Isometry::reflection(sa, sb)
                }
                Contact::Vertex(v) => corner_isometry(table, v)?,
            };
            g = g.compose(&step);
        }
    }
    Ok(UnfoldedOrbit { copies })
}

/// A reflection grid of squares with side `cell` anchored at `origin`; the
/// tiling by which the square-tiled tables are folded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareTiling {
    pub origin: Point2<BigRational>,
    pub cell: BigRational,
}

impl SquareTiling {
    pub fn unit() -> Self {
        Self::scaled(BigRational::one())
    }

    pub fn scaled(cell: BigRational) -> Self {
        SquareTiling {
            origin: Point2::new(BigRational::zero(), BigRational::zero()),
            cell,
        }
    }

    fn fold_coord(&self, x: &BigRational, is_y: bool) -> BigRational {
        let o = if is_y { &self.origin.y } else { &self.origin.x };
        let rel = x - o;
        let period = BigRational::from_integer(BigInt::from(2)) * &self.cell;
        let mut r = &rel - (&rel / &period).floor() * &period;
        if r > self.cell {
            r = period - r;
        }
        r
    }

    /// Fold a point into the fundamental cell `[0, cell]^2` by reflections.
    pub fn fold_point(&self, p: &Point2<BigRational>) -> Point2<BigRational> {
        Point2::new(self.fold_coord(&p.x, false), self.fold_coord(&p.y, true))
    }
}

/// Reflected-unfolding: run the initial condition of a small-table orbit in a
/// larger table tiled (through reflections) by the small one.  The unfolded
/// straight-line flow is shared, so the result is exactly the big-table
/// billiard orbit of the same initial condition.
pub fn reflect_unfold(
    big: &Table<BigRational>,
    o: &Orbit<BigRational>,
    max_bounces: usize,
) -> Result<Orbit<BigRational>, UnfoldError> {
    let init = InitialCondition {
        point: o.init.point.clone(),
        dir: o.init.dir.clone(),
    };
    Ok(run_orbit(
        big,
        &init,
        max_bounces,
        CornerPolicy::ResolveRemovable,
    )?)
}

/// The raw fold of an orbit's path into one tiling cell: every leg is cut at
/// the grid lines it crosses and each piece reflected into the cell.  For a
/// periodic orbit the sequence traverses the folded closed path and ends
/// where it starts.
pub fn fold_path(o: &Orbit<BigRational>, tiling: &SquareTiling) -> Vec<Point2<BigRational>> {
    let mut pts = o.path_points();
    if o.is_periodic() {
        pts.push(o.init.point.clone());
    }
    let mut folded: Vec<Point2<BigRational>> = Vec::new();
    for w in pts.windows(2) {
        let cuts = grid_cuts(&w[0], &w[1], tiling);
        let skip = usize::from(!folded.is_empty());
        for p in cuts.into_iter().skip(skip) {
            folded.push(tiling.fold_point(&p));
        }
    }
    folded
}

/// Fold an orbit of a square-tiled table down to an orbit of the unit-square
/// billiard (the fundamental cell rescaled to unit size).  The folded path is
/// re-run through the billiard map and must reproduce it leg by leg, which
/// checks that folding preserved the law of reflection.
pub fn fold_orbit(
    o: &Orbit<BigRational>,
    tiling: &SquareTiling,
    unit_square: &Table<BigRational>,
) -> Result<Orbit<BigRational>, UnfoldError> {
    let folded = fold_path(o, tiling);
    if folded.len() < 2 {
        return Err(UnfoldError::TooShort);
    }
    // normalize the cell to the unit square
    let norm: Vec<Point2<BigRational>> = folded
        .iter()
        .map(|p| Point2::new(&p.x / &tiling.cell, &p.y / &tiling.cell))
        .collect();
    let dir = norm[0].to(&norm[1]);
    let init = InitialCondition {
        point: norm[0].clone(),
        dir,
    };
    let orbit = run_orbit(
        unit_square,
        &init,
        norm.len() + 1,
        CornerPolicy::ResolveRemovable,
    )?;
    // the folded sequence must be an integer number of traversals of the orbit
    let path = orbit.path_points();
    let closed = norm.last() == norm.first();
    let body = if closed {
        &norm[..norm.len() - 1]
    } else {
        &norm[..]
    };
    if body.is_empty() || body.len() % path.len() != 0 {
        return Err(UnfoldError::FoldMismatch);
    }
    for (i, p) in body.iter().enumerate() {
        if *p != path[i % path.len()] {
            return Err(UnfoldError::FoldMismatch);
        }
    }
    Ok(orbit)
}

/// How many traversals of the folded orbit the original path contains.
pub fn fold_repetition_count(
    o: &Orbit<BigRational>,
    tiling: &SquareTiling,
    folded: &Orbit<BigRational>,
) -> usize {
    let raw = fold_path(o, tiling);
    let closed = raw.last() == raw.first();
    let n = if closed { raw.len() - 1 } else { raw.len() };
    n / folded.path_points().len()
}

/// Split `[a, b]` at every tiling grid line it crosses; returns the ordered
/// cut points including both endpoints.
fn grid_cuts(
    a: &Point2<BigRational>,
    b: &Point2<BigRational>,
    tiling: &SquareTiling,
) -> Vec<Point2<BigRational>> {
    let d = a.to(b);
    let mut ts: Vec<BigRational> = vec![BigRational::zero(), BigRational::one()];
    for (coord_a, coord_d, origin) in [
        (&a.x, &d.x, &tiling.origin.x),
        (&a.y, &d.y, &tiling.origin.y),
    ] {
        if coord_d.is_zero() {
            continue;
        }
        let from = coord_a - origin;
        let to = &from + coord_d;
        let (lo, hi) = if coord_d.is_positive() {
            (&from, &to)
        } else {
            (&to, &from)
        };
        let mut k = (lo / &tiling.cell).ceil();
        let k_end = (hi / &tiling.cell).floor();
        while k <= k_end {
            let line = &k * &tiling.cell;
            let t = (&line - &from) / coord_d;
            if t.is_positive() && t < BigRational::one() {
                ts.push(t);
            }
            k += BigRational::one();
        }
    }
    ts.sort();
    ts.dedup();
    ts.into_iter()
        .map(|t| Point2::new(&a.x + &d.x * &t, &a.y + &d.y * &t))
        .collect()
}

/// Footprint as a sorted multiset, for exact comparisons.
pub fn footprint_multiset<T: Scalar>(points: &[Point2<T>]) -> Vec<(Point2<T>, usize)> {
    let mut out: Vec<(Point2<T>, usize)> = Vec::new();
    for p in points {
        match out.iter_mut().find(|(q, _)| q == p) {
            Some((_, n)) => *n += 1,
            None => out.push((p.clone(), 1)),
        }
    }
    out.sort_by(|(p, _), (q, _)| p.x.cmp(&q.x).then_with(|| p.y.cmp(&q.y)));
    out
}
