//! Slope sets of nontrivial line segments in self-similar Sierpinski
//! carpets, exact segment/peripheral-square classification, cell orbits and
//! the carpet billiard constructions built on them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::billiard::{run_orbit, BilliardError, Contact, CornerPolicy, InitialCondition, Orbit};
use crate::compat::{build_sequence, CompatError, CompatSequence};
use crate::geom::{Point2, Vec2};
use crate::tables::{build_carpet, peripheral_squares, Cell, PeripheralSquare, TableError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CarpetError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("slope {0} is not in B_a for a = {1}")]
    SlopeNotInB(BigRational, u32),
    #[error("start parameter p = {0} must be a positive odd integer <= a^k = {1}")]
    BadStart(BigInt, BigInt),
    #[error("initial point is not inside the cell")]
    OutsideCell,
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error(transparent)]
    Compat(#[from] CompatError),
}

/// The slope sets `A_a` and `B_a` of nontrivial line segments of `S_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSets {
    pub a: u32,
    pub a_slopes: Vec<BigRational>,
    pub b_slopes: Vec<BigRational>,
}

impl SlopeSets {
    pub fn contains_a(&self, m: &BigRational) -> bool {
        self.a_slopes.contains(m)
    }
    pub fn contains_b(&self, m: &BigRational) -> bool {
        self.b_slopes.contains(m)
    }
    /// The full slope set `Slopes(S_a) = A_a union B_a`.
    pub fn all(&self) -> Vec<BigRational> {
        let mut s: BTreeSet<BigRational> = self.a_slopes.iter().cloned().collect();
        s.extend(self.b_slopes.iter().cloned());
        s.into_iter().collect()
    }
}

/// Enumerate the slope sets:
/// `A = { p/q : p+q <= a, 0 <= p < q <= a-1, p+q odd }` and
/// `B = { p/q : p+q <= a-1, 0 < p <= q <= a-2, p and q odd }`.
pub fn slope_sets(a: u32) -> Result<SlopeSets, CarpetError> {
    if a < 3 || a.is_multiple_of(2) {
        return Err(CarpetError::Table(TableError::BadCarpetParameter(a)));
    }
    let mut a_set: BTreeSet<BigRational> = BTreeSet::new();
    for q in 1..=(a - 1) {
        for p in 0..q {
            if p + q <= a && (p + q) % 2 == 1 {
                a_set.insert(BigRational::new(BigInt::from(p), BigInt::from(q)));
            }
        }
    }
    let mut b_set: BTreeSet<BigRational> = BTreeSet::new();
    for q in (1..=a.saturating_sub(2)).step_by(2) {
        for p in (1..=q).step_by(2) {
            if p + q < a {
                b_set.insert(BigRational::new(BigInt::from(p), BigInt::from(q)));
            }
        }
    }
    Ok(SlopeSets {
        a,
        a_slopes: a_set.into_iter().collect(),
        b_slopes: b_set.into_iter().collect(),
    })
}

/// A query for the maximal segment from `start` with slope `slope` inside the
/// unit square, checked against all peripheral squares up to `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentQuery {
    pub start: Point2<BigRational>,
    pub slope: BigRational,
    pub depth: u32,
}

/// How the segment relates to the peripheral squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Avoidance {
    Avoids,
    /// Contact happens only at peripheral-square vertices.
    Touches(Vec<Point2<BigRational>>),
    /// The segment meets a peripheral square beyond isolated vertices.
    Crosses {
        square: PeripheralSquare,
        level: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoidanceReport {
    pub verdict: Avoidance,
    /// (construction level, number of squares checked)
    pub checked: Vec<(u32, usize)>,
}

/// Classify the maximal segment from the query start with the query slope
/// (direction `(1, slope)`, slope >= 0) against every peripheral square of
/// `S_{a, depth}`.  All arithmetic is exact.
pub fn segment_avoids_peripherals(
    q: &SegmentQuery,
    a: u32,
) -> Result<AvoidanceReport, CarpetError> {
    segment_avoids_from(q, a, 1)
}

/// Same check restricted to construction levels `min_level..=depth`: the
/// midpoint segments of a level-k cell are only claimed to avoid peripheral
/// squares of side a^-m for m >= k + 1.
pub fn segment_avoids_from(
    q: &SegmentQuery,
    a: u32,
    min_level: u32,
) -> Result<AvoidanceReport, CarpetError> {
    if a < 3 || a.is_multiple_of(2) {
        return Err(CarpetError::Table(TableError::BadCarpetParameter(a)));
    }
    let dir = Vec2::new(BigRational::one(), q.slope.clone());
    // clip the ray to the unit square: t in [0, t_end]
    let one = BigRational::one();
    let mut t_end = &one - &q.start.x;
    if q.slope.is_positive() {
        let ty = (&one - &q.start.y) / &q.slope;
        if ty < t_end {
            t_end = ty;
        }
    }
    if !t_end.is_positive() {
        return Ok(AvoidanceReport {
            verdict: Avoidance::Avoids,
            checked: vec![],
        });
    }
    let mut touches: Vec<Point2<BigRational>> = Vec::new();
    let mut checked = Vec::new();
    for level in min_level..=q.depth {
        let squares: Vec<PeripheralSquare> = peripheral_squares(a, level)
            .into_iter()
            .filter(|s| s.level == level)
            .collect();
        checked.push((level, squares.len()));
        for sq in squares {
            match segment_vs_square(&q.start, &dir, &t_end, &sq) {
                SquareContact::None => {}
                SquareContact::Vertex(p) => {
                    if !touches.contains(&p) {
                        touches.push(p);
                    }
                }
                SquareContact::Crossing => {
                    return Ok(AvoidanceReport {
                        verdict: Avoidance::Crosses { square: sq, level },
                        checked,
                    });
                }
            }
        }
    }
    let verdict = if touches.is_empty() {
        Avoidance::Avoids
    } else {
        Avoidance::Touches(touches)
    };
    Ok(AvoidanceReport { verdict, checked })
}

enum SquareContact {
    None,
    Vertex(Point2<BigRational>),
    Crossing,
}

/// Exact Liang-Barsky clip of the segment `start + t*dir`, `t in [0, t_end]`,
/// against the closed square; contact at a single point that is a corner of
/// the square counts as a vertex touch.
fn segment_vs_square(
    start: &Point2<BigRational>,
    dir: &Vec2<BigRational>,
    t_end: &BigRational,
    sq: &PeripheralSquare,
) -> SquareContact {
    let x1 = &sq.x0 + &sq.side;
    let y1 = &sq.y0 + &sq.side;
    let mut lo = BigRational::zero();
    let mut hi = t_end.clone();
    for (p0, p1, o, d) in [
        (&sq.x0, &x1, &start.x, &dir.x),
        (&sq.y0, &y1, &start.y, &dir.y),
    ] {
        if d.is_zero() {
            if o < p0 || o > p1 {
                return SquareContact::None;
            }
            continue;
        }
        let mut ta = (p0 - o) / d;
        let mut tb = (p1 - o) / d;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        if ta > lo {
            lo = ta;
        }
        if tb < hi {
            hi = tb;
        }
        if lo > hi {
            return SquareContact::None;
        }
    }
    if lo < hi {
        return SquareContact::Crossing;
    }
    // single contact point: vertex or edge graze
    let t = lo;
    let p = Point2::new(&start.x + &dir.x * &t, &start.y + &dir.y * &t);
    let is_corner = (p.x == sq.x0 || p.x == x1) && (p.y == sq.y0 || p.y == y1);
    if is_corner {
        SquareContact::Vertex(p)
    } else {
        SquareContact::Crossing
    }
}

/// An orbit of a cell treated as a billiard table in its own right: the
/// affine image of the unit-square orbit under the contraction that carries
/// the unit square onto the cell.
pub fn cell_orbit(
    cell: &Cell,
    init: &InitialCondition<BigRational>,
    budget: usize,
) -> Result<Orbit<BigRational>, CarpetError> {
    let o = cell.origin();
    let s = cell.side();
    // map the absolute initial condition into unit-square coordinates
    let local = InitialCondition {
        point: Point2::new((&init.point.x - &o.x) / &s, (&init.point.y - &o.y) / &s),
        dir: init.dir.clone(),
    };
    let zero = BigRational::zero();
    let one = BigRational::one();
    if local.point.x < zero || local.point.x > one || local.point.y < zero || local.point.y > one {
        return Err(CarpetError::OutsideCell);
    }
    let unit = crate::tables::build_unit_square();
    let orbit = run_orbit(&unit, &local, budget, CornerPolicy::ResolveRemovable)?;
    // map the footprint back through the contraction
    let back = |p: &Point2<BigRational>| Point2::new(&o.x + &s * &p.x, &o.y + &s * &p.y);
    let bounces = orbit
        .bounces
        .iter()
        .map(|b| crate::billiard::Bounce {
            point: back(&b.point),
            incoming: b.incoming.clone(),
            outgoing: b.outgoing.clone(),
            contact: b.contact,
        })
        .collect();
    Ok(Orbit {
        init: InitialCondition {
            point: back(&local.point),
            dir: orbit.init.dir.clone(),
        },
        bounces,
        status: orbit.status,
    })
}

/// The constant-sequence construction: from the base midpoint of a level-k
/// cell with a slope in `B_a`, the orbits of `S_{a,k}, ..., S_{a,depth}` form
/// a sequence of compatible periodic orbits that is eventually constant.
pub fn constant_carpet_sequence(
    a: u32,
    k: u32,
    p: u64,
    alpha: &BigRational,
    depth: u32,
    budget: usize,
) -> Result<CompatSequence<BigRational>, CarpetError> {
    let sets = slope_sets(a)?;
    if !sets.contains_b(alpha) {
        return Err(CarpetError::SlopeNotInB(alpha.clone(), a));
    }
    let ak = BigInt::from(a).pow(k);
    let pb = BigInt::from(p);
    if p.is_multiple_of(2) || pb > ak {
        return Err(CarpetError::BadStart(pb, ak));
    }
    let x0 = BigRational::new(pb, BigInt::from(2) * &ak);
    let init = InitialCondition {
        point: Point2::new(x0, BigRational::zero()),
        dir: Vec2::new(BigRational::one(), alpha.clone()),
    };
    let tables: Vec<_> = (k..=depth.max(k))
        .map(|n| build_carpet(a, n))
        .collect::<Result<_, _>>()?;
    Ok(build_sequence(&tables, &init, budget)?)
}

/// Outcome of checking whether a slope in `A_a` still yields an orbit of the
/// limit carpet when started at the origin.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum AlphaOrbitCheck {
    /// The level-1 orbit never meets the middle peripheral square, so the
    /// same path is an orbit of the limit carpet.
    ValidOrbitOfSa { orbit: Orbit<BigRational> },
    /// The orbit hits a peripheral square at this construction level.
    Blocked { level: u32 },
}

/// Run the orbit from the origin with slope `alpha` in `S_{a,1}` (corner
/// reflection at pi/2 vertices enabled) and certify it as an orbit of the
/// limit carpet when it avoids the middle peripheral square.
pub fn alpha_in_a_orbit_check(
    a: u32,
    alpha: &BigRational,
    budget: usize,
) -> Result<AlphaOrbitCheck, CarpetError> {
    let table = build_carpet(a, 1)?;
    let init = InitialCondition {
        point: Point2::new(BigRational::zero(), BigRational::zero()),
        dir: Vec2::new(BigRational::one(), alpha.clone()),
    };
    let orbit = run_orbit(&table, &init, budget, CornerPolicy::ResolveRemovable)?;
    let touches_obstacle = orbit.bounces.iter().any(|b| match b.contact {
        Contact::Side(s) => s.loop_idx > 0,
        Contact::Vertex(v) => v.loop_idx > 0,
    });
    if touches_obstacle {
        return Ok(AlphaOrbitCheck::Blocked { level: 1 });
    }
    Ok(AlphaOrbitCheck::ValidOrbitOfSa { orbit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn slope_sets_for_a_three() {
        let s = slope_sets(3).unwrap();
        assert_eq!(s.a_slopes, vec![q(0, 1), q(1, 2)]);
        assert_eq!(s.b_slopes, vec![q(1, 1)]);
    }

    #[test]
    fn slope_sets_examples() {
        let s7 = slope_sets(7).unwrap();
        assert!(s7.contains_a(&q(2, 3)));
        let s5 = slope_sets(5).unwrap();
        assert!(s5.all().contains(&q(2, 3)));
        assert_eq!(slope_sets(5).unwrap().b_slopes, vec![q(1, 3), q(1, 1)]);
    }

    #[test]
    fn slope_set_monotonicity() {
        for b in (3..=15u32).step_by(2) {
            for a in (b..=15u32).step_by(2) {
                let sb = slope_sets(b).unwrap();
                let sa = slope_sets(a).unwrap();
                for m in &sb.a_slopes {
                    assert!(sa.contains_a(m), "A_{b} not within A_{a}");
                }
                for m in &sb.b_slopes {
                    assert!(sa.contains_b(m), "B_{b} not within B_{a}");
                }
            }
        }
    }

    #[test]
    fn rejects_even_parameter() {
        assert!(slope_sets(4).is_err());
    }

    #[test]
    fn midpoint_unit_slope_avoids_everything() {
        let query = SegmentQuery {
            start: Point2::new(q(1, 2), q(0, 1)),
            slope: q(1, 1),
            depth: 4,
        };
        let rep = segment_avoids_peripherals(&query, 3).unwrap();
        assert_eq!(rep.verdict, Avoidance::Avoids);
        // every level was actually checked
        assert_eq!(rep.checked.len(), 4);
        assert_eq!(rep.checked[0], (1, 1));
        assert_eq!(rep.checked[1], (2, 8));
    }

    #[test]
    fn origin_half_slope_touches_middle_square_corner() {
        // y = x/2 from the origin meets the middle third square of S_3
        // exactly at its corner (2/3, 1/3)
        let query = SegmentQuery {
            start: Point2::new(q(0, 1), q(0, 1)),
            slope: q(1, 2),
            depth: 1,
        };
        let rep = segment_avoids_peripherals(&query, 3).unwrap();
        match rep.verdict {
            Avoidance::Touches(pts) => {
                assert_eq!(pts, vec![Point2::new(q(2, 3), q(1, 3))]);
            }
            other => panic!("expected vertex touch, got {other:?}"),
        }
    }

    #[test]
    fn crossing_is_detected() {
        // slope 1 from (1/6, 0): y = x - 1/6 crosses the middle square
        let query = SegmentQuery {
            start: Point2::new(q(1, 6), q(0, 1)),
            slope: q(1, 1),
            depth: 1,
        };
        let rep = segment_avoids_peripherals(&query, 3).unwrap();
        assert!(matches!(rep.verdict, Avoidance::Crosses { level: 1, .. }));
    }

    #[test]
    fn fig24_slope_avoids_at_depth_two() {
        let query = SegmentQuery {
            start: Point2::new(q(0, 1), q(0, 1)),
            slope: q(2, 3),
            depth: 2,
        };
        let rep = segment_avoids_peripherals(&query, 7).unwrap();
        assert_eq!(rep.verdict, Avoidance::Avoids);
    }

    #[test]
    fn cell_orbit_is_the_contracted_unit_orbit() {
        // unit-square orbit from (1/4, 0) with slope 1, mapped into the
        // level-1 cell at column 2, row 1 of S_3
        let cell = Cell {
            a: 3,
            level: 1,
            col: 2,
            row: 1,
        };
        assert!(cell.retained());
        let o = cell.origin();
        let s = cell.side();
        let init = InitialCondition {
            point: Point2::new(&o.x + &s * q(1, 4), o.y.clone()),
            dir: Vec2::new(q(1, 1), q(1, 1)),
        };
        let orbit = cell_orbit(&cell, &init, 64).unwrap();
        assert_eq!(orbit.period(), Some(4));
        let unit = crate::tables::build_unit_square();
        let unit_init = InitialCondition {
            point: Point2::new(q(1, 4), q(0, 1)),
            dir: Vec2::new(q(1, 1), q(1, 1)),
        };
        let unit_orbit = run_orbit(&unit, &unit_init, 64, CornerPolicy::default()).unwrap();
        let mapped: Vec<_> = unit_orbit
            .path_points()
            .iter()
            .map(|p| Point2::new(&o.x + &s * &p.x, &o.y + &s * &p.y))
            .collect();
        assert_eq!(orbit.path_points(), mapped);
    }

    #[test]
    fn identity_cell_is_the_unit_square() {
        let cell = Cell {
            a: 3,
            level: 0,
            col: 0,
            row: 0,
        };
        let init = InitialCondition {
            point: Point2::new(q(1, 4), q(0, 1)),
            dir: Vec2::new(q(1, 1), q(1, 1)),
        };
        let orbit = cell_orbit(&cell, &init, 64).unwrap();
        assert_eq!(orbit.period(), Some(4));
        assert_eq!(orbit.path_points()[1], Point2::new(q(1, 1), q(3, 4)));
    }

    #[test]
    fn doubly_contracted_cell_orbit() {
        let cell = Cell {
            a: 3,
            level: 2,
            col: 8,
            row: 1,
        };
        assert!(cell.retained());
        let o = cell.origin();
        let s = cell.side();
        let init = InitialCondition {
            point: Point2::new(&o.x + &s * q(1, 4), o.y.clone()),
            dir: Vec2::new(q(1, 1), q(1, 1)),
        };
        let orbit = cell_orbit(&cell, &init, 64).unwrap();
        assert_eq!(orbit.period(), Some(4));
        for p in orbit.path_points() {
            assert!(p.x >= o.x && p.x <= &o.x + &s);
        }
    }

    #[test]
    fn cell_midpoint_segments_avoid_finer_peripherals() {
        // B-slope segments from a cell's base midpoint avoid every
        // peripheral square of side a^-m with m >= k + 1; checked for all
        // cells at small (a, k) and a sample of cells elsewhere
        let cases: [(u32, Vec<u32>, usize); 4] = [
            (3, vec![0, 1, 2], usize::MAX),
            (5, vec![0, 1], 8),
            (7, vec![0, 1], 4),
            (9, vec![0], 4),
        ];
        for (a, ks, max_cells) in cases {
            let sets = slope_sets(a).unwrap();
            for k in ks {
                let cells = crate::tables::carpet_cells(a, k);
                let step = (cells.len() / max_cells.min(cells.len())).max(1);
                for cell in cells.iter().step_by(step) {
                    for alpha in &sets.b_slopes {
                        let q = SegmentQuery {
                            start: cell.base_midpoint(),
                            slope: alpha.clone(),
                            depth: k + 3,
                        };
                        let rep = segment_avoids_from(&q, a, k + 1).unwrap();
                        assert_eq!(
                            rep.verdict,
                            Avoidance::Avoids,
                            "a={a} k={k} cell ({},{}) slope {alpha}",
                            cell.col,
                            cell.row
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn constant_sequence_for_a3() {
        let seq = constant_carpet_sequence(3, 0, 1, &q(1, 1), 3, 256).unwrap();
        assert!(seq.truncated.is_none());
        assert_eq!(seq.levels.len(), 4);
        for run in &seq.levels {
            assert!(run.orbit.is_periodic());
        }
        // the diamond misses the obstacles at every level: constant from 0
        assert_eq!(
            crate::compat::detect_constancy(&seq),
            crate::compat::Constancy::ConstantFrom(0)
        );
    }

    #[test]
    fn constant_sequence_rejects_bad_slope() {
        assert!(matches!(
            constant_carpet_sequence(3, 0, 1, &q(1, 2), 2, 64),
            Err(CarpetError::SlopeNotInB(..))
        ));
    }

    #[test]
    fn origin_two_thirds_orbit_of_s7_is_valid() {
        match alpha_in_a_orbit_check(7, &q(2, 3), 256).unwrap() {
            AlphaOrbitCheck::ValidOrbitOfSa { orbit } => {
                assert!(orbit.is_periodic());
                // footprint stays away from the middle square
                for p in orbit.path_points() {
                    let inside_middle =
                        p.x > q(3, 7) && p.x < q(4, 7) && p.y > q(3, 7) && p.y < q(4, 7);
                    assert!(!inside_middle);
                }
            }
            AlphaOrbitCheck::Blocked { level } => panic!("unexpectedly blocked at {level}"),
        }
    }

    #[test]
    fn unit_slope_from_origin_is_blocked_by_the_middle_corner() {
        // slope 1 is in B_3, but the B-slope guarantee starts at cell
        // midpoints; from the origin the main diagonal runs straight into
        // the middle square's corner (1/3, 1/3)
        match alpha_in_a_orbit_check(3, &q(1, 1), 256).unwrap() {
            AlphaOrbitCheck::Blocked { level } => assert_eq!(level, 1),
            AlphaOrbitCheck::ValidOrbitOfSa { .. } => panic!("diagonal cannot dodge the corner"),
        }
    }

    #[test]
    fn blocked_slope_is_reported() {
        // slope 1/2 from the origin passes through (2/3, 1/3), a corner of
        // the middle square of S_3: the orbit is blocked
        match alpha_in_a_orbit_check(3, &q(1, 2), 256).unwrap() {
            AlphaOrbitCheck::Blocked { level } => assert_eq!(level, 1),
            AlphaOrbitCheck::ValidOrbitOfSa { .. } => panic!("expected blocked"),
        }
    }
}
