//! Sequences of compatible orbits across prefractal levels, hybrid orbit
//! classification, constancy detection, slope admissibility on the T-fractal,
//! Cantor orbits and nontrivial paths toward elusive points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiard::{run_orbit, BilliardError, Contact, CornerPolicy, InitialCondition, Orbit};
use crate::geom::{segment_intersect, HitKind, Point2, RayCast, Vec2};
use crate::qsqrt3::QSqrt3;
use crate::scalar::Scalar;
use crate::tables::{PointClass, Table};
use crate::ternary::{self, Ch, RepType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompatError {
    #[error("no compatible lift at level {level}: backward ray exits through a corner")]
    LiftThroughCorner { level: u32 },
    #[error("no compatible lift at level {level}: backward ray finds no boundary")]
    LiftNotFound { level: u32 },
    #[error("orbit at level {level} is not periodic")]
    NotPeriodic { level: u32 },
    #[error("initial basepoint address is not rational on its side")]
    IrrationalAddress,
    #[error("hypotheses not satisfied: {0}")]
    BadHypotheses(String),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
}

/// One level of a compatible sequence.
#[derive(Debug, Clone)]
pub struct LevelRun<T> {
    pub level: u32,
    pub init: InitialCondition<T>,
    pub orbit: Orbit<T>,
}

/// A sequence of compatible orbits, one per level, sharing the direction.
#[derive(Debug, Clone)]
pub struct CompatSequence<T> {
    pub start_level: u32,
    pub direction: Vec2<T>,
    pub levels: Vec<LevelRun<T>>,
    /// Set when the sequence stopped early (no compatible lift).
    pub truncated: Option<(u32, String)>,
}

/// Lift an initial condition from its level to a finer level: the unique
/// basepoint on the finer boundary lying on the line through the basepoint in
/// the shared direction, with the open segment between them meeting the finer
/// boundary only at the lifted point.
///
/// When the basepoint persists on the finer boundary the lift is the
/// identity; otherwise the backward ray from the basepoint is cast to its
/// first crossing of the finer boundary.
pub fn lift_initial<T: Scalar>(
    fine: &Table<T>,
    init: &InitialCondition<T>,
) -> Result<InitialCondition<T>, CompatError> {
    if fine.locate(&init.point).is_some() {
        return Ok(init.clone());
    }
    let level = fine.level;
    let back = init.dir.neg();
    let mut best: Option<(T, Point2<T>, HitKind)> = None;
    for id in fine.side_ids() {
        let (a, b) = fine.side(id);
        if let RayCast::Hit(h) = segment_intersect(&init.point, &back, a, b) {
            let better = match &best {
                Some((bt, _, _)) => h.t < *bt,
                None => true,
            };
            if better {
                best = Some((h.t, h.point, h.kind));
            }
        }
    }
    match best {
        Some((_, point, HitKind::Interior)) => Ok(InitialCondition {
            point,
            dir: init.dir.clone(),
        }),
        Some((_, _, HitKind::Endpoint(_))) => Err(CompatError::LiftThroughCorner { level }),
        None => Err(CompatError::LiftNotFound { level }),
    }
}

/// Build the sequence of compatible orbits determined by `init` at
/// `start_level`, running each level's orbit up to `budget` bounces.
pub fn build_sequence<T: Scalar>(
    tables: &[Table<T>],
    init: &InitialCondition<T>,
    budget: usize,
) -> Result<CompatSequence<T>, CompatError> {
    let start_level = tables.first().map(|t| t.level).unwrap_or(0);
    let mut levels = Vec::new();
    let mut truncated = None;
    for table in tables {
        let lifted = match lift_initial(table, init) {
            Ok(l) => l,
            Err(e) => {
                truncated = Some((table.level, e.to_string()));
                break;
            }
        };
        let orbit = run_orbit(table, &lifted, budget, CornerPolicy::ResolveRemovable)?;
        levels.push(LevelRun {
            level: table.level,
            init: lifted,
            orbit,
        });
    }
    Ok(CompatSequence {
        start_level,
        direction: init.dir.canonical_direction(),
        levels,
        truncated,
    })
}

/// The defining geometry of compatibility, checked exactly: for every pair
/// of levels m < n, the open segment between the two initial basepoints
/// meets the finer boundary only at the finer basepoint.
pub fn verify_compatibility<T: Scalar>(
    tables: &[Table<T>],
    seq: &CompatSequence<T>,
) -> Result<(), CompatError> {
    for (i, coarse) in seq.levels.iter().enumerate() {
        for (j, fine) in seq.levels.iter().enumerate().skip(i + 1) {
            let xm = &coarse.init.point;
            let xn = &fine.init.point;
            if xm == xn {
                continue;
            }
            let table = &tables[j];
            let d = xn.to(xm);
            // crossings of the open segment (param strictly inside (0, 1))
            for id in table.side_ids() {
                let (a, b) = table.side(id);
                if let RayCast::Hit(h) = segment_intersect(xn, &d, a, b) {
                    if h.t <= T::one() {
                        return Err(CompatError::BadHypotheses(format!(
                            "segment between levels {} and {} crosses the level-{} boundary",
                            coarse.level, fine.level, fine.level
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exact equality of the traversed paths of two orbits.
fn same_path<T: Scalar>(a: &Orbit<T>, b: &Orbit<T>) -> bool {
    a.init.point == b.init.point
        && a.is_periodic() == b.is_periodic()
        && a.path_points() == b.path_points()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constancy {
    /// The traversed path is the same at every computed level >= this one.
    ConstantFrom(u32),
    NotConstantWithinDepth,
}

/// Smallest computed level from which the traversed path never changes.
pub fn detect_constancy<T: Scalar>(seq: &CompatSequence<T>) -> Constancy {
    let n = seq.levels.len();
    if n < 2 {
        return Constancy::NotConstantWithinDepth;
    }
    // index of the first level such that all later paths equal its path
    let mut from = n - 1;
    while from > 0 && same_path(&seq.levels[from - 1].orbit, &seq.levels[from].orbit) {
        from -= 1;
    }
    if from == n - 1 {
        Constancy::NotConstantWithinDepth
    } else {
        Constancy::ConstantFrom(seq.levels[from].level)
    }
}

// ---------------------------------------------------------------------------
// Hybrid orbits
// ---------------------------------------------------------------------------

/// The admissible representation types of a hybrid orbit's basepoints, as
/// patterns `(infinitely often, allowed finitely often)`.
const HYBRID_PATTERNS: [(&[Ch], &[Ch]); 5] = [
    (&[Ch::C], &[Ch::L, Ch::R]),
    (&[Ch::C, Ch::L], &[Ch::R]),
    (&[Ch::C, Ch::R], &[Ch::L]),
    (&[Ch::L, Ch::C, Ch::R], &[]),
    (&[Ch::L, Ch::R], &[]),
];

pub fn is_hybrid_type(t: &RepType) -> bool {
    HYBRID_PATTERNS.iter().any(|(inf, fin)| t.matches(inf, fin))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridVerdict {
    pub is_hybrid: bool,
    /// Representation type of each distinct basepoint's side address, in
    /// footprint order; `None` marks corners and unaddressable points.
    pub per_basepoint: Vec<Option<RepType>>,
    pub exceptions: usize,
}

/// Side-relative address of a bounce point: the arc parameter in [0, 1]
/// along the (counterclockwise) side containing it.
pub fn side_address<T: Scalar>(
    table: &Table<T>,
    contact: Contact,
    p: &Point2<T>,
) -> Option<BigRational> {
    match contact {
        Contact::Vertex(_) => None,
        Contact::Side(s) => {
            let (a, b) = table.side(s);
            let ab = a.to(b);
            let t = a.to(p).dot(&ab) / ab.norm_sq();
            t.as_rational()
        }
    }
}

/// Classify an orbit of a Koch prefractal as hybrid or not: all but at most
/// two distinct basepoints must have side addresses whose representation type
/// matches the admissible list.
pub fn classify_hybrid<T: Scalar>(table: &Table<T>, orbit: &Orbit<T>) -> HybridVerdict {
    let mut seen: Vec<Point2<T>> = Vec::new();
    let mut per_basepoint = Vec::new();
    let mut exceptions = 0usize;
    for b in &orbit.bounces {
        if seen.contains(&b.point) {
            continue;
        }
        seen.push(b.point.clone());
        let rt = side_address(table, b.contact, &b.point)
            .and_then(|x| ternary::address_of(&x).ok())
            .map(|a| ternary::rep_type(&a));
        let ok = rt.as_ref().map(is_hybrid_type).unwrap_or(false);
        if !ok {
            exceptions += 1;
        }
        per_basepoint.push(rt);
    }
    HybridVerdict {
        is_hybrid: exceptions <= 2,
        per_basepoint,
        exceptions,
    }
}

// ---------------------------------------------------------------------------
// Koch direction family with guaranteed periodic hybrid sequences
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoddVerdict {
    /// a, b positive integers, b odd, x0 = r/4^s with r odd, s >= 1.
    Part1,
    /// a = 1/2, b odd positive, x0 = r/2^s with r odd, s >= 1.
    Part2,
    NotApplicable,
}

/// Check the hypotheses pairing a lattice-rational direction with a dyadic
/// basepoint, and produce the exact direction vector `(2a + b, b sqrt3)`.
pub fn thm_bodd_condition(
    a: &BigRational,
    b: &BigRational,
    x0: &BigRational,
) -> (BoddVerdict, Vec2<QSqrt3>) {
    let dir = Vec2::new(
        QSqrt3::from_rational(BigRational::from_integer(BigInt::from(2)) * a + b),
        QSqrt3::new(BigRational::zero(), b.clone()),
    );
    let b_odd_positive = b.is_integer() && b.is_positive() && b.numer().is_odd();
    if !b_odd_positive {
        return (BoddVerdict::NotApplicable, dir);
    }
    let in_unit = x0.is_positive() && *x0 < BigRational::one();
    if !in_unit {
        return (BoddVerdict::NotApplicable, dir);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if a.is_integer() && a.is_positive() {
        // x0 = r/4^s in lowest terms means the denominator is a power of 4
        if is_power_of(x0.denom(), 4) {
            return (BoddVerdict::Part1, dir);
        }
    } else if *a == half && is_power_of(x0.denom(), 2) {
        return (BoddVerdict::Part2, dir);
    }
    (BoddVerdict::NotApplicable, dir)
}

fn is_power_of(n: &BigInt, base: u32) -> bool {
    let base = BigInt::from(base);
    let mut n = n.clone();
    if n <= BigInt::one() {
        return false;
    }
    while (&n % &base).is_zero() {
        n /= &base;
    }
    n.is_one()
}

// ---------------------------------------------------------------------------
// T-fractal slope admissibility
// ---------------------------------------------------------------------------

/// Decompose `x0 = t/3^k` with `t` coprime to 3; `None` when `x0` is not of
/// that form.
pub fn triadic_form(x0: &BigRational) -> Option<(BigInt, u32)> {
    if !x0.is_positive() {
        return None;
    }
    let mut d = x0.denom().clone();
    let three = BigInt::from(3);
    let mut k = 0u32;
    while (&d % &three).is_zero() {
        d /= &three;
        k += 1;
    }
    if !d.is_one() || k == 0 {
        return None;
    }
    Some((x0.numer().clone(), k))
}

/// Does the line `y = m (x - t/3^k)` pass through a dyadic point
/// `(p/2^r, q/2^s)`?  Writing `m = u/v` in lowest terms, clearing
/// denominators shows this happens exactly when `3^k` divides `u` while `v`
/// is prime to 3 (the slope family excluded by the admissibility theorem).
pub fn t_slope_forbidden(x0: &BigRational, m: &BigRational) -> Result<bool, CompatError> {
    let Some((_t, k)) = triadic_form(x0) else {
        return Err(CompatError::BadHypotheses(format!(
            "x0 = {x0} is not of the form t/3^k with t prime to 3"
        )));
    };
    let three = BigInt::from(3);
    let u = m.numer();
    let v = m.denom();
    if (v % &three).is_zero() {
        return Ok(false);
    }
    let pow = three.pow(k);
    Ok((u % pow).is_zero())
}

/// For a forbidden slope, produce a dyadic point on the line exactly.
pub fn t_slope_dyadic_witness(
    x0: &BigRational,
    m: &BigRational,
) -> Result<Option<(BigRational, BigRational)>, CompatError> {
    if !t_slope_forbidden(x0, m)? {
        return Ok(None);
    }
    let (t, k) = triadic_form(x0).expect("checked by t_slope_forbidden");
    let three_k = BigInt::from(3).pow(k);
    // strip the odd part of the denominator with a congruence on integer x
    let v = m.denom();
    let mut v_odd = v.clone();
    let two = BigInt::from(2);
    while (&v_odd % &two).is_zero() {
        v_odd /= &two;
    }
    let p = if v_odd.is_one() {
        BigInt::zero()
    } else {
        // p = t * (3^k)^-1 mod v_odd
        let inv =
            mod_inverse(&three_k, &v_odd).expect("3^k invertible modulo the odd, 3-free part");
        ((&t % &v_odd) * inv).mod_floor(&v_odd)
    };
    let x = BigRational::from_integer(p);
    let y = m * (&x - x0);
    debug_assert!(is_dyadic(&y), "witness ordinate must be dyadic");
    Ok(Some((x, y)))
}

pub fn is_dyadic(q: &BigRational) -> bool {
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    while (&d % &two).is_zero() {
        d /= &two;
    }
    d.is_one()
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(modulus);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(modulus))
    } else {
        None
    }
}

/// A slope from the excluded family of the admissibility theorem:
/// `m = q 2^(r-s) 3^k / (p 3^k - t 2^r)`.  `None` when the denominator
/// vanishes.
pub fn forbidden_family_slope(
    x0: &BigRational,
    p: i64,
    q: i64,
    r: u32,
    s: u32,
) -> Result<Option<BigRational>, CompatError> {
    let Some((t, k)) = triadic_form(x0) else {
        return Err(CompatError::BadHypotheses(format!("{x0} is not t/3^k")));
    };
    let three_k = BigInt::from(3).pow(k);
    let den = BigInt::from(p) * &three_k - t * BigInt::from(2).pow(r);
    if den.is_zero() {
        return Ok(None);
    }
    let num = BigInt::from(q) * BigInt::from(2).pow(r) * three_k;
    let m = BigRational::new(num, den) / BigRational::from_integer(BigInt::from(2).pow(s));
    Ok(Some(m))
}

// ---------------------------------------------------------------------------
// Cantor orbits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum CantorOrbitResult<T> {
    /// Every footprint point is a smooth fractal point of the limit; the
    /// orbit persists unchanged at all deeper levels and is an orbit of the
    /// fractal table itself.
    CantorOrbit(Orbit<T>),
    NotCantor {
        witness: Point2<T>,
    },
}

/// Decide whether the orbit of `init` is a Cantor orbit of the limit table.
pub fn cantor_orbit<T: Scalar>(
    table: &Table<T>,
    init: &InitialCondition<T>,
    budget: usize,
    depth: u32,
) -> Result<CantorOrbitResult<T>, CompatError> {
    let orbit = run_orbit(table, init, budget, CornerPolicy::ResolveRemovable)?;
    for b in &orbit.bounces {
        let class = crate::tables::classify_point(table, &b.point, depth);
        let ok = matches!(
            class,
            PointClass::CantorPoint | PointClass::SmoothFractalPoint
        );
        if !ok {
            return Ok(CantorOrbitResult::NotCantor {
                witness: b.point.clone(),
            });
        }
    }
    Ok(CantorOrbitResult::CantorOrbit(orbit))
}

// ---------------------------------------------------------------------------
// Nontrivial paths
// ---------------------------------------------------------------------------

/// A piecewise-linear path of per-level basepoints converging toward an
/// elusive point of the limit table.
#[derive(Debug, Clone)]
pub struct NontrivialPath<T> {
    pub vertices: Vec<(u32, Point2<T>)>,
    /// Squared gaps between consecutive vertices.
    pub gaps_sq: Vec<T>,
    /// Symbolic description of the elusive target.
    pub descriptor: String,
    /// Geometric-series extrapolation of the limit from the last gap.
    pub estimate: Point2<T>,
    /// Bound on the distance from the last vertex to the limit, squared.
    pub error_bound_sq: T,
}

fn finish_path<T: Scalar>(
    vertices: Vec<(u32, Point2<T>)>,
    contraction: &BigRational,
    descriptor: String,
) -> NontrivialPath<T> {
    let gaps_sq: Vec<T> = vertices
        .windows(2)
        .map(|w| w[0].1.dist_sq(&w[1].1))
        .collect();
    let (estimate, error_bound_sq) = if vertices.len() >= 2 {
        let last = &vertices[vertices.len() - 1].1;
        let prev = &vertices[vertices.len() - 2].1;
        // limit ~ last + (last - prev) * rho/(1 - rho); the distance to the
        // limit is below 2 * gap * rho/(1 - rho), the factor 2 absorbing the
        // mirror alternation of the per-level gaps
        let rho = T::from_rational(contraction.clone());
        let factor = rho.clone() / (T::one() - rho);
        let step = prev.to(last).scale(&factor);
        let est = last.translate(&step);
        let err = step.norm_sq().clone() * T::from_int(4);
        (est, err)
    } else {
        (vertices[0].1.clone(), T::zero())
    };
    NontrivialPath {
        vertices,
        gaps_sq,
        descriptor,
        estimate,
        error_bound_sq,
    }
}

/// Nontrivial path of the Koch snowflake: the per-level compatible initial
/// basepoints all lie on the line through the seed in the shared direction,
/// marching backward into ever deeper bumps.  Consecutive repeats (levels
/// where the lift persists) are collapsed, so the vertices are the distinct
/// stations of the march.  When the backward ray meets the limit curve at a
/// persistent (Cantor) point the march stops there; otherwise it decays
/// toward an elusive point.  Returns the path and its mirror twin
/// (direction pi - theta).
pub fn ks_nontrivial_path(
    tables: &[Table<QSqrt3>],
    seed: &InitialCondition<QSqrt3>,
    budget: usize,
) -> Result<(NontrivialPath<QSqrt3>, NontrivialPath<QSqrt3>), CompatError> {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let main = ks_path_one_direction(tables, seed, budget, &third)?;
    let mirrored = InitialCondition {
        point: seed.point.clone(),
        dir: Vec2::new(-seed.dir.x.clone(), seed.dir.y.clone()),
    };
    let twin = ks_path_one_direction(tables, &mirrored, budget, &third)?;
    Ok((main, twin))
}

fn ks_path_one_direction(
    tables: &[Table<QSqrt3>],
    seed: &InitialCondition<QSqrt3>,
    budget: usize,
    contraction: &BigRational,
) -> Result<NontrivialPath<QSqrt3>, CompatError> {
    let seq = build_sequence(tables, seed, budget)?;
    if let Some((level, why)) = &seq.truncated {
        return Err(CompatError::BadHypotheses(format!(
            "no compatible lift at level {level}: {why}"
        )));
    }
    for run in &seq.levels {
        if !run.orbit.is_periodic() {
            return Err(CompatError::NotPeriodic { level: run.level });
        }
    }
    let mut vertices: Vec<(u32, Point2<QSqrt3>)> = Vec::new();
    let mut stabilized = false;
    for r in &seq.levels {
        match vertices.last() {
            Some((_, p)) if *p == r.init.point => stabilized = true,
            _ => vertices.push((r.level, r.init.point.clone())),
        }
    }
    let descriptor =
        if stabilized && vertices.last().map(|(l, _)| *l) < seq.levels.last().map(|r| r.level) {
            "koch snowflake boundary point (backward ray meets a persistent smooth point)".into()
        } else {
            "koch snowflake elusive point".into()
        };
    Ok(finish_path(vertices, contraction, descriptor))
}

/// Nontrivial path of the T-fractal: each level's orbit climbs into the
/// newest generation of appendages; the vertex of level n is the orbit's
/// first bounce above the previous table's crown.  The vertices converge to
/// an elusive point at the top of the tree, with gaps contracting by exactly
/// one half per level in two-level strides (single steps alternate by the
/// mirror symmetry of the construction).  Returns the path and its mirror
/// twin (pi - theta).
pub fn t_nontrivial_path(
    tables: &[Table<BigRational>],
    seed: &InitialCondition<BigRational>,
    budget: usize,
) -> Result<(NontrivialPath<BigRational>, NontrivialPath<BigRational>), CompatError> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let main = t_path_one_direction(tables, seed, budget, &half)?;
    let mirrored = InitialCondition {
        point: seed.point.clone(),
        dir: Vec2::new(-seed.dir.x.clone(), seed.dir.y.clone()),
    };
    let twin = t_path_one_direction(tables, &mirrored, budget, &half)?;
    Ok((main, twin))
}

fn t_path_one_direction(
    tables: &[Table<BigRational>],
    seed: &InitialCondition<BigRational>,
    budget: usize,
    contraction: &BigRational,
) -> Result<NontrivialPath<BigRational>, CompatError> {
    let seq = build_sequence(tables, seed, budget)?;
    if let Some((level, why)) = &seq.truncated {
        return Err(CompatError::BadHypotheses(format!(
            "no compatible lift at level {level}: {why}"
        )));
    }
    let mut vertices = Vec::new();
    let mut prev_crown: Option<BigRational> = None;
    for (i, run) in seq.levels.iter().enumerate() {
        if !run.orbit.is_periodic() {
            return Err(CompatError::NotPeriodic { level: run.level });
        }
        let table = &tables[i];
        let crown = table
            .boundary()
            .points
            .iter()
            .map(|p| p.y.clone())
            .max()
            .expect("table has vertices");
        // the newest appendages lie strictly above the previous crown; at
        // the first level use the crown itself
        let found = match &prev_crown {
            Some(h) => run.orbit.bounces.iter().find(|b| b.point.y > *h),
            None => run.orbit.bounces.iter().find(|b| b.point.y == crown),
        };
        if let Some(b) = found {
            vertices.push((run.level, b.point.clone()));
        }
        prev_crown = Some(crown);
    }
    Ok(finish_path(
        vertices,
        contraction,
        "t-fractal elusive point on the crown".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{build_koch_snowflake, build_t_fractal};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn q3(n: i64, d: i64) -> QSqrt3 {
        QSqrt3::from_ratio(n, d)
    }

    fn ks_tables(depth: u32) -> Vec<Table<QSqrt3>> {
        (0..=depth).map(build_koch_snowflake).collect()
    }

    fn pi3_dir() -> Vec2<QSqrt3> {
        Vec2::new(QSqrt3::from_int(1), QSqrt3::sqrt3())
    }

    #[test]
    fn same_level_lift_is_identity() {
        let tables = ks_tables(0);
        let init = InitialCondition {
            point: Point2::new(q3(1, 4), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let lifted = lift_initial(&tables[0], &init).unwrap();
        assert_eq!(lifted.point, init.point);
    }

    #[test]
    fn cantor_point_lift_is_identity_at_every_level() {
        // 1/4 = (lr) persists on every KS_n
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(1, 4), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        for t in &tables {
            let lifted = lift_initial(t, &init).unwrap();
            assert_eq!(lifted.point, init.point);
        }
    }

    #[test]
    fn midpoint_lifts_into_the_base_bump() {
        // 1/2 = (c) sits over the removed middle third; its level-1 lift is
        // the midpoint of the left bump side below the base.
        let tables = ks_tables(1);
        let init = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let lifted = lift_initial(&tables[1], &init).unwrap();
        assert_eq!(
            lifted.point,
            Point2::new(q3(5, 12), QSqrt3::sqrt3_times(-1, 12))
        );
    }

    #[test]
    fn seven_twelfths_sequence_is_constant_from_level_one() {
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(7, 12), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let seq = build_sequence(&tables, &init, 512).unwrap();
        assert!(seq.truncated.is_none());
        for run in &seq.levels {
            assert!(run.orbit.is_periodic(), "level {} not periodic", run.level);
        }
        assert_eq!(detect_constancy(&seq), Constancy::ConstantFrom(1));
    }

    #[test]
    fn quarter_sequence_has_identical_footprints() {
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(1, 4), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let seq = build_sequence(&tables, &init, 512).unwrap();
        assert_eq!(detect_constancy(&seq), Constancy::ConstantFrom(0));
        let base = seq.levels[0].orbit.path_points();
        for run in &seq.levels {
            assert_eq!(run.orbit.path_points(), base);
        }
    }

    #[test]
    fn vertical_orbit_from_three_quarters_goes_constant_at_level_one() {
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(3, 4), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::zero(), QSqrt3::from_int(1)),
        };
        let seq = build_sequence(&tables, &init, 64).unwrap();
        assert_eq!(detect_constancy(&seq), Constancy::ConstantFrom(1));
        // at level 1 the path is the vertical chord of period 2
        let o1 = &seq.levels[1].orbit;
        assert_eq!(o1.period(), Some(2));
        assert_eq!(
            o1.path_points()[1],
            Point2::new(q3(3, 4), QSqrt3::sqrt3_times(1, 3))
        );
    }

    #[test]
    fn fagnano_is_hybrid() {
        let t = build_koch_snowflake(0);
        let init = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let o = run_orbit(&t, &init, 16, CornerPolicy::default()).unwrap();
        let v = classify_hybrid(&t, &o);
        assert!(v.is_hybrid);
        assert_eq!(v.exceptions, 0);
    }

    #[test]
    fn orbit_through_ternary_basepoints_is_not_hybrid() {
        // from 1/2 toward the lower-third endpoint of the right side the
        // orbit passes through corners and ternary basepoints: more than
        // two exceptions
        let t = build_koch_snowflake(0);
        let init = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::from_int(2), QSqrt3::sqrt3()),
        };
        let o = run_orbit(&t, &init, 64, CornerPolicy::ResolveRemovable).unwrap();
        assert!(o.is_periodic());
        let v = classify_hybrid(&t, &o);
        assert!(!v.is_hybrid);
        assert!(v.exceptions >= 3);
    }

    #[test]
    fn path_at_seed_depth_has_a_single_vertex() {
        let tables = ks_tables(0);
        let seed = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::from_int(5), QSqrt3::sqrt3()),
        };
        let (main, twin) = ks_nontrivial_path(&tables, &seed, 64).unwrap();
        assert_eq!(main.vertices.len(), 1);
        assert!(main.gaps_sq.is_empty());
        assert_eq!(main.estimate, seed.point);
        assert_eq!(twin.vertices.len(), 1);
    }

    #[test]
    fn bodd_condition_cases() {
        let (v, d) = thm_bodd_condition(&q(1, 2), &q(1, 1), &q(1, 2));
        assert_eq!(v, BoddVerdict::Part2);
        assert_eq!(d, Vec2::new(QSqrt3::from_int(2), QSqrt3::sqrt3()));
        let (v, d) = thm_bodd_condition(&q(1, 1), &q(1, 1), &q(1, 4));
        assert_eq!(v, BoddVerdict::Part1);
        assert_eq!(d, Vec2::new(QSqrt3::from_int(3), QSqrt3::sqrt3()));
        let (v, _) = thm_bodd_condition(&q(1, 1), &q(2, 1), &q(1, 4));
        assert_eq!(v, BoddVerdict::NotApplicable);
        // 1/2 = 2/4 has even numerator over a power of 4: not Part 1
        let (v, _) = thm_bodd_condition(&q(2, 1), &q(1, 1), &q(1, 2));
        assert_eq!(v, BoddVerdict::NotApplicable);
    }

    #[test]
    fn forbidden_slopes_on_the_t_fractal() {
        let x0 = q(1, 3);
        // 3/2 = 1*3 / (1*3 - 1*1) with p=q=1, r=s=0: forbidden
        assert!(t_slope_forbidden(&x0, &q(3, 2)).unwrap());
        let w = t_slope_dyadic_witness(&x0, &q(3, 2)).unwrap().unwrap();
        // the witness is a dyadic point on the line
        let y = q(3, 2) * (&w.0 - &x0);
        assert_eq!(y, w.1);
        assert!(is_dyadic(&w.1));
        // powers of two over odd powers are never forbidden
        assert!(!t_slope_forbidden(&x0, &q(2, 1)).unwrap());
        assert!(!t_slope_forbidden(&x0, &q(4, 3)).unwrap());
        assert!(!t_slope_forbidden(&x0, &q(1, 1)).unwrap());
    }

    #[test]
    fn family_slopes_are_forbidden_with_witnesses() {
        let x0 = q(1, 3);
        for (p, qq, r, s) in [
            (1i64, 1i64, 0u32, 0u32),
            (2, 3, 1, 0),
            (1, 2, 2, 1),
            (-1, 5, 0, 2),
        ] {
            if let Some(m) = forbidden_family_slope(&x0, p, qq, r, s).unwrap() {
                if m.is_zero() {
                    continue;
                }
                assert!(t_slope_forbidden(&x0, &m).unwrap(), "m = {m}");
                let w = t_slope_dyadic_witness(&x0, &m).unwrap().unwrap();
                assert!(is_dyadic(&w.0) && is_dyadic(&w.1));
            }
        }
    }

    #[test]
    fn t_fractal_pi4_sequence_is_periodic_and_nonconstant() {
        let tables: Vec<_> = (0..=2).map(build_t_fractal).collect();
        let init = InitialCondition {
            point: Point2::new(q(4, 3), q(0, 1)),
            dir: Vec2::new(q(1, 1), q(1, 1)),
        };
        let seq = build_sequence(&tables, &init, 4096).unwrap();
        assert!(seq.truncated.is_none());
        for run in &seq.levels {
            assert!(run.orbit.is_periodic(), "level {} not periodic", run.level);
        }
        assert_eq!(seq.levels[0].orbit.period(), Some(14));
        assert_eq!(detect_constancy(&seq), Constancy::NotConstantWithinDepth);
    }

    #[test]
    fn cantor_orbit_detection() {
        let t = build_koch_snowflake(0);
        let quarter = InitialCondition {
            point: Point2::new(q3(1, 4), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        match cantor_orbit(&t, &quarter, 64, 4).unwrap() {
            CantorOrbitResult::CantorOrbit(o) => assert_eq!(o.period(), Some(6)),
            CantorOrbitResult::NotCantor { witness } => panic!("unexpected witness {witness:?}"),
        }
        let half = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        assert!(matches!(
            cantor_orbit(&t, &half, 64, 4).unwrap(),
            CantorOrbitResult::NotCantor { .. }
        ));
    }

    #[test]
    fn hook_seed_is_not_a_cantor_orbit() {
        // the hook's right-angle basepoints carry infinitely many c's, so
        // they are not Cantor points; the limit object is a finite-length
        // path, not a Cantor orbit
        let t = build_koch_snowflake(0);
        let hook = InitialCondition {
            point: Point2::new(q3(3, 4), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::sqrt3(), QSqrt3::from_int(1)),
        };
        match cantor_orbit(&t, &hook, 64, 4).unwrap() {
            CantorOrbitResult::NotCantor { witness } => {
                // the witness is one of the two perpendicular feet
                assert!(witness.y != QSqrt3::zero());
            }
            CantorOrbitResult::CantorOrbit(_) => panic!("hook seed misclassified"),
        }
    }

    #[test]
    fn ternary_seed_sequence_turns_singular() {
        // a basepoint whose address ends in all-r (a ternary number) sits on
        // a vertex of the next level; its pi/3 sequence is periodic at level
        // zero and singular from level one on
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(1, 3), QSqrt3::zero()),
            dir: pi3_dir(),
        };
        let seq = build_sequence(&tables, &init, 4096).unwrap();
        assert_eq!(seq.levels[0].orbit.period(), Some(6));
        for run in &seq.levels[1..] {
            assert!(
                matches!(
                    run.orbit.status,
                    crate::billiard::OrbitStatus::ClosedSingular
                        | crate::billiard::OrbitStatus::SaddleConnection
                ),
                "level {} should be singular",
                run.level
            );
        }
    }

    #[test]
    fn compatibility_geometry_is_verified() {
        let tables = ks_tables(3);
        let init = InitialCondition {
            point: Point2::new(q3(1, 2), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::from_int(5), QSqrt3::sqrt3()),
        };
        let seq = build_sequence(&tables, &init, 4096).unwrap();
        verify_compatibility(&tables, &seq).unwrap();
    }
}
