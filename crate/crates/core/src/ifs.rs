//! Iterated function systems: the contractions generating the Koch curve and
//! the Sierpinski carpets, and their finite iterates on polygons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::geom::{Point2, Vec2};
use crate::qsqrt3::QSqrt3;
use crate::scalar::Scalar;
use crate::tables::TableError;

/// One contraction `x -> scale * R x + translation` with `R` one of the
/// exact rotations by 0 or +-pi/3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfsMap<T> {
    pub scale: BigRational,
    /// Row-major linear part (scale times rotation), exact.
    pub linear: [T; 4],
    pub translation: Vec2<T>,
}

impl<T: Scalar> IfsMap<T> {
    pub fn similarity(scale: BigRational, rotation_sixths: i8, translation: Vec2<T>) -> Self {
        let s = T::from_rational(scale.clone());
        let (c, sn): (T, T) = match rotation_sixths {
            0 => (T::one(), T::zero()),
            // +pi/3
            2 => (
                T::from_ratio(1, 2),
                T::sqrt3().expect("rotation by pi/3 needs sqrt3") / T::from_int(2),
            ),
            // -pi/3
            -2 => (
                T::from_ratio(1, 2),
                -(T::sqrt3().expect("rotation by pi/3 needs sqrt3") / T::from_int(2)),
            ),
            other => panic!("unsupported rotation {other} pi/6"),
        };
        let linear = [
            s.clone() * c.clone(),
            s.clone() * -sn.clone(),
            s.clone() * sn,
            s * c,
        ];
        IfsMap {
            scale,
            linear,
            translation,
        }
    }

    pub fn apply(&self, p: &Point2<T>) -> Point2<T> {
        Point2::new(
            self.linear[0].clone() * p.x.clone()
                + self.linear[1].clone() * p.y.clone()
                + self.translation.x.clone(),
            self.linear[2].clone() * p.x.clone()
                + self.linear[3].clone() * p.y.clone()
                + self.translation.y.clone(),
        )
    }

    pub fn apply_polygon(&self, poly: &[Point2<T>]) -> Vec<Point2<T>> {
        poly.iter().map(|p| self.apply(p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfsSystem<T> {
    pub maps: Vec<IfsMap<T>>,
}

/// The four-map system whose attractor is the Koch curve over the unit
/// segment: thirds at rotations 0, +pi/3, -pi/3, 0.
pub fn koch_ifs() -> IfsSystem<QSqrt3> {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let maps = vec![
        IfsMap::similarity(third.clone(), 0, Vec2::new(QSqrt3::zero(), QSqrt3::zero())),
        IfsMap::similarity(
            third.clone(),
            2,
            Vec2::new(QSqrt3::from_ratio(1, 3), QSqrt3::zero()),
        ),
        // carries the peak (1/2, sqrt3/6) onto the third quarter of the motif
        IfsMap::similarity(
            third.clone(),
            -2,
            Vec2::new(QSqrt3::from_ratio(1, 2), QSqrt3::sqrt3_times(1, 6)),
        ),
        IfsMap::similarity(
            third,
            0,
            Vec2::new(QSqrt3::from_ratio(2, 3), QSqrt3::zero()),
        ),
    ];
    IfsSystem { maps }
}

/// The `a^2 - 1` maps of the self-similar carpet `S_a`: all cells of the
/// `a x a` grid except the middle one, each scaled by `1/a`.
pub fn carpet_ifs(a: u32) -> Result<IfsSystem<BigRational>, TableError> {
    if a < 3 || a.is_multiple_of(2) {
        return Err(TableError::BadCarpetParameter(a));
    }
    let inv = BigRational::new(BigInt::one(), BigInt::from(a));
    let mid = (a - 1) / 2;
    let mut maps = Vec::new();
    for row in 0..a {
        for col in 0..a {
            if row == mid && col == mid {
                continue;
            }
            let t = Vec2::new(
                &inv * BigRational::from_integer(BigInt::from(col)),
                &inv * BigRational::from_integer(BigInt::from(row)),
            );
            maps.push(IfsMap::similarity(inv.clone(), 0, t));
        }
    }
    Ok(IfsSystem { maps })
}

/// The m-th iterate of the system on a seed polygon: the union over all
/// length-m compositions, as a list of image polygons.
pub fn ifs_iterate<T: Scalar>(
    sys: &IfsSystem<T>,
    seed: &[Point2<T>],
    m: u32,
) -> Vec<Vec<Point2<T>>> {
    let mut shapes = vec![seed.to_vec()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(shapes.len() * sys.maps.len());
        for map in &sys.maps {
            for shape in &shapes {
                next.push(map.apply_polygon(shape));
            }
        }
        shapes = next;
    }
    shapes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zeroth_iterate_is_the_seed() {
        let sys = koch_ifs();
        let seg = vec![
            Point2::new(QSqrt3::zero(), QSqrt3::zero()),
            Point2::new(QSqrt3::from_int(1), QSqrt3::zero()),
        ];
        let it = ifs_iterate(&sys, &seg, 0);
        assert_eq!(it, vec![seg]);
    }

    #[test]
    fn koch_motif_from_unit_segment() {
        let sys = koch_ifs();
        let seg = vec![
            Point2::new(QSqrt3::zero(), QSqrt3::zero()),
            Point2::new(QSqrt3::from_int(1), QSqrt3::zero()),
        ];
        let it = ifs_iterate(&sys, &seg, 1);
        assert_eq!(it.len(), 4);
        // each image has squared length 1/9
        for s in &it {
            assert_eq!(s[0].dist_sq(&s[1]), QSqrt3::from_ratio(1, 9));
        }
        // the four segments chain through the motif points
        let peak = Point2::new(QSqrt3::from_ratio(1, 2), QSqrt3::sqrt3_times(1, 6));
        assert_eq!(
            it[0][1],
            Point2::new(QSqrt3::from_ratio(1, 3), QSqrt3::zero())
        );
        assert_eq!(it[1][0], it[0][1]);
        assert_eq!(it[1][1], peak);
        assert_eq!(it[2][0], peak);
        assert_eq!(
            it[2][1],
            Point2::new(QSqrt3::from_ratio(2, 3), QSqrt3::zero())
        );
        assert_eq!(it[3][0], it[2][1]);
        assert_eq!(it[3][1], Point2::new(QSqrt3::from_int(1), QSqrt3::zero()));
    }

    #[test]
    fn second_koch_iterate_has_sixteen_segments() {
        let sys = koch_ifs();
        let seg = vec![
            Point2::new(QSqrt3::zero(), QSqrt3::zero()),
            Point2::new(QSqrt3::from_int(1), QSqrt3::zero()),
        ];
        let it = ifs_iterate(&sys, &seg, 2);
        assert_eq!(it.len(), 16);
        for s in &it {
            assert_eq!(s[0].dist_sq(&s[1]), QSqrt3::from_ratio(1, 81));
        }
    }

    #[test]
    fn carpet_first_iterate_is_eight_squares() {
        let sys = carpet_ifs(3).unwrap();
        assert_eq!(sys.maps.len(), 8);
        let unit = vec![
            Point2::new(q(0, 1), q(0, 1)),
            Point2::new(q(1, 1), q(0, 1)),
            Point2::new(q(1, 1), q(1, 1)),
            Point2::new(q(0, 1), q(1, 1)),
        ];
        let it = ifs_iterate(&sys, &unit, 1);
        assert_eq!(it.len(), 8);
        // none of the images covers the removed middle cell
        for s in &it {
            let hits_middle_center = s
                .iter()
                .any(|p| p.x > q(1, 3) && p.x < q(2, 3) && p.y > q(1, 3) && p.y < q(2, 3));
            assert!(!hits_middle_center);
        }
        // the images tile: total area is 8/9
        let total: BigRational = it
            .iter()
            .map(|s| crate::geom::polygon_area_doubled(s) / q(2, 1))
            .fold(q(0, 1), |acc, x| acc + x);
        assert_eq!(total, q(8, 9));
    }

    #[test]
    fn carpet_ifs_rejects_even() {
        assert!(carpet_ifs(4).is_err());
    }
}
