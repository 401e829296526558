//! Exact-arithmetic billiards on prefractal tables.
//!
//! Three families of rational billiard tables are built level by level: the
//! Koch snowflake approximations over Q(sqrt 3), and the T-fractal and
//! self-similar Sierpinski carpet approximations over Q.  Orbits, unfoldings,
//! compatible-orbit sequences across levels, carpet slope sets and nontrivial
//! paths toward elusive points are all computed without floating point, so
//! corner incidence and periodicity are decided exactly.

pub mod billiard;
pub mod carpet;
pub mod compat;
pub mod geom;
pub mod ifs;
pub mod json;
pub mod qsqrt3;
pub mod scalar;
pub mod svg;
pub mod tables;
pub mod ternary;
pub mod unfold;

pub use num_rational::BigRational;

/// The rational scalar used by the rectilinear families.
pub type Q = num_rational::BigRational;
/// The quadratic-field scalar used by the Koch family.
pub type Q3 = qsqrt3::QSqrt3;

/// Points and vectors at the two coordinate fields.
pub type QPoint = geom::Point2<Q>;
pub type QVec = geom::Vec2<Q>;
pub type Q3Point = geom::Point2<Q3>;
pub type Q3Vec = geom::Vec2<Q3>;
