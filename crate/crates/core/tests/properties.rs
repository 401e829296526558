//! Property tests for the exact-arithmetic invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use prefractal_billiards::billiard::{
    billiard_step, run_orbit, CornerPolicy, InitialCondition, OrbitStatus, Step,
};
use prefractal_billiards::geom::{segment_intersect, Point2, RayCast, Vec2};
use prefractal_billiards::qsqrt3::QSqrt3;
use prefractal_billiards::scalar::Sign;
use prefractal_billiards::tables::{build_carpet, build_koch_snowflake, build_t_fractal};
use prefractal_billiards::ternary::{address_of, value_of};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn arb_q3() -> impl Strategy<Value = QSqrt3> {
    (-40i64..=40, 1i64..=12, -40i64..=40, 1i64..=12)
        .prop_map(|(an, ad, bn, bd)| QSqrt3::new(q(an, ad), q(bn, bd)))
}

proptest! {
    #[test]
    fn field_inverse_is_exact(v in arb_q3()) {
        prop_assume!(!v.is_zero());
        let inv = v.checked_inv().unwrap();
        prop_assert_eq!(v * inv, QSqrt3::one());
    }

    #[test]
    fn sign_is_consistent_with_subtraction(x in arb_q3(), y in arb_q3()) {
        let diff_sign = (x.clone() - y.clone()).sign();
        match diff_sign {
            Sign::Positive => prop_assert!(x > y),
            Sign::Zero => prop_assert_eq!(x, y),
            Sign::Negative => prop_assert!(x < y),
        }
    }

    #[test]
    fn mirror_is_an_involution(
        dx in -20i64..=20, dy in -20i64..=20,
        ax in -20i64..=20, ay in -20i64..=20,
    ) {
        prop_assume!((dx, dy) != (0, 0) && (ax, ay) != (0, 0));
        let d = Vec2::new(q(dx, 1), q(dy, 1));
        let axis = Vec2::new(q(ax, 1), q(ay, 1));
        prop_assert_eq!(d.mirror(&axis).mirror(&axis), d);
    }

    #[test]
    fn ternary_round_trip(num in 0i64..=4000, den in 1i64..=4000) {
        prop_assume!(num <= den);
        let x = q(num, den);
        let a = address_of(&x).unwrap();
        prop_assert_eq!(value_of(&a), x);
    }

    #[test]
    fn ternary_shift_is_times_three_mod_one(num in 1i64..=999, den in 2i64..=1000) {
        prop_assume!(num < den);
        let x = q(num, den);
        let a = address_of(&x).unwrap();
        let three_x = &x * q(3, 1);
        let mut frac = &three_x - three_x.floor();
        // addresses never terminate, so a point landing exactly on an
        // integer keeps the value 1 rather than wrapping to 0
        if frac.is_zero() {
            frac = q(1, 1);
        }
        prop_assert_eq!(value_of(&a.shift()), frac);
    }
}

/// The step really returns the minimal positive ray parameter: no other side
/// intersects the ray strictly earlier.
#[test]
fn step_returns_the_first_collision() {
    let tables = [build_carpet(3, 1).unwrap(), build_t_fractal(1)];
    let starts = [
        (q(1, 7), q(0, 1), q(2, 1), q(3, 1)),
        (q(2, 5), q(0, 1), q(5, 1), q(1, 1)),
        (q(1, 3), q(0, 1), q(1, 1), q(4, 1)),
    ];
    for table in &tables {
        for (x, y, dx, dy) in &starts {
            let p = Point2::new(x.clone(), y.clone());
            let d = Vec2::new(dx.clone(), dy.clone());
            let step = billiard_step(table, &p, &d).unwrap();
            let t_hit = match &step {
                Step::Side { point, .. } | Step::Corner { point, .. } => {
                    // recover the parameter from the x displacement
                    (point.x.clone() - p.x.clone()) / d.x.clone()
                }
            };
            for id in table.side_ids() {
                let (a, b) = table.side(id);
                if let RayCast::Hit(h) = segment_intersect(&p, &d, a, b) {
                    assert!(
                        h.t >= t_hit,
                        "side {id:?} hit earlier than the reported step"
                    );
                }
            }
        }
    }
}

/// Rational-direction orbits on small tables close or die at a corner; none
/// wander forever (the testable half of the dichotomy).
#[test]
fn rational_directions_close_or_die() {
    let ks = build_koch_snowflake(1);
    for (m, n) in [(1i64, 1i64), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2)] {
        let init = InitialCondition {
            point: Point2::new(QSqrt3::from_ratio(2, 7), QSqrt3::zero()),
            dir: Vec2::new(
                QSqrt3::from_int(2 * m + n),
                QSqrt3::new(BigRational::zero(), q(n, 1)),
            ),
        };
        let o = run_orbit(&ks, &init, 1 << 14, CornerPolicy::ResolveRemovable).unwrap();
        assert_ne!(o.status, OrbitStatus::BudgetExhausted, "KS dir ({m},{n})");
    }
    let t1 = build_t_fractal(1);
    for (p, s) in [(1i64, 1i64), (2, 1), (1, 2), (3, 2), (2, 3), (4, 1)] {
        let init = InitialCondition {
            point: Point2::new(q(4, 3), q(0, 1)),
            dir: Vec2::new(q(p, 1), q(s, 1)),
        };
        let o = run_orbit(&t1, &init, 1 << 15, CornerPolicy::ResolveRemovable).unwrap();
        assert_ne!(o.status, OrbitStatus::BudgetExhausted, "T dir ({p},{s})");
    }
}

/// Sequences of compatible orbits have homogeneous behavior: a rational
/// lattice direction closes (or dies at a corner) at every level, while an
/// irrational one never closes at any level.
#[test]
fn sequence_statuses_are_homogeneous() {
    use prefractal_billiards::compat::build_sequence;
    let tables: Vec<_> = (0..=2).map(build_koch_snowflake).collect();
    // rational direction: every level closes or dies
    let init = InitialCondition {
        point: Point2::new(QSqrt3::from_ratio(2, 7), QSqrt3::zero()),
        dir: Vec2::new(QSqrt3::from_int(1), QSqrt3::sqrt3()),
    };
    let seq = build_sequence(&tables, &init, 1 << 14).unwrap();
    for run in &seq.levels {
        assert_ne!(run.orbit.status, OrbitStatus::BudgetExhausted);
    }
    // irrational lattice direction: no level closes within the budget
    for (n, d) in [(1i64, 7i64), (2, 7), (3, 11)] {
        let init = InitialCondition {
            point: Point2::new(QSqrt3::from_ratio(n, d), QSqrt3::zero()),
            dir: Vec2::new(QSqrt3::from_int(1), QSqrt3::from_int(1)),
        };
        let seq = build_sequence(&tables, &init, 2000).unwrap();
        assert_eq!(seq.levels.len(), 3);
        for run in &seq.levels {
            assert_eq!(run.orbit.status, OrbitStatus::BudgetExhausted);
        }
    }
}

/// The reported period is minimal: no intermediate state equals the start.
#[test]
fn reported_period_is_minimal() {
    let sq = build_carpet(3, 0).unwrap();
    let init = InitialCondition {
        point: Point2::new(q(1, 3), q(0, 1)),
        dir: Vec2::new(q(3, 1), q(4, 1)),
    };
    let o = run_orbit(&sq, &init, 1 << 12, CornerPolicy::ResolveRemovable).unwrap();
    let m = o.period().expect("periodic");
    assert_eq!(o.bounces.len(), m);
    let start = (
        o.bounces[0].point.clone(),
        o.bounces[0].outgoing.clone().unwrap(),
    );
    for b in o.bounces.iter().skip(1) {
        let state = (b.point.clone(), b.outgoing.clone().unwrap());
        assert_ne!(state, start, "period not minimal");
    }
}
