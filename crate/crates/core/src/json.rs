//! JSON interchange with exact rationals: every scalar travels as integer
//! strings `{num, den, sqrt3num, sqrt3den}` so files stay diff-stable and
//! lossless.  Floats appear only in the SVG layer, never here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::billiard::{Bounce, Contact, InitialCondition, Orbit, OrbitStatus};
use crate::compat::{CompatSequence, Constancy, NontrivialPath};
use crate::geom::{Point2, Vec2};
use crate::scalar::Scalar;
use crate::tables::{Family, SideId, Table, VertexInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("malformed integer string: {0}")]
    BadInteger(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("value has a sqrt3 part but the target field is rational")]
    NotRational,
    #[error("serde failure: {0}")]
    Serde(String),
}

/// An exact field element `num/den + (sqrt3num/sqrt3den) * sqrt(3)`, with all
/// four integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactNum {
    pub num: String,
    pub den: String,
    pub sqrt3num: String,
    pub sqrt3den: String,
}

impl ExactNum {
    pub fn from_scalar<T: Scalar>(v: &T) -> Self {
        let a = v.rational_part();
        let b = v.sqrt3_part();
        ExactNum {
            num: a.numer().to_string(),
            den: a.denom().to_string(),
            sqrt3num: b.numer().to_string(),
            sqrt3den: b.denom().to_string(),
        }
    }

    pub fn to_scalar<T: Scalar>(&self) -> Result<T, JsonError> {
        let parse = |s: &str| -> Result<BigInt, JsonError> {
            s.parse().map_err(|_| JsonError::BadInteger(s.to_string()))
        };
        let num = parse(&self.num)?;
        let den = parse(&self.den)?;
        let snum = parse(&self.sqrt3num)?;
        let sden = parse(&self.sqrt3den)?;
        if den.is_zero() || sden.is_zero() {
            return Err(JsonError::ZeroDenominator);
        }
        let a = BigRational::new(num, den);
        let b = BigRational::new(snum, sden);
        if b.is_zero() {
            return Ok(T::from_rational(a));
        }
        let sqrt3 = T::sqrt3().ok_or(JsonError::NotRational)?;
        Ok(T::from_rational(a) + sqrt3 * T::from_rational(b))
    }

    pub fn from_rational(q: &BigRational) -> Self {
        ExactNum {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
            sqrt3num: "0".into(),
            sqrt3den: "1".into(),
        }
    }

    pub fn to_rational(&self) -> Result<BigRational, JsonError> {
        let v: BigRational = self.to_scalar()?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub x: ExactNum,
    pub y: ExactNum,
}

impl PointJson {
    pub fn from_point<T: Scalar>(p: &Point2<T>) -> Self {
        PointJson {
            x: ExactNum::from_scalar(&p.x),
            y: ExactNum::from_scalar(&p.y),
        }
    }

    pub fn to_point<T: Scalar>(&self) -> Result<Point2<T>, JsonError> {
        Ok(Point2::new(self.x.to_scalar()?, self.y.to_scalar()?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VecJson {
    pub x: ExactNum,
    pub y: ExactNum,
}

impl VecJson {
    pub fn from_vec<T: Scalar>(v: &Vec2<T>) -> Self {
        VecJson {
            x: ExactNum::from_scalar(&v.x),
            y: ExactNum::from_scalar(&v.y),
        }
    }

    pub fn to_vec<T: Scalar>(&self) -> Result<Vec2<T>, JsonError> {
        Ok(Vec2::new(self.x.to_scalar()?, self.y.to_scalar()?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableJson {
    pub family: Family,
    pub level: u32,
    pub cell_scale: ExactNum,
    pub boundary: Vec<PointJson>,
    pub boundary_vertex_types: Vec<VertexInfo>,
    pub obstacles: Vec<Vec<PointJson>>,
    pub side_count: usize,
    pub area: ExactNum,
}

pub fn table_to_json<T: Scalar>(t: &Table<T>) -> TableJson {
    TableJson {
        family: t.family,
        level: t.level,
        cell_scale: ExactNum::from_rational(&t.cell_scale),
        boundary: t
            .boundary()
            .points
            .iter()
            .map(PointJson::from_point)
            .collect(),
        boundary_vertex_types: t.boundary().vertex_info.clone(),
        obstacles: t
            .obstacles()
            .iter()
            .map(|l| l.points.iter().map(PointJson::from_point).collect())
            .collect(),
        side_count: t.side_count(),
        area: ExactNum::from_scalar(&t.area()),
    }
}

/// Rebuild the exact vertex lists from a table file.
#[allow(clippy::type_complexity)]
pub fn table_points_from_json<T: Scalar>(
    j: &TableJson,
) -> Result<(Vec<Point2<T>>, Vec<Vec<Point2<T>>>), JsonError> {
    let boundary = j
        .boundary
        .iter()
        .map(|p| p.to_point())
        .collect::<Result<_, _>>()?;
    let obstacles = j
        .obstacles
        .iter()
        .map(|l| l.iter().map(|p| p.to_point()).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    Ok((boundary, obstacles))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BounceJson {
    pub point: PointJson,
    pub incoming: VecJson,
    pub outgoing: Option<VecJson>,
    /// Side contact as (loop, segment); corner contacts carry the vertex.
    pub side: Option<SideId>,
    pub vertex: Option<crate::tables::VertexId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitJson {
    pub init_point: PointJson,
    pub init_dir: VecJson,
    pub footprint: Vec<BounceJson>,
    pub status: OrbitStatus,
    pub period: Option<usize>,
}

pub fn orbit_to_json<T: Scalar>(o: &Orbit<T>) -> OrbitJson {
    OrbitJson {
        init_point: PointJson::from_point(&o.init.point),
        init_dir: VecJson::from_vec(&o.init.dir),
        footprint: o
            .bounces
            .iter()
            .map(|b| BounceJson {
                point: PointJson::from_point(&b.point),
                incoming: VecJson::from_vec(&b.incoming),
                outgoing: b.outgoing.as_ref().map(VecJson::from_vec),
                side: match b.contact {
                    Contact::Side(s) => Some(s),
                    Contact::Vertex(_) => None,
                },
                vertex: match b.contact {
                    Contact::Vertex(v) => Some(v),
                    Contact::Side(_) => None,
                },
            })
            .collect(),
        status: o.status.clone(),
        period: o.period(),
    }
}

pub fn orbit_from_json<T: Scalar>(j: &OrbitJson) -> Result<Orbit<T>, JsonError> {
    let init = InitialCondition {
        point: j.init_point.to_point()?,
        dir: j.init_dir.to_vec()?,
    };
    let mut bounces = Vec::with_capacity(j.footprint.len());
    for b in &j.footprint {
        let contact = match (b.side, b.vertex) {
            (Some(s), _) => Contact::Side(s),
            (None, Some(v)) => Contact::Vertex(v),
            (None, None) => Contact::Side(SideId {
                loop_idx: 0,
                seg: 0,
            }),
        };
        bounces.push(Bounce {
            point: b.point.to_point()?,
            incoming: b.incoming.to_vec()?,
            outgoing: b.outgoing.as_ref().map(|v| v.to_vec()).transpose()?,
            contact,
        });
    }
    Ok(Orbit {
        init,
        bounces,
        status: j.status.clone(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceLevelJson {
    pub level: u32,
    pub init_point: PointJson,
    pub status: OrbitStatus,
    pub period: Option<usize>,
    pub footprint: Vec<PointJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceJson {
    pub start_level: u32,
    pub direction: VecJson,
    pub levels: Vec<SequenceLevelJson>,
    pub truncated: Option<(u32, String)>,
    pub constancy: Constancy,
}

pub fn sequence_to_json<T: Scalar>(seq: &CompatSequence<T>, constancy: Constancy) -> SequenceJson {
    SequenceJson {
        start_level: seq.start_level,
        direction: VecJson::from_vec(&seq.direction),
        levels: seq
            .levels
            .iter()
            .map(|r| SequenceLevelJson {
                level: r.level,
                init_point: PointJson::from_point(&r.init.point),
                status: r.orbit.status.clone(),
                period: r.orbit.period(),
                footprint: r
                    .orbit
                    .path_points()
                    .iter()
                    .map(PointJson::from_point)
                    .collect(),
            })
            .collect(),
        truncated: seq.truncated.clone(),
        constancy,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathJson {
    pub descriptor: String,
    pub vertices: Vec<(u32, PointJson)>,
    pub gaps_sq: Vec<ExactNum>,
    pub estimate: PointJson,
    pub error_bound_sq: ExactNum,
}

pub fn path_to_json<T: Scalar>(p: &NontrivialPath<T>) -> PathJson {
    PathJson {
        descriptor: p.descriptor.clone(),
        vertices: p
            .vertices
            .iter()
            .map(|(l, v)| (*l, PointJson::from_point(v)))
            .collect(),
        gaps_sq: p.gaps_sq.iter().map(ExactNum::from_scalar).collect(),
        estimate: PointJson::from_point(&p.estimate),
        error_bound_sq: ExactNum::from_scalar(&p.error_bound_sq),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnfoldedCopyJson {
    /// Row-major linear part of the copy's isometry.
    pub linear: [ExactNum; 4],
    pub translation: VecJson,
    pub segment: (PointJson, PointJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnfoldedOrbitJson {
    pub copies: Vec<UnfoldedCopyJson>,
    pub collinear: bool,
    pub chord_norm_sq: ExactNum,
}

pub fn unfolded_to_json<T: Scalar>(u: &crate::unfold::UnfoldedOrbit<T>) -> UnfoldedOrbitJson {
    UnfoldedOrbitJson {
        copies: u
            .copies
            .iter()
            .map(|c| UnfoldedCopyJson {
                linear: [
                    ExactNum::from_scalar(&c.isometry.m[0]),
                    ExactNum::from_scalar(&c.isometry.m[1]),
                    ExactNum::from_scalar(&c.isometry.m[2]),
                    ExactNum::from_scalar(&c.isometry.m[3]),
                ],
                translation: VecJson::from_vec(&c.isometry.v),
                segment: (
                    PointJson::from_point(&c.segment.0),
                    PointJson::from_point(&c.segment.1),
                ),
            })
            .collect(),
        collinear: u.is_collinear(),
        chord_norm_sq: ExactNum::from_scalar(&u.chord_norm_sq()),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AvoidanceJson {
    pub a: u32,
    pub start: PointJson,
    pub slope: ExactNum,
    pub depth: u32,
    /// "avoids", "touches" or "crosses"
    pub verdict: String,
    pub touch_points: Vec<PointJson>,
    pub crossing_level: Option<u32>,
    /// (construction level, peripheral squares checked)
    pub checked: Vec<(u32, usize)>,
}

pub fn avoidance_to_json(
    a: u32,
    query: &crate::carpet::SegmentQuery,
    report: &crate::carpet::AvoidanceReport,
) -> AvoidanceJson {
    use crate::carpet::Avoidance;
    let (verdict, touch_points, crossing_level) = match &report.verdict {
        Avoidance::Avoids => ("avoids".to_string(), Vec::new(), None),
        Avoidance::Touches(pts) => (
            "touches".to_string(),
            pts.iter().map(PointJson::from_point).collect(),
            None,
        ),
        Avoidance::Crosses { level, .. } => ("crosses".to_string(), Vec::new(), Some(*level)),
    };
    AvoidanceJson {
        a,
        start: PointJson::from_point(&query.start),
        slope: ExactNum::from_rational(&query.slope),
        depth: query.depth,
        verdict,
        touch_points,
        crossing_level,
        checked: report.checked.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeSetsJson {
    pub a: u32,
    pub a_slopes: Vec<ExactNum>,
    pub b_slopes: Vec<ExactNum>,
}

pub fn slope_sets_to_json(s: &crate::carpet::SlopeSets) -> SlopeSetsJson {
    SlopeSetsJson {
        a: s.a,
        a_slopes: s.a_slopes.iter().map(ExactNum::from_rational).collect(),
        b_slopes: s.b_slopes.iter().map(ExactNum::from_rational).collect(),
    }
}

pub fn slope_sets_from_json(j: &SlopeSetsJson) -> Result<crate::carpet::SlopeSets, JsonError> {
    Ok(crate::carpet::SlopeSets {
        a: j.a,
        a_slopes: j
            .a_slopes
            .iter()
            .map(|e| e.to_rational())
            .collect::<Result<_, _>>()?,
        b_slopes: j
            .b_slopes
            .iter()
            .map(|e| e.to_rational())
            .collect::<Result<_, _>>()?,
    })
}
