//! Plan-view self-intersection filter for solved forms.

use serde::{Deserialize, Serialize};

use crate::cem::{FormDiagram, MemberClass, TopologyDiagram};
use crate::scalar::Scalar;
use crate::vector::{Vec2, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RejectReason {
    /// Node layer counted from the start vertices.
    RingSelfIntersection { layer: usize },
    /// Layer step `k` joins node layer `k` to `k + 1`.
    TrailCrossing { step: usize },
    DegenerateSolve,
}

impl RejectReason {
    /// Short key used in run statistics.
    pub fn key(&self) -> &'static str {
        match self {
            RejectReason::RingSelfIntersection { .. } => "ring-self-intersection",
            RejectReason::TrailCrossing { .. } => "trail-crossing",
            RejectReason::DegenerateSolve => "degenerate-solve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptanceVerdict {
    pub accepted: bool,
    pub reason: Option<RejectReason>,
}

impl AcceptanceVerdict {
    pub const ACCEPTED: Self = Self { accepted: true, reason: None };

    pub fn rejected(reason: RejectReason) -> Self {
        Self { accepted: false, reason: Some(reason) }
    }
}

/// Axis the form is projected along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionAxis {
    X,
    Y,
    #[default]
    Z,
}

impl ProjectionAxis {
    pub fn project<T: Scalar>(self, p: Vec3<T>) -> Vec2<T> {
        match self {
            ProjectionAxis::X => Vec2::new(p.y, p.z),
            ProjectionAxis::Y => Vec2::new(p.z, p.x),
            ProjectionAxis::Z => Vec2::new(p.x, p.y),
        }
    }
}

pub type Segment<T> = (Vec2<T>, Vec2<T>);

/// Relative tolerance factor applied to the bounding-box diagonal.
const EPS_FACTOR: f64 = 1e-9;

fn diagonal<T: Scalar>(points: &[Vec2<T>]) -> T {
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in &points[1..] {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    hi.sub(lo).dot(hi.sub(lo)).sqrt()
}

/// Default tolerance for a pair of segments: `1e-9` times the diagonal of
/// their common bounding box.
pub fn segment_tolerance<T: Scalar>(s1: Segment<T>, s2: Segment<T>) -> T {
    T::lit(EPS_FACTOR) * diagonal(&[s1.0, s1.1, s2.0, s2.1])
}

/// Sign of the turn a -> b -> c, zero when `c` is within `eps` of the line ab.
fn orientation<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, eps: T) -> i8 {
    let ab = b.sub(a);
    let cross = ab.cross(c.sub(a));
    let len = ab.dot(ab).sqrt();
    let limit = if len > T::zero() { eps * len } else { eps * eps };
    if cross > limit {
        1
    } else if cross < -limit {
        -1
    } else {
        0
    }
}

fn close<T: Scalar>(a: Vec2<T>, b: Vec2<T>, eps: T) -> bool {
    let d = a.sub(b);
    d.dot(d) <= eps * eps
}

/// Whether `p`, already known to be collinear with `s`, lies strictly
/// inside it (further than `eps` from both ends).
fn strictly_inside<T: Scalar>(s: Segment<T>, p: Vec2<T>, eps: T) -> bool {
    let d = s.1.sub(s.0);
    let len2 = d.dot(d);
    if len2 <= eps * eps {
        return false;
    }
    let t = p.sub(s.0).dot(d);
    let margin = eps * len2.sqrt();
    t > margin && t < len2 - margin
}

/// True iff the segments share a point other than a common endpoint:
/// a proper crossing, an endpoint of one lying inside the other, or a
/// collinear overlap of positive length.
pub fn segments_properly_intersect<T: Scalar>(s1: Segment<T>, s2: Segment<T>, eps: T) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = orientation(a, b, c, eps);
    let o2 = orientation(a, b, d, eps);
    let o3 = orientation(c, d, a, eps);
    let o4 = orientation(c, d, b, eps);

    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // collinear: overlap of the parameter intervals along the longer one
        let (long, short) = if b.sub(a).dot(b.sub(a)) >= d.sub(c).dot(d.sub(c)) { (s1, s2) } else { (s2, s1) };
        let dir = long.1.sub(long.0);
        let len2 = dir.dot(dir);
        if len2 <= eps * eps {
            return false;
        }
        let len = len2.sqrt();
        let t0 = short.0.sub(long.0).dot(dir) / len;
        let t1 = short.1.sub(long.0).dot(dir) / len;
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        let overlap = hi.min(len) - lo.max(T::zero());
        return overlap > eps;
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    // touching configurations: an endpoint on the other segment's interior
    (o1 == 0 && strictly_inside(s1, c, eps))
        || (o2 == 0 && strictly_inside(s1, d, eps))
        || (o3 == 0 && strictly_inside(s2, a, eps))
        || (o4 == 0 && strictly_inside(s2, b, eps))
}

/// A closed polygon is simple when no two non-adjacent edges intersect and
/// no two adjacent edges fold back onto each other.
pub fn polygon_is_simple<T: Scalar>(vertices: &[Vec2<T>]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return true;
    }
    let eps = T::lit(EPS_FACTOR) * diagonal(vertices);
    let edge = |i: usize| (vertices[i], vertices[(i + 1) % n]);
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (e1, e2) = (edge(i), edge(j));
            if adjacent {
                // shared vertex is allowed; a collinear fold-back is not
                let (shared, other1, other2) =
                    if j == i + 1 { (e1.1, e1.0, e2.1) } else { (e1.0, e1.1, e2.0) };
                if orientation(other1, shared, other2, eps) == 0
                    && other1.sub(shared).dot(other2.sub(shared)) > T::zero()
                {
                    return false;
                }
                continue;
            }
            if segments_properly_intersect(e1, e2, eps) || shares_endpoint(e1, e2, eps) {
                return false;
            }
        }
    }
    true
}

fn shares_endpoint<T: Scalar>(e1: Segment<T>, e2: Segment<T>, eps: T) -> bool {
    close(e1.0, e2.0, eps) || close(e1.0, e2.1, eps) || close(e1.1, e2.0, eps) || close(e1.1, e2.1, eps)
}

/// Layer-wise plan-view acceptance test.
///
/// For each node layer that carries ring members, the ring polygon in
/// trail order must be simple. For each layer step, no two trail segments
/// of that step may intersect.
pub fn accept_form<T: Scalar>(
    form: &FormDiagram<T>,
    topo: &TopologyDiagram<T>,
    axis: ProjectionAxis,
) -> AcceptanceVerdict {
    let plan: Vec<Vec2<T>> = form.positions.iter().map(|&p| axis.project(p)).collect();
    let trails = topo.trails();
    let depth = trails.iter().map(|t| t.vertices.len()).max().unwrap_or(0);

    for layer in 0..depth {
        let ring: Vec<usize> = trails.iter().filter_map(|t| t.vertices.get(layer).copied()).collect();
        let ringed = ring.iter().any(|&v| {
            topo.incident(v).iter().any(|&m| topo.members()[m].class == MemberClass::Deviation)
        });
        if ringed {
            let polygon: Vec<Vec2<T>> = ring.iter().map(|&v| plan[v]).collect();
            if !polygon_is_simple(&polygon) {
                return AcceptanceVerdict::rejected(RejectReason::RingSelfIntersection { layer });
            }
        }
        if layer + 1 < depth {
            let segments: Vec<Segment<T>> = trails
                .iter()
                .filter(|t| layer + 1 < t.vertices.len())
                .map(|t| (plan[t.vertices[layer]], plan[t.vertices[layer + 1]]))
                .collect();
            for i in 0..segments.len() {
                for j in i + 1..segments.len() {
                    let eps = segment_tolerance(segments[i], segments[j]);
                    if segments_properly_intersect(segments[i], segments[j], eps) {
                        return AcceptanceVerdict::rejected(RejectReason::TrailCrossing { step: layer });
                    }
                }
            }
        }
    }
    AcceptanceVerdict::ACCEPTED
}
