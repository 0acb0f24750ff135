//! Middle tangent circles for CCC paths and the trapped region bounded by
//! the RLR path `w1` and the LRL path `w2`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Serialize, Serializer};

use crate::census::{Census, ProximityCondition};
use crate::dubins::{ccc_path, CsPath};
use crate::error::{CensusError, Result};
use crate::frame::{Pose, Sense};
use crate::geom::{intersect, Piece, Vec2};
use crate::EPS;

/// Which of the two unit circles tangent to both end circles to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TangentChoice {
    Plus,
    Minus,
}

impl TangentChoice {
    fn sign(self) -> f64 {
        match self {
            TangentChoice::Plus => 1.0,
            TangentChoice::Minus => -1.0,
        }
    }
}

/// A unit circle tangent to the unit circles at `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangencyTriple {
    pub middle_center: Vec2,
    /// Contact point with the circle at `a`.
    pub first_tangency: Vec2,
    /// Contact point with the circle at `b`.
    pub second_tangency: Vec2,
}

/// Requires `0 < d(a, b) ≤ 4`.
pub fn ccc_tangent_circle(a: Vec2, b: Vec2, choice: TangentChoice) -> Result<TangencyTriple> {
    let d = a.dist(b);
    if !(d > EPS && d <= 4.0 + EPS) {
        return Err(CensusError::NoTangentCircle { distance: d });
    }
    let alpha = (d / 4.0).min(1.0).acos();
    let theta = (b - a).angle();
    let dir = Vec2::from_angle(theta + choice.sign() * alpha);
    let c = a + dir * 2.0;
    let delta = (c - b).angle();
    Ok(TangencyTriple { middle_center: c, first_tangency: a + dir, second_tangency: b + Vec2::from_angle(delta) })
}

/// The region enclosed by `w1 ∪ w2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrappedRegion {
    pub start: Pose,
    pub end: Pose,
    /// RLR boundary path.
    pub w1: CsPath,
    /// LRL boundary path.
    pub w2: CsPath,
    /// Closed chain: `w1` forward, then `w2` backward.
    pub boundary: Vec<Piece>,
    pub area: f64,
    /// Number of other branch pairs that also bound a simple region.
    pub alternates: usize,
}

#[derive(Serialize)]
struct RegionRepr<'a> {
    w1: &'a CsPath,
    w2: &'a CsPath,
}

impl Serialize for TrappedRegion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RegionRepr { w1: &self.w1, w2: &self.w2 }.serialize(s)
    }
}

const CONTACT_TOL: f64 = 1e-7;

fn closed_chain(w1: &CsPath, w2: &CsPath) -> Vec<Piece> {
    let mut chain = w1.pieces();
    chain.extend(w2.pieces().iter().rev().map(Piece::reversed));
    chain
}

fn signed_area(chain: &[Piece]) -> f64 {
    chain.iter().map(Piece::green_area_term).sum()
}

/// Pairwise test of a closed chain: adjacent pieces may only meet at their
/// shared joint, other pieces may not meet at all.
fn chain_is_simple(chain: &[Piece]) -> bool {
    let n = chain.len();
    for i in 0..n {
        for j in i + 1..n {
            let joint = if j == i + 1 {
                Some(chain[i].end_point())
            } else if i == 0 && j == n - 1 {
                Some(chain[0].start_point())
            } else {
                None
            };
            for p in intersect(&chain[i], &chain[j], EPS) {
                match joint {
                    Some(q) if p.dist(q) <= CONTACT_TOL => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Builds `Ω` for a pair satisfying proximity condition D.
pub fn build_trapped_region(x: &Pose, y: &Pose) -> Result<TrappedRegion> {
    let census = Census::default();
    let cond = census.proximity_condition(x, y);
    if cond != ProximityCondition::D {
        return Err(CensusError::NoRegion(format!("proximity condition {cond:?}, a trapped region needs D")));
    }
    let choices = [TangentChoice::Plus, TangentChoice::Minus];
    let mut valid: Vec<(f64, CsPath, CsPath, Vec<Piece>)> = Vec::new();
    for c1 in choices {
        for c2 in choices {
            let (Some(w1), Some(w2)) = (ccc_path(x, y, Sense::Right, c1), ccc_path(x, y, Sense::Left, c2)) else {
                continue;
            };
            let w1 = CsPath::new(w1.start, w1.segments, w1.path_type);
            let w2 = CsPath::new(w2.start, w2.segments, w2.path_type);
            let chain = closed_chain(&w1, &w2);
            let area = signed_area(&chain).abs();
            if area > EPS && chain_is_simple(&chain) {
                valid.push((area, w1, w2, chain));
            }
        }
    }
    if valid.is_empty() {
        return Err(CensusError::NoRegion("no branch pair bounds a simple region with nonempty interior".into()));
    }
    valid.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alternates = valid.len() - 1;
    let (area, w1, w2, boundary) = valid.swap_remove(0);
    Ok(TrappedRegion { start: *x, end: *y, w1, w2, boundary, area, alternates })
}

/// Splits an arc into pieces on which `y` is monotone.
fn monotone_arcs(center: Vec2, start: f64, sweep: f64) -> Vec<(Vec2, f64, f64)> {
    let mut out = Vec::new();
    let mut a = start;
    let end = start + sweep;
    let dir = sweep.signum();
    loop {
        // Next angle of the form π/2 + kπ strictly past `a` in the sweep direction.
        let k = ((a - FRAC_PI_2) / PI).floor();
        let next = if dir > 0.0 {
            let mut t = FRAC_PI_2 + k * PI;
            while t <= a + 1e-15 {
                t += PI;
            }
            t
        } else {
            let mut t = FRAC_PI_2 + (k + 1.0) * PI;
            while t >= a - 1e-15 {
                t -= PI;
            }
            t
        };
        if (dir > 0.0 && next >= end) || (dir < 0.0 && next <= end) || sweep == 0.0 {
            out.push((center, a, end));
            return out;
        }
        out.push((center, a, next));
        a = next;
    }
}

impl TrappedRegion {
    /// Closed-region membership: boundary points count as inside.
    pub fn contains(&self, pt: Vec2) -> bool {
        self.contains_tol(pt, EPS)
    }

    pub fn contains_tol(&self, pt: Vec2, tol: f64) -> bool {
        if self.boundary.iter().any(|p| p.distance_to(pt) <= tol) {
            return true;
        }
        let mut inside = false;
        let mut cross = |p0: Vec2, p1: Vec2, x_at: &dyn Fn() -> f64| {
            if (p0.y > pt.y) != (p1.y > pt.y) && x_at() > pt.x {
                inside = !inside;
            }
        };
        for piece in &self.boundary {
            match *piece {
                Piece::Line { from, to } => {
                    cross(from, to, &|| from.x + (pt.y - from.y) * (to.x - from.x) / (to.y - from.y));
                }
                Piece::Arc { center, start, sweep } => {
                    for (c, a0, a1) in monotone_arcs(center, start, sweep) {
                        let p0 = c + Vec2::from_angle(a0);
                        let p1 = c + Vec2::from_angle(a1);
                        let mid = c + Vec2::from_angle(0.5 * (a0 + a1));
                        let side = if mid.x >= c.x { 1.0 } else { -1.0 };
                        cross(p0, p1, &|| c.x + side * (1.0 - (pt.y - c.y).powi(2)).max(0.0).sqrt());
                    }
                }
            }
        }
        inside
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.boundary {
            let (a, b) = p.bbox();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        (lo, hi)
    }
}

/// Whether the path has no self-intersections. Contacts between consecutive
/// pieces at their joint and contacts at the path's own endpoints are allowed.
pub fn is_embedded(p: &CsPath) -> bool {
    let pieces = p.pieces();
    let start = p.start.position;
    let end = p.end_pose().position;
    let n = pieces.len();
    for i in 0..n {
        if let Piece::Arc { sweep, .. } = pieces[i] {
            if sweep.abs() > 2.0 * PI + EPS {
                return false;
            }
        }
        for j in i + 1..n {
            for q in intersect(&pieces[i], &pieces[j], EPS) {
                let at_joint = j == i + 1 && q.dist(pieces[i].end_point()) <= CONTACT_TOL;
                let at_end = q.dist(start) <= CONTACT_TOL || q.dist(end) <= CONTACT_TOL;
                if !(at_joint || at_end) {
                    return false;
                }
            }
        }
    }
    true
}

/// Sampling step (arc length) used for containment checks.
pub const SAMPLE_STEP: f64 = 1e-2;

/// Embedded and contained in `Ω`: the operational test for membership in the
/// bounded isotopy class.
pub fn in_trapped_class(p: &CsPath, region: &TrappedRegion) -> bool {
    if !is_embedded(p) {
        return false;
    }
    let (lo, hi) = region.bbox();
    let tol = CONTACT_TOL;
    let n = ((p.length() / SAMPLE_STEP).ceil() as usize).max(2) + 1;
    let Ok(samples) = crate::dubins::sample(p, n) else { return false };
    samples.iter().all(|s| {
        let q = s.position;
        q.x >= lo.x - tol && q.x <= hi.x + tol && q.y >= lo.y - tol && q.y <= hi.y + tol && region.contains_tol(q, tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dubins::{enumerate_candidates, minimizer, PathType};
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn tangent_circle_examples() {
        let a = Vec2::new(0.0, -1.0);
        for ch in [TangentChoice::Plus, TangentChoice::Minus] {
            let t = ccc_tangent_circle(a, Vec2::new(4.0, -1.0), ch).unwrap();
            assert!(t.middle_center.dist(Vec2::new(2.0, -1.0)) < 1e-12);
            assert!(t.first_tangency.dist(Vec2::new(1.0, -1.0)) < 1e-12);
            assert!(t.second_tangency.dist(Vec2::new(3.0, -1.0)) < 1e-12);
        }
        let s3 = 3f64.sqrt();
        let t = ccc_tangent_circle(a, Vec2::new(2.0, -1.0), TangentChoice::Plus).unwrap();
        assert!(t.middle_center.dist(Vec2::new(1.0, -1.0 + s3)) < 1e-12);
        assert!(t.first_tangency.dist(Vec2::new(0.5, -1.0 + s3 / 2.0)) < 1e-12);
        assert!(t.second_tangency.dist(Vec2::new(1.5, -1.0 + s3 / 2.0)) < 1e-12);
        let t = ccc_tangent_circle(a, Vec2::new(2.0, -1.0), TangentChoice::Minus).unwrap();
        assert!(t.middle_center.dist(Vec2::new(1.0, -1.0 - s3)) < 1e-12);
        assert!(t.second_tangency.dist(Vec2::new(1.5, -1.0 - s3 / 2.0)) < 1e-12);
        assert!(ccc_tangent_circle(a, Vec2::new(4.5, -1.0), TangentChoice::Plus).is_err());
        assert!(ccc_tangent_circle(a, a, TangentChoice::Plus).is_err());
    }

    #[test]
    fn symmetric_region() {
        let x = Pose::origin();
        let y = Pose::new(8f64.sqrt(), 0.0, 0.0);
        let r = build_trapped_region(&x, &y).unwrap();
        assert_eq!(r.w1.path_type, PathType::RLR);
        assert_eq!(r.w2.path_type, PathType::LRL);
        assert!(r.w1.end_pose().approx_eq(&y, 1e-9) && r.w2.end_pose().approx_eq(&y, 1e-9));
        assert!(r.contains(Vec2::new(2f64.sqrt(), 0.0)));
        assert!(!r.contains(Vec2::new(100.0, 0.0)));
        let (lo, hi) = r.bbox();
        assert!((lo.y + hi.y).abs() < 1e-9, "not symmetric: {lo:?} {hi:?}");
        let p = ccc_tangent_circle(Vec2::new(0.0, -1.0), Vec2::new(8f64.sqrt(), -1.0), TangentChoice::Plus).unwrap();
        assert!(r.contains(p.first_tangency) || r.contains(Vec2::new(p.first_tangency.x, -p.first_tangency.y)));
    }

    #[test]
    fn region_requires_condition_d() {
        let err = build_trapped_region(&Pose::origin(), &Pose::new(4.0, -8.0, 0.0)).unwrap_err();
        assert!(matches!(err, CensusError::NoRegion(_)));
        let err = build_trapped_region(&Pose::origin(), &Pose::new(1.0, 1.0, FRAC_PI_2)).unwrap_err();
        assert!(matches!(err, CensusError::NoRegion(_)));
    }

    #[test]
    fn perturbed_isolated_point_has_region() {
        let r = build_trapped_region(&Pose::origin(), &Pose::new(1.05, 1.05, FRAC_PI_2)).unwrap();
        assert!(r.area > 0.0);
    }

    #[test]
    fn minimizer_is_trapped_and_gamma3_is_not() {
        let x = Pose::origin();
        let y = Pose::new(3.0, 0.0, FRAC_PI_3);
        let r = build_trapped_region(&x, &y).unwrap();
        assert!(in_trapped_class(&minimizer(&x, &y), &r));
        let c = enumerate_candidates(&x, &y);
        assert!(!in_trapped_class(&c[3], &r));
        assert!(in_trapped_class(&r.w1, &r) && in_trapped_class(&r.w2, &r));
    }

    #[test]
    fn monotone_split() {
        let parts = monotone_arcs(Vec2::ZERO, 0.0, 2.0 * PI);
        assert_eq!(parts.len(), 3);
        let parts = monotone_arcs(Vec2::ZERO, 0.0, -PI);
        assert_eq!(parts.len(), 2);
    }
}
