//! Planar vectors, angle helpers and exact intersection primitives for
//! unit-circle arcs and line segments.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or vector in the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from the `+x` axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise rotation by `angle`.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn midpoint(self, o: Vec2) -> Vec2 {
        Vec2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_positive(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Counterclockwise sweep from direction `from` to direction `to`, in `[0, 2π)`,
/// with values within `eps` of `2π` snapped to zero.
pub fn ccw_sweep(from: f64, to: f64, eps: f64) -> f64 {
    let s = wrap_positive(to - from);
    if s > TAU - eps {
        0.0
    } else {
        s
    }
}

/// Smallest absolute difference between two angles, in `[0, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b).abs()
}

/// A primitive boundary piece in absolute coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    /// Unit-radius arc starting at polar angle `start` (measured at `center`)
    /// and sweeping `sweep` radians (positive = counterclockwise).
    Arc { center: Vec2, start: f64, sweep: f64 },
    Line { from: Vec2, to: Vec2 },
}

impl Piece {
    pub fn start_point(&self) -> Vec2 {
        match *self {
            Piece::Arc { center, start, .. } => center + Vec2::from_angle(start),
            Piece::Line { from, .. } => from,
        }
    }

    pub fn end_point(&self) -> Vec2 {
        match *self {
            Piece::Arc { center, start, sweep } => center + Vec2::from_angle(start + sweep),
            Piece::Line { to, .. } => to,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Arc { sweep, .. } => sweep.abs(),
            Piece::Line { from, to } => from.dist(to),
        }
    }

    /// The same geometry traversed in the opposite direction.
    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Arc { center, start, sweep } => Piece::Arc { center, start: start + sweep, sweep: -sweep },
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
        }
    }

    /// Point at arc-length fraction `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Vec2 {
        match *self {
            Piece::Arc { center, start, sweep } => center + Vec2::from_angle(start + sweep * t),
            Piece::Line { from, to } => from + (to - from) * t,
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        match *self {
            Piece::Line { from, to } => (
                Vec2::new(from.x.min(to.x), from.y.min(to.y)),
                Vec2::new(from.x.max(to.x), from.y.max(to.y)),
            ),
            Piece::Arc { center, start, sweep } => {
                let a = self.start_point();
                let b = self.end_point();
                let mut lo = Vec2::new(a.x.min(b.x), a.y.min(b.y));
                let mut hi = Vec2::new(a.x.max(b.x), a.y.max(b.y));
                for k in 0..4 {
                    let ang = k as f64 * PI / 2.0;
                    if arc_contains_angle(start, sweep, ang, 0.0) {
                        let p = center + Vec2::from_angle(ang);
                        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean distance from `p` to this piece.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        match *self {
            Piece::Line { from, to } => {
                let d = to - from;
                let len2 = d.dot(d);
                if len2 == 0.0 {
                    return p.dist(from);
                }
                let t = ((p - from).dot(d) / len2).clamp(0.0, 1.0);
                p.dist(from + d * t)
            }
            Piece::Arc { center, start, sweep } => {
                let rel = p - center;
                let r = rel.norm();
                if r > 0.0 && arc_contains_angle(start, sweep, rel.angle(), 0.0) {
                    (r - 1.0).abs()
                } else {
                    p.dist(self.start_point()).min(p.dist(self.end_point()))
                }
            }
        }
    }

    /// Signed-area contribution `½∮(x dy − y dx)` of this piece.
    pub fn green_area_term(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => 0.5 * from.cross(to),
            Piece::Arc { center, sweep, .. } => {
                0.5 * (center.cross(self.end_point() - self.start_point()) + sweep)
            }
        }
    }
}

/// Whether polar angle `ang` lies on the arc `[start, start + sweep]`,
/// allowing an angular slack of `tol`.
pub fn arc_contains_angle(start: f64, sweep: f64, ang: f64, tol: f64) -> bool {
    if sweep.abs() >= TAU - tol {
        return true;
    }
    let off = if sweep >= 0.0 { wrap_positive(ang - start) } else { wrap_positive(start - ang) };
    off <= sweep.abs() + tol || off >= TAU - tol
}

/// All intersection points of two pieces (tangential contacts included).
/// Overlapping collinear lines or arcs on a shared circle report the overlap
/// endpoints plus the overlap midpoint so callers see a contact that is not
/// just a joint.
pub fn intersect(a: &Piece, b: &Piece, tol: f64) -> Vec<Vec2> {
    match (a, b) {
        (Piece::Line { from: p0, to: p1 }, Piece::Line { from: q0, to: q1 }) => {
            intersect_lines(*p0, *p1, *q0, *q1, tol)
        }
        (Piece::Line { from, to }, arc @ Piece::Arc { .. }) | (arc @ Piece::Arc { .. }, Piece::Line { from, to }) => {
            intersect_line_arc(*from, *to, arc, tol)
        }
        (Piece::Arc { .. }, Piece::Arc { .. }) => intersect_arcs(a, b, tol),
    }
}

fn intersect_lines(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2, tol: f64) -> Vec<Vec2> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let rl = r.norm();
    let sl = s.norm();
    if rl == 0.0 || sl == 0.0 {
        return Vec::new();
    }
    if denom.abs() <= tol * rl * sl {
        // Parallel: overlapping only if collinear.
        if ((q0 - p0).cross(r) / rl).abs() > tol {
            return Vec::new();
        }
        let t0 = (q0 - p0).dot(r) / (rl * rl);
        let t1 = (q1 - p0).dot(r) / (rl * rl);
        let lo = t0.min(t1).max(0.0);
        let hi = t0.max(t1).min(1.0);
        if hi < lo - tol / rl {
            return Vec::new();
        }
        let a = p0 + r * lo;
        let b = p0 + r * hi;
        if a.dist(b) <= tol {
            return vec![a];
        }
        return vec![a, a.midpoint(b), b];
    }
    let t = (q0 - p0).cross(s) / denom;
    let u = (q0 - p0).cross(r) / denom;
    let tt = tol / rl;
    let ut = tol / sl;
    if t >= -tt && t <= 1.0 + tt && u >= -ut && u <= 1.0 + ut {
        vec![p0 + r * t]
    } else {
        Vec::new()
    }
}

fn intersect_line_arc(from: Vec2, to: Vec2, arc: &Piece, tol: f64) -> Vec<Vec2> {
    let Piece::Arc { center, start, sweep } = *arc else { unreachable!() };
    let d = to - from;
    let len = d.norm();
    if len == 0.0 {
        return Vec::new();
    }
    let dir = d * (1.0 / len);
    let f = from - center;
    // |f + t·dir|² = 1
    let b = f.dot(dir);
    let c = f.dot(f) - 1.0;
    let disc = b * b - c;
    let mut out = Vec::new();
    let ts: Vec<f64> = if disc < -2.0 * tol {
        return out;
    } else if disc <= 2.0 * tol {
        vec![-b]
    } else {
        let r = disc.sqrt();
        vec![-b - r, -b + r]
    };
    for t in ts {
        if t < -tol || t > len + tol {
            continue;
        }
        let p = from + dir * t;
        let ang = (p - center).angle();
        if arc_contains_angle(start, sweep, ang, tol) {
            out.push(p);
        }
    }
    out
}

fn intersect_arcs(a: &Piece, b: &Piece, tol: f64) -> Vec<Vec2> {
    let Piece::Arc { center: c1, start: s1, sweep: w1 } = *a else { unreachable!() };
    let Piece::Arc { center: c2, start: s2, sweep: w2 } = *b else { unreachable!() };
    let d = c1.dist(c2);
    let mut out = Vec::new();
    if d <= tol {
        // Same circle: collect each arc's endpoints lying on the other arc.
        let on_b = |p: Vec2| arc_contains_angle(s2, w2, (p - c2).angle(), tol);
        let on_a = |p: Vec2| arc_contains_angle(s1, w1, (p - c1).angle(), tol);
        let mut pts = Vec::new();
        for p in [a.start_point(), a.end_point()] {
            if on_b(p) {
                pts.push(p);
            }
        }
        for p in [b.start_point(), b.end_point()] {
            if on_a(p) {
                pts.push(p);
            }
        }
        // Interior overlap check: midpoint of `a` on `b` or vice versa.
        let ma = a.point_at(0.5);
        let mb = b.point_at(0.5);
        if on_b(ma) {
            pts.push(ma);
        }
        if on_a(mb) {
            pts.push(mb);
        }
        return pts;
    }
    if d > 2.0 + tol {
        return out;
    }
    let base = (c2 - c1).angle();
    let h = (d / 2.0).min(1.0).acos();
    let cands = if h <= tol.sqrt() * 1e-3 || d >= 2.0 { vec![base] } else { vec![base + h, base - h] };
    for ang in cands {
        let p = c1 + Vec2::from_angle(ang);
        if arc_contains_angle(s1, w1, ang, tol) && arc_contains_angle(s2, w2, (p - c2).angle(), tol) {
            out.push(p);
        }
    }
    out
}
