//! Dubins candidate paths: every CSC and CCC concatenation of unit arcs and
//! tangent segments joining two poses.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CensusError, Result};
use crate::frame::{OrientedCircle, Pose, Sense};
use crate::geom::{wrap_positive, Piece, Vec2};
use crate::tangency::{ccc_tangent_circle, TangentChoice};
use crate::EPS;

/// One piece of a cs path. Arc angles lie in `(0, 2π]`; a full `2π` arc is
/// only produced for closed loops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Arc { sense: Sense, angle: f64 },
    Line { length: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Arc { angle, .. } => angle,
            Segment::Line { length } => length,
        }
    }

    /// Signed heading change: positive for left arcs.
    pub fn turning(&self) -> f64 {
        match *self {
            Segment::Arc { sense, angle } => sense.sign() * angle,
            Segment::Line { .. } => 0.0,
        }
    }

    /// Pose reached after travelling `s` (clamped to the segment) from `p`.
    pub fn advance(&self, p: &Pose, s: f64) -> Pose {
        let s = s.clamp(0.0, self.length());
        match *self {
            Segment::Line { .. } => Pose::at(p.position + p.direction() * s, p.heading),
            Segment::Arc { sense, .. } => {
                let center = OrientedCircle::adjacent(p, sense).center;
                let h = p.heading + sense.sign() * s;
                let pos = center - Vec2::from_angle(h).perp() * sense.sign();
                Pose::at(pos, h)
            }
        }
    }

    fn approx_eq(&self, other: &Segment, tol: f64) -> bool {
        match (self, other) {
            (Segment::Arc { sense: a, angle: x }, Segment::Arc { sense: b, angle: y }) => {
                a == b && (x - y).abs() <= tol
            }
            (Segment::Line { length: x }, Segment::Line { length: y }) => (x - y).abs() <= tol,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PathType {
    LSL,
    RSR,
    LSR,
    RSL,
    LRL,
    RLR,
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl fmt::Display for PathType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PathType::LSL => "LSL",
            PathType::RSR => "RSR",
            PathType::LSR => "LSR",
            PathType::RSL => "RSL",
            PathType::LRL => "LRL",
            PathType::RLR => "RLR",
            PathType::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

/// A concatenation of unit arcs and line segments starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsPath {
    pub start: Pose,
    pub segments: Vec<Segment>,
    #[serde(rename = "type")]
    pub path_type: PathType,
}

impl CsPath {
    /// Builds a path, dropping segments shorter than `EPS` and merging
    /// consecutive pieces of the same kind.
    pub fn new(start: Pose, segments: Vec<Segment>, path_type: PathType) -> Self {
        let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
        for seg in segments {
            if seg.length() < EPS {
                continue;
            }
            match (out.last_mut(), seg) {
                (Some(Segment::Line { length }), Segment::Line { length: l }) => *length += l,
                (Some(Segment::Arc { sense, angle }), Segment::Arc { sense: s, angle: a }) if *sense == s => {
                    *angle += a;
                }
                _ => out.push(seg),
            }
        }
        CsPath { start, segments: out, path_type }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn turning(&self) -> f64 {
        self.segments.iter().map(Segment::turning).sum()
    }

    pub fn end_pose(&self) -> Pose {
        self.segments.iter().fold(self.start, |p, seg| seg.advance(&p, seg.length()))
    }

    /// Pose at arc length `s` from the start, clamped to `[0, length]`.
    pub fn pose_at(&self, s: f64) -> Pose {
        let mut p = self.start;
        let mut rest = s.max(0.0);
        for seg in &self.segments {
            let len = seg.length();
            if rest <= len {
                return seg.advance(&p, rest);
            }
            p = seg.advance(&p, len);
            rest -= len;
        }
        p
    }

    /// Start pose of each segment, followed by the end pose.
    pub fn joints(&self) -> Vec<Pose> {
        let mut poses = Vec::with_capacity(self.segments.len() + 1);
        let mut p = self.start;
        poses.push(p);
        for seg in &self.segments {
            p = seg.advance(&p, seg.length());
            poses.push(p);
        }
        poses
    }

    /// Absolute geometry of each segment.
    pub fn pieces(&self) -> Vec<Piece> {
        let joints = self.joints();
        self.segments
            .iter()
            .zip(&joints)
            .map(|(seg, p)| match *seg {
                Segment::Line { length } => Piece::Line { from: p.position, to: p.position + p.direction() * length },
                Segment::Arc { sense, angle } => {
                    let center = OrientedCircle::adjacent(p, sense).center;
                    Piece::Arc { center, start: (p.position - center).angle(), sweep: sense.sign() * angle }
                }
            })
            .collect()
    }

    /// Compact label such as `L0.35 R1.16 L1.86`.
    pub fn word(&self) -> String {
        if self.segments.is_empty() {
            return "-".to_string();
        }
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Arc { sense, angle } => format!("{}{:.4}", sense.letter(), angle),
                Segment::Line { length } => format!("S{:.4}", length),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn same_segments(&self, other: &CsPath, tol: f64) -> bool {
        self.segments.len() == other.segments.len()
            && self.segments.iter().zip(&other.segments).all(|(a, b)| a.approx_eq(b, tol))
    }
}

pub fn path_length(p: &CsPath) -> f64 {
    p.length()
}

pub fn total_turning(p: &CsPath) -> f64 {
    p.turning()
}

/// `n` poses equally spaced in arc length, first and last included.
pub fn sample(p: &CsPath, n: usize) -> Result<Vec<Pose>> {
    if n < 2 {
        return Err(CensusError::InvalidArgument(format!("sample count must be at least 2, got {n}")));
    }
    let len = p.length();
    let mut out: Vec<Pose> = (0..n - 1).map(|k| p.pose_at(len * k as f64 / (n - 1) as f64)).collect();
    out.push(p.end_pose());
    Ok(out)
}

/// Heading change turning in `sense` from `from` to `to`, in `[0, 2π)`,
/// snapping values within `EPS` of a full turn to zero.
fn turn(sense: Sense, from: f64, to: f64) -> f64 {
    let a = match sense {
        Sense::Left => wrap_positive(to - from),
        Sense::Right => wrap_positive(from - to),
    };
    if a > TAU - EPS {
        0.0
    } else {
        a
    }
}

/// Heading of a unit circle traversed in `sense` at the point `p`.
fn tangent_heading(center: Vec2, p: Vec2, sense: Sense) -> f64 {
    (p - center).angle() + sense.sign() * std::f64::consts::FRAC_PI_2
}

fn csc(x: &Pose, y: &Pose, first: Sense, last: Sense, tag: PathType) -> Option<CsPath> {
    let a = OrientedCircle::adjacent(x, first).center;
    let b = OrientedCircle::adjacent(y, last).center;
    let ab = b - a;
    let d = ab.norm();
    let phi = ab.angle();
    let (psi, line) = if first == last {
        if d < EPS {
            let arc = Segment::Arc { sense: first, angle: turn(first, x.heading, y.heading) };
            return Some(CsPath::new(*x, vec![arc], tag));
        }
        (phi, d)
    } else {
        if d < 2.0 - EPS {
            return None;
        }
        let l = (d * d - 4.0).max(0.0).sqrt();
        let off = 2f64.atan2(l);
        let psi = if first == Sense::Left { phi + off } else { phi - off };
        (psi, l)
    };
    let segs = vec![
        Segment::Arc { sense: first, angle: turn(first, x.heading, psi) },
        Segment::Line { length: line },
        Segment::Arc { sense: last, angle: turn(last, psi, y.heading) },
    ];
    Some(CsPath::new(*x, segs, tag))
}

/// The CCC path whose outer arcs lie on the `outer` adjacent circles of `x`
/// and `y`, with the middle circle chosen by `choice`.
pub fn ccc_path(x: &Pose, y: &Pose, outer: Sense, choice: TangentChoice) -> Option<CsPath> {
    let a = OrientedCircle::adjacent(x, outer).center;
    let b = OrientedCircle::adjacent(y, outer).center;
    let t = ccc_tangent_circle(a, b, choice).ok()?;
    let inner = outer.opposite();
    let hp = tangent_heading(a, t.first_tangency, outer);
    let hq = tangent_heading(b, t.second_tangency, outer);
    let tag = if outer == Sense::Left { PathType::LRL } else { PathType::RLR };
    let segs = vec![
        Segment::Arc { sense: outer, angle: turn(outer, x.heading, hp) },
        Segment::Arc { sense: inner, angle: turn(inner, hp, hq) },
        Segment::Arc { sense: outer, angle: turn(outer, hq, y.heading) },
    ];
    Some(CsPath { start: *x, segments: segs, path_type: tag })
}

/// A CCC path is kept when its middle arc exceeds π (the classical Dubins
/// shape) or when all three arcs are shorter than π.
fn ccc_admissible(p: &CsPath) -> bool {
    let arcs: Vec<f64> = p.segments.iter().map(Segment::length).collect();
    if arcs.len() != 3 {
        return !arcs.is_empty();
    }
    let pi = std::f64::consts::PI;
    arcs[1] > pi + EPS || arcs.iter().all(|&a| a < pi - EPS)
}

fn cmp_paths(a: &CsPath, b: &CsPath) -> Ordering {
    a.length().total_cmp(&b.length()).then(a.path_type.cmp(&b.path_type))
}

/// All Dubins candidates from `x` to `y`, sorted by length (ties by type tag).
pub fn enumerate_candidates(x: &Pose, y: &Pose) -> Vec<CsPath> {
    if x.approx_eq(y, EPS) {
        return vec![
            CsPath::new(*x, Vec::new(), PathType::Degenerate),
            CsPath::new(*x, vec![Segment::Arc { sense: Sense::Left, angle: TAU }], PathType::LSL),
            CsPath::new(*x, vec![Segment::Arc { sense: Sense::Right, angle: TAU }], PathType::RSR),
        ];
    }
    use Sense::{Left as L, Right as R};
    let mut raw: Vec<CsPath> = [
        csc(x, y, L, L, PathType::LSL),
        csc(x, y, R, R, PathType::RSR),
        csc(x, y, L, R, PathType::LSR),
        csc(x, y, R, L, PathType::RSL),
    ]
    .into_iter()
    .flatten()
    .collect();
    for outer in [L, R] {
        for choice in [TangentChoice::Plus, TangentChoice::Minus] {
            if let Some(p) = ccc_path(x, y, outer, choice) {
                if ccc_admissible(&p) {
                    raw.push(CsPath::new(p.start, p.segments, p.path_type));
                }
            }
        }
    }
    let mut out: Vec<CsPath> = Vec::with_capacity(raw.len());
    for p in raw {
        if p.segments.is_empty() {
            continue;
        }
        if !out.iter().any(|q| q.same_segments(&p, EPS)) {
            out.push(p);
        }
    }
    out.sort_by(cmp_paths);
    out
}

/// The shortest candidate.
pub fn minimizer(x: &Pose, y: &Pose) -> CsPath {
    enumerate_candidates(x, y).into_iter().next().expect("at least one candidate exists")
}

/// Candidates sharing the same total turning (to `EPS`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurningGroup {
    pub turning: f64,
    /// Indices into the input slice.
    pub members: Vec<usize>,
}

/// What the turning proxy can say about two candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HomotopyRelation {
    /// Different total turning: never deformable into one another.
    NotHomotopic,
    /// Equal turning: not excluded, not proven.
    PossiblyHomotopic,
}

/// Partitions candidates by total turning, ordered by increasing turning.
pub fn group_by_turning(candidates: &[CsPath]) -> Vec<TurningGroup> {
    let mut idx: Vec<(f64, usize)> = candidates.iter().enumerate().map(|(i, p)| (p.turning(), i)).collect();
    idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<TurningGroup> = Vec::new();
    for (t, i) in idx {
        match groups.last_mut() {
            Some(g) if (t - g.turning).abs() <= EPS => g.members.push(i),
            _ => groups.push(TurningGroup { turning: t, members: vec![i] }),
        }
    }
    for g in &mut groups {
        g.members.sort_unstable();
    }
    groups
}

pub fn homotopy_relation(a: &CsPath, b: &CsPath) -> HomotopyRelation {
    if (a.turning() - b.turning()).abs() <= EPS {
        HomotopyRelation::PossiblyHomotopic
    } else {
        HomotopyRelation::NotHomotopic
    }
}
