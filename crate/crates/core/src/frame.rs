//! Oriented points, adjacent circles and the rigid motion that moves the
//! start pose to the origin with heading zero.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CensusError, Result};
use crate::geom::{normalize_angle, Vec2};
use crate::EPS;

/// A point of the plane together with a unit tangent direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    /// Heading in radians, always in `(−π, π]`.
    pub heading: f64,
}

impl Pose {
    /// Builds a pose, normalizing the heading.
    ///
    /// # Panics
    /// If any coordinate is not finite. Use [`Pose::try_new`] for untrusted input.
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self::try_new(x, y, heading).expect("pose coordinates must be finite")
    }

    pub fn try_new(x: f64, y: f64, heading: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && heading.is_finite()) {
            return Err(CensusError::NonFinite);
        }
        Ok(Pose { position: Vec2::new(x, y), heading: normalize_angle(heading) })
    }

    pub fn at(position: Vec2, heading: f64) -> Self {
        Self::new(position.x, position.y, heading)
    }

    pub fn origin() -> Self {
        Pose { position: Vec2::ZERO, heading: 0.0 }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }

    /// Same position, heading turned by π.
    pub fn reversed(&self) -> Self {
        Pose::at(self.position, self.heading + std::f64::consts::PI)
    }

    /// Position distance plus wrapped heading distance.
    pub fn distance_to(&self, other: &Pose) -> (f64, f64) {
        (
            self.position.dist(other.position),
            normalize_angle(self.heading - other.heading).abs(),
        )
    }

    /// True if both position and heading agree within `tol`.
    pub fn approx_eq(&self, other: &Pose, tol: f64) -> bool {
        let (dp, dh) = self.distance_to(other);
        dp <= tol && dh <= tol
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}, {}), {})", self.position.x, self.position.y, self.heading)
    }
}

#[derive(Serialize, Deserialize)]
struct PoseRepr {
    x: f64,
    y: f64,
    theta_rad: f64,
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PoseRepr { x: self.position.x, y: self.position.y, theta_rad: self.heading }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PoseRepr::deserialize(d)?;
        Pose::try_new(r.x, r.y, r.theta_rad).map_err(serde::de::Error::custom)
    }
}

/// Turning sense of a unit circle: `Left` is counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Sense {
    /// `+1` for left turns, `−1` for right turns.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Left => 1.0,
            Sense::Right => -1.0,
        }
    }

    pub fn opposite(self) -> Sense {
        match self {
            Sense::Left => Sense::Right,
            Sense::Right => Sense::Left,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Sense::Left => 'L',
            Sense::Right => 'R',
        }
    }
}

/// Unit circle traversed in a fixed sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedCircle {
    pub center: Vec2,
    pub sense: Sense,
}

impl OrientedCircle {
    pub const RADIUS: f64 = 1.0;

    /// The adjacent circle of `p` on the given side.
    pub fn adjacent(p: &Pose, sense: Sense) -> Self {
        let (s, c) = p.heading.sin_cos();
        let offset = match sense {
            Sense::Left => Vec2::new(-s, c),
            Sense::Right => Vec2::new(s, -c),
        };
        OrientedCircle { center: p.position + offset, sense }
    }
}

/// Left and right adjacent circles of a pose.
pub fn adjacent_circles(p: &Pose) -> (OrientedCircle, OrientedCircle) {
    (OrientedCircle::adjacent(p, Sense::Left), OrientedCircle::adjacent(p, Sense::Right))
}

/// A rotation about the origin followed by a translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: f64,
    pub translation: Vec2,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion { rotation: 0.0, translation: Vec2::ZERO }
    }

    pub fn new(rotation: f64, translation: Vec2) -> Self {
        RigidMotion { rotation, translation }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        p.rotate(self.rotation) + self.translation
    }

    pub fn apply_pose(&self, p: &Pose) -> Pose {
        Pose::at(self.apply(p.position), p.heading + self.rotation)
    }

    pub fn inverse(&self) -> Self {
        RigidMotion { rotation: -self.rotation, translation: -self.translation.rotate(-self.rotation) }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidMotion) -> Self {
        RigidMotion {
            rotation: self.rotation + other.rotation,
            translation: other.translation.rotate(self.rotation) + self.translation,
        }
    }
}

/// The motion taking `x` to the origin with heading zero, and `y` expressed
/// in that frame.
pub fn canonical_frame(x: &Pose, y: &Pose) -> (RigidMotion, Pose) {
    let rotation = -x.heading;
    let motion = RigidMotion { rotation, translation: -x.position.rotate(rotation) };
    (motion, motion.apply_pose(y))
}

/// Euclidean distances between the adjacent-circle centers of two poses.
/// The first letter refers to `x`, the second to `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterDistances {
    pub ll: f64,
    pub rr: f64,
    pub lr: f64,
    pub rl: f64,
}

pub fn center_distances(x: &Pose, y: &Pose) -> CenterDistances {
    let (xl, xr) = adjacent_circles(x);
    let (yl, yr) = adjacent_circles(y);
    CenterDistances {
        ll: xl.center.dist(yl.center),
        rr: xr.center.dist(yr.center),
        lr: xl.center.dist(yr.center),
        rl: xr.center.dist(yl.center),
    }
}

/// Which of the four same-side separation patterns holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProximityCase {
    /// Both same-side distances at least 4.
    I,
    /// Left pair closer than 4, right pair at least 4.
    II,
    /// Left pair at least 4, right pair closer than 4.
    III,
    /// Both same-side pairs closer than 4.
    IV,
}

pub fn proximity_case(x: &Pose, y: &Pose) -> ProximityCase {
    proximity_case_eps(x, y, EPS)
}

/// Distances within `eps` below 4 count as 4.
pub fn proximity_case_eps(x: &Pose, y: &Pose, eps: f64) -> ProximityCase {
    let d = center_distances(x, y);
    let far_l = d.ll >= 4.0 - eps;
    let far_r = d.rr >= 4.0 - eps;
    match (far_l, far_r) {
        (true, true) => ProximityCase::I,
        (false, true) => ProximityCase::II,
        (true, false) => ProximityCase::III,
        (false, false) => ProximityCase::IV,
    }
}
