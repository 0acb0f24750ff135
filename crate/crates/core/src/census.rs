//! Critical angles, class range, the domain `B` with its cells, and fiber
//! classification. All formulas work in the canonical frame where the start
//! pose is the origin with heading zero, so `c_l(x) = (0, 1)` and
//! `c_r(x) = (0, −1)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Serialize, Serializer};

use crate::error::{CensusError, Result};
use crate::frame::{canonical_frame, proximity_case_eps, OrientedCircle, Pose, ProximityCase, Sense};
use crate::geom::{normalize_angle, wrap_positive, Vec2};
use crate::EPS;

const C_LEFT: Vec2 = Vec2::new(0.0, 1.0);
const C_RIGHT: Vec2 = Vec2::new(0.0, -1.0);

/// Which auxiliary triangle produces a critical angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Sides `{2, 1, d}`: the critical configuration is a tangency of
    /// opposite-side circles.
    Short,
    /// Sides `{4, 1, d}`: the critical configuration has same-side circles
    /// at distance 4.
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalAngles {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub branch_minus: Branch,
    pub branch_plus: Branch,
    /// `ω+ ≥ ω−` (up to tolerance), i.e. the angles bound a class interval.
    pub well_defined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DomainCell {
    B1,
    B2,
    B3,
    B4,
    Origin,
    CenterSingular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberType {
    I,
    II,
    III,
    IV,
    V,
}

/// The seven circles that bound or subdivide `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Locus {
    CircA,
    CircB,
    CircC,
    CircD,
    CircE,
    CircF,
    CircG,
}

impl Locus {
    pub const ALL: [Locus; 7] =
        [Locus::CircA, Locus::CircB, Locus::CircC, Locus::CircD, Locus::CircE, Locus::CircF, Locus::CircG];

    /// Center and radius.
    pub fn circle(self) -> (Vec2, f64) {
        match self {
            Locus::CircA => (Vec2::ZERO, 4.0),
            Locus::CircB => (C_LEFT, 3.0),
            Locus::CircC => (C_RIGHT, 3.0),
            Locus::CircD => (C_LEFT, 1.0),
            Locus::CircE => (C_RIGHT, 1.0),
            Locus::CircF => (Vec2::new(0.0, 3.0), 1.0),
            Locus::CircG => (Vec2::new(0.0, -3.0), 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Locus::CircA => "circ_a",
            Locus::CircB => "circ_b",
            Locus::CircC => "circ_c",
            Locus::CircD => "circ_d",
            Locus::CircE => "circ_e",
            Locus::CircF => "circ_f",
            Locus::CircG => "circ_g",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsolatedPoint {
    None,
    ZeroLength,
    #[serde(rename = "C_point")]
    CPoint,
    #[serde(rename = "CC_point")]
    CcPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProximityCondition {
    A,
    B,
    C,
    D,
}

/// The class interval `I(y)` in radians with endpoint semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    /// The endpoint configuration is an isolated point.
    pub lo_isolated: bool,
    pub hi_isolated: bool,
}

impl ClassInterval {
    /// Whether a bounded isotopy class with nonempty interior exists at `theta`.
    pub fn contains(&self, theta: f64, tol: f64) -> bool {
        let above_lo = if self.lo_closed { theta >= self.lo - tol } else { theta > self.lo + tol };
        let below_hi = if self.hi_closed { theta <= self.hi + tol } else { theta < self.hi - tol };
        above_lo && below_hi
    }

    /// Whether `theta` is an endpoint flagged as an isolated point.
    pub fn is_isolated_at(&self, theta: f64, tol: f64) -> bool {
        (self.lo_isolated && (theta - self.lo).abs() <= tol) || (self.hi_isolated && (theta - self.hi).abs() <= tol)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Serialize)]
struct IntervalRepr {
    lo_deg: f64,
    hi_deg: f64,
    lo_closed: bool,
    hi_closed: bool,
    lo_isolated: bool,
    hi_isolated: bool,
}

impl Serialize for ClassInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntervalRepr {
            lo_deg: self.lo.to_degrees(),
            hi_deg: self.hi.to_degrees(),
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
            lo_isolated: self.lo_isolated,
            hi_isolated: self.hi_isolated,
        }
        .serialize(s)
    }
}

/// Classification of the fiber over a final position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberReport {
    /// Final position in the canonical frame of the start pose.
    pub y: Vec2,
    pub cell: DomainCell,
    pub fiber_type: FiberType,
    pub theta_rad: Option<f64>,
    pub interval: Option<ClassInterval>,
    #[serde(skip)]
    pub critical: Option<CriticalAngles>,
    #[serde(skip)]
    eps: f64,
}

impl FiberReport {
    /// Proximity condition of the space with final heading `theta`
    /// (canonical frame).
    pub fn proximity_at(&self, theta: f64) -> ProximityCondition {
        Census::with_eps(self.eps).proximity_condition(&Pose::origin(), &Pose::at(self.y, theta))
    }
}

/// Evaluator for the census formulas, parameterized by the tie tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Census {
    pub eps: f64,
}

impl Default for Census {
    fn default() -> Self {
        Census { eps: EPS }
    }
}

impl Census {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_eps(eps: f64) -> Self {
        Census { eps }
    }

    /// Angle of `y` seen from `c_l(x) = (0, 1)`.
    pub fn delta_left(&self, y: Vec2) -> Result<f64> {
        if y.dist(C_LEFT) < self.eps {
            return Err(CensusError::CenterSingular { u: y.x, v: y.y });
        }
        Ok((y.y - 1.0).atan2(y.x))
    }

    /// Angle of `y` seen from `c_r(x) = (0, −1)`.
    pub fn delta_right(&self, y: Vec2) -> Result<f64> {
        if y.dist(C_RIGHT) < self.eps {
            return Err(CensusError::CenterSingular { u: y.x, v: y.y });
        }
        Ok((y.y + 1.0).atan2(y.x))
    }

    /// Triangle angle at the adjacent-circle center of `x`, opposite the side
    /// of length 1, for sides `{2, 1, dist}` (Short) or `{4, 1, dist}` (Long).
    pub fn alpha_angle(&self, dist: f64, family: Branch) -> Result<f64> {
        let (lo, hi, k) = match family {
            Branch::Short => (1.0, 3.0, 3.0),
            Branch::Long => (3.0, 5.0, 15.0),
        };
        if !(dist >= lo - self.eps && dist <= hi + self.eps) {
            return Err(CensusError::DomainViolation { dist, family });
        }
        // The angle has a square-root singularity at both ends of the range,
        // so distances within tolerance of an end are evaluated at the end.
        let d = if (dist - lo).abs() <= self.eps {
            lo
        } else if (dist - hi).abs() <= self.eps {
            hi
        } else {
            dist
        };
        let c = (d * d - k) / (2.0 * d);
        Ok(c.clamp(-1.0, 1.0).acos())
    }

    /// Short iff `dist < 3` (within tolerance, so the junction itself is Short).
    pub fn branch_for(&self, dist: f64) -> Branch {
        if dist < 3.0 + self.eps {
            Branch::Short
        } else {
            Branch::Long
        }
    }

    /// Reduce to `(−π, π]`, mapping values within tolerance of `−π` to `π`.
    fn reduce(&self, a: f64) -> f64 {
        let r = normalize_angle(a);
        if r < -PI + self.eps {
            PI
        } else {
            r
        }
    }

    pub fn omega_minus(&self, y: Vec2) -> Result<(f64, Branch)> {
        let delta = self.delta_left(y)?;
        let d = y.dist(C_LEFT);
        let branch = self.branch_for(d);
        let alpha = self.alpha_angle(d, branch)?;
        let w = match branch {
            Branch::Short => delta + alpha - FRAC_PI_2,
            Branch::Long => delta - alpha + FRAC_PI_2,
        };
        Ok((self.reduce(w), branch))
    }

    pub fn omega_plus(&self, y: Vec2) -> Result<(f64, Branch)> {
        let delta = self.delta_right(y)?;
        let d = y.dist(C_RIGHT);
        let branch = self.branch_for(d);
        let alpha = self.alpha_angle(d, branch)?;
        let w = match branch {
            Branch::Short => delta - alpha + FRAC_PI_2,
            Branch::Long => delta + alpha - FRAC_PI_2,
        };
        Ok((self.reduce(w), branch))
    }

    pub fn critical_angles(&self, y: Vec2) -> Result<CriticalAngles> {
        let (omega_minus, branch_minus) = self.omega_minus(y)?;
        let (omega_plus, branch_plus) = self.omega_plus(y)?;
        Ok(CriticalAngles {
            omega_minus,
            omega_plus,
            branch_minus,
            branch_plus,
            well_defined: omega_plus - omega_minus >= -self.eps,
        })
    }

    /// Whether `y` lies in the closure of `B`: the part of the disk of radius
    /// 4 with `u ≥ 0` outside the open unit disks around `(0, ±1)`, together
    /// with the unit disks around `(0, ±3)` for `u ≤ 0`.
    pub fn in_closure(&self, y: Vec2) -> bool {
        let e = self.eps;
        let right = y.x >= -e && y.norm() <= 4.0 + e && y.dist(C_LEFT) >= 1.0 - e && y.dist(C_RIGHT) >= 1.0 - e;
        let left = y.x <= e && (y.dist(Vec2::new(0.0, 3.0)) <= 1.0 + e || y.dist(Vec2::new(0.0, -3.0)) <= 1.0 + e);
        right || left
    }

    /// Membership in `B` itself: the open region, plus the arcs of the unit
    /// circles around `(0, ±1)` with `u > 0`, plus the origin.
    pub fn in_domain(&self, y: Vec2) -> bool {
        let e = self.eps;
        if y.norm() <= e {
            return true;
        }
        let right = y.x > e && y.norm() < 4.0 - e && y.dist(C_LEFT) >= 1.0 - e && y.dist(C_RIGHT) >= 1.0 - e;
        let open_right = y.x > -e && y.norm() < 4.0 - e && y.dist(C_LEFT) > 1.0 + e && y.dist(C_RIGHT) > 1.0 + e;
        let left = y.x <= e && (y.dist(Vec2::new(0.0, 3.0)) < 1.0 - e || y.dist(Vec2::new(0.0, -3.0)) < 1.0 - e);
        right || open_right || left
    }

    /// `Θ(y) = ω+ − ω−` on the closure of `B`; `None` elsewhere.
    pub fn class_range(&self, y: Vec2) -> Option<f64> {
        if !self.in_closure(y) {
            return None;
        }
        let c = self.critical_angles(y).ok()?;
        let theta = c.omega_plus - c.omega_minus;
        if theta < -self.eps {
            None
        } else {
            Some(theta.max(0.0))
        }
    }

    pub fn domain_cell(&self, y: Vec2) -> DomainCell {
        if y.norm() <= self.eps {
            return DomainCell::Origin;
        }
        if y.dist(C_LEFT) < self.eps || y.dist(C_RIGHT) < self.eps {
            return DomainCell::CenterSingular;
        }
        if !self.in_domain(y) || self.class_range(y).is_none() {
            return DomainCell::B4;
        }
        match (self.branch_for(y.dist(C_LEFT)), self.branch_for(y.dist(C_RIGHT))) {
            (Branch::Short, Branch::Short) => DomainCell::B1,
            (Branch::Long, Branch::Long) => DomainCell::B3,
            _ => DomainCell::B2,
        }
    }

    /// Every locus circle passing through `y` within tolerance.
    pub fn circle_loci(&self, y: Vec2) -> Vec<Locus> {
        Locus::ALL
            .into_iter()
            .filter(|l| {
                let (c, r) = l.circle();
                (y.dist(c) - r).abs() <= self.eps
            })
            .collect()
    }

    /// Detects the three kinds of isolated points for the pair `(x, y)`.
    pub fn isolated_point(&self, x: &Pose, y: &Pose) -> IsolatedPoint {
        let (_, y) = canonical_frame(x, y);
        let x = Pose::origin();
        let e = self.eps;
        if x.approx_eq(&y, e) {
            return IsolatedPoint::ZeroLength;
        }
        for sense in [Sense::Left, Sense::Right] {
            let c = OrientedCircle::adjacent(&x, sense).center;
            if (y.position.dist(c) - 1.0).abs() <= e {
                let on_circle = OrientedCircle::adjacent(&y, sense).center.dist(c) <= e;
                let arc = turn(sense, x.heading, y.heading);
                if on_circle && arc > e && arc < PI - e {
                    return IsolatedPoint::CPoint;
                }
            }
        }
        for sense in [Sense::Left, Sense::Right] {
            let a = OrientedCircle::adjacent(&x, sense).center;
            let b = OrientedCircle::adjacent(&y, sense.opposite()).center;
            if (a.dist(b) - 2.0).abs() > e {
                continue;
            }
            let m = a.midpoint(b);
            let hm = (m - a).angle() + sense.sign() * FRAC_PI_2;
            let first = turn(sense, x.heading, hm);
            let second = turn(sense.opposite(), hm, y.heading);
            if first + second > e && first <= PI + e && second <= PI + e {
                return IsolatedPoint::CcPoint;
            }
        }
        IsolatedPoint::None
    }

    pub fn proximity_condition(&self, x: &Pose, y: &Pose) -> ProximityCondition {
        match proximity_case_eps(x, y, self.eps) {
            ProximityCase::I => ProximityCondition::A,
            ProximityCase::II | ProximityCase::III => ProximityCondition::B,
            ProximityCase::IV => {
                if self.isolated_point(x, y) != IsolatedPoint::None {
                    return ProximityCondition::D;
                }
                let (_, yc) = canonical_frame(x, y);
                match self.interval(yc.position) {
                    Some(iv) if iv.contains(yc.heading, self.eps) => ProximityCondition::D,
                    _ => ProximityCondition::C,
                }
            }
        }
    }

    /// `I(y)` for canonical `y`, when `y ∈ B` away from the origin.
    pub fn interval(&self, y: Vec2) -> Option<ClassInterval> {
        let cell = self.domain_cell(y);
        if !matches!(cell, DomainCell::B1 | DomainCell::B2 | DomainCell::B3) {
            return None;
        }
        let c = self.critical_angles(y).ok()?;
        let (lo, hi) = (c.omega_minus, c.omega_plus.max(c.omega_minus));
        if hi - lo <= self.eps {
            return Some(ClassInterval {
                lo,
                hi: lo,
                lo_closed: true,
                hi_closed: true,
                lo_isolated: true,
                hi_isolated: true,
            });
        }
        let lo_short = c.branch_minus == Branch::Short;
        let hi_short = c.branch_plus == Branch::Short;
        Some(ClassInterval {
            lo,
            hi,
            lo_closed: !lo_short,
            hi_closed: !hi_short,
            lo_isolated: lo_short,
            hi_isolated: hi_short,
        })
    }

    /// Classifies the fiber over the final position `y` (world coordinates)
    /// for the start pose `x`.
    pub fn classify_fiber(&self, x: &Pose, y: Vec2) -> Result<FiberReport> {
        if !y.is_finite() {
            return Err(CensusError::NonFinite);
        }
        let (_, yc) = canonical_frame(x, &Pose::at(y, 0.0));
        let y = yc.position;
        let cell = self.domain_cell(y);
        let fiber_type = match cell {
            DomainCell::CenterSingular => return Err(CensusError::CenterSingular { u: y.x, v: y.y }),
            DomainCell::Origin => FiberType::V,
            DomainCell::B1 => FiberType::I,
            DomainCell::B2 => FiberType::II,
            DomainCell::B3 => FiberType::III,
            DomainCell::B4 => FiberType::IV,
        };
        let (theta_rad, interval, critical) = match fiber_type {
            FiberType::V => (None, None, None),
            _ => (self.class_range(y), self.interval(y), self.critical_angles(y).ok()),
        };
        Ok(FiberReport { y, cell, fiber_type, theta_rad, interval, critical, eps: self.eps })
    }
}

/// Heading change turning in `sense` from `from` to `to`, in `[0, 2π)`.
fn turn(sense: Sense, from: f64, to: f64) -> f64 {
    let a = match sense {
        Sense::Left => wrap_positive(to - from),
        Sense::Right => wrap_positive(from - to),
    };
    if a > 2.0 * PI - 1e-12 {
        0.0
    } else {
        a
    }
}
