//! Census engine for spaces of planar bounded curvature paths (curvature bound 1).
//!
//! Given an initial pose `x` and a final position `y`, the final heading `θ`
//! sweeps a one-parameter family of path spaces (a *fiber*). This crate:
//!
//! - enumerates the CSC/CCC candidate paths between two poses ([`dubins`]),
//! - builds the CCC tangent-circle construction and the trapped region bounded
//!   by the RLR/LRL paths `w1`, `w2` ([`tangency`]),
//! - evaluates the critical angles `ω−`, `ω+`, the class range `Θ = ω+ − ω−`,
//!   the domain cells `B1..B4` and the fiber type `I..V` ([`census`]),
//! - cross-checks the closed forms against scan-and-bisect root finding on the
//!   circle tangency conditions ([`oracle`]),
//! - renders deterministic SVG scenes and CSV heatmaps ([`emit`]).
//!
//! All lengths are in units of the minimum turning radius and all angles are
//! radians; the census formulas work in the canonical frame where `x` sits at
//! the origin heading along `+u`.

pub mod census;
pub mod cli;
pub mod dubins;
pub mod emit;
pub mod error;
pub mod frame;
pub mod geom;
pub mod oracle;
pub mod tangency;

pub use census::{Census, CriticalAngles, DomainCell, FiberReport, FiberType, IsolatedPoint, ProximityCondition};
pub use dubins::{CsPath, PathType, Segment};
pub use error::{CensusError, Result};
pub use frame::{OrientedCircle, Pose, RigidMotion, Sense};
pub use geom::Vec2;
pub use tangency::{TangencyTriple, TrappedRegion};

/// Default tolerance for distance-threshold ties and endpoint comparisons.
pub const EPS: f64 = 1e-9;
