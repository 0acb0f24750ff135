//! Independent checks of the closed forms: critical angles recovered as roots
//! of circle-distance conditions, and the maximum of `Θ` located by grid search.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{Branch, Census};
use crate::error::{CensusError, Result};
use crate::frame::{OrientedCircle, Pose, Sense};
use crate::geom::Vec2;

/// Which adjacent-circle pair is measured: first letter for `x`, second for `y_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CirclePair {
    LL,
    RR,
    LR,
    RL,
}

impl CirclePair {
    fn senses(self) -> (Sense, Sense) {
        match self {
            CirclePair::LL => (Sense::Left, Sense::Left),
            CirclePair::RR => (Sense::Right, Sense::Right),
            CirclePair::LR => (Sense::Left, Sense::Right),
            CirclePair::RL => (Sense::Right, Sense::Left),
        }
    }
}

/// Center distance `target` for `pair`: 2 (tangency) for opposite-side pairs,
/// 4 for same-side pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangencyCondition {
    pair: CirclePair,
    target: f64,
}

impl TangencyCondition {
    pub fn new(pair: CirclePair, target: f64) -> Result<Self> {
        let ok = match pair {
            CirclePair::LR | CirclePair::RL => target == 2.0,
            CirclePair::LL | CirclePair::RR => target == 4.0,
        };
        if !ok {
            return Err(CensusError::InvalidArgument(format!("target {target} is not valid for pair {pair:?}")));
        }
        Ok(TangencyCondition { pair, target })
    }

    /// The condition met at a critical angle of the given branch.
    pub fn for_critical(lower: bool, branch: Branch) -> Self {
        let (pair, target) = match (lower, branch) {
            (true, Branch::Short) => (CirclePair::LR, 2.0),
            (true, Branch::Long) => (CirclePair::LL, 4.0),
            (false, Branch::Short) => (CirclePair::RL, 2.0),
            (false, Branch::Long) => (CirclePair::RR, 4.0),
        };
        TangencyCondition { pair, target }
    }

    pub fn pair(&self) -> CirclePair {
        self.pair
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    /// `d(c(x), c(y_θ)) − target` with `x` canonical.
    pub fn residual(&self, y: Vec2, theta: f64) -> f64 {
        let (cx, cy) = self.centers(y, theta);
        cx.dist(cy) - self.target
    }

    fn centers(&self, y: Vec2, theta: f64) -> (Vec2, Vec2) {
        let (sx, sy) = self.pair.senses();
        (
            OrientedCircle::adjacent(&Pose::origin(), sx).center,
            OrientedCircle::adjacent(&Pose { position: y, heading: theta }, sy).center,
        )
    }

    /// Derivative of the squared center distance with respect to `θ`.
    fn dsq(&self, y: Vec2, theta: f64) -> f64 {
        let (cx, cy) = self.centers(y, theta);
        let (_, sy) = self.pair.senses();
        // c_y(θ) = y + s·(−sin θ, cos θ), so c_y'(θ) = −s·(cos θ, sin θ).
        let dc = Vec2::from_angle(theta) * (-sy.sign());
        2.0 * (cy - cx).dot(dc)
    }
}

/// How the residual behaves at a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootKind {
    /// Residual goes from negative to positive.
    Rising,
    Falling,
    /// Double root: the distance touches the target at a local extremum.
    Tangential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub theta: f64,
    pub kind: RootKind,
}

pub const SCAN_STEP: f64 = 1e-3;
const BISECT_TOL: f64 = 1e-12;
const TOUCH_TOL: f64 = 1e-9;
/// Distance from `±π` kept clear of the scan.
const EDGE: f64 = 1e-9;
/// Roots closer than this to `±π` are dropped: there the residual is
/// flat to within rounding and the configuration is excluded anyway.
const EXCLUDED: f64 = 1e-7;

fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut fa = f(a);
    while b - a > BISECT_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// All `θ ∈ (−π, π)` at which the condition holds.
///
/// The scan first locates the critical points of the squared distance, which
/// splits the circle into monotone pieces; each piece holds at most one simple
/// root. Critical points where the distance touches the target are reported
/// as tangential roots.
pub fn critical_angle_roots(y: Vec2, cond: &TangencyCondition) -> Vec<Root> {
    let lo = -PI + EDGE;
    let hi = PI - EDGE;
    let n = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let at = |k: usize| lo + (hi - lo) * k as f64 / n as f64;
    let f = |t: f64| cond.residual(y, t);
    let g = |t: f64| cond.dsq(y, t);

    let mut breaks = vec![lo];
    let mut prev = g(lo);
    for k in 1..=n {
        let t = at(k);
        let cur = g(t);
        if prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0) {
            breaks.push(bisect(at(k - 1), t, g));
        } else if cur == 0.0 && k < n {
            breaks.push(t);
        }
        prev = cur;
    }
    breaks.push(hi);

    let mut roots: Vec<Root> = Vec::new();
    let mut touches: Vec<f64> = Vec::new();
    for w in breaks.windows(3) {
        let (a, c, b) = (w[0], w[1], w[2]);
        let fc = f(c);
        let (fa, fb) = (f(a), f(b));
        if fc.abs() <= TOUCH_TOL && (fa < 0.0) == (fb < 0.0) && fa != 0.0 && fb != 0.0 {
            touches.push(c);
            roots.push(Root { theta: c, kind: RootKind::Tangential });
        }
    }
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (f(a), f(b));
        let t = if fa == 0.0 {
            a
        } else if fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        } else {
            bisect(a, b, f)
        };
        if touches.iter().any(|&c| (c - t).abs() < 1e-4) {
            continue;
        }
        let kind = if fa < fb { RootKind::Rising } else { RootKind::Falling };
        roots.push(Root { theta: t, kind });
    }
    roots.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    roots.dedup_by(|b, a| (a.theta - b.theta).abs() <= BISECT_TOL);
    roots.retain(|r| r.theta.abs() < PI - EXCLUDED);
    roots
}

/// Closed form versus oracle for one final position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub y: Vec2,
    pub closed_form: (f64, f64),
    pub oracle: (Option<f64>, Option<f64>),
    /// Condition residuals evaluated at the closed-form angles.
    pub residuals: (f64, f64),
    pub agree: bool,
}

impl VerifyReport {
    pub fn max_error(&self) -> f64 {
        let e = |c: f64, o: Option<f64>| o.map_or(f64::INFINITY, |o| (c - o).abs());
        e(self.closed_form.0, self.oracle.0).max(e(self.closed_form.1, self.oracle.1))
    }
}

fn pick(roots: &[Root], want: RootKind, near: f64) -> Option<f64> {
    roots
        .iter()
        .filter(|r| r.kind == want || r.kind == RootKind::Tangential)
        .map(|r| r.theta)
        .min_by(|a, b| (a - near).abs().total_cmp(&(b - near).abs()))
}

/// Recovers `ω±` as roots of the tangency condition matching each branch and
/// compares them with the closed forms.
pub fn verify_class_range(census: &Census, y: Vec2, tol: f64) -> Result<VerifyReport> {
    let c = census.critical_angles(y)?;
    let lower = TangencyCondition::for_critical(true, c.branch_minus);
    let upper = TangencyCondition::for_critical(false, c.branch_plus);
    // Entering the interval, the opposite-side pair separates (Rising) or the
    // same-side pair closes in (Falling); leaving it reverses both.
    let want_lo = if c.branch_minus == Branch::Short { RootKind::Rising } else { RootKind::Falling };
    let want_hi = if c.branch_plus == Branch::Short { RootKind::Falling } else { RootKind::Rising };
    let o_lo = pick(&critical_angle_roots(y, &lower), want_lo, c.omega_minus);
    let o_hi = pick(&critical_angle_roots(y, &upper), want_hi, c.omega_plus);
    let mut report = VerifyReport {
        y,
        closed_form: (c.omega_minus, c.omega_plus),
        oracle: (o_lo, o_hi),
        residuals: (lower.residual(y, c.omega_minus), upper.residual(y, c.omega_plus)),
        agree: false,
    };
    report.agree = report.max_error() <= tol;
    Ok(report)
}

/// Axis-aligned rectangle `[u0, u1] × [v0, v1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self> {
        let finite = [u0, u1, v0, v1].iter().all(|t| t.is_finite());
        if !finite || u1 <= u0 || v1 <= v0 {
            return Err(CensusError::InvalidArgument(format!("degenerate bounds [{u0}, {u1}] x [{v0}, {v1}]")));
        }
        Ok(Rect { u0, u1, v0, v1 })
    }

    /// Grid nodes per axis for spacing `step`.
    pub fn nodes(&self, step: f64) -> (usize, usize) {
        let nx = ((self.u1 - self.u0) / step).round() as usize + 1;
        let ny = ((self.v1 - self.v0) / step).round() as usize + 1;
        (nx.max(2), ny.max(2))
    }

    pub fn node(&self, i: usize, j: usize, nx: usize, ny: usize) -> Vec2 {
        Vec2::new(
            self.u0 + (self.u1 - self.u0) * i as f64 / (nx - 1) as f64,
            self.v0 + (self.v1 - self.v0) * j as f64 / (ny - 1) as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    /// Best grid node and its value.
    pub grid_location: Vec2,
    pub grid_value: f64,
    /// After local refinement.
    pub location: Vec2,
    pub value: f64,
}

/// Grid argmax of `Θ` over `bounds`, followed by a shrinking local search
/// down to a spacing of about `1e−12`. Returns `None` if no node lies in the
/// domain of `Θ`. Ties keep the node with the smallest `(v, u)` indices, so
/// the result does not depend on the thread count.
pub fn theta_extremum(census: &Census, bounds: &Rect, step: f64) -> Result<Option<Extremum>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CensusError::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let (nx, ny) = bounds.nodes(step);
    let best = (0..ny)
        .into_par_iter()
        .filter_map(|j| {
            let mut row_best: Option<(f64, usize, usize)> = None;
            for i in 0..nx {
                if let Some(t) = census.class_range(bounds.node(i, j, nx, ny)) {
                    if row_best.is_none_or(|(b, _, _)| t > b) {
                        row_best = Some((t, j, i));
                    }
                }
            }
            row_best
        })
        .reduce_with(|a, b| {
            if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                b
            } else {
                a
            }
        });
    let Some((grid_value, j, i)) = best else { return Ok(None) };
    let grid_location = bounds.node(i, j, nx, ny);

    let mut location = grid_location;
    let mut value = grid_value;
    let mut h = step;
    while h > 1e-12 {
        let center = location;
        for dj in -10..=10 {
            for di in -10..=10 {
                let p = center + Vec2::new(di as f64 * h, dj as f64 * h);
                if let Some(t) = census.class_range(p) {
                    if t > value {
                        value = t;
                        location = p;
                    }
                }
            }
        }
        h /= 4.0;
    }
    Ok(Some(Extremum { grid_location, grid_value, location, value }))
}
