//! Deterministic SVG scenes and CSV heatmaps.
//!
//! Scenes live in plane coordinates; the SVG writer flips `y` so the picture
//! has the usual orientation. All numbers are printed with fixed precision so
//! equal inputs give byte-identical documents.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{Census, DomainCell};
use crate::dubins::{minimizer, CsPath};
use crate::error::{CensusError, Result};
use crate::frame::{adjacent_circles, Pose};
use crate::geom::{Piece, Vec2};
use crate::oracle::Rect;
use crate::tangency::{build_trapped_region, TrappedRegion};

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub stroke: String,
    pub fill: String,
    pub stroke_width: f64,
    pub opacity: f64,
}

impl Style {
    pub fn new(stroke: &str, fill: &str, stroke_width: f64) -> Self {
        Style { stroke: stroke.into(), fill: fill.into(), stroke_width, opacity: 1.0 }
    }
}

/// Default look of each element role; every field can be overridden from a
/// config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Styles {
    pub path: Style,
    pub minimizer: Style,
    pub circle: Style,
    pub region: Style,
    pub boundary: Style,
    pub marker: Style,
    pub label: Style,
}

impl Default for Styles {
    fn default() -> Self {
        Styles {
            path: Style::new("#4c72b0", "none", 0.025),
            minimizer: Style::new("#c44e52", "none", 0.045),
            circle: Style::new("#999999", "none", 0.015),
            region: Style { opacity: 0.35, ..Style::new("none", "#8ccf8c", 0.0) },
            boundary: Style::new("#2b7a2b", "none", 0.035),
            marker: Style::new("none", "#222222", 0.0),
            label: Style::new("none", "#222222", 0.0),
        }
    }
}

impl Styles {
    fn get_mut(&mut self, role: &str) -> Option<&mut Style> {
        Some(match role {
            "path" => &mut self.path,
            "minimizer" => &mut self.minimizer,
            "circle" => &mut self.circle,
            "region" => &mut self.region,
            "boundary" => &mut self.boundary,
            "marker" => &mut self.marker,
            "label" => &mut self.label,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Open chain of arcs and segments.
    Path { pieces: Vec<Piece>, style: Style },
    Circle { center: Vec2, radius: f64, style: Style },
    /// Closed chain, filled.
    Region { boundary: Vec<Piece>, style: Style },
    Label { at: Vec2, text: String, size: f64, style: Style },
    /// Arrowhead at a pose.
    Marker { pose: Pose, size: f64, style: Style },
}

impl Element {
    fn bbox(&self) -> Option<(Vec2, Vec2)> {
        let union = |a: (Vec2, Vec2), b: (Vec2, Vec2)| {
            (Vec2::new(a.0.x.min(b.0.x), a.0.y.min(b.0.y)), Vec2::new(a.1.x.max(b.1.x), a.1.y.max(b.1.y)))
        };
        match self {
            Element::Path { pieces, .. } | Element::Region { boundary: pieces, .. } => {
                pieces.iter().map(Piece::bbox).reduce(union)
            }
            Element::Circle { center, radius, .. } => {
                let r = Vec2::new(*radius, *radius);
                Some((*center - r, *center + r))
            }
            Element::Label { at, size, .. } => Some((*at, *at + Vec2::new(*size, *size))),
            Element::Marker { pose, size, .. } => {
                let s = Vec2::new(*size, *size);
                Some((pose.position - s, pose.position + s))
            }
        }
    }

    fn translated(&self, d: Vec2) -> Element {
        let shift = |p: &Piece| match *p {
            Piece::Arc { center, start, sweep } => Piece::Arc { center: center + d, start, sweep },
            Piece::Line { from, to } => Piece::Line { from: from + d, to: to + d },
        };
        match self {
            Element::Path { pieces, style } => {
                Element::Path { pieces: pieces.iter().map(shift).collect(), style: style.clone() }
            }
            Element::Region { boundary, style } => {
                Element::Region { boundary: boundary.iter().map(shift).collect(), style: style.clone() }
            }
            Element::Circle { center, radius, style } => {
                Element::Circle { center: *center + d, radius: *radius, style: style.clone() }
            }
            Element::Label { at, text, size, style } => {
                Element::Label { at: *at + d, text: text.clone(), size: *size, style: style.clone() }
            }
            Element::Marker { pose, size, style } => {
                Element::Marker { pose: Pose::at(pose.position + d, pose.heading), size: *size, style: style.clone() }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub elements: Vec<Element>,
    /// Explicit `(min, max)` corners; computed from the elements when `None`.
    pub viewport: Option<(Vec2, Vec2)>,
}

impl Scene {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: Element) {
        self.elements.push(e);
    }

    /// Bounding box of all elements padded by 5% on each side, or `[−1, 1]²`
    /// for an empty scene.
    pub fn viewport(&self) -> (Vec2, Vec2) {
        if let Some(v) = self.viewport {
            return v;
        }
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (a, b) in self.elements.iter().filter_map(Element::bbox) {
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return (Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0));
        }
        let w = (hi.x - lo.x).max(1e-3);
        let h = (hi.y - lo.y).max(1e-3);
        let pad = Vec2::new(0.05 * w, 0.05 * h);
        (lo - pad, hi + pad)
    }

    /// Adds `other`'s elements shifted by `offset`.
    pub fn append(&mut self, other: &Scene, offset: Vec2) {
        self.elements.extend(other.elements.iter().map(|e| e.translated(offset)));
    }
}

/// Fixed six-decimal formatting with trailing zeros removed and no `-0`.
fn num(v: f64) -> String {
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn pt(p: Vec2) -> String {
    format!("{} {}", num(p.x), num(-p.y))
}

fn style_attrs(s: &Style) -> String {
    let mut a = format!(r#"stroke="{}" fill="{}""#, s.stroke, s.fill);
    if s.stroke != "none" {
        let _ = write!(a, r#" stroke-width="{}""#, num(s.stroke_width));
    }
    if s.opacity < 1.0 {
        let _ = write!(a, r#" opacity="{}""#, num(s.opacity));
    }
    a
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Path data for a chain; arcs become SVG arc commands split into pieces of
/// at most a quarter turn.
fn path_data(pieces: &[Piece], close: bool) -> String {
    let mut d = String::new();
    let mut cur: Option<Vec2> = None;
    for p in pieces {
        let s = p.start_point();
        if cur.is_none_or(|c| c.dist(s) > 1e-9) {
            let _ = write!(d, "M {} ", pt(s));
        }
        match *p {
            Piece::Line { to, .. } => {
                let _ = write!(d, "L {} ", pt(to));
            }
            Piece::Arc { center, start, sweep } => {
                let n = ((sweep.abs() / FRAC_PI_2).ceil() as usize).max(1);
                let flag = if sweep > 0.0 { 1 } else { 0 };
                for k in 1..=n {
                    let q = center + Vec2::from_angle(start + sweep * k as f64 / n as f64);
                    let _ = write!(d, "A 1 1 0 0 {flag} {} ", pt(q));
                }
            }
        }
        cur = Some(p.end_point());
    }
    if close {
        d.push('Z');
    }
    d.trim_end().to_string()
}

/// SVG 1.1 document for a scene.
pub fn svg_scene(scene: &Scene) -> String {
    let (lo, hi) = scene.viewport();
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(lo.x),
        num(-hi.y),
        num(w),
        num(h),
        num((w * 100.0).round()),
        num((h * 100.0).round())
    );
    for e in &scene.elements {
        match e {
            Element::Path { pieces, style } => {
                let _ = writeln!(out, r#"  <path d="{}" {}/>"#, path_data(pieces, false), style_attrs(style));
            }
            Element::Region { boundary, style } => {
                let _ = writeln!(
                    out,
                    r#"  <path d="{}" fill-rule="evenodd" {}/>"#,
                    path_data(boundary, true),
                    style_attrs(style)
                );
            }
            Element::Circle { center, radius, style } => {
                let _ = writeln!(
                    out,
                    r#"  <circle cx="{}" cy="{}" r="{}" {}/>"#,
                    num(center.x),
                    num(-center.y),
                    num(*radius),
                    style_attrs(style)
                );
            }
            Element::Label { at, text, size, style } => {
                let _ = writeln!(
                    out,
                    r#"  <text x="{}" y="{}" font-size="{}" font-family="sans-serif" fill="{}">{}</text>"#,
                    num(at.x),
                    num(-at.y),
                    num(*size),
                    style.fill,
                    escape(text)
                );
            }
            Element::Marker { pose, size, style } => {
                let p = pose.position;
                let d = pose.direction();
                let n = d.perp();
                let tip = p + d * *size;
                let left = p - d * (0.6 * size) + n * (0.5 * size);
                let right = p - d * (0.6 * size) - n * (0.5 * size);
                let _ = writeln!(
                    out,
                    r#"  <polygon points="{},{} {},{} {},{}" {}/>"#,
                    num(tip.x),
                    num(-tip.y),
                    num(left.x),
                    num(-left.y),
                    num(right.x),
                    num(-right.y),
                    style_attrs(style)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn cell_name(c: DomainCell) -> &'static str {
    match c {
        DomainCell::B1 => "B1",
        DomainCell::B2 => "B2",
        DomainCell::B3 => "B3",
        DomainCell::B4 => "B4",
        DomainCell::Origin => "Origin",
        DomainCell::CenterSingular => "CenterSingular",
    }
}

/// Rows `u,v,theta_rad,cell` over an `nx × ny` grid, `v` outer and `u`
/// inner. `theta_rad` is left empty where `Θ` is undefined; boundary points
/// of `B` carry `Θ = 0` with cell `B4`.
pub fn heatmap_csv(census: &Census, bounds: &Rect, nx: usize, ny: usize) -> Result<String> {
    if nx < 2 || ny < 2 {
        return Err(CensusError::InvalidArgument(format!("resolution must be at least 2x2, got {nx}x{ny}")));
    }
    let bounds = Rect::new(bounds.u0, bounds.u1, bounds.v0, bounds.v1)?;
    let rows: Vec<Vec<(Vec2, Option<f64>, DomainCell)>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let p = bounds.node(i, j, nx, ny);
                    (p, census.class_range(p), census.domain_cell(p))
                })
                .collect()
        })
        .collect();
    let mut out = String::with_capacity(nx * ny * 64);
    out.push_str("u,v,theta_rad,cell\n");
    for row in rows {
        for (p, t, c) in row {
            let t = t.map(|t| format!("{t:.16e}")).unwrap_or_default();
            let _ = writeln!(out, "{:.16e},{:.16e},{},{}", p.x, p.y, t, cell_name(c));
        }
    }
    Ok(out)
}

/// Where a final heading sits relative to the class interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberStatus {
    InInterval,
    Isolated,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripFrame {
    /// Final heading in the canonical frame of `x`.
    pub theta: f64,
    pub status: FiberStatus,
    pub has_region: bool,
    pub scene: Scene,
}

/// Marker size and label height relative to a unit turning radius.
const MARK: f64 = 0.25;

/// Adjacent circles, candidate paths (minimizer highlighted) and endpoint markers.
pub fn paths_scene(x: &Pose, y: &Pose, paths: &[CsPath], styles: &Styles) -> Scene {
    let mut s = Scene::new();
    for p in [x, y] {
        let (l, r) = adjacent_circles(p);
        for c in [l, r] {
            s.push(Element::Circle { center: c.center, radius: 1.0, style: styles.circle.clone() });
        }
    }
    for (k, p) in paths.iter().enumerate().rev() {
        let style = if k == 0 { styles.minimizer.clone() } else { styles.path.clone() };
        s.push(Element::Path { pieces: p.pieces(), style });
    }
    s.push(Element::Marker { pose: *x, size: MARK, style: styles.marker.clone() });
    s.push(Element::Marker { pose: *y, size: MARK, style: styles.marker.clone() });
    s
}

/// Filled `Ω` with its two boundary paths and endpoint markers.
pub fn region_scene(region: &TrappedRegion, styles: &Styles) -> Scene {
    let mut s = Scene::new();
    s.push(Element::Region { boundary: region.boundary.clone(), style: styles.region.clone() });
    s.push(Element::Path { pieces: region.w1.pieces(), style: styles.boundary.clone() });
    s.push(Element::Path { pieces: region.w2.pieces(), style: styles.boundary.clone() });
    s.push(Element::Marker { pose: region.start, size: MARK, style: styles.marker.clone() });
    s.push(Element::Marker { pose: region.end, size: MARK, style: styles.marker.clone() });
    s
}

/// Headings sampled by [`fiber_strip`]: `0` for one frame, otherwise `n`
/// equally spaced values ending at `π`.
pub fn strip_headings(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n).map(|k| -PI + (k + 1) as f64 * 2.0 * PI / n as f64).collect()
}

/// One scene per sampled final heading at the fixed final position `y`
/// (world coordinates), annotated with the heading's fiber status.
pub fn fiber_strip(census: &Census, x: &Pose, y: Vec2, n: usize, styles: &Styles) -> Result<Vec<StripFrame>> {
    if n == 0 {
        return Err(CensusError::InvalidArgument("frame count must be at least 1".into()));
    }
    let report = census.classify_fiber(x, y)?;
    let mut frames = Vec::with_capacity(n);
    for theta in strip_headings(n) {
        let yp = Pose::at(y, x.heading + theta);
        let status = if census.isolated_point(x, &yp) != crate::census::IsolatedPoint::None {
            FiberStatus::Isolated
        } else if report.interval.is_some_and(|iv| iv.contains(theta, census.eps)) {
            FiberStatus::InInterval
        } else {
            FiberStatus::Outside
        };
        let mut scene = Scene::new();
        let region =
            if status == FiberStatus::InInterval { build_trapped_region(x, &yp).ok() } else { None };
        if let Some(r) = &region {
            scene.append(&region_scene(r, styles), Vec2::ZERO);
        }
        let m = minimizer(x, &yp);
        scene.append(&paths_scene(x, &yp, std::slice::from_ref(&m), styles), Vec2::ZERO);
        let label = format!("{:.2}° {:?}", theta.to_degrees(), status);
        let (lo, _) = scene.viewport();
        scene.push(Element::Label { at: lo, text: label, size: 0.3, style: styles.label.clone() });
        frames.push(StripFrame { theta, status, has_region: region.is_some(), scene });
    }
    Ok(frames)
}

/// Lays frames side by side in one scene.
pub fn strip_scene(frames: &[StripFrame]) -> Scene {
    let mut out = Scene::new();
    let mut x = 0.0;
    for f in frames {
        let (lo, hi) = f.scene.viewport();
        out.append(&f.scene, Vec2::new(x - lo.x, 0.0));
        x += hi.x - lo.x;
    }
    out
}

/// Settings read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub eps: f64,
    pub tol: f64,
    pub styles: Styles,
}

impl Default for Config {
    fn default() -> Self {
        Config { eps: crate::EPS, tol: 1e-7, styles: Styles::default() }
    }
}

impl Config {
    /// Keys: `eps`, `tol`, and `style.<role>.<stroke|fill|width|opacity>`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut seen = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| CensusError::InvalidArgument(format!("config line {}: {msg}", no + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.insert(key.to_string(), ()).is_some() {
                return Err(bad(&format!("duplicate key {key}")));
            }
            let number = || value.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0);
            match key.split('.').collect::<Vec<_>>().as_slice() {
                ["eps"] => cfg.eps = number().filter(|v| *v > 0.0).ok_or_else(|| bad("eps must be positive"))?,
                ["tol"] => cfg.tol = number().filter(|v| *v > 0.0).ok_or_else(|| bad("tol must be positive"))?,
                ["style", role, field] => {
                    let style = cfg.styles.get_mut(role).ok_or_else(|| bad(&format!("unknown style {role}")))?;
                    match *field {
                        "stroke" => style.stroke = value.to_string(),
                        "fill" => style.fill = value.to_string(),
                        "width" => style.stroke_width = number().ok_or_else(|| bad("width must be a number"))?,
                        "opacity" => {
                            style.opacity =
                                number().filter(|v| *v <= 1.0).ok_or_else(|| bad("opacity must be in [0, 1]"))?
                        }
                        _ => return Err(bad(&format!("unknown style field {field}"))),
                    }
                }
                _ => return Err(bad(&format!("unknown key {key}"))),
            }
        }
        Ok(cfg)
    }
}
