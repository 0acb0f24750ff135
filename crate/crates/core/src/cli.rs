//! Command-line front end. [`run`] takes the argument vector and output
//! streams so it can be driven from tests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::census::{Census, DomainCell, FiberReport};
use crate::dubins::{enumerate_candidates, group_by_turning, CsPath, Segment};
use crate::emit::{fiber_strip, heatmap_csv, paths_scene, region_scene, strip_scene, svg_scene, Config};
use crate::error::CensusError;
use crate::frame::Pose;
use crate::geom::Vec2;
use crate::oracle::{theta_extremum, verify_class_range, Rect, VerifyReport};
use crate::tangency::build_trapped_region;

#[derive(Debug, Parser)]
#[command(name = "curvature-census", version, about = "Census of bounded curvature path spaces")]
struct Cli {
    /// Read and print angles in degrees instead of radians.
    #[arg(long, global = true)]
    deg: bool,
    /// Emit JSON instead of a text report.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for grid computations (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// key = value file with tolerances and styles.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate Dubins candidates between two poses.
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(num_args = 6, value_names = ["X1", "Y1", "T1", "X2", "Y2", "T2"], required = true)]
        poses: Vec<f64>,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Classify the fiber over a final position.
    #[command(allow_negative_numbers = true)]
    Census {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Sample the fiber over a final position and draw each frame.
    #[command(allow_negative_numbers = true)]
    Fiber {
        #[command(flatten)]
        point: PointArgs,
        /// Number of sampled final headings.
        #[arg(long, default_value_t = 7)]
        frames: usize,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Build the trapped region bounded by the RLR and LRL paths.
    #[command(allow_negative_numbers = true)]
    Region {
        #[arg(num_args = 6, value_names = ["X1", "Y1", "T1", "X2", "Y2", "T2"], required = true)]
        poses: Vec<f64>,
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Tabulate the class range over a grid as CSV.
    #[command(allow_negative_numbers = true)]
    Heatmap {
        #[arg(long, num_args = 4, value_names = ["U0", "U1", "V0", "V1"], default_values_t = [-5.0, 5.0, -5.0, 5.0])]
        bounds: Vec<f64>,
        /// Nodes per axis: one value for a square grid, or NX NY.
        #[arg(long, num_args = 1..=2, value_names = ["NX", "NY"], default_values_t = [101])]
        res: Vec<usize>,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Compare closed-form critical angles with the root-finding oracle.
    Verify {
        /// Grid nodes per axis over [-4, 4]^2; nodes outside the domain are skipped.
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Largest accepted angle difference in radians.
        #[arg(long)]
        tol: Option<f64>,
        /// Also locate the maximum of the class range with this grid step.
        #[arg(long, value_name = "STEP")]
        extremum: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(value_names = ["U", "V"], num_args = 2, required = true)]
    point: Vec<f64>,
    /// Start pose; defaults to the origin heading along +u.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "T"])]
    start: Option<Vec<f64>>,
}

enum Failure {
    Domain(CensusError),
    Io(String),
    /// Already reported; carries the exit code.
    Exit(i32),
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

struct Ctx {
    deg: bool,
    json: bool,
    cfg: Config,
    census: Census,
}

impl Ctx {
    fn angle_in(&self, a: f64) -> f64 {
        if self.deg {
            a.to_radians()
        } else {
            a
        }
    }

    fn angle_out(&self, a: f64) -> String {
        if self.deg {
            fixed(a.to_degrees(), 4)
        } else {
            fixed(a, 6)
        }
    }

    fn unit(&self) -> &'static str {
        if self.deg {
            "deg"
        } else {
            "rad"
        }
    }

    fn pose(&self, v: &[f64]) -> std::result::Result<Pose, CensusError> {
        Pose::try_new(v[0], v[1], self.angle_in(v[2]))
    }

    fn start(&self, p: &PointArgs) -> std::result::Result<Pose, CensusError> {
        p.start.as_deref().map_or(Ok(Pose::origin()), |s| self.pose(s))
    }

    fn word(&self, p: &CsPath) -> String {
        if p.segments.is_empty() {
            return "-".into();
        }
        p.segments
            .iter()
            .map(|s| match *s {
                Segment::Arc { sense, angle } => format!("{}{}", sense.letter(), self.angle_out(angle)),
                Segment::Line { length } => format!("S{length:.6}"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Fixed-point formatting that never prints a negative zero.
fn fixed(v: f64, prec: usize) -> String {
    let s = format!("{v:.prec$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn print_json<W: Write, T: Serialize>(out: &mut W, v: &T) -> CliResult {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn solve<W: Write>(ctx: &Ctx, poses: &[f64], svg: Option<&Path>, out: &mut W) -> CliResult {
    let x = ctx.pose(&poses[..3])?;
    let y = ctx.pose(&poses[3..])?;
    let cands = enumerate_candidates(&x, &y);
    let groups = group_by_turning(&cands);
    if ctx.json {
        let list: Vec<_> = cands
            .iter()
            .enumerate()
            .map(|(i, p)| json!({"index": i, "type": p.path_type, "length": p.length(), "turning": p.turning(), "path": p}))
            .collect();
        print_json(out, &json!({"start": x, "end": y, "candidates": list, "turning_groups": groups}))?;
    } else {
        writeln!(out, "{} candidates from {} to {}", cands.len(), x, y)?;
        writeln!(out, "{:>2}  {:<10}  {:>10}  {:>10}  segments ({})", "#", "type", "length", "turning", ctx.unit())?;
        for (i, p) in cands.iter().enumerate() {
            writeln!(
                out,
                "{:>2}  {:<10}  {:>10.6}  {:>10}  {}",
                i,
                p.path_type.to_string(),
                p.length(),
                ctx.angle_out(p.turning()),
                ctx.word(p)
            )?;
        }
        for g in &groups {
            let members: Vec<String> = g.members.iter().map(|m| m.to_string()).collect();
            writeln!(out, "turning {}: {{{}}}", ctx.angle_out(g.turning), members.join(", "))?;
        }
    }
    if let Some(path) = svg {
        write_file(path, &svg_scene(&paths_scene(&x, &y, &cands, &ctx.cfg.styles)))?;
    }
    Ok(())
}

fn census_text<W: Write>(ctx: &Ctx, r: &FiberReport, out: &mut W) -> CliResult {
    writeln!(out, "y (canonical): ({}, {})", r.y.x, r.y.y)?;
    writeln!(out, "cell: {:?}", r.cell)?;
    writeln!(out, "fiber type: {:?}", r.fiber_type)?;
    if let Some(c) = &r.critical {
        writeln!(out, "omega-: {} {} ({:?})", ctx.angle_out(c.omega_minus), ctx.unit(), c.branch_minus)?;
        writeln!(out, "omega+: {} {} ({:?})", ctx.angle_out(c.omega_plus), ctx.unit(), c.branch_plus)?;
    }
    match r.theta_rad {
        Some(t) => writeln!(out, "class range: {} {}", ctx.angle_out(t), ctx.unit())?,
        None => writeln!(out, "class range: undefined")?,
    }
    match &r.interval {
        Some(iv) => {
            let mut marks = Vec::new();
            if iv.lo_isolated {
                marks.push("lower");
            }
            if iv.hi_isolated && (iv.hi != iv.lo || !iv.lo_isolated) {
                marks.push("upper");
            }
            writeln!(
                out,
                "interval: {}{}, {}{}{}",
                if iv.lo_closed { '[' } else { '(' },
                ctx.angle_out(iv.lo),
                ctx.angle_out(iv.hi),
                if iv.hi_closed { ']' } else { ')' },
                if marks.is_empty() { String::new() } else { format!("  isolated point at {} end", marks.join(" and ")) }
            )?;
        }
        None => writeln!(out, "interval: empty")?,
    }
    let loci: Vec<&str> = ctx.census.circle_loci(r.y).into_iter().map(|l| l.name()).collect();
    writeln!(out, "loci: {}", if loci.is_empty() { "-".to_string() } else { loci.join(", ") })?;
    Ok(())
}

fn fiber<W: Write>(ctx: &Ctx, p: &PointArgs, frames: usize, svg: Option<&Path>, out: &mut W) -> CliResult {
    let x = ctx.start(p)?;
    let y = Vec2::new(p.point[0], p.point[1]);
    let strip = fiber_strip(&ctx.census, &x, y, frames, &ctx.cfg.styles)?;
    if ctx.json {
        let list: Vec<_> = strip
            .iter()
            .map(|f| json!({"theta_rad": f.theta, "status": f.status, "region": f.has_region}))
            .collect();
        print_json(out, &json!({"frames": list}))?;
    } else {
        for f in &strip {
            writeln!(
                out,
                "theta {:>12} {}  {:?}{}",
                ctx.angle_out(f.theta),
                ctx.unit(),
                f.status,
                if f.has_region { "  region" } else { "" }
            )?;
        }
    }
    if let Some(path) = svg {
        write_file(path, &svg_scene(&strip_scene(&strip)))?;
    }
    Ok(())
}

fn region<W: Write>(ctx: &Ctx, poses: &[f64], svg: Option<&Path>, out: &mut W) -> CliResult {
    let x = ctx.pose(&poses[..3])?;
    let y = ctx.pose(&poses[3..])?;
    let r = build_trapped_region(&x, &y)?;
    if ctx.json {
        print_json(out, &r)?;
    } else {
        writeln!(out, "w1 (RLR): {}", ctx.word(&r.w1))?;
        writeln!(out, "w2 (LRL): {}", ctx.word(&r.w2))?;
        writeln!(out, "area: {:.6}", r.area)?;
        if r.alternates > 0 {
            writeln!(out, "other simple branch pairs: {}", r.alternates)?;
        }
    }
    if let Some(path) = svg {
        write_file(path, &svg_scene(&region_scene(&r, &ctx.cfg.styles)))?;
    }
    Ok(())
}

fn heatmap<W: Write>(ctx: &Ctx, bounds: &[f64], res: &[usize], csv: Option<&Path>, out: &mut W) -> CliResult {
    let rect = Rect::new(bounds[0], bounds[1], bounds[2], bounds[3])?;
    let (nx, ny) = (res[0], *res.get(1).unwrap_or(&res[0]));
    let text = heatmap_csv(&ctx.census, &rect, nx, ny)?;
    match csv {
        Some(path) => write_file(path, &text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn verify<W: Write>(ctx: &Ctx, grid: usize, tol: Option<f64>, extremum: Option<f64>, out: &mut W) -> CliResult {
    if grid < 2 {
        return Err(CensusError::InvalidArgument("grid must be at least 2".into()).into());
    }
    let tol = tol.unwrap_or(ctx.cfg.tol);
    let rect = Rect::new(-4.0, 4.0, -4.0, 4.0)?;
    let census = ctx.census;
    let points: Vec<Vec2> = (0..grid)
        .flat_map(|j| (0..grid).map(move |i| rect.node(i, j, grid, grid)))
        .filter(|&p| census.in_domain(p) && !matches!(census.domain_cell(p), DomainCell::Origin | DomainCell::B4))
        .collect();
    let reports: Vec<VerifyReport> =
        points.par_iter().map(|&p| verify_class_range(&census, p, tol)).collect::<Result<_, _>>()?;
    let max_error = reports.iter().map(VerifyReport::max_error).fold(0.0, f64::max);
    let max_residual = reports.iter().map(|r| r.residuals.0.abs().max(r.residuals.1.abs())).fold(0.0, f64::max);
    let failures: Vec<&VerifyReport> = reports.iter().filter(|r| !r.agree).collect();
    let ext = match extremum {
        Some(step) => theta_extremum(&census, &Rect::new(-5.0, 5.0, -5.0, 5.0)?, step)?,
        None => None,
    };
    if ctx.json {
        print_json(
            out,
            &json!({
                "points": reports.len(),
                "tol": tol,
                "max_error": max_error,
                "max_residual": max_residual,
                "agree": failures.is_empty(),
                "failures": failures,
                "extremum": ext,
            }),
        )?;
    } else {
        writeln!(out, "checked {} points, tolerance {tol:e} rad", reports.len())?;
        writeln!(out, "max |closed form - oracle|: {max_error:e} rad")?;
        writeln!(out, "max tangency residual: {max_residual:e}")?;
        for f in &failures {
            writeln!(out, "disagree at ({}, {}): closed {:?} oracle {:?}", f.y.x, f.y.y, f.closed_form, f.oracle)?;
        }
        if let Some(e) = ext {
            writeln!(
                out,
                "class range maximum {} {} at ({}, {})",
                ctx.angle_out(e.value),
                ctx.unit(),
                fixed(e.location.x, 8),
                fixed(e.location.y, 8)
            )?;
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Exit(1))
    }
}

fn dispatch<W: Write>(cli: Cli, ctx: &Ctx, out: &mut W) -> CliResult {
    match cli.command {
        Command::Solve { poses, svg } => solve(ctx, &poses, svg.as_deref(), out),
        Command::Census { point } => {
            let x = ctx.start(&point)?;
            let r = ctx.census.classify_fiber(&x, Vec2::new(point.point[0], point.point[1]))?;
            if ctx.json {
                print_json(out, &r)
            } else {
                census_text(ctx, &r, out)
            }
        }
        Command::Fiber { point, frames, svg } => fiber(ctx, &point, frames, svg.as_deref(), out),
        Command::Region { poses, svg } => region(ctx, &poses, svg.as_deref(), out),
        Command::Heatmap { bounds, res, csv } => heatmap(ctx, &bounds, &res, csv.as_deref(), out),
        Command::Verify { grid, tol, extremum } => verify(ctx, grid, tol, extremum, out),
    }
}

/// Runs the tool and returns the process exit code: 0 on success, 1 on
/// domain or I/O errors (reported as JSON on `err`), 2 on usage errors.
pub fn run<W: Write, E: Write>(argv: Vec<String>, out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let report = |err: &mut E, kind: &str, msg: String| {
        let _ = writeln!(err, "{}", json!({"error": {"kind": kind, "message": msg}}));
        1
    };
    let cfg = match &cli.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => match Config::parse(&text) {
                Ok(c) => c,
                Err(e) => return report(err, e.kind(), e.to_string()),
            },
            Err(e) => return report(err, "Io", format!("{}: {e}", path.display())),
        },
        None => Config::default(),
    };
    let ctx = Ctx { deg: cli.deg, json: cli.json, census: Census::with_eps(cfg.eps), cfg };
    // Output is buffered so the command can run inside a worker pool.
    let mut buf = Vec::new();
    let result = match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(cli, &ctx, &mut buf)),
            Err(e) => return report(err, "InvalidArgument", e.to_string()),
        },
        None => dispatch(cli, &ctx, &mut buf),
    };
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        return report(err, "Io", e.to_string());
    }
    match result {
        Ok(()) => 0,
        Err(Failure::Domain(e)) => report(err, e.kind(), e.to_string()),
        Err(Failure::Io(msg)) => report(err, "Io", msg),
        Err(Failure::Exit(code)) => code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("curvature-census").chain(args.iter().copied()).map(String::from).collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn solve_eight() {
        let (code, out, _) = call(&["solve", "0", "0", "0", "3", "0", "60", "--deg"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("8 candidates"), "{out}");
        assert!(out.lines().nth(2).unwrap().contains("RSL"));
    }

    #[test]
    fn census_type_two() {
        let (code, out, _) = call(&["census", "2.5", "-2", "--deg"]);
        assert_eq!(code, 0);
        assert!(out.contains("fiber type: II"));
        assert!(out.contains("interval: [-48.3601, 30.3099)"), "{out}");
    }

    #[test]
    fn usage_and_domain_errors() {
        assert_eq!(call(&["solve", "0", "0"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        let (code, _, err) = call(&["census", "0", "1"]);
        assert_eq!(code, 1);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "CenterSingular");
        let (code, _, err) = call(&["region", "0", "0", "0", "4", "-8", "0"]);
        assert_eq!(code, 1);
        assert!(err.contains("NoRegion"));
    }

    #[test]
    fn verify_small_grid() {
        let (code, out, _) = call(&["verify", "--grid", "12", "--tol", "1e-7"]);
        assert_eq!(code, 0, "{out}");
    }
}
