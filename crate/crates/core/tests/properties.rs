use std::f64::consts::{FRAC_PI_2, PI};

use curvature_census::census::{Branch, Locus};
use curvature_census::dubins::{enumerate_candidates, minimizer};
use curvature_census::emit::{heatmap_csv, svg_scene, paths_scene, Styles};
use curvature_census::frame::{adjacent_circles, center_distances};
use curvature_census::geom::Piece;
use curvature_census::oracle::{verify_class_range, Rect};
use curvature_census::tangency::{build_trapped_region, ccc_tangent_circle, in_trapped_class, TangentChoice};
use curvature_census::{Census, Pose, RigidMotion, Vec2};
use proptest::prelude::*;

fn pose() -> impl Strategy<Value = Pose> {
    (-6.0..6.0f64, -6.0..6.0f64, -PI..PI).prop_map(|(x, y, h)| Pose::new(x, y, h))
}

fn motion() -> impl Strategy<Value = RigidMotion> {
    (-PI..PI, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(r, tx, ty)| RigidMotion::new(r, Vec2::new(tx, ty)))
}

/// Random points of `B` away from its boundary.
fn domain_point() -> impl Strategy<Value = Vec2> {
    (-1.0..4.0f64, -4.0..4.0f64).prop_map(|(u, v)| Vec2::new(u, v)).prop_filter("inside B", |&y| {
        let c = Census::new();
        c.in_domain(y)
            && y.norm() > 1e-6
            && Locus::ALL.iter().all(|l| {
                let (cc, r) = l.circle();
                (y.dist(cc) - r).abs() > 1e-6
            })
    })
}

fn tangent(p: &Piece, at_end: bool) -> Vec2 {
    match *p {
        Piece::Line { from, to } => (to - from) * (1.0 / from.dist(to)),
        Piece::Arc { start, sweep, .. } => {
            let a = if at_end { start + sweep } else { start };
            Vec2::from_angle(a).perp() * sweep.signum()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn candidates_reach_the_target(x in pose(), y in pose()) {
        prop_assume!(x.position.dist(y.position) > 1e-3);
        let c = enumerate_candidates(&x, &y);
        prop_assert!(!c.is_empty() && c.len() <= 8);
        for p in &c {
            prop_assert!(p.end_pose().approx_eq(&y, 1e-9), "{} ends at {}", p.word(), p.end_pose());
            for w in p.joints().windows(2) {
                prop_assert!(w[0].position.is_finite() && w[1].position.is_finite());
            }
            prop_assert!(c[0].length() <= p.length());
        }
    }

    #[test]
    fn reversal_preserves_lengths(x in pose(), y in pose()) {
        prop_assume!(x.position.dist(y.position) > 1e-3);
        let mut a: Vec<f64> = enumerate_candidates(&x, &y).iter().map(|p| p.length()).collect();
        let mut b: Vec<f64> = enumerate_candidates(&y.reversed(), &x.reversed()).iter().map(|p| p.length()).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-8, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn collinear_minimizer_is_the_segment(d in 1e-3..50.0f64) {
        let m = minimizer(&Pose::origin(), &Pose::new(d, 0.0, 0.0));
        prop_assert!((m.length() - d).abs() <= 1e-12);
    }

    #[test]
    fn candidates_are_isometry_invariant(x in pose(), y in pose(), g in motion()) {
        prop_assume!(x.position.dist(y.position) > 1e-3);
        let a: Vec<f64> = enumerate_candidates(&x, &y).iter().map(|p| p.length()).collect();
        let b: Vec<f64> =
            enumerate_candidates(&g.apply_pose(&x), &g.apply_pose(&y)).iter().map(|p| p.length()).collect();
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn center_distances_are_isometry_invariant(x in pose(), y in pose(), g in motion()) {
        let d0 = center_distances(&x, &y);
        let d1 = center_distances(&g.apply_pose(&x), &g.apply_pose(&y));
        for (p, q) in [(d0.ll, d1.ll), (d0.rr, d1.rr), (d0.lr, d1.lr), (d0.rl, d1.rl)] {
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + p));
        }
    }

    #[test]
    fn mirror_swaps_sides(x in pose(), y in pose()) {
        // Reflect across the heading axis of x.
        let reflect = |p: &Pose| {
            let (m, c) = curvature_census::frame::canonical_frame(&x, p);
            let mirrored = Pose::at(Vec2::new(c.position.x, -c.position.y), -c.heading);
            m.inverse().apply_pose(&mirrored)
        };
        let d0 = center_distances(&x, &y);
        let d1 = center_distances(&x, &reflect(&y));
        prop_assert!((d0.ll - d1.rr).abs() < 1e-9 && (d0.lr - d1.rl).abs() < 1e-9);
    }

    #[test]
    fn adjacent_centers_geometry(p in pose()) {
        let (l, r) = adjacent_circles(&p);
        prop_assert!((l.center.dist(p.position) - 1.0).abs() < 1e-12);
        prop_assert!((r.center.dist(p.position) - 1.0).abs() < 1e-12);
        prop_assert!((l.center.dist(r.center) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn census_is_isometry_equivariant(y in domain_point(), g in motion()) {
        let c = Census::new();
        let x = Pose::origin();
        let r0 = c.classify_fiber(&x, y).unwrap();
        let r1 = c.classify_fiber(&g.apply_pose(&x), g.apply(y)).unwrap();
        prop_assert_eq!(r0.cell, r1.cell);
        prop_assert_eq!(r0.fiber_type, r1.fiber_type);
        let (t0, t1) = (r0.theta_rad.unwrap(), r1.theta_rad.unwrap());
        prop_assert!((t0 - t1).abs() < 1e-9);
    }

    #[test]
    fn mirror_antisymmetry(y in domain_point()) {
        let c = Census::new();
        let m = Vec2::new(y.x, -y.y);
        prop_assert!((c.class_range(y).unwrap() - c.class_range(m).unwrap()).abs() < 1e-12);
        let (wm, _) = c.omega_minus(y).unwrap();
        let (wp, _) = c.omega_plus(m).unwrap();
        prop_assert!((wm + wp).abs() < 1e-12);
    }

    #[test]
    fn interior_points_have_positive_range(y in domain_point()) {
        prop_assert!(Census::new().class_range(y).unwrap() > 0.0);
    }

    #[test]
    fn oracle_agrees(y in domain_point()) {
        let r = verify_class_range(&Census::new(), y, 1e-7).unwrap();
        prop_assert!(r.agree, "{r:?}");
        prop_assert!(r.residuals.0.abs() <= 1e-9 && r.residuals.1.abs() <= 1e-9);
    }

    #[test]
    fn branches_meet_continuously(phi in -PI..PI) {
        let c = Census::new();
        let y = Vec2::new(0.0, 1.0) + Vec2::from_angle(phi) * 3.0;
        let delta = c.delta_left(y).unwrap();
        let short = delta + c.alpha_angle(3.0, Branch::Short).unwrap() - FRAC_PI_2;
        let long = delta - c.alpha_angle(3.0, Branch::Long).unwrap() + FRAC_PI_2;
        prop_assert!((short - long).abs() <= 1e-12);
    }

    #[test]
    fn tangency_residuals(ax in -5.0..5.0f64, ay in -5.0..5.0f64, d in 1e-6..4.0f64, t in -PI..PI, plus in any::<bool>()) {
        let a = Vec2::new(ax, ay);
        let b = a + Vec2::from_angle(t) * d;
        let ch = if plus { TangentChoice::Plus } else { TangentChoice::Minus };
        let tr = ccc_tangent_circle(a, b, ch).unwrap();
        let c = tr.middle_center;
        prop_assert!((tr.first_tangency.dist(a) - 1.0).abs() < 1e-9);
        prop_assert!((tr.first_tangency.dist(c) - 1.0).abs() < 1e-9);
        prop_assert!((tr.second_tangency.dist(b) - 1.0).abs() < 1e-9);
        prop_assert!((tr.second_tangency.dist(c) - 1.0).abs() < 1e-9);
        prop_assert!((c.dist(a) - 2.0).abs() < 1e-9 && (c.dist(b) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn region_boundary_is_c1(y in domain_point(), s in 0.05..0.95f64) {
        let c = Census::new();
        let iv = c.interval(y).unwrap();
        let theta = iv.lo + s * (iv.hi - iv.lo);
        prop_assume!(iv.hi - iv.lo > 1e-3);
        let x = Pose::origin();
        let yp = Pose::at(y, theta);
        let r = build_trapped_region(&x, &yp).unwrap();
        prop_assert!(r.area > 0.0);
        let n = r.boundary.len();
        for i in 0..n {
            let (p, q) = (&r.boundary[i], &r.boundary[(i + 1) % n]);
            prop_assert!(p.end_point().dist(q.start_point()) < 1e-9);
            // Joints inside w1 and w2 are C1; the closing joints at x and y are cusps.
            let joint = p.end_point();
            if joint.dist(x.position) > 1e-9 && joint.dist(y) > 1e-9 {
                prop_assert!(tangent(p, true).dist(tangent(q, false)) < 1e-9);
            }
        }
        prop_assert!(in_trapped_class(&r.w1, &r) && in_trapped_class(&r.w2, &r));
    }
}

#[test]
fn region_collapses_as_endpoints_merge() {
    let x = Pose::origin();
    let mut last = f64::INFINITY;
    for u in [1.0, 0.5, 0.1, 0.01] {
        let r = build_trapped_region(&x, &Pose::new(u, 0.0, 0.0)).unwrap();
        assert!(r.area < last, "area {} at u = {u} not below {last}", r.area);
        last = r.area;
        assert!(r.w1.segments[1].length() < 3.0 * u);
    }
    assert!(last < 1e-7);
}

#[test]
fn middle_arc_opens_to_half_turn_as_centers_separate() {
    // At center distance 4 the middle circle touches both outer circles at
    // antipodal points, so the middle arc of w1 tends to pi, not to zero.
    let x = Pose::origin();
    let mut last = 0.0;
    for u in [3.0, 3.5, 3.9, 3.99, 3.9999] {
        let r = build_trapped_region(&x, &Pose::new(u, 0.0, 0.0)).unwrap();
        let mid = r.w1.segments[1].length();
        assert!(mid > last);
        last = mid;
        assert!(r.area > 1.0);
    }
    assert!((last - PI).abs() < 0.05, "middle arc {last}");
}

#[test]
fn domain_is_neither_open_nor_closed() {
    let c = Census::new();
    // A point of the unit circle around (0, 1) with u > 0 belongs to B ...
    assert!(c.in_domain(Vec2::new(1.0, 1.0)));
    // ... while points just inside that circle do not: B is not open.
    assert!(!c.in_domain(Vec2::new(0.999, 1.0)));
    // (4, 0) is a limit of points of B but is not in B: B is not closed.
    assert!(c.in_domain(Vec2::new(3.999999, 0.0)));
    assert!(!c.in_domain(Vec2::new(4.0, 0.0)));
    assert!(!c.in_domain(Vec2::new(0.0, 1.0)));
}

#[test]
fn svg_is_deterministic() {
    let x = Pose::origin();
    let y = Pose::new(3.0, 0.0, PI / 3.0);
    let scene = paths_scene(&x, &y, &enumerate_candidates(&x, &y), &Styles::default());
    assert_eq!(svg_scene(&scene), svg_scene(&scene.clone()));
}

#[test]
fn csv_is_independent_of_thread_count() {
    let b = Rect::new(-5.0, 5.0, -5.0, 5.0).unwrap();
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| heatmap_csv(&Census::new(), &b, 64, 48).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn csv_round_trips() {
    let c = Census::new();
    let csv = heatmap_csv(&c, &Rect::new(-1.0, 4.5, -4.5, 4.5).unwrap(), 57, 61).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let p = Vec2::new(f[0].parse().unwrap(), f[1].parse().unwrap());
        match c.class_range(p) {
            Some(t) => assert!((t - f[2].parse::<f64>().unwrap()).abs() <= 1e-12),
            None => assert!(f[2].is_empty()),
        }
    }
}

#[test]
fn trapped_class_examples() {
    let x = Pose::origin();
    let y = Pose::new(3.0, 0.0, PI / 3.0);
    let r = build_trapped_region(&x, &y).unwrap();
    let c = enumerate_candidates(&x, &y);
    assert!(in_trapped_class(&c[0], &r));
    assert!(!in_trapped_class(&c[3], &r));
    assert!(r.contains(r.w1.pieces()[1].start_point()));
    for w in [&r.w1, &r.w2] {
        let feasible = w.segments.iter().all(|s| s.length() < PI) || w.segments[1].length() > PI;
        let listed = c.iter().any(|p| p.path_type == w.path_type && (p.length() - w.length()).abs() < 1e-9);
        assert!(!feasible || listed, "{} missing from candidates", w.word());
    }
}
