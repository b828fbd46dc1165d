use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spli_core::form::orientation;
use spli_core::geom::{
    convex_hull, min_bounding_rect, min_bounding_rect_of_points, point_in_polygon, rotate, Containment, MultiPolygon,
    Point, Polygon, Ring,
};
use spli_core::BuildingRecord;

fn poly(pts: &[(f64, f64)]) -> Polygon {
    Polygon::from_points(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
}

/// Star-shaped polygon: sorted random angles, random radii. Always simple.
fn random_star(rng: &mut ChaCha8Rng, n: usize) -> Polygon {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let cx = rng.gen_range(-500.0..500.0);
    let cy = rng.gen_range(-500.0..500.0);
    let pts = angles
        .iter()
        .map(|&a| {
            let r = rng.gen_range(5.0..60.0);
            Point::new(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    Polygon::from_points(pts)
}

fn brute_force_mbr_area(pts: &[Point], step_deg: f64) -> f64 {
    let steps = (90.0 / step_deg).round() as usize;
    (0..steps)
        .map(|i| {
            let (s, c) = (i as f64 * step_deg).to_radians().sin_cos();
            let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in pts {
                let x = p.x * c + p.y * s;
                let y = -p.x * s + p.y * c;
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
            }
            (x1 - x0) * (y1 - y0)
        })
        .fold(f64::INFINITY, f64::min)
}

fn inside_convex(p: Point, ring: &[Point]) -> bool {
    ring.windows(2)
        .all(|w| (w[1].x - w[0].x) * (p.y - w[0].y) - (w[1].y - w[0].y) * (p.x - w[0].x) >= 0.0)
}

#[test]
fn pentagon_area_matches_monte_carlo() {
    let pts = [(0.0, 0.0), (40.0, -5.0), (55.0, 25.0), (25.0, 48.0), (-8.0, 30.0), (0.0, 0.0)];
    let ring: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let exact = poly(&pts).area();
    // Jittered-grid rejection sampling: one uniform draw per cell.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (x0, x1, y0, y1) = (-8.0, 55.0, -5.0, 48.0);
    let k = 1500;
    let (dx, dy) = ((x1 - x0) / k as f64, (y1 - y0) / k as f64);
    let mut hits = 0usize;
    for i in 0..k {
        for j in 0..k {
            let p = Point::new(x0 + (i as f64 + rng.gen::<f64>()) * dx, y0 + (j as f64 + rng.gen::<f64>()) * dy);
            hits += inside_convex(p, &ring) as usize;
        }
    }
    let estimate = hits as f64 / (k * k) as f64 * (x1 - x0) * (y1 - y0);
    assert!((estimate - exact).abs() / exact < 1e-3, "exact {exact}, estimate {estimate}");
}

#[test]
fn rectangle_with_hole_area() {
    let outer = Ring::closed(vec![
        Point::new(0.0, 0.0),
        Point::new(10.0, 0.0),
        Point::new(10.0, 4.0),
        Point::new(0.0, 4.0),
    ]);
    let hole = Ring::closed(vec![
        Point::new(1.0, 1.0),
        Point::new(3.0, 1.0),
        Point::new(3.0, 3.0),
        Point::new(1.0, 3.0),
    ]);
    let p = Polygon::new(outer, vec![hole]);
    p.validate().unwrap();
    assert_eq!(p.area(), 36.0);
}

#[test]
fn l_shape_centroid_matches_fan_triangulation() {
    let pts = [(0.0, 0.0), (30.0, 0.0), (30.0, 10.0), (10.0, 10.0), (10.0, 25.0), (0.0, 25.0), (0.0, 0.0)];
    let c = poly(&pts).centroid().unwrap();
    // Fan from vertex 0; signed triangle areas handle the reflex corner.
    let v: Vec<Point> = pts[..6].iter().map(|&(x, y)| Point::new(x, y)).collect();
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 1..v.len() - 1 {
        let (p, q, r) = (v[0], v[i], v[i + 1]);
        let t = ((q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y)) / 2.0;
        a += t;
        cx += t * (p.x + q.x + r.x) / 3.0;
        cy += t * (p.y + q.y + r.y) / 3.0;
    }
    assert!((c.x - cx / a).abs() < 1e-9);
    assert!((c.y - cy / a).abs() < 1e-9);
}

#[test]
fn hull_examples() {
    let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)];
    let h = convex_hull(&sq.iter().map(|&(x, y)| Point::new(x, y)).collect::<Vec<_>>()).unwrap();
    assert_eq!(h.exterior.points().len(), 5);
    assert_eq!(h.area(), 1.0);

    let circle: Vec<Point> = (0..24)
        .map(|i| {
            let a = i as f64 / 24.0 * std::f64::consts::TAU;
            Point::new(10.0 * a.cos(), 10.0 * a.sin())
        })
        .collect();
    assert_eq!(convex_hull(&circle).unwrap().exterior.points().len(), 25);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<Point> = (0..50).map(|_| Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))).collect();
    let h = convex_hull(&pts).unwrap();
    assert!(h.exterior.signed_area() > 0.0);
    for p in &pts {
        assert!(point_in_polygon(*p, &h).covers());
    }
    for v in h.exterior.points() {
        assert!(pts.contains(v));
    }
}

#[test]
fn hull_rejects_degenerate_input() {
    assert!(convex_hull(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).is_err());
    let line: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
    assert!(convex_hull(&line).is_err());
}

#[test]
fn mbr_matches_rotation_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.gen_range(3..14);
        let p = random_star(&mut rng, n);
        if p.validate().is_err() {
            continue;
        }
        let m = min_bounding_rect(&p).unwrap();
        let brute = brute_force_mbr_area(p.exterior.points(), 0.01);
        assert!(m.area() <= brute * (1.0 + 1e-9));
        assert!((brute - m.area()) / brute < 1e-3);
    }
}

#[test]
fn mbr_examples() {
    let m = min_bounding_rect(&Polygon::rect(0.0, 0.0, 10.0, 4.0)).unwrap();
    assert!((m.length - 10.0).abs() < 1e-9 && (m.width - 4.0).abs() < 1e-9 && m.angle.abs() < 1e-9);

    let c = Point::new(5.0, 2.0);
    let r = Polygon::rect(0.0, 0.0, 10.0, 4.0).map_points(|p| rotate(p, c, 30.0));
    let m = min_bounding_rect(&r).unwrap();
    assert!((m.length - 10.0).abs() < 1e-9 && (m.width - 4.0).abs() < 1e-9);
    assert!((m.angle - 30.0).abs() < 1e-6);

    let tri = poly(&[(0.0, 0.0), (2.0, 0.0), (1.0, 3f64.sqrt()), (0.0, 0.0)]);
    assert!((min_bounding_rect(&tri).unwrap().area() - edge_aligned_minimum(tri.exterior.points())).abs() < 1e-9);
    // Side 2: base 2 times height sqrt(3), twice the triangle's own area.
    assert!((min_bounding_rect(&tri).unwrap().area() - 2.0 * 3f64.sqrt()).abs() < 1e-9);
}

/// Minimum over rectangles aligned with each edge of a convex ring.
fn edge_aligned_minimum(ring: &[Point]) -> f64 {
    ring.windows(2)
        .map(|w| {
            let (ux, uy) = (w[1].x - w[0].x, w[1].y - w[0].y);
            let l = ux.hypot(uy);
            let (ux, uy) = (ux / l, uy / l);
            let along: Vec<f64> = ring.iter().map(|p| p.x * ux + p.y * uy).collect();
            let across: Vec<f64> = ring.iter().map(|p| -p.x * uy + p.y * ux).collect();
            let span = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
            span(&along) * span(&across)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn mbr_contains_vertices_and_beats_aabb() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let p = random_star(&mut rng, 9);
        let pts: Vec<Point> = p.exterior.points().to_vec();
        let m = min_bounding_rect_of_points(&pts).unwrap();
        let bb = p.bbox();
        assert!(m.area() <= bb.area() * (1.0 + 1e-12));
        assert!(m.length >= m.width && m.width > 0.0);
        assert!((0.0..180.0).contains(&m.angle));
        let rect = Polygon::from_points(m.corners().to_vec());
        for v in &pts {
            let inside = point_in_polygon(*v, &rect) != Containment::Outside;
            let near = rect.exterior.edges().any(|(a, b)| spli_core::geom::point_segment_distance(*v, a, b) < 1e-6);
            assert!(inside || near);
        }
    }
}

#[test]
fn orientation_examples() {
    let slab = |deg: f64| {
        let p = Polygon::rect(-20.0, -4.0, 20.0, 4.0).map_points(|q| rotate(q, Point::new(0.0, 0.0), deg));
        BuildingRecord::new("b", MultiPolygon::single(p))
    };
    assert!((orientation(&slab(0.0)).unwrap() - 90.0).abs() < 1e-6);
    assert!(orientation(&slab(90.0)).unwrap().abs() < 1e-6 || (orientation(&slab(90.0)).unwrap() - 360.0).abs() < 1e-6);
    assert!((orientation(&slab(45.0)).unwrap() - 45.0).abs() < 1e-6);
    assert!((orientation(&slab(135.0)).unwrap() - 315.0).abs() < 1e-6);
}

fn arb_polygon() -> impl Strategy<Value = Polygon> {
    (3usize..12, any::<u64>()).prop_map(|(n, seed)| random_star(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rigid_motion_equivariance(p in arb_polygon(), dx in -1e3..1e3f64, dy in -1e3..1e3f64, deg in 0.0..360.0f64) {
        prop_assume!(p.validate().is_ok());
        let pivot = Point::new(0.0, 0.0);
        let moved = p.map_points(|q| {
            let r = rotate(q, pivot, deg);
            Point::new(r.x + dx, r.y + dy)
        });
        prop_assert!((moved.area() - p.area()).abs() <= 1e-9 * p.area().max(1.0) * 1e3);
        let c0 = p.centroid().unwrap();
        let c1 = moved.centroid().unwrap();
        let r = rotate(c0, pivot, deg);
        prop_assert!((c1.x - r.x - dx).abs() < 1e-6 && (c1.y - r.y - dy).abs() < 1e-6);
        let m0 = min_bounding_rect(&p).unwrap();
        let m1 = min_bounding_rect(&moved).unwrap();
        prop_assert!((m0.area() - m1.area()).abs() <= 1e-7 * m0.area());
        let h0 = convex_hull(p.exterior.points()).unwrap();
        let h1 = convex_hull(moved.exterior.points()).unwrap();
        prop_assert!((h0.area() - h1.area()).abs() <= 1e-7 * h0.area());
    }

    #[test]
    fn uniform_scaling(p in arb_polygon(), s in 0.1..20.0f64) {
        prop_assume!(p.validate().is_ok());
        let scaled = p.map_points(|q| Point::new(q.x * s, q.y * s));
        prop_assert!((scaled.area() - s * s * p.area()).abs() <= 1e-9 * s * s * p.area());
        let a0 = min_bounding_rect(&p).unwrap().area();
        let a1 = min_bounding_rect(&scaled).unwrap().area();
        prop_assert!((a1 - s * s * a0).abs() <= 1e-9 * s * s * a0);
    }

    #[test]
    fn rectangle_sides_scale(w in 1.0..100.0f64, ar in 1.05..20.0f64, deg in 0.0..180.0f64, s in 0.1..20.0f64) {
        let r = Polygon::rect(0.0, 0.0, w * ar, w).map_points(|q| rotate(q, Point::new(3.0, 1.0), deg));
        let scaled = r.map_points(|q| Point::new(q.x * s, q.y * s));
        let m0 = min_bounding_rect(&r).unwrap();
        let m1 = min_bounding_rect(&scaled).unwrap();
        prop_assert!((m1.length - s * m0.length).abs() <= 1e-7 * s * m0.length);
        prop_assert!((m1.width - s * m0.width).abs() <= 1e-7 * s * m0.width);
    }
}
