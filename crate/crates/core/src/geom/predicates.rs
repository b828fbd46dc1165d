use super::{cross, Point, Polygon, Ring};

/// Boundary tolerance for point-in-polygon, in metres.
const BOUNDARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

impl Containment {
    /// Inside or on the boundary.
    pub fn covers(self) -> bool {
        !matches!(self, Containment::Outside)
    }
}

fn ring_containment(p: Point, ring: &Ring) -> Containment {
    let mut inside = false;
    for (a, b) in ring.edges() {
        if point_segment_distance(p, a, b) <= BOUNDARY_EPS {
            return Containment::Boundary;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Exact point-in-polygon with boundary detection; holes are excluded.
pub fn point_in_polygon(p: Point, poly: &Polygon) -> Containment {
    match ring_containment(p, &poly.exterior) {
        Containment::Outside => return Containment::Outside,
        Containment::Boundary => return Containment::Boundary,
        Containment::Inside => {}
    }
    for hole in &poly.interiors {
        match ring_containment(p, hole) {
            Containment::Inside => return Containment::Outside,
            Containment::Boundary => return Containment::Boundary,
            Containment::Outside => {}
        }
    }
    Containment::Inside
}

/// Parameter t ∈ [0,1] of the closest point on segment ab to p.
pub fn project_onto_segment(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return 0.0;
    }
    (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let t = project_onto_segment(p, a, b);
    let q = Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
    p.dist(q)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn segment_distance(a1: Point, a2: Point, b1: Point, b2: Point) -> f64 {
    if segments_intersect(a1, a2, b1, b2) {
        return 0.0;
    }
    point_segment_distance(a1, b1, b2)
        .min(point_segment_distance(a2, b1, b2))
        .min(point_segment_distance(b1, a1, a2))
        .min(point_segment_distance(b2, a1, a2))
}

/// Minimum distance between two polygons; zero when they overlap or touch.
pub fn polygon_distance(a: &Polygon, b: &Polygon) -> f64 {
    if let Some(&p) = a.exterior.points().first() {
        if point_in_polygon(p, b).covers() {
            return 0.0;
        }
    }
    if let Some(&p) = b.exterior.points().first() {
        if point_in_polygon(p, a).covers() {
            return 0.0;
        }
    }
    let rings_a = std::iter::once(&a.exterior).chain(a.interiors.iter());
    let mut best = f64::INFINITY;
    for ra in rings_a {
        for rb in std::iter::once(&b.exterior).chain(b.interiors.iter()) {
            for (p1, p2) in ra.edges() {
                for (q1, q2) in rb.edges() {
                    best = best.min(segment_distance(p1, p2, q1, q2));
                    if best == 0.0 {
                        return 0.0;
                    }
                }
            }
        }
    }
    best
}
