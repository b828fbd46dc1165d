//! Planar computational-geometry primitives.
//!
//! Everything here works in projected metres. Rings are stored closed (first
//! vertex repeated at the end), matching GeoJSON.

mod hull;
mod mbr;
mod predicates;

pub use hull::convex_hull;
pub use mbr::{min_bounding_rect, min_bounding_rect_of_points, Mbr};
pub use predicates::{
    point_in_polygon, point_segment_distance, polygon_distance, project_onto_segment,
    segments_intersect, Containment,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("ring has {0} vertices, at least 4 are required")]
    TooFewVertices(usize),
    #[error("ring is not closed")]
    RingNotClosed,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("degenerate geometry (zero area)")]
    ZeroArea,
    #[error("exterior ring self-intersects")]
    SelfIntersecting,
    #[error("interior ring is not inside the exterior ring")]
    InteriorOutside,
    #[error("fewer than three distinct points")]
    TooFewPoints,
    #[error("all points are collinear")]
    Collinear,
    #[error("empty geometry")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Cross product of (a - o) and (b - o).
#[inline]
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// A closed linear ring.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ring(pub Vec<Point>);

impl Ring {
    /// Builds a ring, closing it if the last vertex differs from the first.
    pub fn closed(mut pts: Vec<Point>) -> Self {
        if let (Some(first), Some(last)) = (pts.first().copied(), pts.last().copied()) {
            if first != last {
                pts.push(first);
            }
        }
        Ring(pts)
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    /// Edges as consecutive vertex pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    /// Shoelace signed area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        let pts = &self.0;
        if pts.len() < 4 {
            return 0.0;
        }
        // Shift to the first vertex to limit cancellation on large coordinates.
        let o = pts[0];
        let mut s = 0.0;
        for w in pts.windows(2) {
            let a = w[0].sub(o);
            let b = w[1].sub(o);
            s += a.x * b.y - b.x * a.y;
        }
        0.5 * s
    }

    pub fn length(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        let pts = &self.0;
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        if pts.len() < 4 {
            return Err(GeomError::TooFewVertices(pts.len()));
        }
        if pts.first() != pts.last() {
            return Err(GeomError::RingNotClosed);
        }
        Ok(())
    }

    /// True when two non-adjacent edges touch or cross.
    pub fn self_intersects(&self) -> bool {
        let edges: Vec<_> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return true;
                }
            }
        }
        false
    }

    /// Area-weighted centroid accumulator: returns (signed area, Σx·w, Σy·w) relative to `o`.
    fn centroid_terms(&self, o: Point) -> (f64, f64, f64) {
        let mut a = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for w in self.0.windows(2) {
            let p = w[0].sub(o);
            let q = w[1].sub(o);
            let c = p.x * q.y - q.x * p.y;
            a += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        (0.5 * a, cx / 6.0, cy / 6.0)
    }
}

/// Polygon with one exterior ring and zero or more holes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Ring,
    pub interiors: Vec<Ring>,
}

impl Polygon {
    pub fn new(exterior: Ring, interiors: Vec<Ring>) -> Self {
        Self { exterior, interiors }
    }

    /// Convenience constructor from an open or closed vertex list.
    pub fn from_points(pts: Vec<Point>) -> Self {
        Self::new(Ring::closed(pts), Vec::new())
    }

    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::from_points(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    /// Full structural validation: closure, vertex count, simplicity, holes inside.
    pub fn validate(&self) -> Result<(), GeomError> {
        self.exterior.validate()?;
        for r in &self.interiors {
            r.validate()?;
        }
        if self.exterior.self_intersects() {
            return Err(GeomError::SelfIntersecting);
        }
        if self.exterior.signed_area() == 0.0 {
            return Err(GeomError::ZeroArea);
        }
        for hole in &self.interiors {
            let outside = hole
                .points()
                .iter()
                .any(|&p| point_in_polygon(p, &Polygon::new(self.exterior.clone(), vec![])) == Containment::Outside);
            if outside {
                return Err(GeomError::InteriorOutside);
            }
        }
        if self.area() <= 0.0 {
            return Err(GeomError::ZeroArea);
        }
        Ok(())
    }

    /// Exterior area minus hole areas.
    pub fn area(&self) -> f64 {
        let ext = self.exterior.signed_area().abs();
        let holes: f64 = self.interiors.iter().map(|r| r.signed_area().abs()).sum();
        (ext - holes).max(0.0)
    }

    pub fn perimeter(&self) -> f64 {
        self.exterior.length() + self.interiors.iter().map(Ring::length).sum::<f64>()
    }

    pub fn centroid(&self) -> Result<Point, GeomError> {
        let o = *self.exterior.points().first().ok_or(GeomError::Empty)?;
        let (mut a, mut cx, mut cy) = self.exterior.centroid_terms(o);
        // Orient so the exterior counts positive and holes negative.
        let sign = if a < 0.0 { -1.0 } else { 1.0 };
        a *= sign;
        cx *= sign;
        cy *= sign;
        for hole in &self.interiors {
            let (ha, hx, hy) = hole.centroid_terms(o);
            let hs = if ha < 0.0 { -1.0 } else { 1.0 };
            a -= ha * hs;
            cx -= hx * hs;
            cy -= hy * hs;
        }
        if a.abs() <= f64::EPSILON * 16.0 || !a.is_finite() {
            return Err(GeomError::ZeroArea);
        }
        Ok(Point::new(o.x + cx / a, o.y + cy / a))
    }

    pub fn has_holes(&self) -> bool {
        !self.interiors.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.exterior
            .points()
            .iter()
            .chain(self.interiors.iter().flat_map(|r| r.points().iter()))
            .copied()
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(self.exterior.points().iter().copied())
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point + Copy) -> Polygon {
        let map_ring = |r: &Ring| Ring(r.points().iter().map(|&p| f(p)).collect());
        Polygon::new(
            map_ring(&self.exterior),
            self.interiors.iter().map(map_ring).collect(),
        )
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn from_points(pts: impl IntoIterator<Item = Point>) -> BBox {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BBox { min, max }
    }

    pub fn around(p: Point, r: f64) -> BBox {
        BBox {
            min: Point::new(p.x - r, p.y - r),
            max: Point::new(p.x + r, p.y + r),
        }
    }

    pub fn union(self, o: BBox) -> BBox {
        BBox {
            min: Point::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            max: Point::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        }
    }

    pub fn intersects(&self, o: &BBox) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn center(&self) -> Point {
        Point::new((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }
}

/// A building or plot footprint: one or more polygon parts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MultiPolygon(pub Vec<Polygon>);

impl MultiPolygon {
    pub fn single(p: Polygon) -> Self {
        MultiPolygon(vec![p])
    }

    pub fn parts(&self) -> &[Polygon] {
        &self.0
    }

    pub fn area(&self) -> f64 {
        self.0.iter().map(Polygon::area).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.0.iter().map(Polygon::perimeter).sum()
    }

    /// Area-weighted mean of part centroids.
    pub fn centroid(&self) -> Result<Point, GeomError> {
        if self.0.len() == 1 {
            return self.0[0].centroid();
        }
        let mut wsum = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for part in &self.0 {
            let a = part.area();
            if a <= 0.0 {
                continue;
            }
            let c = part.centroid()?;
            wsum += a;
            cx += a * c.x;
            cy += a * c.y;
        }
        if wsum <= 0.0 {
            return Err(GeomError::ZeroArea);
        }
        Ok(Point::new(cx / wsum, cy / wsum))
    }

    pub fn has_holes(&self) -> bool {
        self.0.iter().any(Polygon::has_holes)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.0.iter().flat_map(Polygon::vertices)
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(self.0.iter().flat_map(|p| p.exterior.points().iter().copied()))
    }

    pub fn validate(&self) -> Result<(), GeomError> {
        if self.0.is_empty() {
            return Err(GeomError::Empty);
        }
        self.0.iter().try_for_each(Polygon::validate)
    }

    /// Containment for a point: inside any part wins, then boundary.
    pub fn contains(&self, p: Point) -> Containment {
        let mut best = Containment::Outside;
        for part in &self.0 {
            match point_in_polygon(p, part) {
                Containment::Inside => return Containment::Inside,
                Containment::Boundary => best = Containment::Boundary,
                Containment::Outside => {}
            }
        }
        best
    }

    /// Area-weighted centroid, or the bounding-box centre for degenerate input.
    pub fn anchor(&self) -> Point {
        self.centroid().unwrap_or_else(|_| self.bbox().center())
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point + Copy) -> MultiPolygon {
        MultiPolygon(self.0.iter().map(|p| p.map_points(f)).collect())
    }
}

/// Polyline (road centreline).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LineString(pub Vec<Point>);

impl LineString {
    pub fn length(&self) -> f64 {
        self.0.windows(2).map(|w| w[0].dist(w[1])).sum()
    }
}

/// Angle in degrees rotated counter-clockwise about `c`.
pub fn rotate(p: Point, c: Point, deg: f64) -> Point {
    let (s, co) = deg.to_radians().sin_cos();
    let d = p.sub(c);
    Point::new(c.x + d.x * co - d.y * s, c.y + d.x * s + d.y * co)
}
