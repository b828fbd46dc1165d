use serde::{Deserialize, Serialize};

use super::hull::hull_points;
use super::{GeomError, Point, Polygon};

/// Minimum-area enclosing rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mbr {
    pub center: Point,
    /// Long side, metres.
    pub length: f64,
    /// Short side, metres.
    pub width: f64,
    /// Direction of the long axis, degrees counter-clockwise from east, in [0, 180).
    pub angle: f64,
}

impl Mbr {
    pub fn area(&self) -> f64 {
        self.length * self.width
    }

    /// length / width, always ≥ 1.
    pub fn aspect_ratio(&self) -> f64 {
        self.length / self.width
    }

    /// Corner points, counter-clockwise.
    pub fn corners(&self) -> [Point; 4] {
        let (s, c) = self.angle.to_radians().sin_cos();
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        let at = |a: f64, b: f64| Point::new(self.center.x + a * c - b * s, self.center.y + a * s + b * c);
        [at(-hl, -hw), at(hl, -hw), at(hl, hw), at(-hl, hw)]
    }

    /// Bearing of the long axis clockwise from north, in [0, 360). The axis
    /// direction with positive northing is reported; a due east-west axis is 90.
    pub fn bearing(&self) -> f64 {
        let b = 90.0 - self.angle;
        if b < 0.0 {
            b + 360.0
        } else {
            b
        }
    }
}

pub fn min_bounding_rect(p: &Polygon) -> Result<Mbr, GeomError> {
    let pts: Vec<Point> = p.exterior.points().to_vec();
    min_bounding_rect_of_points(&pts)
}

/// Rotating calipers over the convex hull: one rectangle per hull edge, with the
/// three remaining support points advanced monotonically.
pub fn min_bounding_rect_of_points(pts: &[Point]) -> Result<Mbr, GeomError> {
    let h = hull_points(pts)?;
    let n = h.len();
    let dot = |a: Point, b: Point| a.x * b.x + a.y * b.y;
    let next = |i: usize| (i + 1) % n;

    let mut right = 1usize;
    let mut top = 1usize;
    let mut left = 1usize;
    let mut best: Option<(f64, Mbr)> = None;

    for i in 0..n {
        let a = h[i];
        let b = h[next(i)];
        let e = b.sub(a);
        let len = e.x.hypot(e.y);
        if len == 0.0 {
            continue;
        }
        let u = Point::new(e.x / len, e.y / len);
        let v = Point::new(-u.y, u.x);

        if i == 0 {
            right = next(i);
        }
        while dot(h[next(right)].sub(h[right]), u) > 0.0 {
            right = next(right);
        }
        if i == 0 {
            top = right;
        }
        while dot(h[next(top)].sub(h[top]), v) > 0.0 {
            top = next(top);
        }
        if i == 0 {
            left = top;
        }
        while dot(h[next(left)].sub(h[left]), u) < 0.0 {
            left = next(left);
        }

        let max_u = dot(h[right].sub(a), u);
        let min_u = dot(h[left].sub(a), u);
        let max_v = dot(h[top].sub(a), v);
        let extent_u = max_u - min_u;
        let extent_v = max_v;
        let area = extent_u * extent_v;
        if best.as_ref().is_none_or(|(ba, _)| area < *ba) {
            let mid_u = 0.5 * (max_u + min_u);
            let mid_v = 0.5 * max_v;
            let center = Point::new(a.x + u.x * mid_u + v.x * mid_v, a.y + u.y * mid_u + v.y * mid_v);
            let (length, width, axis) = if extent_u >= extent_v {
                (extent_u, extent_v, u)
            } else {
                (extent_v, extent_u, v)
            };
            best = Some((
                area,
                Mbr {
                    center,
                    length,
                    width,
                    angle: axis_angle(axis),
                },
            ));
        }
    }
    let (_, mbr) = best.ok_or(GeomError::Collinear)?;
    if mbr.width <= 0.0 {
        return Err(GeomError::Collinear);
    }
    Ok(mbr)
}

/// Undirected axis angle in [0, 180) degrees from east.
fn axis_angle(dir: Point) -> f64 {
    let mut deg = dir.y.atan2(dir.x).to_degrees();
    deg = deg.rem_euclid(180.0);
    if deg >= 180.0 - 1e-9 {
        deg = 0.0;
    }
    deg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rotate;

    #[test]
    fn axis_aligned_rectangle() {
        let m = min_bounding_rect(&Polygon::rect(0.0, 0.0, 10.0, 4.0)).unwrap();
        assert_eq!(m.length, 10.0);
        assert_eq!(m.width, 4.0);
        assert_eq!(m.angle, 0.0);
        assert_eq!(m.center, Point::new(5.0, 2.0));
    }

    #[test]
    fn rotated_rectangle() {
        let c = Point::new(0.0, 0.0);
        let r = Polygon::rect(-5.0, -2.0, 5.0, 2.0).map_points(|p| rotate(p, c, 30.0));
        let m = min_bounding_rect(&r).unwrap();
        assert!((m.length - 10.0).abs() < 1e-9);
        assert!((m.width - 4.0).abs() < 1e-9);
        assert!((m.angle - 30.0).abs() < 1e-6);
        assert!(m.center.dist(c) < 1e-9);
    }

    #[test]
    fn tall_rectangle_reports_vertical_axis() {
        let m = min_bounding_rect(&Polygon::rect(0.0, 0.0, 4.0, 10.0)).unwrap();
        assert_eq!(m.angle, 90.0);
        assert_eq!(m.bearing(), 0.0);
    }

    #[test]
    fn bearings() {
        let mk = |angle| Mbr { center: Point::default(), length: 2.0, width: 1.0, angle };
        assert_eq!(mk(0.0).bearing(), 90.0);
        assert_eq!(mk(90.0).bearing(), 0.0);
        assert_eq!(mk(45.0).bearing(), 45.0);
        assert_eq!(mk(135.0).bearing(), 315.0);
    }

    #[test]
    fn corners_enclose_source() {
        let tri = Polygon::from_points(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 3f64.sqrt())]);
        let m = min_bounding_rect(&tri).unwrap();
        let box_poly = Polygon::from_points(m.corners().to_vec());
        for p in tri.exterior.points() {
            let t = crate::geom::point_in_polygon(*p, &box_poly);
            assert!(t.covers() || box_poly.exterior.edges().any(|(a, b)| crate::geom::point_segment_distance(*p, a, b) < 1e-6));
        }
    }
}
