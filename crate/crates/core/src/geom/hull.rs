use super::{cross, GeomError, Point, Polygon, Ring};

/// Andrew's monotone chain. Returns the hull as a closed counter-clockwise ring
/// whose vertices are input points; collinear boundary points are dropped.
pub fn convex_hull(pts: &[Point]) -> Result<Polygon, GeomError> {
    let hull = hull_points(pts)?;
    Ok(Polygon::new(Ring::closed(hull), Vec::new()))
}

/// Open counter-clockwise hull vertex list.
pub(crate) fn hull_points(pts: &[Point]) -> Result<Vec<Point>, GeomError> {
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let mut sorted: Vec<Point> = pts.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    sorted.dedup();
    if sorted.len() < 3 {
        return Err(GeomError::TooFewPoints);
    }

    let mut lower: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in &sorted {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in sorted.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GeomError::Collinear);
    }
    Ok(lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_center() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.5),
        ];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.exterior.points().len(), 5);
        assert_eq!(h.area(), 1.0);
        assert!(h.exterior.signed_area() > 0.0);
        assert!(!h.exterior.points().contains(&Point::new(0.5, 0.5)));
    }

    #[test]
    fn circle_points_all_on_hull() {
        let pts: Vec<Point> = (0..24)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 24.0;
                Point::new(10.0 * a.cos(), 10.0 * a.sin())
            })
            .collect();
        let h = hull_points(&pts).unwrap();
        assert_eq!(h.len(), 24);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(hull_points(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]), Err(GeomError::TooFewPoints));
        let line: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(hull_points(&line), Err(GeomError::Collinear));
    }
}
