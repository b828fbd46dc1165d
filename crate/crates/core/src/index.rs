//! R-tree indexes over bounding boxes and points.

use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, AABB};

use crate::geom::{BBox, Point};

type BoxEntry = GeomWithData<Rectangle<[f64; 2]>, usize>;
type PointEntry = GeomWithData<[f64; 2], usize>;

fn aabb(b: &BBox) -> AABB<[f64; 2]> {
    AABB::from_corners([b.min.x, b.min.y], [b.max.x, b.max.y])
}

/// Bounding-box tree; entries are identified by their insertion index.
pub struct SpatialIndex {
    tree: RTree<BoxEntry>,
    len: usize,
}

impl SpatialIndex {
    pub fn from_boxes(boxes: impl IntoIterator<Item = BBox>) -> Self {
        let entries: Vec<BoxEntry> = boxes
            .into_iter()
            .enumerate()
            .map(|(i, b)| GeomWithData::new(Rectangle::from_corners([b.min.x, b.min.y], [b.max.x, b.max.y]), i))
            .collect();
        let len = entries.len();
        Self {
            tree: RTree::bulk_load(entries),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Indices of entries whose boxes intersect `b`, ascending.
    pub fn query(&self, b: &BBox) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .tree
            .locate_in_envelope_intersecting(aabb(b))
            .map(|e| e.data)
            .collect();
        out.sort_unstable();
        out
    }
}

pub struct PointIndex {
    tree: RTree<PointEntry>,
}

impl PointIndex {
    pub fn new(points: impl IntoIterator<Item = Point>) -> Self {
        let entries: Vec<PointEntry> = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| GeomWithData::new([p.x, p.y], i))
            .collect();
        Self {
            tree: RTree::bulk_load(entries),
        }
    }

    /// Indices within `r` metres of `p` (inclusive), ascending.
    pub fn within(&self, p: Point, r: f64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .tree
            .locate_within_distance([p.x, p.y], r * r)
            .map(|e| e.data)
            .collect();
        out.sort_unstable();
        out
    }

    /// Distance from `p` to the nearest indexed point other than `skip`.
    pub fn nearest_distance_excluding(&self, p: Point, skip: usize) -> Option<f64> {
        self.tree
            .nearest_neighbor_iter([p.x, p.y])
            .find(|e| e.data != skip)
            .map(|e| {
                let [x, y] = *e.geom();
                p.dist(Point::new(x, y))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_query_matches_brute_force() {
        let boxes: Vec<BBox> = (0..100)
            .map(|i| {
                let x = (i % 10) as f64 * 10.0;
                let y = (i / 10) as f64 * 10.0;
                BBox::from_points([Point::new(x, y), Point::new(x + 4.0 + (i % 3) as f64 * 4.0, y + 5.0)])
            })
            .collect();
        let idx = SpatialIndex::from_boxes(boxes.iter().copied());
        let q = BBox::from_points([Point::new(12.0, 7.0), Point::new(41.0, 33.0)]);
        let brute: Vec<usize> = (0..boxes.len()).filter(|&i| boxes[i].intersects(&q)).collect();
        assert_eq!(idx.query(&q), brute);
    }

    #[test]
    fn point_queries() {
        let pts = [Point::new(0.0, 0.0), Point::new(3.0, 4.0), Point::new(10.0, 0.0)];
        let idx = PointIndex::new(pts);
        assert_eq!(idx.within(Point::new(0.0, 0.0), 5.0), vec![0, 1]);
        assert_eq!(idx.nearest_distance_excluding(pts[0], 0), Some(5.0));
    }
}
