//! Road centrelines as an undirected weighted graph with point snapping.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::geom::{project_onto_segment, BBox, LineString, Point};
use crate::index::SpatialIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Metres; equals the distance between the endpoint nodes.
    pub length: f64,
}

pub struct RoadGraph {
    nodes: Vec<Point>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_index: SpatialIndex,
}

/// Where a free point attaches to the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub edge: usize,
    /// Position along the edge from `a` (0) to `b` (1).
    pub t: f64,
    pub point: Point,
    /// Straight-line distance from the free point to `point`.
    pub leg: f64,
}

impl std::fmt::Debug for RoadGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RoadGraph")
            .field("nodes", &self.nodes.len())
            .field("edges", &self.edges.len())
            .finish()
    }
}

/// Merges vertices closer than a tolerance; first-seen vertex is the representative.
struct NodeSnapper {
    tol: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    nodes: Vec<Point>,
}

impl NodeSnapper {
    fn cell(&self, p: Point) -> (i64, i64) {
        ((p.x / self.tol).floor() as i64, (p.y / self.tol).floor() as i64)
    }

    fn insert(&mut self, p: Point) -> usize {
        let (cx, cy) = self.cell(p);
        let mut best: Option<usize> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(cx + dx, cy + dy)) {
                    for &id in ids {
                        if self.nodes[id].dist(p) <= self.tol && best.is_none_or(|b| id < b) {
                            best = Some(id);
                        }
                    }
                }
            }
        }
        if let Some(id) = best {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(p);
        self.cells.entry((cx, cy)).or_default().push(id);
        id
    }
}

impl RoadGraph {
    /// Every polyline vertex becomes a node; vertices within `snap_tol` merge,
    /// which joins lines at shared endpoints and shared interior vertices.
    pub fn build(roads: &[LineString], snap_tol: f64) -> RoadGraph {
        let mut snapper = NodeSnapper {
            tol: snap_tol.max(f64::MIN_POSITIVE),
            cells: HashMap::new(),
            nodes: Vec::new(),
        };
        let mut edge_set: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for line in roads {
            let ids: Vec<usize> = line.0.iter().map(|&p| snapper.insert(p)).collect();
            for w in ids.windows(2) {
                if w[0] == w[1] {
                    continue;
                }
                let key = (w[0].min(w[1]), w[0].max(w[1]));
                let len = snapper.nodes[key.0].dist(snapper.nodes[key.1]);
                edge_set.entry(key).or_insert(len);
            }
        }
        let nodes = snapper.nodes;
        let edges: Vec<Edge> = edge_set.into_iter().map(|((a, b), length)| Edge { a, b, length }).collect();
        Self::from_parts(nodes, edges)
    }

    /// Graph from explicit nodes and edges; edge lengths must be ≥ endpoint distance.
    pub fn from_parts(nodes: Vec<Point>, edges: Vec<Edge>) -> RoadGraph {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.a].push((e.b, e.length));
            adjacency[e.b].push((e.a, e.length));
        }
        let edge_index = SpatialIndex::from_boxes(edges.iter().map(|e| BBox::from_points([nodes[e.a], nodes[e.b]])));
        RoadGraph {
            nodes,
            edges,
            adjacency,
            edge_index,
        }
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Number of connected components (isolated nodes count).
    pub fn component_count(&self) -> usize {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }

    /// Nearest point on the nearest edge within `max_dist`; ties go to the lower edge index.
    pub fn snap(&self, p: Point, max_dist: f64) -> Option<Snap> {
        let mut best: Option<Snap> = None;
        for ei in self.edge_index.query(&BBox::around(p, max_dist)) {
            let e = self.edges[ei];
            let (a, b) = (self.nodes[e.a], self.nodes[e.b]);
            let t = project_onto_segment(p, a, b);
            let q = Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            let leg = p.dist(q);
            if leg <= max_dist && best.is_none_or(|s| leg < s.leg) {
                best = Some(Snap { edge: ei, t, point: q, leg });
            }
        }
        best
    }

    fn seeds(&self, s: &Snap) -> [(usize, f64); 2] {
        let e = self.edges[s.edge];
        [(e.a, s.leg + s.t * e.length), (e.b, s.leg + (1.0 - s.t) * e.length)]
    }

    /// Single-source distances from a snapped origin to every node. Nodes beyond
    /// `cutoff` (when given) stay at infinity.
    pub fn distances_from(&self, origin: &Snap, cutoff: Option<f64>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        for (n, d) in self.seeds(origin) {
            if d < dist[n] {
                dist[n] = d;
                heap.push(State { cost: d, node: n });
            }
        }
        let limit = cutoff.unwrap_or(f64::INFINITY);
        while let Some(State { cost, node }) = heap.pop() {
            if cost > dist[node] || cost > limit {
                continue;
            }
            for &(next, w) in &self.adjacency[node] {
                let nd = cost + w;
                if nd < dist[next] {
                    dist[next] = nd;
                    heap.push(State { cost: nd, node: next });
                }
            }
        }
        dist
    }

    /// Distance to a snapped target given node distances from `origin`.
    pub fn distance_to(&self, origin: &Snap, node_dist: &[f64], target: &Snap) -> f64 {
        let e = self.edges[target.edge];
        let via_a = node_dist[e.a] + target.t * e.length;
        let via_b = node_dist[e.b] + (1.0 - target.t) * e.length;
        let mut best = via_a.min(via_b);
        if origin.edge == target.edge {
            best = best.min(origin.leg + (origin.t - target.t).abs() * e.length);
            return best + target.leg;
        }
        best + target.leg
    }

    /// Walking distance between two free points, or `None` when either is more
    /// than `max_snap` from the network or they are disconnected.
    pub fn network_distance(&self, from: Point, to: Point, max_snap: f64) -> Option<f64> {
        let s = self.snap(from, max_snap)?;
        let t = self.snap(to, max_snap)?;
        let dist = self.distances_from(&s, None);
        let d = self.distance_to(&s, &dist, &t);
        d.is_finite().then_some(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
