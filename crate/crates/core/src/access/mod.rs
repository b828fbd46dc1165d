//! Connectivity index and public transit accessibility.

mod roads;

pub use roads::{Edge, RoadGraph, Snap};

use crate::config::AccessConfig;
use crate::exec::{self, Exec};
use crate::geom::Point;
use crate::index::PointIndex;
use crate::model::{AccessCounts, Dataset, PoiRecord, TransitKind, TransitStop};

/// Maps a raw POI category onto a configured weight key: case-insensitive,
/// tolerant of a plural `s` and of qualifiers after the first word
/// (`"Convenience Store"` → `convenience`).
pub fn normalize_category<'w>(raw: &str, cfg: &'w AccessConfig) -> Option<(&'w str, f64)> {
    let lower = raw.trim().to_lowercase();
    let lookup = |k: &str| cfg.weights.get_key_value(k).map(|(k, w)| (k.as_str(), *w));
    if let Some(hit) = lookup(&lower) {
        return Some(hit);
    }
    if let Some(hit) = lower.strip_suffix('s').and_then(lookup) {
        return Some(hit);
    }
    let first = lower.split(|c: char| !c.is_alphanumeric()).find(|s| !s.is_empty())?;
    lookup(first).or_else(|| first.strip_suffix('s').and_then(lookup))
}

/// Weighted POIs with an index for radius queries.
pub struct Facilities {
    points: Vec<(Point, f64)>,
    index: PointIndex,
}

impl Facilities {
    pub fn new(pois: &[PoiRecord], cfg: &AccessConfig) -> Facilities {
        let points: Vec<(Point, f64)> = pois
            .iter()
            .filter_map(|p| normalize_category(&p.category, cfg).map(|(_, w)| (p.location, w)))
            .collect();
        let index = PointIndex::new(points.iter().map(|(p, _)| *p));
        Facilities { points, index }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Σ w / max(d, floor) over facilities within the radius, d in kilometres.
    pub fn connectivity_index(&self, at: Point, cfg: &AccessConfig) -> f64 {
        let floor_km = cfg.distance_floor_m / 1000.0;
        self.index
            .within(at, cfg.radius_m)
            .into_iter()
            .map(|i| {
                let (p, w) = self.points[i];
                w / (at.dist(p) / 1000.0).max(floor_km)
            })
            .sum()
    }
}

pub fn connectivity_index(at: Point, pois: &[PoiRecord], cfg: &AccessConfig) -> f64 {
    Facilities::new(pois, cfg).connectivity_index(at, cfg)
}

/// Transit stops with their network attachment precomputed.
pub struct TransitNetwork<'a> {
    graph: &'a RoadGraph,
    stops: &'a [TransitStop],
    snaps: Vec<Option<Snap>>,
    index: PointIndex,
}

fn threshold(kind: TransitKind, cfg: &AccessConfig) -> f64 {
    match kind {
        TransitKind::Bus => cfg.bus_threshold_m,
        TransitKind::Mrt => cfg.mrt_threshold_m,
    }
}

impl<'a> TransitNetwork<'a> {
    pub fn new(graph: &'a RoadGraph, stops: &'a [TransitStop], cfg: &AccessConfig) -> Self {
        let snaps = stops.iter().map(|s| graph.snap(s.location, cfg.max_snap_distance_m)).collect();
        let index = PointIndex::new(stops.iter().map(|s| s.location));
        TransitNetwork {
            graph,
            stops,
            snaps,
            index,
        }
    }

    /// Stop counts within straight-line buffers and within network thresholds.
    pub fn counts(&self, at: Point, cfg: &AccessConfig) -> AccessCounts {
        let reach = cfg.bus_threshold_m.max(cfg.mrt_threshold_m);
        let buffered: Vec<usize> = self
            .index
            .within(at, reach)
            .into_iter()
            .filter(|&i| at.dist(self.stops[i].location) <= threshold(self.stops[i].kind, cfg))
            .collect();
        let mut counts = AccessCounts::default();
        if buffered.is_empty() {
            return counts;
        }
        let origin = self.graph.snap(at, cfg.max_snap_distance_m);
        let node_dist = origin.map(|o| self.graph.distances_from(&o, Some(reach)));
        for i in buffered {
            let stop = &self.stops[i];
            let limit = threshold(stop.kind, cfg);
            let reachable = match (&origin, &node_dist, &self.snaps[i]) {
                (Some(o), Some(nd), Some(t)) => self.graph.distance_to(o, nd, t) <= limit,
                _ => false,
            };
            match stop.kind {
                TransitKind::Bus => {
                    counts.bus_in_buffer += 1;
                    counts.bus_accessible += reachable as usize;
                }
                TransitKind::Mrt => {
                    counts.mrt_in_buffer += 1;
                    counts.mrt_accessible += reachable as usize;
                }
            }
        }
        counts
    }
}

pub fn pta_from_counts(c: &AccessCounts) -> f64 {
    if c.in_buffer() == 0 {
        0.0
    } else {
        c.accessible() as f64 / c.in_buffer() as f64
    }
}

pub fn transit_accessibility(at: Point, graph: &RoadGraph, stops: &[TransitStop], cfg: &AccessConfig) -> (f64, AccessCounts) {
    let counts = TransitNetwork::new(graph, stops, cfg).counts(at, cfg);
    (pta_from_counts(&counts), counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessResult {
    pub ci: f64,
    pub pta: f64,
    pub counts: AccessCounts,
}

/// CI and PTA for every plot, measured from the plot centroid.
pub fn plot_access(ds: &Dataset, graph: &RoadGraph, cfg: &AccessConfig, exec: Exec) -> Vec<AccessResult> {
    let facilities = Facilities::new(&ds.pois, cfg);
    let transit = TransitNetwork::new(graph, &ds.transit, cfg);
    exec::map(exec, &ds.plots, |plot| {
        let c = plot.geometry.anchor();
        let counts = transit.counts(c, cfg);
        AccessResult {
            ci: facilities.connectivity_index(c, cfg),
            pta: pta_from_counts(&counts),
            counts,
        }
    })
}
