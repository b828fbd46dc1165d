//! Typed-edge building graph with standardised node features.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use spli_core::config::FunctionsConfig;
use spli_core::geom::{min_bounding_rect_of_points, Point};
use spli_core::index::PointIndex;
use spli_core::model::Dataset;

use crate::matrix::{Adjacency, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    SamePlot,
    SpatialNeighbor,
}

impl Relation {
    pub const ALL: [Relation; 2] = [Relation::SamePlot, Relation::SpatialNeighbor];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("dataset has no buildings")]
    Empty,
    #[error("feature schema has {expected} columns, normaliser has {found}")]
    SchemaMismatch { expected: usize, found: usize },
}

/// Which POI categories and land uses become feature columns.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub poi_categories: Vec<String>,
    pub land_uses: Vec<String>,
}

const BASE_FEATURES: [&str; 5] = ["log_area", "height", "height_missing", "compactness", "mbr_aspect"];

fn poi_key(category: &str) -> String {
    category.trim().to_lowercase()
}

impl FeatureSchema {
    pub fn from_dataset(ds: &Dataset) -> FeatureSchema {
        let poi_categories: BTreeSet<String> =
            ds.pois.iter().map(|p| poi_key(&p.category)).filter(|c| !c.is_empty()).collect();
        let land_uses: BTreeSet<String> = ds.plots.iter().map(|p| p.land_use.trim().to_string()).collect();
        FeatureSchema {
            poi_categories: poi_categories.into_iter().collect(),
            land_uses: land_uses.into_iter().collect(),
        }
    }

    pub fn width(&self) -> usize {
        BASE_FEATURES.len() + self.poi_categories.len() + self.land_uses.len()
    }

    pub fn names(&self) -> Vec<String> {
        BASE_FEATURES
            .iter()
            .map(|s| s.to_string())
            .chain(self.poi_categories.iter().map(|c| format!("poi:{c}")))
            .chain(self.land_uses.iter().map(|l| format!("landuse:{l}")))
            .collect()
    }
}

/// Per-column standardisation. Columns with zero variance map to 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Normalizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Normalizer {
    /// Population mean and standard deviation of each column.
    pub fn fit(x: &Mat) -> Normalizer {
        let n = x.rows.max(1) as f64;
        let mut means = vec![0.0; x.cols];
        for r in 0..x.rows {
            for (m, v) in means.iter_mut().zip(x.row(r)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; x.cols];
        for r in 0..x.rows {
            for ((s, v), m) in vars.iter_mut().zip(x.row(r)).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let stds = vars.into_iter().map(|s| (s / n).sqrt()).collect();
        Normalizer { means, stds }
    }

    pub fn apply(&self, x: &mut Mat) {
        for r in 0..x.rows {
            for ((v, m), s) in x.row_mut(r).iter_mut().zip(&self.means).zip(&self.stds) {
                *v = if *s > 1e-12 { (*v - m) / s } else { 0.0 };
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelGraph {
    pub ids: Vec<String>,
    /// Standardised node features, one row per building in dataset order.
    pub features: Mat,
    pub feature_names: Vec<String>,
    /// Indexed by [`Relation::index`].
    pub relations: Vec<Adjacency>,
    /// Class index of each labelled building.
    pub labels: Vec<Option<usize>>,
    pub classes: Vec<String>,
}

impl RelGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn relation(&self, r: Relation) -> &Adjacency {
        &self.relations[r.index()]
    }

    pub fn labelled(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i].is_some()).collect()
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Per-building neighbour threshold: factor × median nearest-neighbour
/// distance among buildings of the same plot, clamped to [min, max].
/// Buildings without a plot use the dataset-wide median.
pub fn neighbor_thresholds(centroids: &[Point], plot_ids: &[Option<&str>], cfg: &FunctionsConfig) -> Vec<f64> {
    let index = PointIndex::new(centroids.iter().copied());
    let nn: Vec<Option<f64>> = centroids
        .iter()
        .enumerate()
        .map(|(i, &c)| index.nearest_distance_excluding(c, i))
        .collect();
    let clamp = |m: Option<f64>| (cfg.neighbor_factor * m.unwrap_or(0.0)).clamp(cfg.neighbor_min_m, cfg.neighbor_max_m);
    let global = clamp(median(nn.iter().flatten().copied().collect()));
    let mut per_plot: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (pid, d) in plot_ids.iter().zip(&nn) {
        if let (Some(pid), Some(d)) = (pid, d) {
            per_plot.entry(pid).or_default().push(*d);
        }
    }
    let per_plot: BTreeMap<&str, f64> = per_plot.into_iter().map(|(k, v)| (k, clamp(median(v)))).collect();
    plot_ids
        .iter()
        .map(|pid| pid.and_then(|p| per_plot.get(p).copied()).unwrap_or(global))
        .collect()
}

/// SamePlot and SpatialNeighbor adjacency over buildings in dataset order.
pub fn build_relations(ds: &Dataset, cfg: &FunctionsConfig) -> Vec<Adjacency> {
    let n = ds.buildings.len();
    let centroids: Vec<Point> = ds.buildings.iter().map(|b| b.geometry.anchor()).collect();
    let plot_ids: Vec<Option<&str>> = ds.buildings.iter().map(|b| b.plot_id.as_deref()).collect();

    let same_plot = Adjacency::from_edges(
        n,
        ds.buildings_by_plot()
            .into_values()
            .flat_map(|members| {
                let pairs: Vec<(usize, usize)> = members
                    .iter()
                    .enumerate()
                    .flat_map(|(k, &a)| members[k + 1..].iter().map(move |&b| (a, b)))
                    .collect();
                pairs
            }),
    );

    let thresholds = neighbor_thresholds(&centroids, &plot_ids, cfg);
    let index = PointIndex::new(centroids.iter().copied());
    let mut edges = Vec::new();
    for (i, &c) in centroids.iter().enumerate() {
        for j in index.within(c, cfg.neighbor_max_m) {
            if j > i && c.dist(centroids[j]) <= thresholds[i].min(thresholds[j]) {
                edges.push((i, j));
            }
        }
    }
    let neighbor = Adjacency::from_edges(n, edges);
    let mut out = vec![Adjacency::new(n); Relation::ALL.len()];
    out[Relation::SamePlot.index()] = same_plot;
    out[Relation::SpatialNeighbor.index()] = neighbor;
    out
}

/// Unstandardised feature matrix under `schema`.
pub fn raw_features(ds: &Dataset, schema: &FeatureSchema, cfg: &FunctionsConfig) -> Mat {
    let land_use: BTreeMap<&str, &str> = ds.plots.iter().map(|p| (p.mp_name.as_str(), p.land_use.trim())).collect();
    let poi_col: BTreeMap<&str, usize> = schema
        .poi_categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), BASE_FEATURES.len() + i))
        .collect();
    let lu_col: BTreeMap<&str, usize> = schema
        .land_uses
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), BASE_FEATURES.len() + schema.poi_categories.len() + i))
        .collect();
    let poi_keys: Vec<String> = ds.pois.iter().map(|p| poi_key(&p.category)).collect();
    let poi_index = PointIndex::new(ds.pois.iter().map(|p| p.location));

    let mut x = Mat::zeros(ds.buildings.len(), schema.width());
    for (r, b) in ds.buildings.iter().enumerate() {
        let row = x.row_mut(r);
        let area = b.foot_area.max(f64::MIN_POSITIVE);
        row[0] = area.ln();
        row[1] = b.height.unwrap_or(0.0);
        row[2] = if b.height.is_some() { 0.0 } else { 1.0 };
        row[3] = b.perimeter / area.sqrt();
        let pts: Vec<Point> = b.geometry.vertices().collect();
        row[4] = min_bounding_rect_of_points(&pts).map_or(1.0, |m| m.aspect_ratio());
        for k in poi_index.within(b.geometry.anchor(), cfg.poi_radius_m) {
            if let Some(&c) = poi_col.get(poi_keys[k].as_str()) {
                row[c] += 1.0;
            }
        }
        if let Some(&c) = b.plot_id.as_deref().and_then(|p| land_use.get(p)).and_then(|lu| lu_col.get(lu)) {
            row[c] = 1.0;
        }
    }
    x
}

/// Distinct level-2 keys among labelled buildings, sorted.
pub fn label_classes(ds: &Dataset) -> Vec<String> {
    let set: BTreeSet<&str> = ds.buildings.iter().filter_map(|b| b.level2_key()).collect();
    set.into_iter().map(str::to_string).collect()
}

/// Graph with schema, normaliser and classes fitted to `ds`.
pub fn build_relgraph(ds: &Dataset, cfg: &FunctionsConfig) -> Result<(RelGraph, FeatureSchema, Normalizer), GraphError> {
    if ds.buildings.is_empty() {
        return Err(GraphError::Empty);
    }
    let schema = FeatureSchema::from_dataset(ds);
    let raw = raw_features(ds, &schema, cfg);
    let norm = Normalizer::fit(&raw);
    let classes = label_classes(ds);
    let g = assemble(ds, cfg, &schema, &norm, raw, classes)?;
    Ok((g, schema, norm))
}

/// Graph under a previously fitted schema, normaliser and class list.
pub fn build_relgraph_with(
    ds: &Dataset,
    cfg: &FunctionsConfig,
    schema: &FeatureSchema,
    norm: &Normalizer,
    classes: &[String],
) -> Result<RelGraph, GraphError> {
    if ds.buildings.is_empty() {
        return Err(GraphError::Empty);
    }
    let raw = raw_features(ds, schema, cfg);
    assemble(ds, cfg, schema, norm, raw, classes.to_vec())
}

fn assemble(
    ds: &Dataset,
    cfg: &FunctionsConfig,
    schema: &FeatureSchema,
    norm: &Normalizer,
    mut features: Mat,
    classes: Vec<String>,
) -> Result<RelGraph, GraphError> {
    if norm.means.len() != schema.width() || norm.stds.len() != schema.width() {
        return Err(GraphError::SchemaMismatch {
            expected: schema.width(),
            found: norm.means.len(),
        });
    }
    norm.apply(&mut features);
    let class_index: BTreeMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let labels = ds
        .buildings
        .iter()
        .map(|b| b.level2_key().and_then(|k| class_index.get(k).copied()))
        .collect();
    Ok(RelGraph {
        ids: ds.buildings.iter().map(|b| b.id.clone()).collect(),
        features,
        feature_names: schema.names(),
        relations: build_relations(ds, cfg),
        labels,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spli_core::geom::{MultiPolygon, Polygon};
    use spli_core::model::PoiRecord;
    use spli_core::{BuildingRecord, PlotRecord};

    fn bldg(id: &str, x: f64, y: f64, plot: Option<&str>) -> BuildingRecord {
        let mut b = BuildingRecord::new(id, MultiPolygon::single(Polygon::rect(x, y, x + 10.0, y + 10.0)));
        b.plot_id = plot.map(Into::into);
        b
    }

    #[test]
    fn same_plot_far_apart() {
        let ds = Dataset {
            buildings: vec![bldg("a", 0.0, 0.0, Some("P")), bldg("b", 300.0, 0.0, Some("P"))],
            ..Default::default()
        };
        let rel = build_relations(&ds, &FunctionsConfig::default());
        assert!(rel[Relation::SamePlot.index()].has_edge(0, 1));
        assert!(!rel[Relation::SpatialNeighbor.index()].has_edge(0, 1));
    }

    #[test]
    fn isolated_building_has_no_edges() {
        let ds = Dataset {
            buildings: vec![bldg("a", 0.0, 0.0, None), bldg("b", 5000.0, 0.0, None)],
            ..Default::default()
        };
        let rel = build_relations(&ds, &FunctionsConfig::default());
        assert!(rel.iter().all(|a| a.neighbors[0].is_empty()));
    }

    #[test]
    fn threshold_is_clamped() {
        let cfg = FunctionsConfig::default();
        let c = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(500.0, 0.0), Point::new(700.0, 0.0)];
        let t = neighbor_thresholds(&c, &[Some("A"), Some("A"), Some("B"), Some("B")], &cfg);
        assert_eq!(t, vec![25.0, 25.0, 100.0, 100.0]);
    }

    #[test]
    fn features_standardised() {
        let mut bs: Vec<BuildingRecord> = (0..12).map(|i| bldg(&format!("b{i}"), i as f64 * 40.0, 0.0, Some("P"))).collect();
        for (i, b) in bs.iter_mut().enumerate() {
            b.height = if i % 3 == 0 { None } else { Some(3.0 * i as f64) };
        }
        bs[4].geometry = MultiPolygon::single(Polygon::rect(160.0, 0.0, 200.0, 10.0));
        bs[4].foot_area = bs[4].geometry.area();
        bs[4].perimeter = bs[4].geometry.perimeter();
        let ds = Dataset {
            buildings: bs,
            plots: vec![PlotRecord::new("P", "RESIDENTIAL", "Z", MultiPolygon::single(Polygon::rect(-10.0, -10.0, 600.0, 50.0)))],
            pois: vec![PoiRecord {
                id: "s".into(),
                category: "School".into(),
                location: Point::new(20.0, 5.0),
                rating: None,
            }],
            ..Default::default()
        };
        let (g, schema, _) = build_relgraph(&ds, &FunctionsConfig::default()).unwrap();
        assert_eq!(schema.poi_categories, vec!["school".to_string()]);
        assert_eq!(g.feature_names.len(), g.features.cols);
        for c in 0..g.features.cols {
            let col: Vec<f64> = (0..g.features.rows).map(|r| g.features.get(r, c)).collect();
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9);
            // The single land-use column is constant and maps to zero.
            assert!((var - 1.0).abs() < 1e-9 || var == 0.0, "column {} var {var}", g.feature_names[c]);
        }
    }
}
