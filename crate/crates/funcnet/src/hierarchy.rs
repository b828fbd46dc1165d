//! Level-1 rollup from level-2 codes and rule-based level-3 refinement.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use spli_core::config::FunctionsConfig;
use spli_core::geom::{min_bounding_rect_of_points, polygon_distance, BBox, MultiPolygon, Point};
use spli_core::index::{PointIndex, SpatialIndex};
use spli_core::model::{BuildingRecord, Dataset};

pub const UNCLASSIFIED: &str = "Unclassified";

const DEFAULT_MAPPING: &str = include_str!("../data/level_mapping.csv");

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("mapping table: {0}")]
    Csv(#[from] csv::Error),
    #[error("mapping table: {0}")]
    Io(#[from] std::io::Error),
    #[error("mapping table lists code {0} twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct MappingRow {
    pub code: String,
    pub level2_name: String,
    pub level1: String,
}

/// Level-2 code → (level-2 name, level-1 category).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapping {
    rows: BTreeMap<String, MappingRow>,
}

impl Default for Mapping {
    fn default() -> Self {
        Mapping::from_reader(DEFAULT_MAPPING.as_bytes()).expect("bundled mapping table parses")
    }
}

impl Mapping {
    pub fn from_reader(r: impl std::io::Read) -> Result<Mapping, MappingError> {
        let mut rows = BTreeMap::new();
        for row in csv::Reader::from_reader(r).deserialize() {
            let row: MappingRow = row?;
            let code = row.code.trim().to_string();
            if rows.insert(code.clone(), row).is_some() {
                return Err(MappingError::Duplicate(code));
            }
        }
        Ok(Mapping { rows })
    }

    pub fn from_path(path: &Path) -> Result<Mapping, MappingError> {
        Mapping::from_reader(std::fs::File::open(path)?)
    }

    pub fn get(&self, code: &str) -> Option<&MappingRow> {
        self.rows.get(code.trim())
    }

    pub fn by_name(&self, name: &str) -> Option<&MappingRow> {
        self.rows.values().find(|r| r.level2_name == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Level-1 category of a level-2 code. Unknown codes are "Unclassified".
pub fn derive_level1(code: &str, mapping: &Mapping) -> String {
    match mapping.get(code) {
        Some(row) => row.level1.clone(),
        None => {
            log::warn!("level-2 code {code:?} is not in the mapping table; level-1 set to {UNCLASSIFIED}");
            UNCLASSIFIED.to_string()
        }
    }
}

/// Level-1 for a building from its code, else its level-2 name.
pub fn building_level1(b: &BuildingRecord, mapping: &Mapping) -> Option<String> {
    if let Some(code) = &b.level2_code {
        return Some(derive_level1(code, mapping));
    }
    let name = b.level2.as_deref()?;
    Some(match mapping.by_name(name) {
        Some(row) => row.level1.clone(),
        None => derive_level1(name, mapping),
    })
}

/// Sets level-1 on every building that has a level-2 label.
pub fn apply_level1(ds: &mut Dataset, mapping: &Mapping) {
    for b in &mut ds.buildings {
        b.level1 = building_level1(b, mapping);
    }
}

fn level2_label(b: &BuildingRecord) -> Option<&str> {
    b.level2.as_deref().or(b.level2_code.as_deref())
}

fn multi_distance(a: &MultiPolygon, b: &MultiPolygon) -> f64 {
    a.parts()
        .iter()
        .flat_map(|p| b.parts().iter().map(move |q| polygon_distance(p, q)))
        .fold(f64::INFINITY, f64::min)
}

/// Number of other buildings whose footprints lie within `tol` of building `i`.
fn touching(ds: &Dataset, index: &SpatialIndex, i: usize, tol: f64) -> usize {
    let b = &ds.buildings[i].geometry;
    let bb = b.bbox();
    let q = BBox {
        min: Point::new(bb.min.x - tol, bb.min.y - tol),
        max: Point::new(bb.max.x + tol, bb.max.y + tol),
    };
    index
        .query(&q)
        .into_iter()
        .filter(|&j| j != i && multi_distance(b, &ds.buildings[j].geometry) <= tol)
        .count()
}

/// Whether building `i` is a narrow connector between at least two others.
pub fn is_corridor(ds: &Dataset, index: &SpatialIndex, i: usize, cfg: &FunctionsConfig) -> bool {
    let pts: Vec<Point> = ds.buildings[i].geometry.vertices().collect();
    let Ok(mbr) = min_bounding_rect_of_points(&pts) else {
        return false;
    };
    mbr.aspect_ratio() > cfg.corridor_min_aspect
        && mbr.width < cfg.corridor_max_width_m
        && touching(ds, index, i, cfg.corridor_touch_m) >= cfg.corridor_min_connections
}

fn matches_any(text: &str, keywords: &[String]) -> bool {
    let t = text.to_lowercase();
    keywords.iter().any(|k| t.contains(&k.to_lowercase()))
}

/// Level-3 label for every building with a level-2 label.
pub fn refine_level3(ds: &Dataset, cfg: &FunctionsConfig) -> Vec<Option<String>> {
    let index = SpatialIndex::from_boxes(ds.buildings.iter().map(|b| b.geometry.bbox()));
    let poi_index = PointIndex::new(ds.pois.iter().map(|p| p.location));
    let nearest_poi = |at: Point, wanted: &[String]| -> Option<String> {
        poi_index
            .within(at, cfg.refine_poi_radius_m)
            .into_iter()
            .filter(|&k| wanted.iter().any(|w| w.eq_ignore_ascii_case(ds.pois[k].category.trim())))
            .map(|k| (ds.pois[k].location.dist(at), k))
            .filter(|(d, _)| *d <= cfg.refine_poi_radius_m)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, k)| ds.pois[k].category.trim().to_lowercase())
    };
    ds.buildings
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let label = level2_label(b)?;
            if is_corridor(ds, &index, i, cfg) {
                return Some(format!("{label}-corridor"));
            }
            let at = b.geometry.anchor();
            let refined = if matches_any(label, &cfg.religious_types) {
                nearest_poi(at, &cfg.religious_pois)
            } else if matches_any(label, &cfg.educational_types) {
                nearest_poi(at, &cfg.student_pois)
            } else {
                None
            };
            Some(match refined {
                Some(cat) => format!("{label}-{cat}"),
                None => label.to_string(),
            })
        })
        .collect()
}

pub fn apply_level3(ds: &mut Dataset, cfg: &FunctionsConfig) {
    let labels = refine_level3(ds, cfg);
    for (b, l) in ds.buildings.iter_mut().zip(labels) {
        b.level3 = l;
    }
}
