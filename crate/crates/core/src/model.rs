//! Records produced by ingestion and enriched by the indicator stages.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::form::FormType;
use crate::geom::{LineString, MultiPolygon, Point};
use crate::layout::LayoutPattern;

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingRecord {
    pub id: String,
    pub geometry: MultiPolygon,
    /// m²
    pub foot_area: f64,
    /// m
    pub perimeter: f64,
    pub height: Option<f64>,
    pub num_floors: Option<u32>,
    /// Degrees clockwise from north, [0, 360).
    pub orientation: Option<f64>,
    pub level1: Option<String>,
    pub level2: Option<String>,
    pub level2_code: Option<String>,
    pub level3: Option<String>,
    pub form_type: Option<FormType>,
    pub plot_id: Option<String>,
    /// Softmax probability of a predicted level-2 code; absent for ground truth.
    pub confidence: Option<f64>,
    pub ci: Option<f64>,
    /// Input properties the engine does not interpret, passed through untouched.
    pub extra: BTreeMap<String, Value>,
}

impl BuildingRecord {
    /// Minimal record from a footprint, with derived area and perimeter.
    pub fn new(id: impl Into<String>, geometry: MultiPolygon) -> Self {
        let foot_area = geometry.area();
        let perimeter = geometry.perimeter();
        Self {
            id: id.into(),
            geometry,
            foot_area,
            perimeter,
            height: None,
            num_floors: None,
            orientation: None,
            level1: None,
            level2: None,
            level2_code: None,
            level3: None,
            form_type: None,
            plot_id: None,
            confidence: None,
            ci: None,
            extra: BTreeMap::new(),
        }
    }

    /// Level-2 identifier: the code when present, else the type name.
    pub fn level2_key(&self) -> Option<&str> {
        self.level2_code.as_deref().or(self.level2.as_deref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AccessCounts {
    pub bus_in_buffer: usize,
    pub bus_accessible: usize,
    pub mrt_in_buffer: usize,
    pub mrt_accessible: usize,
}

impl AccessCounts {
    pub fn in_buffer(&self) -> usize {
        self.bus_in_buffer + self.mrt_in_buffer
    }

    pub fn accessible(&self) -> usize {
        self.bus_accessible + self.mrt_accessible
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRecord {
    pub mp_name: String,
    pub land_use: String,
    pub subzone: String,
    pub geometry: MultiPolygon,
    pub plot_area: f64,
    /// Outer `None`: not computed. `Some(None)`: computed, no pattern (≤ 1 candidate).
    pub layout_pattern: Option<Option<LayoutPattern>>,
    pub functional_ratios: Option<BTreeMap<String, f64>>,
    pub si: Option<f64>,
    pub pta: Option<f64>,
    pub ci: Option<f64>,
    pub access_counts: Option<AccessCounts>,
    pub far: Option<f64>,
    pub bcr: Option<f64>,
    pub bcr_outlier: Option<bool>,
    pub floors_estimated: Option<u32>,
    pub extra: BTreeMap<String, Value>,
}

impl PlotRecord {
    pub fn new(mp_name: impl Into<String>, land_use: impl Into<String>, subzone: impl Into<String>, geometry: MultiPolygon) -> Self {
        let plot_area = geometry.area();
        Self {
            mp_name: mp_name.into(),
            land_use: land_use.into(),
            subzone: subzone.into(),
            geometry,
            plot_area,
            layout_pattern: None,
            functional_ratios: None,
            si: None,
            pta: None,
            ci: None,
            access_counts: None,
            far: None,
            bcr: None,
            bcr_outlier: None,
            floors_estimated: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoiRecord {
    pub id: String,
    pub category: String,
    pub location: Point,
    /// Ingested but not used by any indicator.
    pub rating: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitKind {
    Bus,
    Mrt,
}

impl TransitKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bus" | "bus stop" | "bus_stop" => Some(TransitKind::Bus),
            "mrt" | "mrt station" | "mrt_station" => Some(TransitKind::Mrt),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TransitKind::Bus => "bus",
            TransitKind::Mrt => "mrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitStop {
    pub id: String,
    pub kind: TransitKind,
    pub location: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Buildings,
    Plots,
    Pois,
    Roads,
    Transit,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Buildings => "buildings",
            Layer::Plots => "plots",
            Layer::Pois => "pois",
            Layer::Roads => "roads",
            Layer::Transit => "transit",
        }
    }
}

/// A feature dropped during ingestion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub layer: Layer,
    /// Position of the feature in its FeatureCollection.
    pub index: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub buildings: Vec<BuildingRecord>,
    pub plots: Vec<PlotRecord>,
    pub pois: Vec<PoiRecord>,
    pub roads: Vec<LineString>,
    pub transit: Vec<TransitStop>,
    pub rejections: Vec<Rejection>,
}

impl Dataset {
    /// Buildings grouped by plot id, as indices into `buildings`, in dataset order.
    pub fn buildings_by_plot(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, b) in self.buildings.iter().enumerate() {
            if let Some(pid) = b.plot_id.as_deref() {
                out.entry(pid).or_default().push(i);
            }
        }
        out
    }
}
