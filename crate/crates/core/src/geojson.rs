//! GeoJSON ingestion and enriched-output serialization.
//!
//! Reading is lenient per feature (a bad feature becomes a [`Rejection`]) and
//! strict per file (unreadable or non-FeatureCollection input is fatal).
//! Everything the writer emits is read back into the same record fields.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{Crs, InputPaths};
use crate::form::FormType;
use crate::geom::{LineString, MultiPolygon, Point, Polygon, Ring};
use crate::layout::LayoutPattern;
use crate::model::{
    AccessCounts, BuildingRecord, Dataset, Layer, PlotRecord, PoiRecord, Rejection, TransitKind, TransitStop,
};
use crate::projection::project_lonlat;

/// Output property names.
pub mod fields {
    pub const ID: &str = "id";
    pub const HEIGHT: &str = "height";
    pub const FLOORS: &str = "floors";
    pub const FOOT_AREA: &str = "Foot_Area";
    pub const PERIMETER: &str = "Perimeter";
    pub const ORIENTATION: &str = "Orientation";
    pub const FORM_TYPE: &str = "Form_Type";
    pub const PLOT_ID: &str = "plot_id";
    pub const CATEGORY: &str = "Building_Category";
    pub const TYPE: &str = "Building_Type";
    pub const TYPE_CODE: &str = "Building_Type_Code";
    pub const FUNCTION: &str = "Building_Function";
    pub const CONFIDENCE: &str = "confidence";
    pub const CI: &str = "CI";

    pub const MP_NAME: &str = "mp_name";
    pub const LAND_USE: &str = "land_use";
    pub const SUBZONE: &str = "subzone";
    pub const PLOT_AREA: &str = "Plot_Area";
    pub const LAYOUT_PATTERN: &str = "Layout_Pattern";
    pub const FR: &str = "FR";
    pub const SI: &str = "SI";
    pub const PTA: &str = "PTA";
    pub const FAR: &str = "FAR";
    pub const BCR: &str = "BCR";
    pub const BCR_OUTLIER: &str = "BCR_outlier";
    pub const FLOORS_ESTIMATED: &str = "floors_estimated";
    pub const BUS_IN_BUFFER: &str = "bus_stops_in_buffer";
    pub const BUS_ACCESSIBLE: &str = "bus_stops_accessible";
    pub const MRT_IN_BUFFER: &str = "mrt_stations_in_buffer";
    pub const MRT_ACCESSIBLE: &str = "mrt_stations_accessible";
}

// Input aliases accepted in addition to the output names above.
const ALIAS_LEVEL1: &[&str] = &[fields::CATEGORY, "level1"];
const ALIAS_LEVEL2: &[&str] = &[fields::TYPE, "level2"];
const ALIAS_LEVEL2_CODE: &[&str] = &[fields::TYPE_CODE, "level2_code"];
const ALIAS_LEVEL3: &[&str] = &[fields::FUNCTION, "level3"];
const ALIAS_MP_NAME: &[&str] = &[fields::MP_NAME, "MP_Name"];
const ALIAS_LAND_USE: &[&str] = &[fields::LAND_USE, "Land_Use"];
const ALIAS_SUBZONE: &[&str] = &[fields::SUBZONE, "Subzone"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not valid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}: not a GeoJSON FeatureCollection")]
    NotFeatureCollection(String),
}

type FeatureResult<T> = Result<T, String>;

fn read_json(path: &Path) -> Result<Value, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IngestError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn features<'a>(fc: &'a Value, what: &str) -> Result<&'a [Value], IngestError> {
    if fc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(IngestError::NotFeatureCollection(what.to_string()));
    }
    fc.get("features")
        .and_then(Value::as_array)
        .map(Vec::as_slice)
        .ok_or_else(|| IngestError::NotFeatureCollection(what.to_string()))
}

/// Parses every configured layer. Layers without a path are empty.
pub fn parse_layers(paths: &InputPaths, crs: Crs) -> Result<Dataset, IngestError> {
    let mut ds = Dataset::default();
    let load = |p: &Option<PathBuf>| -> Result<Option<Value>, IngestError> { p.as_deref().map(read_json).transpose() };
    if let Some(v) = load(&paths.buildings)? {
        let (recs, rej) = parse_buildings(&v, crs)?;
        ds.buildings = recs;
        ds.rejections.extend(rej);
    }
    if let Some(v) = load(&paths.plots)? {
        let (recs, rej) = parse_plots(&v, crs)?;
        ds.plots = recs;
        ds.rejections.extend(rej);
    }
    if let Some(v) = load(&paths.pois)? {
        let (recs, rej) = parse_pois(&v, crs)?;
        ds.pois = recs;
        ds.rejections.extend(rej);
    }
    if let Some(v) = load(&paths.roads)? {
        let (recs, rej) = parse_roads(&v, crs)?;
        ds.roads = recs;
        ds.rejections.extend(rej);
    }
    if let Some(v) = load(&paths.transit)? {
        let (recs, rej) = parse_transit(&v, crs)?;
        ds.transit = recs;
        ds.rejections.extend(rej);
    }
    Ok(ds)
}

fn props(f: &Value) -> &Map<String, Value> {
    static EMPTY: std::sync::OnceLock<Map<String, Value>> = std::sync::OnceLock::new();
    f.get("properties")
        .and_then(Value::as_object)
        .unwrap_or_else(|| EMPTY.get_or_init(Map::new))
}

fn lookup<'a>(p: &'a Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| p.get(*n)).filter(|v| !v.is_null())
}

fn string_prop(p: &Map<String, Value>, names: &[&str]) -> FeatureResult<Option<String>> {
    match lookup(p, names) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(Value::Number(n)) => Ok(Some(n.to_string())),
        Some(other) => Err(format!("property `{}` must be a string, got {other}", names[0])),
    }
}

fn number_prop(p: &Map<String, Value>, names: &[&str]) -> FeatureResult<Option<f64>> {
    match lookup(p, names) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| format!("property `{}` is not finite", names[0])),
        Some(Value::String(s)) if s.trim().is_empty() => Ok(None),
        Some(Value::String(s)) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| format!("property `{}` is not a number: `{s}`", names[0])),
        Some(other) => Err(format!("property `{}` must be numeric, got {other}", names[0])),
    }
}

fn feature_id(f: &Value, p: &Map<String, Value>) -> Option<String> {
    string_prop(p, &[fields::ID])
        .ok()
        .flatten()
        .or_else(|| match f.get("id") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            _ => None,
        })
}

struct Coords {
    crs: Crs,
}

impl Coords {
    fn point(&self, v: &Value) -> FeatureResult<Point> {
        let arr = v.as_array().ok_or("coordinate is not an array")?;
        if arr.len() < 2 {
            return Err("coordinate has fewer than 2 components".into());
        }
        let x = arr[0].as_f64().ok_or("coordinate component is not a number")?;
        let y = arr[1].as_f64().ok_or("coordinate component is not a number")?;
        match self.crs {
            Crs::Projected => {
                let p = Point::new(x, y);
                if p.is_finite() {
                    Ok(p)
                } else {
                    Err("non-finite coordinate".into())
                }
            }
            Crs::Wgs84 => project_lonlat(x, y).map_err(|e| e.to_string()),
        }
    }

    fn line(&self, v: &Value) -> FeatureResult<Vec<Point>> {
        v.as_array()
            .ok_or("coordinate list is not an array")?
            .iter()
            .map(|c| self.point(c))
            .collect()
    }

    fn polygon(&self, v: &Value) -> FeatureResult<Polygon> {
        let rings = v.as_array().ok_or("polygon rings are not an array")?;
        let mut it = rings.iter();
        let exterior = Ring(self.line(it.next().ok_or("polygon has no rings")?)?);
        let interiors = it.map(|r| self.line(r).map(Ring)).collect::<FeatureResult<Vec<_>>>()?;
        let poly = Polygon::new(exterior, interiors);
        poly.validate().map_err(|e| e.to_string())?;
        Ok(poly)
    }

    fn areal(&self, geom: Option<&Value>) -> FeatureResult<MultiPolygon> {
        let (kind, coords) = geometry_parts(geom)?;
        match kind {
            "Polygon" => Ok(MultiPolygon::single(self.polygon(coords)?)),
            "MultiPolygon" => {
                let parts = coords
                    .as_array()
                    .ok_or("multipolygon coordinates are not an array")?
                    .iter()
                    .map(|p| self.polygon(p))
                    .collect::<FeatureResult<Vec<_>>>()?;
                if parts.is_empty() {
                    return Err("empty MultiPolygon".into());
                }
                Ok(MultiPolygon(parts))
            }
            other => Err(format!("expected Polygon or MultiPolygon, got {other}")),
        }
    }

    fn single_point(&self, geom: Option<&Value>) -> FeatureResult<Point> {
        match geometry_parts(geom)? {
            ("Point", c) => self.point(c),
            (other, _) => Err(format!("expected Point, got {other}")),
        }
    }
}

fn geometry_parts(geom: Option<&Value>) -> FeatureResult<(&str, &Value)> {
    let g = geom.filter(|g| !g.is_null()).ok_or("missing geometry")?;
    let kind = g.get("type").and_then(Value::as_str).ok_or("geometry without type")?;
    let coords = g.get("coordinates").ok_or("geometry without coordinates")?;
    Ok((kind, coords))
}

fn reject(layer: Layer, index: usize, id: Option<String>, reason: impl Into<String>) -> Rejection {
    Rejection {
        layer,
        index,
        id,
        reason: reason.into(),
    }
}

/// Generic per-feature driver: collects records and rejections.
fn parse_each<T>(
    fc: &Value,
    layer: Layer,
    mut one: impl FnMut(&Value, &Map<String, Value>) -> FeatureResult<T>,
) -> Result<(Vec<T>, Vec<Rejection>), IngestError> {
    let mut out = Vec::new();
    let mut rejected = Vec::new();
    for (i, f) in features(fc, layer.as_str())?.iter().enumerate() {
        let p = props(f);
        match one(f, p) {
            Ok(rec) => out.push(rec),
            Err(reason) => rejected.push(reject(layer, i, feature_id(f, p), reason)),
        }
    }
    Ok((out, rejected))
}

const BUILDING_KEYS: &[&str] = &[
    fields::ID,
    fields::HEIGHT,
    fields::FLOORS,
    fields::FOOT_AREA,
    fields::PERIMETER,
    fields::ORIENTATION,
    fields::FORM_TYPE,
    fields::PLOT_ID,
    fields::CONFIDENCE,
    fields::CI,
    fields::CATEGORY,
    "level1",
    fields::TYPE,
    "level2",
    fields::TYPE_CODE,
    "level2_code",
    fields::FUNCTION,
    "level3",
];

fn extras(p: &Map<String, Value>, known: &[&str]) -> BTreeMap<String, Value> {
    p.iter()
        .filter(|(k, _)| !known.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

pub fn parse_buildings(fc: &Value, crs: Crs) -> Result<(Vec<BuildingRecord>, Vec<Rejection>), IngestError> {
    let coords = Coords { crs };
    parse_each(fc, Layer::Buildings, |f, p| {
        let id = feature_id(f, p).ok_or("missing required property `id`")?;
        let geometry = coords.areal(f.get("geometry"))?;
        let mut b = BuildingRecord::new(id, geometry);
        if b.foot_area <= 0.0 {
            return Err("zero footprint area".into());
        }
        b.height = number_prop(p, &[fields::HEIGHT])?;
        if b.height.is_some_and(|h| h < 0.0) {
            return Err("negative height".into());
        }
        b.num_floors = match number_prop(p, &[fields::FLOORS])? {
            None => None,
            Some(v) if v >= 1.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Some(v as u32),
            Some(v) => return Err(format!("floors must be an integer ≥ 1, got {v}")),
        };
        b.level1 = string_prop(p, ALIAS_LEVEL1)?;
        b.level2 = string_prop(p, ALIAS_LEVEL2)?;
        b.level2_code = string_prop(p, ALIAS_LEVEL2_CODE)?;
        b.level3 = string_prop(p, ALIAS_LEVEL3)?;
        b.orientation = number_prop(p, &[fields::ORIENTATION])?;
        b.form_type = string_prop(p, &[fields::FORM_TYPE])?
            .map(|s| s.parse::<FormType>())
            .transpose()?;
        b.plot_id = string_prop(p, &[fields::PLOT_ID])?;
        b.confidence = number_prop(p, &[fields::CONFIDENCE])?;
        b.ci = number_prop(p, &[fields::CI])?;
        b.extra = extras(p, BUILDING_KEYS);
        Ok(b)
    })
}

const PLOT_KEYS: &[&str] = &[
    fields::MP_NAME,
    "MP_Name",
    fields::LAND_USE,
    "Land_Use",
    fields::SUBZONE,
    "Subzone",
    fields::PLOT_AREA,
    fields::LAYOUT_PATTERN,
    fields::FR,
    fields::SI,
    fields::PTA,
    fields::CI,
    fields::FAR,
    fields::BCR,
    fields::BCR_OUTLIER,
    fields::FLOORS_ESTIMATED,
    fields::BUS_IN_BUFFER,
    fields::BUS_ACCESSIBLE,
    fields::MRT_IN_BUFFER,
    fields::MRT_ACCESSIBLE,
];

fn count_prop(p: &Map<String, Value>, name: &str) -> FeatureResult<Option<usize>> {
    match number_prop(p, &[name])? {
        None => Ok(None),
        Some(v) if v >= 0.0 && v.fract() == 0.0 => Ok(Some(v as usize)),
        Some(v) => Err(format!("property `{name}` must be a non-negative integer, got {v}")),
    }
}

pub fn parse_plots(fc: &Value, crs: Crs) -> Result<(Vec<PlotRecord>, Vec<Rejection>), IngestError> {
    let coords = Coords { crs };
    parse_each(fc, Layer::Plots, |f, p| {
        let required = |names: &[&str]| -> FeatureResult<String> {
            string_prop(p, names)?.ok_or_else(|| format!("missing required property `{}`", names[0]))
        };
        let mp_name = required(ALIAS_MP_NAME)?;
        let land_use = required(ALIAS_LAND_USE)?;
        let subzone = required(ALIAS_SUBZONE)?;
        let geometry = coords.areal(f.get("geometry"))?;
        let mut plot = PlotRecord::new(mp_name, land_use, subzone, geometry);
        if plot.plot_area <= 0.0 {
            return Err("zero plot area".into());
        }
        if p.contains_key(fields::LAYOUT_PATTERN) {
            plot.layout_pattern = Some(match p.get(fields::LAYOUT_PATTERN) {
                Some(Value::Null) | None => None,
                Some(Value::String(s)) => Some(s.parse::<LayoutPattern>()?),
                Some(other) => return Err(format!("invalid Layout_Pattern {other}")),
            });
        }
        plot.functional_ratios = match p.get(fields::FR) {
            None | Some(Value::Null) => None,
            Some(Value::Object(m)) => Some(
                m.iter()
                    .map(|(k, v)| v.as_f64().map(|r| (k.clone(), r)).ok_or_else(|| format!("FR entry `{k}` is not numeric")))
                    .collect::<FeatureResult<BTreeMap<_, _>>>()?,
            ),
            Some(other) => return Err(format!("FR must be an object, got {other}")),
        };
        plot.si = number_prop(p, &[fields::SI])?;
        plot.pta = number_prop(p, &[fields::PTA])?;
        plot.ci = number_prop(p, &[fields::CI])?;
        plot.far = number_prop(p, &[fields::FAR])?;
        plot.bcr = number_prop(p, &[fields::BCR])?;
        plot.bcr_outlier = match p.get(fields::BCR_OUTLIER) {
            None | Some(Value::Null) => None,
            Some(Value::Bool(b)) => Some(*b),
            Some(other) => return Err(format!("BCR_outlier must be boolean, got {other}")),
        };
        plot.floors_estimated = count_prop(p, fields::FLOORS_ESTIMATED)?.map(|v| v as u32);
        let counts = [
            count_prop(p, fields::BUS_IN_BUFFER)?,
            count_prop(p, fields::BUS_ACCESSIBLE)?,
            count_prop(p, fields::MRT_IN_BUFFER)?,
            count_prop(p, fields::MRT_ACCESSIBLE)?,
        ];
        if let [Some(a), Some(b), Some(c), Some(d)] = counts {
            plot.access_counts = Some(AccessCounts {
                bus_in_buffer: a,
                bus_accessible: b,
                mrt_in_buffer: c,
                mrt_accessible: d,
            });
        }
        plot.extra = extras(p, PLOT_KEYS);
        Ok(plot)
    })
}

pub fn parse_pois(fc: &Value, crs: Crs) -> Result<(Vec<PoiRecord>, Vec<Rejection>), IngestError> {
    let coords = Coords { crs };
    let mut n = 0usize;
    parse_each(fc, Layer::Pois, |f, p| {
        n += 1;
        let category = string_prop(p, &["category"])?
            .filter(|c| !c.trim().is_empty())
            .ok_or("missing required property `category`")?;
        let location = coords.single_point(f.get("geometry"))?;
        Ok(PoiRecord {
            id: feature_id(f, p).unwrap_or_else(|| format!("poi-{}", n - 1)),
            category,
            location,
            rating: number_prop(p, &["rating"])?,
        })
    })
}

pub fn parse_transit(fc: &Value, crs: Crs) -> Result<(Vec<TransitStop>, Vec<Rejection>), IngestError> {
    let coords = Coords { crs };
    let mut n = 0usize;
    parse_each(fc, Layer::Transit, |f, p| {
        n += 1;
        let raw = string_prop(p, &["kind"])?.ok_or("missing required property `kind`")?;
        let kind = TransitKind::parse(&raw).ok_or_else(|| format!("kind must be `bus` or `mrt`, got `{raw}`"))?;
        Ok(TransitStop {
            id: feature_id(f, p).unwrap_or_else(|| format!("stop-{}", n - 1)),
            kind,
            location: coords.single_point(f.get("geometry"))?,
        })
    })
}

/// Roads: LineString or MultiLineString. A MultiLineString yields several lines.
pub fn parse_roads(fc: &Value, crs: Crs) -> Result<(Vec<LineString>, Vec<Rejection>), IngestError> {
    let coords = Coords { crs };
    let (nested, rej) = parse_each(fc, Layer::Roads, |f, _| {
        let check = |pts: Vec<Point>| -> FeatureResult<LineString> {
            if pts.len() < 2 {
                Err("LineString needs at least 2 vertices".into())
            } else {
                Ok(LineString(pts))
            }
        };
        match geometry_parts(f.get("geometry"))? {
            ("LineString", c) => Ok(vec![check(coords.line(c)?)?]),
            ("MultiLineString", c) => c
                .as_array()
                .ok_or("MultiLineString coordinates are not an array")?
                .iter()
                .map(|l| check(coords.line(l)?))
                .collect(),
            (other, _) => Err(format!("expected LineString, got {other}")),
        }
    })?;
    Ok((nested.into_iter().flatten().collect(), rej))
}

fn ring_json(r: &Ring) -> Value {
    Value::Array(r.points().iter().map(|p| json!([p.x, p.y])).collect())
}

fn polygon_json(p: &Polygon) -> Value {
    Value::Array(std::iter::once(&p.exterior).chain(p.interiors.iter()).map(ring_json).collect())
}

/// Single-part geometries are written as Polygon, others as MultiPolygon.
pub fn areal_json(g: &MultiPolygon) -> Value {
    match g.parts() {
        [single] => json!({"type": "Polygon", "coordinates": polygon_json(single)}),
        parts => json!({"type": "MultiPolygon", "coordinates": parts.iter().map(polygon_json).collect::<Vec<_>>()}),
    }
}

fn put<T: Into<Value>>(m: &mut Map<String, Value>, k: &str, v: Option<T>) {
    if let Some(v) = v {
        m.insert(k.to_string(), v.into());
    }
}

pub fn building_feature(b: &BuildingRecord) -> Value {
    let mut m: Map<String, Value> = b.extra.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    m.insert(fields::ID.into(), Value::String(b.id.clone()));
    m.insert(fields::FOOT_AREA.into(), json!(b.foot_area));
    m.insert(fields::PERIMETER.into(), json!(b.perimeter));
    put(&mut m, fields::HEIGHT, b.height);
    put(&mut m, fields::FLOORS, b.num_floors);
    put(&mut m, fields::ORIENTATION, b.orientation);
    put(&mut m, fields::FORM_TYPE, b.form_type.map(|t| t.as_str()));
    put(&mut m, fields::PLOT_ID, b.plot_id.clone());
    put(&mut m, fields::CATEGORY, b.level1.clone());
    put(&mut m, fields::TYPE, b.level2.clone());
    put(&mut m, fields::TYPE_CODE, b.level2_code.clone());
    put(&mut m, fields::FUNCTION, b.level3.clone());
    put(&mut m, fields::CONFIDENCE, b.confidence);
    put(&mut m, fields::CI, b.ci);
    json!({"type": "Feature", "properties": m, "geometry": areal_json(&b.geometry)})
}

pub fn plot_feature(p: &PlotRecord) -> Value {
    let mut m: Map<String, Value> = p.extra.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    m.insert(fields::MP_NAME.into(), Value::String(p.mp_name.clone()));
    m.insert(fields::LAND_USE.into(), Value::String(p.land_use.clone()));
    m.insert(fields::SUBZONE.into(), Value::String(p.subzone.clone()));
    m.insert(fields::PLOT_AREA.into(), json!(p.plot_area));
    if let Some(pattern) = p.layout_pattern {
        m.insert(
            fields::LAYOUT_PATTERN.into(),
            pattern.map_or(Value::Null, |lp| Value::String(lp.as_str().into())),
        );
    }
    put(&mut m, fields::FR, p.functional_ratios.as_ref().map(|fr| json!(fr)));
    put(&mut m, fields::SI, p.si);
    put(&mut m, fields::PTA, p.pta);
    put(&mut m, fields::CI, p.ci);
    if let Some(c) = p.access_counts {
        m.insert(fields::BUS_IN_BUFFER.into(), json!(c.bus_in_buffer));
        m.insert(fields::BUS_ACCESSIBLE.into(), json!(c.bus_accessible));
        m.insert(fields::MRT_IN_BUFFER.into(), json!(c.mrt_in_buffer));
        m.insert(fields::MRT_ACCESSIBLE.into(), json!(c.mrt_accessible));
    }
    put(&mut m, fields::FAR, p.far);
    put(&mut m, fields::BCR, p.bcr);
    put(&mut m, fields::BCR_OUTLIER, p.bcr_outlier);
    put(&mut m, fields::FLOORS_ESTIMATED, p.floors_estimated);
    json!({"type": "Feature", "properties": m, "geometry": areal_json(&p.geometry)})
}

/// FeatureCollection with an optional `metadata` foreign member.
pub fn feature_collection(features: Vec<Value>, metadata: Option<Value>) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), Value::String("FeatureCollection".into()));
    if let Some(md) = metadata {
        m.insert("metadata".into(), md);
    }
    m.insert("features".into(), Value::Array(features));
    Value::Object(m)
}

pub fn buildings_collection(bs: &[BuildingRecord], metadata: Option<Value>) -> Value {
    feature_collection(bs.iter().map(building_feature).collect(), metadata)
}

pub fn plots_collection(ps: &[PlotRecord], metadata: Option<Value>) -> Value {
    feature_collection(ps.iter().map(plot_feature).collect(), metadata)
}
