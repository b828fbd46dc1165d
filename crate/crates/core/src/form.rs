//! Building form classification from footprint geometry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::FormConfig;
use crate::exec::{self, Exec};
use crate::geom::{min_bounding_rect, min_bounding_rect_of_points, GeomError, Polygon};
use crate::model::BuildingRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormType {
    Point,
    Slab,
    LineLikeSlab,
    EnclosedForm,
}

impl FormType {
    pub const ALL: [FormType; 4] = [FormType::Point, FormType::Slab, FormType::LineLikeSlab, FormType::EnclosedForm];

    pub fn as_str(self) -> &'static str {
        match self {
            FormType::Point => "Point",
            FormType::Slab => "Slab",
            FormType::LineLikeSlab => "Line-like Slab",
            FormType::EnclosedForm => "Enclosed Form",
        }
    }
}

impl fmt::Display for FormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown form type `{s}`"))
    }
}

// Aspect ratios computed from rotated coordinates carry ~1e-15 relative noise;
// a value this close to a threshold counts as equal to it.
const THRESHOLD_REL_EPS: f64 = 1e-9;

fn at_most(value: f64, threshold: f64) -> bool {
    value <= threshold * (1.0 + THRESHOLD_REL_EPS)
}

/// Form of a single footprint part.
pub fn classify_form(p: &Polygon, cfg: &FormConfig) -> Result<FormType, GeomError> {
    if p.has_holes() {
        return Ok(FormType::EnclosedForm);
    }
    let ar = min_bounding_rect(p)?.aspect_ratio();
    Ok(if at_most(ar, cfg.point_max_aspect) {
        FormType::Point
    } else if at_most(ar, cfg.slab_max_aspect) {
        FormType::Slab
    } else {
        FormType::LineLikeSlab
    })
}

/// Modal form over the parts of a multi-part footprint. Ties go to the tied
/// category holding the largest single part.
pub fn dominant_form(parts: &[Polygon], cfg: &FormConfig) -> Result<FormType, GeomError> {
    if parts.is_empty() {
        return Err(GeomError::Empty);
    }
    let mut count = [0usize; 4];
    let mut largest = [f64::NEG_INFINITY; 4];
    for p in parts {
        let k = classify_form(p, cfg)? as usize;
        count[k] += 1;
        largest[k] = largest[k].max(p.area());
    }
    let best = (0..4)
        .filter(|&k| count[k] > 0)
        .max_by(|&a, &b| count[a].cmp(&count[b]).then(largest[a].total_cmp(&largest[b])).then(b.cmp(&a)))
        .expect("non-empty parts");
    Ok(FormType::ALL[best])
}

pub fn classify_building(b: &BuildingRecord, cfg: &FormConfig) -> Result<FormType, GeomError> {
    dominant_form(b.geometry.parts(), cfg)
}

/// Bearing of the MBR long axis over all parts, clockwise from north. The
/// axis direction with positive northing is reported, so values fall in
/// [0, 90] or (270, 360); due east-west is 90.
pub fn orientation(b: &BuildingRecord) -> Result<f64, GeomError> {
    let pts: Vec<_> = b.geometry.vertices().collect();
    min_bounding_rect_of_points(&pts).map(|m| m.bearing())
}

/// Classifies every building; failures are reported per building.
pub fn classify_all(buildings: &[BuildingRecord], cfg: &FormConfig, exec: Exec) -> Vec<Result<FormType, GeomError>> {
    exec::map(exec, buildings, |b| classify_building(b, cfg))
}
