//! Run configuration. Every tolerance used by the indicator stages lives here
//! and is serialized into output metadata.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config value `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Crs {
    /// Longitude/latitude degrees, projected to SVY21 on ingest.
    #[default]
    Wgs84,
    /// Already planar metres; used as-is.
    Projected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct InputPaths {
    pub buildings: Option<PathBuf>,
    pub plots: Option<PathBuf>,
    pub pois: Option<PathBuf>,
    pub roads: Option<PathBuf>,
    pub transit: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageToggles {
    pub forms: bool,
    pub layouts: bool,
    pub diversity: bool,
    pub access: bool,
    pub intensity: bool,
    pub functions: bool,
    pub report: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            forms: true,
            layouts: true,
            diversity: true,
            access: true,
            intensity: true,
            functions: true,
            report: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FormConfig {
    /// Aspect ratio at or below which a footprint is a Point.
    pub point_max_aspect: f64,
    /// Aspect ratio at or below which a footprint is a Slab.
    pub slab_max_aspect: f64,
}

impl Default for FormConfig {
    fn default() -> Self {
        Self {
            point_max_aspect: 1.5,
            slab_max_aspect: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayoutConfig {
    pub min_building_area: f64,
    /// Level-2 type names (case-insensitive) dropped before layout analysis.
    pub excluded_types: Vec<String>,
    pub absolute_offset: f64,
    pub absolute_area_ratio: f64,
    pub approximate_offset: f64,
    pub approximate_area_ratio: f64,
    pub approximate_min_fraction: f64,
    pub centripetal_min_buildings: usize,
    pub centripetal_max_hull_aspect: f64,
    pub centripetal_max_radial_cv: f64,
    pub axis_min_buildings: usize,
    pub axis_min_variance_share: f64,
    pub uniform_max_aspect_deviation: f64,
    pub mixed_min_buildings: usize,
    pub mixed_min_fraction: f64,
    /// Pair-bisector axes are tried only up to this many candidates.
    pub pair_axis_max_buildings: usize,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            min_building_area: 50.0,
            excluded_types: vec!["transport facility".into(), "public transportation facility".into()],
            absolute_offset: 0.05,
            absolute_area_ratio: 1.05,
            approximate_offset: 0.15,
            approximate_area_ratio: 1.25,
            approximate_min_fraction: 0.8,
            centripetal_min_buildings: 4,
            centripetal_max_hull_aspect: 1.5,
            centripetal_max_radial_cv: 0.3,
            axis_min_buildings: 3,
            axis_min_variance_share: 0.95,
            uniform_max_aspect_deviation: 0.10,
            mixed_min_buildings: 4,
            mixed_min_fraction: 0.4,
            pair_axis_max_buildings: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FunctionLevel {
    #[default]
    Level2,
    Level3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MixWeighting {
    #[default]
    Footprint,
    FloorArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DiversityConfig {
    pub level: FunctionLevel,
    pub weighting: MixWeighting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AccessConfig {
    pub radius_m: f64,
    pub distance_floor_m: f64,
    pub weights: BTreeMap<String, f64>,
    pub bus_threshold_m: f64,
    pub mrt_threshold_m: f64,
    pub road_snap_tolerance_m: f64,
    pub max_snap_distance_m: f64,
}

impl Default for AccessConfig {
    fn default() -> Self {
        let weights = [("hospital", 5.0), ("school", 4.0), ("supermarket", 3.0), ("park", 2.0), ("convenience", 1.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self {
            radius_m: 5000.0,
            distance_floor_m: 50.0,
            weights,
            bus_threshold_m: 250.0,
            mrt_threshold_m: 500.0,
            road_snap_tolerance_m: 1.0,
            max_snap_distance_m: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntensityConfig {
    pub storey_height_m: f64,
    pub bcr_outlier_threshold: f64,
}

impl Default for IntensityConfig {
    fn default() -> Self {
        Self {
            storey_height_m: 3.0,
            bcr_outlier_threshold: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FunctionsConfig {
    pub layers: usize,
    pub hidden: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub folds: usize,
    pub neighbor_factor: f64,
    pub neighbor_min_m: f64,
    pub neighbor_max_m: f64,
    pub poi_radius_m: f64,
    pub corridor_min_aspect: f64,
    pub corridor_max_width_m: f64,
    pub corridor_touch_m: f64,
    pub corridor_min_connections: usize,
    pub refine_poi_radius_m: f64,
    /// Level-2 type keywords marking religious buildings.
    pub religious_types: Vec<String>,
    /// POI categories that refine a religious building's level-3 function.
    pub religious_pois: Vec<String>,
    /// Level-2 type keywords marking educational buildings.
    pub educational_types: Vec<String>,
    pub student_pois: Vec<String>,
    /// Optional override of the bundled level-2 → level-1 mapping table.
    pub mapping: Option<PathBuf>,
    /// Checkpoint written by `functions train` and read by `functions predict`.
    pub model: Option<PathBuf>,
}

impl Default for FunctionsConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        Self {
            layers: 2,
            hidden: 32,
            dropout: 0.5,
            learning_rate: 0.01,
            epochs: 500,
            folds: 5,
            neighbor_factor: 1.5,
            neighbor_min_m: 25.0,
            neighbor_max_m: 100.0,
            poi_radius_m: 100.0,
            corridor_min_aspect: 3.0,
            corridor_max_width_m: 5.0,
            corridor_touch_m: 0.5,
            corridor_min_connections: 2,
            refine_poi_radius_m: 50.0,
            religious_types: s(&["religious", "place of worship"]),
            religious_pois: s(&["church", "mosque", "temple", "synagogue", "gurdwara"]),
            educational_types: s(&["educational", "school", "university", "institution"]),
            student_pois: s(&["student hostel", "dormitory", "hall of residence"]),
            mapping: None,
            model: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndicatorConfig {
    pub crs: Crs,
    pub seed: u64,
    pub input: InputPaths,
    pub stages: StageToggles,
    pub form: FormConfig,
    pub layout: LayoutConfig,
    pub diversity: DiversityConfig,
    pub access: AccessConfig,
    pub intensity: IntensityConfig,
    pub functions: FunctionsConfig,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self {
            crs: Crs::Wgs84,
            seed: 42,
            input: InputPaths::default(),
            stages: StageToggles::default(),
            form: FormConfig::default(),
            layout: LayoutConfig::default(),
            diversity: DiversityConfig::default(),
            access: AccessConfig::default(),
            intensity: IntensityConfig::default(),
            functions: FunctionsConfig::default(),
        }
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            key,
            reason: format!("must be > 0, got {v}"),
        })
    }
}

fn unit_interval(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            key,
            reason: format!("must lie in [0, 1], got {v}"),
        })
    }
}

impl IndicatorConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: IndicatorConfig = toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML file; relative input paths resolve against the file's directory.
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_relative(dir);
        }
        Ok(cfg)
    }

    pub fn resolve_relative(&mut self, base: &std::path::Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(inner) = p.as_mut() {
                if inner.is_relative() {
                    *inner = base.join(&*inner);
                }
            }
        };
        fix(&mut self.input.buildings);
        fix(&mut self.input.plots);
        fix(&mut self.input.pois);
        fix(&mut self.input.roads);
        fix(&mut self.input.transit);
        fix(&mut self.functions.mapping);
        fix(&mut self.functions.model);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("form.point_max_aspect", self.form.point_max_aspect)?;
        if self.form.slab_max_aspect < self.form.point_max_aspect {
            return Err(ConfigError::Invalid {
                key: "form.slab_max_aspect",
                reason: "must be ≥ form.point_max_aspect".into(),
            });
        }
        let l = &self.layout;
        positive("layout.absolute_area_ratio", l.absolute_area_ratio)?;
        positive("layout.approximate_area_ratio", l.approximate_area_ratio)?;
        unit_interval("layout.approximate_min_fraction", l.approximate_min_fraction)?;
        unit_interval("layout.axis_min_variance_share", l.axis_min_variance_share)?;
        unit_interval("layout.mixed_min_fraction", l.mixed_min_fraction)?;
        let a = &self.access;
        positive("access.radius_m", a.radius_m)?;
        positive("access.distance_floor_m", a.distance_floor_m)?;
        positive("access.bus_threshold_m", a.bus_threshold_m)?;
        positive("access.mrt_threshold_m", a.mrt_threshold_m)?;
        positive("access.road_snap_tolerance_m", a.road_snap_tolerance_m)?;
        positive("access.max_snap_distance_m", a.max_snap_distance_m)?;
        if let Some((k, w)) = a.weights.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(ConfigError::Invalid {
                key: "access.weights",
                reason: format!("weight for `{k}` must be > 0, got {w}"),
            });
        }
        positive("intensity.storey_height_m", self.intensity.storey_height_m)?;
        let f = &self.functions;
        if f.layers == 0 || f.hidden == 0 || f.folds < 2 {
            return Err(ConfigError::Invalid {
                key: "functions",
                reason: "layers and hidden must be ≥ 1 and folds ≥ 2".into(),
            });
        }
        if !(0.0..1.0).contains(&f.dropout) {
            return Err(ConfigError::Invalid {
                key: "functions.dropout",
                reason: format!("must lie in [0, 1), got {}", f.dropout),
            });
        }
        positive("functions.learning_rate", f.learning_rate)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gets_defaults() {
        let cfg = IndicatorConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, IndicatorConfig::default());
        assert_eq!(cfg.access.weights["hospital"], 5.0);
        assert_eq!(cfg.functions.epochs, 500);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(IndicatorConfig::from_toml_str("bogus = 1").is_err());
        assert!(IndicatorConfig::from_toml_str("[form]\npoint_max = 2.0").is_err());
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg = IndicatorConfig::from_toml_str("crs = \"projected\"\n[form]\nslab_max_aspect = 6.0\n").unwrap();
        assert_eq!(cfg.crs, Crs::Projected);
        assert_eq!(cfg.form.slab_max_aspect, 6.0);
        assert_eq!(cfg.form.point_max_aspect, 1.5);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(IndicatorConfig::from_toml_str("[access]\nradius_m = -1.0").is_err());
        assert!(IndicatorConfig::from_toml_str("[functions]\ndropout = 1.0").is_err());
        assert!(IndicatorConfig::from_toml_str("[access.weights]\nhospital = 0.0").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = IndicatorConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(IndicatorConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
