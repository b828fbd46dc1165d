//! Spatial indicators for urban plots: building form, layout pattern,
//! functional mix, accessibility and development intensity.
//!
//! All geometry is processed in projected metres. Layers given in WGS84 are
//! projected to SVY21 on ingest.

pub mod access;
pub mod config;
pub mod exec;
pub mod form;
pub mod geojson;
pub mod geom;
pub mod index;
pub mod intensity;
pub mod join;
pub mod layout;
pub mod mix;
pub mod model;
pub mod projection;
pub mod validate;

pub use config::IndicatorConfig;
pub use exec::Exec;
pub use form::FormType;
pub use layout::LayoutPattern;
pub use model::{BuildingRecord, Dataset, PlotRecord};
