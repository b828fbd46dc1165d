//! JSON model checkpoint.
//!
//! Layout: `{"format": "spli-rgcn", "version": 1, "classes": [...],
//! "feature_names": [...], "schema": {...}, "normalizer": {"means", "stds"},
//! "model": {"layers": [{"w_self", "w_rel"}], "dropout", "seed"}}`.
//! Matrices are `{"rows", "cols", "data"}` in row-major order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{FeatureSchema, Normalizer};
use crate::model::Rgcn;

pub const FORMAT: &str = "spli-rgcn";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a model checkpoint (format {0:?})")]
    Format(String),
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("checkpoint is inconsistent: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub schema: FeatureSchema,
    pub normalizer: Normalizer,
    pub model: Rgcn,
}

impl Checkpoint {
    pub fn new(model: Rgcn, classes: Vec<String>, schema: FeatureSchema, normalizer: Normalizer) -> Checkpoint {
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            classes,
            feature_names: schema.names(),
            schema,
            normalizer,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String, CheckpointError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Checkpoint, CheckpointError> {
        let c: Checkpoint = serde_json::from_str(s)?;
        if c.format != FORMAT {
            return Err(CheckpointError::Format(c.format));
        }
        if c.version != VERSION {
            return Err(CheckpointError::Version(c.version));
        }
        if c.model.layers.is_empty() {
            return Err(CheckpointError::Inconsistent("model has no layers".into()));
        }
        if c.model.input_dim() != c.schema.width() || c.feature_names.len() != c.schema.width() {
            return Err(CheckpointError::Inconsistent("feature width disagrees with the model".into()));
        }
        if c.model.classes() != c.classes.len() {
            return Err(CheckpointError::Inconsistent("class count disagrees with the model".into()));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<(), CheckpointError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
        Checkpoint::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_version_check() {
        let schema = FeatureSchema {
            poi_categories: vec!["school".into()],
            land_uses: vec![],
        };
        let norm = Normalizer {
            means: vec![0.0; 6],
            stds: vec![1.0; 6],
        };
        let c = Checkpoint::new(Rgcn::new(6, 4, 2, 2, 2, 0.5, 3), vec!["B3".into(), "B5".into()], schema, norm);
        let s = c.to_json().unwrap();
        assert_eq!(Checkpoint::from_json(&s).unwrap(), c);
        let bumped = s.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(Checkpoint::from_json(&bumped), Err(CheckpointError::Version(2))));
    }
}
