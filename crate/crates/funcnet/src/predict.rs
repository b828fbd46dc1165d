//! Inference and merging of predicted level-2 types into the dataset.

use serde::{Deserialize, Serialize};

use spli_core::model::Dataset;

use crate::graph::RelGraph;
use crate::hierarchy::Mapping;
use crate::model::{argmax, softmax, ModelError, Rgcn};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: usize,
    /// Softmax probability of `class`.
    pub confidence: f64,
}

/// Most probable class per node; ties go to the lowest class index.
pub fn predict_level2(model: &Rgcn, g: &RelGraph) -> Result<Vec<Prediction>, ModelError> {
    let p = softmax(&model.forward(&g.features, &g.relations, None)?);
    Ok((0..p.rows)
        .map(|r| {
            let class = argmax(p.row(r));
            Prediction {
                class,
                confidence: p.get(r, class),
            }
        })
        .collect())
}

/// Fills buildings that lack a level-2 label. Labelled buildings are left alone.
/// Returns the number of buildings filled.
pub fn merge_predictions(ds: &mut Dataset, preds: &[Prediction], classes: &[String], mapping: &Mapping) -> usize {
    let mut filled = 0;
    for (b, p) in ds.buildings.iter_mut().zip(preds) {
        if b.level2_key().is_some() {
            continue;
        }
        let class = &classes[p.class];
        match mapping.get(class) {
            Some(row) => {
                b.level2_code = Some(class.clone());
                b.level2 = Some(row.level2_name.clone());
            }
            None => b.level2 = Some(class.clone()),
        }
        b.confidence = Some(p.confidence);
        filled += 1;
    }
    filled
}

#[cfg(test)]
mod tests {
    use super::*;
    use spli_core::geom::{MultiPolygon, Polygon};
    use spli_core::BuildingRecord;

    #[test]
    fn labelled_buildings_are_not_overwritten() {
        let mut a = BuildingRecord::new("a", MultiPolygon::single(Polygon::rect(0.0, 0.0, 1.0, 1.0)));
        a.level2_code = Some("B5".into());
        let b = BuildingRecord::new("b", MultiPolygon::single(Polygon::rect(5.0, 0.0, 6.0, 1.0)));
        let mut ds = Dataset {
            buildings: vec![a, b],
            ..Default::default()
        };
        let preds = [Prediction { class: 0, confidence: 0.9 }, Prediction { class: 0, confidence: 0.8 }];
        let classes = ["B3".to_string()];
        assert_eq!(merge_predictions(&mut ds, &preds, &classes, &Mapping::default()), 1);
        assert_eq!(ds.buildings[0].level2_code.as_deref(), Some("B5"));
        assert_eq!(ds.buildings[0].confidence, None);
        assert_eq!(ds.buildings[1].level2_code.as_deref(), Some("B3"));
        assert_eq!(ds.buildings[1].level2.as_deref(), Some("Residential-Housing Units-HDB Properties"));
        assert_eq!(ds.buildings[1].confidence, Some(0.8));
    }
}
