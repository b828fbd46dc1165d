//! Read-only data-quality report over a parsed dataset.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{Dataset, Layer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    DuplicateId { layer: Layer, id: String, count: usize },
    ZeroArea { layer: Layer, id: String },
    /// Height unset; floor estimation falls back to floors or the default of 1.
    MissingHeight { id: String },
    MissingFloors { id: String },
    WithoutPlot { id: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn count(&self, pred: impl Fn(&Issue) -> bool) -> usize {
        self.issues.iter().filter(|i| pred(i)).count()
    }
}

fn duplicates<'a>(layer: Layer, ids: impl Iterator<Item = &'a str>, out: &mut Vec<Issue>) {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for id in ids {
        *seen.entry(id).or_default() += 1;
    }
    out.extend(seen.into_iter().filter(|(_, n)| *n > 1).map(|(id, count)| Issue::DuplicateId {
        layer,
        id: id.to_string(),
        count,
    }));
}

pub fn validate(ds: &Dataset) -> ValidationReport {
    let mut issues = Vec::new();
    duplicates(Layer::Buildings, ds.buildings.iter().map(|b| b.id.as_str()), &mut issues);
    duplicates(Layer::Plots, ds.plots.iter().map(|p| p.mp_name.as_str()), &mut issues);
    for b in &ds.buildings {
        if b.geometry.area() <= 0.0 {
            issues.push(Issue::ZeroArea {
                layer: Layer::Buildings,
                id: b.id.clone(),
            });
        }
        if b.height.is_none() {
            issues.push(Issue::MissingHeight { id: b.id.clone() });
        }
        if b.num_floors.is_none() {
            issues.push(Issue::MissingFloors { id: b.id.clone() });
        }
        if b.plot_id.is_none() {
            issues.push(Issue::WithoutPlot { id: b.id.clone() });
        }
    }
    for p in &ds.plots {
        if p.geometry.area() <= 0.0 {
            issues.push(Issue::ZeroArea {
                layer: Layer::Plots,
                id: p.mp_name.clone(),
            });
        }
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{MultiPolygon, Polygon};
    use crate::model::{BuildingRecord, PlotRecord};

    fn fixture() -> Dataset {
        let mut b = BuildingRecord::new("b1", MultiPolygon::single(Polygon::rect(1.0, 1.0, 5.0, 5.0)));
        b.height = Some(9.0);
        b.num_floors = Some(3);
        b.plot_id = Some("p1".into());
        Dataset {
            buildings: vec![b],
            plots: vec![PlotRecord::new("p1", "RESIDENTIAL", "Z", MultiPolygon::single(Polygon::rect(0.0, 0.0, 10.0, 10.0)))],
            ..Default::default()
        }
    }

    #[test]
    fn clean_fixture_has_empty_report() {
        assert!(validate(&fixture()).is_empty());
    }

    #[test]
    fn duplicate_id_reported_once() {
        let mut ds = fixture();
        ds.buildings.push(ds.buildings[0].clone());
        let r = validate(&ds);
        assert_eq!(r.issues, vec![Issue::DuplicateId { layer: Layer::Buildings, id: "b1".into(), count: 2 }]);
    }

    #[test]
    fn missing_height_flagged() {
        let mut ds = fixture();
        ds.buildings[0].height = None;
        let before = ds.clone();
        let r = validate(&ds);
        assert_eq!(r.issues, vec![Issue::MissingHeight { id: "b1".into() }]);
        assert_eq!(ds, before);
    }
}
