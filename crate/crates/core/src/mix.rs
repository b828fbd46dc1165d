//! Functional ratio and Simpson index per plot.

use std::collections::BTreeMap;

use crate::config::{DiversityConfig, FunctionLevel, IntensityConfig, MixWeighting};
use crate::exec::{self, Exec};
use crate::intensity::floors_for;
use crate::model::{BuildingRecord, Dataset};

pub const UNCLASSIFIED: &str = "unclassified";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FunctionalMix {
    pub ratios: BTreeMap<String, f64>,
    pub si: f64,
}

fn category(b: &BuildingRecord, level: FunctionLevel) -> Option<&str> {
    match level {
        FunctionLevel::Level2 => b.level2_key(),
        FunctionLevel::Level3 => b.level3.as_deref().or_else(|| b.level2_key()),
    }
    .filter(|s| !s.trim().is_empty())
}

/// Share of built area per function category. Buildings without a category are
/// pooled under [`UNCLASSIFIED`]. Empty when nothing is built.
pub fn functional_ratios<'a>(
    buildings: impl IntoIterator<Item = &'a BuildingRecord>,
    cfg: &DiversityConfig,
    intensity: &IntensityConfig,
) -> BTreeMap<String, f64> {
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for b in buildings {
        let w = match cfg.weighting {
            MixWeighting::Footprint => b.foot_area,
            MixWeighting::FloorArea => b.foot_area * floors_for(b, intensity).0 as f64,
        };
        let key = category(b, cfg.level).unwrap_or(UNCLASSIFIED);
        *totals.entry(key.to_string()).or_default() += w;
    }
    let sum: f64 = totals.values().sum();
    if !(sum > 0.0) {
        return BTreeMap::new();
    }
    totals.into_iter().map(|(k, v)| (k, v / sum)).collect()
}

/// 1 − Σ r², zero for an empty mix.
pub fn simpson_index<'a>(ratios: impl IntoIterator<Item = &'a f64>) -> f64 {
    let mut any = false;
    let s: f64 = ratios
        .into_iter()
        .map(|r| {
            any = true;
            r * r
        })
        .sum();
    if any {
        1.0 - s
    } else {
        0.0
    }
}

pub fn plot_mixes(ds: &Dataset, cfg: &DiversityConfig, intensity: &IntensityConfig, exec: Exec) -> Vec<FunctionalMix> {
    let by_plot = ds.buildings_by_plot();
    exec::map(exec, &ds.plots, |plot| {
        let members = by_plot.get(plot.mp_name.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let ratios = functional_ratios(members.iter().map(|&i| &ds.buildings[i]), cfg, intensity);
        let si = simpson_index(ratios.values());
        FunctionalMix { ratios, si }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{MultiPolygon, Polygon};

    fn b(code: Option<&str>, area: f64) -> BuildingRecord {
        let mut r = BuildingRecord::new("x", MultiPolygon::single(Polygon::rect(0.0, 0.0, area, 1.0)));
        r.level2_code = code.map(Into::into);
        r
    }

    fn ratios(bs: &[BuildingRecord]) -> BTreeMap<String, f64> {
        functional_ratios(bs, &DiversityConfig::default(), &IntensityConfig::default())
    }

    #[test]
    fn two_categories() {
        let r = ratios(&[b(Some("A"), 300.0), b(Some("B"), 100.0)]);
        assert_eq!(r["A"], 0.75);
        assert_eq!(r["B"], 0.25);
    }

    #[test]
    fn single_category() {
        let r = ratios(&[b(Some("A"), 300.0)]);
        assert_eq!(r.len(), 1);
        assert_eq!(r["A"], 1.0);
        assert_eq!(simpson_index(r.values()), 0.0);
    }

    #[test]
    fn uncategorized_pooled() {
        let r = ratios(&[b(Some("A"), 300.0), b(Some("B"), 100.0), b(None, 100.0)]);
        assert!((r["A"] - 0.6).abs() < 1e-15);
        assert!((r["B"] - 0.2).abs() < 1e-15);
        assert!((r[UNCLASSIFIED] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_plot() {
        let r = ratios(&[]);
        assert!(r.is_empty());
        assert_eq!(simpson_index(r.values()), 0.0);
    }

    #[test]
    fn simpson_values() {
        assert_eq!(simpson_index(&[0.5, 0.5]), 0.5);
        assert!((simpson_index(&[0.5, 0.3, 0.2]) - 0.62).abs() < 1e-12);
    }

    #[test]
    fn floor_area_weighting() {
        let mut tall = b(Some("A"), 100.0);
        tall.num_floors = Some(3);
        let low = b(Some("B"), 100.0);
        let cfg = DiversityConfig { weighting: MixWeighting::FloorArea, ..Default::default() };
        let r = functional_ratios(&[tall, low], &cfg, &IntensityConfig::default());
        assert_eq!(r["A"], 0.75);
    }
}
