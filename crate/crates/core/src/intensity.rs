//! Floor area ratio and building coverage ratio.

use thiserror::Error;

use crate::config::IntensityConfig;
use crate::exec::{self, Exec};
use crate::model::{BuildingRecord, Dataset, PlotRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntensityError {
    #[error("plot `{0}` has non-positive area")]
    NonPositivePlotArea(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloorSource {
    Recorded,
    FromHeight,
    /// Neither floors nor height known; one storey assumed.
    Defaulted,
}

/// Floor count used for floor area, and where it came from.
pub fn floors_for(b: &BuildingRecord, cfg: &IntensityConfig) -> (u32, FloorSource) {
    if let Some(n) = b.num_floors {
        return (n.max(1), FloorSource::Recorded);
    }
    if let Some(h) = b.height {
        let est = (h / cfg.storey_height_m).round();
        let floors = if est.is_finite() && est >= 1.0 { est.min(u32::MAX as f64) as u32 } else { 1 };
        return (floors, FloorSource::FromHeight);
    }
    (1, FloorSource::Defaulted)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityResult {
    pub far: f64,
    pub bcr: f64,
    pub bcr_outlier: bool,
    /// Buildings whose floor count was not recorded.
    pub floors_estimated: u32,
}

fn check_area(plot: &PlotRecord) -> Result<f64, IntensityError> {
    if plot.plot_area > 0.0 && plot.plot_area.is_finite() {
        Ok(plot.plot_area)
    } else {
        Err(IntensityError::NonPositivePlotArea(plot.mp_name.clone()))
    }
}

pub fn floor_area_ratio<'a>(
    plot: &PlotRecord,
    buildings: impl IntoIterator<Item = &'a BuildingRecord>,
    cfg: &IntensityConfig,
) -> Result<(f64, u32), IntensityError> {
    let area = check_area(plot)?;
    let mut total = 0.0;
    let mut estimated = 0;
    for b in buildings {
        let (floors, src) = floors_for(b, cfg);
        if src != FloorSource::Recorded {
            estimated += 1;
        }
        total += b.foot_area * floors as f64;
    }
    Ok((total / area, estimated))
}

/// Coverage as a ratio (not percent) and whether it exceeds the outlier threshold.
pub fn building_coverage_ratio<'a>(
    plot: &PlotRecord,
    buildings: impl IntoIterator<Item = &'a BuildingRecord>,
    cfg: &IntensityConfig,
) -> Result<(f64, bool), IntensityError> {
    let area = check_area(plot)?;
    let footprint: f64 = buildings.into_iter().map(|b| b.foot_area).sum();
    let bcr = footprint / area;
    Ok((bcr, bcr > cfg.bcr_outlier_threshold))
}

pub fn plot_intensity(
    plot: &PlotRecord,
    buildings: &[&BuildingRecord],
    cfg: &IntensityConfig,
) -> Result<IntensityResult, IntensityError> {
    let (far, floors_estimated) = floor_area_ratio(plot, buildings.iter().copied(), cfg)?;
    let (bcr, bcr_outlier) = building_coverage_ratio(plot, buildings.iter().copied(), cfg)?;
    Ok(IntensityResult {
        far,
        bcr,
        bcr_outlier,
        floors_estimated,
    })
}

pub fn plot_intensities(ds: &Dataset, cfg: &IntensityConfig, exec: Exec) -> Vec<Result<IntensityResult, IntensityError>> {
    let by_plot = ds.buildings_by_plot();
    exec::map(exec, &ds.plots, |plot| {
        let members: Vec<&BuildingRecord> = by_plot
            .get(plot.mp_name.as_str())
            .map(|v| v.iter().map(|&i| &ds.buildings[i]).collect())
            .unwrap_or_default();
        plot_intensity(plot, &members, cfg)
    })
}
