//! Centroid-based building → plot assignment.

use crate::exec::{self, Exec};
use crate::geom::{BBox, Containment, Point};
use crate::index::SpatialIndex;
use crate::model::{Dataset, PlotRecord};

/// Plot index covering `p`; boundary hits count, and the smallest plot wins ties.
pub fn locate_plot(p: Point, plots: &[PlotRecord], index: &SpatialIndex) -> Option<usize> {
    index
        .query(&BBox::around(p, 0.0))
        .into_iter()
        .filter(|&i| plots[i].geometry.contains(p) != Containment::Outside)
        .min_by(|&a, &b| plots[a].plot_area.total_cmp(&plots[b].plot_area).then(a.cmp(&b)))
}

pub fn plot_index(plots: &[PlotRecord]) -> SpatialIndex {
    SpatialIndex::from_boxes(plots.iter().map(|p| p.geometry.bbox()))
}

/// Sets `plot_id` on every building from its centroid; unmatched buildings get `None`.
pub fn assign_buildings_to_plots(ds: &mut Dataset, exec: Exec) {
    let index = plot_index(&ds.plots);
    let plots = &ds.plots;
    let assigned: Vec<Option<String>> = exec::map(exec, &ds.buildings, |b| {
        let c = b.geometry.centroid().ok()?;
        locate_plot(c, plots, &index).map(|i| plots[i].mp_name.clone())
    });
    for (b, pid) in ds.buildings.iter_mut().zip(assigned) {
        b.plot_id = pid;
    }
}
