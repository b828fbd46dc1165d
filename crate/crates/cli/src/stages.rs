//! One function per pipeline stage. Each reads and enriches a [`Dataset`] in place
//! and returns a short note for the run manifest.

use std::path::Path;

use spli_core::access::{plot_access, RoadGraph};
use spli_core::config::IndicatorConfig;
use spli_core::form::{classify_building, orientation};
use spli_core::geojson::parse_layers;
use spli_core::intensity::plot_intensities;
use spli_core::join::assign_buildings_to_plots;
use spli_core::layout::classify_plots;
use spli_core::mix::plot_mixes;
use spli_core::{Dataset, Exec};
use spli_funcnet::checkpoint::Checkpoint;
use spli_funcnet::graph::{build_relgraph, build_relgraph_with};
use spli_funcnet::hierarchy::{apply_level1, apply_level3, Mapping};
use spli_funcnet::train::{train, TrainParams};
use spli_funcnet::{merge_predictions, predict_level2, TrainReport};

use crate::error::{CliError, Result};

/// Parses every input layer and joins buildings to plots.
pub fn ingest(cfg: &IndicatorConfig, exec: Exec) -> Result<Dataset> {
    if cfg.input.buildings.is_none() && cfg.input.plots.is_none() {
        return Err(CliError::Usage("config names neither a buildings nor a plots layer".into()));
    }
    let mut ds = parse_layers(&cfg.input, cfg.crs)?;
    assign_buildings_to_plots(&mut ds, exec);
    Ok(ds)
}

pub fn ingest_note(ds: &Dataset) -> String {
    let joined = ds.buildings.iter().filter(|b| b.plot_id.is_some()).count();
    format!(
        "{} buildings ({joined} in a plot), {} plots, {} POIs, {} road lines, {} transit stops, {} rejected",
        ds.buildings.len(),
        ds.plots.len(),
        ds.pois.len(),
        ds.roads.len(),
        ds.transit.len(),
        ds.rejections.len()
    )
}

/// Form type and orientation per building.
pub fn forms(ds: &mut Dataset, cfg: &IndicatorConfig, exec: Exec) -> String {
    let results = spli_core::exec::map(exec, &ds.buildings, |b| (classify_building(b, &cfg.form), orientation(b)));
    let mut failed = 0;
    for (b, (form, orient)) in ds.buildings.iter_mut().zip(results) {
        b.foot_area = b.geometry.area();
        b.perimeter = b.geometry.perimeter();
        match form {
            Ok(f) => b.form_type = Some(f),
            Err(e) => {
                log::warn!("building {}: no form type: {e}", b.id);
                b.form_type = None;
                failed += 1;
            }
        }
        b.orientation = orient.ok();
    }
    format!("{} classified, {failed} unclassifiable", ds.buildings.len() - failed)
}

pub fn train_params(cfg: &IndicatorConfig) -> TrainParams {
    TrainParams::from_config(&cfg.functions, cfg.seed)
}

pub fn load_mapping(cfg: &IndicatorConfig) -> Result<Mapping> {
    match &cfg.functions.mapping {
        Some(p) => Mapping::from_path(p).map_err(|e| CliError::stage("functions", e)),
        None => Ok(Mapping::default()),
    }
}

/// Fits the classifier on every building with a level-2 label.
pub fn functions_train(ds: &Dataset, cfg: &IndicatorConfig) -> Result<(Checkpoint, TrainReport)> {
    let (g, schema, norm) = build_relgraph(ds, &cfg.functions).map_err(|e| CliError::stage("functions", e))?;
    let (model, report) = train(&g, &train_params(cfg)).map_err(|e| CliError::stage("functions", e))?;
    let ck = Checkpoint::new(model, g.classes.clone(), schema, norm);
    Ok((ck, report))
}

/// Fills missing level-2 labels, then derives level 1 and level 3 for every labelled building.
pub fn functions_predict(ds: &mut Dataset, cfg: &IndicatorConfig, ck: &Checkpoint) -> Result<String> {
    let mapping = load_mapping(cfg)?;
    let g = build_relgraph_with(ds, &cfg.functions, &ck.schema, &ck.normalizer, &ck.classes)
        .map_err(|e| CliError::stage("functions", e))?;
    let preds = predict_level2(&ck.model, &g).map_err(|e| CliError::stage("functions", e))?;
    let filled = merge_predictions(ds, &preds, &ck.classes, &mapping);
    apply_level1(ds, &mapping);
    apply_level3(ds, &cfg.functions);
    let corridors = ds
        .buildings
        .iter()
        .filter(|b| b.level3.as_deref().is_some_and(|l| l.ends_with("-corridor")))
        .count();
    Ok(format!("{filled} buildings predicted, {corridors} corridors"))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::load(path).map_err(|e| CliError::stage("functions", format!("{}: {e}", path.display())))
}

pub fn layouts(ds: &mut Dataset, cfg: &IndicatorConfig, exec: Exec) -> String {
    let patterns = classify_plots(ds, &cfg.layout, exec);
    let nulls = patterns.iter().filter(|p| p.is_none()).count();
    for (p, pat) in ds.plots.iter_mut().zip(patterns) {
        p.layout_pattern = Some(pat);
    }
    format!("{} plots classified, {nulls} null", ds.plots.len())
}

pub fn diversity(ds: &mut Dataset, cfg: &IndicatorConfig, exec: Exec) -> String {
    let mixes = plot_mixes(ds, &cfg.diversity, &cfg.intensity, exec);
    for (p, m) in ds.plots.iter_mut().zip(mixes) {
        p.functional_ratios = Some(m.ratios);
        p.si = Some(m.si);
    }
    format!("{} plots", ds.plots.len())
}

/// CI and PTA per plot; each building carries its plot's CI.
pub fn access(ds: &mut Dataset, cfg: &IndicatorConfig, exec: Exec) -> String {
    let graph = RoadGraph::build(&ds.roads, cfg.access.road_snap_tolerance_m);
    let results = plot_access(ds, &graph, &cfg.access, exec);
    for (p, r) in ds.plots.iter_mut().zip(&results) {
        p.ci = Some(r.ci);
        p.pta = Some(r.pta);
        p.access_counts = Some(r.counts);
    }
    let ci_by_plot: std::collections::BTreeMap<&str, f64> =
        ds.plots.iter().filter_map(|p| p.ci.map(|c| (p.mp_name.as_str(), c))).collect();
    let cis: Vec<Option<f64>> = ds
        .buildings
        .iter()
        .map(|b| b.plot_id.as_deref().and_then(|pid| ci_by_plot.get(pid).copied()))
        .collect();
    for (b, ci) in ds.buildings.iter_mut().zip(cis) {
        b.ci = ci;
    }
    format!(
        "road graph {} nodes / {} edges / {} components",
        graph.nodes().len(),
        graph.edges().len(),
        graph.component_count()
    )
}

pub fn intensity(ds: &mut Dataset, cfg: &IndicatorConfig, exec: Exec) -> String {
    let results = plot_intensities(ds, &cfg.intensity, exec);
    let (mut outliers, mut failed) = (0, 0);
    for (p, r) in ds.plots.iter_mut().zip(results) {
        match r {
            Ok(r) => {
                p.far = Some(r.far);
                p.bcr = Some(r.bcr);
                p.bcr_outlier = Some(r.bcr_outlier);
                p.floors_estimated = Some(r.floors_estimated);
                outliers += usize::from(r.bcr_outlier);
            }
            Err(e) => {
                log::warn!("{e}");
                failed += 1;
            }
        }
    }
    format!("{} plots, {outliers} BCR outliers, {failed} without a valid area", ds.plots.len() - failed)
}
