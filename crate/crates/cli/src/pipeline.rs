//! Stage orchestration, enriched output and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use spli_core::config::{Crs, IndicatorConfig};
use spli_core::geojson::{buildings_collection, parse_buildings, parse_plots, plots_collection};
use spli_core::validate::validate;
use spli_core::{Dataset, Exec};

use crate::error::{CliError, Result};
use crate::report::{aggregate, form_counts, layout_counts, write_category_csv, write_indicator_csv, GroupBy, INDICATORS};
use crate::stages;
use crate::svg;

pub const BUILDINGS_FILE: &str = "buildings.geojson";
pub const PLOTS_FILE: &str = "plots.geojson";
pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_REPORT_FILE: &str = "train_report.json";
pub const REJECTIONS_FILE: &str = "rejections.json";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn config_json(cfg: &IndicatorConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// SHA-256 of the config's JSON serialization, hex encoded.
pub fn config_hash(cfg: &IndicatorConfig) -> String {
    let bytes = serde_json::to_vec(&config_json(cfg)).expect("config serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Indicators that the enabled stages do not produce.
pub fn disabled_indicators(cfg: &IndicatorConfig) -> Vec<&'static str> {
    let s = &cfg.stages;
    let mut out = Vec::new();
    if !s.forms {
        out.extend(["Form_Type", "Orientation"]);
    }
    if !s.layouts {
        out.push("Layout_Pattern");
    }
    if !s.diversity {
        out.extend(["FR", "SI"]);
    }
    if !s.access {
        out.extend(["PTA", "CI"]);
    }
    if !s.intensity {
        out.extend(["FAR", "BCR"]);
    }
    if !s.functions {
        out.extend(["Building_Category", "Building_Function", "confidence"]);
    }
    out
}

fn metadata(cfg: &IndicatorConfig) -> Value {
    let crs = match cfg.crs {
        Crs::Wgs84 => "EPSG:3414",
        Crs::Projected => "input projected CRS, unchanged",
    };
    json!({
        "generator": concat!("spli ", env!("CARGO_PKG_VERSION")),
        "crs": crs,
        "units": "metres",
        "orientation": "bearing of the MBR long axis, degrees clockwise from north, end with positive northing reported: [0, 90] or (270, 360); east-west = 90",
        "bcr_units": "ratio",
        "disabled_indicators": disabled_indicators(cfg),
        "config_hash": config_hash(cfg),
        "config": config_json(cfg),
    })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::output(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::output(path, e))
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::output(path, e))?;
    s.push('\n');
    write_file(path, s.as_bytes())
}

/// Writes enriched buildings and plots with the config in their metadata.
pub fn write_enriched(ds: &Dataset, cfg: &IndicatorConfig, out_dir: &Path) -> Result<()> {
    let md = metadata(cfg);
    write_json(&out_dir.join(BUILDINGS_FILE), &buildings_collection(&ds.buildings, Some(md.clone())))?;
    write_json(&out_dir.join(PLOTS_FILE), &plots_collection(&ds.plots, Some(md)))
}

fn read_collection(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| spli_core::geojson::IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| {
        spli_core::geojson::IngestError::Json {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

/// Dataset for a single-stage run: the configured inputs, with buildings
/// and plots replaced by earlier enriched output in `out_dir` when present.
pub fn load_state(cfg: &IndicatorConfig, out_dir: &Path, exec: Exec) -> Result<Dataset> {
    let mut ds = stages::ingest(cfg, exec)?;
    let (bp, pp) = (out_dir.join(BUILDINGS_FILE), out_dir.join(PLOTS_FILE));
    if bp.exists() && pp.exists() {
        let (bs, _) = parse_buildings(&read_collection(&bp)?, Crs::Projected)?;
        let (ps, _) = parse_plots(&read_collection(&pp)?, Crs::Projected)?;
        log::info!("continuing from enriched output in {}", out_dir.display());
        ds.buildings = bs;
        ds.plots = ps;
    }
    Ok(ds)
}

/// Writes CSV tables and SVG charts for one grouping. Returns the file names.
pub fn write_reports(ds: &Dataset, by: GroupBy, out_dir: &Path) -> Result<Vec<String>> {
    let dir = out_dir.join("reports");
    let mut written = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> Result<()> {
        write_file(&dir.join(&name), &bytes)?;
        written.push(format!("reports/{name}"));
        Ok(())
    };
    let csv_err = |name: &str, e: csv::Error| CliError::output(dir.join(name), e);

    let rep = aggregate(ds, by);
    let name = format!("indicators_by_{by}.csv");
    let mut buf = Vec::new();
    write_indicator_csv(&rep, &mut buf).map_err(|e| csv_err(&name, e))?;
    emit(name, buf)?;
    for ind in INDICATORS {
        let rows: Vec<_> = rep.rows.iter().filter(|r| r.indicator == ind).collect();
        if rows.is_empty() {
            continue;
        }
        let title = format!("{ind} by {by}");
        emit(format!("{ind}_by_{by}.svg"), svg::box_plot(&title, &rows, ind == "BCR").into_bytes())?;
    }
    for (what, rows) in [("Form_Type", form_counts(ds, by)), ("Layout_Pattern", layout_counts(ds, by))] {
        let stem = format!("{}_by_{by}", what.to_lowercase());
        let mut buf = Vec::new();
        write_category_csv(by, what, &rows, &mut buf).map_err(|e| csv_err(&stem, e))?;
        emit(format!("{stem}.csv"), buf)?;
        if !rows.is_empty() {
            emit(format!("{stem}.svg"), svg::stacked_bars(&format!("{what} by {by}"), &rows).into_bytes())?;
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: &'static str,
    pub status: StageStatus,
    pub millis: f64,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub generator: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub parallel: bool,
    pub stages: Vec<StageRecord>,
    /// Rejected input features per layer.
    pub rejections: BTreeMap<String, usize>,
    /// Data-quality issues per kind.
    pub issues: BTreeMap<String, usize>,
    pub disabled_indicators: Vec<&'static str>,
    pub outputs: Vec<String>,
    pub error: Option<String>,
}

impl Manifest {
    fn new(cfg: &IndicatorConfig, exec: Exec) -> Manifest {
        Manifest {
            generator: concat!("spli ", env!("CARGO_PKG_VERSION")),
            config_hash: config_hash(cfg),
            seed: cfg.seed,
            parallel: exec.is_parallel(),
            stages: Vec::new(),
            rejections: BTreeMap::new(),
            issues: BTreeMap::new(),
            disabled_indicators: disabled_indicators(cfg),
            outputs: Vec::new(),
            error: None,
        }
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }
}

struct Runner<'a> {
    manifest: Manifest,
    out_dir: &'a Path,
}

impl Runner<'_> {
    fn run<T>(&mut self, stage: &'static str, enabled: bool, f: impl FnOnce() -> Result<(T, String)>) -> Result<Option<T>> {
        if !enabled {
            self.manifest.stages.push(StageRecord {
                stage,
                status: StageStatus::Skipped,
                millis: 0.0,
                note: "disabled in config".into(),
            });
            return Ok(None);
        }
        let t = Instant::now();
        let res = f();
        let millis = t.elapsed().as_secs_f64() * 1e3;
        let (status, note) = match &res {
            Ok((_, note)) => (StageStatus::Ok, note.clone()),
            Err(e) => (StageStatus::Failed, e.to_string()),
        };
        log::info!("{stage}: {note} ({millis:.1} ms)");
        self.manifest.stages.push(StageRecord { stage, status, millis, note });
        res.map(|(v, _)| Some(v))
    }

    fn finish(mut self, err: Option<&CliError>) -> Result<Manifest> {
        self.manifest.error = err.map(ToString::to_string);
        self.manifest.outputs.sort();
        self.manifest.outputs.dedup();
        write_json(&self.out_dir.join(MANIFEST_FILE), &self.manifest)?;
        Ok(self.manifest)
    }
}

/// Runs every enabled stage and writes enriched GeoJSON, reports and the
/// manifest to `out_dir`. Enriched output is rewritten after each stage, so
/// a failure leaves the last good state on disk.
pub fn run_pipeline(cfg: &IndicatorConfig, out_dir: &Path, exec: Exec) -> Result<Manifest> {
    let mut runner = Runner {
        manifest: Manifest::new(cfg, exec),
        out_dir,
    };
    let res = run_stages(cfg, out_dir, exec, &mut runner);
    match res {
        Ok(()) => runner.finish(None),
        Err(e) => {
            runner.finish(Some(&e))?;
            Err(e)
        }
    }
}

fn run_stages(cfg: &IndicatorConfig, out_dir: &Path, exec: Exec, r: &mut Runner) -> Result<()> {
    let s = cfg.stages.clone();
    let mut ds = r
        .run("ingest", true, || {
            let ds = stages::ingest(cfg, exec)?;
            let note = stages::ingest_note(&ds);
            Ok((ds, note))
        })?
        .expect("ingest always runs");
    for rej in &ds.rejections {
        *r.manifest.rejections.entry(rej.layer.as_str().to_string()).or_default() += 1;
    }
    for issue in validate(&ds).issues {
        let kind = serde_json::to_value(&issue).ok().and_then(|v| v["kind"].as_str().map(str::to_string)).unwrap_or_default();
        *r.manifest.issues.entry(kind).or_default() += 1;
    }
    write_json(&out_dir.join(REJECTIONS_FILE), &ds.rejections)?;
    r.manifest.outputs.push(REJECTIONS_FILE.into());

    let checkpoint_out = |ds: &Dataset, r: &mut Runner| -> Result<()> {
        write_enriched(ds, cfg, out_dir)?;
        r.manifest.outputs.extend([BUILDINGS_FILE.to_string(), PLOTS_FILE.to_string()]);
        Ok(())
    };
    checkpoint_out(&ds, r)?;

    r.run("forms", s.forms, || Ok(((), stages::forms(&mut ds, cfg, exec))))?;
    checkpoint_out(&ds, r)?;

    let trained = r.run("functions", s.functions, || {
        let (ck, report, note) = match cfg.functions.model.as_deref().filter(|p| p.exists()) {
            Some(p) => (stages::load_checkpoint(p)?, None, format!("model {}", p.display())),
            None => {
                let (ck, report) = stages::functions_train(&ds, cfg)?;
                let note = format!("trained, cv accuracy {:.3}", report.cv_accuracy);
                (ck, Some(report), note)
            }
        };
        let pred = stages::functions_predict(&mut ds, cfg, &ck)?;
        Ok(((ck, report), format!("{note}; {pred}")))
    })?;
    if let Some((ck, report)) = trained {
        if let Some(report) = report {
            let p = out_dir.join(MODEL_FILE);
            ck.save(&p).map_err(|e| CliError::output(&p, e))?;
            write_json(&out_dir.join(TRAIN_REPORT_FILE), &report)?;
            r.manifest.outputs.extend([MODEL_FILE.to_string(), TRAIN_REPORT_FILE.to_string()]);
        }
    }
    checkpoint_out(&ds, r)?;

    r.run("layouts", s.layouts, || Ok(((), stages::layouts(&mut ds, cfg, exec))))?;
    r.run("diversity", s.diversity, || Ok(((), stages::diversity(&mut ds, cfg, exec))))?;
    r.run("access", s.access, || Ok(((), stages::access(&mut ds, cfg, exec))))?;
    r.run("intensity", s.intensity, || Ok(((), stages::intensity(&mut ds, cfg, exec))))?;
    checkpoint_out(&ds, r)?;

    let reports = r.run("report", s.report, || {
        let mut files = Vec::new();
        for by in GroupBy::ALL {
            files.extend(write_reports(&ds, by, out_dir)?);
        }
        let note = format!("{} files", files.len());
        Ok((files, note))
    })?;
    r.manifest.outputs.extend(reports.unwrap_or_default());
    Ok(())
}

/// Files written by a run, relative to `out_dir`, excluding the manifest.
pub fn output_files(out_dir: &Path) -> Vec<PathBuf> {
    fn walk(dir: &Path, base: &Path, out: &mut Vec<PathBuf>) {
        let Ok(entries) = std::fs::read_dir(dir) else { return };
        for e in entries.flatten() {
            let p = e.path();
            if p.is_dir() {
                walk(&p, base, out);
            } else if p.file_name().is_some_and(|n| n != MANIFEST_FILE) {
                out.push(p.strip_prefix(base).unwrap_or(&p).to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(out_dir, out_dir, &mut out);
    out.sort();
    out
}
