//! Per-group distribution tables for the plot indicators, and form / layout
//! composition tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use spli_core::{Dataset, PlotRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    LandUse,
    Subzone,
}

impl GroupBy {
    pub const ALL: [GroupBy; 2] = [GroupBy::LandUse, GroupBy::Subzone];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupBy::LandUse => "land_use",
            GroupBy::Subzone => "subzone",
        }
    }

    pub fn key(self, p: &PlotRecord) -> &str {
        match self {
            GroupBy::LandUse => &p.land_use,
            GroupBy::Subzone => &p.subzone,
        }
    }
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "land_use" | "landuse" => Ok(GroupBy::LandUse),
            "subzone" => Ok(GroupBy::Subzone),
            other => Err(format!("unknown grouping `{other}`, expected land_use or subzone")),
        }
    }
}

/// The five plot indicators summarised in reports.
pub const INDICATORS: [&str; 5] = ["SI", "PTA", "CI", "FAR", "BCR"];

/// Value and outlier flag of an indicator on a plot, if computed.
pub fn indicator_value(p: &PlotRecord, name: &str) -> Option<(f64, bool)> {
    match name {
        "SI" => p.si.map(|v| (v, false)),
        "PTA" => p.pta.map(|v| (v, false)),
        "CI" => p.ci.map(|v| (v, false)),
        "FAR" => p.far.map(|v| (v, false)),
        "BCR" => p.bcr.map(|v| (v, p.bcr_outlier.unwrap_or(false))),
        _ => None,
    }
}

/// Linear-interpolation quantile (Hyndman-Fan type 7) of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Summary {
        min: *v.first()?,
        q1: quantile(&v, 0.25)?,
        median: quantile(&v, 0.5)?,
        q3: quantile(&v, 0.75)?,
        max: *v.last()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorStats {
    pub group: String,
    pub indicator: &'static str,
    /// Plots in the group with this indicator computed, outliers included.
    pub count: usize,
    /// Plots flagged as outliers and left out of the summary.
    pub outliers: usize,
    pub summary: Option<Summary>,
    /// Values the summary was computed from, sorted.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub group_by: GroupBy,
    pub rows: Vec<IndicatorStats>,
}

fn groups(ds: &Dataset, by: GroupBy) -> BTreeMap<&str, Vec<&PlotRecord>> {
    let mut out: BTreeMap<&str, Vec<&PlotRecord>> = BTreeMap::new();
    for p in &ds.plots {
        out.entry(by.key(p)).or_default().push(p);
    }
    out
}

pub fn aggregate(ds: &Dataset, by: GroupBy) -> AggregateReport {
    let mut rows = Vec::new();
    for (group, plots) in groups(ds, by) {
        for ind in INDICATORS {
            let vals: Vec<(f64, bool)> = plots.iter().filter_map(|p| indicator_value(p, ind)).collect();
            if vals.is_empty() {
                continue;
            }
            let mut kept: Vec<f64> = vals.iter().filter(|(_, out)| !out).map(|(v, _)| *v).collect();
            kept.sort_by(f64::total_cmp);
            rows.push(IndicatorStats {
                group: group.to_string(),
                indicator: ind,
                count: vals.len(),
                outliers: vals.len() - kept.len(),
                summary: summarize(&kept),
                values: kept,
            });
        }
    }
    AggregateReport { group_by: by, rows }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryCount {
    pub group: String,
    pub category: String,
    pub count: usize,
    /// Share of the group total.
    pub share: f64,
}

fn shares(counts: BTreeMap<(String, String), usize>) -> Vec<CategoryCount> {
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for ((g, _), n) in &counts {
        *totals.entry(g.as_str()).or_default() += n;
    }
    let totals: BTreeMap<String, usize> = totals.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    counts
        .into_iter()
        .map(|((group, category), count)| {
            let share = count as f64 / totals[&group] as f64;
            CategoryCount {
                group,
                category,
                count,
                share,
            }
        })
        .collect()
}

/// Buildings outside every plot are grouped under this key.
pub const NO_PLOT: &str = "(no plot)";

/// Form_Type counts per group, over buildings with a form type.
pub fn form_counts(ds: &Dataset, by: GroupBy) -> Vec<CategoryCount> {
    let group_of: BTreeMap<&str, &str> = ds.plots.iter().map(|p| (p.mp_name.as_str(), by.key(p))).collect();
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for b in &ds.buildings {
        let Some(form) = b.form_type else { continue };
        let g = b.plot_id.as_deref().and_then(|pid| group_of.get(pid).copied()).unwrap_or(NO_PLOT);
        *counts.entry((g.to_string(), form.as_str().to_string())).or_default() += 1;
    }
    shares(counts)
}

/// Layout_Pattern counts per group; plots with a null pattern count as "None".
pub fn layout_counts(ds: &Dataset, by: GroupBy) -> Vec<CategoryCount> {
    let mut counts: BTreeMap<(String, String), usize> = BTreeMap::new();
    for p in &ds.plots {
        let Some(pat) = p.layout_pattern else { continue };
        let name = pat.map_or("None", |l| l.as_str());
        *counts.entry((by.key(p).to_string(), name.to_string())).or_default() += 1;
    }
    shares(counts)
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_indicator_csv(rep: &AggregateReport, w: impl Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([rep.group_by.as_str(), "indicator", "count", "outliers", "min", "q1", "median", "q3", "max"])?;
    for r in &rep.rows {
        let s = r.summary;
        let f = |g: fn(&Summary) -> f64| s.as_ref().map(|s| num(g(s))).unwrap_or_default();
        out.write_record([
            r.group.clone(),
            r.indicator.to_string(),
            r.count.to_string(),
            r.outliers.to_string(),
            f(|s| s.min),
            f(|s| s.q1),
            f(|s| s.median),
            f(|s| s.q3),
            f(|s| s.max),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_category_csv(by: GroupBy, what: &str, rows: &[CategoryCount], w: impl Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([by.as_str(), what, "count", "share"])?;
    for r in rows {
        out.write_record([r.group.clone(), r.category.clone(), r.count.to_string(), num(r.share)])?;
    }
    out.flush()?;
    Ok(())
}
