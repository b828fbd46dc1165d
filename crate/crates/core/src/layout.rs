//! Plot layout patterns from building centroids, areas and aspect ratios.
//!
//! The cascade is evaluated in a fixed order and the first passing rule wins:
//! absolute symmetry, approximate symmetry, centripetal, axis-guided, uniform
//! form, mixed, and finally flexible. Plots with at most one candidate building
//! get no pattern.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::LayoutConfig;
use crate::exec::{self, Exec};
use crate::geom::{min_bounding_rect_of_points, Point};
use crate::model::{BuildingRecord, Dataset, PlotRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayoutPattern {
    AbsoluteSymmetry,
    ApproximateSymmetry,
    Centripetal,
    AxisGuided,
    UniformForm,
    Mixed,
    Flexible,
}

impl LayoutPattern {
    pub const ALL: [LayoutPattern; 7] = [
        LayoutPattern::AbsoluteSymmetry,
        LayoutPattern::ApproximateSymmetry,
        LayoutPattern::Centripetal,
        LayoutPattern::AxisGuided,
        LayoutPattern::UniformForm,
        LayoutPattern::Mixed,
        LayoutPattern::Flexible,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutPattern::AbsoluteSymmetry => "Absolute Symmetry",
            LayoutPattern::ApproximateSymmetry => "Approximate Symmetry",
            LayoutPattern::Centripetal => "Centripetal Layout",
            LayoutPattern::AxisGuided => "Axis-Guided Layout",
            LayoutPattern::UniformForm => "Uniform Form",
            LayoutPattern::Mixed => "Mixed Layout",
            LayoutPattern::Flexible => "Flexible Layout",
        }
    }
}

impl fmt::Display for LayoutPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutPattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LayoutPattern::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown layout pattern `{s}`"))
    }
}

/// Per-building inputs to the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub centroid: Point,
    pub area: f64,
    /// MBR length / width.
    pub aspect: f64,
}

impl Candidate {
    pub fn from_building(b: &BuildingRecord) -> Option<Candidate> {
        let centroid = b.geometry.centroid().ok()?;
        let pts: Vec<Point> = b.geometry.parts().iter().flat_map(|p| p.exterior.points().iter().copied()).collect();
        let aspect = min_bounding_rect_of_points(&pts).map(|m| m.aspect_ratio()).unwrap_or(f64::NAN);
        Some(Candidate {
            id: b.id.clone(),
            centroid,
            area: b.foot_area,
            aspect,
        })
    }
}

fn is_excluded_type(b: &BuildingRecord, excluded: &[String]) -> bool {
    [b.level2.as_deref(), b.level3.as_deref()]
        .into_iter()
        .flatten()
        .any(|t| excluded.iter().any(|x| x.trim().eq_ignore_ascii_case(t.trim())))
}

/// Drops small and transport buildings and returns the rest sorted by id.
pub fn filter_candidates<'a>(buildings: impl IntoIterator<Item = &'a BuildingRecord>, cfg: &LayoutConfig) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = buildings
        .into_iter()
        .filter(|b| b.foot_area >= cfg.min_building_area && !is_excluded_type(b, &cfg.excluded_types))
        .filter_map(Candidate::from_building)
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

/// Line through `origin` along unit vector `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub origin: Point,
    pub dir: Point,
}

impl Axis {
    fn new(origin: Point, angle_rad: f64) -> Axis {
        Axis {
            origin,
            dir: Point::new(angle_rad.cos(), angle_rad.sin()),
        }
    }

    pub fn reflect(&self, p: Point) -> Point {
        let vx = p.x - self.origin.x;
        let vy = p.y - self.origin.y;
        let t = vx * self.dir.x + vy * self.dir.y;
        Point::new(
            self.origin.x + 2.0 * t * self.dir.x - vx,
            self.origin.y + 2.0 * t * self.dir.y - vy,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryMatch {
    pub axis: Axis,
    pub pairs: Vec<(String, String)>,
    pub self_matched: Vec<String>,
    /// (2·pairs + self) / N
    pub matched_fraction: f64,
    /// Largest reflection mismatch over matched buildings, as a fraction of the plot diameter.
    pub max_centroid_offset: f64,
    /// Largest area ratio (≥ 1) over matched pairs.
    pub worst_area_ratio: f64,
}

impl SymmetryMatch {
    pub fn matched_count(&self) -> usize {
        2 * self.pairs.len() + self.self_matched.len()
    }

    // Balance: at least one mirrored pair, and on-axis buildings may not
    // outnumber paired ones.
    fn balanced(&self) -> bool {
        !self.pairs.is_empty() && 2 * self.pairs.len() >= self.self_matched.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryTolerance {
    /// Max reflection offset as a fraction of plot diameter.
    pub offset: f64,
    /// Max area ratio (≥ 1) of a matched pair.
    pub area_ratio: f64,
    pub min_fraction: f64,
}

fn area_ratio(a: f64, b: f64) -> f64 {
    a.max(b) / a.min(b)
}

fn mean(pts: &[Point]) -> Point {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    Point::new(sx / n, sy / n)
}

/// Population covariance (sxx, syy, sxy) of the centroid cloud.
fn covariance(pts: &[Point]) -> (f64, f64, f64) {
    let m = mean(pts);
    let n = pts.len() as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in pts {
        let dx = p.x - m.x;
        let dy = p.y - m.y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (sxx / n, syy / n, sxy / n)
}

/// Fraction of centroid variance along the principal axis.
pub fn principal_variance_share(pts: &[Point]) -> Option<f64> {
    let (sxx, syy, sxy) = covariance(pts);
    let tr = sxx + syy;
    if tr <= 0.0 {
        return None;
    }
    let disc = (((sxx - syy) / 2.0).powi(2) + sxy * sxy).sqrt();
    let l1 = tr / 2.0 + disc;
    Some(l1 / tr)
}

fn principal_axes(pts: &[Point]) -> [Axis; 2] {
    let (sxx, syy, sxy) = covariance(pts);
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let m = mean(pts);
    [Axis::new(m, theta), Axis::new(m, theta + std::f64::consts::FRAC_PI_2)]
}

fn pair_bisectors(cands: &[Candidate], max_area_ratio: Option<f64>) -> Vec<Axis> {
    let mut out = Vec::new();
    for i in 0..cands.len() {
        for j in (i + 1)..cands.len() {
            if max_area_ratio.is_some_and(|r| area_ratio(cands[i].area, cands[j].area) > r) {
                continue;
            }
            let (a, b) = (cands[i].centroid, cands[j].centroid);
            if a == b {
                continue;
            }
            let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            let angle = (b.y - a.y).atan2(b.x - a.x) + std::f64::consts::FRAC_PI_2;
            out.push(Axis::new(mid, angle));
        }
    }
    out
}

fn candidate_axes(cands: &[Candidate], pair_axis_max: usize) -> Vec<Axis> {
    let pts: Vec<Point> = cands.iter().map(|c| c.centroid).collect();
    let mut axes = principal_axes(&pts).to_vec();
    if cands.len() <= pair_axis_max {
        axes.extend(pair_bisectors(cands, None));
    }
    axes
}

/// Greedy reflection matching about one axis, in candidate order.
pub fn match_about_axis(cands: &[Candidate], axis: Axis, diameter: f64, tol: &SymmetryTolerance) -> SymmetryMatch {
    let n = cands.len();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    let mut self_matched = Vec::new();
    let mut max_off: f64 = 0.0;
    let mut worst_ratio: f64 = 1.0;
    for i in 0..n {
        if used[i] {
            continue;
        }
        let r = axis.reflect(cands[i].centroid);
        let best = (0..n)
            .filter(|&j| !used[j] && area_ratio(cands[i].area, cands[j].area) <= tol.area_ratio)
            .map(|j| (j, r.dist(cands[j].centroid)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((j, d)) = best else { continue };
        let off = d / diameter;
        if off > tol.offset {
            continue;
        }
        used[i] = true;
        used[j] = true;
        max_off = max_off.max(off);
        if j == i {
            self_matched.push(cands[i].id.clone());
        } else {
            worst_ratio = worst_ratio.max(area_ratio(cands[i].area, cands[j].area));
            pairs.push((cands[i].id.clone(), cands[j].id.clone()));
        }
    }
    let matched_fraction = if n == 0 { 0.0 } else { (2 * pairs.len() + self_matched.len()) as f64 / n as f64 };
    SymmetryMatch {
        axis,
        pairs,
        self_matched,
        matched_fraction,
        max_centroid_offset: max_off,
        worst_area_ratio: worst_ratio,
    }
}

fn better(a: &SymmetryMatch, b: &SymmetryMatch) -> bool {
    a.matched_fraction > b.matched_fraction
        || (a.matched_fraction == b.matched_fraction && a.max_centroid_offset < b.max_centroid_offset)
}

/// Best mirror symmetry over the candidate axes, or `None` if no axis reaches
/// `tol.min_fraction` with a balanced match.
pub fn detect_symmetry(
    cands: &[Candidate],
    diameter: f64,
    tol: &SymmetryTolerance,
    pair_axis_max: usize,
) -> Option<SymmetryMatch> {
    if cands.len() < 2 || !(diameter > 0.0) {
        return None;
    }
    let mut best: Option<SymmetryMatch> = None;
    for axis in candidate_axes(cands, pair_axis_max) {
        let m = match_about_axis(cands, axis, diameter, tol);
        if !m.balanced() || m.matched_fraction < tol.min_fraction {
            continue;
        }
        if best.as_ref().is_none_or(|b| better(&m, b)) {
            best = Some(m);
        }
    }
    best
}

/// Outcome of every rule in the cascade, independent of order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LayoutPredicates {
    pub absolute: bool,
    pub approximate: bool,
    pub centripetal: bool,
    pub axis_guided: bool,
    pub uniform: bool,
    pub mixed: bool,
}

impl LayoutPredicates {
    /// First passing rule in cascade order.
    pub fn pattern(&self) -> LayoutPattern {
        [
            (self.absolute, LayoutPattern::AbsoluteSymmetry),
            (self.approximate, LayoutPattern::ApproximateSymmetry),
            (self.centripetal, LayoutPattern::Centripetal),
            (self.axis_guided, LayoutPattern::AxisGuided),
            (self.uniform, LayoutPattern::UniformForm),
            (self.mixed, LayoutPattern::Mixed),
        ]
        .into_iter()
        .find_map(|(ok, p)| ok.then_some(p))
        .unwrap_or(LayoutPattern::Flexible)
    }

    /// Value of the rule that yields `p`; Flexible is always true.
    pub fn holds(&self, p: LayoutPattern) -> bool {
        match p {
            LayoutPattern::AbsoluteSymmetry => self.absolute,
            LayoutPattern::ApproximateSymmetry => self.approximate,
            LayoutPattern::Centripetal => self.centripetal,
            LayoutPattern::AxisGuided => self.axis_guided,
            LayoutPattern::UniformForm => self.uniform,
            LayoutPattern::Mixed => self.mixed,
            LayoutPattern::Flexible => true,
        }
    }
}

pub fn absolute_tolerance(cfg: &LayoutConfig) -> SymmetryTolerance {
    SymmetryTolerance {
        offset: cfg.absolute_offset,
        area_ratio: cfg.absolute_area_ratio,
        min_fraction: 1.0,
    }
}

pub fn approximate_tolerance(cfg: &LayoutConfig) -> SymmetryTolerance {
    SymmetryTolerance {
        offset: cfg.approximate_offset,
        area_ratio: cfg.approximate_area_ratio,
        min_fraction: cfg.approximate_min_fraction,
    }
}

pub fn is_centripetal(cands: &[Candidate], cfg: &LayoutConfig) -> bool {
    if cands.len() < cfg.centripetal_min_buildings.max(3) {
        return false;
    }
    let pts: Vec<Point> = cands.iter().map(|c| c.centroid).collect();
    let Ok(mbr) = min_bounding_rect_of_points(&pts) else {
        return false;
    };
    if mbr.aspect_ratio() > cfg.centripetal_max_hull_aspect {
        return false;
    }
    let m = mean(&pts);
    let radii: Vec<f64> = pts.iter().map(|p| p.dist(m)).collect();
    let n = radii.len() as f64;
    let mu = radii.iter().sum::<f64>() / n;
    if mu <= 0.0 {
        return false;
    }
    let var = radii.iter().map(|r| (r - mu).powi(2)).sum::<f64>() / n;
    var.sqrt() / mu <= cfg.centripetal_max_radial_cv
}

pub fn is_axis_guided(cands: &[Candidate], cfg: &LayoutConfig) -> bool {
    if cands.len() < cfg.axis_min_buildings {
        return false;
    }
    let pts: Vec<Point> = cands.iter().map(|c| c.centroid).collect();
    principal_variance_share(&pts).is_some_and(|s| s >= cfg.axis_min_variance_share)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn is_uniform_form(cands: &[Candidate], cfg: &LayoutConfig) -> bool {
    if cands.len() < 2 || cands.iter().any(|c| !c.aspect.is_finite()) {
        return false;
    }
    let mut ars: Vec<f64> = cands.iter().map(|c| c.aspect).collect();
    ars.sort_by(f64::total_cmp);
    let med = median(&ars);
    ars.iter().all(|a| (a - med).abs() / med <= cfg.uniform_max_aspect_deviation)
}

/// Size of the largest balanced mirror-symmetric subset under the approximate
/// tolerances, over principal axes and all area-compatible pair bisectors.
pub fn largest_symmetric_subset(cands: &[Candidate], diameter: f64, cfg: &LayoutConfig) -> usize {
    if cands.len() < 2 || !(diameter > 0.0) {
        return 0;
    }
    let tol = approximate_tolerance(cfg);
    let pts: Vec<Point> = cands.iter().map(|c| c.centroid).collect();
    let mut axes = principal_axes(&pts).to_vec();
    axes.extend(pair_bisectors(cands, Some(tol.area_ratio)));
    axes.into_iter()
        .map(|a| match_about_axis(cands, a, diameter, &tol))
        .filter(SymmetryMatch::balanced)
        .map(|m| m.matched_count())
        .max()
        .unwrap_or(0)
}

pub fn is_mixed(cands: &[Candidate], diameter: f64, approximate_holds: bool, cfg: &LayoutConfig) -> bool {
    if approximate_holds {
        return false;
    }
    let n = cands.len();
    let need = cfg.mixed_min_buildings.max((cfg.mixed_min_fraction * n as f64).ceil() as usize);
    need <= n && largest_symmetric_subset(cands, diameter, cfg) >= need
}

/// Evaluates every rule of the cascade on a candidate set.
pub fn evaluate_predicates(cands: &[Candidate], diameter: f64, cfg: &LayoutConfig) -> LayoutPredicates {
    let absolute = detect_symmetry(cands, diameter, &absolute_tolerance(cfg), cfg.pair_axis_max_buildings).is_some();
    let approximate =
        detect_symmetry(cands, diameter, &approximate_tolerance(cfg), cfg.pair_axis_max_buildings).is_some();
    LayoutPredicates {
        absolute,
        approximate,
        centripetal: is_centripetal(cands, cfg),
        axis_guided: is_axis_guided(cands, cfg),
        uniform: is_uniform_form(cands, cfg),
        mixed: is_mixed(cands, diameter, approximate, cfg),
    }
}

/// Diagonal of the plot's bounding box; offsets are normalized by it.
pub fn plot_diameter(plot: &PlotRecord) -> f64 {
    plot.geometry.bbox().diagonal()
}

/// Pattern for one plot given its filtered candidates; `None` for ≤ 1 candidate.
pub fn classify_layout(plot: &PlotRecord, cands: &[Candidate], cfg: &LayoutConfig) -> Option<LayoutPattern> {
    if cands.len() <= 1 {
        return None;
    }
    let d = plot_diameter(plot);
    let abs = absolute_tolerance(cfg);
    if detect_symmetry(cands, d, &abs, cfg.pair_axis_max_buildings).is_some() {
        return Some(LayoutPattern::AbsoluteSymmetry);
    }
    let approx = approximate_tolerance(cfg);
    if detect_symmetry(cands, d, &approx, cfg.pair_axis_max_buildings).is_some() {
        return Some(LayoutPattern::ApproximateSymmetry);
    }
    if is_centripetal(cands, cfg) {
        return Some(LayoutPattern::Centripetal);
    }
    if is_axis_guided(cands, cfg) {
        return Some(LayoutPattern::AxisGuided);
    }
    if is_uniform_form(cands, cfg) {
        return Some(LayoutPattern::UniformForm);
    }
    if is_mixed(cands, d, false, cfg) {
        return Some(LayoutPattern::Mixed);
    }
    Some(LayoutPattern::Flexible)
}

/// Layout pattern for every plot, in plot order.
pub fn classify_plots(ds: &Dataset, cfg: &LayoutConfig, exec: Exec) -> Vec<Option<LayoutPattern>> {
    let by_plot = ds.buildings_by_plot();
    exec::map(exec, &ds.plots, |plot| {
        let members = by_plot.get(plot.mp_name.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let cands = filter_candidates(members.iter().map(|&i| &ds.buildings[i]), cfg);
        classify_layout(plot, &cands, cfg)
    })
}
