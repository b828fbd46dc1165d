//! Self-contained SVG box plots and stacked bar charts.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::report::{CategoryCount, IndicatorStats};

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

const PLOT_H: f64 = 300.0;
const TOP: f64 = 40.0;
const LEFT: f64 = 70.0;
const COL_W: f64 = 90.0;
const BOTTOM: f64 = 110.0;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#, width / 2.0, esc(title));
}

fn group_label(out: &mut String, x: f64, label: &str) {
    let y = TOP + PLOT_H + 12.0;
    let _ = writeln!(
        out,
        r#"<text x="{x:.1}" y="{y:.1}" text-anchor="end" transform="rotate(-40 {x:.1} {y:.1})">{}</text>"#,
        esc(label)
    );
}

/// Box plot of one indicator across groups. Whiskers span the retained
/// minimum and maximum; excluded outliers are reported under each box.
/// With `percent`, tick labels are shown ×100.
pub fn box_plot(title: &str, rows: &[&IndicatorStats], percent: bool) -> String {
    let width = LEFT + COL_W * rows.len().max(1) as f64 + 20.0;
    let height = TOP + PLOT_H + BOTTOM;
    let mut out = String::new();
    header(&mut out, width, height, title);

    let (lo, hi) = rows
        .iter()
        .filter_map(|r| r.summary)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.min), hi.max(s.max)));
    let (lo, hi) = if lo.is_finite() { (lo.min(0.0), hi) } else { (0.0, 1.0) };
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let y = |v: f64| TOP + PLOT_H - (v - lo) / (hi - lo) * PLOT_H;

    let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.1}" stroke="#333"/>"##, TOP + PLOT_H);
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let label = if percent { format!("{:.1}%", v * 100.0) } else { format!("{v:.3}") };
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{yy:.1}" x2="{LEFT}" y2="{yy:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"##,
            LEFT - 4.0,
            LEFT - 6.0,
            y(v) + 4.0,
            yy = y(v)
        );
    }
    for (i, r) in rows.iter().enumerate() {
        let cx = LEFT + COL_W * (i as f64 + 0.5);
        if let Some(s) = r.summary {
            let half = COL_W * 0.3;
            let _ = writeln!(
                out,
                r##"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="#333"/>"##,
                y(s.max),
                y(s.min)
            );
            let _ = writeln!(
                out,
                r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="{}" stroke="#333"/>"##,
                cx - half,
                y(s.q3),
                2.0 * half,
                (y(s.q1) - y(s.q3)).max(0.5),
                PALETTE[0]
            );
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{m:.1}" x2="{:.1}" y2="{m:.1}" stroke="#000" stroke-width="2"/>"##,
                cx - half,
                cx + half,
                m = y(s.median)
            );
            for v in [s.min, s.max] {
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.1}" y1="{w:.1}" x2="{:.1}" y2="{w:.1}" stroke="#333"/>"##,
                    cx - half / 2.0,
                    cx + half / 2.0,
                    w = y(v)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle" font-size="9">n={} out={}</text>"#,
            TOP + PLOT_H + BOTTOM - 8.0,
            r.count,
            r.outliers
        );
        group_label(&mut out, cx, &r.group);
    }
    out.push_str("</svg>\n");
    out
}

/// 100% stacked bars, one per group, segments in category order.
pub fn stacked_bars(title: &str, rows: &[CategoryCount]) -> String {
    let mut by_group: BTreeMap<&str, Vec<&CategoryCount>> = BTreeMap::new();
    let mut cats: Vec<&str> = Vec::new();
    for r in rows {
        by_group.entry(&r.group).or_default().push(r);
        if !cats.contains(&r.category.as_str()) {
            cats.push(&r.category);
        }
    }
    cats.sort_unstable();
    let color = |c: &str| PALETTE[cats.iter().position(|x| *x == c).unwrap_or(0) % PALETTE.len()];

    let legend_w = 170.0;
    let width = LEFT + COL_W * by_group.len().max(1) as f64 + legend_w;
    let height = TOP + PLOT_H + BOTTOM;
    let mut out = String::new();
    header(&mut out, width, height, title);
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let yy = TOP + PLOT_H - v * PLOT_H;
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{yy:.1}" x2="{LEFT}" y2="{yy:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}%</text>"##,
            LEFT - 4.0,
            LEFT - 6.0,
            yy + 4.0,
            v * 100.0
        );
    }
    for (i, (group, segs)) in by_group.iter().enumerate() {
        let x = LEFT + COL_W * i as f64 + COL_W * 0.2;
        let mut acc = 0.0;
        for s in segs {
            let h = s.share * PLOT_H;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="{}"><title>{}: {} ({})</title></rect>"#,
                TOP + PLOT_H - acc - h,
                COL_W * 0.6,
                color(&s.category),
                esc(&s.category),
                s.count,
                esc(group)
            );
            acc += h;
        }
        group_label(&mut out, x + COL_W * 0.3, group);
    }
    let lx = LEFT + COL_W * by_group.len().max(1) as f64 + 15.0;
    for (k, c) in cats.iter().enumerate() {
        let ly = TOP + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{lx:.1}" y="{ly:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            color(c),
            lx + 14.0,
            ly + 9.0,
            esc(c)
        );
    }
    out.push_str("</svg>\n");
    out
}
