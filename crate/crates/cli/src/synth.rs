//! Seeded synthetic town: a 6 × 5 grid of plots with varied layouts, a road
//! grid, POIs and transit stops, in projected metres.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use spli_core::geom::{rotate, Point, Polygon, Ring};

use crate::error::Result;
use crate::pipeline::write_json;

const ORIGIN: (f64, f64) = (20_000.0, 30_000.0);
const COLS: usize = 6;
const ROWS: usize = 5;
const PITCH_X: f64 = 160.0;
const PITCH_Y: f64 = 130.0;
const STREET: f64 = 20.0;

const LAND_USES: [&str; 5] = [
    "RESIDENTIAL",
    "COMMERCIAL",
    "RESIDENTIAL WITH COMMERCIAL AT 1ST STOREY",
    "BUSINESS 1",
    "COMMERCIAL & RESIDENTIAL",
];
const SUBZONES: [&str; 3] = ["Alexandra", "Queensway", "Tanglin Halt"];
const POI_CATEGORIES: [&str; 10] = [
    "hospital",
    "school",
    "supermarket",
    "park",
    "convenience store",
    "cafe",
    "clinic",
    "church",
    "student hostel",
    "hawker centre",
];

pub struct Town {
    pub buildings: Value,
    pub plots: Value,
    pub pois: Value,
    pub roads: Value,
    pub transit: Value,
}

pub const CONFIG_TOML: &str = r#"crs = "projected"
seed = 7

[input]
buildings = "buildings.geojson"
plots = "plots.geojson"
pois = "pois.geojson"
roads = "roads.geojson"
transit = "transit.geojson"
"#;

fn r2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn ring_coords(r: &Ring) -> Value {
    Value::Array(r.points().iter().map(|p| json!([r2(p.x), r2(p.y)])).collect())
}

fn polygon_geom(p: &Polygon) -> Value {
    let rings: Vec<Value> = std::iter::once(&p.exterior).chain(&p.interiors).map(ring_coords).collect();
    json!({"type": "Polygon", "coordinates": rings})
}

fn point_geom(p: Point) -> Value {
    json!({"type": "Point", "coordinates": [r2(p.x), r2(p.y)]})
}

fn fc(features: Vec<Value>) -> Value {
    json!({"type": "FeatureCollection", "features": features})
}

/// Axis-aligned w × h rectangle centred on `c`, turned by `deg` about its centre.
fn rect(c: Point, w: f64, h: f64, deg: f64) -> Polygon {
    let p = Polygon::rect(c.x - w / 2.0, c.y - h / 2.0, c.x + w / 2.0, c.y + h / 2.0);
    if deg == 0.0 {
        p
    } else {
        p.map_points(|q| rotate(q, c, deg))
    }
}

struct Bldg {
    poly: Polygon,
    code: Option<&'static str>,
    name: Option<&'static str>,
}

fn code_for(land_use: &str, area: f64) -> &'static str {
    match land_use {
        "RESIDENTIAL" if area < 250.0 => "B1",
        "RESIDENTIAL" => "B3",
        "COMMERCIAL" if area < 250.0 => "B5",
        "COMMERCIAL" => "AB",
        "RESIDENTIAL WITH COMMERCIAL AT 1ST STOREY" => "AB4",
        "BUSINESS 1" => "AAB",
        _ => "AB",
    }
}

fn height_range(code: &str) -> (f64, f64) {
    match code {
        "B3" => (36.0, 120.0),
        "B1" => (6.0, 12.0),
        "B5" => (9.0, 15.0),
        "AB4" => (30.0, 60.0),
        "AAB" => (20.0, 60.0),
        _ => (25.0, 80.0),
    }
}

fn layout(template: usize, c: Point, rng: &mut ChaCha8Rng) -> Vec<Polygon> {
    match template {
        // Mirrored pairs about the plot's vertical centre line.
        0 => {
            let mut out = Vec::new();
            for dy in [-32.0, 0.0, 32.0] {
                let w = rng.gen_range(24.0..34.0);
                for s in [-1.0, 1.0] {
                    out.push(rect(Point::new(c.x + s * 32.0, c.y + dy), w, 12.0, 0.0));
                }
            }
            out
        }
        // Point towers on a jittered ring.
        1 => {
            let n = 7;
            (0..n)
                .map(|k| {
                    let a = std::f64::consts::TAU * (k as f64 + rng.gen_range(-0.15..0.15)) / n as f64;
                    let r = 38.0 + rng.gen_range(-3.0..3.0);
                    let s = rng.gen_range(13.0..19.0);
                    rect(Point::new(c.x + r * a.cos(), c.y + r * a.sin()), s, s * rng.gen_range(1.0..1.3), 0.0)
                })
                .collect()
        }
        // A row along the plot's long axis.
        2 => (0..5)
            .map(|k| {
                let x = c.x - 52.0 + 26.0 * k as f64;
                rect(Point::new(x, c.y + rng.gen_range(-1.0..1.0)), rng.gen_range(12.0..20.0), rng.gen_range(14.0..30.0), 0.0)
            })
            .collect(),
        // Equal-proportion slabs scattered irregularly.
        3 => {
            // Scales far enough apart that no two slabs are area-compatible mirror images.
            let spots = [(-45.0, 28.0), (5.0, 33.0), (40.0, 5.0), (-8.0, -6.0), (30.0, -35.0)];
            let mut scales = [0.65, 0.85, 1.1, 1.4, 1.8];
            scales.shuffle(rng);
            spots
                .iter()
                .zip(scales)
                .map(|(&(dx, dy), s)| rect(Point::new(c.x + dx, c.y + dy), 24.0 * s, 8.0 * s, rng.gen_range(0.0..60.0)))
                .collect()
        }
        // Irregular mix in a jittered 3 × 3 cell grid.
        4 => {
            let mut cells: Vec<(f64, f64)> = (0..9).map(|k| ((k % 3) as f64 - 1.0, (k / 3) as f64 - 1.0)).collect();
            cells.shuffle(rng);
            let n = rng.gen_range(5..=8);
            cells
                .into_iter()
                .take(n)
                .map(|(gx, gy)| {
                    let p = Point::new(c.x + gx * 44.0 + rng.gen_range(-5.0..5.0), c.y + gy * 34.0 + rng.gen_range(-4.0..4.0));
                    rect(p, rng.gen_range(10.0..32.0), rng.gen_range(8.0..22.0), rng.gen_range(0.0..90.0))
                })
                .collect()
        }
        // Courtyard block, two slabs joined by a corridor, a line-like slab and a kiosk.
        _ => {
            let court = Polygon::new(
                rect(Point::new(c.x - 38.0, c.y + 18.0), 44.0, 40.0, 0.0).exterior,
                vec![rect(Point::new(c.x - 38.0, c.y + 18.0), 24.0, 20.0, 0.0).exterior],
            );
            vec![
                court,
                rect(Point::new(c.x + 22.0, c.y + 22.0), 24.0, 14.0, 0.0),
                rect(Point::new(c.x + 22.0 + 12.0 + 8.0, c.y + 22.0), 16.0, 4.0, 0.0),
                rect(Point::new(c.x + 22.0 + 12.0 + 16.0 + 10.0, c.y + 22.0), 20.0, 16.0, 0.0),
                rect(Point::new(c.x, c.y - 36.0), 100.0, 9.0, 0.0),
                rect(Point::new(c.x + 50.0, c.y - 12.0), 6.0, 6.0, 0.0),
            ]
        }
    }
}

/// Generates the town. Identical seeds give identical output.
pub fn generate(seed: u64) -> Town {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ox, oy) = ORIGIN;
    let mut plots = Vec::new();
    let mut buildings = Vec::new();
    let mut worship_site = None;
    let mut bid = 0;
    for i in 0..COLS {
        for j in 0..ROWS {
            let k = i * ROWS + j;
            let x0 = ox + i as f64 * PITCH_X + STREET / 2.0;
            let y0 = oy + j as f64 * PITCH_Y + STREET / 2.0;
            let (w, h) = (PITCH_X - STREET, PITCH_Y - STREET);
            let park = k == 17;
            let land_use = if park { "PARK" } else { LAND_USES[(i + 2 * j) % LAND_USES.len()] };
            let name = format!("MP-{i}{j}");
            plots.push(json!({
                "type": "Feature",
                "properties": {"mp_name": name, "land_use": land_use, "subzone": SUBZONES[i / 2]},
                "geometry": polygon_geom(&Polygon::rect(x0, y0, x0 + w, y0 + h)),
            }));
            if park {
                continue;
            }
            let c = Point::new(x0 + w / 2.0, y0 + h / 2.0);
            let template = k % 6;
            let mut bs: Vec<Bldg> = layout(template, c, &mut rng)
                .into_iter()
                .map(|poly| {
                    let code = code_for(land_use, poly.area());
                    Bldg {
                        poly,
                        code: Some(code),
                        name: None,
                    }
                })
                .collect();
            if template == 5 {
                // The corridor is an annex of the slabs it joins.
                bs[2].code = Some(if bs[1].code == Some("B3") { "B3'" } else { "AB4'" });
            }
            if template == 2 && k.is_multiple_of(4) {
                bs.push(Bldg {
                    poly: rect(Point::new(c.x, c.y - 40.0), 14.0, 8.0, 0.0),
                    code: None,
                    name: Some("transport facility"),
                });
            }
            if template == 4 && worship_site.is_none() {
                let poly = rect(Point::new(c.x + 50.0, c.y + 40.0), 16.0, 12.0, 0.0);
                worship_site = Some(poly.centroid().expect("rectangle has a centroid"));
                bs.push(Bldg {
                    poly,
                    code: None,
                    name: Some("Religious building"),
                });
            }
            for b in bs {
                let id = format!("B{bid:04}");
                bid += 1;
                let mut props = serde_json::Map::new();
                props.insert("id".into(), json!(id));
                let code = b.code.unwrap_or("AB");
                let (lo, hi) = height_range(code);
                let height = r2(rng.gen_range(lo..hi));
                if rng.gen_bool(0.9) {
                    props.insert("height".into(), json!(height));
                }
                if rng.gen_bool(0.5) {
                    props.insert("floors".into(), json!(((height / 3.0).round() as u32).max(1)));
                }
                // A quarter of the coded buildings are left for the classifier.
                if let Some(code) = b.code {
                    if rng.gen_bool(0.75) {
                        props.insert("Building_Type_Code".into(), json!(code));
                    }
                }
                if let Some(name) = b.name {
                    props.insert("Building_Type".into(), json!(name));
                }
                buildings.push(json!({"type": "Feature", "properties": props, "geometry": polygon_geom(&b.poly)}));
            }
        }
    }

    let (w, h) = (COLS as f64 * PITCH_X, ROWS as f64 * PITCH_Y);
    let mut pois = Vec::new();
    for n in 0..80 {
        let cat = POI_CATEGORIES[n % POI_CATEGORIES.len()];
        let p = Point::new(ox + rng.gen_range(-200.0..w + 200.0), oy + rng.gen_range(-200.0..h + 200.0));
        let mut props = json!({"id": format!("P{n:03}"), "category": cat});
        if n % 3 == 0 {
            props["rating"] = json!(r2(rng.gen_range(3.0..5.0)));
        }
        pois.push(json!({"type": "Feature", "properties": props, "geometry": point_geom(p)}));
    }
    if let Some(site) = worship_site {
        pois.push(json!({
            "type": "Feature",
            "properties": {"id": "P-temple", "category": "Temple"},
            "geometry": point_geom(Point::new(site.x + 20.0, site.y + 8.0)),
        }));
    }

    let node = |i: usize, j: usize| Point::new(ox + i as f64 * PITCH_X, oy + j as f64 * PITCH_Y);
    let mut segments = Vec::new();
    for i in 0..=COLS {
        for j in 0..=ROWS {
            if i < COLS {
                segments.push((node(i, j), node(i + 1, j)));
            }
            if j < ROWS {
                segments.push((node(i, j), node(i, j + 1)));
            }
        }
    }
    let roads: Vec<Value> = segments
        .iter()
        .enumerate()
        .map(|(n, (a, b))| {
            json!({
                "type": "Feature",
                "properties": {"id": format!("R{n:03}")},
                "geometry": {"type": "LineString", "coordinates": [[r2(a.x), r2(a.y)], [r2(b.x), r2(b.y)]]},
            })
        })
        .collect();

    let mut transit = Vec::new();
    for (n, (a, b)) in segments.iter().enumerate().filter(|(n, _)| n % 3 == 0) {
        let m = Point::new((a.x + b.x) / 2.0 + 4.0, (a.y + b.y) / 2.0 + 4.0);
        transit.push(json!({"type": "Feature", "properties": {"id": format!("BS{n:03}"), "kind": "bus"}, "geometry": point_geom(m)}));
    }
    for (n, (i, j)) in [(2, 2), (5, 1)].into_iter().enumerate() {
        let p = node(i, j);
        transit.push(json!({
            "type": "Feature",
            "properties": {"id": format!("MRT{n}"), "kind": "mrt"},
            "geometry": point_geom(Point::new(p.x + 6.0, p.y - 6.0)),
        }));
    }

    Town {
        buildings: fc(buildings),
        plots: fc(plots),
        pois: fc(pois),
        roads: fc(roads),
        transit: fc(transit),
    }
}

/// Writes the five layers and a `town.toml` config into `dir`.
pub fn write_town(town: &Town, dir: &Path) -> Result<()> {
    for (name, v) in [
        ("buildings.geojson", &town.buildings),
        ("plots.geojson", &town.plots),
        ("pois.geojson", &town.pois),
        ("roads.geojson", &town.roads),
        ("transit.geojson", &town.transit),
    ] {
        write_json(&dir.join(name), v)?;
    }
    crate::pipeline::write_file(&dir.join("town.toml"), CONFIG_TOML.as_bytes())
}
