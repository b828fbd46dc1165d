use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use spli_core::config::Crs;
use spli_core::geojson::{buildings_collection, parse_buildings, parse_plots, plots_collection};
use spli_core::geom::{point_in_polygon, BBox, MultiPolygon, Point, Polygon};
use spli_core::index::SpatialIndex;
use spli_core::join::assign_buildings_to_plots;
use spli_core::model::{AccessCounts, Dataset};
use spli_core::{BuildingRecord, Exec, FormType, LayoutPattern, PlotRecord};

fn square(x: f64, y: f64, s: f64) -> Value {
    json!({"type": "Polygon", "coordinates": [[[x, y], [x + s, y], [x + s, y + s], [x, y + s], [x, y]]]})
}

fn fc(features: Vec<Value>) -> Value {
    json!({"type": "FeatureCollection", "features": features})
}

#[test]
fn degenerate_ring_is_rejected_not_fatal() {
    let layer = fc(vec![
        json!({"type": "Feature", "properties": {"id": "a"}, "geometry": square(0.0, 0.0, 10.0)}),
        json!({"type": "Feature", "properties": {"id": "b"}, "geometry": square(20.0, 0.0, 10.0)}),
        json!({"type": "Feature", "properties": {"id": "c"},
               "geometry": {"type": "Polygon", "coordinates": [[[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]]}}),
    ]);
    let (bs, rej) = parse_buildings(&layer, Crs::Projected).unwrap();
    assert_eq!(bs.len(), 2);
    assert_eq!(rej.len(), 1);
    assert_eq!(rej[0].id.as_deref(), Some("c"));
}

#[test]
fn empty_collection_and_height_only() {
    let (bs, rej) = parse_buildings(&fc(vec![]), Crs::Projected).unwrap();
    assert!(bs.is_empty() && rej.is_empty());
    let layer = fc(vec![json!({"type": "Feature", "properties": {"id": "h", "height": 3}, "geometry": square(0.0, 0.0, 10.0)})]);
    let (bs, _) = parse_buildings(&layer, Crs::Projected).unwrap();
    assert_eq!(bs[0].height, Some(3.0));
    assert_eq!(bs[0].num_floors, None);
}

#[test]
fn wgs84_input_is_projected() {
    let d = 0.0005;
    let geom = json!({"type": "Polygon", "coordinates": [[[103.8, 1.3], [103.8 + d, 1.3], [103.8 + d, 1.3 + d], [103.8, 1.3 + d], [103.8, 1.3]]]});
    let layer = fc(vec![json!({"type": "Feature", "properties": {"id": "w"}, "geometry": geom})]);
    let (bs, rej) = parse_buildings(&layer, Crs::Wgs84).unwrap();
    assert!(rej.is_empty());
    // About 55 m on a side near the equator.
    assert!((bs[0].foot_area - 55.3 * 55.3).abs() < 40.0, "{}", bs[0].foot_area);
    let c = bs[0].geometry.centroid().unwrap();
    assert!(c.x > 20_000.0 && c.x < 40_000.0 && c.y > 25_000.0 && c.y < 40_000.0);
}

fn enriched() -> Dataset {
    let mut b = BuildingRecord::new("b1", MultiPolygon::single(Polygon::rect(1.0, 2.0, 21.0, 12.0)));
    b.height = Some(12.5);
    b.num_floors = Some(4);
    b.orientation = Some(90.0);
    b.form_type = Some(FormType::Slab);
    b.plot_id = Some("P1".into());
    b.level1 = Some("Residential buildings".into());
    b.level2 = Some("Flats".into());
    b.level2_code = Some("B3".into());
    b.confidence = Some(0.875);
    b.ci = Some(3.25);
    b.extra.insert("source".into(), json!("survey"));
    let mut hole = BuildingRecord::new(
        "b2",
        MultiPolygon(vec![
            Polygon::new(
                Polygon::rect(30.0, 0.0, 60.0, 30.0).exterior,
                vec![Polygon::rect(40.0, 10.0, 50.0, 20.0).exterior],
            ),
            Polygon::rect(70.0, 0.0, 80.0, 10.0),
        ]),
    );
    hole.form_type = Some(FormType::EnclosedForm);
    let mut p = PlotRecord::new("P1", "RESIDENTIAL", "Queenstown", MultiPolygon::single(Polygon::rect(0.0, 0.0, 100.0, 50.0)));
    p.layout_pattern = Some(Some(LayoutPattern::Flexible));
    p.functional_ratios = Some(BTreeMap::from([("B3".to_string(), 0.7), ("unclassified".to_string(), 0.3)]));
    p.si = Some(0.42);
    p.pta = Some(0.5);
    p.ci = Some(3.25);
    p.access_counts = Some(AccessCounts {
        bus_in_buffer: 2,
        bus_accessible: 1,
        mrt_in_buffer: 0,
        mrt_accessible: 0,
    });
    p.far = Some(1.2);
    p.bcr = Some(0.3);
    p.bcr_outlier = Some(false);
    p.floors_estimated = Some(1);
    let mut empty = PlotRecord::new("P2", "PARK", "Queenstown", MultiPolygon::single(Polygon::rect(0.0, 60.0, 10.0, 70.0)));
    empty.layout_pattern = Some(None);
    Dataset {
        buildings: vec![b, hole],
        plots: vec![p, empty],
        ..Default::default()
    }
}

#[test]
fn enriched_round_trip_is_stable() {
    let ds = enriched();
    let bjson = serde_json::to_string(&buildings_collection(&ds.buildings, None)).unwrap();
    let pjson = serde_json::to_string(&plots_collection(&ds.plots, None)).unwrap();
    let (bs, rej) = parse_buildings(&serde_json::from_str(&bjson).unwrap(), Crs::Projected).unwrap();
    assert!(rej.is_empty());
    assert_eq!(bs, ds.buildings);
    let (ps, rej) = parse_plots(&serde_json::from_str(&pjson).unwrap(), Crs::Projected).unwrap();
    assert!(rej.is_empty());
    assert_eq!(ps, ds.plots);
    let again = serde_json::to_string(&buildings_collection(&bs, None)).unwrap();
    assert_eq!(again, bjson);
}

#[test]
fn join_matches_brute_force_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut plots = Vec::new();
    for i in 0..6 {
        for j in 0..5 {
            let (x, y) = (i as f64 * 100.0, j as f64 * 80.0);
            let w = if (i + j) % 3 == 0 { 50.0 } else { 100.0 };
            plots.push(PlotRecord::new(
                format!("P{i}-{j}"),
                "R",
                "Z",
                MultiPolygon::single(Polygon::rect(x, y, x + w, y + 80.0)),
            ));
        }
    }
    let mut buildings = Vec::new();
    for k in 0..400 {
        let (x, y): (f64, f64) = (rng.gen_range(-50.0..650.0), rng.gen_range(-50.0..450.0));
        // Snap a quarter of them onto grid lines to exercise boundary ties.
        let x = if k % 4 == 0 { (x / 50.0).round() * 50.0 - 2.0 } else { x };
        buildings.push(BuildingRecord::new(format!("b{k}"), MultiPolygon::single(Polygon::rect(x, y, x + 4.0, y + 4.0))));
    }
    let mut ds = Dataset {
        buildings,
        plots,
        ..Default::default()
    };
    assign_buildings_to_plots(&mut ds, Exec::default());
    for b in &ds.buildings {
        let c = b.geometry.centroid().unwrap();
        let expected = ds
            .plots
            .iter()
            .enumerate()
            .filter(|(_, p)| p.geometry.parts().iter().any(|part| point_in_polygon(c, part).covers()))
            .min_by(|a, b| a.1.plot_area.total_cmp(&b.1.plot_area).then(a.0.cmp(&b.0)))
            .map(|(_, p)| p.mp_name.clone());
        assert_eq!(b.plot_id, expected, "building {}", b.id);
    }
    let mut seq = ds.clone();
    assign_buildings_to_plots(&mut seq, Exec::Sequential);
    assert_eq!(seq, ds);
}

#[test]
fn index_query_is_superset_of_exact_hits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let polys: Vec<Polygon> = (0..300)
        .map(|_| {
            let (x, y) = (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
            Polygon::rect(x, y, x + rng.gen_range(1.0..40.0), y + rng.gen_range(1.0..40.0))
        })
        .collect();
    let index = SpatialIndex::from_boxes(polys.iter().map(Polygon::bbox));
    for _ in 0..100 {
        let p = Point::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
        let q = BBox::around(p, rng.gen_range(0.0..80.0));
        let got = index.query(&q);
        let brute: Vec<usize> = (0..polys.len()).filter(|&i| polys[i].bbox().intersects(&q)).collect();
        assert_eq!(got, brute);
        let exact: Vec<usize> = got.iter().copied().filter(|&i| point_in_polygon(p, &polys[i]).covers()).collect();
        let exact_brute: Vec<usize> = (0..polys.len()).filter(|&i| point_in_polygon(p, &polys[i]).covers()).collect();
        assert_eq!(exact, exact_brute);
    }
}
