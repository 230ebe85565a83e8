use std::ffi::{CStr, CString};
use std::ptr;

use roadnet_ffi::*;

fn last_error() -> String {
    let p = roadnet_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// 100×40 px at 0.5 m with a horizontal road band across the middle.
fn band_mask() -> *mut RoadnetMask {
    let (w, h) = (100usize, 40usize);
    let mut labels = vec![0u8; w * h];
    for r in 14..26 {
        for c in 10..90 {
            let edge = r == 14 || r == 25 || c == 10 || c == 89;
            labels[r * w + c] = if edge { 2 } else { 1 };
        }
    }
    let t = [0.5, 0.0, 0.0, -0.5, 0.25, 19.75];
    let mut m = ptr::null_mut();
    let s = unsafe { roadnet_mask_new(w, h, labels.as_ptr(), t.as_ptr(), &mut m) };
    assert_eq!(s, RoadnetStatus::Ok);
    m
}

#[test]
fn reconstruct_band() {
    let m = band_mask();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { roadnet_reconstruct(m, ptr::null(), &mut g) }, RoadnetStatus::Ok);
    unsafe {
        assert_eq!(roadnet_graph_edge_count(g), 1);
        assert_eq!(roadnet_graph_node_count(g), 2);
        let len = roadnet_graph_total_length(g);
        assert!(len > 30.0 && len < 40.0, "{len}");
        roadnet_graph_free(g);
        roadnet_mask_free(m);
    }
}

#[test]
fn geojson_round_trip_and_self_eval() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(roadnet_synth(3, ptr::null(), ptr::null_mut(), &mut g), RoadnetStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(roadnet_graph_to_geojson(g, &mut text), RoadnetStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(roadnet_graph_from_geojson(text, &mut back), RoadnetStatus::Ok);
        assert_eq!(roadnet_graph_edge_count(back), roadnet_graph_edge_count(g));
        let mut again = ptr::null_mut();
        roadnet_graph_to_geojson(back, &mut again);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));

        let mut s = std::mem::zeroed::<RoadnetEvalSummary>();
        assert_eq!(roadnet_evaluate(back, g, 0.0, &mut s), RoadnetStatus::Ok);
        assert_eq!((s.precision, s.recall, s.f1, s.avg_hausdorff), (1.0, 1.0, 1.0, 0.0));
        assert_eq!(s.false_positives + s.false_negatives, 0);
        assert_eq!(s.true_positives, roadnet_graph_edge_count(g));

        roadnet_string_free(text);
        roadnet_string_free(again);
        roadnet_graph_free(back);
        roadnet_graph_free(g);
    }
}

#[test]
fn synth_then_reconstruct_with_config() {
    let json = CString::new(r#"{"synth": {"blocks_x": 2, "blocks_y": 2, "margin": 20}}"#).unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(roadnet_config_from_json(json.as_ptr(), &mut cfg), RoadnetStatus::Ok);
        let (mut m, mut truth, mut pred) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(roadnet_synth(9, cfg, &mut m, &mut truth), RoadnetStatus::Ok);
        assert_eq!(roadnet_reconstruct(m, cfg, &mut pred), RoadnetStatus::Ok);
        let mut s = std::mem::zeroed::<RoadnetEvalSummary>();
        assert_eq!(roadnet_evaluate(pred, truth, 2.0, &mut s), RoadnetStatus::Ok);
        assert!(s.precision >= 0.9 && s.recall >= 0.85, "{s:?}");
        roadnet_graph_free(pred);
        roadnet_graph_free(truth);
        roadnet_mask_free(m);
        roadnet_config_free(cfg);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(roadnet_graph_from_geojson(ptr::null(), &mut g), RoadnetStatus::NullArgument);
        let poly = CString::new(r#"{"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Polygon","coordinates":[]}}]}"#).unwrap();
        assert_eq!(roadnet_graph_from_geojson(poly.as_ptr(), &mut g), RoadnetStatus::Input);
        assert!(last_error().contains("Polygon"), "{}", last_error());
        assert!(g.is_null());

        let mut cfg = ptr::null_mut();
        let bad = CString::new(r#"{"junction": {"reach": 0}}"#).unwrap();
        assert_eq!(roadnet_config_from_json(bad.as_ptr(), &mut cfg), RoadnetStatus::Config);
        let typo = CString::new(r#"{"simplfy": {}}"#).unwrap();
        assert_eq!(roadnet_config_from_json(typo.as_ptr(), &mut cfg), RoadnetStatus::Config);
        assert!(cfg.is_null());

        let labels = [0u8, 1, 7, 0];
        let t = [1.0, 0.0, 0.0, -1.0, 0.5, 1.5];
        let mut m = ptr::null_mut();
        assert_eq!(roadnet_mask_new(2, 2, labels.as_ptr(), t.as_ptr(), &mut m), RoadnetStatus::Input);
        assert!(last_error().contains("(0, 1)"), "{}", last_error());
        let flat = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(roadnet_mask_new(2, 2, [0u8; 4].as_ptr(), flat.as_ptr(), &mut m), RoadnetStatus::InvalidArgument);

        let missing = CString::new("/nonexistent/mask.png").unwrap();
        assert_eq!(roadnet_mask_load(missing.as_ptr(), missing.as_ptr(), &mut m), RoadnetStatus::Input);
        assert!(m.is_null());

        assert_eq!(roadnet_reconstruct(ptr::null(), ptr::null(), &mut g), RoadnetStatus::NullArgument);
        assert_eq!(roadnet_graph_edge_count(ptr::null()), 0);
        roadnet_graph_free(ptr::null_mut());
        roadnet_string_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut g = ptr::null_mut();
        roadnet_graph_from_geojson(ptr::null(), &mut g);
        assert!(!roadnet_last_error().is_null());
        let mut cfg = ptr::null_mut();
        assert_eq!(roadnet_config_from_json(ptr::null(), &mut cfg), RoadnetStatus::Ok);
        assert!(roadnet_last_error().is_null());
        roadnet_config_free(cfg);
    }
    let v = unsafe { CStr::from_ptr(roadnet_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
