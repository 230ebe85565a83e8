use crate::error::Result;
use crate::geom::{offset_polyline, Polyline};
use crate::netgraph::{Provenance, RoadGraph};
use crate::raster::{distance_to_background, Grid, RasterMask};

/// Measure each edge's mean road width on `mask` and flag edges wider than
/// `width_min` (meters) as double lanes.
///
/// Width is twice the mean distance from centerline samples to the nearest
/// non-interior pixel boundary. Edges with no sample inside the raster are
/// left unmeasured.
pub fn flag_double_lanes(g: &mut RoadGraph, mask: &RasterMask, width_min: f64) {
    let (w, h) = (mask.width(), mask.height());
    let dist = distance_to_background(&mask.interior_bits(), w, h);
    let px = mask.transform.pixel_size();
    for id in g.edge_ids() {
        let samples = g.edge(id).expect("listed edge").geometry.densify(px);
        let mut sum = 0.0;
        let mut n = 0usize;
        for p in samples {
            let (c, r) = mask.transform.invert(p);
            let (c, r) = (c.floor(), r.floor());
            if c < 0.0 || r < 0.0 || c >= w as f64 || r >= h as f64 {
                continue;
            }
            let d = dist[r as usize * w + c as usize];
            if d.is_finite() {
                sum += (d - 0.5).max(0.0);
                n += 1;
            }
        }
        let attrs = g.edge_mut_attrs(id).expect("listed edge");
        if n == 0 {
            attrs.mean_width = None;
            attrs.double_lane = false;
            continue;
        }
        let width = 2.0 * sum / n as f64 * px;
        attrs.mean_width = Some(width);
        attrs.double_lane = width > width_min;
    }
}

/// Replace every double-lane edge by two parallel copies at `±lane_offset`
/// (default: a quarter of the edge's mean width). Both copies run between
/// the original end nodes. Edges whose offset fails are kept as they are.
pub fn duplicate_double_lanes(g: &RoadGraph, lane_offset: Option<f64>) -> Result<RoadGraph> {
    let mut out = g.clone();
    for (id, e) in g.edges().filter(|(_, e)| e.attrs.double_lane) {
        let Some(off) = lane_offset.or(e.attrs.mean_width.map(|w| w / 4.0)) else {
            log::warn!("double-lane edge {id} has no width; left as is");
            continue;
        };
        if e.is_self_loop() {
            log::warn!("double-lane edge {id} is a self-loop; left as is");
            continue;
        }
        let sides = [off, -off].map(|d| {
            offset_polyline(&e.geometry, d).and_then(|o| {
                let mut v = Vec::with_capacity(o.len() + 2);
                v.push(e.geometry.first());
                v.extend_from_slice(o.vertices());
                v.push(e.geometry.last());
                Polyline::from_points_dedup(v)
            })
        });
        match sides {
            [Ok(left), Ok(right)] => {
                let mut attrs = e.attrs.clone();
                attrs.provenance = Provenance::LaneDuplicate;
                let mut trial = out.clone();
                trial.remove_edge(id);
                let added = trial
                    .add_edge(e.a, e.b, left, attrs.clone())
                    .and_then(|_| trial.add_edge(e.a, e.b, right, attrs));
                match added {
                    Ok(_) => out = trial,
                    Err(err) => log::warn!("double-lane edge {id} not duplicated: {err}"),
                }
            }
            [Err(err), _] | [_, Err(err)] => {
                log::warn!("double-lane edge {id} not duplicated: {err}");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::hausdorff_distance;
    use crate::netgraph::test_util::graph_from_lines;
    use crate::raster::{GeoTransform, MaskClass};

    fn flagged(pts: &[(f64, f64)]) -> RoadGraph {
        let mut g = graph_from_lines(&[pts]);
        for id in g.edge_ids() {
            g.edge_mut_attrs(id).unwrap().double_lane = true;
        }
        g
    }

    #[test]
    fn straight_edge_split_in_two() {
        let g = flagged(&[(0.0, 0.0), (100.0, 0.0)]);
        let out = duplicate_double_lanes(&g, Some(3.5)).unwrap();
        out.validate().unwrap();
        assert_eq!(out.edge_count(), 2);
        let mut ys: Vec<f64> = out
            .edges()
            .map(|(_, e)| {
                assert_eq!(e.attrs.provenance, Provenance::LaneDuplicate);
                let inner = &e.geometry.vertices()[1..e.geometry.len() - 1];
                assert!(inner.iter().all(|p| (p.y - inner[0].y).abs() < 1e-12));
                inner[0].y
            })
            .collect();
        ys.sort_by(f64::total_cmp);
        assert_eq!(ys, vec![-3.5, 3.5]);
    }

    #[test]
    fn unflagged_edge_unchanged() {
        let g = graph_from_lines(&[&[(0.0, 0.0), (100.0, 0.0)]]);
        assert_eq!(duplicate_double_lanes(&g, Some(3.5)).unwrap(), g);
    }

    /// Oracle: dense sampling against the offset portion of each duplicate.
    #[test]
    fn s_curve_duplicates_at_offset() {
        let pts: Vec<(f64, f64)> = (0..=100)
            .map(|k| {
                let x = k as f64 * 2.0;
                (x, 20.0 * (x * std::f64::consts::TAU / 200.0).sin())
            })
            .collect();
        let g = flagged(&pts);
        let src = g.edges().next().unwrap().1.geometry.clone();
        let out = duplicate_double_lanes(&g, Some(3.5)).unwrap();
        out.validate().unwrap();
        assert_eq!(out.edge_count(), 2);
        for (_, e) in out.edges() {
            let v = e.geometry.vertices();
            let inner = Polyline::new(v[1..v.len() - 1].to_vec()).unwrap();
            let d = hausdorff_distance(&inner, &src, 0.05).unwrap();
            assert!((d - 3.5).abs() <= 0.2, "hausdorff {d}");
        }
    }

    #[test]
    fn offset_failure_leaves_edge() {
        let g = flagged(&[(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(duplicate_double_lanes(&g, Some(3.5)).unwrap(), g);
    }

    fn band_mask(rows: std::ops::Range<usize>) -> RasterMask {
        let (w, h) = (80, 60);
        let mut m = RasterMask::new(w, h, GeoTransform::north_up(0.0, 30.0, 0.5)).unwrap();
        for r in rows {
            for c in 0..w {
                m.set(c, r, MaskClass::Interior);
            }
        }
        m
    }

    #[test]
    fn width_measured_from_mask() {
        // Interior rows 20..40 at 0.5 m: a 10 m band centered on y = 15.
        let m = band_mask(20..40);
        let mut g = graph_from_lines(&[&[(5.0, 15.0), (35.0, 15.0)]]);
        flag_double_lanes(&mut g, &m, 8.0);
        let e = g.edges().next().unwrap().1;
        let w = e.attrs.mean_width.unwrap();
        assert!((w - 10.0).abs() <= 0.5, "width {w}");
        assert!(e.attrs.double_lane);
        flag_double_lanes(&mut g, &m, 12.0);
        assert!(!g.edges().next().unwrap().1.attrs.double_lane);
    }

    #[test]
    fn edge_outside_raster_unmeasured() {
        let m = band_mask(20..40);
        let mut g = graph_from_lines(&[&[(500.0, 15.0), (535.0, 15.0)]]);
        flag_double_lanes(&mut g, &m, 8.0);
        let e = g.edges().next().unwrap().1;
        assert_eq!(e.attrs.mean_width, None);
        assert!(!e.attrs.double_lane);
    }
}
