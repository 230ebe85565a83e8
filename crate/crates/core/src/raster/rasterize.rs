use super::{GeoTransform, MaskClass, RasterMask};
use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Point};
use crate::netgraph::RoadGraph;

/// Burn a road network into a `width × height` three-class mask.
///
/// Pixels whose centers lie within `road_width / 2` of a centerline are road;
/// edges carrying a `mean_width` use that width instead.
/// Road pixels within `contour_thickness` 8-steps of a non-road pixel become
/// contour, the rest interior. Pixels outside the raster count as road, so
/// roads leaving the frame have no contour at the border.
pub fn rasterize_network(
    network: &RoadGraph,
    transform: &GeoTransform,
    width: usize,
    height: usize,
    road_width: f64,
    contour_thickness: usize,
) -> Result<RasterMask> {
    transform.validate()?;
    if !(road_width > 0.0) || !road_width.is_finite() {
        return Err(Error::Parameter(format!("road width must be positive, got {road_width}")));
    }
    if network.edge_count() == 0 {
        return Err(Error::Parameter("cannot rasterize an empty network".into()));
    }
    let mut mask = RasterMask::new(width, height, *transform)?;
    let road = road_pixels(network, transform, width, height, road_width / 2.0);
    let ring = chessboard_to_background(&road, width, height);
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            if road[i] {
                let cls = if ring[i] <= contour_thickness {
                    MaskClass::Contour
                } else {
                    MaskClass::Interior
                };
                mask.set(c, r, cls);
            }
        }
    }
    Ok(mask)
}

fn road_pixels(g: &RoadGraph, t: &GeoTransform, w: usize, h: usize, half: f64) -> Vec<bool> {
    let mut road = vec![false; w * h];
    for (_, e) in g.edges() {
        let half = e.attrs.mean_width.map_or(half, |w| w / 2.0);
        for (a, b) in e.geometry.segments() {
            let (c0, c1, r0, r1) = pixel_bbox(t, a, b, half, w, h);
            for r in r0..r1 {
                for c in c0..c1 {
                    let i = r * w + c;
                    if !road[i] && point_segment_distance(t.pixel_center(c, r), a, b) <= half {
                        road[i] = true;
                    }
                }
            }
        }
    }
    road
}

/// Pixel index range (half-open) covering the segment's `half`-buffer.
fn pixel_bbox(t: &GeoTransform, a: Point, b: Point, half: f64, w: usize, h: usize) -> (usize, usize, usize, usize) {
    let mut cmin = f64::INFINITY;
    let mut cmax = f64::NEG_INFINITY;
    let mut rmin = f64::INFINITY;
    let mut rmax = f64::NEG_INFINITY;
    for p in [a, b] {
        for (dx, dy) in [(-half, -half), (-half, half), (half, -half), (half, half)] {
            let (c, r) = t.invert(Point::new(p.x + dx, p.y + dy));
            cmin = cmin.min(c);
            cmax = cmax.max(c);
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
    }
    let clamp = |v: f64, hi: usize| -> usize { v.max(0.0).min(hi as f64) as usize };
    (
        clamp(cmin.floor() - 1.0, w),
        clamp(cmax.ceil() + 1.0, w),
        clamp(rmin.floor() - 1.0, h),
        clamp(rmax.ceil() + 1.0, h),
    )
}

/// Chessboard distance to the nearest `false` pixel (0 on background); pixels
/// beyond the border are foreground.
fn chessboard_to_background(fg: &[bool], w: usize, h: usize) -> Vec<usize> {
    const BIG: usize = usize::MAX / 4;
    let mut d: Vec<usize> = fg.iter().map(|&f| if f { BIG } else { 0 }).collect();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if d[i] == 0 {
                continue;
            }
            let mut best = d[i];
            for (dc, dr) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0)] {
                let (cc, rr) = (c as i64 + dc, r as i64 + dr);
                if cc >= 0 && rr >= 0 && (cc as usize) < w {
                    best = best.min(d[rr as usize * w + cc as usize] + 1);
                }
            }
            d[i] = best;
        }
    }
    for r in (0..h).rev() {
        for c in (0..w).rev() {
            let i = r * w + c;
            if d[i] == 0 {
                continue;
            }
            let mut best = d[i];
            for (dc, dr) in [(1i64, 1i64), (0, 1), (-1, 1), (1, 0)] {
                let (cc, rr) = (c as i64 + dc, r as i64 + dr);
                if cc >= 0 && (rr as usize) < h && (cc as usize) < w {
                    best = best.min(d[rr as usize * w + cc as usize] + 1);
                }
            }
            d[i] = best;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::test_util::graph_from_lines;
    use crate::raster::Grid;

    /// Per-pixel oracle: distance of every pixel center to every segment.
    fn brute_road(g: &RoadGraph, t: &GeoTransform, w: usize, h: usize, half: f64) -> Vec<bool> {
        let mut out = vec![false; w * h];
        for r in 0..h {
            for c in 0..w {
                let p = t.pixel_center(c, r);
                out[r * w + c] = g.edges().any(|(_, e)| e.geometry.distance_to_point(p) <= half);
            }
        }
        out
    }

    fn brute_contour(road: &[bool], w: usize, h: usize, k: i64) -> Vec<bool> {
        (0..w * h)
            .map(|i| {
                let (c, r) = ((i % w) as i64, (i / w) as i64);
                road[i]
                    && (-k..=k).any(|dr| {
                        (-k..=k).any(|dc| {
                            let (cc, rr) = (c + dc, r + dr);
                            cc >= 0 && rr >= 0 && cc < w as i64 && rr < h as i64 && !road[(rr * w as i64 + cc) as usize]
                        })
                    })
            })
            .collect()
    }

    #[test]
    fn single_road_counts() {
        // Raster covers [-5, 25] × [-10, 10] at 0.5 m.
        let t = GeoTransform::north_up(-5.0, 10.0, 0.5);
        let g = graph_from_lines(&[&[(0.0, 0.0), (20.0, 0.0)]]);
        let m = rasterize_network(&g, &t, 60, 40, 6.0, 1).unwrap();
        let road = brute_road(&g, &t, 60, 40, 3.0);
        let contour = brute_contour(&road, 60, 40, 1);
        let want_interior = road.iter().zip(&contour).filter(|(r, c)| **r && !**c).count();
        assert_eq!(m.count(MaskClass::Interior), want_interior);
        assert_eq!(m.count(MaskClass::Contour), contour.iter().filter(|&&c| c).count());
        // Rectangle estimate: 40 × 12 px minus the ring (rounded caps add a little).
        let rect = 40.0 * 12.0 - 2.0 * (40.0 + 12.0 - 2.0);
        let got = m.count(MaskClass::Interior) as f64;
        assert!(got >= rect * 0.97, "{got} vs {rect}");
    }

    #[test]
    fn network_outside_raster() {
        let t = GeoTransform::north_up(0.0, 10.0, 0.5);
        let g = graph_from_lines(&[&[(100.0, 100.0), (120.0, 100.0)]]);
        let m = rasterize_network(&g, &t, 20, 20, 6.0, 1).unwrap();
        assert_eq!(m.count(MaskClass::Other), 400);
    }

    #[test]
    fn crossing_roads_union() {
        let t = GeoTransform::north_up(-15.0, 15.0, 0.5);
        let g = graph_from_lines(&[
            &[(-10.0, 0.0), (0.0, 0.0)],
            &[(0.0, 0.0), (10.0, 0.0)],
            &[(0.0, -10.0), (0.0, 0.0)],
            &[(0.0, 0.0), (0.0, 10.0)],
        ]);
        let (w, h) = (60, 60);
        let m = rasterize_network(&g, &t, w, h, 6.0, 1).unwrap();
        let road = brute_road(&g, &t, w, h, 3.0);
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                assert_eq!(road[i], m.get(c, r) != MaskClass::Other);
                if m.get(c, r) == MaskClass::Contour {
                    // Contour pixels touch the outside of the union.
                    let touches = (-1i64..=1).any(|dr| (-1i64..=1).any(|dc| {
                        let (cc, rr) = (c as i64 + dc, r as i64 + dr);
                        cc >= 0 && rr >= 0 && cc < w as i64 && rr < h as i64 && !road[rr as usize * w + cc as usize]
                    }));
                    assert!(touches);
                }
            }
        }
        assert_eq!(m.get(30, 30), MaskClass::Interior);
    }

    #[test]
    fn thick_contour_matches_oracle() {
        let t = GeoTransform::north_up(-2.0, 8.0, 0.5);
        let g = graph_from_lines(&[&[(0.0, 0.0), (10.0, 3.0), (14.0, 0.0)]]);
        let (w, h) = (40, 32);
        let m = rasterize_network(&g, &t, w, h, 7.0, 2).unwrap();
        let road = brute_road(&g, &t, w, h, 3.5);
        let contour = brute_contour(&road, w, h, 2);
        for i in 0..w * h {
            let want = if contour[i] {
                MaskClass::Contour
            } else if road[i] {
                MaskClass::Interior
            } else {
                MaskClass::Other
            };
            assert_eq!(m.labels()[i], want, "pixel {i}");
        }
        assert_eq!(m.width(), w);
    }

    #[test]
    fn guards() {
        let t = GeoTransform::north_up(0.0, 0.0, 0.5);
        let g = graph_from_lines(&[&[(0.0, 0.0), (1.0, 0.0)]]);
        assert!(rasterize_network(&g, &t, 4, 4, 0.0, 1).is_err());
        assert!(rasterize_network(&RoadGraph::new(), &t, 4, 4, 6.0, 1).is_err());
        let mut bad = t;
        bad.pixel_height = 0.0;
        assert!(rasterize_network(&g, &bad, 4, 4, 6.0, 1).is_err());
    }
}
