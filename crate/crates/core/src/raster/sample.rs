use super::Grid;
use crate::geom::Polygon;

/// `(col, row)` of every pixel whose center lies inside `polygon` (even-odd
/// rule over all rings), in row-major order. Empty when nothing overlaps.
pub fn sample_window<G: Grid + ?Sized>(raster: &G, polygon: &Polygon) -> Vec<(usize, usize)> {
    let t = raster.transform();
    let (w, h) = (raster.width(), raster.height());
    let bb = polygon.bbox();
    let mut cmin = f64::INFINITY;
    let mut cmax = f64::NEG_INFINITY;
    let mut rmin = f64::INFINITY;
    let mut rmax = f64::NEG_INFINITY;
    for p in [bb.min, bb.max, crate::geom::Point::new(bb.min.x, bb.max.y), crate::geom::Point::new(bb.max.x, bb.min.y)] {
        let (c, r) = t.invert(p);
        cmin = cmin.min(c);
        cmax = cmax.max(c);
        rmin = rmin.min(r);
        rmax = rmax.max(r);
    }
    let lo = |v: f64, n: usize| (v.floor() - 1.0).max(0.0).min(n as f64) as usize;
    let hi = |v: f64, n: usize| (v.ceil() + 1.0).max(0.0).min(n as f64) as usize;
    let mut out = Vec::new();
    for r in lo(rmin, h)..hi(rmax, h) {
        for c in lo(cmin, w)..hi(cmax, w) {
            if polygon.contains(t.pixel_center(c, r)) {
                out.push((c, r));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::raster::{GeoTransform, RasterMask};
    use proptest::prelude::*;

    fn mask() -> RasterMask {
        RasterMask::new(30, 20, GeoTransform::north_up(0.0, 10.0, 0.5)).unwrap()
    }

    #[test]
    fn single_center() {
        let m = mask();
        let c = m.transform.pixel_center(4, 3);
        let poly = Polygon::rect(Point::new(c.x - 0.1, c.y - 0.1), Point::new(c.x + 0.1, c.y + 0.1));
        assert_eq!(sample_window(&m, &poly), vec![(4, 3)]);
    }

    #[test]
    fn outside_is_empty() {
        let poly = Polygon::rect(Point::new(100.0, 100.0), Point::new(110.0, 110.0));
        assert!(sample_window(&mask(), &poly).is_empty());
    }

    #[test]
    fn ten_by_ten_block() {
        // Pixel boundaries at multiples of 0.5 m: columns 2..12, rows 4..14.
        let poly = Polygon::rect(Point::new(1.0, 10.0 - 7.0), Point::new(6.0, 10.0 - 2.0));
        assert_eq!(sample_window(&mask(), &poly).len(), 100);
    }

    proptest! {
        #[test]
        fn matches_brute_force(pts in prop::collection::vec((-2.0f64..17.0, -2.0f64..12.0), 3..8)) {
            let ring: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            let Ok(poly) = Polygon::new(ring, vec![]) else { return Ok(()); };
            let m = mask();
            let mut brute = Vec::new();
            for r in 0..20 {
                for c in 0..30 {
                    if poly.contains(m.transform.pixel_center(c, r)) {
                        brute.push((c, r));
                    }
                }
            }
            prop_assert_eq!(sample_window(&m, &poly), brute);
        }
    }
}
