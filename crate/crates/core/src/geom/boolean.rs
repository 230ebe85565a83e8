//! Polygon boolean operations.
//!
//! Overlay itself is delegated to `geo`'s `BooleanOps` (an `i_overlay` sweep over
//! edge intersections). Inputs are snapped to a 1e-7 m grid first so nearly
//! coincident vertices from independent buffers resolve identically.

use geo::{Area, BooleanOps};

use super::{Point, Polygon};
use crate::error::{Error, Result};

const SNAP: f64 = 1e-7;

fn snap(v: f64) -> f64 {
    (v / SNAP).round() * SNAP
}

fn validate(set: &[Polygon]) -> Result<()> {
    for (i, poly) in set.iter().enumerate() {
        for ring in poly.rings() {
            if ring.len() < 4 {
                return Err(Error::Geometry(format!(
                    "polygon {i}: ring has fewer than 3 distinct vertices"
                )));
            }
            if ring.first() != ring.last() {
                return Err(Error::Geometry(format!("polygon {i}: ring is not closed")));
            }
            if ring.iter().any(|p| !p.is_finite()) {
                return Err(Error::Geometry(format!("polygon {i}: non-finite vertex")));
            }
        }
    }
    Ok(())
}

fn to_ring(r: &[Point]) -> geo::LineString<f64> {
    let mut coords: Vec<geo::Coord<f64>> = r
        .iter()
        .map(|p| geo::coord! { x: snap(p.x), y: snap(p.y) })
        .collect();
    coords.dedup();
    geo::LineString::new(coords)
}

fn to_geo(poly: &Polygon) -> geo::Polygon<f64> {
    geo::Polygon::new(
        to_ring(&poly.exterior),
        poly.interiors.iter().map(|r| to_ring(r)).collect(),
    )
}

fn from_geo(mp: geo::MultiPolygon<f64>) -> Vec<Polygon> {
    let conv = |ls: &geo::LineString<f64>| -> Vec<Point> {
        ls.coords().map(|c| Point::new(c.x, c.y)).collect()
    };
    mp.0.iter()
        .filter_map(|p| {
            Polygon::new(
                conv(p.exterior()),
                p.interiors().iter().map(conv).collect(),
            )
            .ok()
        })
        .collect()
}

fn dissolve(set: &[Polygon]) -> geo::MultiPolygon<f64> {
    let polys: Vec<geo::Polygon<f64>> = set.iter().map(to_geo).collect();
    geo::unary_union(&polys)
}

/// Union of a polygon set as non-overlapping polygons.
pub fn polygon_union(set: &[Polygon]) -> Result<Vec<Polygon>> {
    validate(set)?;
    Ok(from_geo(dissolve(set)))
}

/// Area covered by a polygon set; overlaps are counted once.
pub fn polygon_area(set: &[Polygon]) -> Result<f64> {
    validate(set)?;
    Ok(dissolve(set).unsigned_area())
}

/// Area of `union(a) ∩ union(b)`.
pub fn polygon_intersection_area(a: &[Polygon], b: &[Polygon]) -> Result<f64> {
    validate(a)?;
    validate(b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let ua = dissolve(a);
    let ub = dissolve(b);
    Ok(ua.intersection(&ub).unsigned_area().max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64) -> Polygon {
        Polygon::rect(Point::new(x, y), Point::new(x + s, y + s))
    }

    #[test]
    fn identical_squares() {
        let a = [square(0.0, 0.0, 1.0)];
        let v = polygon_intersection_area(&a, &a).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_squares() {
        let v = polygon_intersection_area(&[square(0.0, 0.0, 1.0)], &[square(5.0, 5.0, 1.0)])
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn half_overlap() {
        let v = polygon_intersection_area(&[square(0.0, 0.0, 1.0)], &[square(0.5, 0.0, 1.0)])
            .unwrap();
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn overlapping_members_counted_once() {
        let set = [square(0.0, 0.0, 2.0), square(1.0, 0.0, 2.0)];
        assert!((polygon_area(&set).unwrap() - 6.0).abs() < 1e-9);
        let u = polygon_union(&set).unwrap();
        assert_eq!(u.len(), 1);
    }

    #[test]
    fn open_ring_is_rejected() {
        let bad = Polygon {
            exterior: vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
            interiors: vec![],
        };
        assert!(matches!(
            polygon_intersection_area(&[bad], &[square(0.0, 0.0, 1.0)]),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn hole_is_excluded() {
        let donut = Polygon::new(
            square(0.0, 0.0, 4.0).exterior,
            vec![square(1.0, 1.0, 2.0).exterior],
        )
        .unwrap();
        let v = polygon_intersection_area(&[donut], &[square(0.0, 0.0, 4.0)]).unwrap();
        assert!((v - 12.0).abs() < 1e-9);
    }
}
