use std::f64::consts::PI;

use super::{boolean::polygon_union, Point, Polygon, Polyline};
use crate::error::{Error, Result};

/// Maximum angular step used to discretize round caps and joins.
pub const ARC_STEP_DEG: f64 = 8.0;

fn disk(c: Point, r: f64) -> Polygon {
    let n = (360.0 / ARC_STEP_DEG).ceil() as usize;
    let ring: Vec<Point> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            Point::new(c.x + r * t.cos(), c.y + r * t.sin())
        })
        .collect();
    Polygon::new(ring, vec![]).expect("disk ring has 45 vertices")
}

fn segment_rect(a: Point, b: Point, r: f64) -> Option<Polygon> {
    let n = (b - a).unit()?.perp() * r;
    Polygon::new(vec![a - n, b - n, b + n, a + n], vec![]).ok()
}

/// Round-capped, round-joined buffer of a polyline.
///
/// Built as the union of one rectangle per segment and one disk per vertex, so
/// self-overlapping lines (including closed rings) come out right.
pub fn buffer_polyline(line: &Polyline, radius: f64) -> Result<Polygon> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Parameter(format!(
            "buffer radius must be positive, got {radius}"
        )));
    }
    let mut parts: Vec<Polygon> = line.vertices().iter().map(|&v| disk(v, radius)).collect();
    parts.extend(line.segments().filter_map(|(a, b)| segment_rect(a, b, radius)));
    let mut merged = polygon_union(&parts)?;
    if merged.is_empty() {
        return Err(Error::Geometry("buffer union produced no polygon".into()));
    }
    // A connected line buffers to a single piece; keep the dominant part if the
    // overlay left slivers behind.
    merged.sort_by(|a, b| b.area().total_cmp(&a.area()));
    Ok(merged.swap_remove(0))
}
