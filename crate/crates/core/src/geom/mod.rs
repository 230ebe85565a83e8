//! Planar geometry in a projected metric CRS.
//!
//! Everything here is a pure function of its inputs. Coordinates are meters.

mod boolean;
mod buffer;
mod hausdorff;
mod line;
mod offset;

pub use boolean::{polygon_area, polygon_intersection_area, polygon_union};
pub use buffer::{buffer_polyline, ARC_STEP_DEG};
pub use hausdorff::{directed_hausdorff, hausdorff_distance, DEFAULT_HAUSDORFF_STEP};
pub use line::{fit_line, Line, TlsAccumulator};
pub use offset::offset_polyline;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for the zero vector.
    pub fn unit(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| Point::new(self.x / n, self.y / n))
    }

    /// Left-hand perpendicular (rotated +90°).
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<Rect> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut r = Rect {
            min: first,
            max: first,
        };
        for p in it {
            r.min.x = r.min.x.min(p.x);
            r.min.y = r.min.y.min(p.y);
            r.max.x = r.max.x.max(p.x);
            r.max.y = r.max.y.max(p.y);
        }
        Some(r)
    }

    pub fn expand(self, d: f64) -> Rect {
        Rect {
            min: Point::new(self.min.x - d, self.min.y - d),
            max: Point::new(self.max.x + d, self.max.y + d),
        }
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        self.min.lerp(self.max, 0.5)
    }
}

/// An open or closed line-string with at least two vertices and positive length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polyline {
    vertices: Vec<Point>,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Geometry(format!(
                "polyline needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::Geometry(format!("non-finite vertex at index {i}")));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Geometry(format!(
                "consecutive duplicate vertices at index {i}"
            )));
        }
        Ok(Polyline { vertices })
    }

    /// Drops consecutive duplicates before validating.
    pub fn from_points_dedup(mut vertices: Vec<Point>) -> Result<Self> {
        vertices.dedup();
        Polyline::new(vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn reversed(&self) -> Polyline {
        let mut v = self.vertices.clone();
        v.reverse();
        Polyline { vertices: v }
    }

    pub fn bbox(&self) -> Rect {
        Rect::from_points(&self.vertices).expect("polyline is non-empty")
    }

    /// Replaces the first vertex. Fails if that would create a duplicate.
    pub fn with_first(&self, p: Point) -> Result<Polyline> {
        let mut v = self.vertices.clone();
        v[0] = p;
        Polyline::from_points_dedup(v)
    }

    pub fn with_last(&self, p: Point) -> Result<Polyline> {
        let mut v = self.vertices.clone();
        let n = v.len();
        v[n - 1] = p;
        Polyline::from_points_dedup(v)
    }

    /// Exact distance from `p` to the nearest point of the line.
    pub fn distance_to_point(&self, p: Point) -> f64 {
        self.segments()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point at arc length `s` from the start (clamped to the ends).
    pub fn point_at(&self, s: f64) -> Point {
        if s <= 0.0 {
            return self.first();
        }
        let mut acc = 0.0;
        for (a, b) in self.segments() {
            let l = a.dist(b);
            if acc + l >= s {
                return a.lerp(b, (s - acc) / l);
            }
            acc += l;
        }
        self.last()
    }

    /// All vertices plus extra samples so that consecutive samples are at most `step` apart.
    pub fn densify(&self, step: f64) -> Vec<Point> {
        let mut out = vec![self.first()];
        for (a, b) in self.segments() {
            let n = (a.dist(b) / step).ceil().max(1.0) as usize;
            for k in 1..=n {
                out.push(a.lerp(b, k as f64 / n as f64));
            }
        }
        out
    }
}

impl TryFrom<Vec<Point>> for Polyline {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Polyline::new(v)
    }
}

impl From<Polyline> for Vec<Point> {
    fn from(p: Polyline) -> Self {
        p.vertices
    }
}

/// A polygon with closed rings: counter-clockwise exterior, clockwise holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    pub exterior: Vec<Point>,
    pub interiors: Vec<Vec<Point>>,
}

impl Polygon {
    /// Builds a polygon, closing rings and normalizing their orientation.
    pub fn new(exterior: Vec<Point>, interiors: Vec<Vec<Point>>) -> Result<Self> {
        let mut exterior = close_ring(exterior)?;
        if ring_signed_area(&exterior) < 0.0 {
            exterior.reverse();
        }
        let interiors = interiors
            .into_iter()
            .map(|r| {
                let mut r = close_ring(r)?;
                if ring_signed_area(&r) > 0.0 {
                    r.reverse();
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polygon {
            exterior,
            interiors,
        })
    }

    pub fn rect(min: Point, max: Point) -> Polygon {
        Polygon {
            exterior: vec![
                min,
                Point::new(max.x, min.y),
                max,
                Point::new(min.x, max.y),
                min,
            ],
            interiors: vec![],
        }
    }

    pub fn area(&self) -> f64 {
        ring_signed_area(&self.exterior).abs()
            - self
                .interiors
                .iter()
                .map(|r| ring_signed_area(r).abs())
                .sum::<f64>()
    }

    pub fn bbox(&self) -> Rect {
        Rect::from_points(&self.exterior).expect("ring is non-empty")
    }

    /// Even-odd containment over all rings.
    pub fn contains(&self, p: Point) -> bool {
        std::iter::once(&self.exterior)
            .chain(&self.interiors)
            .filter(|r| ring_crossings_odd(r, p))
            .count()
            % 2
            == 1
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.exterior).chain(&self.interiors)
    }
}

fn close_ring(mut r: Vec<Point>) -> Result<Vec<Point>> {
    if r.first() != r.last() {
        if let Some(&f) = r.first() {
            r.push(f);
        }
    }
    if r.len() < 4 {
        return Err(Error::Geometry(format!(
            "ring needs at least 3 distinct vertices, got {}",
            r.len().saturating_sub(1)
        )));
    }
    if r.iter().any(|p| !p.is_finite()) {
        return Err(Error::Geometry("non-finite ring vertex".into()));
    }
    Ok(r)
}

/// Shoelace area; positive for counter-clockwise rings. Works for open or closed rings.
pub fn ring_signed_area(ring: &[Point]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a.cross(b);
    }
    0.5 * s
}

/// Area centroid of a ring (falls back to the vertex mean for zero-area rings).
pub fn ring_centroid(ring: &[Point]) -> Point {
    let n = ring.len();
    let a = ring_signed_area(ring);
    if a.abs() < 1e-12 {
        let s = ring.iter().fold(Point::default(), |acc, &p| acc + p);
        return s * (1.0 / n as f64);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

fn ring_crossings_odd(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    p.dist(closest_on_segment(p, a, b).0)
}

/// Closest point on segment `ab` to `p`, and its parameter in `[0, 1]`.
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> (Point, f64) {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return (a, 0.0);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    (a + d * t, t)
}

/// Orientation angle of a direction in radians, in `(-π, π]`.
pub fn bearing(d: Point) -> f64 {
    d.y.atan2(d.x)
}

/// Unsigned angle between two directions in degrees, `[0, 180]`.
pub fn angle_between_deg(u: Point, v: Point) -> f64 {
    let c = u.cross(v).atan2(u.dot(v));
    c.abs().to_degrees()
}
