use super::Point;

/// Infinite line through `point` with unit direction `dir`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub point: Point,
    pub dir: Point,
}

impl Line {
    /// Signed distance, positive on the left of `dir`.
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.dir.cross(p - self.point)
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.signed_distance(p).abs()
    }

    pub fn project(&self, p: Point) -> Point {
        self.point + self.dir * self.dir.dot(p - self.point)
    }

    /// Intersection point, `None` when parallel.
    pub fn intersect(&self, o: &Line) -> Option<Point> {
        let den = self.dir.cross(o.dir);
        if den.abs() < 1e-12 {
            return None;
        }
        let t = (o.point - self.point).cross(o.dir) / den;
        Some(self.point + self.dir * t)
    }

    /// Acute angle between the two lines, degrees in [0, 90].
    pub fn angle_to_deg(&self, o: &Line) -> f64 {
        self.dir.cross(o.dir).abs().atan2(self.dir.dot(o.dir).abs()).to_degrees()
    }
}

/// Running sums for a total-least-squares line fit, so a point window can
/// grow one vertex at a time. Coordinates are taken relative to the first
/// point pushed.
#[derive(Debug, Clone, Default)]
pub struct TlsAccumulator {
    origin: Option<Point>,
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl TlsAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, p: Point) {
        let o = *self.origin.get_or_insert(p);
        let (x, y) = (p.x - o.x, p.y - o.y);
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0.0
    }

    /// Best line and RMS orthogonal residual; `None` below two points or when
    /// all points coincide.
    pub fn fit(&self) -> Option<(Line, f64)> {
        let o = self.origin?;
        if self.n < 2.0 {
            return None;
        }
        let (mx, my) = (self.sx / self.n, self.sy / self.n);
        let a = self.sxx / self.n - mx * mx;
        let c = self.syy / self.n - my * my;
        let b = self.sxy / self.n - mx * my;
        if a + c <= 1e-24 {
            return None;
        }
        let theta = 0.5 * (2.0 * b).atan2(a - c);
        let dir = Point::new(theta.cos(), theta.sin());
        let half = 0.5 * (a - c);
        let lambda_min = (0.5 * (a + c) - (half * half + b * b).sqrt()).max(0.0);
        Some((
            Line {
                point: Point::new(o.x + mx, o.y + my),
                dir,
            },
            lambda_min.sqrt(),
        ))
    }
}

/// Total-least-squares line through `pts` with its RMS orthogonal residual.
pub fn fit_line(pts: &[Point]) -> Option<(Line, f64)> {
    let mut acc = TlsAccumulator::new();
    for &p in pts {
        acc.push(p);
    }
    acc.fit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        let (l, rms) = fit_line(&pts).unwrap();
        assert!(rms < 1e-9);
        assert!((l.dir.y / l.dir.x - 2.0).abs() < 1e-9);
    }

    /// Brute-force oracle: scan directions, minimize the RMS orthogonal residual
    /// about the centroid.
    #[test]
    fn residual_matches_direction_scan() {
        let pts = [(0.0, 0.0), (1.0, 0.3), (2.0, -0.2), (3.0, 0.5), (4.5, 0.1), (5.0, 1.0)]
            .map(|(x, y)| Point::new(x, y));
        let (l, rms) = fit_line(&pts).unwrap();
        let c = pts.iter().fold(Point::new(0.0, 0.0), |a, &p| a + p) * (1.0 / pts.len() as f64);
        let best = (0..36000)
            .map(|k| {
                let t = (k as f64 / 100.0).to_radians();
                let line = Line { point: c, dir: Point::new(t.cos(), t.sin()) };
                (pts.iter().map(|&p| line.distance(p).powi(2)).sum::<f64>() / pts.len() as f64).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((rms - best).abs() < 1e-6, "{rms} vs {best}");
        assert!(pts.iter().map(|&p| l.distance(p).powi(2)).sum::<f64>() / 6.0 - rms * rms < 1e-9);
    }

    #[test]
    fn intersect_and_angle() {
        let a = Line { point: Point::new(0.0, 0.0), dir: Point::new(1.0, 0.0) };
        let b = Line { point: Point::new(3.0, 5.0), dir: Point::new(0.0, -1.0) };
        assert_eq!(a.intersect(&b), Some(Point::new(3.0, 0.0)));
        assert!((a.angle_to_deg(&b) - 90.0).abs() < 1e-12);
        assert!(a.intersect(&a).is_none());
    }
}
