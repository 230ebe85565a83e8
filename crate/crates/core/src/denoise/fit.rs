use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

const MAX_GN_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: Point,
    pub radius: f64,
    /// Root-mean-square radial residual.
    pub rmse: f64,
}

/// Least-squares circle: algebraic (Kåsa) fit, then up to 20 Gauss-Newton
/// steps on the geometric distance.
pub fn fit_circle(points: &[Point]) -> Result<CircleFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "circle fit needs 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateFit("non-finite input point".into()));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Point::new(0.0, 0.0), |a, &p| a + p) * (1.0 / n);
    let scale = points.iter().map(|&p| p.dist(mean)).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::DegenerateFit("all points coincide".into()));
    }
    // Normalized coordinates keep the normal equations well conditioned.
    let q: Vec<Point> = points.iter().map(|&p| (p - mean) * (1.0 / scale)).collect();

    // Minimize Σ (x² + y² + D x + E y + F)².
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for p in &q {
        let row = [p.x, p.y, 1.0];
        let rhs = -(p.x * p.x + p.y * p.y);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * rhs;
        }
    }
    let [d, e, f] = solve3(ata, atb).ok_or_else(|| Error::DegenerateFit("points are collinear".into()))?;
    let mut c = Point::new(-d / 2.0, -e / 2.0);
    let r2 = c.x * c.x + c.y * c.y - f;
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(Error::DegenerateFit("points are collinear".into()));
    }
    let mut r = r2.sqrt();
    if r > 1e6 {
        return Err(Error::DegenerateFit("points are (nearly) collinear".into()));
    }

    let cost = |c: Point, r: f64| q.iter().map(|&p| (p.dist(c) - r).powi(2)).sum::<f64>();
    let mut current = cost(c, r);
    for _ in 0..MAX_GN_STEPS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &p in &q {
            let d = p.dist(c);
            if d == 0.0 {
                continue;
            }
            let res = d - r;
            let jac = [-(p.x - c.x) / d, -(p.y - c.y) / d, -1.0];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
                jtr[i] -= jac[i] * res;
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        let (nc, nr) = (Point::new(c.x + step[0], c.y + step[1]), r + step[2]);
        let next = cost(nc, nr);
        if !(next <= current) {
            break;
        }
        let moved = step.iter().map(|s| s.abs()).fold(0.0, f64::max);
        c = nc;
        r = nr;
        current = next;
        if moved < 1e-15 {
            break;
        }
    }
    Ok(CircleFit {
        center: mean + c * scale,
        radius: r * scale,
        rmse: (current / n).sqrt() * scale,
    })
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let norm = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if norm == 0.0 {
        return None;
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 * norm {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn eight_exact_points() {
        let pts: Vec<Point> = (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::FRAC_PI_4 + 0.3;
                Point::new(3.0 + 5.0 * t.cos(), 4.0 + 5.0 * t.sin())
            })
            .collect();
        let f = fit_circle(&pts).unwrap();
        assert!((f.center.x - 3.0).abs() < 1e-9 && (f.center.y - 4.0).abs() < 1e-9);
        assert!((f.radius - 5.0).abs() < 1e-9 && f.rmse < 1e-9);
    }

    #[test]
    fn three_points() {
        let pts = [Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 1.0)];
        let f = fit_circle(&pts).unwrap();
        assert!(f.center.dist(Point::new(1.0, 0.0)) < 1e-9);
        assert!((f.radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_rejected() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!(matches!(fit_circle(&pts), Err(Error::DegenerateFit(_))));
        assert!(fit_circle(&pts[..2]).is_err());
    }

    #[test]
    fn exact_far_from_origin() {
        let (cx, cy, r) = (512_345.25, 4_321_987.5, 37.0);
        let pts: Vec<Point> = (0..13)
            .map(|k| {
                let t = k as f64 * 0.41;
                Point::new(cx + r * t.cos(), cy + r * t.sin())
            })
            .collect();
        let f = fit_circle(&pts).unwrap();
        assert!((f.center.x - cx).abs() / cx < 1e-9 && (f.center.y - cy).abs() / cy < 1e-9);
        assert!((f.radius - r).abs() / r < 1e-9);
    }

    /// Monte-Carlo oracle: the sample radial-residual RMS of the generated
    /// noise itself, and the fit must not do worse than the true circle.
    #[test]
    fn noisy_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let noise = Normal::new(0.0, 0.1).unwrap();
        let mut true_rms = 0.0;
        let pts: Vec<Point> = (0..100)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 100.0;
                let dr: f64 = noise.sample(&mut rng);
                true_rms += dr * dr;
                Point::new(10.0 * t.cos() + 1.0, 10.0 * t.sin() - 2.0) * 1.0 + Point::new(t.cos(), t.sin()) * dr
            })
            .collect();
        let true_rms = (true_rms / 100.0).sqrt();
        let f = fit_circle(&pts).unwrap();
        assert!((f.radius - 10.0).abs() <= 0.05, "{}", f.radius);
        assert!(f.center.dist(Point::new(1.0, -2.0)) <= 0.05);
        assert!((0.07..=0.13).contains(&f.rmse), "{}", f.rmse);
        assert!(f.rmse <= true_rms + 1e-12);
    }
}
