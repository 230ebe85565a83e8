//! Stair-step removal by greedy total-least-squares segmentation.

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Line, Point, Polyline, TlsAccumulator};
use crate::netgraph::RoadGraph;

/// Lines closer than this to parallel break at the shared window point.
const PARALLEL_DEG: f64 = 5.0;

/// Default tolerance for a given pixel size: 1.5 px.
pub fn default_epsilon(pixel_size: f64) -> f64 {
    1.5 * pixel_size
}

/// Tolerance ladder: `2^(k / LADDER_STEPS)` meters, down to `2^LADDER_FLOOR`.
const LADDER_STEPS: i32 = 8;
const LADDER_FLOOR: i32 = -10;

/// Fit a polyline with as few vertices as the greedy rule finds.
///
/// The greedy segmentation ([`greedy_fit`]) is run at every tolerance of a
/// fixed geometric ladder not above `epsilon`, and the result with the fewest
/// vertices wins (ties go to the larger tolerance). The candidate sets are
/// nested, so a larger `epsilon` never yields more vertices.
pub fn fit_polyline(points: &Polyline, epsilon: f64) -> Result<Polyline> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let floor = 2f64.powi(LADDER_FLOOR);
    if points.len() <= 2 || epsilon < floor {
        return greedy_fit(points, epsilon);
    }
    let top = (epsilon.log2() * LADDER_STEPS as f64).floor() as i32;
    let mut best: Option<Polyline> = None;
    for k in (LADDER_FLOOR * LADDER_STEPS..=top).rev() {
        let tol = 2f64.powf(k as f64 / LADDER_STEPS as f64);
        if tol > epsilon {
            continue;
        }
        let cand = greedy_fit(points, tol)?;
        if best.as_ref().is_none_or(|b| cand.len() < b.len()) {
            let done = cand.len() == 2;
            best = Some(cand);
            if done {
                break;
            }
        }
    }
    Ok(best.expect("ladder has at least one rung"))
}

/// One greedy pass at tolerance `epsilon`.
///
/// A window of input points grows while the RMS orthogonal residual to its
/// total-least-squares line stays within `epsilon`; the next window starts at
/// the last point of the previous one. Consecutive window lines are joined at
/// their intersection. Anchors are kept bit-identical, and any stretch of
/// input that ends up more than `2·epsilon` from the output is split at its
/// farthest input point.
pub fn greedy_fit(points: &Polyline, epsilon: f64) -> Result<Polyline> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let pts = points.vertices();
    let n = pts.len();
    if n <= 2 {
        return Ok(points.clone());
    }

    // Window boundaries (input indices) and their fitted lines.
    let mut bounds = vec![0usize];
    let mut lines: Vec<Option<Line>> = Vec::new();
    let mut s = 0;
    while s < n - 1 {
        let mut acc = TlsAccumulator::new();
        acc.push(pts[s]);
        acc.push(pts[s + 1]);
        let mut e = s + 1;
        let mut best = acc.fit().map(|f| f.0);
        while e + 1 < n {
            let mut trial = acc.clone();
            trial.push(pts[e + 1]);
            match trial.fit() {
                Some((l, rms)) if rms <= epsilon => {
                    acc = trial;
                    best = Some(l);
                    e += 1;
                }
                None => {
                    acc = trial;
                    e += 1;
                }
                _ => break,
            }
        }
        bounds.push(e);
        lines.push(best);
        s = e;
    }

    // Vertices: anchors plus joins of consecutive lines.
    let mut verts: Vec<Point> = Vec::with_capacity(bounds.len());
    verts.push(pts[0]);
    for k in 1..bounds.len() - 1 {
        let shared = pts[bounds[k]];
        let join = match (lines[k - 1], lines[k]) {
            (Some(a), Some(b)) if a.angle_to_deg(&b) >= PARALLEL_DEG => a.intersect(&b).unwrap_or(shared),
            _ => shared,
        };
        verts.push(join);
    }
    verts.push(pts[n - 1]);

    repair(pts, &mut bounds, &mut verts, 2.0 * epsilon);
    let out = Polyline::from_points_dedup(verts)?;
    Ok(out)
}

/// Split until every input point of each stretch lies within `tol` of its
/// output segment or a neighbouring one. Offending joins are first snapped back to their input
/// point; then the farthest interior point becomes a vertex.
fn repair(pts: &[Point], bounds: &mut Vec<usize>, verts: &mut Vec<Point>, tol: f64) {
    while repair_pass(pts, bounds, verts, tol) {}
}

fn repair_pass(pts: &[Point], bounds: &mut Vec<usize>, verts: &mut Vec<Point>, tol: f64) -> bool {
    let mut changed = false;
    let mut j = 0;
    while j + 1 < bounds.len() {
        let (a, b) = (bounds[j], bounds[j + 1]);
        let (va, vb) = (verts[j], verts[j + 1]);
        let (mut worst, mut at) = (0.0, a);
        for (i, &p) in pts.iter().enumerate().take(b + 1).skip(a) {
            let mut d = point_segment_distance(p, va, vb);
            if j > 0 {
                d = d.min(point_segment_distance(p, verts[j - 1], va));
            }
            if j + 2 < verts.len() {
                d = d.min(point_segment_distance(p, vb, verts[j + 2]));
            }
            if d > worst {
                worst = d;
                at = i;
            }
        }
        if worst <= tol {
            j += 1;
            continue;
        }
        changed = true;
        if at == a || at == b {
            // A join strayed from its window boundary: pull it back.
            let k = if at == a { j } else { j + 1 };
            verts[k] = pts[at];
        } else {
            bounds.insert(j + 1, at);
            verts.insert(j + 1, pts[at]);
        }
    }
    changed
}

/// Simplify every edge geometry; nodes and incidences are untouched. Closed
/// self-loops are fitted in three arcs so they keep at least four vertices.
pub fn simplify_graph(g: &RoadGraph, epsilon: f64) -> Result<RoadGraph> {
    let mut out = g.clone();
    for (id, e) in g.edges() {
        let geom = if e.is_self_loop() {
            fit_closed(&e.geometry, epsilon)?
        } else {
            fit_polyline(&e.geometry, epsilon)?
        };
        out.set_edge_geometry(id, geom)?;
    }
    Ok(out)
}

fn fit_closed(line: &Polyline, epsilon: f64) -> Result<Polyline> {
    let v = line.vertices();
    let n = v.len();
    if n < 7 {
        return Ok(line.clone());
    }
    let cuts = [0, (n - 1) / 3, 2 * (n - 1) / 3, n - 1];
    let mut out: Vec<Point> = vec![v[0]];
    for w in cuts.windows(2) {
        let part = Polyline::new(v[w[0]..=w[1]].to_vec())?;
        out.extend_from_slice(&fit_polyline(&part, epsilon)?.vertices()[1..]);
    }
    Polyline::from_points_dedup(out)
}
