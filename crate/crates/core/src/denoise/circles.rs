use std::collections::BTreeSet;
use std::f64::consts::TAU;

use super::fit::fit_circle;
use super::Circle;
use crate::error::Result;
use crate::geom::{Point, Polygon, Polyline};
use crate::netgraph::{enumerate_faces, EdgeAttrs, EdgeId, Loop, LoopKind, NodeId, Provenance, RoadGraph};

/// Largest angular step between arc vertices.
const ARC_STEP_DEG: f64 = 5.0;

/// Attachments closer than this on the circle are merged.
const MERGE_DIST: f64 = 1e-6;

/// Replace each circle loop by its circle.
///
/// The circle is refined by a least-squares fit of the loop's vertices when
/// that fit agrees with the detection. Attachment nodes are projected
/// radially onto the circle, and the circle is split into arcs between
/// consecutive attachments. If the loop's edges changed since
/// classification, the smallest face containing the circle center is used.
pub fn replace_circle_loops(g: &RoadGraph, loops: &[Loop]) -> Result<RoadGraph> {
    let mut out = g.clone();
    for lp in loops.iter().filter(|l| l.kind == LoopKind::Circle) {
        let Some(detected) = lp.circle else { continue };
        let Some(cycle) = resolve(&out, lp, &detected)? else {
            log::warn!("circle at ({:.1}, {:.1}) no longer bounds a face; skipped", detected.center.x, detected.center.y);
            continue;
        };
        let circle = refine(&out, &cycle, detected);
        match replace_one(&out, &cycle, &circle) {
            Ok(g2) => out = g2,
            Err(e) => log::warn!("circle replacement skipped: {e}"),
        }
    }
    Ok(out)
}

fn resolve(g: &RoadGraph, lp: &Loop, c: &Circle) -> Result<Option<BTreeSet<EdgeId>>> {
    let cycle = lp.cycle_edges();
    if !cycle.is_empty() && cycle.iter().all(|&e| g.contains_edge(e)) {
        return Ok(Some(cycle));
    }
    let area = std::f64::consts::PI * c.radius * c.radius;
    let face = enumerate_faces(g)?
        .into_iter()
        .filter(|f| f.area <= 3.0 * area && f.area >= 0.3 * area)
        .filter(|f| Polygon::new(f.ring.clone(), vec![]).map(|p| p.contains(c.center)).unwrap_or(false))
        .min_by(|a, b| a.area.total_cmp(&b.area));
    Ok(face.map(|f| f.cycle_edges()))
}

fn refine(g: &RoadGraph, cycle: &BTreeSet<EdgeId>, c: Circle) -> Circle {
    let pts: Vec<Point> = cycle
        .iter()
        .filter_map(|&e| g.edge(e))
        .flat_map(|e| e.geometry.vertices()[1..].to_vec())
        .collect();
    match fit_circle(&pts) {
        Ok(f) if f.rmse <= 0.15 * f.radius
            && (f.radius - c.radius).abs() <= 0.35 * c.radius
            && f.center.dist(c.center) <= 0.5 * c.radius =>
        {
            Circle {
                center: f.center,
                radius: f.radius,
                support: c.support,
            }
        }
        _ => c,
    }
}

fn on_circle(c: &Circle, theta: f64) -> Point {
    Point::new(c.center.x + c.radius * theta.cos(), c.center.y + c.radius * theta.sin())
}

fn arc(c: &Circle, t0: f64, t1: f64) -> Result<Polyline> {
    let n = ((t1 - t0).to_degrees() / ARC_STEP_DEG).ceil().max(1.0) as usize;
    let mut pts: Vec<Point> = (0..n).map(|k| on_circle(c, t0 + (t1 - t0) * k as f64 / n as f64)).collect();
    pts.push(on_circle(c, t1));
    Polyline::from_points_dedup(pts)
}

fn replace_one(g: &RoadGraph, cycle: &BTreeSet<EdgeId>, c: &Circle) -> Result<RoadGraph> {
    let mut out = g.clone();
    let nodes: BTreeSet<NodeId> = cycle
        .iter()
        .filter_map(|&e| out.edge(e))
        .flat_map(|e| [e.a, e.b])
        .collect();
    let attach: Vec<NodeId> = nodes
        .iter()
        .copied()
        .filter(|&n| out.incidences(n).iter().any(|i| !cycle.contains(&i.edge)))
        .collect();
    for &e in cycle {
        out.remove_edge(e);
    }
    for &n in &nodes {
        if out.degree(n) == 0 {
            out.remove_node(n);
        }
    }

    // (angle, node), merging attachments that land on the same point.
    let mut placed: Vec<(f64, NodeId)> = Vec::new();
    let mut sorted: Vec<(f64, NodeId)> = attach
        .iter()
        .map(|&n| {
            let d = out.pos(n) - c.center;
            (d.y.atan2(d.x).rem_euclid(TAU), n)
        })
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (theta, n) in sorted {
        let p = on_circle(c, theta);
        let dup = placed.iter().find(|(t, _)| on_circle(c, *t).dist(p) < MERGE_DIST).map(|x| x.1);
        match dup {
            Some(keep) => {
                let target = out.pos(keep);
                reattach_all(&mut out, n, keep, target)?;
            }
            None => {
                out.move_node(n, p)?;
                placed.push((theta, n));
            }
        }
    }

    let attrs = EdgeAttrs::with_provenance(Provenance::Circle);
    match placed.len() {
        0 => {
            let anchor = out.add_node(on_circle(c, 0.0));
            out.add_edge(anchor, anchor, arc(c, 0.0, TAU)?, attrs)?;
        }
        1 => {
            let (t, n) = placed[0];
            out.add_edge(n, n, arc(c, t, t + TAU)?, attrs)?;
        }
        k => {
            for i in 0..k {
                let (t0, a) = placed[i];
                let (mut t1, b) = placed[(i + 1) % k];
                if t1 <= t0 {
                    t1 += TAU;
                }
                out.add_edge(a, b, arc(c, t0, t1)?, attrs.clone())?;
            }
        }
    }
    Ok(out)
}

/// Re-point every edge end at `from` to node `to` (placed at `pos`).
fn reattach_all(g: &mut RoadGraph, from: NodeId, to: NodeId, pos: Point) -> Result<()> {
    for inc in g.incidences(from) {
        let Some(mut e) = g.remove_edge(inc.edge) else { continue };
        let mut v = e.geometry.vertices().to_vec();
        let last = v.len() - 1;
        if e.a == from {
            e.a = to;
            v[0] = pos;
        }
        if e.b == from {
            e.b = to;
            v[last] = pos;
        }
        if let Ok(line) = Polyline::from_points_dedup(v) {
            if e.a != e.b || line.len() >= 4 {
                g.add_edge(e.a, e.b, line, e.attrs)?;
            }
        }
    }
    g.remove_node(from);
    Ok(())
}
