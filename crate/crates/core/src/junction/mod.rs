//! Through-road alignment at junctions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{angle_between_deg, fit_line, Line, Point, Polyline};
use crate::netgraph::{junctions, EdgeId, Incidence, NodeId, RoadGraph};

/// Nodes moving less than this in a round count as settled.
const SETTLED: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JunctionParams {
    pub angle_tol_deg: f64,
    /// Vertices per through arm used in the line fit.
    pub reach: usize,
    pub max_rounds: usize,
    /// Largest node displacement per call, meters.
    pub max_step: Option<f64>,
}

impl Default for JunctionParams {
    fn default() -> Self {
        JunctionParams {
            angle_tol_deg: 2.0,
            reach: 2,
            max_rounds: 5,
            max_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothOutcome {
    /// The through pair is within tolerance; the node moved this far.
    Aligned { moved: f64 },
    /// No plausible through pair; the node is flagged and left in place.
    NoThroughRoad,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SmoothReport {
    pub rounds: usize,
    /// Sum of squared node displacements in each round.
    pub sq_displacement: Vec<f64>,
    /// Largest single node displacement in each round.
    pub max_displacement: Vec<f64>,
}

/// Unit direction of the first segment leaving the node at this incidence.
pub fn departure(g: &RoadGraph, inc: Incidence) -> Point {
    let v = arm_vertices(g, inc);
    (v[1] - v[0]).unit().expect("edges have no zero-length segment")
}

fn arm_vertices(g: &RoadGraph, inc: Incidence) -> Vec<Point> {
    let e = g.edge(inc.edge).expect("incidence refers to a live edge");
    if inc.at_start {
        e.geometry.vertices().to_vec()
    } else {
        e.geometry.reversed().into_vertices()
    }
}

/// The pair of incident edges (self-loops excluded) whose departures are
/// closest to anti-parallel, with the angle between them in degrees.
pub fn best_through_pair(g: &RoadGraph, node: NodeId) -> Option<(Incidence, Incidence, f64)> {
    let inc: Vec<Incidence> = g
        .incidences(node)
        .into_iter()
        .filter(|i| !g.edge(i.edge).is_some_and(|e| e.is_self_loop()))
        .collect();
    let dirs: Vec<Point> = inc.iter().map(|&i| departure(g, i)).collect();
    let mut best: Option<(Incidence, Incidence, f64)> = None;
    for i in 0..inc.len() {
        for j in i + 1..inc.len() {
            let a = angle_between_deg(dirs[i], dirs[j]);
            if best.is_none_or(|b| a > b.2) {
                best = Some((inc[i], inc[j], a));
            }
        }
    }
    best
}

/// Whether the junction satisfies the through-road condition or is flagged.
pub fn junction_ok(g: &RoadGraph, node: NodeId, angle_tol_deg: f64) -> bool {
    g.node(node).is_some_and(|n| n.no_through_road)
        || best_through_pair(g, node).is_some_and(|(_, _, a)| a >= 180.0 - angle_tol_deg)
}

/// Align the straightest pair of edges at `node` into a through road.
///
/// A total-least-squares line is fitted through the node and the first
/// `reach` vertices of both arms; the node and the arms' near vertices are
/// projected onto it. Other incident edges only follow the node with their
/// terminal vertex. If the straightest pair is under 90°, or the alignment
/// cannot be done, the node is flagged as having no through road.
pub fn smooth_junction(g: &mut RoadGraph, node: NodeId, p: &JunctionParams) -> Result<SmoothOutcome> {
    if g.node(node).is_none() {
        return Err(Error::Parameter(format!("unknown node {node}")));
    }
    if g.degree(node) < 3 {
        return Err(Error::Parameter(format!("node {node} is not a junction")));
    }
    let Some((ia, ib, angle)) = best_through_pair(g, node) else {
        return Ok(flag(g, node, true));
    };
    if angle < 90.0 {
        return Ok(flag(g, node, true));
    }
    if angle >= 180.0 - p.angle_tol_deg {
        flag(g, node, false);
        return Ok(SmoothOutcome::Aligned { moved: 0.0 });
    }
    let j = g.pos(node);
    let backup: Vec<(EdgeId, Polyline)> = g
        .incidences(node)
        .iter()
        .map(|i| (i.edge, g.edge(i.edge).unwrap().geometry.clone()))
        .collect();
    match align(g, node, ia, ib, p) {
        Ok(()) if best_through_pair(g, node).is_some_and(|(_, _, a)| a >= 180.0 - p.angle_tol_deg) => {
            flag(g, node, false);
            Ok(SmoothOutcome::Aligned { moved: g.pos(node).dist(j) })
        }
        result => {
            if let Err(e) = result {
                log::debug!("junction {node} not aligned: {e}");
            }
            restore(g, node, j, &backup);
            Ok(flag(g, node, true))
        }
    }
}

fn flag(g: &mut RoadGraph, node: NodeId, on: bool) -> SmoothOutcome {
    g.node_mut(node).expect("checked node").no_through_road = on;
    SmoothOutcome::NoThroughRoad
}

fn restore(g: &mut RoadGraph, node: NodeId, pos: Point, backup: &[(EdgeId, Polyline)]) {
    g.node_mut(node).expect("checked node").pos = pos;
    for (id, geom) in backup {
        g.set_edge_geometry(*id, geom.clone()).expect("restoring the previous geometry");
    }
}

struct Arm {
    inc: Incidence,
    verts: Vec<Point>,
    /// Number of leading interior vertices this end may move.
    movable: usize,
    /// Number of leading vertices used in the line fit.
    reach: usize,
}

/// Turns sharper than this end the stretch of an arm that belongs to the
/// junction.
const MAX_TURN_DEG: f64 = 30.0;

fn arm(g: &RoadGraph, node: NodeId, inc: Incidence, reach: usize) -> Arm {
    let verts = arm_vertices(g, inc);
    let m = verts.len();
    let far = g.edge(inc.edge).unwrap().other(node);
    let far_free = g.degree(far) < 3;
    let reach = reach.min(straight_run(&verts));
    let movable = (1..m - 1)
        .take_while(|&i| i <= reach && (far_free || 2 * i < m - 1))
        .count();
    Arm { inc, verts, movable, reach }
}

/// Leading vertices (after the node) reached without a sharp turn.
fn straight_run(verts: &[Point]) -> usize {
    let mut n = 1;
    while n + 1 < verts.len() {
        let (a, b, c) = (verts[n - 1], verts[n], verts[n + 1]);
        let turn = (b - a).cross(c - b).atan2((b - a).dot(c - b)).abs().to_degrees();
        if turn > MAX_TURN_DEG {
            break;
        }
        n += 1;
    }
    n
}

fn align(g: &mut RoadGraph, node: NodeId, ia: Incidence, ib: Incidence, p: &JunctionParams) -> Result<()> {
    let reach = p.reach.max(1);
    let j = g.pos(node);
    let arms = [arm(g, node, ia, reach), arm(g, node, ib, reach)];
    let mut pts = vec![j];
    for a in &arms {
        pts.extend(a.verts.iter().skip(1).take(a.reach));
    }
    let (line, _) = fit_line(&pts).ok_or_else(|| Error::Geometry("degenerate through-road fit".into()))?;
    let mut target = line.project(j);
    if let Some(step) = p.max_step {
        let d = target.dist(j);
        if d > step {
            target = j.lerp(target, step / d);
        }
    }
    let line = Line { point: target, dir: line.dir };
    let signs = [&arms[0], &arms[1]].map(|a| (a.verts[1] - j).dot(line.dir).signum());
    if signs[0] == signs[1] || signs.contains(&0.0) {
        return Err(Error::Geometry("through arms leave on the same side".into()));
    }
    let mut new_geoms = Vec::with_capacity(2);
    for (a, s) in arms.iter().zip(signs) {
        let u = line.dir * s;
        let along = |q: Point| (q - target).dot(u);
        let mut v = vec![target];
        if a.movable == 0 {
            let t = along(a.verts[1]);
            if t <= 0.0 {
                return Err(Error::Geometry("arm folds back over the junction".into()));
            }
            v.push(target + u * (t / 3.0));
        } else {
            let mut last = 0.0;
            for &q in &a.verts[1..=a.movable] {
                let t = along(q);
                if t <= last {
                    return Err(Error::Geometry("projected arm is not monotone".into()));
                }
                last = t;
                v.push(line.project(q));
            }
        }
        v.extend_from_slice(&a.verts[a.movable + 1..]);
        let pl = Polyline::from_points_dedup(v)?;
        new_geoms.push((a.inc, if a.inc.at_start { pl } else { pl.reversed() }));
    }
    g.move_node(node, target)?;
    for (inc, pl) in new_geoms {
        g.set_edge_geometry(inc.edge, pl)?;
    }
    Ok(())
}

/// Smooth every junction, lowest degree first, in repeated rounds until no
/// node moves more than a millimeter or `max_rounds` is reached.
pub fn smooth_all(g: &mut RoadGraph, p: &JunctionParams) -> Result<SmoothReport> {
    let mut report = SmoothReport::default();
    let mut order = junctions(g);
    order.sort_by_key(|&n| (g.degree(n), n));
    for _ in 0..p.max_rounds {
        let (mut sq, mut max) = (0.0, 0.0f64);
        for &n in &order {
            if let SmoothOutcome::Aligned { moved } = smooth_junction(g, n, p)? {
                sq += moved * moved;
                max = max.max(moved);
            }
        }
        report.rounds += 1;
        report.sq_displacement.push(sq);
        report.max_displacement.push(max);
        if max <= SETTLED {
            break;
        }
    }
    Ok(report)
}
