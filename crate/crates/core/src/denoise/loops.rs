use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::hough::{detect_circle, HoughParams, PixelWindow};
use crate::error::Result;
use crate::geom::{ring_centroid, Polygon};
use crate::netgraph::{enumerate_faces, EdgeAttrs, Loop, LoopKind, NodeId, Provenance, RoadGraph};
use crate::raster::{Grid, RasterMask};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopParams {
    /// Faces smaller than this (m²) are noise unless they hold a circle.
    pub area_threshold: f64,
    /// Window padding around a loop's bounding box, as a fraction of its size
    /// on each side.
    pub window_pad: f64,
    /// Largest relative gap between the detected radius and the loop's
    /// equivalent radius √(area/π) for a circle to be accepted.
    pub radius_tolerance: f64,
    pub hough: HoughParams,
}

impl Default for LoopParams {
    fn default() -> Self {
        LoopParams {
            area_threshold: 300.0,
            window_pad: 0.2,
            radius_tolerance: 0.35,
            hough: HoughParams::default(),
        }
    }
}

/// Enumerate the faces of `g` and label them: small faces become noise or,
/// if the mask under them holds a circle, circle loops; larger faces stay
/// undetermined.
pub fn classify_loops(g: &RoadGraph, mask: &RasterMask, params: &LoopParams) -> Result<Vec<Loop>> {
    let mut loops = enumerate_faces(g)?;
    for lp in &mut loops {
        if lp.area >= params.area_threshold {
            lp.kind = LoopKind::Undetermined;
            continue;
        }
        lp.kind = LoopKind::Noise;
        let Some(win) = loop_window(lp, mask, params.window_pad) else { continue };
        let Some(c) = detect_circle(mask, win, &params.hough) else { continue };
        let r_eq = (lp.area / std::f64::consts::PI).sqrt();
        let inside = Polygon::new(lp.ring.clone(), vec![]).map(|p| p.contains(c.center)).unwrap_or(false);
        let tol = (params.radius_tolerance * r_eq).max(2.0 * mask.transform.pixel_size());
        if inside && (c.radius - r_eq).abs() <= tol {
            lp.kind = LoopKind::Circle;
            lp.circle = Some(c);
        } else {
            log::debug!(
                "loop of {:.1} m² rejected circle r={:.2} (r_eq {:.2}, inside {inside})",
                lp.area,
                c.radius,
                r_eq
            );
        }
    }
    Ok(loops)
}

fn loop_window(lp: &Loop, mask: &RasterMask, pad: f64) -> Option<PixelWindow> {
    let t = mask.transform;
    let (mut c0, mut c1, mut r0, mut r1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &p in &lp.ring {
        let (c, r) = t.invert(p);
        c0 = c0.min(c);
        c1 = c1.max(c);
        r0 = r0.min(r);
        r1 = r1.max(r);
    }
    let (pc, pr) = ((c1 - c0) * pad, (r1 - r0) * pad);
    let (c0, c1) = ((c0 - pc).floor().max(0.0), (c1 + pc).ceil().min(mask.width() as f64));
    let (r0, r1) = ((r0 - pr).floor().max(0.0), (r1 + pr).ceil().min(mask.height() as f64));
    if c1 <= c0 || r1 <= r0 {
        return None;
    }
    Some(PixelWindow {
        col0: c0 as usize,
        row0: r0 as usize,
        cols: (c1 - c0) as usize,
        rows: (r1 - r0) as usize,
    })
}

/// Replace every noise loop by straight segments between its attachment
/// nodes (loop nodes with edges leaving the loop): none or one → the loop is
/// removed, two → one edge, three or more → a star to the loop centroid.
/// Loops whose edges no longer all exist are skipped.
pub fn collapse_noise_loops(g: &RoadGraph, loops: &[Loop]) -> Result<RoadGraph> {
    let mut out = g.clone();
    for lp in loops.iter().filter(|l| l.kind == LoopKind::Noise) {
        let cycle = lp.cycle_edges();
        if cycle.is_empty() || !cycle.iter().all(|&e| out.contains_edge(e)) {
            continue;
        }
        let nodes: BTreeSet<NodeId> = lp.cycle_nodes(&out);
        let attach: Vec<NodeId> = nodes
            .iter()
            .copied()
            .filter(|&n| out.incidences(n).iter().any(|i| !cycle.contains(&i.edge)))
            .collect();
        for &e in &cycle {
            out.remove_edge(e);
        }
        let attrs = EdgeAttrs::with_provenance(Provenance::Collapsed);
        match attach.len() {
            0 | 1 => {}
            2 => {
                out.add_straight_edge(attach[0], attach[1], attrs)?;
            }
            _ => {
                let hub = out.add_node(ring_centroid(&lp.ring));
                for &a in &attach {
                    if out.pos(a) != out.pos(hub) {
                        out.add_straight_edge(a, hub, attrs.clone())?;
                    }
                }
            }
        }
        for n in nodes {
            if out.degree(n) == 0 {
                out.remove_node(n);
            }
        }
    }
    out.remove_orphan_nodes();
    Ok(out)
}
