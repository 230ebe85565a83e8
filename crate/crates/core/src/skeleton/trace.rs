use std::collections::{BTreeMap, BTreeSet};

use super::{SkeletonRaster, N8};
use crate::geom::{Point, Polyline};
use crate::netgraph::{EdgeAttrs, NodeId, RoadGraph};
use crate::raster::Grid;

/// Vectorize a skeleton.
///
/// Pixels with degree ≠ 2 become nodes at their centers; 8-adjacent junction
/// pixels (and degree-2 pixels wedged between them) are clustered into one
/// node at their centroid. Maximal chains of
/// degree-2 pixels become edges. A cycle without any node pixel gets an anchor
/// node (its first pixel in row-major order) and one self-loop. Isolated
/// pixels carry no road and are dropped.
pub fn trace(skel: &SkeletonRaster) -> RoadGraph {
    let (w, h) = (skel.width(), skel.height());
    let t = skel.transform;
    let on = |i: usize| skel.bits()[i];
    let nbrs = |i: usize| -> Vec<usize> {
        let (c, r) = ((i % w) as i64, (i / w) as i64);
        N8.iter()
            .filter_map(|(dc, dr)| {
                let (cc, rr) = (c + dc, r + dr);
                (cc >= 0 && rr >= 0 && cc < w as i64 && rr < h as i64 && on(rr as usize * w + cc as usize))
                    .then(|| rr as usize * w + cc as usize)
            })
            .collect()
    };
    let center = |i: usize| t.pixel_center(i % w, i / w);

    let degree: Vec<usize> = (0..w * h).map(|i| if on(i) { nbrs(i).len() } else { 0 }).collect();
    // A degree-2 pixel squeezed between junction pixels is part of the junction.
    let in_junction = |i: usize| {
        on(i) && (degree[i] >= 3 || (degree[i] == 2 && nbrs(i).iter().all(|&n| degree[n] >= 3)))
    };
    let is_node_px = |i: usize| on(i) && degree[i] != 0 && (degree[i] != 2 || in_junction(i));

    let mut g = RoadGraph::new();
    // node pixel → node id
    let mut owner: BTreeMap<usize, NodeId> = BTreeMap::new();
    for s in 0..w * h {
        if !is_node_px(s) || owner.contains_key(&s) {
            continue;
        }
        let mut cluster = vec![s];
        if in_junction(s) {
            let mut k = 0;
            while k < cluster.len() {
                for n in nbrs(cluster[k]) {
                    if in_junction(n) && !cluster.contains(&n) {
                        cluster.push(n);
                    }
                }
                k += 1;
            }
        }
        let sum = cluster.iter().fold(Point::new(0.0, 0.0), |acc, &i| acc + center(i));
        let id = g.add_node(sum * (1.0 / cluster.len() as f64));
        for i in cluster {
            owner.insert(i, id);
        }
    }

    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut direct: BTreeSet<(usize, usize)> = BTreeSet::new();
    let node_pixels: Vec<usize> = owner.keys().copied().collect();
    for &s in &node_pixels {
        let start = owner[&s];
        for first in nbrs(s) {
            if let Some(&other) = owner.get(&first) {
                // Two node pixels touching directly: a link without chain pixels.
                if other != start && direct.insert((s.min(first), s.max(first))) {
                    add(&mut g, start, other, vec![]);
                }
                continue;
            }
            if used.contains(&first) {
                continue;
            }
            let mut chain = vec![first];
            used.insert(first);
            let (mut prev, mut cur) = (s, first);
            let end = loop {
                let next = nbrs(cur).into_iter().find(|&n| n != prev).expect("chain pixel has two neighbours");
                if let Some(&id) = owner.get(&next) {
                    break id;
                }
                chain.push(next);
                used.insert(next);
                prev = cur;
                cur = next;
            };
            add(&mut g, start, end, chain.iter().map(|&i| center(i)).collect());
        }
    }

    for s in 0..w * h {
        if !on(s) || degree[s] != 2 || used.contains(&s) || owner.contains_key(&s) {
            continue;
        }
        let anchor = g.add_node(center(s));
        used.insert(s);
        let mut pts = vec![];
        let (mut prev, mut cur) = (s, nbrs(s)[0]);
        while cur != s {
            pts.push(center(cur));
            used.insert(cur);
            let next = nbrs(cur).into_iter().find(|&n| n != prev).expect("cycle pixel has two neighbours");
            prev = cur;
            cur = next;
        }
        add(&mut g, anchor, anchor, pts);
    }
    g
}

fn add(g: &mut RoadGraph, a: NodeId, b: NodeId, inner: Vec<Point>) {
    let mut pts = Vec::with_capacity(inner.len() + 2);
    pts.push(g.pos(a));
    pts.extend(inner);
    pts.push(g.pos(b));
    if a == b && pts.len() < 4 {
        log::debug!("dropping {}-pixel loop at {a}", pts.len() - 2);
        return;
    }
    match Polyline::from_points_dedup(pts) {
        Ok(line) => {
            g.add_edge(a, b, line, EdgeAttrs::default())
                .expect("traced edge ends at its nodes");
        }
        Err(e) => log::debug!("dropping degenerate trace edge {a}-{b}: {e}"),
    }
}
