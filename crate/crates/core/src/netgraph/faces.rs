use std::collections::{BTreeMap, BTreeSet};

use super::{EdgeId, NodeId, RoadGraph};
use crate::denoise::Circle;
use crate::error::{Error, Result};
use crate::geom::{bearing, ring_signed_area, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopKind {
    #[default]
    Undetermined,
    Noise,
    Circle,
}

/// A bounded face of the planar road graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    /// Boundary walk as (edge, traversed forward) pairs, counter-clockwise.
    pub edges: Vec<(EdgeId, bool)>,
    /// Node sequence of the walk (one per step, the node each step starts from).
    pub nodes: Vec<NodeId>,
    /// Closed boundary ring.
    pub ring: Vec<Point>,
    pub area: f64,
    pub kind: LoopKind,
    pub circle: Option<Circle>,
}

impl Loop {
    /// Edges walked exactly once; dangles poking into the face are walked twice
    /// and are not part of the cycle.
    pub fn cycle_edges(&self) -> BTreeSet<EdgeId> {
        let mut count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for (e, _) in &self.edges {
            *count.entry(*e).or_default() += 1;
        }
        count
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn cycle_nodes(&self, g: &RoadGraph) -> BTreeSet<NodeId> {
        self.cycle_edges()
            .into_iter()
            .filter_map(|e| g.edge(e))
            .flat_map(|e| [e.a, e.b])
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Dart {
    edge: EdgeId,
    forward: bool,
}

/// All bounded faces of the planar embedding, found by walking darts and always
/// turning to the next incident edge clockwise from the reversed arrival
/// direction. Faces come out counter-clockwise; the unbounded face (clockwise)
/// and zero-area walks around trees are dropped.
pub fn enumerate_faces(g: &RoadGraph) -> Result<Vec<Loop>> {
    // Outgoing darts per node, sorted by departure angle.
    let mut out: BTreeMap<NodeId, Vec<(f64, Dart)>> = BTreeMap::new();
    for (id, e) in g.edges() {
        let v = e.geometry.vertices();
        let n = v.len();
        out.entry(e.a).or_default().push((
            bearing(v[1] - v[0]),
            Dart {
                edge: id,
                forward: true,
            },
        ));
        out.entry(e.b).or_default().push((
            bearing(v[n - 2] - v[n - 1]),
            Dart {
                edge: id,
                forward: false,
            },
        ));
    }
    for (node, darts) in out.iter_mut() {
        darts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for w in darts.windows(2) {
            if (w[1].0 - w[0].0).abs() < 1e-12 {
                return Err(Error::Embedding(format!(
                    "edges {} and {} leave node {node} in the same direction",
                    w[0].1.edge, w[1].1.edge
                )));
            }
        }
    }
    let head = |d: Dart| -> NodeId {
        let e = g.edge(d.edge).unwrap();
        if d.forward {
            e.b
        } else {
            e.a
        }
    };
    let tail = |d: Dart| -> NodeId {
        let e = g.edge(d.edge).unwrap();
        if d.forward {
            e.a
        } else {
            e.b
        }
    };
    let next = |d: Dart| -> Dart {
        let v = head(d);
        let twin = Dart {
            edge: d.edge,
            forward: !d.forward,
        };
        let darts = &out[&v];
        let i = darts.iter().position(|x| x.1 == twin).unwrap();
        // Clockwise neighbour = previous in counter-clockwise angular order.
        darts[(i + darts.len() - 1) % darts.len()].1
    };

    let mut visited: BTreeSet<Dart> = BTreeSet::new();
    let mut loops = Vec::new();
    let all: Vec<Dart> = out.values().flatten().map(|x| x.1).collect();
    for start in all {
        if visited.contains(&start) {
            continue;
        }
        let mut walk = Vec::new();
        let mut d = start;
        loop {
            visited.insert(d);
            walk.push(d);
            d = next(d);
            if d == start {
                break;
            }
        }
        let mut ring: Vec<Point> = Vec::new();
        for dart in &walk {
            let e = g.edge(dart.edge).unwrap();
            let verts = e.geometry.vertices();
            let seq: Box<dyn Iterator<Item = &Point>> = if dart.forward {
                Box::new(verts.iter())
            } else {
                Box::new(verts.iter().rev())
            };
            for (k, p) in seq.enumerate() {
                if k == 0 && !ring.is_empty() {
                    continue;
                }
                ring.push(*p);
            }
        }
        let area = ring_signed_area(&ring);
        if area <= 1e-9 {
            continue;
        }
        loops.push(Loop {
            edges: walk.iter().map(|d| (d.edge, d.forward)).collect(),
            nodes: walk.iter().map(|&d| tail(d)).collect(),
            ring,
            area,
            kind: LoopKind::Undetermined,
            circle: None,
        });
    }
    Ok(loops)
}
