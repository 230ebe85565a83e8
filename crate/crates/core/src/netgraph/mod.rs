//! The road graph: nodes with positions, edges carrying polyline geometry.
//!
//! Edge geometry endpoints always sit exactly on their node positions; moving a
//! node drags the terminal vertices of every incident edge with it.

mod faces;
mod prune;

pub use faces::{enumerate_faces, Loop, LoopKind};
pub use prune::{contract_short_links, prune_dangles};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Polyline};

/// Tolerance for edge endpoints to coincide with their node.
pub const ENDPOINT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u64);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    #[default]
    Unknown,
    Processed,
    Gravel,
    Sand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Traced,
    Collapsed,
    Circle,
    LaneDuplicate,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EdgeAttrs {
    pub double_lane: bool,
    pub material: Material,
    pub mean_width: Option<f64>,
    pub provenance: Provenance,
}

impl EdgeAttrs {
    pub fn with_provenance(provenance: Provenance) -> Self {
        EdgeAttrs {
            provenance,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub pos: Point,
    /// Set by junction smoothing when no incident pair can form a through-road.
    pub no_through_road: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub geometry: Polyline,
    pub attrs: EdgeAttrs,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }

    pub fn length(&self) -> f64 {
        self.geometry.length()
    }
}

/// One end of an edge attached to a node. Self-loops produce two incidences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub edge: EdgeId,
    pub at_start: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RoadGraph {
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<EdgeId, Edge>,
    next_node: u64,
    next_edge: u64,
}

impl PartialEq for RoadGraph {
    fn eq(&self, o: &Self) -> bool {
        self.nodes == o.nodes && self.edges == o.edges
    }
}

impl RoadGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.nodes.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_node(&mut self, pos: Point) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(
            id,
            Node {
                pos,
                no_through_road: false,
            },
        );
        id
    }

    /// Inserts a node under a caller-chosen id (used by deserialization).
    pub fn insert_node(&mut self, id: NodeId, pos: Point) -> Result<()> {
        if self.nodes.contains_key(&id) {
            return Err(Error::Geometry(format!("duplicate node id {id}")));
        }
        self.nodes.insert(
            id,
            Node {
                pos,
                no_through_road: false,
            },
        );
        self.next_node = self.next_node.max(id.0 + 1);
        Ok(())
    }

    fn checked_geometry(&self, a: NodeId, b: NodeId, geometry: Polyline) -> Result<Polyline> {
        let pa = self
            .node_pos(a)
            .ok_or_else(|| Error::Geometry(format!("unknown node {a}")))?;
        let pb = self
            .node_pos(b)
            .ok_or_else(|| Error::Geometry(format!("unknown node {b}")))?;
        if geometry.first().dist(pa) > ENDPOINT_TOL || geometry.last().dist(pb) > ENDPOINT_TOL {
            return Err(Error::Geometry(format!(
                "edge geometry endpoints do not coincide with nodes {a}, {b}"
            )));
        }
        let mut v = geometry.into_vertices();
        let n = v.len();
        v[0] = pa;
        v[n - 1] = pb;
        let g = Polyline::from_points_dedup(v)?;
        if g.length() <= 0.0 {
            return Err(Error::Geometry("zero-length edge".into()));
        }
        if a == b && g.len() < 4 {
            return Err(Error::Geometry(
                "self-loop needs at least 3 distinct vertices".into(),
            ));
        }
        Ok(g)
    }

    pub fn add_edge(
        &mut self,
        a: NodeId,
        b: NodeId,
        geometry: Polyline,
        attrs: EdgeAttrs,
    ) -> Result<EdgeId> {
        let geometry = self.checked_geometry(a, b, geometry)?;
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.edges.insert(
            id,
            Edge {
                a,
                b,
                geometry,
                attrs,
            },
        );
        Ok(id)
    }

    /// Straight two-vertex edge between two nodes.
    pub fn add_straight_edge(&mut self, a: NodeId, b: NodeId, attrs: EdgeAttrs) -> Result<EdgeId> {
        let (pa, pb) = (self.pos(a), self.pos(b));
        self.add_edge(a, b, Polyline::new(vec![pa, pb])?, attrs)
    }

    pub fn insert_edge(&mut self, id: EdgeId, edge: Edge) -> Result<()> {
        if self.edges.contains_key(&id) {
            return Err(Error::Geometry(format!("duplicate edge id {id}")));
        }
        let geometry = self.checked_geometry(edge.a, edge.b, edge.geometry)?;
        self.edges.insert(id, Edge { geometry, ..edge });
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Option<Edge> {
        self.edges.remove(&id)
    }

    pub fn remove_node(&mut self, id: NodeId) -> Option<Node> {
        self.nodes.remove(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.get_mut(&id)
    }

    pub fn node_pos(&self, id: NodeId) -> Option<Point> {
        self.nodes.get(&id).map(|n| n.pos)
    }

    /// Position of a node known to exist.
    pub fn pos(&self, id: NodeId) -> Point {
        self.nodes[&id].pos
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(&id)
    }

    pub fn edge_mut_attrs(&mut self, id: EdgeId) -> Option<&mut EdgeAttrs> {
        self.edges.get_mut(&id).map(|e| &mut e.attrs)
    }

    pub fn contains_edge(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().map(|(k, v)| (*k, v))
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.keys().copied().collect()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.keys().copied().collect()
    }

    /// Replaces an edge's geometry; endpoints must stay on the edge's nodes.
    pub fn set_edge_geometry(&mut self, id: EdgeId, geometry: Polyline) -> Result<()> {
        let (a, b) = {
            let e = self
                .edges
                .get(&id)
                .ok_or_else(|| Error::Geometry(format!("unknown edge {id}")))?;
            (e.a, e.b)
        };
        let g = self.checked_geometry(a, b, geometry)?;
        self.edges.get_mut(&id).unwrap().geometry = g;
        Ok(())
    }

    pub fn adjacency(&self) -> BTreeMap<NodeId, Vec<Incidence>> {
        let mut adj: BTreeMap<NodeId, Vec<Incidence>> =
            self.nodes.keys().map(|&n| (n, Vec::new())).collect();
        for (&id, e) in &self.edges {
            adj.entry(e.a).or_default().push(Incidence {
                edge: id,
                at_start: true,
            });
            adj.entry(e.b).or_default().push(Incidence {
                edge: id,
                at_start: false,
            });
        }
        adj
    }

    pub fn incidences(&self, n: NodeId) -> Vec<Incidence> {
        let mut out = Vec::new();
        for (&id, e) in &self.edges {
            if e.a == n {
                out.push(Incidence {
                    edge: id,
                    at_start: true,
                });
            }
            if e.b == n {
                out.push(Incidence {
                    edge: id,
                    at_start: false,
                });
            }
        }
        out
    }

    /// Number of edge ends at the node; a self-loop counts twice.
    pub fn degree(&self, n: NodeId) -> usize {
        self.incidences(n).len()
    }

    /// Moves a node and the terminal vertices of all incident edges.
    pub fn move_node(&mut self, n: NodeId, p: Point) -> Result<()> {
        let inc = self.incidences(n);
        let mut updated = Vec::with_capacity(inc.len());
        for i in &inc {
            let e = &self.edges[&i.edge];
            // A self-loop shows up twice; update both ends once.
            if updated.iter().any(|(id, _): &(EdgeId, Polyline)| *id == i.edge) {
                continue;
            }
            let mut v = e.geometry.vertices().to_vec();
            let last = v.len() - 1;
            if e.a == n {
                v[0] = p;
            }
            if e.b == n {
                v[last] = p;
            }
            let g = Polyline::from_points_dedup(v).map_err(|_| {
                Error::Geometry(format!("moving {n} collapses edge {}", i.edge))
            })?;
            if e.is_self_loop() && g.len() < 4 {
                return Err(Error::Geometry(format!(
                    "moving {n} collapses self-loop {}",
                    i.edge
                )));
            }
            updated.push((i.edge, g));
        }
        self.nodes
            .get_mut(&n)
            .ok_or_else(|| Error::Geometry(format!("unknown node {n}")))?
            .pos = p;
        for (id, g) in updated {
            self.edges.get_mut(&id).unwrap().geometry = g;
        }
        Ok(())
    }

    /// Contracts a non-loop edge: its two end nodes become one node at `pos`.
    /// Returns the surviving node. Parallel edges between the pair turn into
    /// self-loops; ones too short to stay valid are dropped.
    pub fn contract_edge(&mut self, id: EdgeId, pos: Point) -> Result<NodeId> {
        let e = self
            .edges
            .remove(&id)
            .ok_or_else(|| Error::Geometry(format!("unknown edge {id}")))?;
        if e.is_self_loop() {
            self.edges.insert(id, e);
            return Err(Error::Geometry(format!("cannot contract self-loop {id}")));
        }
        let (keep, gone) = (e.a, e.b);
        let ids: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|(_, x)| x.a == gone || x.b == gone || x.a == keep || x.b == keep)
            .map(|(k, _)| *k)
            .collect();
        for eid in ids {
            let mut x = self.edges.remove(&eid).unwrap();
            let mut v = x.geometry.vertices().to_vec();
            let last = v.len() - 1;
            if x.a == gone || x.a == keep {
                x.a = keep;
                v[0] = pos;
            }
            if x.b == gone || x.b == keep {
                x.b = keep;
                v[last] = pos;
            }
            let Ok(g) = Polyline::from_points_dedup(v) else { continue };
            if x.a == x.b && g.len() < 4 {
                continue;
            }
            x.geometry = g;
            self.edges.insert(eid, x);
        }
        self.nodes.remove(&gone);
        self.nodes.get_mut(&keep).unwrap().pos = pos;
        Ok(keep)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.values().map(Edge::length).sum()
    }

    pub fn remove_orphan_nodes(&mut self) {
        let used: BTreeSet<NodeId> = self.edges.values().flat_map(|e| [e.a, e.b]).collect();
        self.nodes.retain(|id, _| used.contains(id));
    }

    /// Connected components as node-id lists, sorted by smallest node id.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.edges.values() {
            let (ra, rb) = (find(&mut parent, index[&e.a]), find(&mut parent, index[&e.b]));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        for (i, &n) in ids.iter().enumerate() {
            groups.entry(find(&mut parent, i)).or_default().push(n);
        }
        groups.into_values().collect()
    }

    /// Merges every chain through a degree-2 node (two distinct edges) into one
    /// edge. The merged edge keeps the attributes of the longer piece.
    pub fn merge_degree2(&mut self) {
        loop {
            let adj = self.adjacency();
            let candidate = adj.iter().find_map(|(&n, inc)| {
                (inc.len() == 2 && inc[0].edge != inc[1].edge).then(|| (n, inc[0], inc[1]))
            });
            let Some((n, i0, i1)) = candidate else { break };
            let e0 = self.edges.remove(&i0.edge).unwrap();
            let e1 = self.edges.remove(&i1.edge).unwrap();
            // Orient e0 to end at n and e1 to start at n.
            let (start, g0) = if i0.at_start {
                (e0.b, e0.geometry.reversed())
            } else {
                (e0.a, e0.geometry.clone())
            };
            let (end, g1) = if i1.at_start {
                (e1.b, e1.geometry.clone())
            } else {
                (e1.a, e1.geometry.reversed())
            };
            let mut v = g0.into_vertices();
            v.extend_from_slice(&g1.vertices()[1..]);
            let attrs = if e0.length() >= e1.length() {
                e0.attrs
            } else {
                e1.attrs
            };
            let geom = Polyline::from_points_dedup(v).expect("merged chain has positive length");
            self.nodes.remove(&n);
            let id = EdgeId(self.next_edge);
            self.next_edge += 1;
            self.edges.insert(
                id,
                Edge {
                    a: start,
                    b: end,
                    geometry: geom,
                    attrs,
                },
            );
        }
    }

    /// Checks the structural invariants; used by tests and debug assertions.
    pub fn validate(&self) -> Result<()> {
        for (&id, e) in &self.edges {
            let (pa, pb) = match (self.node_pos(e.a), self.node_pos(e.b)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::Geometry(format!("edge {id} references a missing node"))),
            };
            if e.geometry.first().dist(pa) > ENDPOINT_TOL || e.geometry.last().dist(pb) > ENDPOINT_TOL {
                return Err(Error::Geometry(format!("edge {id} endpoints drifted off its nodes")));
            }
            if e.geometry.length() <= 0.0 {
                return Err(Error::Geometry(format!("edge {id} has zero length")));
            }
        }
        let used: BTreeSet<NodeId> = self.edges.values().flat_map(|e| [e.a, e.b]).collect();
        if let Some((id, _)) = self.nodes.iter().find(|(id, _)| !used.contains(id)) {
            return Err(Error::Geometry(format!("node {id} has no edges")));
        }
        Ok(())
    }
}

/// Nodes with degree ≥ 3 (a self-loop contributes 2).
pub fn junctions(g: &RoadGraph) -> Vec<NodeId> {
    g.adjacency()
        .into_iter()
        .filter(|(_, inc)| inc.len() >= 3)
        .map(|(n, _)| n)
        .collect()
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    pub fn line(pts: &[(f64, f64)]) -> Polyline {
        Polyline::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    /// Builds a graph from straight or polyline edges given as coordinate lists;
    /// endpoints that coincide share a node.
    pub fn graph_from_lines(lines: &[&[(f64, f64)]]) -> RoadGraph {
        let mut g = RoadGraph::new();
        let find_or_add = |g: &mut RoadGraph, p: Point| -> NodeId {
            if let Some((id, _)) = g.nodes().find(|(_, n)| n.pos.dist(p) < 1e-9) {
                return id;
            }
            g.add_node(p)
        };
        for l in lines {
            let pl = line(l);
            let a = find_or_add(&mut g, pl.first());
            let b = find_or_add(&mut g, pl.last());
            g.add_edge(a, b, pl, EdgeAttrs::default()).unwrap();
        }
        g
    }
}
