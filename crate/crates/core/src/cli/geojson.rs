//! GeoJSON reading and writing of road graphs.
//!
//! Each edge is a `LineString` feature whose properties carry the edge id, its
//! end node ids (`from`, `to`) and attributes. Node flags and nodes without
//! edges travel as foreign members of the collection.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Polyline};
use crate::netgraph::{Edge, EdgeAttrs, EdgeId, Material, NodeId, Provenance, RoadGraph, ENDPOINT_TOL};

// Plain structs with a tag field rather than internally tagged enums, so
// that parse errors keep their position in the text.
#[derive(Serialize, Deserialize)]
enum CollectionTag {
    FeatureCollection,
}

#[derive(Serialize, Deserialize)]
enum FeatureTag {
    Feature,
}

#[derive(Serialize, Deserialize)]
enum GeometryTag {
    LineString,
}

#[derive(Serialize, Deserialize)]
struct Document {
    #[serde(rename = "type")]
    tag: CollectionTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    no_through_road: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    isolated_nodes: Vec<IsolatedNode>,
    features: Vec<Feature>,
}

#[derive(Serialize, Deserialize)]
struct Feature {
    #[serde(rename = "type")]
    tag: FeatureTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    geometry: Geometry,
    #[serde(default)]
    properties: Properties,
}

#[derive(Serialize, Deserialize)]
struct Geometry {
    #[serde(rename = "type")]
    tag: GeometryTag,
    coordinates: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Default)]
struct Properties {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<u64>,
    #[serde(default)]
    material: Material,
    #[serde(default)]
    double_lane: bool,
    #[serde(default)]
    provenance: Provenance,
    #[serde(default)]
    mean_width: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct IsolatedNode {
    id: u64,
    x: f64,
    y: f64,
}

fn feature(id: EdgeId, e: &Edge) -> Feature {
    Feature {
        tag: FeatureTag::Feature,
        id: Some(id.0),
        geometry: Geometry {
            tag: GeometryTag::LineString,
            coordinates: e.geometry.vertices().iter().map(|p| vec![p.x, p.y]).collect(),
        },
        properties: Properties {
            id: Some(id.0),
            from: Some(e.a.0),
            to: Some(e.b.0),
            material: e.attrs.material,
            double_lane: e.attrs.double_lane,
            provenance: e.attrs.provenance,
            mean_width: e.attrs.mean_width,
        },
    }
}

/// Serialize with one feature per line.
pub fn to_geojson_string(g: &RoadGraph) -> String {
    let flagged: Vec<u64> = g.nodes().filter(|(_, n)| n.no_through_road).map(|(id, _)| id.0).collect();
    let isolated: Vec<IsolatedNode> = g
        .nodes()
        .filter(|(id, _)| g.degree(*id) == 0)
        .map(|(id, n)| IsolatedNode {
            id: id.0,
            x: n.pos.x,
            y: n.pos.y,
        })
        .collect();
    let mut out = String::from("{\"type\":\"FeatureCollection\"");
    if !flagged.is_empty() {
        out += &format!(",\"no_through_road\":{}", serde_json::to_string(&flagged).expect("serializable"));
    }
    if !isolated.is_empty() {
        out += &format!(",\"isolated_nodes\":{}", serde_json::to_string(&isolated).expect("serializable"));
    }
    out += ",\"features\":[";
    let mut first = true;
    for (id, e) in g.edges() {
        out += if first { "\n" } else { ",\n" };
        first = false;
        out += &serde_json::to_string(&feature(id, e)).expect("serializable");
    }
    out += "\n]}\n";
    out
}

pub fn write_network(g: &RoadGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(to_geojson_string(g).as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_network(path: impl AsRef<Path>) -> Result<RoadGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_geojson_str(&text)
}

struct Pending {
    id: Option<u64>,
    from: Option<u64>,
    to: Option<u64>,
    geometry: Polyline,
    attrs: EdgeAttrs,
}

fn parse_error(message: String) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message,
    }
}

/// Parse a feature collection of `LineString`s. Features without `from`/`to`
/// get their end nodes by coordinate matching.
pub fn from_geojson_str(text: &str) -> Result<RoadGraph> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Document {
        features,
        no_through_road,
        isolated_nodes,
        ..
    } = doc;
    let mut pending = Vec::with_capacity(features.len());
    for (k, Feature { id, geometry, properties: p, .. }) in features.into_iter().enumerate() {
        let coordinates = geometry.coordinates;
        let mut pts = Vec::with_capacity(coordinates.len());
        for c in &coordinates {
            if !(2..=3).contains(&c.len()) {
                return Err(parse_error(format!("feature {k}: position with {} values", c.len())));
            }
            pts.push(Point::new(c[0], c[1]));
        }
        if pts.len() < 2 {
            return Err(parse_error(format!("feature {k}: LineString needs at least 2 positions")));
        }
        let id = match (id, p.id) {
            (Some(a), Some(b)) if a != b => {
                return Err(parse_error(format!("feature {k}: id {a} disagrees with property id {b}")))
            }
            (a, b) => a.or(b),
        };
        if p.from.is_some() != p.to.is_some() {
            return Err(parse_error(format!("feature {k}: `from` and `to` must appear together")));
        }
        pending.push(Pending {
            id,
            from: p.from,
            to: p.to,
            geometry: Polyline::new(pts).map_err(|e| parse_error(format!("feature {k}: {e}")))?,
            attrs: EdgeAttrs {
                double_lane: p.double_lane,
                material: p.material,
                mean_width: p.mean_width,
                provenance: p.provenance,
            },
        });
    }

    let mut g = RoadGraph::new();
    for n in &isolated_nodes {
        g.insert_node(NodeId(n.id), Point::new(n.x, n.y))?;
    }
    for p in &pending {
        if let (Some(a), Some(b)) = (p.from, p.to) {
            for (n, pos) in [(a, p.geometry.first()), (b, p.geometry.last())] {
                if g.node(NodeId(n)).is_none() {
                    g.insert_node(NodeId(n), pos)?;
                }
            }
        }
    }
    let mut rest = Vec::new();
    for p in pending {
        match (p.id, p.from, p.to) {
            (Some(id), Some(a), Some(b)) => g.insert_edge(
                EdgeId(id),
                Edge {
                    a: NodeId(a),
                    b: NodeId(b),
                    geometry: p.geometry,
                    attrs: p.attrs,
                },
            )?,
            _ => rest.push(p),
        }
    }
    for p in rest {
        let (a, b) = match (p.from, p.to) {
            (Some(a), Some(b)) => (NodeId(a), NodeId(b)),
            _ => (node_at(&mut g, p.geometry.first()), node_at(&mut g, p.geometry.last())),
        };
        match p.id {
            Some(id) => g.insert_edge(
                EdgeId(id),
                Edge {
                    a,
                    b,
                    geometry: p.geometry,
                    attrs: p.attrs,
                },
            )?,
            None => {
                g.add_edge(a, b, p.geometry, p.attrs)?;
            }
        }
    }
    for n in no_through_road {
        g.node_mut(NodeId(n))
            .ok_or_else(|| parse_error(format!("no_through_road names unknown node {n}")))?
            .no_through_road = true;
    }
    Ok(g)
}

fn node_at(g: &mut RoadGraph, p: Point) -> NodeId {
    let hit = g.nodes().find(|(_, n)| n.pos.dist(p) <= ENDPOINT_TOL).map(|(id, _)| id);
    hit.unwrap_or_else(|| g.add_node(p))
}
