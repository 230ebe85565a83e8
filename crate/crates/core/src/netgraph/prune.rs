use std::collections::BTreeSet;

use super::{EdgeId, RoadGraph};
use crate::error::{Error, Result};

/// Removes short dangling edges (a degree-1 end and length below `min_length`)
/// and whole components shorter than `min_length`, repeating until nothing
/// changes. Chains through degree-2 nodes are merged between rounds so that
/// "length" always refers to a junction-to-end road.
pub fn prune_dangles(g: &mut RoadGraph, min_length: f64) -> Result<()> {
    if !(min_length >= 0.0) {
        return Err(Error::Parameter(format!(
            "dangle threshold must be non-negative, got {min_length}"
        )));
    }
    loop {
        g.merge_degree2();
        let adj = g.adjacency();
        let mut doomed: BTreeSet<EdgeId> = g
            .edges()
            .filter(|(_, e)| {
                !e.is_self_loop()
                    && (adj[&e.a].len() == 1 || adj[&e.b].len() == 1)
                    && e.length() < min_length
            })
            .map(|(id, _)| id)
            .collect();
        for comp in g.components() {
            let set: BTreeSet<_> = comp.into_iter().collect();
            let edges: Vec<(EdgeId, f64)> = g
                .edges()
                .filter(|(_, e)| set.contains(&e.a))
                .map(|(id, e)| (id, e.length()))
                .collect();
            if edges.iter().map(|x| x.1).sum::<f64>() < min_length {
                doomed.extend(edges.into_iter().map(|x| x.0));
            }
        }
        if doomed.is_empty() {
            break;
        }
        for id in doomed {
            g.remove_edge(id);
        }
        g.remove_orphan_nodes();
    }
    g.remove_orphan_nodes();
    Ok(())
}

/// Collapses edges shorter than `max_length` whose both ends are junctions into
/// a single junction at the edge midpoint. Thinning tends to split one road
/// crossing into two nearby branch points; this rejoins them.
pub fn contract_short_links(g: &mut RoadGraph, max_length: f64) -> Result<()> {
    if !(max_length >= 0.0) {
        return Err(Error::Parameter(format!(
            "link length must be non-negative, got {max_length}"
        )));
    }
    loop {
        let adj = g.adjacency();
        let shortest = g
            .edges()
            .filter(|(_, e)| {
                !e.is_self_loop()
                    && adj[&e.a].len() >= 3
                    && adj[&e.b].len() >= 3
                    && e.length() < max_length
            })
            .min_by(|x, y| x.1.length().total_cmp(&y.1.length()).then(x.0.cmp(&y.0)))
            .map(|(id, e)| (id, e.geometry.point_at(e.length() / 2.0)));
        let Some((id, mid)) = shortest else { break };
        g.contract_edge(id, mid)?;
    }
    g.merge_degree2();
    Ok(())
}
