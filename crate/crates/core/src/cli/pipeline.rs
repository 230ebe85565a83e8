use log::{debug, info};

use super::config::Config;
use crate::denoise::{classify_loops, collapse_noise_loops, duplicate_double_lanes, flag_double_lanes, replace_circle_loops};
use crate::error::Result;
use crate::junction::smooth_all;
use crate::netgraph::{contract_short_links, LoopKind, RoadGraph};
use crate::raster::RasterMask;
use crate::simplify::simplify_graph;
use crate::skeleton::{thin, trace};

/// Mask to vector network: skeleton, line recovery, denoising, junction
/// smoothing, circle reconstruction and lane duplication.
pub fn run_reconstruct(mask: &RasterMask, cfg: &Config) -> Result<RoadGraph> {
    cfg.validate()?;
    let px = mask.transform.pixel_size();
    let skel = thin(mask);
    debug!("skeleton: {} pixels", skel.on_count());
    let mut g = trace(&skel);
    info!("traced {} nodes, {} edges", g.node_count(), g.edge_count());
    if g.is_empty() {
        return Ok(g);
    }

    contract_short_links(&mut g, cfg.simplify.link_max_length).map_err(|e| e.in_stage("contract"))?;
    g = simplify_graph(&g, cfg.simplify.epsilon).map_err(|e| e.in_stage("simplify"))?;

    let loop_params = cfg.loop_params();
    let mut loops = classify_loops(&g, mask, &loop_params).map_err(|e| e.in_stage("classify_loops"))?;
    for _ in 0..cfg.loops.max_passes {
        if !loops.iter().any(|l| l.kind == LoopKind::Noise) {
            break;
        }
        g = collapse_noise_loops(&g, &loops).map_err(|e| e.in_stage("collapse_noise_loops"))?;
        loops = classify_loops(&g, mask, &loop_params).map_err(|e| e.in_stage("classify_loops"))?;
    }
    crate::netgraph::prune_dangles(&mut g, cfg.dangle.min_length).map_err(|e| e.in_stage("prune_dangles"))?;
    info!("denoised: {} nodes, {} edges", g.node_count(), g.edge_count());

    let report = smooth_all(&mut g, &cfg.junction_params(px)).map_err(|e| e.in_stage("smooth_junctions"))?;
    debug!(
        "junction smoothing: {} rounds, max move {:.3} m",
        report.rounds,
        report.max_displacement.iter().copied().fold(0.0, f64::max)
    );

    let loops = classify_loops(&g, mask, &loop_params).map_err(|e| e.in_stage("classify_loops"))?;
    g = replace_circle_loops(&g, &loops).map_err(|e| e.in_stage("replace_circles"))?;

    flag_double_lanes(&mut g, mask, cfg.lane.width_min);
    g = duplicate_double_lanes(&g, cfg.lane.offset.meters()).map_err(|e| e.in_stage("duplicate_lanes"))?;
    info!("output: {} nodes, {} edges, {:.1} m", g.node_count(), g.edge_count(), g.total_length());
    Ok(g)
}
