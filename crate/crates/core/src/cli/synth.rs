//! Seeded synthetic scenes: a jittered street grid with optional traffic
//! circles and double-lane roads, its segmentation mask and imagery.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Point, Polyline};
use crate::netgraph::{EdgeAttrs, EdgeId, Material, NodeId, Provenance, RoadGraph};
use crate::raster::{rasterize_network, GeoTransform, Grid, ImageRaster, MaskClass, RasterMask};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthParams {
    pub pixel_size: f64,
    pub blocks_x: usize,
    pub blocks_y: usize,
    pub block_size: f64,
    /// Free border around the grid, meters.
    pub margin: f64,
    /// Streets are shifted and tilted so their ends move by up to half this,
    /// meters.
    pub jitter: f64,
    pub road_width: f64,
    pub contour_px: usize,
    pub circle_count: usize,
    pub circle_radius: f64,
    pub double_lane_count: usize,
    /// Paved width of a double-lane road, meters.
    pub lane_width: f64,
    /// Probability that a mask pixel gets a random label.
    pub noise: f64,
    pub nir: bool,
    pub origin_x: f64,
    pub origin_y: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            pixel_size: 0.5,
            blocks_x: 4,
            blocks_y: 4,
            block_size: 80.0,
            margin: 40.0,
            jitter: 6.0,
            road_width: 6.0,
            contour_px: 1,
            circle_count: 0,
            circle_radius: 8.0,
            double_lane_count: 0,
            lane_width: 14.0,
            noise: 0.0,
            nir: false,
            origin_x: 500_000.0,
            origin_y: 4_000_000.0,
        }
    }
}

impl SynthParams {
    pub fn raster_size(&self) -> (usize, usize) {
        let px = |blocks: usize| ((blocks as f64 * self.block_size + 2.0 * self.margin) / self.pixel_size).ceil() as usize;
        (px(self.blocks_x), px(self.blocks_y))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("synth: {m}")));
        for (k, v) in [
            ("pixel_size", self.pixel_size),
            ("block_size", self.block_size),
            ("road_width", self.road_width),
            ("circle_radius", self.circle_radius),
            ("lane_width", self.lane_width),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{k} must be positive, got {v}"));
            }
        }
        if !(self.margin >= 0.0 && self.jitter >= 0.0) {
            return bad("margin and jitter must be non-negative".into());
        }
        if self.blocks_x == 0 || self.blocks_y == 0 {
            return bad("the grid needs at least one block each way".into());
        }
        if self.jitter * 2.0 >= self.block_size / 2.0 {
            return bad("jitter must stay below a quarter block".into());
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad(format!("noise must lie in [0, 1], got {}", self.noise));
        }
        let interior = (self.blocks_x - 1) * (self.blocks_y - 1);
        if self.circle_count > interior {
            return bad(format!("at most {interior} circles fit this grid"));
        }
        if self.circle_count > 0 && self.circle_radius + self.jitter * 2.0 >= self.block_size / 3.0 {
            return bad("circle radius too large for the block size".into());
        }
        let (w, h) = self.raster_size();
        if w > 8192 || h > 8192 {
            return bad(format!("raster of {w}x{h} pixels is too large"));
        }
        Ok(())
    }

    pub fn transform(&self) -> GeoTransform {
        let (_, h) = self.raster_size();
        GeoTransform::north_up(self.origin_x, self.origin_y + h as f64 * self.pixel_size, self.pixel_size)
    }
}

#[derive(Debug, Clone)]
pub struct SynthScene {
    pub mask: RasterMask,
    pub image: ImageRaster,
    /// Centerlines as a mapper would draw them: circles as arcs, double-lane
    /// roads as two lanes.
    pub ground_truth: RoadGraph,
    /// The network actually burned into the mask.
    pub painted: RoadGraph,
}

pub fn run_synth(seed: u64, p: &SynthParams) -> Result<SynthScene> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = p.transform();
    let (w, h) = p.raster_size();
    let corner = t.apply(0.0, h as f64);

    // Straight streets, each shifted and tilted by up to `jitter` at its ends;
    // nodes sit at their crossings so every street runs straight through.
    let (nx, ny) = (p.blocks_x + 1, p.blocks_y + 1);
    let (half_w, half_h) = (p.blocks_x as f64 * p.block_size / 2.0, p.blocks_y as f64 * p.block_size / 2.0);
    let mid = Point::new(corner.x + p.margin + half_w, corner.y + p.margin + half_h);
    let mut street = |half: f64| {
        let (shift, end) = (rng.random_range(-0.5..=0.5) * p.jitter, rng.random_range(-0.5..=0.5) * p.jitter);
        (shift, end / half.max(1.0))
    };
    // Horizontal: y = mid.y + base + a + b (x - mid.x); vertical likewise in x.
    let rows: Vec<(f64, f64, f64)> = (0..ny)
        .map(|j| {
            let (a, b) = street(half_w);
            (j as f64 * p.block_size - half_h, a, b)
        })
        .collect();
    let cols: Vec<(f64, f64, f64)> = (0..nx)
        .map(|i| {
            let (a, b) = street(half_h);
            (i as f64 * p.block_size - half_w, a, b)
        })
        .collect();
    let mut g = RoadGraph::new();
    let mut grid = Vec::with_capacity(nx * ny);
    for &(ry, ra, rb) in &rows {
        for &(cx, ca, cb) in &cols {
            // x = cx + ca + cb y, y = ry + ra + rb x (relative to mid).
            let x = (cx + ca + cb * (ry + ra)) / (1.0 - cb * rb);
            let y = ry + ra + rb * x;
            grid.push(g.add_node(mid + Point::new(x, y)));
        }
    }
    let unprocessed = [Material::Processed, Material::Gravel, Material::Sand];
    let attrs = |rng: &mut ChaCha8Rng| EdgeAttrs {
        material: unprocessed[rng.random_range(0..3)],
        ..Default::default()
    };
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                let a = attrs(&mut rng);
                g.add_straight_edge(grid[j * nx + i], grid[j * nx + i + 1], a)?;
            }
            if j + 1 < ny {
                let a = attrs(&mut rng);
                g.add_straight_edge(grid[j * nx + i], grid[(j + 1) * nx + i], a)?;
            }
        }
    }

    // A road bending at a grid corner is one road.
    g.merge_degree2();

    let mut interior: Vec<NodeId> = (1..ny - 1)
        .flat_map(|j| (1..nx - 1).map(move |i| (i, j)))
        .map(|(i, j)| grid[j * nx + i])
        .collect();
    interior.shuffle(&mut rng);
    let hubs: Vec<NodeId> = interior.into_iter().take(p.circle_count).collect();
    let mut near_circle = std::collections::BTreeSet::new();
    for &hub in &hubs {
        near_circle.extend(g.incidences(hub).into_iter().map(|i| i.edge));
        add_circle(&mut g, hub, p.circle_radius)?;
    }

    let mut candidates: Vec<EdgeId> = g
        .edges()
        .filter(|(id, e)| e.geometry.len() == 2 && !near_circle.contains(id))
        .map(|(id, _)| id)
        .collect();
    candidates.shuffle(&mut rng);
    let lanes: Vec<EdgeId> = candidates.into_iter().take(p.double_lane_count).collect();

    let mut painted = g.clone();
    for &id in &lanes {
        painted.edge_mut_attrs(id).expect("edge exists").mean_width = Some(p.lane_width);
    }
    let mut gt = g;
    for &id in &lanes {
        split_lanes(&mut gt, id, p.lane_width / 4.0)?;
    }

    let mut mask = rasterize_network(&painted, &t, w, h, p.road_width, p.contour_px)?;
    if p.noise > 0.0 {
        let classes = [MaskClass::Other, MaskClass::Interior, MaskClass::Contour];
        for r in 0..h {
            for c in 0..w {
                if rng.random_bool(p.noise) {
                    mask.set(c, r, classes[rng.random_range(0..3)]);
                }
            }
        }
    }
    let image = render(&mask, &painted, p.nir, &mut rng)?;
    Ok(SynthScene {
        mask,
        image,
        ground_truth: gt,
        painted,
    })
}

/// Replace `hub` with a circle: incident roads stop on the rim, arcs join them.
fn add_circle(g: &mut RoadGraph, hub: NodeId, radius: f64) -> Result<()> {
    let c = g.pos(hub);
    let mut spokes = Vec::new();
    for inc in g.incidences(hub) {
        let e = g.remove_edge(inc.edge).expect("incident edge");
        let far = e.other(hub);
        let dir = (g.pos(far) - c).unit().ok_or_else(|| Error::Geometry("coincident grid nodes".into()))?;
        let rim = g.add_node(c + dir * radius);
        g.add_straight_edge(far, rim, e.attrs)?;
        spokes.push((dir.y.atan2(dir.x), rim));
    }
    g.remove_node(hub);
    spokes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let circle = EdgeAttrs {
        material: Material::Processed,
        ..EdgeAttrs::with_provenance(Provenance::Circle)
    };
    for k in 0..spokes.len() {
        let (a0, na) = spokes[k];
        let (mut a1, nb) = spokes[(k + 1) % spokes.len()];
        if a1 <= a0 {
            a1 += std::f64::consts::TAU;
        }
        let steps = ((a1 - a0).to_degrees() / 5.0).ceil().max(1.0) as usize;
        let mut v: Vec<Point> = (0..=steps)
            .map(|s| {
                let a = a0 + (a1 - a0) * s as f64 / steps as f64;
                c + Point::new(a.cos(), a.sin()) * radius
            })
            .collect();
        v[0] = g.pos(na);
        v[steps] = g.pos(nb);
        g.add_edge(na, nb, Polyline::new(v)?, circle.clone())?;
    }
    Ok(())
}

/// Replace a straight edge with two lanes offset to either side, meeting at
/// the end nodes.
fn split_lanes(g: &mut RoadGraph, id: EdgeId, offset: f64) -> Result<()> {
    let e = g.remove_edge(id).expect("lane edge exists");
    let (pa, pb) = (g.pos(e.a), g.pos(e.b));
    let n = (pb - pa).unit().expect("non-degenerate edge").perp();
    let attrs = EdgeAttrs {
        double_lane: true,
        ..e.attrs
    };
    for (side, prov) in [(1.0, Provenance::Traced), (-1.0, Provenance::LaneDuplicate)] {
        let s = n * (offset * side);
        let v = vec![pa, pa.lerp(pb, 0.2) + s, pa.lerp(pb, 0.8) + s, pb];
        g.add_edge(e.a, e.b, Polyline::new(v)?, EdgeAttrs { provenance: prov, ..attrs.clone() })?;
    }
    Ok(())
}

fn render(mask: &RasterMask, g: &RoadGraph, nir: bool, rng: &mut ChaCha8Rng) -> Result<ImageRaster> {
    let (w, h) = (mask.width(), mask.height());
    let t = mask.transform;
    let noise = Normal::new(0.0, 8.0).expect("valid sigma");
    let nb = if nir { 4 } else { 3 };
    let mut bands = vec![vec![0u16; w * h]; nb];
    let edges: Vec<(&Polyline, Material)> = g.edges().map(|(_, e)| (&e.geometry, e.attrs.material)).collect();
    for r in 0..h {
        for c in 0..w {
            let base = if mask.get(c, r) == MaskClass::Other {
                [70.0, 110.0, 55.0, 190.0]
            } else {
                let p = t.pixel_center(c, r);
                let m = edges
                    .iter()
                    .map(|(l, m)| (l.segments().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min), *m))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .map_or(Material::Unknown, |(_, m)| m);
                color(m)
            };
            for (b, band) in bands.iter_mut().enumerate() {
                band[r * w + c] = (base[b] + noise.sample(rng)).round().clamp(0.0, 255.0) as u16;
            }
        }
    }
    ImageRaster::new(w, h, bands, 8, t)
}

fn color(m: Material) -> [f64; 4] {
    match m {
        Material::Processed | Material::Unknown => [85.0, 85.0, 92.0, 70.0],
        Material::Gravel => [150.0, 132.0, 105.0, 115.0],
        Material::Sand => [205.0, 185.0, 145.0, 140.0],
    }
}
