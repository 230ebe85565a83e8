use crate::error::{Error, Result};
use crate::geom::Polyline;
use crate::netgraph::Material;
use crate::raster::{Grid, LulcRaster};

/// Gravel-or-sand decision for an unprocessed segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub material: Material,
    /// Barren plus water share of the land-cover pixels in the disk.
    pub fraction: f64,
    /// False when no land-cover pixel lies within the radius.
    pub covered: bool,
}

/// Count land-cover pixels whose centers lie within `radius` of the
/// segment's midpoint; sand if the barren and water share reaches
/// `barren_water_min`, gravel otherwise.
pub fn refine_unprocessed(
    segment: &Polyline,
    lulc: &LulcRaster,
    radius: f64,
    barren_water_min: f64,
) -> Result<Refinement> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
    }
    let ids: Vec<u16> = [lulc.legend.barren(), lulc.legend.water()].into_iter().flatten().collect();
    if ids.is_empty() {
        return Err(Error::Parameter("legend has neither a barren nor a water class".into()));
    }
    let mid = segment.point_at(segment.length() / 2.0);
    let t = lulc.transform;
    let r_px = radius / t.pixel_size() + 2.0;
    let (c0, r0) = t.invert(mid);
    let clamp = |v: f64, n: usize| v.max(0.0).min(n as f64) as usize;
    let (mut total, mut hits) = (0usize, 0usize);
    for r in clamp((r0 - r_px).floor(), lulc.height())..clamp((r0 + r_px).ceil(), lulc.height()) {
        for c in clamp((c0 - r_px).floor(), lulc.width())..clamp((c0 + r_px).ceil(), lulc.width()) {
            if t.pixel_center(c, r).dist(mid) <= radius {
                total += 1;
                if ids.contains(&lulc.get(c, r)) {
                    hits += 1;
                }
            }
        }
    }
    if total == 0 {
        return Ok(Refinement { material: Material::Gravel, fraction: 0.0, covered: false });
    }
    let fraction = hits as f64 / total as f64;
    let material = if fraction >= barren_water_min { Material::Sand } else { Material::Gravel };
    Ok(Refinement { material, fraction, covered: true })
}
