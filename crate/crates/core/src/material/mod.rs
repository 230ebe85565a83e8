//! Road surface material: processed vs. unprocessed by a linear SVM over
//! buffered radiometric statistics, then gravel vs. sand by land-cover context.

mod features;
mod io;
mod refine;
mod svm;

pub use features::{extract_features, feature_dim, FeatureVector};
pub use io::{load_model, read_samples, save_model, write_samples, TrainingSample};
pub use refine::{refine_unprocessed, Refinement};
pub use svm::{
    classify_surface, train_linear, train_svm, Normalization, SurfaceClass, SurfaceDecision,
    SvmModel, SvmParams, TrainingMeta,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{Material, RoadGraph};
use crate::raster::{ImageRaster, LulcRaster};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialParams {
    /// Buffer radius around each edge for pixel sampling, meters.
    pub buffer: f64,
    /// Land-cover search radius around an unprocessed edge, meters.
    pub lulc_radius: f64,
    pub barren_water_min: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            buffer: 2.0,
            lulc_radius: 564.0,
            barren_water_min: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MaterialSummary {
    pub processed: usize,
    pub gravel: usize,
    pub sand: usize,
    /// Edges with no image pixels under their buffer.
    pub unknown: usize,
}

/// Label every edge of `g` with a material. Unprocessed edges are refined
/// with `lulc` when given and default to gravel otherwise.
pub fn classify_network(
    g: &mut RoadGraph,
    image: &ImageRaster,
    model: &SvmModel,
    lulc: Option<&LulcRaster>,
    p: &MaterialParams,
) -> Result<MaterialSummary> {
    model.validate()?;
    if let Some(bc) = model.band_config {
        if bc != image.band_config() {
            return Err(Error::Dimension {
                expected: feature_dim(bc),
                found: feature_dim(image.band_config()),
            });
        }
    }
    let mut s = MaterialSummary::default();
    for id in g.edge_ids() {
        let geom = g.edge(id).expect("listed edge").geometry.clone();
        let material = match extract_features(image, &geom, p.buffer) {
            Err(Error::NoData(_)) => Material::Unknown,
            Err(e) => return Err(e),
            Ok(f) => match classify_surface(model, &f)?.class {
                SurfaceClass::Processed => Material::Processed,
                SurfaceClass::Unprocessed => match lulc {
                    Some(l) => refine_unprocessed(&geom, l, p.lulc_radius, p.barren_water_min)?.material,
                    None => Material::Gravel,
                },
            },
        };
        match material {
            Material::Processed => s.processed += 1,
            Material::Gravel => s.gravel += 1,
            Material::Sand => s.sand += 1,
            Material::Unknown => s.unknown += 1,
        }
        g.edge_mut_attrs(id).expect("listed edge").material = material;
    }
    Ok(s)
}

/// Features of every edge whose material is known, labeled processed or
/// unprocessed. Edges outside the image are skipped.
pub fn training_samples(g: &RoadGraph, image: &ImageRaster, buffer: f64) -> Result<Vec<TrainingSample>> {
    let mut out = Vec::new();
    for (id, e) in g.edges() {
        let label = match e.attrs.material {
            Material::Unknown => continue,
            Material::Processed => SurfaceClass::Processed,
            Material::Gravel | Material::Sand => SurfaceClass::Unprocessed,
        };
        match extract_features(image, &e.geometry, buffer) {
            Ok(f) => out.push(TrainingSample {
                segment_id: id.to_string(),
                label,
                features: f,
            }),
            Err(Error::NoData(_)) => continue,
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}
