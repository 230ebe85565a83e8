use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{buffer_polyline, Polyline};
use crate::raster::{sample_window, BandConfig, ImageRaster};

/// Feature count for a band configuration: four statistics per band, plus
/// the normalized difference of NIR and red when NIR is present.
pub fn feature_dim(config: BandConfig) -> usize {
    match config {
        BandConfig::Rgb => 12,
        BandConfig::RgbNir => 17,
    }
}

/// Raw radiometric statistics of the pixels under a buffered segment.
///
/// Layout: for each band `mean, std, p25, p75`, then the mean NDVI if NIR is
/// present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub band_config: BandConfig,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(band_config: BandConfig, values: Vec<f64>) -> Result<Self> {
        let expected = feature_dim(band_config);
        if values.len() != expected {
            return Err(Error::Dimension { expected, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("feature values must be finite".into()));
        }
        Ok(FeatureVector { band_config, values })
    }
}

/// Buffer `segment` by `buffer` meters and summarize the image pixels whose
/// centers fall inside.
pub fn extract_features(image: &ImageRaster, segment: &Polyline, buffer: f64) -> Result<FeatureVector> {
    let poly = buffer_polyline(segment, buffer)?;
    let pixels = sample_window(image, &poly);
    if pixels.is_empty() {
        return Err(Error::NoData("segment does not cover any image pixel".into()));
    }
    let w = crate::raster::Grid::width(image);
    let idx: Vec<usize> = pixels.iter().map(|&(c, r)| r * w + c).collect();
    let mut values = Vec::with_capacity(feature_dim(image.band_config()));
    for b in 0..image.band_count() {
        let band = image.band(b);
        let v: Vec<f64> = idx.iter().map(|&i| band[i] as f64).collect();
        values.extend(band_stats(v));
    }
    if image.band_config() == BandConfig::RgbNir {
        let (red, nir) = (image.band(0), image.band(3));
        let ndvi: f64 = idx
            .iter()
            .map(|&i| {
                let (r, n) = (red[i] as f64, nir[i] as f64);
                if r + n > 0.0 {
                    (n - r) / (n + r)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
            / idx.len() as f64;
        values.push(ndvi);
    }
    FeatureVector::new(image.band_config(), values)
}

/// Mean, population standard deviation, 25th and 75th percentile.
fn band_stats(mut v: Vec<f64>) -> [f64; 4] {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    v.sort_by(f64::total_cmp);
    [mean, var.sqrt(), percentile(&v, 0.25), percentile(&v, 0.75)]
}

/// Linear interpolation between closest ranks on sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
