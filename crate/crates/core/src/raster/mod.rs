//! Georeferenced rasters: the 3-class segmentation mask, multispectral imagery,
//! and land-cover labels.

mod edt;
mod io;
mod rasterize;
mod sample;

pub use edt::distance_to_background;
pub use io::{
    load_image, load_lulc, load_mask, read_legend, read_world_file, write_image, write_lulc,
    write_mask, write_world_file,
};
pub use rasterize::rasterize_network;
pub use sample::sample_window;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Affine pixel→world mapping. `origin` is the center of pixel (0, 0), as in a
/// world file:
///
/// ```text
/// x = origin_x + col * pixel_width + row * rot_x
/// y = origin_y + col * rot_y       + row * pixel_height
/// ```
///
/// for integer (col, row). Fractional coordinates put pixel centers at `+0.5`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoTransform {
    pub origin_x: f64,
    pub origin_y: f64,
    pub pixel_width: f64,
    pub pixel_height: f64,
    pub rot_x: f64,
    pub rot_y: f64,
}

impl GeoTransform {
    /// North-up transform with square pixels; `(corner_x, corner_y)` is the
    /// outer upper-left corner of the raster.
    pub fn north_up(corner_x: f64, corner_y: f64, pixel_size: f64) -> Self {
        GeoTransform {
            origin_x: corner_x + pixel_size / 2.0,
            origin_y: corner_y - pixel_size / 2.0,
            pixel_width: pixel_size,
            pixel_height: -pixel_size,
            rot_x: 0.0,
            rot_y: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.origin_x,
            self.origin_y,
            self.pixel_width,
            self.pixel_height,
            self.rot_x,
            self.rot_y,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite geotransform".into()));
        }
        if self.pixel_width == 0.0 || self.pixel_height == 0.0 || self.det().abs() < 1e-15 {
            return Err(Error::Parameter("degenerate geotransform".into()));
        }
        Ok(())
    }

    fn det(&self) -> f64 {
        self.pixel_width * self.pixel_height - self.rot_x * self.rot_y
    }

    /// World position of fractional pixel coordinates (corner of pixel (0, 0)
    /// at `(0, 0)`).
    pub fn apply(&self, col: f64, row: f64) -> Point {
        self.center_at(col - 0.5, row - 0.5)
    }

    fn center_at(&self, c: f64, r: f64) -> Point {
        Point::new(
            self.origin_x + c * self.pixel_width + r * self.rot_x,
            self.origin_y + c * self.rot_y + r * self.pixel_height,
        )
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Point {
        self.center_at(col as f64, row as f64)
    }

    /// Fractional (col, row) of a world point; inverse of [`apply`](Self::apply).
    pub fn invert(&self, p: Point) -> (f64, f64) {
        let dx = p.x - self.origin_x;
        let dy = p.y - self.origin_y;
        let d = self.det();
        let col = (dx * self.pixel_height - dy * self.rot_x) / d;
        let row = (dy * self.pixel_width - dx * self.rot_y) / d;
        (col + 0.5, row + 0.5)
    }

    /// Ground size of one pixel (geometric mean of the axis scales), meters.
    pub fn pixel_size(&self) -> f64 {
        self.det().abs().sqrt()
    }
}

/// Anything laid out as a georeferenced pixel grid.
pub trait Grid {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn transform(&self) -> &GeoTransform;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum MaskClass {
    Other = 0,
    Interior = 1,
    Contour = 2,
}

impl TryFrom<u8> for MaskClass {
    type Error = u8;
    fn try_from(v: u8) -> std::result::Result<Self, u8> {
        match v {
            0 => Ok(MaskClass::Other),
            1 => Ok(MaskClass::Interior),
            2 => Ok(MaskClass::Contour),
            other => Err(other),
        }
    }
}

/// Per-pixel road segmentation, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterMask {
    width: usize,
    height: usize,
    labels: Vec<MaskClass>,
    pub transform: GeoTransform,
}

impl RasterMask {
    pub fn new(width: usize, height: usize, transform: GeoTransform) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parameter("mask must have positive size".into()));
        }
        transform.validate()?;
        Ok(RasterMask {
            width,
            height,
            labels: vec![MaskClass::Other; width * height],
            transform,
        })
    }

    pub fn from_labels(
        width: usize,
        height: usize,
        labels: Vec<MaskClass>,
        transform: GeoTransform,
    ) -> Result<Self> {
        if labels.len() != width * height || width == 0 || height == 0 {
            return Err(Error::Parameter(format!(
                "label buffer of {} does not match {width}x{height}",
                labels.len()
            )));
        }
        transform.validate()?;
        Ok(RasterMask {
            width,
            height,
            labels,
            transform,
        })
    }

    pub fn get(&self, col: usize, row: usize) -> MaskClass {
        self.labels[row * self.width + col]
    }

    /// Label at signed coordinates; out-of-bounds reads as `Other`.
    pub fn get_i(&self, col: isize, row: isize) -> MaskClass {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height {
            MaskClass::Other
        } else {
            self.get(col as usize, row as usize)
        }
    }

    pub fn set(&mut self, col: usize, row: usize, c: MaskClass) {
        self.labels[row * self.width + col] = c;
    }

    pub fn labels(&self) -> &[MaskClass] {
        &self.labels
    }

    pub fn count(&self, c: MaskClass) -> usize {
        self.labels.iter().filter(|&&l| l == c).count()
    }

    /// Foreground used for thinning: the interior class only.
    pub fn interior_bits(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l == MaskClass::Interior).collect()
    }
}

impl Grid for RasterMask {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn transform(&self) -> &GeoTransform {
        &self.transform
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandConfig {
    Rgb,
    RgbNir,
}

impl BandConfig {
    pub fn band_count(self) -> usize {
        match self {
            BandConfig::Rgb => 3,
            BandConfig::RgbNir => 4,
        }
    }
}

/// Multiband imagery (RGB or RGB-NIR), intensities widened to `u16`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRaster {
    width: usize,
    height: usize,
    /// One plane per band, row-major.
    bands: Vec<Vec<u16>>,
    pub bit_depth: u8,
    pub transform: GeoTransform,
}

impl ImageRaster {
    pub fn new(
        width: usize,
        height: usize,
        bands: Vec<Vec<u16>>,
        bit_depth: u8,
        transform: GeoTransform,
    ) -> Result<Self> {
        if !(bands.len() == 3 || bands.len() == 4) {
            return Err(Error::Parameter(format!(
                "imagery needs 3 or 4 bands, got {}",
                bands.len()
            )));
        }
        if width == 0 || height == 0 || bands.iter().any(|b| b.len() != width * height) {
            return Err(Error::Parameter("band planes do not match image size".into()));
        }
        transform.validate()?;
        Ok(ImageRaster {
            width,
            height,
            bands,
            bit_depth,
            transform,
        })
    }

    pub fn band_config(&self) -> BandConfig {
        if self.bands.len() == 4 {
            BandConfig::RgbNir
        } else {
            BandConfig::Rgb
        }
    }

    pub fn band(&self, b: usize) -> &[u16] {
        &self.bands[b]
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    pub fn pixel(&self, col: usize, row: usize) -> Vec<u16> {
        let i = row * self.width + col;
        self.bands.iter().map(|b| b[i]).collect()
    }
}

impl Grid for ImageRaster {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn transform(&self) -> &GeoTransform {
        &self.transform
    }
}

/// Land-cover class legend: label id → class name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Legend {
    pub classes: BTreeMap<u16, String>,
}

impl Legend {
    pub fn id_of(&self, name: &str) -> Option<u16> {
        self.classes
            .iter()
            .find(|(_, n)| n.eq_ignore_ascii_case(name))
            .map(|(id, _)| *id)
    }

    pub fn barren(&self) -> Option<u16> {
        self.id_of("barren")
    }

    pub fn water(&self) -> Option<u16> {
        self.id_of("water")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LulcRaster {
    width: usize,
    height: usize,
    labels: Vec<u16>,
    pub legend: Legend,
    pub transform: GeoTransform,
}

impl LulcRaster {
    pub fn new(
        width: usize,
        height: usize,
        labels: Vec<u16>,
        legend: Legend,
        transform: GeoTransform,
    ) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::Parameter("label plane does not match raster size".into()));
        }
        transform.validate()?;
        if let Some(bad) = labels.iter().find(|l| !legend.classes.contains_key(l)) {
            return Err(Error::Parameter(format!("label id {bad} is not in the legend")));
        }
        Ok(LulcRaster {
            width,
            height,
            labels,
            legend,
            transform,
        })
    }

    pub fn get(&self, col: usize, row: usize) -> u16 {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }
}

impl Grid for LulcRaster {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn transform(&self) -> &GeoTransform {
        &self.transform
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_round_trip() {
        let t = GeoTransform {
            origin_x: 500.0,
            origin_y: 1000.0,
            pixel_width: 0.5,
            pixel_height: -0.5,
            rot_x: 0.01,
            rot_y: -0.02,
        };
        let p = t.apply(12.25, 7.5);
        let (c, r) = t.invert(p);
        assert!((c - 12.25).abs() < 1e-9 && (r - 7.5).abs() < 1e-9);
    }

    #[test]
    fn degenerate_transform_rejected() {
        let mut t = GeoTransform::north_up(0.0, 0.0, 0.5);
        t.pixel_width = 0.0;
        assert!(RasterMask::new(4, 4, t).is_err());
    }

    #[test]
    fn mask_class_range() {
        assert_eq!(MaskClass::try_from(2), Ok(MaskClass::Contour));
        assert_eq!(MaskClass::try_from(7), Err(7));
    }
}
