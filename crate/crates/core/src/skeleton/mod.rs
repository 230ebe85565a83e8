//! Interior-class thinning and skeleton-to-graph tracing.

mod thin;
mod trace;

pub use thin::thin;
pub use trace::trace;

use crate::error::{Error, Result};
use crate::raster::{GeoTransform, Grid, MaskClass, RasterMask};

/// One-pixel-wide binary skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonRaster {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    pub transform: GeoTransform,
}

/// 8-neighbour offsets, clockwise from north: P2..P9 in the usual thinning
/// notation.
pub(crate) const N8: [(i64, i64); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

impl SkeletonRaster {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>, transform: GeoTransform) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::Parameter("skeleton bits do not match raster size".into()));
        }
        transform.validate()?;
        Ok(SkeletonRaster {
            width,
            height,
            bits,
            transform,
        })
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    /// Out-of-bounds reads as off.
    pub fn get_i(&self, col: i64, row: i64) -> bool {
        col >= 0
            && row >= 0
            && (col as usize) < self.width
            && (row as usize) < self.height
            && self.bits[row as usize * self.width + col as usize]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn on_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of on pixels among the 8 neighbours.
    pub fn degree(&self, col: usize, row: usize) -> usize {
        N8.iter()
            .filter(|(dc, dr)| self.get_i(col as i64 + dc, row as i64 + dr))
            .count()
    }

    /// Skeleton as a mask (on = interior) for debug dumps.
    pub fn to_mask(&self) -> RasterMask {
        let labels = self
            .bits
            .iter()
            .map(|&b| if b { MaskClass::Interior } else { MaskClass::Other })
            .collect();
        RasterMask::from_labels(self.width, self.height, labels, self.transform)
            .expect("skeleton has valid dimensions")
    }
}

impl Grid for SkeletonRaster {
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
