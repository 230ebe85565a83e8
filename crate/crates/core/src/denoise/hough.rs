use serde::{Deserialize, Serialize};

use super::Circle;
use crate::raster::{Grid, MaskClass, RasterMask};

/// Pixel rectangle `[col0, col0 + cols) × [row0, row0 + rows)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelWindow {
    pub col0: usize,
    pub row0: usize,
    pub cols: usize,
    pub rows: usize,
}

impl PixelWindow {
    /// Clamp to the mask; `None` if nothing is left.
    pub fn clamped(self, width: usize, height: usize) -> Option<PixelWindow> {
        let c1 = (self.col0 + self.cols).min(width);
        let r1 = (self.row0 + self.rows).min(height);
        (self.col0 < c1 && self.row0 < r1).then(|| PixelWindow {
            col0: self.col0,
            row0: self.row0,
            cols: c1 - self.col0,
            rows: r1 - self.row0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HoughParams {
    pub r_min_px: usize,
    pub r_max_px: usize,
    pub support_min: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            r_min_px: 4,
            r_max_px: 60,
            support_min: 0.6,
        }
    }
}

/// Circle in pixel units: center in (col, row) of pixel centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCircle {
    pub col: f64,
    pub row: f64,
    pub radius: f64,
    pub support: f64,
}

/// Circular Hough transform over the interior pixels of `window`.
///
/// Every interior pixel votes for each center cell whose distance rounds to
/// `r`; the vote count divided by the size of that 1-px ring is the fraction
/// of the circle covered by interior pixels. Pixels outside the window count
/// as misses. The center is the cell with the largest total coverage over all
/// radii meeting `support_min`; the radius is the midpoint of the run of
/// supported radii around its best one.
pub fn hough_circle(mask: &RasterMask, window: PixelWindow, params: &HoughParams) -> Option<PixelCircle> {
    let win = window.clamped(mask.width(), mask.height())?;
    let (w, h) = (win.cols, win.rows);
    let r_max = params.r_max_px.min((w.min(h) / 2).saturating_sub(1));
    let r_min = params.r_min_px.max(1);
    if r_max < r_min {
        return None;
    }
    let rings = ring_offsets(r_max);
    let nr = r_max - r_min + 1;
    let mut acc = vec![0u32; w * h * nr];
    let mut any = false;
    for lr in 0..h {
        for lc in 0..w {
            if mask.get(win.col0 + lc, win.row0 + lr) != MaskClass::Interior {
                continue;
            }
            any = true;
            for (k, ring) in rings[r_min..=r_max].iter().enumerate() {
                for &(dc, dr) in ring {
                    let (cc, cr) = (lc as i64 + dc, lr as i64 + dr);
                    if cc >= 0 && cr >= 0 && (cc as usize) < w && (cr as usize) < h {
                        acc[(cr as usize * w + cc as usize) * nr + k] += 1;
                    }
                }
            }
        }
    }
    if !any {
        return None;
    }
    let frac = |cell: usize, k: usize| acc[cell * nr + k] as f64 / rings[r_min + k].len() as f64;

    // Center: largest supported coverage mass; ties keep the first cell in
    // window-local row-major order.
    let mut best: Option<(usize, f64)> = None;
    for cell in 0..w * h {
        let mass: f64 = (0..nr).map(|k| frac(cell, k)).filter(|&f| f >= params.support_min).sum();
        if mass > 0.0 && best.is_none_or(|(_, m)| mass > m) {
            best = Some((cell, mass));
        }
    }
    let (cell, _) = best?;
    let peak = (0..nr)
        .max_by(|&a, &b| frac(cell, a).total_cmp(&frac(cell, b)).then(b.cmp(&a)))
        .unwrap();
    let (mut lo, mut hi) = (peak, peak);
    while lo > 0 && frac(cell, lo - 1) >= params.support_min {
        lo -= 1;
    }
    while hi + 1 < nr && frac(cell, hi + 1) >= params.support_min {
        hi += 1;
    }
    let support = (lo..=hi).map(|k| frac(cell, k)).sum::<f64>() / (hi - lo + 1) as f64;
    Some(PixelCircle {
        col: (win.col0 + cell % w) as f64,
        row: (win.row0 + cell / w) as f64,
        radius: (r_min + lo) as f64 + (hi - lo) as f64 / 2.0,
        support,
    })
}

/// Circle detection in world units; radius in meters.
pub fn detect_circle(mask: &RasterMask, window: PixelWindow, params: &HoughParams) -> Option<Circle> {
    let pc = hough_circle(mask, window, params)?;
    let t = mask.transform;
    Some(Circle {
        center: t.apply(pc.col + 0.5, pc.row + 0.5),
        radius: pc.radius * t.pixel_size(),
        support: pc.support,
    })
}

/// `rings[r]` = integer offsets whose length rounds to `r`.
fn ring_offsets(r_max: usize) -> Vec<Vec<(i64, i64)>> {
    let mut rings = vec![Vec::new(); r_max + 1];
    let m = r_max as i64 + 1;
    for dr in -m..=m {
        for dc in -m..=m {
            let r = ((dc * dc + dr * dr) as f64).sqrt().round() as usize;
            if r <= r_max {
                rings[r].push((dc, dr));
            }
        }
    }
    rings
}
