//! Loop clean-up, traffic circles and double lanes.

mod circles;
mod fit;
mod hough;
mod lanes;
mod loops;

pub use circles::replace_circle_loops;
pub use fit::{fit_circle, CircleFit};
pub use hough::{detect_circle, hough_circle, HoughParams, PixelCircle, PixelWindow};
pub use lanes::{duplicate_double_lanes, flag_double_lanes};
pub use loops::{classify_loops, collapse_noise_loops, LoopParams};

use serde::{Deserialize, Serialize};

use crate::geom::Point;

/// A detected traffic circle in world units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
    /// Fraction of the circumference covered by interior pixels.
    pub support: f64,
}
