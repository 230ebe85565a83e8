use super::Polyline;
use crate::error::{Error, Result};

/// Default densification step for Hausdorff sampling, meters.
pub const DEFAULT_HAUSDORFF_STEP: f64 = 0.5;

/// Max over samples of `a` (every `step` meters, vertices included) of the exact
/// distance to `b`.
pub fn directed_hausdorff(a: &Polyline, b: &Polyline, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Parameter(format!(
            "hausdorff step must be positive, got {step}"
        )));
    }
    Ok(a.densify(step)
        .into_iter()
        .map(|p| b.distance_to_point(p))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two polylines. Identical lines
/// (in either direction) give exactly zero.
pub fn hausdorff_distance(a: &Polyline, b: &Polyline, step: f64) -> Result<f64> {
    if a.vertices().iter().eq(b.vertices()) || a.vertices().iter().eq(b.vertices().iter().rev()) {
        directed_hausdorff(a, a, step)?;
        return Ok(0.0);
    }
    Ok(directed_hausdorff(a, b, step)?.max(directed_hausdorff(b, a, step)?))
}
