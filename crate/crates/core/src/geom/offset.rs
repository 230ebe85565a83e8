use super::{Point, Polyline};
use crate::error::{Error, Result};

/// Ratio of miter length to offset above which an outer join is beveled.
const MITER_LIMIT: f64 = 2.0;

/// Parallel copy of `line` at signed distance `offset` (positive = left of travel).
///
/// Outer joins are mitered up to `2·|offset|` and beveled beyond; inner joins use
/// the intersection of the offset segments and fail if a segment collapses.
pub fn offset_polyline(line: &Polyline, offset: f64) -> Result<Polyline> {
    if offset == 0.0 || !offset.is_finite() {
        return Err(Error::Parameter(format!(
            "offset must be non-zero and finite, got {offset}"
        )));
    }
    if line.length() <= offset.abs() {
        return Err(Error::Parameter(format!(
            "line length {:.3} does not exceed |offset| {:.3}",
            line.length(),
            offset.abs()
        )));
    }
    let v = line.vertices();
    let dirs: Vec<Point> = line
        .segments()
        .map(|(a, b)| (b - a).unit().expect("polyline has no zero-length segment"))
        .collect();
    let normals: Vec<Point> = dirs.iter().map(|d| d.perp()).collect();

    let mut out = Vec::with_capacity(v.len() + 4);
    // owner[i] = index of the source vertex of out[i]
    let mut owner = Vec::with_capacity(v.len() + 4);
    out.push(v[0] + normals[0] * offset);
    owner.push(0);
    for k in 1..v.len() - 1 {
        let (n0, n1) = (normals[k - 1], normals[k]);
        let turn = dirs[k - 1].cross(dirs[k]);
        let bis = n0 + n1;
        if turn.abs() < 1e-12 && dirs[k - 1].dot(dirs[k]) > 0.0 {
            out.push(v[k] + n1 * offset);
            owner.push(k);
            continue;
        }
        let inner = turn * offset > 0.0;
        let cos_half = bis.unit().map(|m| m.dot(n1)).unwrap_or(0.0);
        if inner {
            if cos_half < 1e-9 {
                return Err(Error::Geometry(format!(
                    "offset collapses at vertex {k} (reversal)"
                )));
            }
            let m = bis.unit().unwrap();
            out.push(v[k] + m * (offset / cos_half));
            owner.push(k);
        } else if cos_half >= 1.0 / MITER_LIMIT {
            let m = bis.unit().unwrap();
            out.push(v[k] + m * (offset / cos_half));
            owner.push(k);
        } else {
            out.push(v[k] + n0 * offset);
            owner.push(k);
            out.push(v[k] + n1 * offset);
            owner.push(k);
        }
    }
    let last = v.len() - 1;
    out.push(v[last] + normals[last - 1] * offset);
    owner.push(last);

    // Every offset piece derived from source segment (i, i+1) must keep its direction.
    for w in 0..out.len() - 1 {
        let (i, j) = (owner[w], owner[w + 1]);
        if i == j {
            continue;
        }
        let d = out[w + 1] - out[w];
        if d.dot(dirs[i]) <= 0.0 {
            let k = if i == 0 { j } else { i };
            return Err(Error::Geometry(format!(
                "offset {offset} collapses near vertex {k} on a tight inner curve"
            )));
        }
    }
    Polyline::from_points_dedup(out)
}
