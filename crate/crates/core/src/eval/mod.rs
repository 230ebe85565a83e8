//! Buffered object-wise comparison of an extracted network with ground truth.

mod report;

pub use report::{table_text, weighted_average, MetricsRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{buffer_polyline, hausdorff_distance, polygon_intersection_area, Polygon, Rect};
use crate::netgraph::{EdgeId, RoadGraph};

/// Share of a buffer that must be covered for a road to count as found.
const COVER_MIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalParams {
    pub buffer: f64,
    pub hausdorff_step: f64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            buffer: 2.0,
            hausdorff_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredStatus {
    TruePositive,
    FalsePositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredMatch {
    pub edge: EdgeId,
    pub length: f64,
    /// Share of this road's buffer covered by the union of GT buffers.
    pub coverage: f64,
    pub status: PredStatus,
    /// GT edge with the largest buffer overlap (true positives only).
    pub reference: Option<EdgeId>,
    pub hausdorff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtMatch {
    pub edge: EdgeId,
    pub length: f64,
    /// Share of this road's buffer covered by the union of predicted buffers.
    pub coverage: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub buffer_radius: f64,
    pub pred: Vec<PredMatch>,
    pub gt: Vec<GtMatch>,
}

impl MatchResult {
    pub fn true_positives(&self) -> usize {
        self.pred.iter().filter(|p| p.status == PredStatus::TruePositive).count()
    }
    pub fn false_positives(&self) -> usize {
        self.pred.len() - self.true_positives()
    }
    pub fn false_negatives(&self) -> usize {
        self.gt.iter().filter(|g| !g.matched).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Total ground-truth length, kilometers.
    pub gt_length: f64,
    pub buffer_radius: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// `None` where the denominator is zero.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub avg_hausdorff: Option<f64>,
    pub detail: MatchResult,
}

impl EvalReport {
    pub fn row(&self) -> MetricsRow {
        MetricsRow {
            gt_length: self.gt_length,
            precision: self.precision,
            recall: self.recall,
            f1: self.f1,
            hausdorff: self.avg_hausdorff,
        }
    }
}

struct Buffered {
    id: EdgeId,
    poly: Polygon,
    bbox: Rect,
}

fn buffers(g: &RoadGraph, r: f64) -> Result<Vec<Buffered>> {
    g.edges()
        .map(|(id, e)| {
            let poly = buffer_polyline(&e.geometry, r)?;
            let bbox = poly.bbox();
            Ok(Buffered { id, poly, bbox })
        })
        .collect()
}

fn near<'a>(b: &Buffered, set: &'a [Buffered]) -> Vec<&'a Buffered> {
    set.iter().filter(|o| o.bbox.intersects(&b.bbox)).collect()
}

fn coverage(b: &Buffered, others: &[&Buffered]) -> Result<f64> {
    if others.is_empty() {
        return Ok(0.0);
    }
    let polys: Vec<Polygon> = others.iter().map(|o| o.poly.clone()).collect();
    let inter = polygon_intersection_area(std::slice::from_ref(&b.poly), &polys)?;
    Ok((inter / b.poly.area()).clamp(0.0, 1.0))
}

/// Buffer both networks edge by edge and classify every road.
///
/// A predicted road is a true positive when at least half its buffer lies in
/// the union of GT buffers; a GT road is missed when less than half its
/// buffer lies in the union of predicted buffers. Each true positive is
/// paired with the GT road of largest buffer overlap (lower id on ties) and
/// their centerline Hausdorff distance is recorded.
pub fn match_roads(pred: &RoadGraph, gt: &RoadGraph, p: &EvalParams) -> Result<MatchResult> {
    if !(p.buffer > 0.0) || !(p.hausdorff_step > 0.0) {
        return Err(Error::Parameter(format!(
            "buffer and hausdorff step must be positive, got {} and {}",
            p.buffer, p.hausdorff_step
        )));
    }
    let pb = buffers(pred, p.buffer)?;
    let gb = buffers(gt, p.buffer)?;
    let mut out = MatchResult {
        buffer_radius: p.buffer,
        pred: Vec::with_capacity(pb.len()),
        gt: Vec::with_capacity(gb.len()),
    };
    for b in &pb {
        let cand = near(b, &gb);
        let cov = coverage(b, &cand)?;
        let geom = &pred.edge(b.id).expect("buffered edge").geometry;
        let mut m = PredMatch {
            edge: b.id,
            length: geom.length(),
            coverage: cov,
            status: PredStatus::FalsePositive,
            reference: None,
            hausdorff: None,
        };
        if cov >= COVER_MIN {
            let mut best: Option<(f64, EdgeId)> = None;
            for c in &cand {
                let a = polygon_intersection_area(std::slice::from_ref(&b.poly), std::slice::from_ref(&c.poly))?;
                if best.is_none_or(|(ba, _)| a > ba) {
                    best = Some((a, c.id));
                }
            }
            let (_, r) = best.expect("covered road has a nearby reference");
            let ref_geom = &gt.edge(r).expect("buffered edge").geometry;
            m.status = PredStatus::TruePositive;
            m.reference = Some(r);
            m.hausdorff = Some(hausdorff_distance(geom, ref_geom, p.hausdorff_step)?);
        }
        out.pred.push(m);
    }
    for b in &gb {
        let cov = coverage(b, &near(b, &pb))?;
        out.gt.push(GtMatch {
            edge: b.id,
            length: gt.edge(b.id).expect("buffered edge").geometry.length(),
            coverage: cov,
            matched: cov >= COVER_MIN,
        });
    }
    Ok(out)
}

/// Precision, recall, F1 and mean Hausdorff distance over true positives.
pub fn compute_metrics(m: &MatchResult) -> EvalReport {
    let (tp, fp, fn_) = (m.true_positives(), m.false_positives(), m.false_negatives());
    let ratio = |a: usize, b: usize| (a + b > 0).then(|| a as f64 / (a + b) as f64);
    let precision = ratio(tp, fp);
    let recall = ratio(tp, fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    let hd: Vec<f64> = m.pred.iter().filter_map(|p| p.hausdorff).collect();
    let avg_hausdorff = (!hd.is_empty()).then(|| hd.iter().sum::<f64>() / hd.len() as f64);
    EvalReport {
        gt_length: m.gt.iter().map(|g| g.length).sum::<f64>() / 1000.0,
        buffer_radius: m.buffer_radius,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        precision,
        recall,
        f1,
        avg_hausdorff,
        detail: m.clone(),
    }
}

/// `match_roads` followed by `compute_metrics`.
pub fn evaluate(pred: &RoadGraph, gt: &RoadGraph, p: &EvalParams) -> Result<EvalReport> {
    Ok(compute_metrics(&match_roads(pred, gt, p)?))
}
