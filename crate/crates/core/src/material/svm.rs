use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{feature_dim, FeatureVector};
use crate::error::{Error, Result};
use crate::raster::BandConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    Processed,
    Unprocessed,
}

impl SurfaceClass {
    fn sign(self) -> f64 {
        match self {
            SurfaceClass::Processed => 1.0,
            SurfaceClass::Unprocessed => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmParams {
    /// Soft-margin penalty.
    pub c: f64,
    /// 1 = plain training; 2 = add a self-training pass over unlabeled samples.
    pub iterations: u32,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 0.01,
            iterations: 1,
            epochs: 200,
            seed: 0,
        }
    }
}

/// Per-feature z-score statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Normalization {
    fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows[0].len();
        let n = rows.len() as f64;
        let mean: Vec<f64> = (0..d).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n).collect();
        let std = (0..d)
            .map(|k| {
                let s = (rows.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / n).sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Normalization { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.mean).zip(&self.std).map(|((v, m), s)| v * s + m).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub iterations: u32,
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

/// Linear surface classifier in normalized feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub normalization: Normalization,
    /// `None` for models trained on arbitrary feature vectors.
    pub band_config: Option<BandConfig>,
    pub training: TrainingMeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceDecision {
    pub class: SurfaceClass,
    /// Signed decision value `w·z + b`.
    pub margin: f64,
}

impl SvmModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for found in [self.normalization.mean.len(), self.normalization.std.len()] {
            if found != d {
                return Err(Error::Dimension { expected: d, found });
            }
        }
        if let Some(bc) = self.band_config {
            if feature_dim(bc) != d {
                return Err(Error::Dimension { expected: feature_dim(bc), found: d });
            }
        }
        if self.normalization.std.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Parameter("normalization std must be positive".into()));
        }
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Parameter("model has non-finite weights".into()));
        }
        Ok(())
    }

    /// Decision value for raw (unnormalized) features.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: x.len() });
        }
        Ok(dot(&self.weights, &self.normalization.apply(x)) + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<SurfaceDecision> {
        let margin = self.decision(x)?;
        let class = if margin > 0.0 {
            SurfaceClass::Processed
        } else {
            SurfaceClass::Unprocessed
        };
        Ok(SurfaceDecision { class, margin })
    }
}

/// Processed iff `w·z + b > 0`; a zero margin is unprocessed.
pub fn classify_surface(model: &SvmModel, features: &FeatureVector) -> Result<SurfaceDecision> {
    if let Some(bc) = model.band_config {
        if bc != features.band_config {
            return Err(Error::Dimension {
                expected: model.dim(),
                found: features.values.len(),
            });
        }
    }
    model.predict(&features.values)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `½‖w‖² + C·Σ hinge(y(w·z + b))`.
fn objective(w: &[f64], b: f64, z: &[Vec<f64>], y: &[f64], c: f64) -> f64 {
    let hinge: f64 = z.iter().zip(y).map(|(zi, yi)| (1.0 - yi * (dot(w, zi) + b)).max(0.0)).sum();
    0.5 * dot(w, w) + c * hinge
}

/// Weights, bias and the objective after each epoch.
type Fit = (Vec<f64>, f64, Vec<f64>);

/// Stochastic subgradient descent (Pegasos schedule, bias as a constant
/// feature) over normalized rows. Each epoch visits the rows in a seeded
/// random order; the candidate kept is the best of the current and the
/// averaged iterate seen so far.
fn fit(z: &[Vec<f64>], y: &[f64], p: &SvmParams) -> Fit {
    let d = z[0].len();
    let n = z.len();
    let lambda = 1.0 / (p.c * n as f64);
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; d + 1];
    let mut avg = vec![0.0; d + 1];
    let mut best = (vec![0.0; d], 0.0, objective(&vec![0.0; d], 0.0, z, y, p.c));
    let mut log = Vec::with_capacity(p.epochs);
    let mut t = 0usize;
    for _ in 0..p.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let m = y[i] * (dot(&w[..d], &z[i]) + w[d]);
            let shrink = 1.0 - eta * lambda;
            for v in w.iter_mut() {
                *v *= shrink;
            }
            if m < 1.0 {
                for k in 0..d {
                    w[k] += eta * y[i] * z[i][k];
                }
                w[d] += eta * y[i];
            }
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                for v in w.iter_mut() {
                    *v *= radius / norm;
                }
            }
            for k in 0..=d {
                avg[k] += (w[k] - avg[k]) / t as f64;
            }
        }
        for cand in [&w, &avg] {
            let obj = objective(&cand[..d], cand[d], z, y, p.c);
            if obj < best.2 {
                best = (cand[..d].to_vec(), cand[d], obj);
            }
        }
        log.push(best.2);
    }
    (best.0, best.1, log)
}

/// Train on raw feature rows. With `iterations == 2`, unlabeled rows that
/// the first model places outside the margin are added with their predicted
/// class and the model is trained again. Returns the model and the objective
/// after each epoch of the last pass.
pub fn train_linear(
    x: &[Vec<f64>],
    labels: &[SurfaceClass],
    unlabeled: &[Vec<f64>],
    p: &SvmParams,
) -> Result<(SvmModel, Vec<f64>)> {
    if !(p.c > 0.0 && p.c.is_finite()) || p.epochs == 0 || !(1..=2).contains(&p.iterations) {
        return Err(Error::Parameter(format!(
            "need C > 0, epochs > 0 and iterations in 1..=2, got C={}, epochs={}, iterations={}",
            p.c, p.epochs, p.iterations
        )));
    }
    if x.len() != labels.len() {
        return Err(Error::Parameter("one label per sample required".into()));
    }
    if x.len() < 2 || !labels.contains(&SurfaceClass::Processed) || !labels.contains(&SurfaceClass::Unprocessed) {
        return Err(Error::SingleClass);
    }
    let d = x[0].len();
    for row in x.iter().chain(unlabeled) {
        if row.len() != d {
            return Err(Error::Dimension { expected: d, found: row.len() });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("feature values must be finite".into()));
        }
    }
    let norm = Normalization::fit(x);
    let mut z: Vec<Vec<f64>> = x.iter().map(|r| norm.apply(r)).collect();
    let mut y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let (mut w, mut b, mut log) = fit(&z, &y, p);
    if p.iterations == 2 {
        let mut added = 0;
        for r in unlabeled {
            let zr = norm.apply(r);
            let m = dot(&w, &zr) + b;
            if m.abs() > 1.0 {
                z.push(zr);
                y.push(m.signum());
                added += 1;
            }
        }
        log::info!("self-training pass adds {added} of {} unlabeled samples", unlabeled.len());
        (w, b, log) = fit(&z, &y, p);
    }
    let model = SvmModel {
        weights: w,
        bias: b,
        normalization: norm,
        band_config: None,
        training: TrainingMeta {
            iterations: p.iterations,
            c: p.c,
            epochs: p.epochs,
            seed: p.seed,
        },
    };
    Ok((model, log))
}

/// Train a surface classifier on labeled segment features.
pub fn train_svm(
    samples: &[(FeatureVector, SurfaceClass)],
    unlabeled: &[FeatureVector],
    p: &SvmParams,
) -> Result<SvmModel> {
    let Some(bc) = samples.first().map(|s| s.0.band_config) else {
        return Err(Error::SingleClass);
    };
    if let Some(bad) = samples.iter().map(|s| &s.0).chain(unlabeled).find(|f| f.band_config != bc) {
        return Err(Error::Dimension {
            expected: feature_dim(bc),
            found: bad.values.len(),
        });
    }
    let x: Vec<Vec<f64>> = samples.iter().map(|s| s.0.values.clone()).collect();
    let y: Vec<SurfaceClass> = samples.iter().map(|s| s.1).collect();
    let u: Vec<Vec<f64>> = unlabeled.iter().map(|f| f.values.clone()).collect();
    let (mut model, _) = train_linear(&x, &y, &u, p)?;
    model.band_config = Some(bc);
    Ok(model)
}
