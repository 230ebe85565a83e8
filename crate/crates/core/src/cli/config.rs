use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::denoise::{HoughParams, LoopParams};
use crate::error::{Error, Result};
use crate::eval::EvalParams;
use crate::junction::JunctionParams;
use crate::material::{MaterialParams, SvmParams};

use super::synth::SynthParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimplifyConfig {
    pub epsilon: f64,
    /// Links shorter than this between two junctions are contracted first.
    pub link_max_length: f64,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            epsilon: 0.75,
            link_max_length: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DangleConfig {
    pub min_length: f64,
}

impl Default for DangleConfig {
    fn default() -> Self {
        DangleConfig { min_length: 15.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopConfig {
    pub area_threshold: f64,
    pub window_pad: f64,
    pub radius_tolerance: f64,
    /// Upper bound on classify/collapse repetitions.
    pub max_passes: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        let d = LoopParams::default();
        LoopConfig {
            area_threshold: d.area_threshold,
            window_pad: d.window_pad,
            radius_tolerance: d.radius_tolerance,
            max_passes: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JunctionConfig {
    pub angle_tol_deg: f64,
    pub reach: usize,
    pub max_rounds: usize,
    /// Per-round node displacement cap in pixels.
    pub max_step_px: f64,
}

impl Default for JunctionConfig {
    fn default() -> Self {
        JunctionConfig {
            angle_tol_deg: 2.0,
            reach: 2,
            max_rounds: 5,
            max_step_px: 2.0,
        }
    }
}

/// Lane offset: a fixed distance or a quarter of each edge's measured width.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LaneOffset {
    #[default]
    Auto,
    Meters(f64),
}

impl LaneOffset {
    pub fn meters(self) -> Option<f64> {
        match self {
            LaneOffset::Auto => None,
            LaneOffset::Meters(m) => Some(m),
        }
    }
}

impl Serialize for LaneOffset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LaneOffset::Auto => s.serialize_str("auto"),
            LaneOffset::Meters(m) => s.serialize_f64(*m),
        }
    }
}

impl<'de> Deserialize<'de> for LaneOffset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(m) if m > 0.0 && m.is_finite() => Ok(LaneOffset::Meters(m)),
            Raw::Num(m) => Err(serde::de::Error::custom(format!("lane offset must be positive, got {m}"))),
            Raw::Str(s) if s == "auto" => Ok(LaneOffset::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("lane offset must be a number or \"auto\", got \"{s}\""))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaneConfig {
    pub width_min: f64,
    pub offset: LaneOffset,
}

impl Default for LaneConfig {
    fn default() -> Self {
        LaneConfig {
            width_min: 12.0,
            offset: LaneOffset::Auto,
        }
    }
}

/// Everything the command line tools read from a JSON config file. Every
/// section and key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub simplify: SimplifyConfig,
    pub dangle: DangleConfig,
    #[serde(rename = "loop")]
    pub loops: LoopConfig,
    pub hough: HoughParams,
    pub junction: JunctionConfig,
    pub lane: LaneConfig,
    pub material: MaterialParams,
    pub svm: SvmParams,
    pub eval: EvalParams,
    pub synth: SynthParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            simplify: SimplifyConfig::default(),
            dangle: DangleConfig::default(),
            loops: LoopConfig::default(),
            hough: HoughParams::default(),
            junction: JunctionConfig::default(),
            lane: LaneConfig::default(),
            material: MaterialParams::default(),
            svm: SvmParams::default(),
            eval: EvalParams::default(),
            synth: SynthParams::default(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("simplify.epsilon", self.simplify.epsilon),
            ("loop.area_threshold", self.loops.area_threshold),
            ("hough.support_min", self.hough.support_min),
            ("junction.angle_tol_deg", self.junction.angle_tol_deg),
            ("junction.max_step_px", self.junction.max_step_px),
            ("lane.width_min", self.lane.width_min),
            ("material.buffer", self.material.buffer),
            ("material.lulc_radius", self.material.lulc_radius),
            ("svm.c", self.svm.c),
            ("eval.buffer", self.eval.buffer),
            ("eval.hausdorff_step", self.eval.hausdorff_step),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("simplify.link_max_length", self.simplify.link_max_length),
            ("dangle.min_length", self.dangle.min_length),
            ("loop.window_pad", self.loops.window_pad),
            ("loop.radius_tolerance", self.loops.radius_tolerance),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{key} must be non-negative, got {v}")));
            }
        }
        if self.hough.r_min_px < 1 || self.hough.r_min_px > self.hough.r_max_px {
            return Err(Error::Config("hough radii must satisfy 1 <= r_min_px <= r_max_px".into()));
        }
        if !(0.0..=1.0).contains(&self.material.barren_water_min) {
            return Err(Error::Config("material.barren_water_min must lie in [0, 1]".into()));
        }
        if !(1..=2).contains(&self.svm.iterations) || self.svm.epochs == 0 {
            return Err(Error::Config("svm.iterations must be 1 or 2 and svm.epochs positive".into()));
        }
        if self.junction.reach == 0 {
            return Err(Error::Config("junction.reach must be at least 1".into()));
        }
        self.synth.validate()
    }

    pub fn loop_params(&self) -> LoopParams {
        LoopParams {
            area_threshold: self.loops.area_threshold,
            window_pad: self.loops.window_pad,
            radius_tolerance: self.loops.radius_tolerance,
            hough: self.hough,
        }
    }

    /// Junction parameters with the step cap converted to meters.
    pub fn junction_params(&self, pixel_size: f64) -> JunctionParams {
        JunctionParams {
            angle_tol_deg: self.junction.angle_tol_deg,
            reach: self.junction.reach,
            max_rounds: self.junction.max_rounds,
            max_step: Some(self.junction.max_step_px * pixel_size),
        }
    }
}
