use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::FeatureVector;
use super::svm::{SurfaceClass, SvmModel};
use crate::error::{Error, Result};
use crate::raster::BandConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub segment_id: String,
    pub label: SurfaceClass,
    pub features: FeatureVector,
}

pub fn save_model(model: &SvmModel, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(f), model).map_err(|e| Error::io(path, e.into()))
}

pub fn load_model(path: &Path) -> Result<SvmModel> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let m: SvmModel = serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    m.validate()?;
    Ok(m)
}

/// CSV with header `segment_id,label,f0,f1,…`.
pub fn write_samples(samples: &[TrainingSample], path: &Path) -> Result<()> {
    let dim = samples.first().map_or(0, |s| s.features.values.len());
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["segment_id".to_string(), "label".to_string()];
    header.extend((0..dim).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for s in samples {
        if s.features.values.len() != dim {
            return Err(Error::Dimension { expected: dim, found: s.features.values.len() });
        }
        let label = match s.label {
            SurfaceClass::Processed => "processed",
            SurfaceClass::Unprocessed => "unprocessed",
        };
        let mut rec = vec![s.segment_id.clone(), label.to_string()];
        rec.extend(s.features.values.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_samples(path: &Path) -> Result<Vec<TrainingSample>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = k + 2;
        let parse_err = |column: usize, message: String| Error::Parse { line, column, message };
        if rec.len() < 3 {
            return Err(parse_err(1, "expected segment_id, label and features".into()));
        }
        let label = match rec[1].trim() {
            "processed" => SurfaceClass::Processed,
            "unprocessed" => SurfaceClass::Unprocessed,
            other => return Err(parse_err(2, format!("unknown label `{other}`"))),
        };
        let values = rec
            .iter()
            .skip(2)
            .enumerate()
            .map(|(i, v)| v.trim().parse::<f64>().map_err(|e| parse_err(i + 3, format!("`{v}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        let band_config = match values.len() {
            12 => BandConfig::Rgb,
            17 => BandConfig::RgbNir,
            n => return Err(Error::Dimension { expected: 12, found: n }),
        };
        out.push(TrainingSample {
            segment_id: rec[0].to_string(),
            label,
            features: FeatureVector::new(band_config, values)?,
        });
    }
    Ok(out)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::Parse {
            line: pos.line() as usize,
            column: 0,
            message: format!("{}: {e}", path.display()),
        },
        None => Error::io(path, std::io::Error::other(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::svm::{train_svm, SvmParams};

    fn samples() -> Vec<TrainingSample> {
        (0..6)
            .map(|i| TrainingSample {
                segment_id: format!("e{i}"),
                label: if i % 2 == 0 { SurfaceClass::Processed } else { SurfaceClass::Unprocessed },
                features: FeatureVector::new(BandConfig::Rgb, (0..12).map(|k| (i * 12 + k) as f64 / 7.0 + (i % 2) as f64 * 30.0).collect()).unwrap(),
            })
            .collect()
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_samples(&samples(), &p).unwrap();
        assert_eq!(read_samples(&p).unwrap(), samples());
    }

    #[test]
    fn csv_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "segment_id,label,f0\ne1,asphalt,1.0\n").unwrap();
        assert!(matches!(read_samples(&p), Err(Error::Parse { line: 2, column: 2, .. })));
    }

    #[test]
    fn model_json_round_trip() {
        let pairs: Vec<_> = samples().into_iter().map(|s| (s.features, s.label)).collect();
        let m = train_svm(&pairs, &[], &SvmParams::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        save_model(&m, &p).unwrap();
        assert_eq!(load_model(&p).unwrap(), m);
        let text = std::fs::read_to_string(&p).unwrap();
        for key in ["weights", "bias", "normalization", "band_config", "seed", "c", "iterations"] {
            assert!(text.contains(&format!("\"{key}\"")), "{key}");
        }
    }

    #[test]
    fn missing_model_file() {
        assert!(matches!(load_model(Path::new("/nonexistent/m.json")), Err(Error::Io { .. })));
    }
}
