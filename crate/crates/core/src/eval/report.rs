use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One line of a results table. Lengths in kilometers, Hausdorff in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub gt_length: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub hausdorff: Option<f64>,
}

impl MetricsRow {
    pub fn new(gt_length: f64, precision: f64, recall: f64, f1: f64, hausdorff: f64) -> Self {
        MetricsRow {
            gt_length,
            precision: Some(precision),
            recall: Some(recall),
            f1: Some(f1),
            hausdorff: Some(hausdorff),
        }
    }
}

/// Length-weighted mean of each metric. Rows where a metric is undefined
/// do not take part in that metric's mean.
pub fn weighted_average(rows: &[MetricsRow]) -> Result<MetricsRow> {
    if rows.is_empty() {
        return Err(Error::Parameter("no rows to average".into()));
    }
    if let Some(r) = rows.iter().find(|r| !(r.gt_length > 0.0)) {
        return Err(Error::Parameter(format!("GT length must be positive, got {}", r.gt_length)));
    }
    let mean = |f: fn(&MetricsRow) -> Option<f64>| -> Option<f64> {
        // Running form keeps a single row or identical rows exact.
        let (mut m, mut w) = (0.0, 0.0);
        for r in rows {
            if let Some(v) = f(r) {
                w += r.gt_length;
                m += (v - m) * (r.gt_length / w);
            }
        }
        (w > 0.0).then_some(m)
    };
    Ok(MetricsRow {
        gt_length: rows.iter().map(|r| r.gt_length).sum(),
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
        hausdorff: mean(|r| r.hausdorff),
    })
}

fn cell(v: Option<f64>, suffix: &str) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}{suffix}"))
}

/// Plain-text table with the columns name, GT length, precision, recall,
/// F1 score and Hausdorff distance.
pub fn table_text(rows: &[(String, MetricsRow)]) -> String {
    let header = ["", "GT Length", "Precision", "Recall", "F1score", "Hausdorff distance"];
    let body: Vec<[String; 6]> = rows
        .iter()
        .map(|(name, r)| {
            [
                name.clone(),
                format!("{:.1}", r.gt_length),
                cell(r.precision, ""),
                cell(r.recall, ""),
                cell(r.f1, ""),
                cell(r.hausdorff, "m"),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..6)
        .map(|k| body.iter().map(|r| r[k].len()).chain([header[k].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { format!("{c:<w$}", w = widths[k]) } else { format!("{c:>w$}", w = widths[k]) })
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for r in &body {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round2(v: f64) -> f64 {
        (v * 100.0).round() / 100.0
    }

    #[test]
    fn table_one_average_row() {
        let rows = [
            MetricsRow::new(70.8, 0.94, 0.77, 0.82, 0.65),
            MetricsRow::new(351.5, 0.86, 0.77, 0.81, 0.58),
            MetricsRow::new(281.7, 0.87, 0.68, 0.74, 0.46),
        ];
        let avg = weighted_average(&rows).unwrap();
        let expect = [0.87, 0.73, 0.78];
        for (v, e) in [avg.precision, avg.recall, avg.f1].into_iter().zip(expect) {
            assert!((v.unwrap() - e).abs() <= 0.005, "{v:?} vs {e}");
            assert_eq!(round2(v.unwrap()), e);
        }
        assert!((avg.hausdorff.unwrap() - 0.54).abs() <= 0.01);
        assert!((avg.gt_length - 704.0).abs() < 1e-9);
    }

    #[test]
    fn single_row_is_itself() {
        let r = MetricsRow::new(12.0, 0.5, 0.6, 0.7, 0.8);
        let a = weighted_average(&[r]).unwrap();
        assert_eq!(a, r);
    }

    #[test]
    fn identical_rows_ignore_lengths() {
        let a = MetricsRow::new(1.0, 0.25, 0.5, 0.75, 1.0);
        let b = MetricsRow { gt_length: 900.0, ..a };
        let avg = weighted_average(&[a, b]).unwrap();
        assert_eq!((avg.precision, avg.recall, avg.f1, avg.hausdorff), (a.precision, a.recall, a.f1, a.hausdorff));
    }

    #[test]
    fn equal_weights_are_arithmetic_mean() {
        let a = MetricsRow::new(5.0, 0.2, 0.4, 0.6, 1.0);
        let b = MetricsRow::new(5.0, 0.6, 0.8, 1.0, 3.0);
        let avg = weighted_average(&[a, b]).unwrap();
        assert!((avg.precision.unwrap() - 0.4).abs() < 1e-12);
        assert!((avg.hausdorff.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_metric_skipped() {
        let a = MetricsRow { precision: None, ..MetricsRow::new(5.0, 0.0, 0.4, 0.6, 1.0) };
        let b = MetricsRow::new(15.0, 0.6, 0.8, 1.0, 3.0);
        let avg = weighted_average(&[a, b]).unwrap();
        assert_eq!(avg.precision, Some(0.6));
    }

    #[test]
    fn bad_length_rejected() {
        assert!(weighted_average(&[MetricsRow::new(0.0, 1.0, 1.0, 1.0, 0.0)]).is_err());
        assert!(weighted_average(&[]).is_err());
    }

    #[test]
    fn text_table_columns() {
        let t = table_text(&[
            ("Timbuktu".into(), MetricsRow::new(70.8, 0.94, 0.77, 0.82, 0.65)),
            ("empty".into(), MetricsRow { precision: None, ..MetricsRow::new(1.0, 0.0, 0.0, 0.0, 0.0) }),
        ]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("GT Length") && lines[0].ends_with("Hausdorff distance"));
        assert!(lines[1].starts_with("Timbuktu") && lines[1].ends_with("0.65m"));
        assert!(lines[2].contains("n/a"));
    }
}
