//! Forecast metrics and the experiment-matrix record type.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::System;
use crate::error::{ChaosError, Result};
use crate::integrator::fmt_f64;
use crate::models::{ModelKind, Protocol};

fn check_rows(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<usize> {
    if pred.is_empty() || target.is_empty() {
        return Err(ChaosError::InvalidParams("empty prediction/target rows".into()));
    }
    if pred.len() != target.len() {
        return Err(ChaosError::ShapeMismatch(format!(
            "{} prediction rows vs {} target rows",
            pred.len(),
            target.len()
        )));
    }
    let d = target[0].len();
    for (i, (p, t)) in pred.iter().zip(target).enumerate() {
        if p.len() != d || t.len() != d {
            return Err(ChaosError::ShapeMismatch(format!(
                "row {i} has widths {}/{} against {d}",
                p.len(),
                t.len()
            )));
        }
    }
    Ok(d)
}

/// Mean of squared differences pooled over all rows and output dimensions.
pub fn mse_rows(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    let d = check_rows(pred, target)?;
    let n = (pred.len() * d) as f64;
    let sum: f64 = pred
        .iter()
        .zip(target)
        .flat_map(|(p, t)| p.iter().zip(t).map(|(a, b)| (a - b) * (a - b)))
        .sum();
    Ok(sum / n)
}

/// Root mean squared error pooled over all elements.
pub fn rmse(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    Ok(mse_rows(pred, target)?.sqrt())
}

/// Coefficient of determination `1 - SS_res / SS_tot`, computed per output
/// dimension and uniformly averaged. Fails when any target dimension has
/// zero variance.
pub fn r2(pred: &[Vec<f64>], target: &[Vec<f64>]) -> Result<f64> {
    let d = check_rows(pred, target)?;
    let n = target.len() as f64;
    let mut total = 0.0;
    for j in 0..d {
        let mean = target.iter().map(|r| r[j]).sum::<f64>() / n;
        let ss_tot: f64 = target.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum();
        if ss_tot == 0.0 {
            return Err(ChaosError::Degenerate(format!(
                "target dimension {j} has zero variance"
            )));
        }
        let ss_res: f64 = pred
            .iter()
            .zip(target)
            .map(|(p, t)| (t[j] - p[j]) * (t[j] - p[j]))
            .sum();
        total += 1.0 - ss_res / ss_tot;
    }
    Ok(total / d as f64)
}

/// What one experiment cell measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub system: System,
    pub friction: bool,
    pub protocol: Protocol,
    /// E.g. `holdout[120,2.05]` or `trained[120,0]`.
    pub test_condition: String,
}

impl Scenario {
    pub fn label(&self) -> String {
        format!(
            "{}-{}",
            self.system,
            if self.friction { "friction" } else { "frictionless" }
        )
    }
}

/// One row of the experiment matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub model: ModelKind,
    pub scenario: Scenario,
    pub seed: u64,
    pub rmse: f64,
    pub r2: f64,
}

impl MetricsRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.rmse >= 0.0) {
            return Err(ChaosError::InvalidParams(format!("rmse must be >= 0, got {}", self.rmse)));
        }
        if self.r2 > 1.0 + 1e-12 {
            return Err(ChaosError::InvalidParams(format!("r2 cannot exceed 1, got {}", self.r2)));
        }
        Ok(())
    }
}

/// Metrics CSV: `model,system,friction,protocol,test_condition,seed,rmse,r2`.
pub fn write_metrics_csv(records: &[MetricsRecord], path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "model,system,friction,protocol,test_condition,seed,rmse,r2")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.model,
            r.scenario.system,
            r.scenario.friction,
            r.scenario.protocol,
            r.scenario.test_condition,
            r.seed,
            fmt_f64(r.rmse),
            fmt_f64(r.r2)
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricsRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ChaosError::Schema {
        row: 0,
        message: "empty metrics file".into(),
    })?;
    if header.trim() != "model,system,friction,protocol,test_condition,seed,rmse,r2" {
        return Err(ChaosError::Schema {
            row: 1,
            message: format!("unexpected metrics header '{header}'"),
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(ChaosError::Schema {
                row: idx + 1,
                message: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str, e: String| ChaosError::Schema {
            row: idx + 1,
            message: format!("bad {what}: {e}"),
        };
        records.push(MetricsRecord {
            model: fields[0].parse().map_err(|e: ChaosError| parse_err("model", e.to_string()))?,
            scenario: Scenario {
                system: fields[1].parse().map_err(|e: ChaosError| parse_err("system", e.to_string()))?,
                friction: fields[2].parse().map_err(|e: std::str::ParseBoolError| parse_err("friction", e.to_string()))?,
                protocol: match fields[3] {
                    "sliding-window" => Protocol::SlidingWindow,
                    "time-step" => Protocol::TimeStep,
                    other => return Err(parse_err("protocol", format!("unknown '{other}'"))),
                },
                test_condition: fields[4].to_string(),
            },
            seed: fields[5].parse().map_err(|e: std::num::ParseIntError| parse_err("seed", e.to_string()))?,
            rmse: fields[6].parse().map_err(|e: std::num::ParseFloatError| parse_err("rmse", e.to_string()))?,
            r2: fields[7].parse().map_err(|e: std::num::ParseFloatError| parse_err("r2", e.to_string()))?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[f64]]) -> Vec<Vec<f64>> {
        v.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn rmse_identity_and_hand_value() {
        let a = rows(&[&[1.0], &[2.0], &[3.0]]);
        let b = rows(&[&[2.0], &[2.0], &[2.0]]);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let got = rmse(&a, &b).unwrap();
        assert!((got - (2.0f64 / 3.0).sqrt()).abs() < 1e-15, "{got}");
        // rmse^2 = mse
        assert!((got * got - mse_rows(&a, &b).unwrap()).abs() < 1e-15);
        // symmetry
        assert_eq!(rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
    }

    #[test]
    fn r2_identity_mean_and_negative() {
        let target = rows(&[&[1.0], &[2.0], &[3.0]]);
        assert!((r2(&target, &target).unwrap() - 1.0).abs() < 1e-15);
        let mean = rows(&[&[2.0], &[2.0], &[2.0]]);
        assert!(r2(&mean, &target).unwrap().abs() < 1e-15);
        // SS_res = 14, SS_tot = 2 -> R2 = -6
        let zero = rows(&[&[0.0], &[0.0], &[0.0]]);
        assert!((r2(&zero, &target).unwrap() + 6.0).abs() < 1e-12);
        // r2 is not symmetric: swapping roles changes the answer
        let swapped = r2(&target, &zero);
        assert!(swapped.is_err() || (swapped.unwrap() + 6.0).abs() > 1e-9);
    }

    #[test]
    fn r2_zero_variance_target_is_degenerate() {
        let target = rows(&[&[5.0], &[5.0]]);
        let pred = rows(&[&[5.0], &[5.1]]);
        assert!(matches!(r2(&pred, &target), Err(ChaosError::Degenerate(_))));
    }

    #[test]
    fn rmse_scales_linearly_r2_affine_invariant() {
        let target = rows(&[&[1.0, -1.0], &[2.0, 0.5], &[3.0, 2.0], &[1.5, 0.0]]);
        let pred = rows(&[&[1.2, -0.8], &[1.9, 0.6], &[3.3, 1.7], &[1.4, 0.2]]);
        let base_rmse = rmse(&pred, &target).unwrap();
        let base_r2 = r2(&pred, &target).unwrap();
        let scale = |rows: &[Vec<f64>], k: f64, c: f64| -> Vec<Vec<f64>> {
            rows.iter().map(|r| r.iter().map(|v| k * v + c).collect()).collect()
        };
        let rmse_scaled = rmse(&scale(&pred, 3.0, 0.0), &scale(&target, 3.0, 0.0)).unwrap();
        assert!((rmse_scaled - 3.0 * base_rmse).abs() < 1e-12);
        let r2_mapped = r2(&scale(&pred, 3.0, -2.0), &scale(&target, 3.0, -2.0)).unwrap();
        assert!((r2_mapped - base_r2).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let a = rows(&[&[1.0, 2.0]]);
        let b = rows(&[&[1.0]]);
        assert!(rmse(&a, &b).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn metrics_csv_round_trip() {
        let records = vec![MetricsRecord {
            model: ModelKind::Lstm,
            scenario: Scenario {
                system: System::Double,
                friction: true,
                protocol: Protocol::TimeStep,
                test_condition: "holdout[120;2.05]".into(),
            },
            seed: 7,
            rmse: 0.0123,
            r2: 0.9966,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        write_metrics_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("model,system,friction,protocol,test_condition,seed,rmse,r2\n"));
        let back = read_metrics_csv(&path).unwrap();
        assert_eq!(back, records);
    }
}
