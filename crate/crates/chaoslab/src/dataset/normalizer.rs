//! Per-feature min-max scaling fit on training data only.

use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};

/// Maps each feature affinely onto [0, 1] using the min/max seen at fit time.
/// A constant feature (max = min) maps to 0 by convention and inverts to its
/// constant. Construction requires data, so an unfitted transform is
/// unrepresentable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxNormalizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxNormalizer {
    /// Fits per-feature minima and maxima over the given rows.
    pub fn fit(rows: &[&[f64]]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(ChaosError::InvalidParams("cannot fit a normalizer on 0 rows".into()));
        };
        let width = first.len();
        if width == 0 {
            return Err(ChaosError::InvalidParams("cannot fit a normalizer on empty rows".into()));
        }
        let mut mins = vec![f64::INFINITY; width];
        let mut maxs = vec![f64::NEG_INFINITY; width];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(ChaosError::ShapeMismatch(format!(
                    "row {i} has {} features, expected {width}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ChaosError::NonFinite(format!("feature {j} of row {i}")));
                }
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn width(&self) -> usize {
        self.mins.len()
    }

    pub fn mins(&self) -> &[f64] {
        &self.mins
    }

    pub fn maxs(&self) -> &[f64] {
        &self.maxs
    }

    /// `(x - min) / (max - min)` per feature; constant features map to 0.
    pub fn transform_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_width(row)?;
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let span = self.maxs[j] - self.mins[j];
                if span == 0.0 {
                    0.0
                } else {
                    (v - self.mins[j]) / span
                }
            })
            .collect())
    }

    /// Exact algebraic inverse for non-constant features; constants return
    /// their fitted value.
    pub fn inverse_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        self.check_width(row)?;
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let span = self.maxs[j] - self.mins[j];
                self.mins[j] + v * span
            })
            .collect())
    }

    /// A normalizer over a contiguous column sub-range, sharing the fitted
    /// statistics. Used to scale feature and target column blocks separately.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            mins: self.mins[range.clone()].to_vec(),
            maxs: self.maxs[range].to_vec(),
        }
    }

    fn check_width(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.width() {
            return Err(ChaosError::ShapeMismatch(format!(
                "row has {} features, normalizer fit on {}",
                row.len(),
                self.width()
            )));
        }
        Ok(())
    }

    /// Persists as `{"mins": [...], "maxs": [...]}`.
    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_maps_to_half() {
        let rows: Vec<&[f64]> = vec![&[0.0], &[5.0], &[10.0]];
        let n = MinMaxNormalizer::fit(&rows).unwrap();
        assert_eq!(n.transform_row(&[5.0]).unwrap(), vec![0.5]);
        assert_eq!(n.transform_row(&[0.0]).unwrap(), vec![0.0]);
        assert_eq!(n.transform_row(&[10.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn constant_feature_convention() {
        let rows: Vec<&[f64]> = vec![&[7.0], &[7.0], &[7.0]];
        let n = MinMaxNormalizer::fit(&rows).unwrap();
        assert_eq!(n.transform_row(&[7.0]).unwrap(), vec![0.0]);
        assert_eq!(n.inverse_row(&[0.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn round_trip_within_1e12() {
        let rows: Vec<&[f64]> = vec![&[-3.0, 100.0], &[2.5, 250.0], &[9.0, 110.0]];
        let n = MinMaxNormalizer::fit(&rows).unwrap();
        for probe in [[-3.0, 100.0], [1.234, 217.5], [9.0, 250.0]] {
            let back = n.inverse_row(&n.transform_row(&probe).unwrap()).unwrap();
            for (a, b) in back.iter().zip(probe) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn out_of_range_test_rows_escape_unit_interval() {
        // no-leakage property: statistics come from the fit rows alone
        let rows: Vec<&[f64]> = vec![&[0.0], &[1.0]];
        let n = MinMaxNormalizer::fit(&rows).unwrap();
        assert!(n.transform_row(&[2.0]).unwrap()[0] > 1.0);
        assert!(n.transform_row(&[-1.0]).unwrap()[0] < 0.0);
    }

    #[test]
    fn fit_errors() {
        assert!(MinMaxNormalizer::fit(&[]).is_err());
        let rows: Vec<&[f64]> = vec![&[1.0, 2.0], &[1.0]];
        assert!(MinMaxNormalizer::fit(&rows).is_err());
        let rows: Vec<&[f64]> = vec![&[f64::NAN]];
        assert!(MinMaxNormalizer::fit(&rows).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rows: Vec<&[f64]> = vec![&[0.0, -1.0], &[2.0, 1.0]];
        let n = MinMaxNormalizer::fit(&rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("norm.json");
        n.write_json(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"mins\""));
        assert!(text.contains("\"maxs\""));
        assert_eq!(MinMaxNormalizer::read_json(&path).unwrap(), n);
    }
}
