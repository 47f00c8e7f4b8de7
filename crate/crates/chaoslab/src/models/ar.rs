//! Autoregressive least-squares fit.
//!
//! Each output dimension is regressed on the previous `p` full rows plus an
//! intercept: regressor layout `[x_{t-1}, x_{t-2}, ..., x_{t-p}, 1]` with each
//! lag contributing `d` values. Fitting goes through the normal equations
//! with a pivot-skipping Gaussian solve, so exactly collinear designs (e.g. a
//! constant series) still produce an exact-fitting solution instead of
//! failing.

use crate::error::{ChaosError, Result};
use crate::nncore::array::NumArray;

/// Fits AR coefficients on one series of `d`-dimensional rows.
/// Returns a `[d, p*d + 1]` matrix, one coefficient row per output dimension.
pub fn fit_ar(series: &[Vec<f64>], p: usize) -> Result<NumArray> {
    fit_ar_stacked(&[series], p)
}

/// Fits one AR model over several series jointly (design rows never cross a
/// series boundary).
pub fn fit_ar_stacked(series_list: &[&[Vec<f64>]], p: usize) -> Result<NumArray> {
    if p == 0 {
        return Err(ChaosError::InvalidParams("AR order must be >= 1".into()));
    }
    let d = series_list
        .first()
        .and_then(|s| s.first())
        .map(|r| r.len())
        .ok_or_else(|| ChaosError::InvalidParams("empty series".into()))?;
    let n_features = p * d + 1;

    let mut rows = 0usize;
    let mut xtx = vec![vec![0.0; n_features]; n_features];
    let mut xty = vec![vec![0.0; d]; n_features];
    let mut feature = vec![0.0; n_features];
    for series in series_list {
        if series.len() <= p {
            return Err(ChaosError::InvalidParams(format!(
                "series of {} rows cannot support AR order {p}",
                series.len()
            )));
        }
        for t in p..series.len() {
            for lag in 1..=p {
                feature[(lag - 1) * d..lag * d].copy_from_slice(&series[t - lag]);
            }
            feature[n_features - 1] = 1.0;
            for i in 0..n_features {
                if feature[i] == 0.0 {
                    continue;
                }
                for j in i..n_features {
                    xtx[i][j] += feature[i] * feature[j];
                }
                for k in 0..d {
                    xty[i][k] += feature[i] * series[t][k];
                }
            }
            rows += 1;
        }
    }
    if rows == 0 {
        return Err(ChaosError::InvalidParams("no design rows".into()));
    }
    for i in 0..n_features {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    let mut coeff = vec![0.0; d * n_features];
    for k in 0..d {
        let rhs: Vec<f64> = (0..n_features).map(|i| xty[i][k]).collect();
        let sol = solve_pivot_skip(&xtx, &rhs)?;
        coeff[k * n_features..(k + 1) * n_features].copy_from_slice(&sol);
    }
    NumArray::from_vec(coeff, &[d, n_features])
}

/// Gaussian elimination on the (always consistent) normal equations; columns
/// whose pivot collapses are fixed at zero, which picks one exact-fitting
/// solution for rank-deficient designs.
fn solve_pivot_skip(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let tol = scale * 1e-12;
    let mut pivots: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for col in 0..n {
        let pivot = (0..n)
            .filter(|r| !used[*r])
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()));
        let Some(pivot) = pivot else { break };
        if m[pivot][col].abs() <= tol {
            continue; // dependent column: coefficient stays zero
        }
        used[pivot] = true;
        pivots[col] = Some(pivot);
        for row in 0..n {
            if row == pivot || m[row][col] == 0.0 {
                continue;
            }
            let f = m[row][col] / m[pivot][col];
            for k in 0..n {
                m[row][k] -= f * m[pivot][k];
            }
            rhs[row] -= f * rhs[pivot];
        }
    }
    let mut x = vec![0.0; n];
    for col in 0..n {
        if let Some(r) = pivots[col] {
            x[col] = rhs[r] / m[r][col];
        }
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(ChaosError::Numerical("AR least-squares solve produced non-finite coefficients".into()));
    }
    Ok(x)
}

/// One-step AR prediction from the last `p` rows of `history` (most recent
/// row last).
pub fn ar_predict_next(coeff: &NumArray, history: &[Vec<f64>], p: usize) -> Vec<f64> {
    let d = coeff.shape()[0];
    let n_features = coeff.shape()[1];
    let mut feature = vec![0.0; n_features];
    let len = history.len();
    for lag in 1..=p {
        feature[(lag - 1) * d..lag * d].copy_from_slice(&history[len - lag]);
    }
    feature[n_features - 1] = 1.0;
    (0..d)
        .map(|k| {
            coeff.data()[k * n_features..(k + 1) * n_features]
                .iter()
                .zip(&feature)
                .map(|(c, f)| c * f)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_ar1_coefficient() {
        let mut series = vec![vec![1.0]];
        for t in 1..200 {
            series.push(vec![0.9 * series[t - 1][0]]);
        }
        let coeff = fit_ar(&series, 1).unwrap();
        assert_eq!(coeff.shape(), &[1, 2]);
        assert!((coeff.data()[0] - 0.9).abs() < 1e-8, "slope {}", coeff.data()[0]);
        assert!(coeff.data()[1].abs() < 1e-8, "intercept {}", coeff.data()[1]);
    }

    #[test]
    fn recovers_ar2_coefficients() {
        // damped oscillation with |roots| = 0.99 keeps the design well
        // conditioned over 200 steps
        let (a, b) = (1.4, -0.9801);
        let mut series = vec![vec![1.0], vec![0.7]];
        for t in 2..200 {
            series.push(vec![a * series[t - 1][0] + b * series[t - 2][0]]);
        }
        let coeff = fit_ar(&series, 2).unwrap();
        assert!((coeff.data()[0] - a).abs() < 1e-6, "a {}", coeff.data()[0]);
        assert!((coeff.data()[1] - b).abs() < 1e-6, "b {}", coeff.data()[1]);
        assert!(coeff.data()[2].abs() < 1e-6, "intercept {}", coeff.data()[2]);
    }

    #[test]
    fn constant_series_predicts_exactly() {
        let series = vec![vec![7.0]; 60];
        let coeff = fit_ar(&series, 3).unwrap();
        let next = ar_predict_next(&coeff, &series, 3);
        assert!((next[0] - 7.0).abs() < 1e-9, "prediction {}", next[0]);
    }

    #[test]
    fn order_must_fit_series() {
        let series = vec![vec![1.0]; 5];
        assert!(fit_ar(&series, 5).is_err());
        assert!(fit_ar(&series, 4).is_ok());
        assert!(fit_ar(&series, 0).is_err());
    }

    #[test]
    fn multivariate_cross_lag_recovery() {
        // x_t = 0.5 x_{t-1} + 0.2 y_{t-1}; y_t = -0.3 x_{t-1} + 0.8 y_{t-1}
        let mut series = vec![vec![1.0, -0.5]];
        for t in 1..300 {
            let (x, y) = (series[t - 1][0], series[t - 1][1]);
            series.push(vec![0.5 * x + 0.2 * y, -0.3 * x + 0.8 * y]);
        }
        let coeff = fit_ar(&series, 1).unwrap();
        assert_eq!(coeff.shape(), &[2, 3]);
        let c = coeff.data();
        for (got, want) in c.iter().zip([0.5, 0.2, 0.0, -0.3, 0.8, 0.0]) {
            assert!((got - want).abs() < 1e-7, "{got} vs {want}");
        }
    }

    #[test]
    fn stacked_series_do_not_cross_boundaries() {
        // two short constant series with different levels: a boundary-crossing
        // design row would break the exact fit
        let a = vec![vec![1.0]; 30];
        let b = vec![vec![5.0]; 30];
        let coeff = fit_ar_stacked(&[&a, &b], 2).unwrap();
        let pa = ar_predict_next(&coeff, &a, 2);
        let pb = ar_predict_next(&coeff, &b, 2);
        assert!((pa[0] - 1.0).abs() < 1e-8);
        assert!((pb[0] - 5.0).abs() < 1e-8);
    }
}
