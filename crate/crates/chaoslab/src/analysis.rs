//! Chaos quantification: Lyapunov exponents from perturbed-trajectory
//! log-error regression, Lyapunov heatmap grids over initial conditions, and
//! eigenvalue stability analysis at equilibria.

pub mod eigen;
pub mod lyapunov;
pub mod stability;

pub use eigen::{classify_equilibrium, eigenvalues, Classification};
pub use lyapunov::{lyapunov_exponent, lyapunov_grid, LyapunovGrid, LyapunovOptions, LyapunovResult};
pub use stability::{stability_at, StabilityReport};

use crate::error::{ChaosError, Result};

/// Ordinary least-squares slope of `y` against `x`:
/// `sum((x - mean_x)(y - mean_y)) / sum((x - mean_x)^2)`.
pub fn regression_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(ChaosError::Degenerate(format!(
            "regression needs >= 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(ChaosError::Degenerate("all regression x values identical".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_two_points() {
        assert_eq!(regression_slope(&[(0.0, 0.0), (1.0, 2.0)]).unwrap(), 2.0);
    }

    #[test]
    fn slope_of_flat_line() {
        assert_eq!(
            regression_slope(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]).unwrap(),
            0.0
        );
    }

    #[test]
    fn slope_least_squares() {
        // hand OLS: x = {0,1,2}, y = {0,1,3}; Sxy = 3, Sxx = 2
        assert!((regression_slope(&[(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(regression_slope(&[(1.0, 1.0)]).is_err());
        assert!(regression_slope(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
