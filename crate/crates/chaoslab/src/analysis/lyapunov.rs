//! Lyapunov exponent estimation from perturbed-trajectory separation.
//!
//! A reference trajectory and a copy with theta1 nudged by a small angle are
//! integrated side by side; the exponent is the least-squares slope of
//! ln(error) against the step index (per step) or time (per second). By
//! default the error is the absolute theta1 separation, matching how the
//! separation is seeded.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::regression_slope;
use crate::dynamics::{PendulumParams, PendulumState};
use crate::error::{ChaosError, Result};
use crate::integrator::{fmt_f64, integrate};

/// Errors below this floor are treated as numerically zero and excluded from
/// the log-error regression.
pub const ERROR_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy)]
pub struct LyapunovOptions {
    /// Use the full-state Euclidean separation instead of |theta1| error.
    pub full_state_norm: bool,
    /// Discard this many leading steps from the regression.
    pub skip_steps: usize,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            full_state_norm: false,
            skip_steps: 0,
        }
    }
}

/// One Lyapunov estimate. `exponent_per_second = exponent_per_step / dt`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovResult {
    pub initial_angles_deg: Vec<f64>,
    pub exponent_per_second: f64,
    pub exponent_per_step: f64,
    pub steps_used: usize,
    pub perturbation_deg: f64,
}

/// Estimates the leading Lyapunov exponent at one initial condition.
///
/// Integrates the rest state at `initial_deg` and a copy with theta1
/// increased by `perturb_deg`, both for `steps` steps of size `dt`, then
/// regresses ln(error) on the step index over every step whose error clears
/// the floor.
pub fn lyapunov_exponent(
    params: &PendulumParams,
    initial_deg: &[f64],
    perturb_deg: f64,
    steps: usize,
    dt: f64,
    opts: LyapunovOptions,
) -> Result<LyapunovResult> {
    if perturb_deg <= 0.0 {
        return Err(ChaosError::Degenerate(format!(
            "perturbation must be > 0 degrees, got {perturb_deg}"
        )));
    }
    if steps < 100 {
        return Err(ChaosError::InvalidParams(format!(
            "need at least 100 steps for a Lyapunov fit, got {steps}"
        )));
    }
    if initial_deg.len() != params.joint_count() {
        return Err(ChaosError::InvalidParams(format!(
            "expected {} initial angles, got {}",
            params.joint_count(),
            initial_deg.len()
        )));
    }
    let reference = PendulumState::at_rest_deg(initial_deg)?;
    let mut perturbed_deg = initial_deg.to_vec();
    perturbed_deg[0] += perturb_deg;
    let perturbed = PendulumState::at_rest_deg(&perturbed_deg)?;

    let t_end = steps as f64 * dt;
    let traj_ref = integrate(params, &reference, t_end, dt)?;
    let traj_pert = integrate(params, &perturbed, t_end, dt)?;

    let mut points = Vec::with_capacity(steps + 1);
    for k in opts.skip_steps..traj_ref.states.len() {
        let a = &traj_ref.states[k];
        let b = &traj_pert.states[k];
        let err = if opts.full_state_norm {
            a.as_flat()
                .iter()
                .zip(b.as_flat())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        } else {
            (b.theta(0) - a.theta(0)).abs()
        };
        if err > ERROR_FLOOR {
            points.push((k as f64, err.ln()));
        }
    }
    if points.len() < 2 {
        return Err(ChaosError::Degenerate(
            "perturbed and reference trajectories never separated".into(),
        ));
    }
    let slope = regression_slope(&points)?;
    Ok(LyapunovResult {
        initial_angles_deg: initial_deg.to_vec(),
        exponent_per_second: slope / dt,
        exponent_per_step: slope,
        steps_used: points.len(),
        perturbation_deg: perturb_deg,
    })
}

/// Inclusive degree range with a positive step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DegreeRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl DegreeRange {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(ChaosError::InvalidParams(format!("range step must be > 0, got {step}")));
        }
        if end < start {
            return Err(ChaosError::InvalidParams(format!(
                "empty range: end {end} < start {start}"
            )));
        }
        Ok(Self { start, end, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step).round() as usize + 1;
        (0..count)
            .map(|i| self.start + i as f64 * self.step)
            .filter(|v| *v <= self.end + 1e-9 * self.step.abs())
            .collect()
    }
}

/// Lyapunov exponents (per second) over a grid of initial conditions;
/// `exponents[i][j]` belongs to `theta1 = theta1_deg[i]`, `theta2 = theta2_deg[j]`.
/// Degenerate cells are `None`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovGrid {
    pub theta1_deg: Vec<f64>,
    pub theta2_deg: Vec<f64>,
    pub exponents_per_s: Vec<Vec<Option<f64>>>,
}

impl LyapunovGrid {
    pub fn cell_count(&self) -> usize {
        self.theta1_deg.len() * self.theta2_deg.len()
    }

    /// Writes the heatmap CSV `theta1_deg,theta2_deg,lyapunov_per_s`, one row
    /// per cell; degenerate cells carry `nan`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "theta1_deg,theta2_deg,lyapunov_per_s")?;
        for (i, t1) in self.theta1_deg.iter().enumerate() {
            for (j, t2) in self.theta2_deg.iter().enumerate() {
                match self.exponents_per_s[i][j] {
                    Some(v) => writeln!(out, "{t1},{t2},{}", fmt_f64(v))?,
                    None => writeln!(out, "{t1},{t2},nan")?,
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Grayscale SVG heatmap (darker cell = lower exponent).
    pub fn write_svg(&self, path: &Path) -> Result<()> {
        let values: Vec<f64> = self
            .exponents_per_s
            .iter()
            .flatten()
            .filter_map(|v| *v)
            .collect();
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        let span = if hi > lo { hi - lo } else { 1.0 };
        let cell = 40.0;
        let margin = 60.0;
        let w = margin + cell * self.theta2_deg.len() as f64 + 20.0;
        let h = margin + cell * self.theta1_deg.len() as f64 + 20.0;
        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" xmlns=\"http://www.w3.org/2000/svg\">\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">lyapunov exponent (1/s), bright = chaotic</text>\n",
            margin
        ));
        for (i, _t1) in self.theta1_deg.iter().enumerate() {
            for (j, _t2) in self.theta2_deg.iter().enumerate() {
                let x = margin + j as f64 * cell;
                let y = margin + i as f64 * cell;
                let fill = match self.exponents_per_s[i][j] {
                    Some(v) => {
                        let unit = ((v - lo) / span).clamp(0.0, 1.0);
                        let level = (unit * 255.0).round() as u8;
                        format!("rgb({level},{level},{level})")
                    }
                    None => "rgb(255,0,0)".to_string(),
                };
                svg.push_str(&format!(
                    "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"{fill}\"/>\n"
                ));
            }
        }
        for (i, t1) in self.theta1_deg.iter().enumerate() {
            svg.push_str(&format!(
                "<text x=\"10\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{t1:.0}</text>\n",
                margin + i as f64 * cell + cell * 0.6
            ));
        }
        for (j, t2) in self.theta2_deg.iter().enumerate() {
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"11\">{t2:.0}</text>\n",
                margin + j as f64 * cell + cell * 0.2,
                margin - 8.0
            ));
        }
        svg.push_str("</svg>\n");
        std::fs::write(path, svg)?;
        Ok(())
    }
}

/// Evaluates [`lyapunov_exponent`] over the cross product of two degree
/// ranges (theta1 rows, theta2 columns). Cells run in parallel; the result is
/// identical to sequential evaluation. For a triple-pendulum params the third
/// angle is held at zero.
pub fn lyapunov_grid(
    params: &PendulumParams,
    theta1_range: DegreeRange,
    theta2_range: DegreeRange,
    perturb_deg: f64,
    steps: usize,
    dt: f64,
) -> Result<LyapunovGrid> {
    let theta1 = theta1_range.values();
    let theta2 = theta2_range.values();
    if theta1.is_empty() || theta2.is_empty() {
        return Err(ChaosError::InvalidParams("empty grid range".into()));
    }
    let cells: Vec<(usize, usize)> = (0..theta1.len())
        .flat_map(|i| (0..theta2.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut initial = vec![theta1[i], theta2[j]];
            if params.joint_count() == 3 {
                initial.push(0.0);
            }
            match lyapunov_exponent(params, &initial, perturb_deg, steps, dt, LyapunovOptions::default()) {
                Ok(r) => Some(r.exponent_per_second),
                Err(ChaosError::Degenerate(_)) => None,
                Err(_) => None,
            }
        })
        .collect();
    let mut exponents = vec![vec![None; theta2.len()]; theta1.len()];
    for (idx, &(i, j)) in cells.iter().enumerate() {
        exponents[i][j] = results[idx];
    }
    Ok(LyapunovGrid {
        theta1_deg: theta1,
        theta2_deg: theta2,
        exponents_per_s: exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_is_degenerate() {
        let p = PendulumParams::double_unit();
        let err = lyapunov_exponent(&p, &[150.0, 75.0], 0.0, 1000, 1e-3, LyapunovOptions::default());
        assert!(matches!(err, Err(ChaosError::Degenerate(_))));
    }

    #[test]
    fn chaotic_condition_has_positive_exponent() {
        // [150, 75] sits in the strongly chaotic region; the paper quotes a
        // growth factor e^(8.24/1000) per step there, but the full-window
        // regression saturates once the separation reaches O(pi), so only the
        // sign and rough order are reproducible
        let p = PendulumParams::double_unit();
        let r = lyapunov_exponent(&p, &[150.0, 75.0], 0.1, 10_000, 1e-3, LyapunovOptions::default())
            .unwrap();
        assert!(
            r.exponent_per_second > 0.1,
            "expected clearly positive exponent, got {}",
            r.exponent_per_second
        );
        assert!((r.exponent_per_second - r.exponent_per_step / 1e-3).abs() < 1e-9);
        assert!(r.steps_used > 9000);
    }

    #[test]
    fn quiet_condition_has_small_exponent() {
        let p = PendulumParams::double_unit();
        let r = lyapunov_exponent(&p, &[15.0, 15.0], 0.1, 10_000, 1e-3, LyapunovOptions::default())
            .unwrap();
        assert!(
            r.exponent_per_second < 0.1,
            "expected near-zero exponent, got {}",
            r.exponent_per_second
        );
    }

    #[test]
    fn default_grid_has_169_cells() {
        let r1 = DegreeRange::new(0.0, 180.0, 15.0).unwrap();
        assert_eq!(r1.values().len(), 13);
        let grid_cells = r1.values().len() * r1.values().len();
        assert_eq!(grid_cells, 169);
    }

    #[test]
    fn small_grid_is_deterministic_and_ordered() {
        let p = PendulumParams::double_unit();
        let r1 = DegreeRange::new(10.0, 40.0, 30.0).unwrap();
        let r2 = DegreeRange::new(0.0, 30.0, 30.0).unwrap();
        let a = lyapunov_grid(&p, r1, r2, 0.1, 200, 1e-3).unwrap();
        let b = lyapunov_grid(&p, r1, r2, 0.1, 200, 1e-3).unwrap();
        assert_eq!(a.theta1_deg, vec![10.0, 40.0]);
        assert_eq!(a.theta2_deg, vec![0.0, 30.0]);
        assert_eq!(a.exponents_per_s, b.exponents_per_s);
        assert_eq!(a.cell_count(), 4);
    }

    #[test]
    fn grid_csv_format() {
        let p = PendulumParams::double_unit();
        let r = DegreeRange::new(0.0, 15.0, 15.0).unwrap();
        let grid = lyapunov_grid(&p, r, r, 0.1, 150, 1e-3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("heat.csv");
        grid.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "theta1_deg,theta2_deg,lyapunov_per_s");
        assert_eq!(text.lines().count(), 1 + 4);
    }

    #[test]
    fn range_validation() {
        assert!(DegreeRange::new(0.0, 10.0, 0.0).is_err());
        assert!(DegreeRange::new(10.0, 0.0, 1.0).is_err());
    }
}
