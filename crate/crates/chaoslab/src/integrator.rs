//! Fixed-step classical Runge-Kutta (RK4) integration.
//!
//! The paper's pipeline integrates the pendulum equations with a fixed step
//! (default h = 0.001 s) and consumes the uniformly sampled angle series, so
//! only fixed-step RK4 is provided here: no adaptive stepping, no event
//! detection.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{derivative, PendulumParams, PendulumState};
use crate::error::{ChaosError, Result};

/// Default integration step size in seconds.
pub const DEFAULT_DT: f64 = 1e-3;

/// Cap on the number of steps a single `integrate` call may take.
pub const DEFAULT_STEP_CAP: usize = 100_000_000;

/// A uniformly sampled integration run: `states[k]` is the state at
/// `t0 + k * dt`, with `states[0]` the initial condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub states: Vec<PendulumState>,
    pub params: PendulumParams,
    /// The generating initial angles in degrees, kept for dataset labeling.
    pub initial_angles_deg: Vec<f64>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn joint_count(&self) -> usize {
        self.params.joint_count()
    }

    /// Angle rows only (radians), one row per sample.
    pub fn angle_rows(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s.angles()).collect()
    }

    /// Writes the trajectory CSV: header `t,theta1,u1,theta2,u2[,theta3,u3]`,
    /// one row per step, 17 significant digits, angles in radians.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let n = self.joint_count();
        let mut header = String::from("t");
        for i in 1..=n {
            header.push_str(&format!(",theta{i},u{i}"));
        }
        writeln!(out, "{header}")?;
        for (k, state) in self.states.iter().enumerate() {
            write!(out, "{}", fmt_f64(self.time_at(k)))?;
            for v in state.as_flat() {
                write!(out, ",{}", fmt_f64(*v))?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a trajectory CSV written by [`Trajectory::write_csv`]. The params
    /// and generating condition are not stored in the CSV; the caller supplies
    /// them (they are echoed into run manifests).
    pub fn read_csv(path: &Path, params: PendulumParams) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(ChaosError::Schema {
            row: 0,
            message: "empty trajectory file".into(),
        })?;
        let n = params.joint_count();
        let expected_cols = 1 + 2 * n;
        let mut expected_header = String::from("t");
        for i in 1..=n {
            expected_header.push_str(&format!(",theta{i},u{i}"));
        }
        if header.trim() != expected_header {
            return Err(ChaosError::Schema {
                row: 1,
                message: format!("expected header '{expected_header}', got '{header}'"),
            });
        }
        let mut times = Vec::new();
        let mut states = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields = parse_f64_row(line, expected_cols, idx + 1)?;
            times.push(fields[0]);
            states.push(PendulumState::from_flat(&fields[1..])?);
        }
        if states.len() < 2 {
            return Err(ChaosError::Schema {
                row: 1,
                message: "trajectory needs at least two rows".into(),
            });
        }
        let t0 = times[0];
        let dt = times[1] - times[0];
        let initial_angles_deg = states[0].angles().iter().map(|a| a.to_degrees()).collect();
        Ok(Self {
            t0,
            dt,
            states,
            params,
            initial_angles_deg,
        })
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn parse_f64_row(line: &str, expected: usize, row: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(ChaosError::Schema {
            row,
            message: format!("expected {expected} fields, got {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.trim().parse::<f64>().map_err(|e| ChaosError::Schema {
                row,
                message: format!("bad float '{f}': {e}"),
            })
        })
        .collect()
}

/// One classical RK4 step `y + (h/6)(k1 + 2k2 + 2k3 + k4)` for an arbitrary
/// vector field. Fails with the step time if any stage goes non-finite.
pub fn rk4_step<F>(field: F, state: &[f64], t: f64, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    if !(h > 0.0) {
        return Err(ChaosError::InvalidParams(format!("step size must be > 0, got {h}")));
    }
    let dim = state.len();
    let axpy = |y: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        (0..dim).map(|i| y[i] + a * k[i]).collect()
    };
    let k1 = field(t, state)?;
    let k2 = field(t + 0.5 * h, &axpy(state, 0.5 * h, &k1))?;
    let k3 = field(t + 0.5 * h, &axpy(state, 0.5 * h, &k2))?;
    let k4 = field(t + h, &axpy(state, h, &k3))?;
    let mut next = Vec::with_capacity(dim);
    for i in 0..dim {
        let v = state[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if !v.is_finite() {
            return Err(ChaosError::Integration {
                step: 0,
                message: format!("non-finite state component {i} at t = {t}"),
            });
        }
        next.push(v);
    }
    Ok(next)
}

/// Integrates the pendulum from `initial` for `t_end` seconds at step `dt`,
/// producing `round(t_end/dt)` steps (so `steps + 1` states).
pub fn integrate(
    params: &PendulumParams,
    initial: &PendulumState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    integrate_capped(params, initial, t_end, dt, DEFAULT_STEP_CAP)
}

/// Integrates from rest at the given angles in degrees, stamping the exact
/// degree values as the trajectory's generating condition (the radian round
/// trip would perturb the label, e.g. 120 -> 119.99999999999999).
pub fn integrate_from_deg(
    params: &PendulumParams,
    angles_deg: &[f64],
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let initial = PendulumState::at_rest_deg(angles_deg)?;
    let mut traj = integrate(params, &initial, t_end, dt)?;
    traj.initial_angles_deg = angles_deg.to_vec();
    Ok(traj)
}

pub fn integrate_capped(
    params: &PendulumParams,
    initial: &PendulumState,
    t_end: f64,
    dt: f64,
    step_cap: usize,
) -> Result<Trajectory> {
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(ChaosError::InvalidParams(format!(
            "t_end and dt must be > 0, got t_end = {t_end}, dt = {dt}"
        )));
    }
    let steps = (t_end / dt).round() as usize;
    if steps > step_cap {
        return Err(ChaosError::InvalidParams(format!(
            "{steps} steps exceeds cap of {step_cap}"
        )));
    }
    let field = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        derivative(&PendulumState::from_flat(y)?, params)
    };
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut current: Vec<f64> = initial.as_flat().to_vec();
    for k in 0..steps {
        let t = k as f64 * dt;
        current = rk4_step(field, &current, t, dt).map_err(|e| match e {
            ChaosError::Integration { message, .. } => ChaosError::Integration { step: k, message },
            other => other,
        })?;
        states.push(PendulumState::from_flat(&current)?);
    }
    Ok(Trajectory {
        t0: 0.0,
        dt,
        states,
        params: params.clone(),
        initial_angles_deg: initial.angles().iter().map(|a| a.to_degrees()).collect(),
    })
}
