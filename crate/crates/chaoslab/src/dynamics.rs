//! Pendulum parameters, states, and equations of motion.
//!
//! Planar double/triple pendulums: point masses on massless rigid rods, the
//! first rod hinged at a fixed pivot, each further rod hinged to the previous
//! mass. Angles are measured from the downward vertical and stored unwrapped
//! (they grow without bound during full rotations). The state is the flat
//! vector `[theta1, u1, theta2, u2(, theta3, u3)]` with `u_i = d(theta_i)/dt`.
//!
//! Friction enters as a linear damping torque `-c_i * u_i` added to each
//! angular acceleration.

use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};

/// Which pendulum system a run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Double,
    Triple,
}

impl System {
    pub fn joint_count(self) -> usize {
        match self {
            System::Double => 2,
            System::Triple => 3,
        }
    }
}

impl std::str::FromStr for System {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(System::Double),
            "triple" => Ok(System::Triple),
            other => Err(ChaosError::Config(format!(
                "unknown system '{other}' (expected 'double' or 'triple')"
            ))),
        }
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            System::Double => write!(f, "double"),
            System::Triple => write!(f, "triple"),
        }
    }
}

/// Masses, lengths, gravity, and per-joint damping for an n-pendulum (n = 2 or 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    g: f64,
    lengths: Vec<f64>,
    masses: Vec<f64>,
    damping: Vec<f64>,
}

/// Default damping constant applied per joint when friction is enabled (1/s).
pub const DEFAULT_DAMPING: f64 = 0.1;

impl PendulumParams {
    /// Validated constructor. `lengths`, `masses`, `damping` must all have
    /// length 2 or 3; lengths, masses, g strictly positive; damping >= 0.
    pub fn new(g: f64, lengths: &[f64], masses: &[f64], damping: &[f64]) -> Result<Self> {
        let n = lengths.len();
        if n != 2 && n != 3 {
            return Err(ChaosError::InvalidParams(format!(
                "joint count must be 2 or 3, got {n}"
            )));
        }
        if masses.len() != n || damping.len() != n {
            return Err(ChaosError::InvalidParams(format!(
                "lengths/masses/damping counts disagree: {}/{}/{}",
                n,
                masses.len(),
                damping.len()
            )));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(ChaosError::InvalidParams(format!("g must be > 0, got {g}")));
        }
        for (name, vals, lower_ok) in [
            ("length", lengths, false),
            ("mass", masses, false),
            ("damping", damping, true),
        ] {
            for (i, &v) in vals.iter().enumerate() {
                let ok = v.is_finite() && if lower_ok { v >= 0.0 } else { v > 0.0 };
                if !ok {
                    return Err(ChaosError::InvalidParams(format!(
                        "{name}{} must be {} got {v}",
                        i + 1,
                        if lower_ok { ">= 0," } else { "> 0," }
                    )));
                }
            }
        }
        Ok(Self {
            g,
            lengths: lengths.to_vec(),
            masses: masses.to_vec(),
            damping: damping.to_vec(),
        })
    }

    /// Frictionless double pendulum with unit rods/masses and g = 9.81 m/s^2.
    pub fn double_unit() -> Self {
        Self::new(9.81, &[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]).unwrap()
    }

    /// Frictionless triple pendulum with unit rods/masses and g = 9.81 m/s^2.
    pub fn triple_unit() -> Self {
        Self::new(9.81, &[1.0; 3], &[1.0; 3], &[0.0; 3]).unwrap()
    }

    /// Unit params for the given system.
    pub fn unit(system: System) -> Self {
        match system {
            System::Double => Self::double_unit(),
            System::Triple => Self::triple_unit(),
        }
    }

    /// Same params with every joint's damping replaced.
    pub fn with_damping(mut self, damping: &[f64]) -> Result<Self> {
        if damping.len() != self.joint_count() {
            return Err(ChaosError::InvalidParams(format!(
                "expected {} damping constants, got {}",
                self.joint_count(),
                damping.len()
            )));
        }
        for &c in damping {
            if !(c.is_finite() && c >= 0.0) {
                return Err(ChaosError::InvalidParams(format!(
                    "damping must be >= 0, got {c}"
                )));
            }
        }
        self.damping = damping.to_vec();
        Ok(self)
    }

    /// Same params with uniform damping `c` on every joint.
    pub fn with_uniform_damping(self, c: f64) -> Result<Self> {
        let n = self.joint_count();
        self.with_damping(&vec![c; n])
    }

    pub fn joint_count(&self) -> usize {
        self.lengths.len()
    }

    /// State dimension, 2n.
    pub fn dim(&self) -> usize {
        2 * self.joint_count()
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    pub fn is_frictionless(&self) -> bool {
        self.damping.iter().all(|&c| c == 0.0)
    }

    pub fn system(&self) -> System {
        if self.joint_count() == 2 {
            System::Double
        } else {
            System::Triple
        }
    }
}

/// Configuration vector `[theta1, u1, theta2, u2(, theta3, u3)]`,
/// angles in radians, angular velocities in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PendulumState(Vec<f64>);

impl PendulumState {
    /// From the flat 2n layout. Rejects wrong lengths and non-finite entries.
    pub fn from_flat(values: &[f64]) -> Result<Self> {
        if values.len() != 4 && values.len() != 6 {
            return Err(ChaosError::InvalidParams(format!(
                "state must have 4 or 6 entries, got {}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(ChaosError::NonFinite("pendulum state".into()));
        }
        Ok(Self(values.to_vec()))
    }

    /// Rest state (all velocities zero) from angles in radians.
    pub fn at_rest(angles_rad: &[f64]) -> Result<Self> {
        let mut flat = Vec::with_capacity(angles_rad.len() * 2);
        for &a in angles_rad {
            flat.push(a);
            flat.push(0.0);
        }
        Self::from_flat(&flat)
    }

    /// Rest state from angles in degrees (the CLI/paper convention).
    pub fn at_rest_deg(angles_deg: &[f64]) -> Result<Self> {
        let rad: Vec<f64> = angles_deg.iter().map(|a| a.to_radians()).collect();
        Self::at_rest(&rad)
    }

    pub fn joint_count(&self) -> usize {
        self.0.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.0[2 * i]
    }

    pub fn omega(&self, i: usize) -> f64 {
        self.0[2 * i + 1]
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.joint_count()).map(|i| self.theta(i)).collect()
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

fn check_state(state: &PendulumState, params: &PendulumParams, n: usize) -> Result<()> {
    if params.joint_count() != n {
        return Err(ChaosError::InvalidParams(format!(
            "expected {n}-joint params, got {}",
            params.joint_count()
        )));
    }
    if state.joint_count() != n {
        return Err(ChaosError::InvalidParams(format!(
            "expected {n}-joint state, got {}",
            state.joint_count()
        )));
    }
    if !state.is_finite() {
        return Err(ChaosError::NonFinite("pendulum state".into()));
    }
    Ok(())
}

/// Angular accelerations of the double pendulum.
///
/// Closed form from the Lagrangian with `c = cos(theta1 - theta2)` and
/// `s = sin(theta1 - theta2)`; both denominators are `l_i (m1 + m2 s^2) > 0`
/// for valid params.
pub fn double_accel(state: &PendulumState, params: &PendulumParams) -> Result<(f64, f64)> {
    check_state(state, params, 2)?;
    let (th1, u1, th2, u2) = (state.theta(0), state.omega(0), state.theta(1), state.omega(1));
    let (l1, l2) = (params.lengths[0], params.lengths[1]);
    let (m1, m2) = (params.masses[0], params.masses[1]);
    let g = params.g;

    let c = (th1 - th2).cos();
    let s = (th1 - th2).sin();
    let den = m1 + m2 * s * s;

    let a1 = (m2 * g * th2.sin() * c
        - m2 * s * (l1 * u1 * u1 * c + l2 * u2 * u2)
        - (m1 + m2) * g * th1.sin())
        / (l1 * den);
    let a2 = ((m1 + m2) * (l1 * u1 * u1 * s - g * th2.sin() + g * th1.sin() * c)
        + m2 * l2 * u2 * u2 * s * c)
        / (l2 * den);
    Ok((a1, a2))
}

/// Angular accelerations of the triple pendulum.
///
/// Assembles the Lagrangian mass-matrix system `M(theta) a = b(theta, u)` for
/// three point masses on massless rods and solves the 3x3 system directly.
pub fn triple_accel(state: &PendulumState, params: &PendulumParams) -> Result<(f64, f64, f64)> {
    check_state(state, params, 3)?;
    let a = mass_matrix_accel(state, params)?;
    Ok((a[0], a[1], a[2]))
}

/// Angular accelerations for any supported joint count via the generic
/// Lagrangian mass-matrix route.
///
/// With `mu_r = sum of masses from joint r outward`:
///   `M[i][j] = mu_max(i,j) l_i l_j cos(theta_i - theta_j)`
///   `b[i] = -g mu_i l_i sin(theta_i) - sum_j mu_max(i,j) l_i l_j sin(theta_i - theta_j) u_j^2`
pub fn mass_matrix_accel(state: &PendulumState, params: &PendulumParams) -> Result<Vec<f64>> {
    let n = params.joint_count();
    check_state(state, params, n)?;
    let l = &params.lengths;
    let g = params.g;

    // cumulative mass hanging at or below each joint
    let mut mu = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += params.masses[i];
        mu[i] = acc;
    }

    let mut m = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let mu_ij = mu[i.max(j)];
            let d = state.theta(i) - state.theta(j);
            m[i][j] = mu_ij * l[i] * l[j] * d.cos();
            b[i] -= mu_ij * l[i] * l[j] * d.sin() * state.omega(j) * state.omega(j);
        }
        b[i] -= g * mu[i] * l[i] * state.theta(i).sin();
    }

    solve_linear(&mut m, &mut b).ok_or_else(|| {
        ChaosError::Numerical("singular pendulum mass matrix (invalid params?)".into())
    })
}

/// In-place Gaussian elimination with partial pivoting for tiny systems.
fn solve_linear(m: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b_| m[a][col].abs().total_cmp(&m[b_][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

/// Time derivative of the flat state:
/// `[u1, a1 - c1 u1, u2, a2 - c2 u2(, u3, a3 - c3 u3)]`.
pub fn derivative(state: &PendulumState, params: &PendulumParams) -> Result<Vec<f64>> {
    let n = params.joint_count();
    let accel: Vec<f64> = match n {
        2 => {
            let (a1, a2) = double_accel(state, params)?;
            vec![a1, a2]
        }
        3 => {
            let (a1, a2, a3) = triple_accel(state, params)?;
            vec![a1, a2, a3]
        }
        _ => unreachable!("params validated at construction"),
    };
    let mut d = Vec::with_capacity(2 * n);
    for i in 0..n {
        d.push(state.omega(i));
        d.push(accel[i] - params.damping[i] * state.omega(i));
    }
    Ok(d)
}

/// Total mechanical energy T + V in Joules, with potential measured from the
/// pivot height. Kinetic energy is computed from Cartesian mass velocities so
/// it stays independent of the mass-matrix route used by the accelerations.
pub fn total_energy(state: &PendulumState, params: &PendulumParams) -> Result<f64> {
    let n = params.joint_count();
    check_state(state, params, n)?;
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    let mut y = 0.0;
    for k in 0..n {
        let l = params.lengths[k];
        let th = state.theta(k);
        let u = state.omega(k);
        vx += l * u * th.cos();
        vy += l * u * th.sin();
        y -= l * th.cos();
        kinetic += 0.5 * params.masses[k] * (vx * vx + vy * vy);
        potential += params.masses[k] * params.g * y;
    }
    Ok(kinetic + potential)
}

/// Characteristic energy magnitude of the system: the potential drop from the
/// fully inverted to the hanging rest configuration is twice this value.
/// Used as the denominator when reporting relative energy drift, since the
/// total energy itself crosses zero (e.g. it is exactly 0 at rest at 90
/// degrees).
pub fn energy_scale(params: &PendulumParams) -> f64 {
    let n = params.joint_count();
    let mut mu = 0.0;
    let mut scale = 0.0;
    for i in (0..n).rev() {
        mu += params.masses[i];
        scale += mu * params.lengths[i];
    }
    params.g * scale
}

/// Finite-difference step used by [`jacobian`].
pub const JACOBIAN_FD_STEP: f64 = 1e-6;

/// Jacobian of [`derivative`] with respect to the flat state, by central
/// differences with per-component step 1e-6. Row/column order matches the
/// state layout `[theta1, u1, theta2, u2, ...]`.
pub fn jacobian(state: &PendulumState, params: &PendulumParams) -> Result<Vec<Vec<f64>>> {
    let dim = params.dim();
    check_state(state, params, params.joint_count())?;
    let mut jac = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        let mut plus = state.0.clone();
        let mut minus = state.0.clone();
        plus[col] += JACOBIAN_FD_STEP;
        minus[col] -= JACOBIAN_FD_STEP;
        let fp = derivative(&PendulumState(plus), params)?;
        let fm = derivative(&PendulumState(minus), params)?;
        for row in 0..dim {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * JACOBIAN_FD_STEP);
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected} (tol {tol})"
        );
    }

    #[test]
    fn params_validation() {
        assert!(PendulumParams::new(9.81, &[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]).is_ok());
        assert!(PendulumParams::new(9.81, &[1.0], &[1.0], &[0.0]).is_err());
        assert!(PendulumParams::new(9.81, &[1.0, -1.0], &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(PendulumParams::new(9.81, &[1.0, 1.0], &[0.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(PendulumParams::new(-9.81, &[1.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]).is_err());
        assert!(PendulumParams::new(9.81, &[1.0, 1.0], &[1.0, 1.0], &[-0.1, 0.0]).is_err());
        assert!(PendulumParams::new(9.81, &[1.0; 3], &[1.0; 3], &[0.0; 3]).is_ok());
    }

    #[test]
    fn state_validation() {
        assert!(PendulumState::from_flat(&[0.0; 4]).is_ok());
        assert!(PendulumState::from_flat(&[0.0; 6]).is_ok());
        assert!(PendulumState::from_flat(&[0.0; 5]).is_err());
        assert!(PendulumState::from_flat(&[0.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn double_accel_hanging_equilibrium() {
        let p = PendulumParams::double_unit();
        let s = PendulumState::at_rest(&[0.0, 0.0]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        assert_eq!(a1, 0.0);
        assert_eq!(a2, 0.0);
    }

    #[test]
    fn double_accel_inverted_equilibrium() {
        let p = PendulumParams::double_unit();
        let s = PendulumState::at_rest(&[PI, PI]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        // sin(pi) is ~1.2e-16 in f64, so "vanishes" means down at roundoff
        assert_close(a1, 0.0, 1e-12, "a1 at inverted equilibrium");
        assert_close(a2, 0.0, 1e-12, "a2 at inverted equilibrium");
    }

    // Expected values frozen from an independent symbolic Euler-Lagrange
    // derivation (sympy, 30-digit arithmetic).
    #[test]
    fn double_accel_matches_lagrangian_oracle_points() {
        let p = PendulumParams::double_unit();

        let s = PendulumState::at_rest(&[PI / 2.0, 0.0]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        assert_close(a1, -9.81, 1e-12, "a1 at (pi/2, 0)");
        assert_close(a2, 0.0, 1e-12, "a2 at (pi/2, 0)");

        let s = PendulumState::from_flat(&[0.7, 1.3, -0.4, -2.1]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        assert_close(a1, -10.581454192560046, 1e-11, "a1 at random point");
        assert_close(a2, 10.126040957339339, 1e-11, "a2 at random point");

        let s = PendulumState::from_flat(&[2.0, -0.5, 1.0, 0.25]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        assert_close(a1, -7.930903675285662, 1e-11, "a1 at second point");
        assert_close(a2, -3.7593770713885433, 1e-11, "a2 at second point");

        let p = PendulumParams::new(9.81, &[0.9, 1.2], &[2.0, 1.5], &[0.0, 0.0]).unwrap();
        let s = PendulumState::from_flat(&[0.7, 1.3, -0.4, -2.1]).unwrap();
        let (a1, a2) = double_accel(&s, &p).unwrap();
        assert_close(a1, -11.390123458936628, 1e-11, "a1 non-unit params");
        assert_close(a2, 8.187987144900189, 1e-11, "a2 non-unit params");
    }

    #[test]
    fn double_accel_rejects_non_finite() {
        let p = PendulumParams::double_unit();
        let bad = PendulumState(vec![0.0, f64::INFINITY, 0.0, 0.0]);
        assert!(double_accel(&bad, &p).is_err());
    }

    #[test]
    fn triple_accel_equilibria() {
        let p = PendulumParams::triple_unit();
        for angles in [[0.0; 3], [PI; 3]] {
            let s = PendulumState::at_rest(&angles).unwrap();
            let (a1, a2, a3) = triple_accel(&s, &p).unwrap();
            assert_close(a1, 0.0, 1e-12, "a1 at equilibrium");
            assert_close(a2, 0.0, 1e-12, "a2 at equilibrium");
            assert_close(a3, 0.0, 1e-12, "a3 at equilibrium");
        }
    }

    // Frozen from the sympy Euler-Lagrange oracle.
    #[test]
    fn triple_accel_matches_lagrangian_oracle_points() {
        let p = PendulumParams::triple_unit();

        let s = PendulumState::at_rest(&[PI / 2.0, PI / 3.0, PI / 4.0]).unwrap();
        let (a1, a2, a3) = triple_accel(&s, &p).unwrap();
        assert_close(a1, -9.81, 1e-10, "a1 at rest point");
        assert_close(a2, 0.0, 1e-10, "a2 at rest point");
        assert_close(a3, 0.0, 1e-10, "a3 at rest point");

        let s = PendulumState::from_flat(&[0.3, 0.5, -0.8, -1.5, 1.1, 2.5]).unwrap();
        let (a1, a2, a3) = triple_accel(&s, &p).unwrap();
        assert_close(a1, -5.766151488705453, 1e-10, "a1 moving point");
        assert_close(a2, 12.340655658675429, 1e-10, "a2 moving point");
        assert_close(a3, -3.0443367702261866, 1e-10, "a3 moving point");

        let p = PendulumParams::new(9.81, &[0.9, 1.2, 0.7], &[2.0, 1.5, 0.5], &[0.0; 3]).unwrap();
        let (a1, a2, a3) = triple_accel(&s, &p).unwrap();
        assert_close(a1, -6.3911907028772206, 1e-10, "a1 non-unit triple");
        assert_close(a2, 8.79621804908435, 1e-10, "a2 non-unit triple");
        assert_close(a3, -5.7702600465571323, 1e-10, "a3 non-unit triple");
    }

    #[test]
    fn derivative_equilibria_are_fixed_points() {
        // all 2^n sign choices of {0, pi} with zero velocity
        for params in [PendulumParams::double_unit(), PendulumParams::triple_unit()] {
            let n = params.joint_count();
            let damped = params.clone().with_uniform_damping(0.3).unwrap();
            for mask in 0..(1u32 << n) {
                let angles: Vec<f64> = (0..n)
                    .map(|i| if mask & (1 << i) != 0 { PI } else { 0.0 })
                    .collect();
                let s = PendulumState::at_rest(&angles).unwrap();
                for p in [&params, &damped] {
                    let d = derivative(&s, p).unwrap();
                    for (k, v) in d.iter().enumerate() {
                        assert_close(*v, 0.0, 1e-12, &format!("derivative[{k}] at {angles:?}"));
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_damping_term() {
        let p = PendulumParams::double_unit()
            .with_damping(&[0.1, 0.1])
            .unwrap();
        let frictionless = PendulumParams::double_unit();
        let s = PendulumState::from_flat(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let d = derivative(&s, &p).unwrap();
        let d0 = derivative(&s, &frictionless).unwrap();
        assert_eq!(d[0], 1.0);
        assert_close(d[1], d0[1] - 0.1, 1e-15, "damping shifts accel by -c*u");
        // at zero velocity the damped and frictionless fields coincide
        let rest = PendulumState::at_rest(&[0.4, -0.9]).unwrap();
        assert_eq!(derivative(&rest, &p).unwrap(), derivative(&rest, &frictionless).unwrap());
    }

    #[test]
    fn double_accel_agrees_with_mass_matrix_route() {
        // the closed form and the generic Lagrangian assembly are independent
        // code paths; they must agree to near machine precision
        let mut rng_state = 0x2545F4914F6CDD1Du64;
        let mut next = move || {
            // xorshift64*, deterministic test point stream
            rng_state ^= rng_state >> 12;
            rng_state ^= rng_state << 25;
            rng_state ^= rng_state >> 27;
            (rng_state.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        };
        let p = PendulumParams::double_unit();
        let p2 = PendulumParams::new(9.81, &[0.7, 1.4], &[2.5, 0.8], &[0.0, 0.0]).unwrap();
        for _ in 0..1000 {
            let th1 = (next() * 2.0 - 1.0) * PI;
            let th2 = (next() * 2.0 - 1.0) * PI;
            let u1 = (next() * 2.0 - 1.0) * 5.0;
            let u2 = (next() * 2.0 - 1.0) * 5.0;
            let s = PendulumState::from_flat(&[th1, u1, th2, u2]).unwrap();
            for params in [&p, &p2] {
                let (a1, a2) = double_accel(&s, params).unwrap();
                let mm = mass_matrix_accel(&s, params).unwrap();
                let scale = a1.abs().max(mm[0].abs()).max(1e-30);
                assert!(
                    (a1 - mm[0]).abs() / scale < 1e-10,
                    "a1 mismatch at {s:?}: {a1} vs {}",
                    mm[0]
                );
                let scale = a2.abs().max(mm[1].abs()).max(1e-30);
                assert!(
                    (a2 - mm[1]).abs() / scale < 1e-10,
                    "a2 mismatch at {s:?}: {a2} vs {}",
                    mm[1]
                );
            }
        }
    }

    #[test]
    fn energy_of_rest_states() {
        let p = PendulumParams::double_unit();
        let hanging = PendulumState::at_rest(&[0.0, 0.0]).unwrap();
        assert_close(total_energy(&hanging, &p).unwrap(), -29.43, 1e-12, "hanging energy");
        let inverted = PendulumState::at_rest(&[PI, PI]).unwrap();
        assert_close(total_energy(&inverted, &p).unwrap(), 29.43, 1e-12, "inverted energy");
        // kinetic part is exactly zero whenever u = 0
        let tilted = PendulumState::at_rest(&[1.1, -0.3]).unwrap();
        let e = total_energy(&tilted, &p).unwrap();
        let v_only = -p.g()
            * ((p.masses()[0] + p.masses()[1]) * p.lengths()[0] * 1.1f64.cos()
                + p.masses()[1] * p.lengths()[1] * (-0.3f64).cos());
        assert_close(e, v_only, 1e-12, "rest energy is purely potential");
    }

    #[test]
    fn jacobian_structure() {
        let p = PendulumParams::double_unit();
        let s = PendulumState::at_rest(&[0.3, -0.2]).unwrap();
        let j = jacobian(&s, &p).unwrap();
        // d(theta_i)/dt = u_i identically: those rows are exact unit selectors
        assert_close(j[0][1], 1.0, 1e-9, "d theta1' / d u1");
        assert_close(j[2][3], 1.0, 1e-9, "d theta2' / d u2");
        assert_close(j[0][0], 0.0, 1e-9, "d theta1' / d theta1");
        assert_close(j[0][3], 0.0, 1e-9, "d theta1' / d u2");
    }

    #[test]
    fn jacobian_damping_shifts_velocity_diagonal() {
        let p0 = PendulumParams::double_unit();
        let p = p0.clone().with_damping(&[0.25, 0.4]).unwrap();
        let s = PendulumState::from_flat(&[0.5, 0.7, -0.1, -0.2]).unwrap();
        let j0 = jacobian(&s, &p0).unwrap();
        let j = jacobian(&s, &p).unwrap();
        assert_close(j[1][1] - j0[1][1], -0.25, 1e-8, "du1'/du1 shift");
        assert_close(j[3][3] - j0[3][3], -0.4, 1e-8, "du2'/du2 shift");
    }
}
