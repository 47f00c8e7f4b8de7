//! chaoslab: a simulation, analysis, and forecasting workbench for
//! double/triple pendulum systems.
//!
//! The pipeline: integrate the pendulum equations of motion with fixed-step
//! RK4 ([`integrator`]), quantify chaos with Lyapunov exponents and
//! equilibrium eigenvalues ([`analysis`]), build sliding-window or
//! time-conditioned datasets ([`dataset`]), train a zoo of sequence models on
//! a from-scratch autodiff engine ([`nncore`], [`models`]), and report
//! RMSE/R-squared with CSV/SVG artifacts ([`eval`]).
//!
//! See the crate examples for one runnable program per capability, and the
//! `chaoslab` binary for the subcommand front end.

pub mod analysis;
pub mod cli;
pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod eval;
pub mod integrator;
pub mod models;
pub mod nncore;

pub use dynamics::{PendulumParams, PendulumState, System};
pub use error::{ChaosError, Result};
pub use integrator::{integrate, Trajectory};
