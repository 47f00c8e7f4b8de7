//! Dataset construction for the two training protocols.
//!
//! Sliding window: each sample maps the previous `W` angle rows to the next
//! row. Time-step: each sample maps `[t, initial angles]` to the angles at
//! `t`, grouped by generating trajectory, trained over a grid of initial
//! conditions and tested on a held-out "in-between" condition.
//!
//! All features and targets pass through a shared min-max normalizer fit on
//! training rows only; metrics are reported in unscaled radians after the
//! inverse transform.

pub mod normalizer;
pub mod timestep;
pub mod window;

pub use normalizer::MinMaxNormalizer;
pub use timestep::{
    make_timestep_dataset, read_timestep_csv, training_angle_grid, HoldoutSplit, TimeStepDataset,
    TrajectoryGroup,
};
pub use window::{make_windows, make_windows_with_fraction, WindowSplit, WindowedDataset};
