//! Minimal reverse-mode gradient engine and training substrate.
//!
//! Everything the model zoo trains with lives here: a small dense array type,
//! a tape of differentiable primitives with reverse accumulation (BPTT falls
//! out of unrolling cells over a sequence), vanilla/LSTM/GRU cell updates,
//! Glorot initialization, the Adam optimizer with a reduce-on-plateau
//! learning-rate schedule, and a central-difference gradient checker.
//!
//! Double precision throughout; the gradient-check thresholds assume it.

pub mod array;
pub mod cells;
pub mod gradcheck;
pub mod optim;
pub mod params;
pub mod tape;

pub use array::NumArray;
pub use cells::{glorot_uniform, gru_cell, lstm_cell, rnn_cell, CellWeights};
pub use gradcheck::gradient_check;
pub use optim::{Adam, PlateauSchedule};
pub use params::{ParamId, ParamSet};
pub use tape::{NodeId, Tape};

/// Shared default hyperparameters (every zoo model trains with the same
/// settings; see the model configs).
pub const DEFAULT_HIDDEN: usize = 32;
pub const DEFAULT_EPOCHS: usize = 200;
pub const DEFAULT_LR: f64 = 1e-3;
pub const LR_FLOOR: f64 = 1e-4;
pub const LR_DECAY: f64 = 0.5;
pub const LR_PATIENCE: usize = 10;
