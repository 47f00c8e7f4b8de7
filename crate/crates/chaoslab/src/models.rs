//! The model zoo behind one regressor surface.
//!
//! Eight kinds: an autoregressive least-squares baseline (AR), a linear map
//! trained by gradient descent (LINSGD), a one-hidden-layer feed-forward net
//! (FFNN), and five recurrent architectures (VRNN, LSTM, GRU, bidirectional
//! BIRNN, two-layer stacked STRNN). Two task adapters: the sliding-window
//! protocol (previous W angle rows -> next row) and the time-step protocol
//! (features [t, initial angles] -> angles at t).
//!
//! All gradient-trained kinds share identical hyperparameters by design; the
//! paper holds them uniform across models.

pub mod ar;
pub mod arch;
pub mod regressor;
pub mod train;

pub use ar::{ar_predict_next, fit_ar, fit_ar_stacked};
pub use regressor::{
    evaluate_sliding, evaluate_timestep, predict_trajectory, rollout_sliding, ModelCheckpoint,
    PredictionSet, TrainedModel, TrajectoryForecast,
};
pub use train::{fit_linear_sgd, train_sliding, train_timestep};

use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};
use crate::nncore;

/// Which learner to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Ar,
    LinSgd,
    Ffnn,
    Vrnn,
    Lstm,
    Gru,
    Birnn,
    Strnn,
}

/// Zoo order used for experiment matrices and heatmap rows.
pub const ALL_KINDS: [ModelKind; 8] = [
    ModelKind::Ar,
    ModelKind::LinSgd,
    ModelKind::Ffnn,
    ModelKind::Vrnn,
    ModelKind::Lstm,
    ModelKind::Gru,
    ModelKind::Birnn,
    ModelKind::Strnn,
];

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ar => "AR",
            ModelKind::LinSgd => "LINSGD",
            ModelKind::Ffnn => "FFNN",
            ModelKind::Vrnn => "VRNN",
            ModelKind::Lstm => "LSTM",
            ModelKind::Gru => "GRU",
            ModelKind::Birnn => "BIRNN",
            ModelKind::Strnn => "STRNN",
        }
    }

    pub fn is_recurrent(self) -> bool {
        matches!(
            self,
            ModelKind::Vrnn | ModelKind::Lstm | ModelKind::Gru | ModelKind::Birnn | ModelKind::Strnn
        )
    }

    /// AR is fit in closed form; everything else trains by gradient descent.
    pub fn is_gradient_trained(self) -> bool {
        self != ModelKind::Ar
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AR" => Ok(ModelKind::Ar),
            "LINSGD" | "SGD" => Ok(ModelKind::LinSgd),
            "FFNN" => Ok(ModelKind::Ffnn),
            "VRNN" | "RNN" => Ok(ModelKind::Vrnn),
            "LSTM" => Ok(ModelKind::Lstm),
            "GRU" => Ok(ModelKind::Gru),
            "BIRNN" => Ok(ModelKind::Birnn),
            "STRNN" => Ok(ModelKind::Strnn),
            other => Err(ChaosError::Config(format!(
                "unknown model kind '{other}' (expected one of AR, LINSGD, FFNN, VRNN, LSTM, GRU, BIRNN, STRNN)"
            ))),
        }
    }
}

/// Which task adapter a model was trained under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    SlidingWindow,
    TimeStep,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::SlidingWindow => write!(f, "sliding-window"),
            Protocol::TimeStep => write!(f, "time-step"),
        }
    }
}

/// Hyperparameters for one training run. Every gradient-trained kind shares
/// the same defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub hidden: usize,
    /// Recurrent layer count; the stacked kind is defined as 2.
    pub layers: usize,
    pub epochs: usize,
    pub lr: f64,
    pub lr_factor: f64,
    pub lr_patience: usize,
    pub lr_floor: f64,
    pub seed: u64,
    /// AR order; defaults to the window length for comparability.
    pub ar_order: usize,
    /// Sliding-window length W.
    pub window: usize,
}

impl ModelConfig {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            hidden: nncore::DEFAULT_HIDDEN,
            layers: if kind == ModelKind::Strnn { 2 } else { 1 },
            epochs: nncore::DEFAULT_EPOCHS,
            lr: nncore::DEFAULT_LR,
            lr_factor: nncore::LR_DECAY,
            lr_patience: nncore::LR_PATIENCE,
            lr_floor: nncore::LR_FLOOR,
            seed: 0,
            ar_order: 50,
            window: 50,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::Ar && self.ar_order == 0 {
            return Err(ChaosError::Config("AR order must be >= 1".into()));
        }
        if self.kind.is_gradient_trained() {
            if self.hidden == 0 && self.kind != ModelKind::LinSgd {
                return Err(ChaosError::Config("hidden size must be >= 1".into()));
            }
            if self.epochs == 0 {
                return Err(ChaosError::Config("epochs must be >= 1".into()));
            }
            if !(self.lr > 0.0) {
                return Err(ChaosError::Config(format!("learning rate must be > 0, got {}", self.lr)));
            }
        }
        if self.window == 0 {
            return Err(ChaosError::Config("window must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing_round_trip() {
        for kind in ALL_KINDS {
            let parsed: ModelKind = kind.name().parse().unwrap();
            assert_eq!(parsed, kind);
        }
        assert!("mystery".parse::<ModelKind>().is_err());
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = ModelConfig::new(ModelKind::Lstm);
        assert_eq!(c.hidden, 32);
        assert_eq!(c.epochs, 200);
        assert_eq!(c.layers, 1);
        assert!(c.validate().is_ok());

        let s = ModelConfig::new(ModelKind::Strnn);
        assert_eq!(s.layers, 2);

        let mut ar = ModelConfig::new(ModelKind::Ar);
        ar.ar_order = 0;
        assert!(ar.validate().is_err());
    }
}
