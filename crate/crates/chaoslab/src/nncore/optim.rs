//! Adam with bias correction, plus the reduce-on-plateau learning-rate
//! schedule whose floor implements the paper's minimum learning rate of 1e-4.

use crate::error::{ChaosError, Result};
use crate::nncore::array::NumArray;
use crate::nncore::params::ParamSet;
use crate::nncore::{LR_DECAY, LR_FLOOR, LR_PATIENCE};

#[derive(Debug, Clone)]
pub struct Adam {
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(params: &ParamSet) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: params.ids().map(|id| vec![0.0; params.value(id).len()]).collect(),
            v: params.ids().map(|id| vec![0.0; params.value(id).len()]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update with the given (scheduled) learning rate. `grads` must be
    /// aligned with the parameter set; a non-finite gradient fails naming the
    /// offending parameter.
    pub fn step(&mut self, params: &mut ParamSet, grads: &[&NumArray], lr: f64) -> Result<()> {
        if grads.len() != params.len() {
            return Err(ChaosError::ShapeMismatch(format!(
                "{} gradients for {} parameters",
                grads.len(),
                params.len()
            )));
        }
        for (idx, id) in params.ids().collect::<Vec<_>>().into_iter().enumerate() {
            if !grads[idx].all_finite() {
                return Err(ChaosError::Training(format!(
                    "non-finite gradient for parameter '{}'",
                    params.name(id)
                )));
            }
        }
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (idx, id) in params.ids().collect::<Vec<_>>().into_iter().enumerate() {
            let g = grads[idx].data();
            let m = &mut self.m[idx];
            let v = &mut self.v[idx];
            let p = params.value_mut(id).data_mut();
            for i in 0..p.len() {
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

/// Halves the learning rate after `patience` epochs without improvement,
/// never dropping below the floor.
#[derive(Debug, Clone)]
pub struct PlateauSchedule {
    lr: f64,
    floor: f64,
    factor: f64,
    patience: usize,
    best: f64,
    epochs_since_best: usize,
}

impl PlateauSchedule {
    pub fn new(initial_lr: f64) -> Self {
        Self::with(initial_lr, LR_DECAY, LR_PATIENCE, LR_FLOOR)
    }

    pub fn with(initial_lr: f64, factor: f64, patience: usize, floor: f64) -> Self {
        Self {
            lr: initial_lr.max(floor),
            floor,
            factor,
            patience,
            best: f64::INFINITY,
            epochs_since_best: 0,
        }
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// Feed one epoch's training loss; returns the rate for the next epoch.
    pub fn observe(&mut self, epoch_loss: f64) -> f64 {
        if epoch_loss < self.best {
            self.best = epoch_loss;
            self.epochs_since_best = 0;
        } else {
            self.epochs_since_best += 1;
            if self.epochs_since_best >= self.patience {
                self.lr = (self.lr * self.factor).max(self.floor);
                self.epochs_since_best = 0;
            }
        }
        self.lr
    }
}
