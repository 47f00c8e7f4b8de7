//! The trained-model surface: prediction paths, checkpoint serialization,
//! and trajectory forecasting.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::normalizer::MinMaxNormalizer;
use crate::dataset::timestep::TimeStepDataset;
use crate::dataset::window::WindowedDataset;
use crate::error::{ChaosError, Result};
use crate::integrator::{fmt_f64, parse_f64_row};
use crate::models::arch::{Arch, ForwardPass};
use crate::models::train::window_inputs;
use crate::models::{ar, ModelConfig, ModelKind, Protocol};
use crate::nncore::array::NumArray;
use crate::nncore::params::ParamSet;
use crate::nncore::tape::{NodeId, Tape};

/// A trained regressor of any kind, under either protocol.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub config: ModelConfig,
    pub protocol: Protocol,
    /// Per-step feature width (recurrent/time-step) or flattened width.
    pub input_dim: usize,
    /// Output dimension d (joint count).
    pub output_dim: usize,
    /// Normalizer over the protocol's full row layout: the d angle columns
    /// for sliding windows, `[t, initial angles, target angles]` for the
    /// time-step protocol.
    pub normalizer: MinMaxNormalizer,
    pub params: ParamSet,
    pub(crate) arch: Arch,
    /// Sample spacing of the training data, seconds.
    pub sample_dt: f64,
    /// Largest trained time (time-step protocol).
    pub t_max: f64,
    /// Mean training loss per epoch (empty for AR).
    pub loss_curve: Vec<f64>,
}

impl TrainedModel {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn fresh(
        config: ModelConfig,
        protocol: Protocol,
        input_dim: usize,
        output_dim: usize,
        normalizer: MinMaxNormalizer,
        ar_features: usize,
        sample_dt: f64,
        t_max: f64,
    ) -> Self {
        let mut params = ParamSet::new();
        let arch = Arch::init(
            &mut params,
            config.kind,
            input_dim,
            output_dim,
            config.hidden,
            ar_features,
            config.seed,
        );
        Self {
            config,
            protocol,
            input_dim,
            output_dim,
            normalizer,
            params,
            arch,
            sample_dt,
            t_max,
            loss_curve: Vec::new(),
        }
    }

    pub(crate) fn set_ar_coeff(&mut self, coeff: NumArray) -> Result<()> {
        let Arch::Ar { coeff: id } = &self.arch else {
            return Err(ChaosError::Config("not an AR model".into()));
        };
        *self.params.value_mut(*id) = coeff;
        Ok(())
    }

    fn ar_coeff(&self) -> Result<&NumArray> {
        let Arch::Ar { coeff } = &self.arch else {
            return Err(ChaosError::Config("not an AR model".into()));
        };
        Ok(self.params.value(*coeff))
    }

    /// AR order in effect: the window length under the sliding protocol.
    fn ar_order(&self) -> usize {
        match self.protocol {
            Protocol::SlidingWindow => self.config.window,
            Protocol::TimeStep => self.config.ar_order,
        }
    }

    /// One-step prediction from a scaled flattened window (sliding protocol).
    pub fn predict_window_scaled(&self, window_flat: &[f64]) -> Result<Vec<f64>> {
        let (w, d) = (self.config.window, self.output_dim);
        if window_flat.len() != w * d {
            return Err(ChaosError::ShapeMismatch(format!(
                "window has {} values, expected {}",
                window_flat.len(),
                w * d
            )));
        }
        if self.config.kind == ModelKind::Ar {
            let rows: Vec<Vec<f64>> = (0..w).map(|k| window_flat[k * d..(k + 1) * d].to_vec()).collect();
            return Ok(ar::ar_predict_next(self.ar_coeff()?, &rows, w));
        }
        let mut tape = Tape::new();
        let pass = ForwardPass::insert(&mut tape, &self.params, &self.arch, self.config.kind, self.config.hidden);
        let xs = window_inputs(&mut tape, self.config.kind, window_flat, w, d);
        let outs = pass.sequence_outputs(&mut tape, &xs, true)?;
        Ok(tape.value(outs[0]).data().to_vec())
    }

    /// Per-step predictions for a scaled feature sequence (time-step
    /// protocol, gradient-trained kinds).
    pub fn predict_series_scaled(&self, features: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if self.config.kind == ModelKind::Ar {
            return Err(ChaosError::Config(
                "AR predicts by closed-loop rollout; use predict_ar_rollout_scaled".into(),
            ));
        }
        let mut tape = Tape::new();
        let pass = ForwardPass::insert(&mut tape, &self.params, &self.arch, self.config.kind, self.config.hidden);
        let xs: Vec<NodeId> = features
            .iter()
            .map(|row| tape.leaf(NumArray::vector(row.clone())))
            .collect();
        let outs = pass.sequence_outputs(&mut tape, &xs, false)?;
        Ok(outs.iter().map(|o| tape.value(*o).data().to_vec()).collect())
    }

    /// Closed-loop AR rollout in scaled angle space, seeded with the first
    /// `p` true rows; the seed rows are echoed into the output.
    pub fn predict_ar_rollout_scaled(&self, seed: &[Vec<f64>], total_len: usize) -> Result<Vec<Vec<f64>>> {
        let p = self.ar_order();
        if seed.len() < p {
            return Err(ChaosError::InvalidParams(format!(
                "AR rollout needs {p} seed rows, got {}",
                seed.len()
            )));
        }
        let coeff = self.ar_coeff()?;
        let mut rows: Vec<Vec<f64>> = seed[..p].to_vec();
        while rows.len() < total_len {
            rows.push(ar::ar_predict_next(coeff, &rows, p));
        }
        rows.truncate(total_len);
        Ok(rows)
    }

    /// Scaled-feature/target column views for the time-step layout.
    pub fn feature_normalizer(&self) -> MinMaxNormalizer {
        self.normalizer.slice(0..self.input_dim)
    }

    pub fn target_normalizer(&self) -> MinMaxNormalizer {
        match self.protocol {
            Protocol::TimeStep => self.normalizer.slice(self.input_dim..self.input_dim + self.output_dim),
            Protocol::SlidingWindow => self.normalizer.clone(),
        }
    }

    pub fn to_checkpoint(&self) -> ModelCheckpoint {
        let weights = self
            .params
            .iter()
            .map(|(name, value)| {
                (
                    name.to_string(),
                    WeightEntry {
                        shape: value.shape().to_vec(),
                        values: value.data().to_vec(),
                    },
                )
            })
            .collect();
        ModelCheckpoint {
            kind: self.config.kind,
            hyperparameters: CheckpointHyper {
                protocol: self.protocol,
                hidden: self.config.hidden,
                layers: self.config.layers,
                epochs: self.config.epochs,
                lr: self.config.lr,
                lr_factor: self.config.lr_factor,
                lr_patience: self.config.lr_patience,
                lr_floor: self.config.lr_floor,
                ar_order: self.config.ar_order,
                window: self.config.window,
                input_dim: self.input_dim,
                output_dim: self.output_dim,
                sample_dt: self.sample_dt,
                t_max: self.t_max,
            },
            seed: self.config.seed,
            normalizer: self.normalizer.clone(),
            weights,
        }
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Result<Self> {
        let h = &ckpt.hyperparameters;
        let mut config = ModelConfig::new(ckpt.kind);
        config.hidden = h.hidden;
        config.layers = h.layers;
        config.epochs = h.epochs;
        config.lr = h.lr;
        config.lr_factor = h.lr_factor;
        config.lr_patience = h.lr_patience;
        config.lr_floor = h.lr_floor;
        config.ar_order = h.ar_order;
        config.window = h.window;
        config.seed = ckpt.seed;

        let names = Arch::param_names(ckpt.kind);
        let mut map = BTreeMap::new();
        for (name, entry) in &ckpt.weights {
            map.insert(
                name.clone(),
                NumArray::from_vec(entry.values.clone(), &entry.shape)?,
            );
        }
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let params = ParamSet::from_map(&name_refs, &map)?;
        Ok(Self {
            config,
            protocol: h.protocol,
            input_dim: h.input_dim,
            output_dim: h.output_dim,
            normalizer: ckpt.normalizer.clone(),
            params,
            arch: Arch::relocate(ckpt.kind),
            sample_dt: h.sample_dt,
            t_max: h.t_max,
            loss_curve: Vec::new(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.to_checkpoint())?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let ckpt: ModelCheckpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::from_checkpoint(&ckpt)
    }
}

/// Checkpoint JSON: `{kind, hyperparameters, seed, normalizer, weights}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCheckpoint {
    pub kind: ModelKind,
    pub hyperparameters: CheckpointHyper,
    pub seed: u64,
    pub normalizer: MinMaxNormalizer,
    pub weights: BTreeMap<String, WeightEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointHyper {
    pub protocol: Protocol,
    pub hidden: usize,
    pub layers: usize,
    pub epochs: usize,
    pub lr: f64,
    pub lr_factor: f64,
    pub lr_patience: usize,
    pub lr_floor: f64,
    pub ar_order: usize,
    pub window: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    pub sample_dt: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEntry {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

/// Paired actual/predicted angle rows, kept in both scaled and unscaled
/// (radians) form so metrics can use either.
#[derive(Debug, Clone)]
pub struct PredictionSet {
    pub times: Vec<f64>,
    pub actual: Vec<Vec<f64>>,
    pub predicted: Vec<Vec<f64>>,
    pub actual_scaled: Vec<Vec<f64>>,
    pub predicted_scaled: Vec<Vec<f64>>,
}

impl PredictionSet {
    pub fn dim(&self) -> usize {
        self.actual.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Prediction dump CSV `t,actual_theta1,pred_theta1,...` (radians).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let d = self.dim();
        let mut header = String::from("t");
        for i in 1..=d {
            header.push_str(&format!(",actual_theta{i},pred_theta{i}"));
        }
        writeln!(out, "{header}")?;
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{}", fmt_f64(*t))?;
            for j in 0..d {
                write!(out, ",{},{}", fmt_f64(self.actual[k][j]), fmt_f64(self.predicted[k][j]))?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a prediction dump back as (times, actual rows, predicted rows).
    pub fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(ChaosError::Schema {
            row: 0,
            message: "empty prediction file".into(),
        })?;
        let cols = header.split(',').count();
        if cols < 3 || (cols - 1) % 2 != 0 {
            return Err(ChaosError::Schema {
                row: 1,
                message: format!("unexpected prediction header '{header}'"),
            });
        }
        let d = (cols - 1) / 2;
        let mut times = Vec::new();
        let mut actual = Vec::new();
        let mut predicted = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields = parse_f64_row(line, cols, idx + 1)?;
            times.push(fields[0]);
            actual.push((0..d).map(|j| fields[1 + 2 * j]).collect());
            predicted.push((0..d).map(|j| fields[2 + 2 * j]).collect());
        }
        Ok((times, actual, predicted))
    }
}

/// Teacher-forced evaluation over the chronological test split: true windows
/// in, one step out, for every test pair.
pub fn evaluate_sliding(model: &TrainedModel, ds: &WindowedDataset) -> Result<PredictionSet> {
    let (_, test) = ds.split();
    if test.is_empty() {
        return Err(ChaosError::InvalidParams("empty test split".into()));
    }
    let mut set = PredictionSet {
        times: Vec::with_capacity(test.len()),
        actual: Vec::new(),
        predicted: Vec::new(),
        actual_scaled: Vec::new(),
        predicted_scaled: Vec::new(),
    };
    for k in 0..test.len() {
        let pred_scaled = model.predict_window_scaled(test.input(k))?;
        let tgt_scaled = test.target(k).to_vec();
        set.times.push((test.start + k + ds.window) as f64 * ds.dt);
        set.actual.push(ds.normalizer.inverse_row(&tgt_scaled)?);
        set.predicted.push(ds.normalizer.inverse_row(&pred_scaled)?);
        set.actual_scaled.push(tgt_scaled);
        set.predicted_scaled.push(pred_scaled);
    }
    Ok(set)
}

/// Closed-loop sliding rollout (optional mode): feeds predictions back as
/// inputs starting from the first test window.
pub fn rollout_sliding(model: &TrainedModel, ds: &WindowedDataset, steps: usize) -> Result<PredictionSet> {
    let (_, test) = ds.split();
    if test.is_empty() {
        return Err(ChaosError::InvalidParams("empty test split".into()));
    }
    let (w, d) = (ds.window, ds.dim);
    let steps = steps.min(test.len());
    let mut window: Vec<f64> = test.input(0).to_vec();
    let mut set = PredictionSet {
        times: Vec::new(),
        actual: Vec::new(),
        predicted: Vec::new(),
        actual_scaled: Vec::new(),
        predicted_scaled: Vec::new(),
    };
    for k in 0..steps {
        let pred = model.predict_window_scaled(&window)?;
        let tgt = test.target(k).to_vec();
        set.times.push((test.start + k + w) as f64 * ds.dt);
        set.actual.push(ds.normalizer.inverse_row(&tgt)?);
        set.predicted.push(ds.normalizer.inverse_row(&pred)?);
        set.actual_scaled.push(tgt);
        set.predicted_scaled.push(pred.clone());
        window.drain(..d);
        window.extend_from_slice(&pred);
    }
    Ok(set)
}

/// Per-trajectory evaluation of a time-step model against test groups. AR
/// rolls out closed-loop from its first `p` true rows.
pub fn evaluate_timestep(model: &TrainedModel, test: &TimeStepDataset) -> Result<PredictionSet> {
    let d = model.output_dim;
    let feature_norm = model.feature_normalizer();
    let target_norm = model.target_normalizer();
    let mut set = PredictionSet {
        times: Vec::new(),
        actual: Vec::new(),
        predicted: Vec::new(),
        actual_scaled: Vec::new(),
        predicted_scaled: Vec::new(),
    };
    for g in &test.groups {
        let tgts_scaled: Vec<Vec<f64>> = (0..g.len())
            .map(|k| target_norm.transform_row(g.target_row(k, d)))
            .collect::<Result<_>>()?;
        let preds_scaled = if model.config.kind == ModelKind::Ar {
            model.predict_ar_rollout_scaled(&tgts_scaled, g.len())?
        } else {
            let feats: Vec<Vec<f64>> = (0..g.len())
                .map(|k| feature_norm.transform_row(&g.feature_row(k)))
                .collect::<Result<_>>()?;
            model.predict_series_scaled(&feats)?
        };
        for k in 0..g.len() {
            set.times.push(g.times[k]);
            set.actual.push(g.target_row(k, d).to_vec());
            set.predicted.push(target_norm.inverse_row(&preds_scaled[k])?);
            set.actual_scaled.push(tgts_scaled[k].clone());
            set.predicted_scaled.push(preds_scaled[k].clone());
        }
    }
    Ok(set)
}

/// A forecast trajectory from a time-step model.
#[derive(Debug, Clone)]
pub struct TrajectoryForecast {
    pub times: Vec<f64>,
    /// Angle rows in radians.
    pub angles: Vec<Vec<f64>>,
    /// Set when the horizon runs past the trained time range.
    pub extrapolated: bool,
}

/// Predicts the full angle series for an initial condition over `horizon`
/// seconds at the model's trained sampling. AR needs `seed` rows of true
/// angles (radians) to start its rollout; other kinds ignore `seed`.
pub fn predict_trajectory(
    model: &TrainedModel,
    initial_deg: &[f64],
    horizon: f64,
    seed: Option<&[Vec<f64>]>,
) -> Result<TrajectoryForecast> {
    if model.protocol != Protocol::TimeStep {
        return Err(ChaosError::Config(
            "trajectory forecasting needs a time-step-trained model".into(),
        ));
    }
    if !(horizon > 0.0) || model.sample_dt <= 0.0 {
        return Err(ChaosError::InvalidParams("horizon and sample spacing must be > 0".into()));
    }
    let n = (horizon / model.sample_dt).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|j| j as f64 * model.sample_dt).collect();
    let feature_norm = model.feature_normalizer();
    let target_norm = model.target_normalizer();

    let preds_scaled = if model.config.kind == ModelKind::Ar {
        let seed = seed.ok_or_else(|| {
            ChaosError::Config("AR trajectory forecasting needs seed rows of true angles".into())
        })?;
        let seed_scaled: Vec<Vec<f64>> = seed
            .iter()
            .map(|row| target_norm.transform_row(row))
            .collect::<Result<_>>()?;
        model.predict_ar_rollout_scaled(&seed_scaled, n)?
    } else {
        let feats: Vec<Vec<f64>> = times
            .iter()
            .map(|t| {
                let mut row = Vec::with_capacity(1 + initial_deg.len());
                row.push(*t);
                row.extend_from_slice(initial_deg);
                feature_norm.transform_row(&row)
            })
            .collect::<Result<_>>()?;
        model.predict_series_scaled(&feats)?
    };
    let angles = preds_scaled
        .iter()
        .map(|row| target_norm.inverse_row(row))
        .collect::<Result<_>>()?;
    Ok(TrajectoryForecast {
        extrapolated: horizon > model.t_max + 1e-9,
        times,
        angles,
    })
}
