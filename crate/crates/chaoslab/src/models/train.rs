//! Training loops for the two protocols.
//!
//! Gradient-trained kinds share one loop: forward on a fresh tape, reverse
//! accumulation, one Adam step per batch. The time-step protocol batches one
//! full trajectory per step; the sliding protocol steps once per window pair.
//! AR bypasses the tape entirely and is fit by least squares.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::timestep::HoldoutSplit;
use crate::dataset::window::WindowedDataset;
use crate::error::{ChaosError, Result};
use crate::models::arch::{Arch, ForwardPass};
use crate::models::regressor::TrainedModel;
use crate::models::{ar, ModelConfig, ModelKind, Protocol};
use crate::nncore::array::NumArray;
use crate::nncore::optim::{Adam, PlateauSchedule};
use crate::nncore::params::ParamSet;
use crate::nncore::tape::{NodeId, Tape};

/// Trains a one-step-ahead predictor on window pairs. Evaluation against the
/// chronological test split stays teacher-forced (true windows in).
pub fn train_sliding(config: &ModelConfig, ds: &WindowedDataset) -> Result<TrainedModel> {
    config.validate()?;
    if ds.window != config.window {
        return Err(ChaosError::Config(format!(
            "dataset was built with window {}, config says {}",
            ds.window, config.window
        )));
    }
    let d = ds.dim;
    let (train, _) = ds.split();
    if train.is_empty() {
        return Err(ChaosError::InvalidParams("empty training split".into()));
    }
    let input_dim = if config.kind.is_recurrent() { d } else { ds.window * d };

    let mut model = TrainedModel::fresh(
        config.clone(),
        Protocol::SlidingWindow,
        input_dim,
        d,
        ds.normalizer.clone(),
        ds.window * d + 1,
        ds.dt,
        0.0,
    );

    if config.kind == ModelKind::Ar {
        // the flattened window is the lag context: order = W
        let series = ds.scaled_rows();
        let n_train = train.len();
        let fit_rows = &series[..n_train + ds.window];
        let coeff = ar::fit_ar(fit_rows, ds.window)?;
        model.set_ar_coeff(coeff)?;
        return Ok(model);
    }

    let mut adam = Adam::new(&model.params);
    let mut sched = PlateauSchedule::with(config.lr, config.lr_factor, config.lr_patience, config.lr_floor);
    let mut lr = sched.lr();
    // chronological pair order makes per-pair SGD surf the trajectory and
    // forget earlier windows; a seeded shuffle keeps the updates i.i.d.-like
    // while staying deterministic under the config seed
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut order_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5EED));
    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        order.shuffle(&mut order_rng);
        for &k in &order {
            let mut tape = Tape::new();
            let pass = ForwardPass::insert(&mut tape, &model.params, &model.arch, config.kind, config.hidden);
            let xs = window_inputs(&mut tape, config.kind, train.input(k), ds.window, d);
            let outs = pass.sequence_outputs(&mut tape, &xs, true)?;
            let target = tape.leaf(NumArray::vector(train.target(k).to_vec()));
            let loss = tape.mse(outs[0], target)?;
            let loss_val = tape.value(loss).first();
            if !loss_val.is_finite() {
                return Err(ChaosError::Training(format!(
                    "non-finite loss at epoch {epoch}, pair {k}"
                )));
            }
            step_params(&tape, loss, &pass, &mut model.params, &mut adam, lr)?;
            epoch_loss += loss_val;
        }
        epoch_loss /= train.len() as f64;
        model.loss_curve.push(epoch_loss);
        lr = sched.observe(epoch_loss);
    }
    Ok(model)
}

/// Trains a time-conditioned predictor; one Adam step per full trajectory.
pub fn train_timestep(config: &ModelConfig, split: &HoldoutSplit) -> Result<TrainedModel> {
    config.validate()?;
    let train = &split.train;
    let d = train.dim;
    let f = train.feature_width();
    let feature_norm = split.normalizer.slice(0..f);
    let target_norm = split.normalizer.slice(f..f + d);

    // pre-scale every group once
    let mut groups: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = Vec::with_capacity(train.groups.len());
    for g in &train.groups {
        let mut feats = Vec::with_capacity(g.len());
        let mut tgts = Vec::with_capacity(g.len());
        for k in 0..g.len() {
            feats.push(feature_norm.transform_row(&g.feature_row(k))?);
            tgts.push(target_norm.transform_row(g.target_row(k, d))?);
        }
        groups.push((feats, tgts));
    }

    let t_max = train
        .groups
        .iter()
        .flat_map(|g| g.times.last().copied())
        .fold(0.0f64, f64::max);
    let mut model = TrainedModel::fresh(
        config.clone(),
        Protocol::TimeStep,
        f,
        d,
        split.normalizer.clone(),
        config.ar_order * d + 1,
        train.sample_dt,
        t_max,
    );

    if config.kind == ModelKind::Ar {
        let series: Vec<&[Vec<f64>]> = groups.iter().map(|(_, t)| t.as_slice()).collect();
        let coeff = ar::fit_ar_stacked(&series, config.ar_order)?;
        model.set_ar_coeff(coeff)?;
        return Ok(model);
    }

    let mut adam = Adam::new(&model.params);
    let mut sched = PlateauSchedule::with(config.lr, config.lr_factor, config.lr_patience, config.lr_floor);
    let mut lr = sched.lr();
    for epoch in 0..config.epochs {
        let mut epoch_loss = 0.0;
        for (feats, tgts) in &groups {
            let mut tape = Tape::new();
            let pass = ForwardPass::insert(&mut tape, &model.params, &model.arch, config.kind, config.hidden);
            let xs: Vec<NodeId> = feats
                .iter()
                .map(|row| tape.leaf(NumArray::vector(row.clone())))
                .collect();
            let outs = pass.sequence_outputs(&mut tape, &xs, false)?;
            let mut step_losses = Vec::with_capacity(outs.len());
            for (out, tgt) in outs.iter().zip(tgts) {
                let t = tape.leaf(NumArray::vector(tgt.clone()));
                step_losses.push(tape.mse(*out, t)?);
            }
            let total = tape.add_n(&step_losses)?;
            let loss = tape.affine(total, 1.0 / step_losses.len() as f64, 0.0);
            let loss_val = tape.value(loss).first();
            if !loss_val.is_finite() {
                return Err(ChaosError::Training(format!("non-finite loss at epoch {epoch}")));
            }
            step_params(&tape, loss, &pass, &mut model.params, &mut adam, lr)?;
            epoch_loss += loss_val;
        }
        epoch_loss /= groups.len() as f64;
        model.loss_curve.push(epoch_loss);
        lr = sched.observe(epoch_loss);
    }
    Ok(model)
}

/// Window rows become a sequence for recurrent kinds and one flattened vector
/// for pointwise kinds.
pub(crate) fn window_inputs(
    tape: &mut Tape,
    kind: ModelKind,
    window_flat: &[f64],
    window: usize,
    d: usize,
) -> Vec<NodeId> {
    if kind.is_recurrent() {
        (0..window)
            .map(|w| tape.leaf(NumArray::vector(window_flat[w * d..(w + 1) * d].to_vec())))
            .collect()
    } else {
        vec![tape.leaf(NumArray::vector(window_flat.to_vec()))]
    }
}

fn step_params(
    tape: &Tape,
    loss: NodeId,
    pass: &ForwardPass,
    params: &mut ParamSet,
    adam: &mut Adam,
    lr: f64,
) -> Result<()> {
    let grads = tape.backward(loss)?;
    let leaves = pass.param_leaves();
    let grad_refs: Vec<&NumArray> = leaves.iter().map(|id| &grads[id.0]).collect();
    adam.step(params, &grad_refs, lr)
}

/// Fits a linear map by the shared gradient machinery (the LINSGD baseline)
/// on plain feature/target rows. Adam's updates dither around an optimum at
/// roughly the learning-rate scale, so `lr_floor` bounds the final accuracy.
pub fn fit_linear_sgd(
    rows: &[(Vec<f64>, Vec<f64>)],
    epochs: usize,
    lr: f64,
    lr_floor: f64,
    seed: u64,
) -> Result<(NumArray, NumArray)> {
    let Some((f0, t0)) = rows.first() else {
        return Err(ChaosError::InvalidParams("no rows to fit".into()));
    };
    let (fw, d) = (f0.len(), t0.len());
    let mut params = ParamSet::new();
    let arch = Arch::init(&mut params, ModelKind::LinSgd, fw, d, 0, 0, seed);
    let mut adam = Adam::new(&params);
    let mut sched = PlateauSchedule::with(lr, crate::nncore::LR_DECAY, crate::nncore::LR_PATIENCE, lr_floor);
    let mut rate = sched.lr();
    for epoch in 0..epochs {
        let mut epoch_loss = 0.0;
        for (feat, tgt) in rows {
            let mut tape = Tape::new();
            let pass = ForwardPass::insert(&mut tape, &params, &arch, ModelKind::LinSgd, 0);
            let x = tape.leaf(NumArray::vector(feat.clone()));
            let outs = pass.sequence_outputs(&mut tape, &[x], true)?;
            let target = tape.leaf(NumArray::vector(tgt.clone()));
            let loss = tape.mse(outs[0], target)?;
            let v = tape.value(loss).first();
            if !v.is_finite() {
                return Err(ChaosError::Training(format!("non-finite loss at epoch {epoch}")));
            }
            step_params(&tape, loss, &pass, &mut params, &mut adam, rate)?;
            epoch_loss += v;
        }
        rate = sched.observe(epoch_loss / rows.len() as f64);
    }
    let ids: Vec<_> = params.ids().collect();
    Ok((params.value(ids[0]).clone(), params.value(ids[1]).clone()))
}
