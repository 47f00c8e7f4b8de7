//! The time-step protocol end to end: train on a grid of initial angles,
//! test on an in-between hold-out the model never saw, and export the
//! actual-vs-predicted trajectory figure.
//!
//! Desk scale (a short grid and few epochs) so it finishes in about a
//! minute; the `reproduce` subcommand runs the full matrix.
//!
//! Run with: `cargo run --release --example timestep_forecast`

use chaoslab::dataset::{make_timestep_dataset, training_angle_grid};
use chaoslab::dynamics::{PendulumParams, System};
use chaoslab::eval::{r2, rmse, trajectory_plot};
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{evaluate_timestep, predict_trajectory, train_timestep, ModelConfig, ModelKind};

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit().with_uniform_damping(0.1)?;

    // a thinned version of the paper's grid: [120, 0] .. [120, 3] step 0.5
    let grid = training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.5)?;
    let trajs: Vec<_> = grid
        .iter()
        .map(|c| integrate_from_deg(&params, c, 10.0, 1e-3))
        .collect::<chaoslab::Result<_>>()?;
    let holdout_cond = [120.0, 2.25];
    let holdout = vec![integrate_from_deg(&params, &holdout_cond, 10.0, 1e-3)?];
    let split = make_timestep_dataset(&trajs, &holdout, 250)?.split_holdout(&holdout_cond)?;
    println!(
        "train: {} trajectories x {} rows; hold-out {:?}",
        split.train.groups.len(),
        split.train.groups[0].len(),
        holdout_cond
    );

    let config = ModelConfig::new(ModelKind::Lstm).with_seed(1).with_epochs(150);
    let model = train_timestep(&config, &split)?;
    let eval = evaluate_timestep(&model, &split.test)?;
    println!(
        "hold-out RMSE {:.4} rad, R2 {:.4}",
        rmse(&eval.predicted, &eval.actual)?,
        r2(&eval.predicted, &eval.actual)?
    );

    let forecast = predict_trajectory(&model, &holdout_cond, 10.0, None)?;
    println!(
        "forecast of {} samples, extrapolated: {}",
        forecast.times.len(),
        forecast.extrapolated
    );

    let svg = std::env::temp_dir().join("chaoslab_timestep_lstm.svg");
    trajectory_plot(
        &eval.times,
        &eval.actual,
        &eval.predicted,
        "LSTM time-step forecast, friction hold-out [120, 2.25]",
        &svg,
    )?;
    println!("wrote {}", svg.display());
    Ok(())
}
