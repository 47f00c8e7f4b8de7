//! One-step-ahead forecasting with the sliding-window protocol: the previous
//! 50 angle rows predict the next row, teacher-forced on the chronological
//! test split.
//!
//! Run with: `cargo run --release --example sliding_window_forecast`

use chaoslab::dataset::make_windows;
use chaoslab::dynamics::PendulumParams;
use chaoslab::eval::{r2, rmse};
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{evaluate_sliding, train_sliding, ModelConfig, ModelKind};

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit();
    let traj = integrate_from_deg(&params, &[90.0, 90.0], 10.0, 1e-3)?;
    let ds = make_windows(&traj, 50)?;
    println!(
        "{} window pairs from a {}-row trajectory (W = 50, 0.8 chronological split)",
        ds.n_pairs,
        traj.states.len()
    );

    for kind in [ModelKind::Ar, ModelKind::Lstm] {
        let config = ModelConfig::new(kind).with_seed(7).with_epochs(4);
        let model = train_sliding(&config, &ds)?;
        let eval = evaluate_sliding(&model, &ds)?;
        let scaled = rmse(&eval.predicted_scaled, &eval.actual_scaled)?;
        let unscaled = rmse(&eval.predicted, &eval.actual)?;
        let r2v = r2(&eval.predicted, &eval.actual)?;
        println!(
            "{kind:>6}: one-step scaled RMSE {scaled:.3e}, unscaled {unscaled:.3e} rad, R2 {r2v:.5}"
        );
    }
    Ok(())
}
