// scratch probe: criterion 9 (sliding) and criterion 7 (VRNN vs AR)
use chaoslab::dataset::{make_timestep_dataset, make_windows, training_angle_grid};
use chaoslab::dynamics::{PendulumParams, System};
use chaoslab::eval::rmse;
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{
    evaluate_sliding, evaluate_timestep, train_sliding, train_timestep, ModelConfig, ModelKind,
};
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    // range containment: does the test segment leave the training range?
    let p = PendulumParams::double_unit();
    let traj = integrate_from_deg(&p, &[90.0, 90.0], 10.0, 1e-3).unwrap();
    let rows = traj.angle_rows();
    let split_at = (rows.len() as f64 * 0.8) as usize;
    for j in 0..2 {
        let (mut lo_a, mut hi_a, mut lo_b, mut hi_b) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (k, r) in rows.iter().enumerate() {
            if k < split_at {
                lo_a = lo_a.min(r[j]);
                hi_a = hi_a.max(r[j]);
            } else {
                lo_b = lo_b.min(r[j]);
                hi_b = hi_b.max(r[j]);
            }
        }
        println!("theta{}: train [{lo_a:.2}, {hi_a:.2}], test [{lo_b:.2}, {hi_b:.2}]", j + 1);
    }

    let ds = make_windows(&traj, 50).unwrap();
    for epochs in [4usize] {
        let t0 = Instant::now();
        let config = ModelConfig::new(ModelKind::Lstm).with_seed(1).with_epochs(epochs);
        let model = train_sliding(&config, &ds).unwrap();
        let eval = evaluate_sliding(&model, &ds).unwrap();
        let scaled = rmse(&eval.predicted_scaled, &eval.actual_scaled).unwrap();
        println!(
            "sliding LSTM 10s epochs={epochs}: scaled rmse {scaled:.3e} in {:?}; losses {:?}",
            t0.elapsed(),
            model.loss_curve.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()
        );
    }

    // VRNN long-run vs AR on the friction grid
    let damped = PendulumParams::double_unit().with_uniform_damping(0.1).unwrap();
    let grid = training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.1).unwrap();
    let trajs: Vec<_> = grid
        .iter()
        .map(|c| integrate_from_deg(&damped, c, 10.0, 1e-3).unwrap())
        .collect();
    let holdout = vec![integrate_from_deg(&damped, &[120.0, 2.05], 10.0, 1e-3).unwrap()];
    let split = make_timestep_dataset(&trajs, &holdout, 250)
        .unwrap()
        .split_holdout(&[120.0, 2.05])
        .unwrap();

    let jobs: Vec<(u64, usize)> = vec![(1, 800), (2, 800), (3, 800)];
    let results: Vec<(u64, usize, f64)> = jobs
        .par_iter()
        .map(|(seed, epochs)| {
            let config = ModelConfig::new(ModelKind::Vrnn).with_seed(*seed).with_epochs(*epochs);
            let model = train_timestep(&config, &split).unwrap();
            let eval = evaluate_timestep(&model, &split.test).unwrap();
            (*seed, *epochs, rmse(&eval.predicted, &eval.actual).unwrap())
        })
        .collect();
    for (seed, epochs, rm) in &results {
        println!("VRNN seed {seed} epochs {epochs}: rmse {rm:.4}");
    }
}
