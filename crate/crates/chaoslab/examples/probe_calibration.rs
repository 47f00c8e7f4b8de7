// scratch calibration probe (deleted before ship)
use std::time::Instant;

use rayon::prelude::*;

use chaoslab::dataset::{make_timestep_dataset, make_windows, training_angle_grid};
use chaoslab::dynamics::{PendulumParams, System};
use chaoslab::eval::{r2, rmse};
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{
    evaluate_sliding, evaluate_timestep, train_sliding, train_timestep, ModelConfig, ModelKind,
};

fn main() {
    let t_all = Instant::now();
    let samples = 250;
    let grid = training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.1).unwrap();

    let build = |damping: f64| {
        let p = if damping > 0.0 {
            PendulumParams::double_unit().with_uniform_damping(damping).unwrap()
        } else {
            PendulumParams::double_unit()
        };
        let trajs: Vec<_> = grid
            .iter()
            .map(|c| integrate_from_deg(&p, c, 10.0, 1e-3).unwrap())
            .collect();
        let holdout = vec![integrate_from_deg(&p, &[120.0, 2.05], 10.0, 1e-3).unwrap()];
        make_timestep_dataset(&trajs, &holdout, samples)
            .unwrap()
            .split_holdout(&[120.0, 2.05])
            .unwrap()
    };
    let split_fric = build(0.1);
    let split_free = build(0.0);

    let run = |kind: ModelKind, seed: u64, epochs: usize, friction: bool| {
        let split = if friction { &split_fric } else { &split_free };
        let config = ModelConfig::new(kind).with_seed(seed).with_epochs(epochs);
        let model = train_timestep(&config, split).unwrap();
        let eval = evaluate_timestep(&model, &split.test).unwrap();
        (
            rmse(&eval.predicted, &eval.actual).unwrap(),
            r2(&eval.predicted, &eval.actual).unwrap(),
        )
    };

    let jobs: Vec<(ModelKind, u64, bool)> = {
        let mut v = Vec::new();
        for seed in [1u64, 2, 3] {
            v.push((ModelKind::Lstm, seed, true));
            v.push((ModelKind::Gru, seed, true));
            v.push((ModelKind::Vrnn, seed, true));
            v.push((ModelKind::Lstm, seed, false));
        }
        v
    };
    let t0 = Instant::now();
    let results: Vec<((ModelKind, u64, bool), (f64, f64))> = jobs
        .par_iter()
        .map(|(kind, seed, fric)| ((*kind, *seed, *fric), run(*kind, *seed, 400, *fric)))
        .collect();
    println!("12 trainings: {:?}", t0.elapsed());
    for ((kind, seed, fric), (rm, r2v)) in &results {
        println!("  {kind} seed {seed} friction={fric}: rmse {rm:.4}, r2 {r2v:.4}");
    }
    let median = |kind: ModelKind, fric: bool| {
        let mut v: Vec<f64> = results
            .iter()
            .filter(|((k, _, f), _)| *k == kind && *f == fric)
            .map(|(_, (rm, _))| *rm)
            .collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let ar = run(ModelKind::Ar, 0, 1, true);
    println!("AR friction: rmse {:.4}", ar.0);
    println!(
        "medians: LSTM(f) {:.4}, GRU(f) {:.4}, VRNN(f) {:.4}, LSTM(nofric) {:.4}",
        median(ModelKind::Lstm, true),
        median(ModelKind::Gru, true),
        median(ModelKind::Vrnn, true),
        median(ModelKind::Lstm, false)
    );

    // criterion 9: sliding-window LSTM on [90,90] frictionless, 1e4 points
    let p = PendulumParams::double_unit();
    let traj = integrate_from_deg(&p, &[90.0, 90.0], 10.0, 1e-3).unwrap();
    let ds = make_windows(&traj, 50).unwrap();
    for epochs in [1usize, 2] {
        let t1 = Instant::now();
        let config = ModelConfig::new(ModelKind::Lstm).with_seed(1).with_epochs(epochs);
        let model = train_sliding(&config, &ds).unwrap();
        let eval = evaluate_sliding(&model, &ds).unwrap();
        let scaled = rmse(&eval.predicted_scaled, &eval.actual_scaled).unwrap();
        println!(
            "sliding LSTM epochs={epochs}: scaled rmse {scaled:.2e} ({:?})",
            t1.elapsed()
        );
    }
    println!("total {:?}", t_all.elapsed());
}
