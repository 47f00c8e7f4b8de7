// scratch probe round 4 (deleted before ship)
use chaoslab::dataset::make_windows;
use chaoslab::dynamics::PendulumParams;
use chaoslab::eval::rmse;
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{train_sliding, ModelConfig, ModelKind};
use std::time::Instant;

fn main() {
    let p = PendulumParams::double_unit();
    let traj = integrate_from_deg(&p, &[90.0, 90.0], 10.0, 1e-3).unwrap();
    let ds = make_windows(&traj, 50).unwrap();
    let (train, test) = ds.split();
    for (seed, epochs) in [(1u64, 2usize), (1, 6), (1, 10), (2, 6), (3, 6)] {
        let t0 = Instant::now();
        let config = ModelConfig::new(ModelKind::Lstm).with_seed(seed).with_epochs(epochs);
        let model = train_sliding(&config, &ds).unwrap();
        let mut preds = Vec::new();
        let mut actual = Vec::new();
        for k in 0..train.len() {
            preds.push(model.predict_window_scaled(train.input(k)).unwrap());
            actual.push(train.target(k).to_vec());
        }
        let in_sample = rmse(&preds, &actual).unwrap();
        let mut tpreds = Vec::new();
        let mut tactual = Vec::new();
        for k in 0..test.len() {
            tpreds.push(model.predict_window_scaled(test.input(k)).unwrap());
            tactual.push(test.target(k).to_vec());
        }
        let held_out = rmse(&tpreds, &tactual).unwrap();
        println!(
            "seed {seed} epochs {epochs}: in-sample {in_sample:.3e}, held-out segment {held_out:.3e} ({:?})",
            t0.elapsed()
        );
    }
}
