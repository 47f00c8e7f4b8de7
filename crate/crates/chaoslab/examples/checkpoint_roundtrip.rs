//! Save a trained model to checkpoint JSON and reload it bit-exactly.
//!
//! Run with: `cargo run --release --example checkpoint_roundtrip`

use chaoslab::dataset::make_windows;
use chaoslab::dynamics::PendulumParams;
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{train_sliding, ModelConfig, ModelKind, TrainedModel};

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit();
    let traj = integrate_from_deg(&params, &[60.0, 30.0], 1.0, 1e-3)?;
    let ds = make_windows(&traj, 20)?;

    let mut config = ModelConfig::new(ModelKind::Gru).with_seed(11).with_epochs(2);
    config.window = 20;
    let model = train_sliding(&config, &ds)?;

    let path = std::env::temp_dir().join("chaoslab_gru.ckpt.json");
    model.save(&path)?;
    let loaded = TrainedModel::load(&path)?;

    let (_, test) = ds.split();
    let before = model.predict_window_scaled(test.input(0))?;
    let after = loaded.predict_window_scaled(test.input(0))?;
    assert_eq!(before, after, "reloaded predictions must be bit-identical");
    println!("checkpoint at {}", path.display());
    println!("prediction before/after reload identical: {before:?}");
    Ok(())
}
