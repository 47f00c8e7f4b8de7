// scratch probe for the sliding-window training path (deleted before ship)
use chaoslab::dataset::make_windows;
use chaoslab::dynamics::PendulumParams;
use chaoslab::eval::rmse;
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{evaluate_sliding, train_sliding, ModelConfig, ModelKind};

fn main() {
    let p = PendulumParams::double_unit();
    let traj = integrate_from_deg(&p, &[90.0, 90.0], 2.0, 1e-3).unwrap();
    let ds = make_windows(&traj, 50).unwrap();
    println!("pairs: {}", ds.n_pairs);

    // baseline: predict last input row (persistence)
    let (_, test) = ds.split();
    let mut persist_pred = Vec::new();
    let mut actual = Vec::new();
    for k in 0..test.len() {
        let w = test.input(k);
        persist_pred.push(w[(ds.window - 1) * ds.dim..].to_vec());
        actual.push(test.target(k).to_vec());
    }
    println!(
        "persistence baseline scaled rmse: {:.3e}",
        rmse(&persist_pred, &actual).unwrap()
    );

    for kind in [ModelKind::Ffnn, ModelKind::Lstm] {
        for epochs in [1usize, 3] {
            let config = ModelConfig::new(kind).with_seed(1).with_epochs(epochs);
            let model = train_sliding(&config, &ds).unwrap();
            let eval = evaluate_sliding(&model, &ds).unwrap();
            let scaled = rmse(&eval.predicted_scaled, &eval.actual_scaled).unwrap();
            println!(
                "{kind} epochs={epochs}: scaled rmse {scaled:.3e}; loss curve {:?}",
                model
                    .loss_curve
                    .iter()
                    .map(|v| format!("{v:.2e}"))
                    .collect::<Vec<_>>()
            );
        }
    }
}
