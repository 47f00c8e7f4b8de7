//! A miniature experiment matrix: every model kind on one desk-scale
//! friction scenario, aggregated into the RMSE heatmap artifacts.
//!
//! Run with: `cargo run --release --example model_zoo_matrix`

use chaoslab::dataset::{make_timestep_dataset, training_angle_grid};
use chaoslab::dynamics::{PendulumParams, System};
use chaoslab::eval::metrics::{MetricsRecord, Scenario};
use chaoslab::eval::{r2, rmse, rmse_heatmap};
use chaoslab::integrator::integrate_from_deg;
use chaoslab::models::{evaluate_timestep, train_timestep, ModelConfig, ModelKind, Protocol, ALL_KINDS};

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit().with_uniform_damping(0.1)?;
    let grid = training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.5)?;
    let trajs: Vec<_> = grid
        .iter()
        .map(|c| integrate_from_deg(&params, c, 10.0, 1e-3))
        .collect::<chaoslab::Result<_>>()?;
    let holdout_cond = [120.0, 2.25];
    let holdout = vec![integrate_from_deg(&params, &holdout_cond, 10.0, 1e-3)?];
    let split = make_timestep_dataset(&trajs, &holdout, 200)?.split_holdout(&holdout_cond)?;

    let scenario = Scenario {
        system: System::Double,
        friction: true,
        protocol: Protocol::TimeStep,
        test_condition: "holdout[120;2.25]".into(),
    };
    let mut records = Vec::new();
    for kind in ALL_KINDS {
        let mut config = ModelConfig::new(kind).with_seed(0).with_epochs(80);
        config.ar_order = 50;
        let model = train_timestep(&config, &split)?;
        let eval = evaluate_timestep(&model, &split.test)?;
        let record = MetricsRecord {
            model: kind,
            scenario: scenario.clone(),
            seed: 0,
            rmse: rmse(&eval.predicted, &eval.actual)?,
            r2: r2(&eval.predicted, &eval.actual)?,
        };
        println!("{kind:>6}: RMSE {:.4} rad, R2 {:+.4}", record.rmse, record.r2);
        records.push(record);
    }

    let table = rmse_heatmap(&records)?;
    let csv = std::env::temp_dir().join("chaoslab_zoo_heatmap.csv");
    let svg = std::env::temp_dir().join("chaoslab_zoo_heatmap.svg");
    table.write_csv(&csv)?;
    table.write_svg(&svg)?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
