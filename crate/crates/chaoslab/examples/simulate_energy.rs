//! Integrate double and triple pendulums, check energy behavior, and export
//! a trajectory CSV.
//!
//! Run with: `cargo run --release --example simulate_energy`

use chaoslab::dynamics::{energy_scale, total_energy, PendulumParams};
use chaoslab::integrator::integrate_from_deg;

fn main() -> chaoslab::Result<()> {
    // frictionless: energy is conserved to integrator accuracy
    let double = PendulumParams::double_unit();
    let traj = integrate_from_deg(&double, &[90.0, 90.0], 10.0, 1e-3)?;
    let e0 = total_energy(&traj.states[0], &double)?;
    let e1 = total_energy(traj.states.last().unwrap(), &double)?;
    println!(
        "double [90, 90] frictionless: E0 = {e0:.6} J, E(10s) = {e1:.6} J, relative drift {:.2e}",
        ((e1 - e0) / energy_scale(&double)).abs()
    );

    let triple = PendulumParams::triple_unit();
    let traj3 = integrate_from_deg(&triple, &[90.0, 90.0, 90.0], 10.0, 1e-3)?;
    let e0 = total_energy(&traj3.states[0], &triple)?;
    let e1 = total_energy(traj3.states.last().unwrap(), &triple)?;
    println!(
        "triple [90, 90, 90] frictionless: relative drift {:.2e}",
        ((e1 - e0) / energy_scale(&triple)).abs()
    );

    // damped: energy decays monotonically
    let damped = PendulumParams::double_unit().with_uniform_damping(0.1)?;
    let traj_d = integrate_from_deg(&damped, &[120.0, 0.0], 10.0, 1e-3)?;
    let start = total_energy(&traj_d.states[0], &damped)?;
    let end = total_energy(traj_d.states.last().unwrap(), &damped)?;
    println!("double [120, 0] damping 0.1: E0 = {start:.3} J, E(10s) = {end:.3} J");

    let out = std::env::temp_dir().join("chaoslab_double_90_90.csv");
    traj.write_csv(&out)?;
    println!("wrote {} rows to {}", traj.states.len(), out.display());
    Ok(())
}
