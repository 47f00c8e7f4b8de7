//! Classify the double pendulum's equilibria from Jacobian eigenvalues.
//!
//! Run with: `cargo run --release --example stability_report`

use chaoslab::analysis::stability_at;
use chaoslab::dynamics::PendulumParams;

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit();
    for point in [[0.0, 0.0], [180.0, 180.0], [0.0, 180.0]] {
        let report = stability_at(&params, &point)?;
        println!("equilibrium [{:.0}, {:.0}] degrees:", point[0], point[1]);
        for e in &report.eigenvalues {
            println!("  {:+.7}{:+.7}i", e.re, e.im);
        }
        println!("  -> {}\n", report.classification);
    }

    // damping pulls the hanging center into a stable focus
    let damped = PendulumParams::double_unit().with_uniform_damping(0.1)?;
    let report = stability_at(&damped, &[0.0, 0.0])?;
    println!("hanging point with damping 0.1:");
    for e in &report.eigenvalues {
        println!("  {:+.7}{:+.7}i", e.re, e.im);
    }
    println!("  -> {}", report.classification);
    Ok(())
}
