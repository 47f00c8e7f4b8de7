//! Estimate Lyapunov exponents over a coarse grid of initial conditions and
//! export the heatmap CSV + SVG.
//!
//! The full 13x13 grid at 10 s per cell takes a few minutes; this example
//! runs a 5x5 grid at 4 s to stay quick. Use the `lyapunov` subcommand for
//! the full figure.
//!
//! Run with: `cargo run --release --example lyapunov_heatmap`

use chaoslab::analysis::lyapunov::DegreeRange;
use chaoslab::analysis::{lyapunov_exponent, lyapunov_grid, LyapunovOptions};
use chaoslab::dynamics::PendulumParams;

fn main() -> chaoslab::Result<()> {
    let params = PendulumParams::double_unit();

    // single conditions first: one chaotic, one quiet
    for cond in [[150.0, 75.0], [15.0, 15.0]] {
        let r = lyapunov_exponent(&params, &cond, 0.1, 10_000, 1e-3, LyapunovOptions::default())?;
        println!(
            "lambda at [{:>5.1}, {:>5.1}] deg = {:+.4} 1/s  ({:+.2e} per step, {} points fit)",
            cond[0], cond[1], r.exponent_per_second, r.exponent_per_step, r.steps_used
        );
    }

    let range = DegreeRange::new(0.0, 180.0, 45.0)?;
    let grid = lyapunov_grid(&params, range, range, 0.1, 4_000, 1e-3)?;
    println!("\n{} grid cells (theta1 rows, theta2 columns), 1/s:", grid.cell_count());
    for (i, t1) in grid.theta1_deg.iter().enumerate() {
        let row: Vec<String> = grid.exponents_per_s[i]
            .iter()
            .map(|v| match v {
                Some(x) => format!("{x:+.2}"),
                None => "  n/a".into(),
            })
            .collect();
        println!("  theta1 {t1:>5.0}: {}", row.join("  "));
    }

    let csv = std::env::temp_dir().join("chaoslab_lyapunov.csv");
    let svg = std::env::temp_dir().join("chaoslab_lyapunov.svg");
    grid.write_csv(&csv)?;
    grid.write_svg(&svg)?;
    println!("\nwrote {} and {}", csv.display(), svg.display());
    Ok(())
}
