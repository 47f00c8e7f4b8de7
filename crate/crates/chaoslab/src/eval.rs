//! Metrics (RMSE, R-squared), experiment-matrix records, RMSE heatmaps, and
//! trajectory-comparison figures.
//!
//! Multi-output handling: RMSE pools every element into one mean; R-squared
//! is computed per output dimension and averaged uniformly. Metrics are
//! reported on unscaled radians.

pub mod metrics;
pub mod plot;

pub use metrics::{mse_rows, r2, rmse, MetricsRecord, Scenario};
pub use plot::{rmse_heatmap, trajectory_plot, HeatmapTable};
