//! Sliding-window dataset: W consecutive angle rows in, the next row out.

use crate::dataset::normalizer::MinMaxNormalizer;
use crate::error::{ChaosError, Result};
use crate::integrator::Trajectory;

/// Default chronological train fraction when none is given.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

/// Window pairs from one trajectory, angles only, already scaled.
///
/// `inputs` is row-major `n_pairs x window x dim`; pair `k` covers source rows
/// `k..k+window` with target row `k+window`. The normalizer is fit on the rows
/// reachable from training pairs under the chronological split, then applied
/// to everything.
#[derive(Debug, Clone)]
pub struct WindowedDataset {
    pub window: usize,
    pub dim: usize,
    pub n_pairs: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    pub normalizer: MinMaxNormalizer,
    pub train_fraction: f64,
    /// Sample spacing of the source trajectory, seconds.
    pub dt: f64,
}

/// Borrowed view of a contiguous pair range (train or test half).
#[derive(Debug, Clone, Copy)]
pub struct WindowSplit<'a> {
    data: &'a WindowedDataset,
    pub start: usize,
    pub len: usize,
}

impl WindowedDataset {
    pub fn input(&self, pair: usize) -> &[f64] {
        let stride = self.window * self.dim;
        &self.inputs[pair * stride..(pair + 1) * stride]
    }

    pub fn target(&self, pair: usize) -> &[f64] {
        &self.targets[pair * self.dim..(pair + 1) * self.dim]
    }

    /// The full scaled angle series reconstructed from the stored pairs:
    /// rows 0..W from pair 0's input, the rest from successive targets.
    pub fn scaled_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::with_capacity(self.n_pairs + self.window);
        for w in 0..self.window {
            rows.push(self.input(0)[w * self.dim..(w + 1) * self.dim].to_vec());
        }
        for k in 0..self.n_pairs {
            rows.push(self.target(k).to_vec());
        }
        rows
    }

    /// Chronological split at the dataset's train fraction: the first
    /// `floor(f * n)` pairs (at least one) train, the rest test.
    pub fn split(&self) -> (WindowSplit<'_>, WindowSplit<'_>) {
        let n_train = train_count(self.n_pairs, self.train_fraction);
        (
            WindowSplit { data: self, start: 0, len: n_train },
            WindowSplit { data: self, start: n_train, len: self.n_pairs - n_train },
        )
    }
}

impl<'a> WindowSplit<'a> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn input(&self, k: usize) -> &'a [f64] {
        self.data.input(self.start + k)
    }

    pub fn target(&self, k: usize) -> &'a [f64] {
        self.data.target(self.start + k)
    }

    pub fn window(&self) -> usize {
        self.data.window
    }

    pub fn dim(&self) -> usize {
        self.data.dim
    }

    pub fn normalizer(&self) -> &MinMaxNormalizer {
        &self.data.normalizer
    }
}

fn train_count(n_pairs: usize, fraction: f64) -> usize {
    (((n_pairs as f64) * fraction).floor() as usize).clamp(1, n_pairs)
}

/// Builds window pairs with the default 0.8 chronological train fraction.
pub fn make_windows(traj: &Trajectory, window: usize) -> Result<WindowedDataset> {
    make_windows_with_fraction(traj, window, DEFAULT_TRAIN_FRACTION)
}

pub fn make_windows_with_fraction(
    traj: &Trajectory,
    window: usize,
    train_fraction: f64,
) -> Result<WindowedDataset> {
    if window == 0 {
        return Err(ChaosError::InvalidParams("window must be >= 1".into()));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ChaosError::InvalidParams(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let rows = traj.angle_rows();
    if rows.len() <= window {
        return Err(ChaosError::InvalidParams(format!(
            "trajectory of {} rows is too short for window {window}",
            rows.len()
        )));
    }
    let dim = rows[0].len();
    let n_pairs = rows.len() - window;

    // normalizer statistics come only from rows reachable by training pairs
    let n_train = train_count(n_pairs, train_fraction);
    let fit_end = n_train + window; // train pair n_train-1 targets row n_train-1+window
    let fit_rows: Vec<&[f64]> = rows[..fit_end].iter().map(|r| r.as_slice()).collect();
    let normalizer = MinMaxNormalizer::fit(&fit_rows)?;

    let scaled: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| normalizer.transform_row(r))
        .collect::<Result<_>>()?;

    let mut inputs = Vec::with_capacity(n_pairs * window * dim);
    let mut targets = Vec::with_capacity(n_pairs * dim);
    for k in 0..n_pairs {
        for row in &scaled[k..k + window] {
            inputs.extend_from_slice(row);
        }
        targets.extend_from_slice(&scaled[k + window]);
    }
    Ok(WindowedDataset {
        window,
        dim,
        n_pairs,
        inputs,
        targets,
        normalizer,
        train_fraction,
        dt: traj.dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{PendulumParams, PendulumState};
    use crate::integrator::integrate;

    fn short_traj(rows: usize) -> Trajectory {
        let p = PendulumParams::double_unit();
        let s = PendulumState::at_rest_deg(&[40.0, 20.0]).unwrap();
        integrate(&p, &s, (rows - 1) as f64 * 1e-3, 1e-3).unwrap()
    }

    #[test]
    fn single_pair_from_51_rows() {
        let traj = short_traj(51);
        let ds = make_windows(&traj, 50).unwrap();
        assert_eq!(ds.n_pairs, 1);
        // target is source row 50
        let raw = ds.normalizer.inverse_row(ds.target(0)).unwrap();
        let want = traj.states[50].angles();
        for (a, b) in raw.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_k_inputs_start_at_row_k() {
        let traj = short_traj(100);
        let ds = make_windows(&traj, 50).unwrap();
        assert_eq!(ds.n_pairs, 50);
        // pair 1 input row 0 equals source row 1
        let raw = ds.normalizer.inverse_row(&ds.input(1)[..ds.dim]).unwrap();
        let want = traj.states[1].angles();
        for (a, b) in raw.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_short_trajectory_errors() {
        let traj = short_traj(50);
        assert!(make_windows(&traj, 50).is_err());
    }

    #[test]
    fn chronological_split_80_20() {
        let traj = short_traj(150);
        let ds = make_windows(&traj, 50).unwrap(); // 100 pairs
        let (train, test) = ds.split();
        assert_eq!(train.len(), 80);
        assert_eq!(test.len(), 20);
        // first test pair is pair 80
        assert_eq!(test.input(0), ds.input(80));
    }

    #[test]
    fn overlapping_windows_reconstruct_source() {
        let traj = short_traj(80);
        let ds = make_windows(&traj, 10).unwrap();
        let mut rebuilt: Vec<Vec<f64>> = Vec::new();
        for k in 0..ds.n_pairs {
            rebuilt.push(ds.normalizer.inverse_row(&ds.input(k)[..ds.dim]).unwrap());
        }
        // the last window contributes its remaining rows, then the final target
        let last = ds.input(ds.n_pairs - 1);
        for w in 1..ds.window {
            rebuilt.push(ds.normalizer.inverse_row(&last[w * ds.dim..(w + 1) * ds.dim]).unwrap());
        }
        rebuilt.push(ds.normalizer.inverse_row(ds.target(ds.n_pairs - 1)).unwrap());
        let source = traj.angle_rows();
        assert_eq!(rebuilt.len(), source.len());
        for (a, b) in rebuilt.iter().zip(&source) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalizer_sees_only_training_rows() {
        let traj = short_traj(200);
        let ds = make_windows(&traj, 50).unwrap();
        let (_, test) = ds.split();
        // scaled test targets may leave [0,1]; all train rows stay inside
        let (train, _) = ds.split();
        for k in 0..train.len() {
            for &v in train.target(k) {
                assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
        // not asserting test escapes the interval (trajectory may stay in
        // range); the normalizer unit tests cover the escape behavior
        let _ = test;
    }
}
