//! Time-conditioned dataset: features `[t, initial angles (deg)]`, targets
//! the angles (radians) at `t`, grouped by generating trajectory.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::normalizer::MinMaxNormalizer;
use crate::dynamics::System;
use crate::error::{ChaosError, Result};
use crate::integrator::{fmt_f64, parse_f64_row, Trajectory};

/// Rows sampled from one trajectory. `targets` is row-major `len x dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryGroup {
    pub initial_deg: Vec<f64>,
    pub times: Vec<f64>,
    pub targets: Vec<f64>,
    /// True when this condition was generated as a hold-out, never part of
    /// the training grid.
    pub holdout: bool,
}

impl TrajectoryGroup {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn target_row(&self, k: usize, dim: usize) -> &[f64] {
        &self.targets[k * dim..(k + 1) * dim]
    }

    /// Feature row `[t, initial angles in degrees]`.
    pub fn feature_row(&self, k: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(1 + self.initial_deg.len());
        row.push(self.times[k]);
        row.extend_from_slice(&self.initial_deg);
        row
    }
}

/// The time-step dataset: trajectory groups sharing one uniform sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeStepDataset {
    pub dim: usize,
    /// Spacing between consecutive sampled rows, seconds.
    pub sample_dt: f64,
    pub groups: Vec<TrajectoryGroup>,
}

impl TimeStepDataset {
    pub fn total_rows(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    /// Width of one full row `[t, initial angles, target angles]`.
    pub fn row_width(&self) -> usize {
        1 + 2 * self.dim
    }

    pub fn feature_width(&self) -> usize {
        1 + self.dim
    }

    fn full_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::with_capacity(self.total_rows());
        for g in &self.groups {
            for k in 0..g.len() {
                let mut row = g.feature_row(k);
                row.extend_from_slice(g.target_row(k, self.dim));
                rows.push(row);
            }
        }
        rows
    }

    /// Splits by whole trajectory: groups matching `condition_deg` become the
    /// test set, the rest train. Fails if the condition is absent, or if it
    /// also appears as a training-grid condition (leakage guard). The
    /// normalizer is fit on the training rows only.
    pub fn split_holdout(&self, condition_deg: &[f64]) -> Result<HoldoutSplit> {
        let matches = |g: &TrajectoryGroup| {
            g.initial_deg.len() == condition_deg.len()
                && g.initial_deg
                    .iter()
                    .zip(condition_deg)
                    .all(|(a, b)| (a - b).abs() < 1e-9)
        };
        if self.groups.iter().any(|g| !g.holdout && matches(g)) {
            return Err(ChaosError::Config(format!(
                "hold-out condition {condition_deg:?} is part of the training grid"
            )));
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for g in &self.groups {
            if matches(g) {
                test.push(g.clone());
            } else {
                train.push(g.clone());
            }
        }
        if test.is_empty() {
            return Err(ChaosError::Config(format!(
                "hold-out condition {condition_deg:?} not found in the dataset"
            )));
        }
        let train_ds = TimeStepDataset {
            dim: self.dim,
            sample_dt: self.sample_dt,
            groups: train,
        };
        let test_ds = TimeStepDataset {
            dim: self.dim,
            sample_dt: self.sample_dt,
            groups: test,
        };
        if train_ds.groups.is_empty() {
            return Err(ChaosError::Config("no training groups left after hold-out split".into()));
        }
        let rows = train_ds.full_rows();
        let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let normalizer = MinMaxNormalizer::fit(&row_refs)?;
        Ok(HoldoutSplit {
            train: train_ds,
            test: test_ds,
            normalizer,
        })
    }

    /// Writes the dataset CSV with header
    /// `t,theta1_0_deg[,...],theta1[,...]`; groups appear consecutively.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{}", csv_header(self.dim))?;
        for g in &self.groups {
            for k in 0..g.len() {
                write!(out, "{}", fmt_f64(g.times[k]))?;
                for v in &g.initial_deg {
                    write!(out, ",{}", fmt_f64(*v))?;
                }
                for v in g.target_row(k, self.dim) {
                    write!(out, ",{}", fmt_f64(*v))?;
                }
                writeln!(out)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_header(dim: usize) -> String {
    let mut h = String::from("t");
    for i in 1..=dim {
        h.push_str(&format!(",theta{i}_0_deg"));
    }
    for i in 1..=dim {
        h.push_str(&format!(",theta{i}"));
    }
    h
}

/// Reads a dataset CSV written by [`TimeStepDataset::write_csv`]. Group
/// boundaries are recovered where the initial-angle columns change or time
/// restarts. `holdout` marks every group read from this file.
pub fn read_timestep_csv(path: &Path, system: System, holdout: bool) -> Result<TimeStepDataset> {
    let dim = system.joint_count();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(ChaosError::Schema {
        row: 0,
        message: "empty dataset file".into(),
    })?;
    let expected = csv_header(dim);
    if header.trim() != expected {
        return Err(ChaosError::Schema {
            row: 1,
            message: format!("expected header '{expected}', got '{header}'"),
        });
    }
    let width = 1 + 2 * dim;
    let mut groups: Vec<TrajectoryGroup> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields = parse_f64_row(line, width, idx + 1)?;
        let t = fields[0];
        let initial = &fields[1..1 + dim];
        let target = &fields[1 + dim..];
        let new_group = match groups.last() {
            None => true,
            Some(g) => {
                g.initial_deg.iter().zip(initial).any(|(a, b)| (a - b).abs() > 1e-12)
                    || t <= *g.times.last().unwrap()
            }
        };
        if new_group {
            groups.push(TrajectoryGroup {
                initial_deg: initial.to_vec(),
                times: vec![t],
                targets: target.to_vec(),
                holdout,
            });
        } else {
            let g = groups.last_mut().unwrap();
            g.times.push(t);
            g.targets.extend_from_slice(target);
        }
    }
    if groups.is_empty() {
        return Err(ChaosError::Schema {
            row: 1,
            message: "dataset has no rows".into(),
        });
    }
    let sample_dt = if groups[0].len() >= 2 {
        groups[0].times[1] - groups[0].times[0]
    } else {
        0.0
    };
    Ok(TimeStepDataset {
        dim,
        sample_dt,
        groups,
    })
}

/// A train/test pair with the normalizer fit on the training rows.
#[derive(Debug, Clone)]
pub struct HoldoutSplit {
    pub train: TimeStepDataset,
    pub test: TimeStepDataset,
    pub normalizer: MinMaxNormalizer,
}

/// Builds the dataset by sampling each trajectory at a uniform stride.
///
/// Every trajectory must share dt, step count, and joint count. Each one
/// contributes `samples_per_traj` rows at stride `floor(steps / samples)`.
pub fn make_timestep_dataset(
    grid: &[Trajectory],
    holdout: &[Trajectory],
    samples_per_traj: usize,
) -> Result<TimeStepDataset> {
    let first = grid
        .first()
        .or_else(|| holdout.first())
        .ok_or_else(|| ChaosError::InvalidParams("no trajectories given".into()))?;
    let steps = first.steps();
    let dt = first.dt;
    let dim = first.joint_count();
    if samples_per_traj == 0 {
        return Err(ChaosError::InvalidParams("samples_per_traj must be >= 1".into()));
    }
    if samples_per_traj > steps {
        return Err(ChaosError::InvalidParams(format!(
            "samples_per_traj {samples_per_traj} exceeds step count {steps}"
        )));
    }
    let stride = steps / samples_per_traj;

    let mut groups = Vec::with_capacity(grid.len() + holdout.len());
    for (traj, is_holdout) in grid
        .iter()
        .map(|t| (t, false))
        .chain(holdout.iter().map(|t| (t, true)))
    {
        if traj.steps() != steps || traj.dt != dt || traj.joint_count() != dim {
            return Err(ChaosError::InvalidParams(format!(
                "trajectory for {:?} disagrees in dt/steps/joints with the first",
                traj.initial_angles_deg
            )));
        }
        let mut times = Vec::with_capacity(samples_per_traj);
        let mut targets = Vec::with_capacity(samples_per_traj * dim);
        for j in 0..samples_per_traj {
            let k = j * stride;
            times.push(traj.time_at(k));
            targets.extend_from_slice(&traj.states[k].angles());
        }
        groups.push(TrajectoryGroup {
            initial_deg: traj.initial_angles_deg.clone(),
            times,
            targets,
            holdout: is_holdout,
        });
    }
    Ok(TimeStepDataset {
        dim,
        sample_dt: stride as f64 * dt,
        groups,
    })
}

/// The paper's training grid: theta1 fixed, the varied angle swept over an
/// inclusive arithmetic range. The double pendulum varies theta2; the triple
/// varies theta3 with theta2 = 0.
pub fn training_angle_grid(
    system: System,
    theta1_deg: f64,
    varied_start_deg: f64,
    varied_end_deg: f64,
    increment_deg: f64,
) -> Result<Vec<Vec<f64>>> {
    if !(increment_deg > 0.0) {
        return Err(ChaosError::InvalidParams(format!(
            "grid increment must be > 0, got {increment_deg}"
        )));
    }
    if varied_end_deg < varied_start_deg {
        return Err(ChaosError::InvalidParams(format!(
            "empty grid range: {varied_end_deg} < {varied_start_deg}"
        )));
    }
    let count = ((varied_end_deg - varied_start_deg) / increment_deg).round() as usize + 1;
    let conditions = (0..count)
        .map(|i| {
            let varied = varied_start_deg + i as f64 * increment_deg;
            match system {
                System::Double => vec![theta1_deg, varied],
                System::Triple => vec![theta1_deg, 0.0, varied],
            }
        })
        .filter(|c| *c.last().unwrap() <= varied_end_deg + 1e-9 * increment_deg)
        .collect::<Vec<_>>();
    if conditions.is_empty() {
        return Err(ChaosError::InvalidParams("empty grid range".into()));
    }
    Ok(conditions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PendulumParams;
    use crate::integrator::integrate_from_deg;

    fn traj_for(angles: &[f64], t_end: f64) -> Trajectory {
        let p = if angles.len() == 2 {
            PendulumParams::double_unit()
        } else {
            PendulumParams::triple_unit()
        };
        integrate_from_deg(&p, angles, t_end, 1e-3).unwrap()
    }

    #[test]
    fn grid_counts() {
        let g = training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.1).unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], vec![120.0, 0.0]);
        assert!((g[20][1] - 2.0).abs() < 1e-12);
        assert!((g[30][1] - 3.0).abs() < 1e-12);

        let g = training_angle_grid(System::Triple, 120.0, 0.1, 3.0, 0.1).unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], vec![120.0, 0.0, 0.1]);

        let single = training_angle_grid(System::Double, 120.0, 2.05, 2.05, 0.1).unwrap();
        assert_eq!(single, vec![vec![120.0, 2.05]]);

        assert!(training_angle_grid(System::Double, 120.0, 0.0, 3.0, 0.0).is_err());
        assert!(training_angle_grid(System::Double, 120.0, 3.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn dataset_row_counts_and_t0_identity() {
        let trajs: Vec<Trajectory> = [[120.0, 0.0], [120.0, 0.1], [120.0, 0.2]]
            .iter()
            .map(|a| traj_for(a, 1.0))
            .collect();
        let ds = make_timestep_dataset(&trajs, &[], 200).unwrap();
        assert_eq!(ds.groups.len(), 3);
        assert_eq!(ds.total_rows(), 600);
        // row at t = 0 targets the initial angles exactly (in radians)
        for g in &ds.groups {
            assert_eq!(g.times[0], 0.0);
            for (tgt, deg) in g.target_row(0, ds.dim).iter().zip(&g.initial_deg) {
                assert_eq!(*tgt, deg.to_radians());
            }
        }
    }

    #[test]
    fn stride_one_includes_every_step() {
        let traj = traj_for(&[100.0, 0.0], 0.2);
        let ds = make_timestep_dataset(&[traj.clone()], &[], 200).unwrap();
        assert_eq!(ds.groups[0].len(), 200);
        assert!((ds.sample_dt - 1e-3).abs() < 1e-15);
        for (k, t) in ds.groups[0].times.iter().enumerate() {
            assert!((t - traj.time_at(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn oversampling_errors() {
        let traj = traj_for(&[100.0, 0.0], 0.1);
        assert!(make_timestep_dataset(&[traj], &[], 101).is_err());
    }

    #[test]
    fn mixed_trajectories_error() {
        let a = traj_for(&[120.0, 0.0], 1.0);
        let b = traj_for(&[120.0, 0.0, 1.0], 1.0);
        assert!(make_timestep_dataset(&[a, b], &[], 100).is_err());
    }

    #[test]
    fn holdout_split_partitions_by_trajectory() {
        let grid: Vec<Trajectory> = [[120.0, 0.0], [120.0, 0.1]]
            .iter()
            .map(|a| traj_for(a, 0.5))
            .collect();
        let holdout = vec![traj_for(&[120.0, 0.05], 0.5)];
        let ds = make_timestep_dataset(&grid, &holdout, 100).unwrap();
        let split = ds.split_holdout(&[120.0, 0.05]).unwrap();
        assert_eq!(split.train.groups.len(), 2);
        assert_eq!(split.test.groups.len(), 1);
        assert_eq!(split.test.groups[0].initial_deg, vec![120.0, 0.05]);
        assert!(split.train.groups.iter().all(|g| !g.holdout));
    }

    #[test]
    fn holdout_in_training_grid_is_leakage() {
        let grid: Vec<Trajectory> = [[120.0, 0.0], [120.0, 0.1]]
            .iter()
            .map(|a| traj_for(a, 0.5))
            .collect();
        let ds = make_timestep_dataset(&grid, &[], 100).unwrap();
        assert!(matches!(
            ds.split_holdout(&[120.0, 0.0]),
            Err(ChaosError::Config(_))
        ));
        assert!(ds.split_holdout(&[120.0, 7.7]).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_groups() {
        let grid: Vec<Trajectory> = [[120.0, 0.0], [120.0, 0.1]]
            .iter()
            .map(|a| traj_for(a, 0.3))
            .collect();
        let ds = make_timestep_dataset(&grid, &[], 50).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.csv");
        ds.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,theta1_0_deg,theta2_0_deg,theta1,theta2\n"));
        assert_eq!(text.lines().count(), 101);
        let back = read_timestep_csv(&path, System::Double, false).unwrap();
        assert_eq!(back.groups.len(), 2);
        assert_eq!(back.dim, ds.dim);
        assert!((back.sample_dt - ds.sample_dt).abs() < 1e-15);
        for (a, b) in back.groups.iter().zip(&ds.groups) {
            assert_eq!(a.times, b.times);
            assert_eq!(a.targets, b.targets);
            assert_eq!(a.initial_deg, b.initial_deg);
        }
    }

    #[test]
    fn byte_identical_csv_across_runs() {
        let grid = vec![traj_for(&[120.0, 1.0], 0.2)];
        let ds1 = make_timestep_dataset(&grid, &[], 40).unwrap();
        let ds2 = make_timestep_dataset(&grid, &[], 40).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (p1, p2) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        ds1.write_csv(&p1).unwrap();
        ds2.write_csv(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}
