//! Equilibrium stability reports: Jacobian eigenvalues plus classification.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::analysis::eigen::{classify_equilibrium, eigenvalues, Classification};
use crate::dynamics::{jacobian, PendulumParams, PendulumState};
use crate::error::Result;
use crate::integrator::fmt_f64;

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub equilibrium: PendulumState,
    /// Sorted by (real, imaginary) part; conjugate-closed.
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
}

/// Evaluates the Jacobian at the rest state with the given angles (degrees)
/// and classifies the linearization.
pub fn stability_at(params: &PendulumParams, angles_deg: &[f64]) -> Result<StabilityReport> {
    let state = PendulumState::at_rest_deg(angles_deg)?;
    let jac = jacobian(&state, params)?;
    let eigs = eigenvalues(&jac)?;
    let classification = classify_equilibrium(&eigs);
    Ok(StabilityReport {
        equilibrium: state,
        eigenvalues: eigs,
        classification,
    })
}

impl StabilityReport {
    /// CSV with `re,im` rows and a final classification line.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "re,im")?;
        for e in &self.eigenvalues {
            writeln!(out, "{},{}", fmt_f64(e.re), fmt_f64(e.im))?;
        }
        writeln!(out, "classification,{}", self.classification)?;
        out.flush()?;
        Ok(())
    }
}
