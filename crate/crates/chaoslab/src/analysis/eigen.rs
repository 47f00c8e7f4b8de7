//! Eigenvalues of small dense real matrices and equilibrium classification.
//!
//! The solver reduces the matrix to upper Hessenberg form with Householder
//! similarity transforms, then runs Francis double-shift QR iteration with
//! deflation, reading real eigenvalues off 1x1 blocks and conjugate pairs off
//! 2x2 blocks. Only dimensions up to 8 are supported (a 2n x 2n pendulum
//! Jacobian has n <= 4 here); no balancing pass is applied.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ChaosError, Result};

/// Tolerance on |Re| below which an eigenvalue counts as purely imaginary.
pub const REAL_PART_TOL: f64 = 1e-6;

const MAX_ITERS_PER_BLOCK: usize = 60;

/// Behavior class of a linearized fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// All eigenvalues purely imaginary: an undamped oscillator.
    Center,
    /// Real parts of both signs present.
    Saddle,
    /// All real parts negative.
    Stable,
    /// All real parts positive.
    Unstable,
    /// Anything else (e.g. marginal zero real parts mixed with decay).
    Mixed,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::Center => "center/undamped-oscillator",
            Classification::Saddle => "saddle",
            Classification::Stable => "stable-node/focus",
            Classification::Unstable => "unstable-node/focus",
            Classification::Mixed => "mixed",
        };
        write!(f, "{s}")
    }
}

/// All eigenvalues of a square real matrix (dimension 1..=8), with algebraic
/// multiplicity, sorted by (real, imaginary) part.
pub fn eigenvalues(matrix: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = matrix.len();
    if n == 0 || n > 8 {
        return Err(ChaosError::InvalidParams(format!(
            "eigenvalue solver supports dimensions 1..=8, got {n}"
        )));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(ChaosError::ShapeMismatch(format!(
                "row {i} has {} entries in a {n}x{n} matrix",
                row.len()
            )));
        }
        if !row.iter().all(|v| v.is_finite()) {
            return Err(ChaosError::NonFinite(format!("matrix row {i}")));
        }
    }

    let mut h: Vec<Vec<f64>> = matrix.to_vec();
    hessenberg_in_place(&mut h);
    let mut eigs = hqr(&mut h)?;
    eigs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eigs)
}

/// Householder similarity reduction to upper Hessenberg form.
fn hessenberg_in_place(a: &mut [Vec<f64>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= vnorm;
        }
        // left: rows k+1..n of columns k..n
        for j in k..n {
            let s: f64 = 2.0 * (0..v.len()).map(|i| v[i] * a[k + 1 + i][j]).sum::<f64>();
            for i in 0..v.len() {
                a[k + 1 + i][j] -= s * v[i];
            }
        }
        // right: columns k+1..n of all rows
        for row in a.iter_mut() {
            let s: f64 = 2.0 * (0..v.len()).map(|i| row[k + 1 + i] * v[i]).sum::<f64>();
            for i in 0..v.len() {
                row[k + 1 + i] -= s * v[i];
            }
        }
        // the column below the subdiagonal is now zero by construction
        for i in k + 2..n {
            a[i][k] = 0.0;
        }
    }
}

fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR iteration on an upper Hessenberg matrix.
/// Destroys `h`; returns the eigenvalues unordered.
fn hqr(h: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = h.len();
    let eps = f64::EPSILON;
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[i][j].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }

    let mut block_end: isize = n as isize - 1;
    let mut shift_total = 0.0;
    while block_end >= 0 {
        let nn = block_end as usize;
        let mut its = 0usize;
        loop {
            // find the highest l with a negligible subdiagonal entry
            let mut l = nn;
            while l >= 1 {
                let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[l][l - 1].abs() <= eps * s {
                    h[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = h[nn][nn];
            if l == nn {
                // one real eigenvalue deflated
                eigs.push(Complex64::new(x + shift_total, 0.0));
                block_end -= 1;
                break;
            }
            let mut y = h[nn - 1][nn - 1];
            let mut w = h[nn][nn - 1] * h[nn - 1][nn];
            if l == nn - 1 {
                // 2x2 block: real pair or complex conjugate pair
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x_shifted = x + shift_total;
                if q >= 0.0 {
                    let z = p + sign_of(z, p);
                    let first = x_shifted + z;
                    let second = if z != 0.0 { x_shifted - w / z } else { first };
                    eigs.push(Complex64::new(first, 0.0));
                    eigs.push(Complex64::new(second, 0.0));
                } else {
                    eigs.push(Complex64::new(x_shifted + p, z));
                    eigs.push(Complex64::new(x_shifted + p, -z));
                }
                block_end -= 2;
                break;
            }

            if its == MAX_ITERS_PER_BLOCK {
                return Err(ChaosError::Numerical(
                    "QR eigenvalue iteration failed to converge".into(),
                ));
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift to break symmetry-induced stalls
                shift_total += x;
                for i in 0..=nn {
                    h[i][i] -= x;
                }
                let s = h[nn][nn - 1].abs() + h[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // find two consecutive small subdiagonals to start the bulge at
            let mut m = nn - 2;
            let mut p;
            let mut q;
            let mut r;
            loop {
                let z = h[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - rr - ss;
                r = h[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h[m][m - 1].abs() * (q.abs() + r.abs());
                let v = z.abs() * (p.abs() + h[m - 1][m - 1].abs() + h[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[i][i - 2] = 0.0;
            }
            for i in m + 3..=nn {
                h[i][i - 3] = 0.0;
            }

            // double QR sweep over rows l..=nn, columns m..=nn
            for k in m..nn {
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k != nn - 1 { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                } else {
                    h[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = h[k][j] + q * h[k + 1][j];
                    if k != nn - 1 {
                        pp += r * h[k + 2][j];
                        h[k + 2][j] -= pp * z;
                    }
                    h[k + 1][j] -= pp * y;
                    h[k][j] -= pp * x;
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * h[i][k] + y * h[i][k + 1];
                    if k != nn - 1 {
                        pp += z * h[i][k + 2];
                        h[i][k + 2] -= pp * r;
                    }
                    h[i][k + 1] -= pp * q;
                    h[i][k] -= pp;
                }
            }
        }
    }
    Ok(eigs)
}

/// Classifies a conjugate-closed eigenvalue set.
pub fn classify_equilibrium(eigs: &[Complex64]) -> Classification {
    let imaginary = eigs.iter().all(|e| e.re.abs() < REAL_PART_TOL);
    if imaginary {
        return Classification::Center;
    }
    let any_pos = eigs.iter().any(|e| e.re > REAL_PART_TOL);
    let any_neg = eigs.iter().any(|e| e.re < -REAL_PART_TOL);
    if any_pos && any_neg {
        return Classification::Saddle;
    }
    if eigs.iter().all(|e| e.re < -REAL_PART_TOL) {
        return Classification::Stable;
    }
    if eigs.iter().all(|e| e.re > REAL_PART_TOL) {
        return Classification::Unstable;
    }
    Classification::Mixed
}
