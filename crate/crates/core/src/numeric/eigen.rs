//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Runs entirely in [`HighPrecReal`] arithmetic at a caller-chosen precision.
//! For an `n x n` symmetric input `J` the result satisfies, with `S` the
//! matrix whose *rows* are the computed eigenvectors and `L = diag(lambda)`:
//!
//! * `max |(S^T L S - J)_ij|  <= 2^(-precision/2) * max(1, max |J_ij|)`
//! * `max |(S S^T - I)_ij|    <= 2^(-precision/2)`
//!
//! both measured exactly (the residual helpers below recompute them).
//! Eigenvalues are sorted descending by value; ties keep a deterministic
//! order, and the whole computation is deterministic for fixed inputs.

use crate::error::{Error, Result};
use crate::numeric::{HighPrecReal, RationalMatrix};

/// Result of [`sym_eigen`] / [`sym_eigen_hp`].
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Eigenvalues sorted descending by value.
    pub eigenvalues: Vec<HighPrecReal>,
    /// Rows are unit eigenvectors, ordered to match `eigenvalues`.
    pub basis: Vec<Vec<HighPrecReal>>,
    /// The matrix that was decomposed, at working precision.
    pub source: Vec<Vec<HighPrecReal>>,
    /// Working precision in bits.
    pub precision: u32,
}

/// Decompose a symmetric rational matrix at the given precision.
pub fn sym_eigen(a: &RationalMatrix, precision: u32) -> Result<EigenDecomposition> {
    if !a.is_symmetric() {
        return Err(Error::Contract("sym_eigen needs a symmetric matrix".into()));
    }
    let n = a.rows();
    let hp: Vec<Vec<HighPrecReal>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| HighPrecReal::from_rational(a.at(i, j), precision))
                .collect()
        })
        .collect();
    sym_eigen_hp(hp, precision)
}

/// Decompose an already-converted symmetric matrix (used when the input
/// itself contains square roots, e.g. a diagonally rescaled matrix).
pub fn sym_eigen_hp(source: Vec<Vec<HighPrecReal>>, precision: u32) -> Result<EigenDecomposition> {
    let n = source.len();
    for row in &source {
        if row.len() != n {
            return Err(Error::Shape("eigendecomposition needs a square matrix".into()));
        }
    }
    for i in 0..n {
        for j in 0..i {
            if source[i][j] != source[j][i] {
                return Err(Error::Contract("sym_eigen needs a symmetric matrix".into()));
            }
        }
    }

    let zero = HighPrecReal::zero(precision);
    let one = HighPrecReal::one(precision);

    let mut a: Vec<Vec<HighPrecReal>> = source.clone();
    // V accumulates rotations; its columns converge to eigenvectors.
    let mut v: Vec<Vec<HighPrecReal>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();

    let mut scale = zero.clone();
    for row in &source {
        for e in row {
            let m = e.abs();
            if m > scale {
                scale = m;
            }
        }
    }

    if !scale.is_zero() && n > 1 {
        // Stop once every off-diagonal entry is this small...
        let stop_tol = scale.mul(&HighPrecReal::pow2(-(3 * precision as i64 / 4), precision));
        // ...and never rotate on entries already at rounding-noise level.
        let floor_tol = scale.mul(&HighPrecReal::pow2(-(precision as i64) - 8, precision));
        let max_sweeps = 40 + precision as usize / 4;
        let mut converged = false;
        for _sweep in 0..max_sweeps {
            let mut max_off = zero.clone();
            for p in 0..n {
                for q in p + 1..n {
                    let m = a[p][q].abs();
                    if m > max_off {
                        max_off = m;
                    }
                }
            }
            if max_off <= stop_tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() <= floor_tol {
                        continue;
                    }
                    rotate(&mut a, &mut v, p, q, precision);
                }
            }
        }
        if !converged {
            // One last check: the final sweep may have finished the job.
            let mut max_off = zero.clone();
            for p in 0..n {
                for q in p + 1..n {
                    let m = a[p][q].abs();
                    if m > max_off {
                        max_off = m;
                    }
                }
            }
            if max_off > stop_tol {
                return Err(Error::Precision { precision });
            }
        }
    }

    // Sort eigenvalues descending; carry the eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].cmp_value(&a[i][i]).then(i.cmp(&j)));
    let eigenvalues: Vec<HighPrecReal> = order.iter().map(|&k| a[k][k].clone()).collect();
    let basis: Vec<Vec<HighPrecReal>> = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k].clone()).collect())
        .collect();

    Ok(EigenDecomposition {
        eigenvalues,
        basis,
        source,
        precision,
    })
}

/// One Jacobi rotation zeroing `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut [Vec<HighPrecReal>], v: &mut [Vec<HighPrecReal>], p: usize, q: usize, prec: u32) {
    let n = a.len();
    let one = HighPrecReal::one(prec);
    let apq = a[p][q].clone();
    let app = a[p][p].clone();
    let aqq = a[q][q].clone();

    // tan(theta) via the stable root of t^2 + 2*t*tau - 1 = 0.
    let two = HighPrecReal::from_i64(2, prec);
    let tau = aqq.sub(&app).div(&two.mul(&apq));
    let t = if tau.is_zero() {
        one.clone()
    } else {
        let root = one.add(&tau.mul(&tau)).sqrt();
        let denom = tau.abs().add(&root);
        let mag = one.div(&denom);
        if tau.is_negative() {
            mag.neg()
        } else {
            mag
        }
    };
    let c = one.div(&one.add(&t.mul(&t)).sqrt());
    let s = t.mul(&c);

    // Row update: (G^T A), rows p and q.
    for k in 0..n {
        let akp = a[p][k].clone();
        let akq = a[q][k].clone();
        a[p][k] = c.mul(&akp).sub(&s.mul(&akq));
        a[q][k] = s.mul(&akp).add(&c.mul(&akq));
    }
    // Column update: (... G), columns p and q.
    for row in a.iter_mut() {
        let akp = row[p].clone();
        let akq = row[q].clone();
        row[p] = c.mul(&akp).sub(&s.mul(&akq));
        row[q] = s.mul(&akp).add(&c.mul(&akq));
    }
    // Symmetrize the rotated pair against rounding drift.
    let sym = a[p][q].add(&a[q][p]).div(&HighPrecReal::from_i64(2, prec));
    a[p][q] = sym.clone();
    a[q][p] = sym;
    // Accumulate into V (columns are eigenvector candidates).
    for row in v.iter_mut() {
        let vkp = row[p].clone();
        let vkq = row[q].clone();
        row[p] = c.mul(&vkp).sub(&s.mul(&vkq));
        row[q] = s.mul(&vkp).add(&c.mul(&vkq));
    }
}

impl EigenDecomposition {
    fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |(S^T L S - source)_ij|`, computed exactly at working precision.
    pub fn reconstruction_residual(&self) -> HighPrecReal {
        let n = self.n();
        let zero = HighPrecReal::zero(self.precision);
        let mut worst = zero.clone();
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero.clone();
                for k in 0..n {
                    acc = acc.add(
                        &self.eigenvalues[k]
                            .mul(&self.basis[k][i])
                            .mul(&self.basis[k][j]),
                    );
                }
                let diff = acc.sub(&self.source[i][j]).abs();
                if diff > worst {
                    worst = diff;
                }
            }
        }
        worst
    }

    /// `max |(S S^T - I)_ij|`, computed exactly at working precision.
    pub fn orthogonality_residual(&self) -> HighPrecReal {
        let n = self.n();
        let zero = HighPrecReal::zero(self.precision);
        let one = HighPrecReal::one(self.precision);
        let mut worst = zero.clone();
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero.clone();
                for k in 0..n {
                    acc = acc.add(&self.basis[i][k].mul(&self.basis[j][k]));
                }
                if i == j {
                    acc = acc.sub(&one);
                }
                let diff = acc.abs();
                if diff > worst {
                    worst = diff;
                }
            }
        }
        worst
    }
}
