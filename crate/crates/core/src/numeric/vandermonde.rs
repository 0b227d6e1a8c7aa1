//! Vandermonde interpolation with node merging.
//!
//! Given interpolation nodes `x_k` and consecutive power sums
//! `sample_i = sum_k c_k * x_k^(start + i)`, recover the coefficients `c_k`.
//! Nodes closer together than a merge tolerance are collapsed first (their
//! coefficients add), because nearly coincident nodes make the linear system
//! singular without carrying any extra information.
//!
//! The solve uses the first `K` samples (`K` = merged node count) and then
//! *checks* the solution against every provided sample; a residual above
//! `merge_tol * max(1, max |sample|)` is reported as ill-conditioning rather
//! than returned silently.

use crate::error::{Error, Result};
use crate::numeric::HighPrecReal;

/// Output of [`solve_vandermonde`].
#[derive(Debug, Clone)]
pub struct VandermondeSolution {
    /// Distinct nodes after merging, sorted descending.
    pub merged_nodes: Vec<HighPrecReal>,
    /// Coefficient for each merged node (sums of merged coefficients).
    pub coefficients: Vec<HighPrecReal>,
    /// Largest deviation over all provided samples.
    pub residual: HighPrecReal,
}

/// Default merge tolerance: `2^(-precision/2) * (1 + max |node|)`.
pub fn default_merge_tol(nodes: &[HighPrecReal], precision: u32) -> HighPrecReal {
    let mut max_abs = HighPrecReal::zero(precision);
    for n in nodes {
        let a = n.abs();
        if a > max_abs {
            max_abs = a;
        }
    }
    HighPrecReal::pow2(-(precision as i64) / 2, precision)
        .mul(&HighPrecReal::one(precision).add(&max_abs))
}

/// Nodes after merging within `merge_tol`, sorted descending by value.
fn merge_nodes(nodes: &[HighPrecReal], merge_tol: &HighPrecReal) -> Vec<HighPrecReal> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(|a, b| b.cmp_value(a));
    let mut reps: Vec<HighPrecReal> = Vec::new();
    for n in &sorted {
        match reps.last() {
            Some(r) if r.sub(n).abs() <= *merge_tol => {}
            _ => reps.push(n.clone()),
        }
    }
    reps
}

/// Estimate, in bits, how much a Vandermonde solve on these nodes amplifies
/// input rounding: the inverse matrix rows are coefficient vectors of the
/// Lagrange basis polynomials, whose entries are bounded by
/// `prod_{j != k} (1 + |x_j|) / |x_k - x_j|`; the worst `k` sets the
/// estimate. Nodes are merged within `merge_tol` first, matching the merge
/// a subsequent solve with the same tolerance would perform.
pub fn vandermonde_condition_bits(nodes: &[HighPrecReal], merge_tol: &HighPrecReal) -> u32 {
    let reps = merge_nodes(nodes, merge_tol);
    if reps.len() <= 1 {
        return 0;
    }
    let precision = reps[0].precision();
    let one = HighPrecReal::one(precision);
    // Any surviving pair is at least merge_tol apart, so a gap rounding to
    // zero can only be a wildly inaccurate representation; floor it there.
    let gap_floor = merge_tol
        .log2_magnitude()
        .unwrap_or(-(precision as i64))
        .min(0);
    let grow: Vec<i64> = reps
        .iter()
        .map(|x| one.add(&x.abs()).log2_magnitude().unwrap_or(1))
        .collect();
    let mut worst: i64 = 0;
    for (k, xk) in reps.iter().enumerate() {
        let mut bits: i64 = 0;
        for (j, xj) in reps.iter().enumerate() {
            if j == k {
                continue;
            }
            let gap = xk.sub(xj).log2_magnitude().unwrap_or(gap_floor);
            bits += (grow[j] + 1 - gap).max(0);
        }
        worst = worst.max(bits);
    }
    let count_bits = i64::from(usize::BITS - reps.len().leading_zeros());
    u32::try_from(worst + count_bits).unwrap_or(u32::MAX)
}

/// Solve for coefficients of `sample_i = sum_k c_k * node_k^(start_exponent + i)`.
///
/// Preconditions: `samples.len()` is at least the merged node count. When
/// `start_exponent > 0` the solution implicitly divides by `node^start`, so
/// a node at (numerical) zero is refused as degenerate.
pub fn solve_vandermonde(
    nodes: &[HighPrecReal],
    samples: &[HighPrecReal],
    start_exponent: u32,
    merge_tol: &HighPrecReal,
) -> Result<VandermondeSolution> {
    let precision = nodes
        .iter()
        .chain(samples.iter())
        .map(HighPrecReal::precision)
        .max()
        .unwrap_or(64);
    let zero = HighPrecReal::zero(precision);

    let reps = merge_nodes(nodes, merge_tol);

    if start_exponent > 0 {
        if reps.iter().any(|r| r.abs() <= *merge_tol) {
            return Err(Error::DegenerateNode);
        }
    }

    let k = reps.len();
    if samples.len() < k {
        return Err(Error::Contract(format!(
            "need at least {k} samples for {k} merged nodes, got {}",
            samples.len()
        )));
    }
    if k == 0 {
        // No nodes: consistent only with an identically small sample set.
        let mut worst = zero.clone();
        for s in samples {
            let a = s.abs();
            if a > worst {
                worst = a;
            }
        }
        if worst > *merge_tol {
            return Err(Error::IllConditioned(
                "no nodes but nonzero samples".into(),
            ));
        }
        return Ok(VandermondeSolution {
            merged_nodes: vec![],
            coefficients: vec![],
            residual: worst,
        });
    }

    // ---- Build the K x K system on the first K samples ----
    let mut m: Vec<Vec<HighPrecReal>> = vec![vec![zero.clone(); k + 1]; k];
    for (col, rep) in reps.iter().enumerate() {
        let mut pw = rep.powi(start_exponent as u64);
        for row in m.iter_mut().take(k) {
            row[col] = pw.clone();
            pw = pw.mul(rep);
        }
    }
    for (row, s) in m.iter_mut().zip(samples.iter()) {
        row[k] = s.clone();
    }

    // ---- Gaussian elimination with partial pivoting ----
    let pivot_floor = HighPrecReal::pow2(-(precision as i64) + 8, precision);
    for col in 0..k {
        let mut best = col;
        for r in col + 1..k {
            if m[r][col].abs() > m[best][col].abs() {
                best = r;
            }
        }
        m.swap(col, best);
        if m[col][col].abs() <= pivot_floor {
            return Err(Error::IllConditioned(format!(
                "vanishing pivot in column {col}"
            )));
        }
        let pivot = m[col][col].clone();
        for r in col + 1..k {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].div(&pivot);
            for c in col..=k {
                let upper = m[col][c].clone();
                m[r][c] = m[r][c].sub(&f.mul(&upper));
            }
        }
    }
    let mut coeffs = vec![zero.clone(); k];
    for row in (0..k).rev() {
        let mut acc = m[row][k].clone();
        for c in row + 1..k {
            acc = acc.sub(&m[row][c].mul(&coeffs[c]));
        }
        coeffs[row] = acc.div(&m[row][row]);
    }

    // ---- Residual over every provided sample ----
    let mut scale = HighPrecReal::one(precision);
    for s in samples {
        let a = s.abs();
        if a > scale {
            scale = a;
        }
    }
    let mut worst = zero.clone();
    let mut pows: Vec<HighPrecReal> = reps
        .iter()
        .map(|r| r.powi(start_exponent as u64))
        .collect();
    for s in samples {
        let mut acc = zero.clone();
        for (c, p) in coeffs.iter().zip(pows.iter()) {
            acc = acc.add(&c.mul(p));
        }
        let diff = acc.sub(s).abs();
        if diff > worst {
            worst = diff;
        }
        for (p, r) in pows.iter_mut().zip(reps.iter()) {
            *p = p.mul(r);
        }
    }
    if worst > merge_tol.mul(&scale) {
        return Err(Error::IllConditioned(format!(
            "residual {} exceeds tolerance",
            worst.decimal_string(6)
        )));
    }

    Ok(VandermondeSolution {
        merged_nodes: reps,
        coefficients: coeffs,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(v: i64) -> HighPrecReal {
        HighPrecReal::from_i64(v, 128)
    }

    fn tol() -> HighPrecReal {
        HighPrecReal::pow2(-64, 128)
    }

    /// Elimination rounds at working precision (quotients like 1/3 are not
    /// dyadic), so coefficients are compared to within the merge tolerance.
    fn assert_close(got: &[HighPrecReal], want: &[i64]) {
        assert_eq!(got.len(), want.len());
        for (g, &w) in got.iter().zip(want) {
            assert!(
                g.sub(&hp(w)).abs() <= tol(),
                "coefficient {} too far from {w}",
                g.decimal_string(8)
            );
        }
    }

    #[test]
    fn two_distinct_nodes() {
        // samples z_n = 2^n + 3^n for n = 1, 2
        let sol = solve_vandermonde(&[hp(2), hp(3)], &[hp(5), hp(13)], 1, &tol()).unwrap();
        assert_eq!(sol.merged_nodes, vec![hp(3), hp(2)]);
        assert_close(&sol.coefficients, &[1, 1]);
        assert!(sol.residual <= tol());
    }

    #[test]
    fn single_node_with_spare_samples() {
        let sol = solve_vandermonde(&[hp(1)], &[hp(4), hp(4), hp(4)], 1, &tol()).unwrap();
        assert_eq!(sol.coefficients, vec![hp(4)]);
    }

    #[test]
    fn duplicate_nodes_merge() {
        // z_n = 7 * 5^n presented with a doubled node.
        let sol = solve_vandermonde(&[hp(5), hp(5)], &[hp(35), hp(175)], 1, &tol()).unwrap();
        assert_eq!(sol.merged_nodes, vec![hp(5)]);
        assert_eq!(sol.coefficients, vec![hp(7)]);
    }

    #[test]
    fn zero_node_is_degenerate_when_extrapolating() {
        let err = solve_vandermonde(&[hp(0), hp(2)], &[hp(1), hp(2)], 1, &tol());
        assert!(matches!(err, Err(Error::DegenerateNode)));
        // With start exponent 0 a zero node is a legitimate constant term:
        // z_n = 2 * 2^n + 1 * 0^n gives (3, 4, 8) from n = 0.
        let ok = solve_vandermonde(&[hp(0), hp(2)], &[hp(3), hp(4), hp(8)], 0, &tol()).unwrap();
        assert_close(&ok.coefficients, &[2, 1]);
    }

    #[test]
    fn inconsistent_extra_sample_is_caught() {
        // First two samples fit 2^n + 3^n; the third does not.
        let err = solve_vandermonde(&[hp(2), hp(3)], &[hp(5), hp(13), hp(36)], 1, &tol());
        assert!(matches!(err, Err(Error::IllConditioned(_))));
    }

    #[test]
    fn too_few_samples_is_a_contract_error() {
        let err = solve_vandermonde(&[hp(2), hp(3)], &[hp(5)], 1, &tol());
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn start_exponent_two_recovers_true_coefficients() {
        // z_n = 4*2^n + 1*3^n sampled at n = 2, 3: (25, 59).
        let sol = solve_vandermonde(&[hp(2), hp(3)], &[hp(25), hp(59)], 2, &tol()).unwrap();
        assert_close(&sol.coefficients, &[1, 4]);
    }
}
