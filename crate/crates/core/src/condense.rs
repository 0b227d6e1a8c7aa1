//! Condensation of edge-weight matrices with proportional rows.
//!
//! A nonnegative symmetric matrix whose rows include proportional pairs can
//! be shrunk: group indices whose rows are positive multiples of each other,
//! keep one representative per group, and compensate with vertex weights
//! that depend on vertex degree. The invariants maintained here:
//!
//! * reconstruction — `A[v][w] = mu[v] * mu[w] * A'[g(v)][g(w)]` where
//!   `g(v)` is v's group and `mu` its factor (1 on representatives);
//! * the condensed matrix has no zero rows and no two proportional rows;
//! * the degree-k compensation diagonal is `sum_v alpha[v] * mu[v]^k` over
//!   each group, with all parameters positive.
//!
//! On a condensed matrix with positive diagonal weights, every symmetric
//! 2x2 minor of `A' D A'` taken on a row pair and the same column pair is
//! strictly positive (Cauchy-Schwarz is strict for non-proportional rows).
//! That bounds the off-diagonal ratio `gamma^2 < 1` and guarantees some
//! entrywise power p makes `(A' D A')^{hadamard p}` nonsingular; the
//! certificate search below finds the smallest such p and records the bound
//! that caps the search.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{rat_pow, Rational, RationalMatrix};
use crate::partition::DegreeWeightFamily;

// ---- Striking degenerate indices ----

/// Remove every index whose matrix row is all-zero or whose vertex weight is
/// zero; such indices never contribute to a partition sum.
pub fn strike_zero_rows(
    a: &RationalMatrix,
    d: &RationalMatrix,
) -> Result<(RationalMatrix, RationalMatrix, Vec<usize>)> {
    validate_pair(a, d)?;
    let m = a.rows();
    let mut keep = Vec::new();
    let mut struck = Vec::new();
    for i in 0..m {
        let zero_row = (0..m).all(|j| a.at(i, j).is_zero());
        if zero_row || d.at(i, i).is_zero() {
            struck.push(i);
        } else {
            keep.push(i);
        }
    }
    if keep.is_empty() {
        return Err(Error::EmptyDomain("every index has a zero row or zero weight".into()));
    }
    Ok((a.principal_submatrix(&keep), d.principal_submatrix(&keep), struck))
}

// ---- Condensation ----

/// A matrix/weight pair rewritten over one representative per group of
/// proportional rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// Original indices dropped before grouping (zero row or zero weight).
    pub struck: Vec<usize>,
    /// Original indices per group; the first entry is the representative.
    pub groups: Vec<Vec<usize>>,
    /// Row factor of each group member relative to its representative.
    pub mu: Vec<Vec<Rational>>,
    /// Original vertex weight of each group member.
    pub alpha: Vec<Vec<Rational>>,
    /// Condensed edge-weight matrix over the representatives.
    pub a_prime: RationalMatrix,
}

impl Condensation {
    pub fn domain_size(&self) -> usize {
        self.groups.len()
    }

    /// Degree-k compensation diagonal: entry i is `sum_j alpha[i][j] *
    /// mu[i][j]^k`.
    pub fn degree_diagonal(&self, k: u64) -> Vec<Rational> {
        self.alpha
            .iter()
            .zip(&self.mu)
            .map(|(ai, mi)| ai.iter().zip(mi).map(|(a, m)| a * rat_pow(m, k)).sum())
            .collect()
    }
}

fn validate_pair(a: &RationalMatrix, d: &RationalMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("edge matrix is {}x{}", a.rows(), a.cols())));
    }
    if !a.is_symmetric() {
        return Err(Error::Contract("edge weight matrix must be symmetric".into()));
    }
    if !d.is_diagonal() || d.rows() != a.rows() {
        return Err(Error::Shape("vertex weights must be diagonal, same size".into()));
    }
    if !a.is_nonnegative() || d.diagonal_entries().iter().any(|x| x < &Rational::zero()) {
        return Err(Error::Contract("condensation needs nonnegative weights".into()));
    }
    Ok(())
}

/// Factor by which `row` is a positive multiple of `base`, if it is one.
fn proportionality(base: &[Rational], row: &[Rational]) -> Option<Rational> {
    let k = (0..base.len()).find(|&k| !base[k].is_zero() || !row[k].is_zero())?;
    if base[k].is_zero() || row[k].is_zero() {
        return None;
    }
    let mu = row[k].clone() / base[k].clone();
    for l in 0..base.len() {
        if row[l] != base[l].clone() * mu.clone() {
            return None;
        }
    }
    Some(mu)
}

/// Group proportional rows of a nonnegative symmetric matrix and build the
/// compensating degree-weight data.
pub fn condense(a: &RationalMatrix, d: &RationalMatrix) -> Result<Condensation> {
    let (ra, rd, struck) = strike_zero_rows(a, d)?;
    let keep: Vec<usize> = (0..a.rows()).filter(|i| !struck.contains(i)).collect();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut mu: Vec<Vec<Rational>> = Vec::new();
    let mut alpha: Vec<Vec<Rational>> = Vec::new();
    let mut reps: Vec<usize> = Vec::new(); // positions in the struck matrix
    for pos in 0..ra.rows() {
        let row = ra.row(pos);
        let mut placed = false;
        for (gi, &rep) in reps.iter().enumerate() {
            if let Some(factor) = proportionality(&ra.row(rep), &row) {
                groups[gi].push(keep[pos]);
                mu[gi].push(factor);
                alpha[gi].push(rd.entry(pos, pos));
                placed = true;
                break;
            }
        }
        if !placed {
            reps.push(pos);
            groups.push(vec![keep[pos]]);
            mu.push(vec![Rational::one()]);
            alpha.push(vec![rd.entry(pos, pos)]);
        }
    }

    let a_prime = ra.principal_submatrix(&reps);
    Ok(Condensation { struck, groups, mu, alpha, a_prime })
}

/// The degree-indexed vertex-weight family of a condensation.
pub fn family_from(cond: &Condensation) -> DegreeWeightFamily {
    DegreeWeightFamily::Condensed { alpha: cond.alpha.clone(), mu: cond.mu.clone() }
}

// ---- Symmetric minor positivity ----

/// Outcome of checking every symmetric 2x2 minor of `A' D A'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinorCheck {
    AllPositive,
    Violation { i: usize, j: usize, minor: Rational },
}

/// Check that `M = A' D A'` satisfies `M[i][i] M[j][j] - M[i][j]^2 > 0` for
/// every index pair, the inequality that makes the thickening search finite.
pub fn check_lemma_b1(a_prime: &RationalMatrix, d: &RationalMatrix) -> Result<MinorCheck> {
    validate_pair(a_prime, d)?;
    let m = a_prime.mat_mul(d)?.mat_mul(a_prime)?;
    for i in 0..m.rows() {
        for j in i + 1..m.rows() {
            let minor = m.entry(i, i) * m.entry(j, j) - m.entry(i, j) * m.entry(i, j);
            if minor <= Rational::zero() {
                return Ok(MinorCheck::Violation { i, j, minor });
            }
        }
    }
    Ok(MinorCheck::AllPositive)
}

// ---- Thickening power certificate ----

/// Proof material that the chosen entrywise power makes the gadget base
/// matrix nonsingular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThickeningCertificate {
    /// Smallest power with nonsingular base matrix.
    pub p: u64,
    /// Exact max over pairs of `M[i][j]^2 / (M[i][i] M[j][j])`.
    pub gamma_sq: Rational,
    /// Ceiling for the search, from the off-diagonal decay rate.
    pub analytic_bound: u64,
    /// Determinant of `(A' D A')^{hadamard p}` at the chosen power.
    pub det_b: Rational,
}

/// Find the least `p >= 1` with `det((A' D A')^{hadamard p}) != 0`.
///
/// Requires a condensed matrix (positive symmetric minors); the decay of the
/// normalized off-diagonal entries then caps the search, and exhausting the
/// cap would contradict the minor check, so it is reported as an internal
/// error.
pub fn find_thickening_p(
    a_prime: &RationalMatrix,
    d: &RationalMatrix,
) -> Result<ThickeningCertificate> {
    if let MinorCheck::Violation { i, j, .. } = check_lemma_b1(a_prime, d)? {
        return Err(Error::Contract(format!(
            "rows {i} and {j} are proportional; condense the matrix first"
        )));
    }
    if d.diagonal_entries().iter().any(|x| x <= &Rational::zero()) {
        return Err(Error::Contract("thickening search needs positive weights".into()));
    }
    let s = a_prime.rows();
    let m = a_prime.mat_mul(d)?.mat_mul(a_prime)?;

    let mut gamma_sq = Rational::zero();
    for i in 0..s {
        for j in i + 1..s {
            let ratio = m.entry(i, j) * m.entry(i, j) / (m.entry(i, i) * m.entry(j, j));
            if ratio > gamma_sq {
                gamma_sq = ratio;
            }
        }
    }

    let analytic_bound = if gamma_sq.is_zero() {
        1
    } else {
        // gamma^p < 1/(2s) forces strict diagonal dominance; the minor check
        // gives gamma^2 < 1, so the threshold is finite. Floating point only
        // steers the search ceiling; one extra step absorbs rounding.
        let gamma_sq_f = rational_to_f64(&gamma_sq);
        let bound = ((2.0 * s as f64).ln() / -(0.5 * gamma_sq_f.ln())).floor() + 2.0;
        bound as u64
    };

    for p in 1..=analytic_bound {
        let det_b = m.hadamard_pow(p).det()?;
        if !det_b.is_zero() {
            return Ok(ThickeningCertificate { p, gamma_sq, analytic_bound, det_b });
        }
    }
    Err(Error::Internal(
        "no nonsingular entrywise power within the decay bound; minor check must be wrong".into(),
    ))
}

fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(if x >= &Rational::zero() { f64::MAX } else { f64::MIN })
}

// ---- Weight redistribution ----

/// Degree-dependent weights rewritten as a power family plus a rescaled
/// edge-weight matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redistribution {
    /// Per-index base weight `w[j]`, the degree-(2p+1) over degree-(2p)
    /// compensation ratio.
    pub weights: Vec<Rational>,
    /// The power family `k -> diag(w^k)`.
    pub family: DegreeWeightFamily,
    /// `C[i][j] = A'[i][j] w[i] w[j]`: plain evaluation under C equals
    /// power-family evaluation under A'.
    pub matrix: RationalMatrix,
}

/// Build the weight redistribution of a condensation at thickening power p.
pub fn build_weights(cond: &Condensation, p: u64) -> Result<Redistribution> {
    if p == 0 {
        return Err(Error::Contract("thickening power must be >= 1".into()));
    }
    let hi = cond.degree_diagonal(2 * p + 1);
    let lo = cond.degree_diagonal(2 * p);
    let weights: Vec<Rational> = hi.into_iter().zip(lo).map(|(h, l)| h / l).collect();
    let s = cond.domain_size();
    let matrix =
        RationalMatrix::from_fn(s, s, |i, j| cond.a_prime.entry(i, j) * &weights[i] * &weights[j]);
    Ok(Redistribution {
        family: DegreeWeightFamily::Power(weights.clone()),
        weights,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Multigraph;
    use crate::numeric::{rat, rat_int};
    use crate::partition::{z_degree_weighted, z_plain, z_vertex_weighted};

    fn mat(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect(),
        )
        .unwrap()
    }

    fn diag(entries: &[i64]) -> RationalMatrix {
        RationalMatrix::diagonal_from(&entries.iter().map(|&x| rat_int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn worked_example_with_one_proportional_pair() {
        let a = mat(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3]]);
        let d = RationalMatrix::identity(3);
        let c = condense(&a, &d).unwrap();
        assert!(c.struck.is_empty());
        assert_eq!(c.groups, vec![vec![0, 1], vec![2]]);
        assert_eq!(c.mu, vec![vec![rat_int(1), rat_int(2)], vec![rat_int(1)]]);
        assert_eq!(c.alpha, vec![vec![rat_int(1), rat_int(1)], vec![rat_int(1)]]);
        assert_eq!(c.a_prime, mat(&[&[1, 0], &[0, 3]]));
        // Degree-k diagonal: (1 + 2^k, 1).
        assert_eq!(c.degree_diagonal(0), vec![rat_int(2), rat_int(1)]);
        assert_eq!(c.degree_diagonal(3), vec![rat_int(9), rat_int(1)]);

        let r = build_weights(&c, 1).unwrap();
        assert_eq!(r.weights, vec![rat(9, 5), rat_int(1)]);
        assert_eq!(
            r.matrix,
            RationalMatrix::from_rows(vec![
                vec![rat(81, 25), rat_int(0)],
                vec![rat_int(0), rat_int(3)],
            ])
            .unwrap()
        );
    }

    #[test]
    fn reconstruction_identity_holds() {
        let a = mat(&[&[1, 2, 3, 2], &[2, 4, 6, 4], &[3, 6, 9, 6], &[2, 4, 6, 5]]);
        let d = diag(&[1, 2, 3, 4]);
        let c = condense(&a, &d).unwrap();
        assert_eq!(c.groups, vec![vec![0, 1, 2], vec![3]]);
        // Group and factor of each original index.
        let mut group_of = vec![usize::MAX; 4];
        let mut mu_of = vec![Rational::default(); 4];
        for (gi, members) in c.groups.iter().enumerate() {
            for (k, &v) in members.iter().enumerate() {
                group_of[v] = gi;
                mu_of[v] = c.mu[gi][k].clone();
            }
        }
        for v in 0..4 {
            for w in 0..4 {
                assert_eq!(
                    a.entry(v, w),
                    mu_of[v].clone()
                        * mu_of[w].clone()
                        * c.a_prime.entry(group_of[v], group_of[w])
                );
            }
        }
    }

    #[test]
    fn striking_removes_zero_rows_and_zero_weights() {
        let a = mat(&[&[1, 0, 1], &[0, 0, 0], &[1, 0, 2]]);
        let d = diag(&[1, 5, 0]);
        let (ra, rd, struck) = strike_zero_rows(&a, &d).unwrap();
        assert_eq!(struck, vec![1, 2]);
        assert_eq!(ra, mat(&[&[1]]));
        assert_eq!(rd, diag(&[1]));

        let all_zero = RationalMatrix::zeros(2, 2);
        assert!(matches!(
            strike_zero_rows(&all_zero, &RationalMatrix::identity(2)),
            Err(Error::EmptyDomain(_))
        ));
    }

    #[test]
    fn condensation_preserves_partition_values() {
        let a = mat(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3]]);
        let d = diag(&[1, 3, 2]);
        let c = condense(&a, &d).unwrap();
        let fam = family_from(&c);
        for g in [
            Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]),
            {
                let mut g = Multigraph::from_edges(2, &[(0, 1)]);
                g.add_loops(0, 2);
                g.add_vertex();
                g
            },
        ] {
            assert_eq!(
                z_vertex_weighted(&a, &d, &g).unwrap().value,
                z_degree_weighted(&c.a_prime, &fam, &g).unwrap().value,
            );
        }
    }

    #[test]
    fn condensing_distinct_rows_is_identity() {
        let a = mat(&[&[1, 1], &[1, 0]]);
        let d = diag(&[2, 5]);
        let c = condense(&a, &d).unwrap();
        assert_eq!(c.groups, vec![vec![0], vec![1]]);
        assert_eq!(c.a_prime, a);
        assert_eq!(c.degree_diagonal(7), vec![rat_int(2), rat_int(5)]);
    }

    #[test]
    fn minor_check_accepts_condensed_and_rejects_proportional() {
        let d = RationalMatrix::identity(2);
        assert_eq!(
            check_lemma_b1(&mat(&[&[1, 0], &[0, 3]]), &d).unwrap(),
            MinorCheck::AllPositive
        );
        match check_lemma_b1(&mat(&[&[1, 2], &[2, 4]]), &d).unwrap() {
            MinorCheck::Violation { i: 0, j: 1, minor } => assert!(minor.is_zero()),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn thickening_power_one_for_nonsingular_base() {
        let cert =
            find_thickening_p(&mat(&[&[1, 0], &[0, 3]]), &diag(&[2, 1])).unwrap();
        assert_eq!(cert.p, 1);
        assert!(cert.gamma_sq.is_zero());
        assert_eq!(cert.analytic_bound, 1);
        assert!(!cert.det_b.is_zero());
    }

    #[test]
    fn thickening_power_two_when_base_is_singular() {
        // Condensed (pairwise non-proportional rows) but rank two: the first
        // entrywise power of A'A' is singular, the second is not.
        let a = mat(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]);
        let d = RationalMatrix::identity(3);
        let m = a.mat_mul(&d).unwrap().mat_mul(&a).unwrap();
        assert!(m.det().unwrap().is_zero());

        let cert = find_thickening_p(&a, &d).unwrap();
        assert_eq!(cert.p, 2);
        assert_eq!(cert.gamma_sq, rat(3, 4));
        assert!(cert.p <= cert.analytic_bound);
        assert_eq!(cert.det_b, rat_int(54));
    }

    #[test]
    fn thickening_search_rejects_uncondensed_input() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            find_thickening_p(&a, &RationalMatrix::identity(2)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn redistribution_preserves_partition_values() {
        let a = mat(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3]]);
        let c = condense(&a, &RationalMatrix::identity(3)).unwrap();
        let r = build_weights(&c, 1).unwrap();
        for g in [
            Multigraph::from_edges(3, &[(0, 1), (1, 2)]),
            {
                let mut g = Multigraph::from_edges(2, &[(0, 1)]);
                g.add_loops(1, 1);
                g.add_vertex();
                g
            },
        ] {
            assert_eq!(
                z_degree_weighted(&c.a_prime, &r.family, &g).unwrap().value,
                z_plain(&r.matrix, &g).unwrap().value,
            );
        }
    }
}
