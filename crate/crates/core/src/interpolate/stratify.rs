//! Stratified form of the chain-gadget sample values.
//!
//! The substituted instance's value at chain length n is a polynomial in the
//! entries of the chain signature: group the assignments of the vertex-cycle
//! expansion by the multiset of unordered index pairs its cycle edges see
//! (loop cycle edges only ever see diagonal pairs). Each class coefficient
//! collects the merged-edge and vertex-weight factors and is independent of
//! the chain length, so a single stratification certifies every sampled
//! length at once: evaluating it at the signature of length n reproduces the
//! collapsed value at n. The number of classes is at most the number of
//! exponent tuples over the pair universe summing to the cycle-edge count.

use std::collections::BTreeMap;

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::condense::Condensation;
use crate::error::{Error, Result};
use crate::graphs::{vertex_cycle_expansion, Multigraph};
use crate::numeric::{rat_pow, Rational, RationalMatrix};
use crate::partition::DEFAULT_TERM_BUDGET;

/// Coefficients of the collapsed value as a polynomial in signature entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    /// Unordered index pairs `(i, j)`, `i <= j`, in lexicographic order.
    pub pairs: Vec<(usize, usize)>,
    /// One term per realized class: exponents over `pairs` (summing to
    /// `exponent_total`) and the class coefficient.
    pub terms: Vec<(Vec<u64>, Rational)>,
    /// Number of cycle edges; every term's exponents sum to this.
    pub exponent_total: u64,
}

impl Stratification {
    /// Evaluate the polynomial at a concrete signature matrix.
    pub fn evaluate(&self, l: &RationalMatrix) -> Result<Rational> {
        let needed = self.pairs.last().map_or(0, |&(_, j)| j + 1);
        if !l.is_square() || l.rows() < needed {
            return Err(Error::Shape(format!(
                "signature matrix is {}x{}, need at least {needed} indices",
                l.rows(),
                l.cols()
            )));
        }
        let mut total = Rational::zero();
        for (exponents, coefficient) in &self.terms {
            let mut term = coefficient.clone();
            for (k, &e) in exponents.iter().enumerate() {
                if e > 0 {
                    let (i, j) = self.pairs[k];
                    term *= rat_pow(l.at(i, j), e);
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// Upper bound on the class count: exponent tuples over the pair
    /// universe summing to the cycle-edge count.
    pub fn class_count_bound(&self) -> u128 {
        let p = self.pairs.len() as u128;
        if p == 0 {
            return 1;
        }
        binomial(u128::from(self.exponent_total) + p - 1, p - 1)
    }
}

/// Compute the stratification of a loopless multigraph without isolated
/// vertices over a condensed pair at thickening power `p`.
pub fn compute_stratification(
    g: &Multigraph,
    cond: &Condensation,
    p: u64,
) -> Result<Stratification> {
    compute_stratification_with_budget(g, cond, p, DEFAULT_TERM_BUDGET)
}

pub fn compute_stratification_with_budget(
    g: &Multigraph,
    cond: &Condensation,
    p: u64,
    budget: u128,
) -> Result<Stratification> {
    if p == 0 {
        return Err(Error::Contract("stratification needs p >= 1".into()));
    }
    let structure = vertex_cycle_expansion(g)?;
    let s = cond.domain_size();
    let slots = structure.graph.vertex_count();
    let required = (s as u128)
        .checked_pow(u32::try_from(slots).unwrap_or(u32::MAX))
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let mut pairs = Vec::new();
    let mut pair_index = vec![vec![0usize; s]; s];
    for i in 0..s {
        for j in i..s {
            pair_index[i][j] = pairs.len();
            pairs.push((i, j));
        }
    }

    let weights = cond.degree_diagonal(2 * p + 1);
    let mut classes: BTreeMap<Vec<u64>, Rational> = BTreeMap::new();
    let mut zeta = vec![0usize; slots];
    for _ in 0..required {
        let mut coefficient = Rational::one();
        for &(u, v) in &structure.merged_edges {
            coefficient *= cond.a_prime.at(zeta[u], zeta[v]);
            if coefficient.is_zero() {
                break;
            }
        }
        if !coefficient.is_zero() {
            for &zw in &zeta {
                coefficient *= &weights[zw];
            }
            let mut exponents = vec![0u64; pairs.len()];
            for &(u, v) in &structure.cycle_edges {
                let (i, j) = (zeta[u].min(zeta[v]), zeta[u].max(zeta[v]));
                exponents[pair_index[i][j]] += 1;
            }
            *classes.entry(exponents).or_insert_with(Rational::zero) += coefficient;
        }
        for digit in zeta.iter_mut() {
            *digit += 1;
            if *digit < s {
                break;
            }
            *digit = 0;
        }
    }

    Ok(Stratification {
        pairs,
        terms: classes.into_iter().collect(),
        exponent_total: structure.cycle_edges.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::condense;
    use crate::numeric::rat_int;
    use crate::partition::{path_transfer_matrix, z_collapsed_bounded};

    fn mat(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_state_single_edge_has_one_class() {
        let cond = condense(&mat(&[&[2]]), &RationalMatrix::identity(1)).unwrap();
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        let s = compute_stratification(&g, &cond, 1).unwrap();
        assert_eq!(s.pairs, vec![(0, 0)]);
        assert_eq!(s.exponent_total, 2);
        // Single class: both loop cycle edges see the pair (0, 0); the
        // coefficient is the merged edge times both slot weights.
        assert_eq!(s.terms, vec![(vec![2], rat_int(2))]);
        assert_eq!(s.class_count_bound(), 1);
    }

    #[test]
    fn stratification_reproduces_collapsed_values() {
        let a = mat(&[&[1, 1, 2], &[1, 0, 2], &[2, 2, 4]]);
        let cond = condense(&a, &RationalMatrix::identity(3)).unwrap();
        let p = 1;
        let graphs = [
            Multigraph::from_edges(2, &[(0, 1)]),
            Multigraph::from_edges(3, &[(0, 1), (1, 2)]),
            {
                let mut g = Multigraph::new(2);
                g.add_edge_mult(0, 1, 2);
                g
            },
        ];
        for g in &graphs {
            let s = compute_stratification(g, &cond, p).unwrap();
            assert!((s.terms.len() as u128) <= s.class_count_bound());
            for n in 0..=3 {
                let l = path_transfer_matrix(&cond, p, n).unwrap();
                assert_eq!(
                    s.evaluate(&l).unwrap(),
                    z_collapsed_bounded(g, &cond, p, n).unwrap().value,
                    "n={n}"
                );
            }
        }
    }

    #[test]
    fn evaluation_rejects_wrong_shape() {
        let cond = condense(&mat(&[&[1, 0], &[0, 2]]), &RationalMatrix::identity(2)).unwrap();
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        let s = compute_stratification(&g, &cond, 1).unwrap();
        assert!(s.evaluate(&mat(&[&[1]])).is_err());
    }
}
