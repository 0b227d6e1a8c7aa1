//! Property suites: exact linear algebra against naive oracles, round-trips
//! of the two interpolation solvers, and classifier verdicts checked against
//! exhaustive definitions with witness soundness.

use proptest::prelude::*;

use num_traits::Zero;
use zhom::dichotomy::{is_block_rank1, support_blocks, Reason, Rectangularity};
use zhom::numeric::{
    default_merge_tol, extrapolate_back, min_recurrence, rat, rat_int, solve_vandermonde,
    HighPrecReal, Rational, RationalMatrix,
};

// ---- Oracles ----

fn cofactor_det(a: &RationalMatrix) -> Rational {
    let n = a.rows();
    if n == 1 {
        return a.at(0, 0).clone();
    }
    let mut acc = Rational::zero();
    for j in 0..n {
        if a.at(0, j).is_zero() {
            continue;
        }
        let rows: Vec<Vec<Rational>> = (1..n)
            .map(|i| (0..n).filter(|&c| c != j).map(|c| a.at(i, c).clone()).collect())
            .collect();
        let minor = cofactor_det(&RationalMatrix::from_rows(rows).unwrap());
        let term = a.at(0, j) * &minor;
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Largest k with a k x k submatrix of nonzero determinant.
fn rank_oracle(a: &RationalMatrix) -> usize {
    let n = a.rows();
    let mut best = 0usize;
    for rmask in 1u32..(1 << n) {
        for cmask in 1u32..(1 << n) {
            if rmask.count_ones() != cmask.count_ones() {
                continue;
            }
            let k = rmask.count_ones() as usize;
            if k <= best {
                continue;
            }
            let rows: Vec<usize> = (0..n).filter(|i| rmask >> i & 1 == 1).collect();
            let cols: Vec<usize> = (0..n).filter(|j| cmask >> j & 1 == 1).collect();
            let sub = RationalMatrix::from_rows(
                rows.iter()
                    .map(|&i| cols.iter().map(|&j| a.at(i, j).clone()).collect())
                    .collect(),
            )
            .unwrap();
            if !cofactor_det(&sub).is_zero() {
                best = k;
            }
        }
    }
    best
}

/// Support is a disjoint union of rectangles iff no "open corner" exists.
fn rectangular_oracle(a: &RationalMatrix) -> bool {
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    if !a.at(i, j).is_zero()
                        && !a.at(k, j).is_zero()
                        && !a.at(k, l).is_zero()
                        && a.at(i, l).is_zero()
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Block-rank-1 iff rectangular and every fully supported 2x2 minor vanishes.
fn block_rank1_oracle(a: &RationalMatrix) -> bool {
    if !rectangular_oracle(a) {
        return false;
    }
    let n = a.rows();
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let (aij, ail, akj, akl) = (a.at(i, j), a.at(i, l), a.at(k, j), a.at(k, l));
                    if !aij.is_zero()
                        && !ail.is_zero()
                        && !akj.is_zero()
                        && !akl.is_zero()
                        && aij * akl != ail * akj
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// All of `indices` lie in one support component of `a`.
fn one_support_component(a: &RationalMatrix, indices: &[usize]) -> bool {
    let n = a.rows();
    let mut seen = vec![false; n];
    let mut queue = vec![indices[0]];
    seen[indices[0]] = true;
    while let Some(i) = queue.pop() {
        for j in 0..n {
            if !seen[j] && !a.at(i, j).is_zero() {
                seen[j] = true;
                queue.push(j);
            }
        }
    }
    indices.iter().all(|&i| seen[i])
}

// ---- Strategies ----

fn rational_entry() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

/// Sparse nonnegative value, biased toward zero to produce varied supports.
fn sparse_nonneg() -> impl Strategy<Value = Rational> {
    prop_oneof![
        3 => Just(rat_int(0)),
        2 => (1i64..=4, 1i64..=2).prop_map(|(n, d)| rat(n, d)),
    ]
}

fn square_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(rational_entry(), n * n).prop_map(move |v| {
        RationalMatrix::from_rows((0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect())
            .unwrap()
    })
}

fn symmetric_sparse_nonneg(n: usize) -> impl Strategy<Value = RationalMatrix> {
    proptest::collection::vec(sparse_nonneg(), n * n).prop_map(move |v| {
        let mut rows = vec![vec![rat_int(0); n]; n];
        for i in 0..n {
            for j in i..n {
                rows[i][j] = v[i * n + j].clone();
                rows[j][i] = rows[i][j].clone();
            }
        }
        RationalMatrix::from_rows(rows).unwrap()
    })
}

// ---- Linear algebra vs oracles ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn det2(a in square_matrix(2)) {
        prop_assert_eq!(a.det().unwrap(), cofactor_det(&a));
    }

    #[test]
    fn det3(a in square_matrix(3)) {
        prop_assert_eq!(a.det().unwrap(), cofactor_det(&a));
    }

    #[test]
    fn det4(a in square_matrix(4)) {
        prop_assert_eq!(a.det().unwrap(), cofactor_det(&a));
    }

    #[test]
    fn rank3(a in square_matrix(3)) {
        prop_assert_eq!(a.rank(), rank_oracle(&a));
    }

    #[test]
    fn rank4(a in square_matrix(4)) {
        prop_assert_eq!(a.rank(), rank_oracle(&a));
    }
}

// ---- Solver round-trips ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn vandermonde_roundtrip(
        raw_nodes in proptest::collection::btree_set(-9i64..=9, 1..=4),
        coeffs in proptest::collection::vec(rational_entry(), 4),
        start in 0u32..=2,
    ) {
        let node_ints: Vec<i64> = raw_nodes.into_iter().filter(|&x| x != 0).collect();
        prop_assume!(!node_ints.is_empty());
        let k = node_ints.len();
        let precision = 192;
        let b = &coeffs[..k];
        // Exact rational samples of the node model.
        let samples_exact: Vec<Rational> = (0..k + 2)
            .map(|j| {
                let mut acc = Rational::zero();
                for (bi, &node) in b.iter().zip(&node_ints) {
                    let mut term = bi.clone();
                    for _ in 0..start + j as u32 {
                        term *= rat_int(node);
                    }
                    acc += term;
                }
                acc
            })
            .collect();
        let nodes: Vec<HighPrecReal> =
            node_ints.iter().map(|&x| HighPrecReal::from_i64(x, precision)).collect();
        let samples: Vec<HighPrecReal> = samples_exact
            .iter()
            .map(|x| HighPrecReal::from_rational(x, precision))
            .collect();
        let tol = default_merge_tol(&nodes, precision);
        let sol = solve_vandermonde(&nodes, &samples, start, &tol).unwrap();
        prop_assert_eq!(sol.merged_nodes.len(), k);
        // Nodes come back sorted descending; match coefficients by node.
        let slack = HighPrecReal::pow2(-64, precision);
        for (node, coeff) in sol.merged_nodes.iter().zip(&sol.coefficients) {
            let original = node_ints
                .iter()
                .position(|&x| {
                    HighPrecReal::from_i64(x, precision).sub(node).abs() <= slack
                })
                .expect("solved node matches an input node");
            let truth = HighPrecReal::from_rational(&b[original], precision);
            prop_assert!(coeff.sub(&truth).abs() <= slack);
        }
    }

    #[test]
    fn recurrence_roundtrip(
        raw_ratios in proptest::collection::btree_set((-5i64..=5, 1i64..=2), 1..=3),
        coeffs in proptest::collection::vec(rational_entry(), 3),
    ) {
        let ratios: Vec<Rational> = raw_ratios
            .into_iter()
            .map(|(n, d)| rat(n, d))
            .filter(|x| !x.is_zero())
            .collect();
        prop_assume!(!ratios.is_empty());
        let k = ratios.len();
        let b = &coeffs[..k];
        // z_j = sum_i b_i lambda_i^(j+1), so the index -1 value is sum b_i.
        let samples: Vec<Rational> = (0..2 * 3 + 2)
            .map(|j| {
                let mut acc = Rational::zero();
                for (bi, lam) in b.iter().zip(&ratios) {
                    let mut term = bi.clone();
                    for _ in 0..=j {
                        term *= lam;
                    }
                    acc += term;
                }
                acc
            })
            .collect();
        let rec = min_recurrence(&samples[..7], 3).unwrap();
        prop_assert!(rec.order <= k);
        prop_assert!(rec.annihilates(&samples));
        let back = extrapolate_back(&rec, &samples, 1).unwrap();
        let truth: Rational = b.iter().cloned().sum();
        prop_assert_eq!(back, truth);
    }
}

// ---- Classifier vs exhaustive definitions ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn rectangularity_agrees_with_the_corner_oracle(a in symmetric_sparse_nonneg(4)) {
        match support_blocks(&a).unwrap() {
            Rectangularity::Rectangular(structure) => {
                prop_assert!(rectangular_oracle(&a));
                // Blocks plus residual partition the index set.
                let mut seen: Vec<usize> = structure.residual.clone();
                for block in &structure.blocks {
                    seen.extend(block.indices());
                }
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..4).collect::<Vec<_>>());
            }
            Rectangularity::NotRectangular { zero_at, anchor } => {
                prop_assert!(!rectangular_oracle(&a));
                prop_assert!(a.at(zero_at.0, zero_at.1).is_zero());
                prop_assert!(!a.at(anchor.0, anchor.1).is_zero());
                prop_assert!(one_support_component(
                    &a,
                    &[zero_at.0, zero_at.1, anchor.0, anchor.1]
                ));
            }
        }
    }

    #[test]
    fn block_rank1_agrees_with_the_minor_oracle(a in symmetric_sparse_nonneg(4)) {
        let verdict = is_block_rank1(&a).unwrap();
        prop_assert_eq!(verdict.tractable, block_rank1_oracle(&a));
        if let Reason::RankTwoBlock { rows, cols } = &verdict.reason {
            let minor = a.at(rows.0, cols.0) * a.at(rows.1, cols.1)
                - a.at(rows.0, cols.1) * a.at(rows.1, cols.0);
            prop_assert!(!minor.is_zero());
            for &(i, j) in
                &[(rows.0, cols.0), (rows.0, cols.1), (rows.1, cols.0), (rows.1, cols.1)]
            {
                prop_assert!(!a.at(i, j).is_zero());
            }
        }
    }
}
