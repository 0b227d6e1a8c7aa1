//! Closed-form evaluation for weight pairs the dichotomy accepts.
//!
//! On a block-rank-1 pair the partition sum factors. Every edge-bearing
//! component of the graph confines an assignment to a single support block
//! (crossing blocks hits a zero entry, zero-weight and zero-row indices die
//! through a vertex or edge factor), and inside a rank-one block the edge
//! product splits into per-vertex power sums. All arithmetic stays rational:
//! factorizations are normalized by a corner entry of the block instead of
//! its square root — degree sums are even, so the half powers pair up into
//! the `denominator^(edge count)` divisor used here. No assignment is ever
//! enumerated and the reported term count is 0.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::dichotomy::{classify_pair, Reason, SupportBlock};
use crate::error::{Error, Result};
use crate::graphs::Multigraph;
use crate::numeric::{rat_pow, Rational, RationalMatrix};
use crate::partition::PartitionValue;

// ---- Rank-one block factorizations ----

/// Radical-free rank-one form of a support block: the block's entries are
/// `row_factors[i] * col_factors[j] / denominator` (with sides `T, T` for a
/// loop-type block and `P, Q` for a bipartite one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Factorization {
    pub row_factors: Vec<Rational>,
    pub col_factors: Vec<Rational>,
    pub denominator: Rational,
}

/// Factor a block of `a` as rank one; errors if the block's entries do not
/// satisfy the rank-one identity.
pub fn factor_rank1(a: &RationalMatrix, block: &SupportBlock) -> Result<Rank1Factorization> {
    let (rows, cols) = match block {
        SupportBlock::Loop(t) => (t.clone(), t.clone()),
        SupportBlock::Bipartite(p, q) => (p.clone(), q.clone()),
    };
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::Contract("cannot factor an empty block".into()));
    }
    let c0 = cols[0];
    let r0 = rows[0];
    let denominator = a.entry(r0, c0);
    if denominator.is_zero() {
        return Err(Error::Contract("block corner entry is zero; not a support block".into()));
    }
    let row_factors: Vec<Rational> = rows.iter().map(|&i| a.entry(i, c0)).collect();
    let col_factors: Vec<Rational> = cols.iter().map(|&j| a.entry(r0, j)).collect();
    for (ri, &i) in rows.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            if a.entry(i, j) * &denominator != row_factors[ri].clone() * &col_factors[cj] {
                return Err(Error::Contract(format!(
                    "block is not rank one at entry ({i}, {j})"
                )));
            }
        }
    }
    Ok(Rank1Factorization { row_factors, col_factors, denominator })
}

// ---- Component machinery ----

/// Bipartition of one connected component, if it has one. Loops are judged
/// separately by the caller.
fn two_color_component(g: &Multigraph, comp: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut adj: BTreeMap<usize, Vec<usize>> = comp.iter().map(|&v| (v, Vec::new())).collect();
    for ((u, v), _) in g.edge_pairs() {
        if adj.contains_key(&u) {
            adj.get_mut(&u).unwrap().push(v);
            adj.get_mut(&v).unwrap().push(u);
        }
    }
    let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([comp[0]]);
    parity.insert(comp[0], false);
    while let Some(u) = queue.pop_front() {
        let pu = parity[&u];
        for &v in &adj[&u] {
            match parity.get(&v) {
                None => {
                    parity.insert(v, !pu);
                    queue.push_back(v);
                }
                Some(&pv) if pv == pu => return None,
                Some(_) => {}
            }
        }
    }
    let mut sides = (Vec::new(), Vec::new());
    for &v in comp {
        if parity[&v] {
            sides.1.push(v);
        } else {
            sides.0.push(v);
        }
    }
    Some(sides)
}

/// Weighted power sum over one block side: `sum_i d[i] * factors[i]^k`.
fn side_sum(d: &RationalMatrix, indices: &[usize], factors: &[Rational], k: u64) -> Rational {
    indices
        .iter()
        .zip(factors)
        .map(|(&i, f)| d.entry(i, i) * rat_pow(f, k))
        .sum()
}

fn loop_block_value(
    a: &RationalMatrix,
    d: &RationalMatrix,
    block: &SupportBlock,
    g: &Multigraph,
    comp: &[usize],
    edge_total: u64,
) -> Result<Rational> {
    let f = factor_rank1(a, block)?;
    let t = match block {
        SupportBlock::Loop(t) => t,
        _ => unreachable!("caller dispatches on block type"),
    };
    let mut value = Rational::one();
    for &w in comp {
        value *= side_sum(d, t, &f.row_factors, g.degree(w));
    }
    Ok(value / rat_pow(&f.denominator, edge_total))
}

fn bipartite_block_value(
    a: &RationalMatrix,
    d: &RationalMatrix,
    block: &SupportBlock,
    g: &Multigraph,
    comp: &[usize],
    edge_total: u64,
    has_loop: bool,
) -> Result<Rational> {
    if has_loop {
        return Ok(Rational::zero());
    }
    let Some((v1, v2)) = two_color_component(g, comp) else {
        return Ok(Rational::zero());
    };
    let f = factor_rank1(a, block)?;
    let (p, q) = match block {
        SupportBlock::Bipartite(p, q) => (p, q),
        _ => unreachable!("caller dispatches on block type"),
    };
    let mut first = Rational::one();
    let mut second = Rational::one();
    for &w in &v1 {
        let k = g.degree(w);
        first *= side_sum(d, p, &f.row_factors, k);
        second *= side_sum(d, q, &f.col_factors, k);
    }
    for &w in &v2 {
        let k = g.degree(w);
        first *= side_sum(d, q, &f.col_factors, k);
        second *= side_sum(d, p, &f.row_factors, k);
    }
    Ok((first + second) / rat_pow(&f.denominator, edge_total))
}

// ---- Entry point ----

/// Evaluate the vertex-weighted partition function of a tractable pair in
/// closed form. Refuses hard pairs with the classification verdict attached.
pub fn eval_tractable(
    a: &RationalMatrix,
    d: &RationalMatrix,
    g: &Multigraph,
) -> Result<PartitionValue> {
    let verdict = classify_pair(a, d)?;
    if !verdict.tractable {
        return Err(Error::HardInput { verdict: Box::new(verdict) });
    }
    let Reason::BlockRankOne(structure) = &verdict.reason else {
        return Err(Error::Internal("tractable verdict without block structure".into()));
    };

    let trace_d: Rational = d.diagonal_entries().into_iter().sum();
    let mut value = Rational::one();
    for comp in g.connected_components() {
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let mut edge_total: u64 = 0;
        let mut has_loop = false;
        for ((u, _), mult) in g.edge_pairs() {
            if members.contains(&u) {
                edge_total += mult;
            }
        }
        for (v, count) in g.loop_counts() {
            if members.contains(&v) {
                edge_total += count;
                has_loop = true;
            }
        }
        if edge_total == 0 {
            value *= &trace_d;
            continue;
        }
        let mut component_value = Rational::zero();
        for block in &structure.blocks {
            component_value += match block {
                SupportBlock::Loop(_) => {
                    loop_block_value(a, d, block, g, &comp, edge_total)?
                }
                SupportBlock::Bipartite(_, _) => {
                    bipartite_block_value(a, d, block, g, &comp, edge_total, has_loop)?
                }
            };
        }
        value *= component_value;
    }
    Ok(PartitionValue { value, term_count: 0 })
}
