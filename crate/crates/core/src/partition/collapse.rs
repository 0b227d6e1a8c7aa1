//! Transfer-matrix evaluation of gadget-substituted instances.
//!
//! Substituting a two-terminal gadget into every cycle edge of a vertex-cycle
//! expansion, or a path into every selected edge of a multigraph, multiplies
//! the instance size by the gadget order. Summing each gadget's internal
//! assignments in closed form instead yields a grid on the small graph whose
//! edges carry the gadget's signature matrix, so the collapsed evaluation
//! matches raw enumeration of the substituted graph exactly while its cost
//! stays exponential in the small graph only. Signature matrices are
//! palindromic products of symmetric factors, hence symmetric; the chain
//! signature at length 0 is the inverse compensation diagonal, which lets one
//! grid shape cover the extrapolated instance as well.

use crate::condense::Condensation;
use crate::error::{Error, Result};
use crate::graphs::{vertex_cycle_expansion, EdgeSelection, GHGrid, GridEdge, Multigraph};
use crate::numeric::RationalMatrix;
use crate::partition::{z_ghgrid_with_budget, PartitionValue, DEFAULT_TERM_BUDGET};

/// Signature of the length-`n` chain of p-thickened 2-stretched links on a
/// condensed pair: `B (D2p B)^(n-1)` with `B = (A' D2 A')^{hadamard p}`,
/// where `Dk` is the degree-k compensation diagonal. At `n = 0` this is the
/// inverse of `D2p`.
pub fn path_transfer_matrix(cond: &Condensation, p: u64, n: u64) -> Result<RationalMatrix> {
    if p == 0 {
        return Err(Error::Contract("chain signature needs p >= 1".into()));
    }
    let d2p = RationalMatrix::diagonal_from(&cond.degree_diagonal(2 * p));
    if n == 0 {
        return d2p.invert_diagonal();
    }
    let d2 = RationalMatrix::diagonal_from(&cond.degree_diagonal(2));
    let b = cond.a_prime.mat_mul(&d2)?.mat_mul(&cond.a_prime)?.hadamard_pow(p);
    let mut l = b.clone();
    for _ in 1..n {
        l = l.mat_mul(&d2p)?.mat_mul(&b)?;
    }
    Ok(l)
}

/// Signature of a path of `n` edges with internal vertex weights:
/// `A (D A)^(n-1)`, for `n >= 1`.
pub fn stretch_transfer_matrix(
    a: &RationalMatrix,
    d: &RationalMatrix,
    n: u64,
) -> Result<RationalMatrix> {
    if n == 0 {
        return Err(Error::Contract("path signature needs n >= 1".into()));
    }
    if !a.is_square() || !a.is_symmetric() {
        return Err(Error::Contract("edge weight matrix must be square symmetric".into()));
    }
    if !d.is_diagonal() || d.rows() != a.rows() {
        return Err(Error::Shape("vertex weights must be diagonal, same size".into()));
    }
    let da = d.mat_mul(a)?;
    let mut m = a.clone();
    for _ in 1..n {
        m = m.mat_mul(&da)?;
    }
    Ok(m)
}

/// Value of the degree-weighted partition function on the graph obtained by
/// substituting the length-`n` chain gadget into every cycle edge of the
/// vertex-cycle expansion of `g`, computed on the expansion itself.
///
/// `n = 0` evaluates the extrapolation target: diagonal cycle weights force
/// assignments constant along each cycle, which reproduces the redistributed
/// instance on `g`.
pub fn z_collapsed_bounded(
    g: &Multigraph,
    cond: &Condensation,
    p: u64,
    n: u64,
) -> Result<PartitionValue> {
    z_collapsed_bounded_with_budget(g, cond, p, n, DEFAULT_TERM_BUDGET)
}

pub fn z_collapsed_bounded_with_budget(
    g: &Multigraph,
    cond: &Condensation,
    p: u64,
    n: u64,
    budget: u128,
) -> Result<PartitionValue> {
    let structure = vertex_cycle_expansion(g)?;
    let l = path_transfer_matrix(cond, p, n)?;
    let d2p1 = RationalMatrix::diagonal_from(&cond.degree_diagonal(2 * p + 1));
    let pool = vec![l, cond.a_prime.clone(), d2p1];
    let slots = structure.graph.vertex_count();
    let mut edges = Vec::new();
    for &(u, v) in &structure.cycle_edges {
        edges.push(GridEdge::undirected(u, v, 0));
    }
    for &(u, v) in &structure.merged_edges {
        edges.push(GridEdge::undirected(u, v, 1));
    }
    let grid = GHGrid::new(cond.domain_size(), slots, pool, vec![2; slots], edges)?;
    z_ghgrid_with_budget(&grid, budget)
}

/// Value of the vertex-weighted partition function on the graph obtained by
/// stretching every selected edge copy of `g` into a path of `n` edges,
/// computed on `g` itself.
pub fn z_collapsed_stretch(
    g: &Multigraph,
    a: &RationalMatrix,
    d: &RationalMatrix,
    selection: &EdgeSelection,
    n: u64,
) -> Result<PartitionValue> {
    z_collapsed_stretch_with_budget(g, a, d, selection, n, DEFAULT_TERM_BUDGET)
}

pub fn z_collapsed_stretch_with_budget(
    g: &Multigraph,
    a: &RationalMatrix,
    d: &RationalMatrix,
    selection: &EdgeSelection,
    n: u64,
    budget: u128,
) -> Result<PartitionValue> {
    let m_n = stretch_transfer_matrix(a, d, n)?;
    let pool = vec![a.clone(), m_n, d.clone()];
    let mut edges = Vec::new();
    for ((u, v), mult) in g.edge_pairs() {
        let id = usize::from(selection.contains_pair(u, v));
        for _ in 0..mult {
            edges.push(GridEdge::undirected(u, v, id));
        }
    }
    for (v, count) in g.loop_counts() {
        let id = usize::from(selection.contains_loop(v));
        for _ in 0..count {
            edges.push(GridEdge::undirected(v, v, id));
        }
    }
    let grid =
        GHGrid::new(a.rows(), g.vertex_count(), pool, vec![2; g.vertex_count()], edges)?;
    z_ghgrid_with_budget(&grid, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::{build_weights, condense, family_from};
    use crate::graphs::{gadget_graph, stretch};
    use crate::numeric::{rat, rat_int};
    use crate::partition::{z_degree_weighted, z_vertex_weighted};

    fn mat(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect(),
        )
        .unwrap()
    }

    fn worked_condensation() -> Condensation {
        let a = mat(&[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3]]);
        condense(&a, &RationalMatrix::identity(3)).unwrap()
    }

    #[test]
    fn chain_signature_small_lengths() {
        let c = worked_condensation();
        // Degree-2 diagonal (5, 1); base B = A' diag(5,1) A' at p = 1.
        let b = mat(&[&[5, 0], &[0, 9]]);
        assert_eq!(path_transfer_matrix(&c, 1, 1).unwrap(), b);
        assert_eq!(
            path_transfer_matrix(&c, 1, 0).unwrap(),
            RationalMatrix::diagonal_from(&[rat(1, 5), rat_int(1)])
        );
        assert_eq!(
            path_transfer_matrix(&c, 1, 2).unwrap(),
            RationalMatrix::diagonal_from(&[rat_int(125), rat_int(81)])
        );
    }

    #[test]
    fn path_signature_small_lengths() {
        let a = mat(&[&[1, 2], &[2, 5]]);
        let d = RationalMatrix::diagonal_from(&[rat_int(2), rat_int(3)]);
        assert_eq!(stretch_transfer_matrix(&a, &d, 1).unwrap(), a);
        let ada = a.mat_mul(&d).unwrap().mat_mul(&a).unwrap();
        assert_eq!(stretch_transfer_matrix(&a, &d, 2).unwrap(), ada);
        assert_eq!(
            stretch_transfer_matrix(&a, &d, 3).unwrap(),
            ada.mat_mul(&d).unwrap().mat_mul(&a).unwrap()
        );
        assert!(stretch_transfer_matrix(&a, &d, 0).is_err());
    }

    #[test]
    fn collapsed_chain_matches_raw_substituted_graph() {
        let c = worked_condensation();
        let fam = family_from(&c);
        // Single edge at n = p = 1, double edge at n = 2, p = 1.
        let edge = Multigraph::from_edges(2, &[(0, 1)]);
        let mut doubled = Multigraph::new(2);
        doubled.add_edge_mult(0, 1, 2);
        for (g, n, p) in [(&edge, 1, 1), (&doubled, 2, 1), (&edge, 2, 2)] {
            let substituted = gadget_graph(g, n, p).unwrap();
            let raw = z_degree_weighted(&c.a_prime, &fam, &substituted).unwrap();
            let collapsed = z_collapsed_bounded(g, &c, p, n).unwrap();
            assert_eq!(collapsed.value, raw.value, "n={n} p={p}");
        }
    }

    #[test]
    fn collapsed_chain_at_length_zero_is_redistributed_instance() {
        let c = worked_condensation();
        for p in 1..=2 {
            let r = build_weights(&c, p).unwrap();
            for g in [
                Multigraph::from_edges(2, &[(0, 1)]),
                Multigraph::from_edges(3, &[(0, 1), (1, 2)]),
                Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]),
            ] {
                let direct = z_degree_weighted(&c.a_prime, &r.family, &g).unwrap();
                let collapsed = z_collapsed_bounded(&g, &c, p, 0).unwrap();
                assert_eq!(collapsed.value, direct.value, "p={p}");
            }
        }
    }

    #[test]
    fn collapsed_stretch_matches_raw_stretched_graph() {
        let a = mat(&[&[1, 2], &[2, 5]]);
        let d = RationalMatrix::diagonal_from(&[rat_int(2), rat_int(3)]);
        let mut g = Multigraph::new(3);
        g.add_edge_mult(0, 1, 2);
        g.add_edge_mult(1, 2, 1);
        g.add_loops(2, 1);
        for n in 1..=3u64 {
            let stretched = stretch(&g, &EdgeSelection::All, n).unwrap();
            let raw = z_vertex_weighted(&a, &d, &stretched).unwrap();
            let collapsed = z_collapsed_stretch(&g, &a, &d, &EdgeSelection::All, n).unwrap();
            assert_eq!(collapsed.value, raw.value, "n={n}");
        }
    }

    #[test]
    fn collapsed_stretch_at_length_one_is_plain_evaluation() {
        let a = mat(&[&[0, 1], &[1, 1]]);
        let d = RationalMatrix::diagonal_from(&[rat_int(1), rat_int(4)]);
        let mut g = Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        g.add_loops(0, 1);
        assert_eq!(
            z_collapsed_stretch(&g, &a, &d, &EdgeSelection::All, 1).unwrap().value,
            z_vertex_weighted(&a, &d, &g).unwrap().value
        );
    }

    #[test]
    fn collapsed_stretch_respects_partial_selection() {
        let a = mat(&[&[1, 2], &[2, 5]]);
        let d = RationalMatrix::diagonal_from(&[rat_int(2), rat_int(1)]);
        let mut g = Multigraph::from_edges(3, &[(0, 1), (1, 2)]);
        g.add_loops(0, 1);
        let selection = EdgeSelection::Chosen {
            pairs: [(0, 1)].into_iter().collect(),
            loops: [0].into_iter().collect(),
        };
        let stretched = stretch(&g, &selection, 3).unwrap();
        assert_eq!(
            z_collapsed_stretch(&g, &a, &d, &selection, 3).unwrap().value,
            z_vertex_weighted(&a, &d, &stretched).unwrap().value
        );
    }
}
