//! Vertex-cycle expansion: replace every vertex of a multigraph by a cycle
//! whose length is the vertex degree, then reconnect the original edges
//! between cycle vertices ("merged" edges).
//!
//! Each vertex `u` of degree d contributes d cycle slots, one per edge end
//! incident to `u`. The expanded graph has 2|E| vertices, one cycle edge list
//! entry per cycle step (a degree-1 vertex yields a loop, a degree-2 vertex a
//! doubled edge), and exactly |E| merged edges, one per original edge copy.
//!
//! Slot numbering is deterministic: vertex `u`'s slots are the contiguous
//! range starting at the sum of smaller vertices' degrees, consumed in sorted
//! edge order, so expansion is reproducible across runs and platforms.
//!
//! `gadget_graph` substitutes an edge gadget for every cycle edge, which is
//! how the degree-bounded oracle instances are built: the result has
//! 2n(p+1)|E| vertices, (4np+1)|E| edges, and maximum degree 2p+1.

use crate::error::{Error, Result};
use crate::graphs::{embed_edge_gadget, path_gadget, Multigraph};

/// The expansion of a multigraph, with its cycle/merged edge bookkeeping.
#[derive(Debug, Clone)]
pub struct CycleStructure {
    /// The expanded multigraph (cycle edges plus merged edges).
    pub graph: Multigraph,
    /// Slot lists per source vertex, in cycle order.
    pub cycles: Vec<Vec<usize>>,
    /// Every cycle step as an ordered list entry; `(s, s)` is a loop.
    pub cycle_edges: Vec<(usize, usize)>,
    /// One entry per original edge copy, joining a slot of each endpoint.
    pub merged_edges: Vec<(usize, usize)>,
    /// Source vertex of each slot.
    pub slot_source: Vec<usize>,
}

/// Expand every vertex of `g` into a cycle of its degree.
pub fn vertex_cycle_expansion(g: &Multigraph) -> Result<CycleStructure> {
    if !g.is_loopless() {
        return Err(Error::Contract("vertex-cycle expansion requires a loopless graph".into()));
    }
    if !g.isolated_vertices().is_empty() {
        return Err(Error::Contract(
            "vertex-cycle expansion requires a graph without isolated vertices".into(),
        ));
    }

    let n = g.vertex_count();
    let degrees: Vec<usize> = g.degrees().into_iter().map(|d| d as usize).collect();
    let mut base = vec![0usize; n];
    for v in 1..n {
        base[v] = base[v - 1] + degrees[v - 1];
    }
    let slot_total: usize = degrees.iter().sum();

    // Hand each edge copy one fresh slot at either endpoint, in sorted order.
    let mut next_slot = base.clone();
    let mut merged_edges = Vec::with_capacity(g.edge_count() as usize);
    for ((u, v), mult) in g.edge_pairs() {
        for _ in 0..mult {
            let su = next_slot[u];
            next_slot[u] += 1;
            let sv = next_slot[v];
            next_slot[v] += 1;
            merged_edges.push((su, sv));
        }
    }

    let mut cycles = Vec::with_capacity(n);
    let mut cycle_edges = Vec::new();
    let mut slot_source = vec![0usize; slot_total];
    for v in 0..n {
        let slots: Vec<usize> = (base[v]..base[v] + degrees[v]).collect();
        for &s in &slots {
            slot_source[s] = v;
        }
        match slots.len() {
            1 => cycle_edges.push((slots[0], slots[0])),
            d => {
                for i in 0..d {
                    cycle_edges.push((slots[i], slots[(i + 1) % d]));
                }
            }
        }
        cycles.push(slots);
    }

    let mut graph = Multigraph::new(slot_total);
    for &(a, b) in &cycle_edges {
        graph.add_edge_mult(a, b, 1);
    }
    for &(a, b) in &merged_edges {
        graph.add_edge_mult(a, b, 1);
    }

    Ok(CycleStructure { graph, cycles, cycle_edges, merged_edges, slot_source })
}

/// Substitute a path gadget for every cycle edge of the expansion of `g`.
pub fn gadget_graph(g: &Multigraph, n: u64, p: u64) -> Result<Multigraph> {
    let structure = vertex_cycle_expansion(g)?;
    let gadget = path_gadget(n, p)?;
    let mut out = Multigraph::new(structure.slot_source.len());
    for &(a, b) in &structure.cycle_edges {
        embed_edge_gadget(&mut out, &gadget, a, b);
    }
    for &(a, b) in &structure.merged_edges {
        out.add_edge_mult(a, b, 1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::isomorphic_small;

    #[test]
    fn single_edge_expands_to_two_loops_and_one_merged_edge() {
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        let s = vertex_cycle_expansion(&g).unwrap();
        assert_eq!(s.graph.vertex_count(), 2);
        assert_eq!(s.cycle_edges, vec![(0, 0), (1, 1)]);
        assert_eq!(s.merged_edges, vec![(0, 1)]);
        assert_eq!(s.graph.loop_count(0), 1);
        assert_eq!(s.graph.loop_count(1), 1);
    }

    #[test]
    fn triangle_expands_to_six_vertices_three_merged_edges() {
        let g = Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let s = vertex_cycle_expansion(&g).unwrap();
        assert_eq!(s.graph.vertex_count(), 6);
        assert_eq!(s.merged_edges.len(), 3);
        // Degree-2 vertices become doubled edges: cycle steps (a,b) and (b,a).
        assert_eq!(s.cycle_edges.len(), 6);
        for slots in &s.cycles {
            assert_eq!(slots.len(), 2);
            assert_eq!(s.graph.edge_multiplicity(slots[0], slots[1]), 2);
        }
    }

    #[test]
    fn double_edge_expands_to_four_vertices() {
        let mut g = Multigraph::new(2);
        g.add_edge_mult(0, 1, 2);
        let s = vertex_cycle_expansion(&g).unwrap();
        assert_eq!(s.graph.vertex_count(), 4);
        assert_eq!(s.merged_edges.len(), 2);
        assert_eq!(s.cycle_edges.len(), 4);
    }

    #[test]
    fn expansion_rejects_loops_and_isolated_vertices() {
        let mut looped = Multigraph::new(1);
        looped.add_loops(0, 1);
        assert!(vertex_cycle_expansion(&looped).is_err());

        let isolated = Multigraph::from_edges(3, &[(0, 1)]);
        assert!(vertex_cycle_expansion(&isolated).is_err());
    }

    #[test]
    fn gadget_graph_counts_match_closed_forms() {
        // Single edge, n = p = 1: the two loops each pick up one midpoint.
        let e = Multigraph::from_edges(2, &[(0, 1)]);
        let g11 = gadget_graph(&e, 1, 1).unwrap();
        assert_eq!(g11.vertex_count(), 4);
        assert_eq!(g11.edge_count(), 5);
        assert!(!g11.is_simple());

        // Triangle, n = 2, p = 1.
        let tri = Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let g21 = gadget_graph(&tri, 2, 1).unwrap();
        assert_eq!(g21.vertex_count(), 24);
        assert_eq!(g21.edge_count(), 27);
        assert!(g21.is_simple());

        // Closed forms across a small sweep; simplicity whenever min degree >= 2.
        for (n, p) in [(1u64, 1u64), (1, 2), (2, 1), (2, 2), (3, 2)] {
            for (g, min_deg) in [
                (Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]), 2usize),
                (Multigraph::from_edges(3, &[(0, 1), (1, 2)]), 1),
                (
                    {
                        let mut d = Multigraph::new(2);
                        d.add_edge_mult(0, 1, 2);
                        d
                    },
                    2,
                ),
            ] {
                let edges = g.edge_count();
                let built = gadget_graph(&g, n, p).unwrap();
                assert_eq!(built.vertex_count() as u64, 2 * n * (p + 1) * edges);
                assert_eq!(built.edge_count(), (4 * n * p + 1) * edges);
                assert!(built.max_degree() <= 2 * p + 1);
                assert!(built.is_loopless());
                if min_deg >= 2 || n >= 2 {
                    assert!(built.is_simple(), "n={n} p={p} should be simple");
                }
            }
        }
    }

    #[test]
    fn gadget_graph_max_degree_is_attained_at_cycle_slots() {
        let tri = Multigraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let built = gadget_graph(&tri, 2, 3).unwrap();
        assert_eq!(built.max_degree(), 7);
        let s = vertex_cycle_expansion(&tri).unwrap();
        for slot in 0..s.graph.vertex_count() {
            assert_eq!(built.degree(slot), 7);
        }
    }

    #[test]
    fn gadget_graph_agrees_with_manual_substitution() {
        // Independent by-hand build of the n=2, p=1 instance for a path of
        // two edges. Each n=2, p=1 gadget is a plain path of four edges, so
        // splice x - a - j - b - y for every cycle step and compare.
        let path = Multigraph::from_edges(3, &[(0, 1), (1, 2)]);
        let auto = gadget_graph(&path, 2, 1).unwrap();

        // Slots: vertex 0 -> {0}, vertex 1 -> {1, 2}, vertex 2 -> {3}.
        let steps = [(0usize, 0usize), (1, 2), (2, 1), (3, 3)];
        let mut manual = Multigraph::new(4);
        for &(x, y) in &steps {
            let a = manual.add_vertex();
            let j = manual.add_vertex();
            let b = manual.add_vertex();
            manual.add_edge_mult(x, a, 1);
            manual.add_edge_mult(a, j, 1);
            manual.add_edge_mult(j, b, 1);
            manual.add_edge_mult(b, y, 1);
        }
        manual.add_edge_mult(0, 1, 1);
        manual.add_edge_mult(2, 3, 1);

        assert!(isomorphic_small(&auto, &manual));
        assert_eq!(auto.vertex_count(), 16);
        assert_eq!(auto.edge_count(), 18);
    }
}
