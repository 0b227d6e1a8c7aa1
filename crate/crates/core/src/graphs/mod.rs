//! Multigraphs and the gadget constructions used by the reductions.
//!
//! A [`Multigraph`] is undirected, with explicit edge multiplicities and a
//! separate loop count per vertex. Degree counts each incident edge copy
//! once and each loop twice. All containers are ordered maps, so every
//! traversal — and therefore every construction built on top — is
//! deterministic.
//!
//! The gadget builders follow two composition identities the tests verify
//! structurally (by explicit isomorphism check on small instances):
//!
//! * [`path_gadget`]`(n, p)` is the 2-stretch of the p-thickening of the
//!   n-stretch of a single edge;
//! * [`ring_gadget`]`(d, n, p)` is a d-cycle with every edge replaced by a
//!   copy of `path_gadget(n, p)`, plus one dangling stub per hub vertex.

pub mod cycle;
pub mod grid;

pub use cycle::{gadget_graph, vertex_cycle_expansion, CycleStructure};
pub use grid::{GHGrid, GridEdge};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Undirected multigraph with loop counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    /// Multiplicity per unordered pair, keyed with `u < v`.
    edges: BTreeMap<(usize, usize), u64>,
    /// Loop count per vertex.
    loops: BTreeMap<usize, u64>,
}

impl Multigraph {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: BTreeMap::new(),
            loops: BTreeMap::new(),
        }
    }

    /// Convenience: unit-multiplicity edges (repeats accumulate); a pair
    /// `(v, v)` adds a loop.
    pub fn from_edges(vertex_count: usize, pairs: &[(usize, usize)]) -> Self {
        let mut g = Self::new(vertex_count);
        for &(u, v) in pairs {
            g.add_edge_mult(u, v, 1);
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    /// Add `mult` parallel copies of edge `{u, v}`; `u == v` adds loops.
    pub fn add_edge_mult(&mut self, u: usize, v: usize, mult: u64) {
        assert!(u < self.vertex_count && v < self.vertex_count, "vertex out of range");
        if mult == 0 {
            return;
        }
        if u == v {
            *self.loops.entry(u).or_insert(0) += mult;
        } else {
            let key = (u.min(v), u.max(v));
            *self.edges.entry(key).or_insert(0) += mult;
        }
    }

    pub fn add_loops(&mut self, v: usize, count: u64) {
        assert!(v < self.vertex_count, "vertex out of range");
        if count > 0 {
            *self.loops.entry(v).or_insert(0) += count;
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Iterate `((u, v), multiplicity)` with `u < v`, ascending.
    pub fn edge_pairs(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    /// Iterate `(vertex, loop count)`, ascending.
    pub fn loop_counts(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.loops.iter().map(|(&v, &c)| (v, c))
    }

    pub fn edge_multiplicity(&self, u: usize, v: usize) -> u64 {
        if u == v {
            return self.loop_count(u);
        }
        let key = (u.min(v), u.max(v));
        self.edges.get(&key).copied().unwrap_or(0)
    }

    pub fn loop_count(&self, v: usize) -> u64 {
        self.loops.get(&v).copied().unwrap_or(0)
    }

    /// Total edge count with multiplicity; each loop counts once.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum::<u64>() + self.loops.values().sum::<u64>()
    }

    /// Degree: incident edge copies once each, loops twice each.
    pub fn degree(&self, v: usize) -> u64 {
        let mut d = 2 * self.loop_count(v);
        for (&(a, b), &m) in &self.edges {
            if a == v || b == v {
                d += m;
            }
        }
        d
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.vertex_count];
        for (&(a, b), &m) in &self.edges {
            d[a] += m;
            d[b] += m;
        }
        for (&v, &c) in &self.loops {
            d[v] += 2 * c;
        }
        d
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_loopless(&self) -> bool {
        self.loops.is_empty()
    }

    /// Simple: loopless with all multiplicities equal to one.
    pub fn is_simple(&self) -> bool {
        self.is_loopless() && self.edges.values().all(|&m| m == 1)
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Drop isolated vertices, renumbering the rest consecutively.
    /// Returns the reduced graph and the number removed.
    pub fn without_isolated(&self) -> (Multigraph, usize) {
        let degs = self.degrees();
        let mut map = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if degs[v] > 0 {
                map[v] = next;
                next += 1;
            }
        }
        let mut g = Multigraph::new(next);
        for (&(u, v), &m) in &self.edges {
            g.add_edge_mult(map[u], map[v], m);
        }
        for (&v, &c) in &self.loops {
            g.add_loops(map[v], c);
        }
        (g, self.vertex_count - next)
    }

    /// Connected components as sorted vertex lists (singletons included).
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut c = x;
            while parent[c] != r {
                let next = parent[c];
                parent[c] = r;
                c = next;
            }
            r
        }
        for (&(u, v), _) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Canonical text form (digests, diagnostics).
    pub fn canonical_string(&self) -> String {
        let mut s = format!("graph {};edges:", self.vertex_count);
        for (&(u, v), &m) in &self.edges {
            s.push_str(&format!("{u}-{v}x{m},"));
        }
        s.push_str(";loops:");
        for (&v, &c) in &self.loops {
            s.push_str(&format!("{v}x{c},"));
        }
        s
    }
}

/// Which edges a transformation applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeSelection {
    /// Every edge and every loop.
    All,
    /// Explicit pair set (all copies of a listed pair) and loop vertex set.
    Chosen {
        pairs: BTreeSet<(usize, usize)>,
        loops: BTreeSet<usize>,
    },
}

impl EdgeSelection {
    pub fn contains_pair(&self, u: usize, v: usize) -> bool {
        match self {
            EdgeSelection::All => true,
            EdgeSelection::Chosen { pairs, .. } => pairs.contains(&(u.min(v), u.max(v))),
        }
    }

    pub fn contains_loop(&self, v: usize) -> bool {
        match self {
            EdgeSelection::All => true,
            EdgeSelection::Chosen { loops, .. } => loops.contains(&v),
        }
    }
}

// ---- Whole-edge transformations ----

/// Replace each selected edge copy by `p` parallel copies (loops become `p`
/// loops). `p >= 1`.
pub fn thicken(g: &Multigraph, selection: &EdgeSelection, p: u64) -> Result<Multigraph> {
    if p == 0 {
        return Err(Error::Contract("thickening needs p >= 1".into()));
    }
    let mut out = Multigraph::new(g.vertex_count());
    for ((u, v), m) in g.edge_pairs() {
        let factor = if selection.contains_pair(u, v) { p } else { 1 };
        out.add_edge_mult(u, v, m * factor);
    }
    for (v, c) in g.loop_counts() {
        let factor = if selection.contains_loop(v) { p } else { 1 };
        out.add_loops(v, c * factor);
    }
    Ok(out)
}

/// Replace each selected edge copy by a path of `r` edges through `r - 1`
/// fresh vertices; each selected loop copy becomes a closed walk of length
/// `r` through `r - 1` fresh vertices. `r >= 1` (`r = 1` is the identity).
pub fn stretch(g: &Multigraph, selection: &EdgeSelection, r: u64) -> Result<Multigraph> {
    if r == 0 {
        return Err(Error::Contract("stretching needs r >= 1".into()));
    }
    let mut out = Multigraph::new(g.vertex_count());
    for ((u, v), m) in g.edge_pairs() {
        if selection.contains_pair(u, v) && r > 1 {
            for _ in 0..m {
                add_path(&mut out, u, v, r);
            }
        } else {
            out.add_edge_mult(u, v, m);
        }
    }
    for (v, c) in g.loop_counts() {
        if selection.contains_loop(v) && r > 1 {
            for _ in 0..c {
                add_path(&mut out, v, v, r);
            }
        } else {
            out.add_loops(v, c);
        }
    }
    Ok(out)
}

/// Walk of `r` edges from `u` to `v` through `r - 1` fresh vertices.
/// With `u == v` and `r = 2` this honestly produces a doubled edge.
fn add_path(out: &mut Multigraph, u: usize, v: usize, r: u64) {
    let mut prev = u;
    for _ in 0..r - 1 {
        let mid = out.add_vertex();
        out.add_edge_mult(prev, mid, 1);
        prev = mid;
    }
    out.add_edge_mult(prev, v, 1);
}

// ---- Gadgets ----

/// A graph with two distinguished endpoint vertices.
#[derive(Debug, Clone)]
pub struct EdgeGadget {
    pub graph: Multigraph,
    pub source: usize,
    pub sink: usize,
}

/// The two-terminal interpolation gadget: `n` segments in series between the
/// endpoints, each segment being `p` parallel length-2 paths.
///
/// Equivalently: 2-stretch of the p-thickening of the n-stretch of one edge.
/// Sizes: `n(p+1) + 1` vertices, `2np` edges, internal degrees at most `2p`.
pub fn path_gadget(n: u64, p: u64) -> Result<EdgeGadget> {
    if n == 0 || p == 0 {
        return Err(Error::Contract("path gadget needs n, p >= 1".into()));
    }
    let n_us = usize::try_from(n).expect("gadget parameter overflow");
    let mut g = Multigraph::new(n_us + 1);
    // Anchor k sits at: 0 -> source, n -> sink, otherwise junction k.
    let anchor = |k: usize| -> usize {
        if k == 0 {
            0
        } else if k == n_us {
            1
        } else {
            k + 1
        }
    };
    for k in 0..n_us {
        let a = anchor(k);
        let b = anchor(k + 1);
        for _ in 0..p {
            let mid = g.add_vertex();
            g.add_edge_mult(a, mid, 1);
            g.add_edge_mult(mid, b, 1);
        }
    }
    Ok(EdgeGadget {
        graph: g,
        source: 0,
        sink: if n_us == 0 { 0 } else { anchor(n_us) },
    })
}

/// Copy `gadget` into `host` identifying its source with `u` and sink with
/// `v`; internal vertices become fresh host vertices.
pub fn embed_edge_gadget(host: &mut Multigraph, gadget: &EdgeGadget, u: usize, v: usize) {
    let mut map: Vec<Option<usize>> = vec![None; gadget.graph.vertex_count()];
    map[gadget.source] = Some(u);
    map[gadget.sink] = Some(v);
    let resolve = |host: &mut Multigraph, map: &mut Vec<Option<usize>>, x: usize| -> usize {
        if let Some(m) = map[x] {
            m
        } else {
            let fresh = host.add_vertex();
            map[x] = Some(fresh);
            fresh
        }
    };
    for ((a, b), m) in gadget.graph.edge_pairs() {
        let ma = resolve(host, &mut map, a);
        let mb = resolve(host, &mut map, b);
        host.add_edge_mult(ma, mb, m);
    }
    for (x, c) in gadget.graph.loop_counts() {
        let mx = resolve(host, &mut map, x);
        host.add_loops(mx, c);
    }
}

/// A `d`-cycle of [`path_gadget`]s with one dangling stub per hub vertex.
#[derive(Debug, Clone)]
pub struct RingGadget {
    /// The materialized core (stubs are bookkeeping only, not vertices).
    pub graph: Multigraph,
    /// Hub vertices carrying one dangling stub each.
    pub hubs: Vec<usize>,
}

impl RingGadget {
    /// Edge count including the dangling stubs.
    pub fn edge_count_with_stubs(&self) -> u64 {
        self.graph.edge_count() + self.hubs.len() as u64
    }
}

/// Ring gadget: hubs `F_1..F_d` on a cycle whose `d` edges are each replaced
/// by a copy of `path_gadget(n, p)`. A degenerate cycle is honored: `d = 2`
/// gives two gadget copies between the same hubs, `d = 1` one copy with both
/// endpoints on the single hub.
///
/// Sizes: `d*n*(p+1)` vertices; `(2np + 1) * d` edges counting stubs.
pub fn ring_gadget(d: u64, n: u64, p: u64) -> Result<RingGadget> {
    if d == 0 || n == 0 || p == 0 {
        return Err(Error::Contract("ring gadget needs d, n, p >= 1".into()));
    }
    let d_us = usize::try_from(d).expect("gadget parameter overflow");
    let gadget = path_gadget(n, p)?;
    let mut g = Multigraph::new(d_us);
    for i in 0..d_us {
        let u = i;
        let v = (i + 1) % d_us;
        embed_edge_gadget(&mut g, &gadget, u, v);
    }
    Ok(RingGadget {
        graph: g,
        hubs: (0..d_us).collect(),
    })
}

// ---- Stretching a multigraph into a simple graph ----

/// Result of [`stretch_to_simple`].
#[derive(Debug, Clone)]
pub struct StretchedGraph {
    pub graph: Multigraph,
    /// The stretched edge set: every copy of every parallel pair, plus all loops.
    pub selection: EdgeSelection,
    /// Number of stretched edge copies (`t` in the interpolation system).
    pub stretched_copies: u64,
}

/// Stretch every parallel edge copy and every loop of `g` into a length-`n`
/// path / closed walk, leaving single edges untouched.
///
/// For `n >= 2` the result is loopless; it is additionally simple provided
/// `n >= 3` whenever `g` has loops (a 2-stretched loop is a doubled edge).
pub fn stretch_to_simple(g: &Multigraph, n: u64) -> Result<StretchedGraph> {
    if n < 2 {
        return Err(Error::Contract("simple-stretching needs n >= 2".into()));
    }
    let mut pairs = BTreeSet::new();
    let mut t = 0u64;
    for ((u, v), m) in g.edge_pairs() {
        if m >= 2 {
            pairs.insert((u, v));
            t += m;
        }
    }
    let mut loop_set = BTreeSet::new();
    for (v, c) in g.loop_counts() {
        loop_set.insert(v);
        t += c;
    }
    let selection = EdgeSelection::Chosen {
        pairs,
        loops: loop_set,
    };
    let graph = stretch(g, &selection, n)?;
    Ok(StretchedGraph {
        graph,
        selection,
        stretched_copies: t,
    })
}

// ---- Small-instance isomorphism (verification helper) ----

/// Exact isomorphism test by backtracking, for small graphs only (both
/// sides at most 16 vertices; larger inputs panic). Used by tests to check
/// gadget composition identities; not a general-purpose isomorphism solver.
pub fn isomorphic_small(a: &Multigraph, b: &Multigraph) -> bool {
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.edges.len() != b.edges.len()
    {
        return false;
    }
    let n = a.vertex_count();
    assert!(n <= 16, "isomorphic_small is for small graphs (got {n} vertices)");
    let mut da: Vec<(u64, u64)> = (0..n).map(|v| (a.degree(v), a.loop_count(v))).collect();
    let mut db: Vec<(u64, u64)> = (0..n).map(|v| (b.degree(v), b.loop_count(v))).collect();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }

    // Map vertices of `a` in decreasing degree order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(a.degree(v)));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn assign(
        a: &Multigraph,
        b: &Multigraph,
        order: &[usize],
        pos: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for w in 0..b.vertex_count() {
            if used[w]
                || b.degree(w) != a.degree(v)
                || b.loop_count(w) != a.loop_count(v)
            {
                continue;
            }
            let consistent = order[..pos].iter().all(|&u| {
                a.edge_multiplicity(u, v) == b.edge_multiplicity(map[u], w)
            });
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if assign(a, b, order, pos + 1, map, used) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }

    assign(a, b, &order, 0, &mut map, &mut used)
}
