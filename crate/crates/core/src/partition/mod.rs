//! Exact partition-function evaluators.
//!
//! Four variants share one enumeration core: plain edge weights, constant
//! vertex weights, degree-indexed vertex-weight families, and grids whose
//! edges and vertices carry individually assigned matrices. Edge
//! multiplicities are evaluated as entry powers, never repeated factors, and
//! a loop reads the diagonal entry of its matrix, with the loop adding 2 to
//! its vertex's degree.
//!
//! Raw enumeration costs domain^|V| assignments; every evaluator checks that
//! count against a term budget (default [`DEFAULT_TERM_BUDGET`]) before
//! touching the sum, and refuses larger instances with a budget error. The
//! assignment space is split into fixed-size chunks evaluated in parallel;
//! chunk partials are combined in index order, so the value — and the
//! reported term count — never depend on thread schedule.

pub mod collapse;

pub use collapse::{
    path_transfer_matrix, stretch_transfer_matrix, z_collapsed_bounded,
    z_collapsed_bounded_with_budget, z_collapsed_stretch, z_collapsed_stretch_with_budget,
};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{EdgeGadget, GHGrid, Multigraph};
use crate::numeric::{rat_pow, Rational, RationalMatrix};

/// Default cap on enumerated assignments.
pub const DEFAULT_TERM_BUDGET: u128 = 200_000_000;

/// Assignments per parallel work unit.
const CHUNK: u64 = 4096;

/// An exact partition-function value plus the number of assignments summed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionValue {
    pub value: Rational,
    pub term_count: u128,
}

// ---- Degree-indexed vertex-weight families ----

/// A family of diagonal vertex-weight matrices indexed by vertex degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeWeightFamily {
    /// Diagonals listed per degree `0..=max`; degrees beyond the list error.
    Explicit(Vec<Vec<Rational>>),
    /// Closed form from a condensation: entry i of the degree-k diagonal is
    /// `sum_j alpha[i][j] * mu[i][j]^k`. All parameters positive.
    Condensed {
        alpha: Vec<Vec<Rational>>,
        mu: Vec<Vec<Rational>>,
    },
    /// Power family: entry j of the degree-k diagonal is `w[j]^k`; the
    /// degree-0 diagonal is exactly the identity.
    Power(Vec<Rational>),
}

impl DegreeWeightFamily {
    /// Family that is the same diagonal at every degree.
    pub fn constant(diag: &[Rational]) -> Self {
        DegreeWeightFamily::Condensed {
            alpha: diag.iter().map(|d| vec![d.clone()]).collect(),
            mu: diag.iter().map(|_| vec![Rational::one()]).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        match self {
            DegreeWeightFamily::Explicit(list) => list.first().map_or(0, |d| d.len()),
            DegreeWeightFamily::Condensed { alpha, .. } => alpha.len(),
            DegreeWeightFamily::Power(w) => w.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DegreeWeightFamily::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::Contract("explicit family lists no degrees".into()));
                }
                let n = list[0].len();
                if list.iter().any(|d| d.len() != n) {
                    return Err(Error::Shape("explicit family diagonals differ in size".into()));
                }
            }
            DegreeWeightFamily::Condensed { alpha, mu } => {
                if alpha.len() != mu.len() {
                    return Err(Error::Shape("condensed family tables differ in size".into()));
                }
                for (ai, mi) in alpha.iter().zip(mu) {
                    if ai.len() != mi.len() || ai.is_empty() {
                        return Err(Error::Shape("condensed family rows differ in size".into()));
                    }
                    if ai.iter().any(|x| x <= &Rational::zero())
                        || mi.iter().any(|x| x <= &Rational::zero())
                    {
                        return Err(Error::Contract(
                            "condensed family parameters must be positive".into(),
                        ));
                    }
                }
            }
            DegreeWeightFamily::Power(_) => {}
        }
        Ok(())
    }

    /// The degree-`k` diagonal.
    pub fn diag_at(&self, k: u64) -> Result<Vec<Rational>> {
        match self {
            DegreeWeightFamily::Explicit(list) => {
                list.get(usize::try_from(k).unwrap_or(usize::MAX)).cloned().ok_or_else(|| {
                    Error::Contract(format!(
                        "explicit family covers degrees up to {}, asked for {k}",
                        list.len() - 1
                    ))
                })
            }
            DegreeWeightFamily::Condensed { alpha, mu } => Ok(alpha
                .iter()
                .zip(mu)
                .map(|(ai, mi)| {
                    ai.iter().zip(mi).map(|(a, m)| a * rat_pow(m, k)).sum::<Rational>()
                })
                .collect()),
            DegreeWeightFamily::Power(w) => Ok(w.iter().map(|wj| rat_pow(wj, k)).collect()),
        }
    }
}

// ---- Enumeration core ----

/// One multiplicative edge term: endpoints, weight matrix, entry power.
type EdgeTerm<'a> = (usize, usize, &'a RationalMatrix, u64);

fn required_terms(domain: usize, vertices: usize) -> u128 {
    (domain as u128)
        .checked_pow(u32::try_from(vertices).unwrap_or(u32::MAX))
        .unwrap_or(u128::MAX)
}

/// Sum the assignment weights of an instance with `domain^vertex_count`
/// assignments, edge factors `matrix[xi(u), xi(v)]^power`, and per-vertex
/// diagonal factors.
fn enumerate(
    domain: usize,
    vertex_count: usize,
    edge_terms: &[EdgeTerm<'_>],
    vertex_diags: &[Vec<Rational>],
    budget: u128,
) -> Result<PartitionValue> {
    let required = required_terms(domain, vertex_count);
    let budget = budget.min(u64::MAX as u128);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let total = required as u64;

    let weigh = |xi: &[usize]| -> Rational {
        let mut w = Rational::one();
        for &(u, v, mat, pow) in edge_terms {
            let entry = mat.at(xi[u], xi[v]);
            if entry.is_zero() {
                return Rational::zero();
            }
            if pow == 1 {
                w *= entry;
            } else {
                w *= rat_pow(entry, pow);
            }
        }
        for (v, diag) in vertex_diags.iter().enumerate() {
            let dv = &diag[xi[v]];
            if dv.is_zero() {
                return Rational::zero();
            }
            w *= dv;
        }
        w
    };

    let chunk_count = total.div_ceil(CHUNK).max(1);
    let partials: Vec<Rational> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(total);
            // Mixed-radix decode of the chunk start, then increment in place.
            let mut xi = vec![0usize; vertex_count];
            let mut t = start;
            for digit in xi.iter_mut() {
                *digit = (t % domain as u64) as usize;
                t /= domain as u64;
            }
            let mut local = Rational::zero();
            for _ in start..end {
                local += weigh(&xi);
                for digit in xi.iter_mut() {
                    *digit += 1;
                    if *digit < domain {
                        break;
                    }
                    *digit = 0;
                }
            }
            local
        })
        .collect();

    let value = partials.into_iter().fold(Rational::zero(), |acc, x| acc + x);
    Ok(PartitionValue { value, term_count: required })
}

fn validate_square_symmetric(a: &RationalMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("edge matrix is {}x{}", a.rows(), a.cols())));
    }
    if !a.is_symmetric() {
        return Err(Error::Contract("edge weight matrix must be symmetric".into()));
    }
    Ok(())
}

fn multigraph_terms<'a>(a: &'a RationalMatrix, g: &Multigraph) -> Vec<EdgeTerm<'a>> {
    let mut terms = Vec::new();
    for ((u, v), mult) in g.edge_pairs() {
        terms.push((u, v, a, mult));
    }
    for (v, count) in g.loop_counts() {
        terms.push((v, v, a, count));
    }
    terms
}

// ---- The four evaluators ----

/// Plain partition function: edge weights only.
pub fn z_plain(a: &RationalMatrix, g: &Multigraph) -> Result<PartitionValue> {
    z_plain_with_budget(a, g, DEFAULT_TERM_BUDGET)
}

pub fn z_plain_with_budget(
    a: &RationalMatrix,
    g: &Multigraph,
    budget: u128,
) -> Result<PartitionValue> {
    validate_square_symmetric(a)?;
    let terms = multigraph_terms(a, g);
    enumerate(a.rows(), g.vertex_count(), &terms, &[], budget)
}

/// Partition function with one constant vertex-weight diagonal.
pub fn z_vertex_weighted(
    a: &RationalMatrix,
    d: &RationalMatrix,
    g: &Multigraph,
) -> Result<PartitionValue> {
    z_vertex_weighted_with_budget(a, d, g, DEFAULT_TERM_BUDGET)
}

pub fn z_vertex_weighted_with_budget(
    a: &RationalMatrix,
    d: &RationalMatrix,
    g: &Multigraph,
    budget: u128,
) -> Result<PartitionValue> {
    validate_square_symmetric(a)?;
    if !d.is_diagonal() || d.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "vertex weights must be diagonal of size {}, got {}x{}",
            a.rows(),
            d.rows(),
            d.cols()
        )));
    }
    let terms = multigraph_terms(a, g);
    let diag = d.diagonal_entries();
    let vertex_diags = vec![diag; g.vertex_count()];
    enumerate(a.rows(), g.vertex_count(), &terms, &vertex_diags, budget)
}

/// Partition function whose vertex weights depend on vertex degree.
pub fn z_degree_weighted(
    a: &RationalMatrix,
    fam: &DegreeWeightFamily,
    g: &Multigraph,
) -> Result<PartitionValue> {
    z_degree_weighted_with_budget(a, fam, g, DEFAULT_TERM_BUDGET)
}

pub fn z_degree_weighted_with_budget(
    a: &RationalMatrix,
    fam: &DegreeWeightFamily,
    g: &Multigraph,
    budget: u128,
) -> Result<PartitionValue> {
    validate_square_symmetric(a)?;
    fam.validate()?;
    if fam.domain_size() != a.rows() {
        return Err(Error::Shape(format!(
            "family domain {} does not match matrix size {}",
            fam.domain_size(),
            a.rows()
        )));
    }
    let terms = multigraph_terms(a, g);
    let vertex_diags: Vec<Vec<Rational>> = g
        .degrees()
        .into_iter()
        .map(|deg| fam.diag_at(deg))
        .collect::<Result<_>>()?;
    enumerate(a.rows(), g.vertex_count(), &terms, &vertex_diags, budget)
}

/// Partition function of a grid: per-edge matrices, per-vertex diagonals.
pub fn z_ghgrid(grid: &GHGrid) -> Result<PartitionValue> {
    z_ghgrid_with_budget(grid, DEFAULT_TERM_BUDGET)
}

pub fn z_ghgrid_with_budget(grid: &GHGrid, budget: u128) -> Result<PartitionValue> {
    let terms: Vec<EdgeTerm<'_>> = grid
        .edges()
        .iter()
        .map(|e| (e.u, e.v, grid.pool_matrix(e.matrix), 1))
        .collect();
    let vertex_diags: Vec<Vec<Rational>> = (0..grid.vertex_count())
        .map(|v| grid.vertex_weight(v).diagonal_entries())
        .collect();
    enumerate(grid.domain(), grid.vertex_count(), &terms, &vertex_diags, budget)
}

// ---- Edge-gadget signatures ----

/// The effective edge-weight matrix of a two-terminal gadget: entry (i, j)
/// sums over all assignments of the internal vertices with the endpoints
/// pinned to (i, j); endpoint vertex weights are excluded.
pub fn edge_signature(
    gadget: &EdgeGadget,
    a: &RationalMatrix,
    d: &RationalMatrix,
) -> Result<RationalMatrix> {
    validate_square_symmetric(a)?;
    if !d.is_diagonal() || d.rows() != a.rows() {
        return Err(Error::Shape("vertex weights must be diagonal, same size".into()));
    }
    let m = a.rows();
    let g = &gadget.graph;
    let internals: Vec<usize> =
        (0..g.vertex_count()).filter(|&x| x != gadget.source && x != gadget.sink).collect();
    let required =
        required_terms(m, internals.len()).saturating_mul(required_terms(m, 2));
    if required > DEFAULT_TERM_BUDGET {
        return Err(Error::BudgetExceeded { required, budget: DEFAULT_TERM_BUDGET });
    }

    // Position of each gadget vertex in the internal assignment vector.
    let mut slot = vec![usize::MAX; g.vertex_count()];
    for (k, &x) in internals.iter().enumerate() {
        slot[x] = k;
    }
    let diag = d.diagonal_entries();
    let terms = multigraph_terms(a, g);

    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let value_of = |x: usize, xi: &[usize]| -> usize {
                if x == gadget.source {
                    i
                } else if x == gadget.sink {
                    j
                } else {
                    xi[slot[x]]
                }
            };
            let mut sum = Rational::zero();
            let mut xi = vec![0usize; internals.len()];
            let total = required_terms(m, internals.len()) as u64;
            for _ in 0..total {
                let mut w = Rational::one();
                for &(u, v, mat, pow) in &terms {
                    let entry = mat.at(value_of(u, &xi), value_of(v, &xi));
                    if entry.is_zero() {
                        w = Rational::zero();
                        break;
                    }
                    w *= rat_pow(entry, pow);
                }
                if !w.is_zero() {
                    for &x in &internals {
                        w *= &diag[xi[slot[x]]];
                    }
                    sum += w;
                }
                for digit in xi.iter_mut() {
                    *digit += 1;
                    if *digit < m {
                        break;
                    }
                    *digit = 0;
                }
            }
            row.push(sum);
        }
        rows.push(row);
    }
    RationalMatrix::from_rows(rows)
}
