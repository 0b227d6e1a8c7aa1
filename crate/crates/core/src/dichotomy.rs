//! Tractability classification of weight matrices, with machine-checkable
//! witnesses.
//!
//! Three classifiers share one verdict type:
//!
//! * [`is_block_rank1`] — a nonnegative symmetric matrix is on the tractable
//!   side iff its support decomposes into rectangular blocks each of rank 1;
//! * [`classify_pair`] — same criterion after striking the indices whose
//!   vertex weight is zero;
//! * [`classify_zero_one`] — the 0-1 specialization: every support component must
//!   be an isolated vertex, a reflexive complete graph, or an irreflexive
//!   complete bipartite graph. Agrees with [`is_block_rank1`] on 0-1 input.
//!
//! Every negative verdict carries indices that re-validate by direct entry
//! inspection; positive verdicts carry the block decomposition itself. All
//! indices are 0-based and refer to the original (unstruck) matrix.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::RationalMatrix;

// ---- Support decomposition ----

/// One block of a rectangular support decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportBlock {
    /// Index set `T` whose support must fill all of `T x T` (the component
    /// carries a loop or an odd closed walk).
    Loop(Vec<usize>),
    /// Sides `(P, Q)` whose support must fill `(P x Q) u (Q x P)` exactly.
    Bipartite(Vec<usize>, Vec<usize>),
}

impl SupportBlock {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            SupportBlock::Loop(t) => t.clone(),
            SupportBlock::Bipartite(p, q) => {
                let mut all: Vec<usize> = p.iter().chain(q.iter()).copied().collect();
                all.sort_unstable();
                all
            }
        }
    }
}

/// Rectangular decomposition of a support: blocks plus all-zero rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockStructure {
    pub blocks: Vec<SupportBlock>,
    /// Indices whose rows are entirely zero.
    pub residual: Vec<usize>,
}

/// Outcome of the rectangularity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rectangularity {
    Rectangular(BlockStructure),
    /// `zero_at` is an entry the claimed block requires to be positive;
    /// `anchor` is a positive entry of the same component that forces the
    /// block's type (for a loop-type block: an entry whose endpoints share
    /// 2-coloring parity, e.g. a diagonal entry).
    NotRectangular {
        zero_at: (usize, usize),
        anchor: (usize, usize),
    },
}

fn validate_nonneg_symmetric(a: &RationalMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("matrix is {}x{}", a.rows(), a.cols())));
    }
    if !a.is_symmetric() {
        return Err(Error::Contract("classification requires a symmetric matrix".into()));
    }
    if !a.is_nonnegative() {
        return Err(Error::Contract("classification requires nonnegative entries".into()));
    }
    Ok(())
}

/// Support components of a symmetric matrix (edge `i~j` iff the entry is
/// nonzero), excluding all-zero rows. Returns `(components, residual)`.
fn support_components(a: &RationalMatrix) -> (Vec<Vec<usize>>, Vec<usize>) {
    let m = a.rows();
    let live: Vec<usize> = (0..m)
        .filter(|&i| (0..m).any(|j| !a.at(i, j).is_zero()))
        .collect();
    let residual: Vec<usize> = (0..m)
        .filter(|&i| (0..m).all(|j| a.at(i, j).is_zero()))
        .collect();

    let mut seen = vec![false; m];
    let mut components = Vec::new();
    for &start in &live {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(i) = queue.pop() {
            for j in 0..m {
                if !seen[j] && !a.at(i, j).is_zero() {
                    seen[j] = true;
                    comp.push(j);
                    queue.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    (components, residual)
}

/// 2-color a support component by breadth-first traversal.
/// Returns parities aligned with `comp`, plus the first positive entry whose
/// endpoints share a parity (which makes the component loop-type), if any.
fn two_color(a: &RationalMatrix, comp: &[usize]) -> (Vec<u8>, Option<(usize, usize)>) {
    let pos_of = |v: usize| comp.iter().position(|&x| x == v).expect("vertex in component");
    let mut color = vec![u8::MAX; comp.len()];
    color[0] = 0;
    let mut queue = vec![comp[0]];
    while let Some(i) = queue.pop() {
        let ci = color[pos_of(i)];
        for &j in comp {
            if !a.at(i, j).is_zero() && color[pos_of(j)] == u8::MAX {
                color[pos_of(j)] = 1 - ci;
                queue.push(j);
            }
        }
    }
    let mut anchor = None;
    'outer: for (pi, &i) in comp.iter().enumerate() {
        for (pj, &j) in comp.iter().enumerate().skip(pi) {
            if !a.at(i, j).is_zero() && color[pi] == color[pj] {
                anchor = Some((i, j));
                break 'outer;
            }
        }
    }
    (color, anchor)
}

/// Decompose the support of a nonnegative symmetric matrix into rectangular
/// blocks, or exhibit a witness entry that no decomposition can cover.
pub fn support_blocks(a: &RationalMatrix) -> Result<Rectangularity> {
    validate_nonneg_symmetric(a)?;
    let (components, residual) = support_components(a);

    let mut blocks = Vec::new();
    for comp in components {
        let (color, anchor) = two_color(a, &comp);
        if let Some(anchor) = anchor {
            // Loop type: support must fill comp x comp.
            for (pi, &i) in comp.iter().enumerate() {
                for &j in comp.iter().skip(pi) {
                    if a.at(i, j).is_zero() {
                        return Ok(Rectangularity::NotRectangular { zero_at: (i, j), anchor });
                    }
                }
            }
            blocks.push(SupportBlock::Loop(comp));
        } else {
            // Bipartite type: support must fill (P x Q) u (Q x P).
            let p: Vec<usize> = comp
                .iter()
                .zip(&color)
                .filter(|(_, &c)| c == 0)
                .map(|(&v, _)| v)
                .collect();
            let q: Vec<usize> = comp
                .iter()
                .zip(&color)
                .filter(|(_, &c)| c == 1)
                .map(|(&v, _)| v)
                .collect();
            // Any positive entry of a live row crosses the bipartition here
            // (a same-side positive entry would have made the type loop), so
            // it witnesses the bipartite type. (p[0], q[0]) itself may be a
            // required-but-missing entry, so anchor on an actual positive.
            let anchor_col = (0..a.cols())
                .find(|&j| !a.at(p[0], j).is_zero())
                .expect("live row has a positive entry");
            let anchor = (p[0], anchor_col);
            for &i in &p {
                for &j in &q {
                    if a.at(i, j).is_zero() {
                        return Ok(Rectangularity::NotRectangular { zero_at: (i, j), anchor });
                    }
                }
            }
            blocks.push(SupportBlock::Bipartite(p, q));
        }
    }
    Ok(Rectangularity::Rectangular(BlockStructure { blocks, residual }))
}

// ---- Verdicts ----

/// Grounds for a verdict; negative reasons carry inspection witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    /// Tractable: rectangular support, every block of rank one.
    BlockRankOne(BlockStructure),
    /// Hard: no rectangular decomposition covers the support.
    NotRectangular {
        zero_at: (usize, usize),
        anchor: (usize, usize),
    },
    /// Hard: a block contains a 2x2 submatrix with nonzero determinant.
    RankTwoBlock {
        rows: (usize, usize),
        cols: (usize, usize),
    },
    /// 0-1 classification: per-component findings.
    ZeroOneComponents(Vec<ComponentClass>),
}

/// Classification outcome; `struck` lists indices removed for zero vertex
/// weight before the criterion was applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub tractable: bool,
    pub struck: Vec<usize>,
    pub reason: Reason,
}

/// Decide block-rank-1 for a nonnegative symmetric matrix.
pub fn is_block_rank1(a: &RationalMatrix) -> Result<Verdict> {
    let structure = match support_blocks(a)? {
        Rectangularity::NotRectangular { zero_at, anchor } => {
            return Ok(Verdict {
                tractable: false,
                struck: vec![],
                reason: Reason::NotRectangular { zero_at, anchor },
            });
        }
        Rectangularity::Rectangular(s) => s,
    };
    for block in &structure.blocks {
        let (rows, cols) = match block {
            SupportBlock::Loop(t) => (t.clone(), t.clone()),
            SupportBlock::Bipartite(p, q) => (p.clone(), q.clone()),
        };
        if let Some((ri, rj, ck, cl)) = rank_exceeds_one(a, &rows, &cols) {
            return Ok(Verdict {
                tractable: false,
                struck: vec![],
                reason: Reason::RankTwoBlock { rows: (ri, rj), cols: (ck, cl) },
            });
        }
    }
    Ok(Verdict {
        tractable: true,
        struck: vec![],
        reason: Reason::BlockRankOne(structure),
    })
}

/// If the submatrix `rows x cols` of `a` has rank > 1, return a witness
/// `(row, row, col, col)` whose 2x2 minor is nonzero. Entries inside a block
/// are all positive, so proportionality against the first row decides rank.
fn rank_exceeds_one(
    a: &RationalMatrix,
    rows: &[usize],
    cols: &[usize],
) -> Option<(usize, usize, usize, usize)> {
    let r0 = rows[0];
    let c0 = cols[0];
    for &r in &rows[1..] {
        for &c in &cols[1..] {
            let minor = a.entry(r0, c0) * a.entry(r, c) - a.entry(r0, c) * a.entry(r, c0);
            if !minor.is_zero() {
                return Some((r0, r, c0, c));
            }
        }
    }
    None
}

/// Classify a (matrix, vertex-weight) pair: strike indices with zero weight,
/// then test block-rank-1 on the surviving principal submatrix. All reported
/// indices refer to the original matrix.
pub fn classify_pair(a: &RationalMatrix, d: &RationalMatrix) -> Result<Verdict> {
    validate_nonneg_symmetric(a)?;
    if !d.is_diagonal() || d.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "vertex weights must be diagonal of size {}, got {}x{}",
            a.rows(),
            d.rows(),
            d.cols()
        )));
    }
    if !d.is_nonnegative() {
        return Err(Error::Contract("vertex weights must be nonnegative".into()));
    }
    let keep: Vec<usize> = (0..a.rows()).filter(|&i| !d.at(i, i).is_zero()).collect();
    let struck: Vec<usize> = (0..a.rows()).filter(|&i| d.at(i, i).is_zero()).collect();
    let sub = a.principal_submatrix(&keep);
    let mut verdict = is_block_rank1(&sub)?;
    verdict.struck = struck;
    verdict.reason = relabel_reason(verdict.reason, &keep);
    Ok(verdict)
}

/// Map submatrix indices in a reason back to original matrix indices.
fn relabel_reason(reason: Reason, keep: &[usize]) -> Reason {
    let map = |i: usize| keep[i];
    match reason {
        Reason::BlockRankOne(s) => Reason::BlockRankOne(BlockStructure {
            blocks: s
                .blocks
                .into_iter()
                .map(|b| match b {
                    SupportBlock::Loop(t) => {
                        SupportBlock::Loop(t.into_iter().map(map).collect())
                    }
                    SupportBlock::Bipartite(p, q) => SupportBlock::Bipartite(
                        p.into_iter().map(map).collect(),
                        q.into_iter().map(map).collect(),
                    ),
                })
                .collect(),
            residual: s.residual.into_iter().map(map).collect(),
        }),
        Reason::NotRectangular { zero_at, anchor } => Reason::NotRectangular {
            zero_at: (map(zero_at.0), map(zero_at.1)),
            anchor: (map(anchor.0), map(anchor.1)),
        },
        Reason::RankTwoBlock { rows, cols } => Reason::RankTwoBlock {
            rows: (map(rows.0), map(rows.1)),
            cols: (map(cols.0), map(cols.1)),
        },
        Reason::ZeroOneComponents(c) => Reason::ZeroOneComponents(c),
    }
}

// ---- 0-1 specialization ----

/// How one support component of a 0-1 matrix fails its required shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentDefect {
    /// This entry must be 1 for the component to have the claimed shape.
    MissingEntry(usize, usize),
    /// A positive entry joining two indices of equal 2-coloring parity in a
    /// loopless component (an odd closed walk), ruling out bipartiteness.
    SameSideEdge(usize, usize),
}

/// Shape of one support component of a 0-1 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentKind {
    IsolatedVertex,
    ReflexiveComplete,
    CompleteBipartite { left: Vec<usize>, right: Vec<usize> },
    Irregular(ComponentDefect),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentClass {
    pub indices: Vec<usize>,
    pub kind: ComponentKind,
}

/// Classify a symmetric 0-1 matrix: tractable iff every support component is
/// an isolated vertex, a reflexive complete graph, or an irreflexive complete
/// bipartite graph.
pub fn classify_zero_one(a: &RationalMatrix) -> Result<Verdict> {
    validate_nonneg_symmetric(a)?;
    let one = crate::numeric::rat_int(1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !a.at(i, j).is_zero() && a.at(i, j) != &one {
                return Err(Error::Contract(format!(
                    "0-1 classification given entry {} at ({i}, {j})",
                    a.at(i, j)
                )));
            }
        }
    }

    let (components, residual) = support_components(a);
    let mut classes: Vec<ComponentClass> = residual
        .into_iter()
        .map(|i| ComponentClass { indices: vec![i], kind: ComponentKind::IsolatedVertex })
        .collect();

    for comp in components {
        let kind = classify_component(a, &comp);
        classes.push(ComponentClass { indices: comp, kind });
    }
    classes.sort_by_key(|c| c.indices[0]);

    let tractable = classes.iter().all(|c| !matches!(c.kind, ComponentKind::Irregular(_)));
    Ok(Verdict {
        tractable,
        struck: vec![],
        reason: Reason::ZeroOneComponents(classes),
    })
}

fn classify_component(a: &RationalMatrix, comp: &[usize]) -> ComponentKind {
    let has_loop = comp.iter().any(|&i| !a.at(i, i).is_zero());
    if has_loop {
        // Reflexive complete: every entry of comp x comp must be 1.
        for (pi, &i) in comp.iter().enumerate() {
            for &j in comp.iter().skip(pi) {
                if a.at(i, j).is_zero() {
                    return ComponentKind::Irregular(ComponentDefect::MissingEntry(i, j));
                }
            }
        }
        return ComponentKind::ReflexiveComplete;
    }
    // Loopless: must be complete bipartite.
    let (color, same_side) = two_color(a, comp);
    if let Some((i, j)) = same_side {
        return ComponentKind::Irregular(ComponentDefect::SameSideEdge(i, j));
    }
    let left: Vec<usize> = comp
        .iter()
        .zip(&color)
        .filter(|(_, &c)| c == 0)
        .map(|(&v, _)| v)
        .collect();
    let right: Vec<usize> = comp
        .iter()
        .zip(&color)
        .filter(|(_, &c)| c == 1)
        .map(|(&v, _)| v)
        .collect();
    for &i in &left {
        for &j in &right {
            if a.at(i, j).is_zero() {
                return ComponentKind::Irregular(ComponentDefect::MissingEntry(i, j));
            }
        }
    }
    ComponentKind::CompleteBipartite { left, right }
}
