//! Seeded random generators shared by the integration suites. Everything is
//! deterministic: a fixed seed reproduces the exact instance list.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use zhom::graphs::Multigraph;
use zhom::numeric::{rat, rat_int, Rational, RationalMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational with numerator in `lo..=hi` and denominator in `1..=3`.
pub fn rand_rational(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(r.random_range(lo..=hi), r.random_range(1..=3))
}

/// Nonnegative symmetric matrix; roughly `zero_odds` in 6 entries are zero.
pub fn rand_nonneg_symmetric(r: &mut ChaCha8Rng, m: usize, zero_odds: u32) -> RationalMatrix {
    let mut rows = vec![vec![rat_int(0); m]; m];
    for i in 0..m {
        for j in i..m {
            let x = if r.random_range(0..6) < zero_odds {
                rat_int(0)
            } else {
                rand_rational(r, 1, 6)
            };
            rows[i][j] = x.clone();
            rows[j][i] = x;
        }
    }
    RationalMatrix::from_rows(rows).expect("square")
}

/// Symmetric matrix with entries of either sign (possibly zero).
pub fn rand_symmetric(r: &mut ChaCha8Rng, m: usize) -> RationalMatrix {
    let mut rows = vec![vec![rat_int(0); m]; m];
    for i in 0..m {
        for j in i..m {
            let x = rand_rational(r, -4, 4);
            rows[i][j] = x.clone();
            rows[j][i] = x;
        }
    }
    RationalMatrix::from_rows(rows).expect("square")
}

pub fn rand_positive_diagonal(r: &mut ChaCha8Rng, m: usize) -> RationalMatrix {
    let d: Vec<Rational> = (0..m).map(|_| rand_rational(r, 1, 5)).collect();
    RationalMatrix::diagonal_from(&d)
}

/// Diagonal with nonnegative entries, some of them zero.
pub fn rand_nonneg_diagonal(r: &mut ChaCha8Rng, m: usize) -> RationalMatrix {
    let d: Vec<Rational> = (0..m)
        .map(|_| {
            if r.random_range(0..4) == 0 {
                rat_int(0)
            } else {
                rand_rational(r, 1, 5)
            }
        })
        .collect();
    RationalMatrix::diagonal_from(&d)
}

/// Random multigraph with up to `max_v` vertices and `max_e` edge copies
/// (loops included when `loops` is set).
pub fn rand_multigraph(r: &mut ChaCha8Rng, max_v: usize, max_e: u64, loops: bool) -> Multigraph {
    let v = r.random_range(1..=max_v);
    let mut g = Multigraph::new(v);
    let e = r.random_range(0..=max_e);
    for _ in 0..e {
        if loops && r.random_range(0..4) == 0 {
            g.add_loops(r.random_range(0..v), 1);
        } else if v >= 2 {
            let a = r.random_range(0..v);
            let mut b = r.random_range(0..v);
            while b == a {
                b = r.random_range(0..v);
            }
            g.add_edge_mult(a, b, 1);
        } else if loops {
            g.add_loops(0, 1);
        }
    }
    g
}

/// Condensable instance: an `m x m` nonnegative symmetric matrix built as a
/// multiplier expansion of a positive-diagonal-free `s x s` core, so at least
/// one merge happens whenever `m > s`, together with a positive diagonal.
/// The core has no zero rows, so no index is struck.
pub fn rand_condensable(
    r: &mut ChaCha8Rng,
    max_m: usize,
    max_s: usize,
) -> (RationalMatrix, RationalMatrix) {
    let s = r.random_range(1..=max_s);
    let m = r.random_range(s..=max_m.max(s));
    // Core: nonnegative symmetric, every row nonzero.
    let core = loop {
        let c = rand_nonneg_symmetric(r, s, 2);
        let no_zero_row = (0..s).all(|i| (0..s).any(|j| !c.at(i, j).eq(&rat_int(0))));
        if no_zero_row {
            break c;
        }
    };
    // Assign each of the m indices a core group and a positive multiplier.
    let group: Vec<usize> = (0..m)
        .map(|i| if i < s { i } else { r.random_range(0..s) })
        .collect();
    let mu: Vec<Rational> = (0..m).map(|_| rand_rational(r, 1, 4)).collect();
    let mut rows = vec![vec![rat_int(0); m]; m];
    for i in 0..m {
        for j in 0..m {
            rows[i][j] = &mu[i] * &mu[j] * core.at(group[i], group[j]);
        }
    }
    let a = RationalMatrix::from_rows(rows).expect("square");
    let d = rand_positive_diagonal(r, m);
    (a, d)
}

/// Tractable-by-construction pair: indices partitioned into rank-one loop
/// blocks, rank-one bipartite blocks, and zero rows; vertex weights
/// nonnegative with occasional zeros.
pub fn rand_tractable_pair(
    r: &mut ChaCha8Rng,
    max_m: usize,
) -> (RationalMatrix, RationalMatrix) {
    let m = r.random_range(1..=max_m);
    let mut rows = vec![vec![rat_int(0); m]; m];
    let mut unassigned: Vec<usize> = (0..m).collect();
    while !unassigned.is_empty() {
        let take = r.random_range(1..=unassigned.len());
        let block: Vec<usize> = unassigned.drain(..take).collect();
        match r.random_range(0..3) {
            // Zero rows.
            0 => {}
            // Loop block: entries w_i * w_j on block x block.
            1 => {
                let w: Vec<Rational> =
                    block.iter().map(|_| rand_rational(r, 1, 4)).collect();
                for (bi, &i) in block.iter().enumerate() {
                    for (bj, &j) in block.iter().enumerate() {
                        rows[i][j] = &w[bi] * &w[bj];
                    }
                }
            }
            // Bipartite block: entries only across a split of the block.
            _ => {
                if block.len() < 2 {
                    // A 1-index bipartite block is impossible; make it a loop.
                    rows[block[0]][block[0]] = rand_rational(r, 1, 4);
                    continue;
                }
                let cut = r.random_range(1..block.len());
                let (p, q) = block.split_at(cut);
                let wp: Vec<Rational> = p.iter().map(|_| rand_rational(r, 1, 4)).collect();
                let wq: Vec<Rational> = q.iter().map(|_| rand_rational(r, 1, 4)).collect();
                for (pi, &i) in p.iter().enumerate() {
                    for (qi, &j) in q.iter().enumerate() {
                        let x = &wp[pi] * &wq[qi];
                        rows[i][j] = x.clone();
                        rows[j][i] = x;
                    }
                }
            }
        }
    }
    let a = RationalMatrix::from_rows(rows).expect("square");
    let d = rand_nonneg_diagonal(r, m);
    (a, d)
}
