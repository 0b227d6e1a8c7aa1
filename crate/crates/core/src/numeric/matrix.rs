//! Dense matrices over the rationals.
//!
//! A [`RationalMatrix`] is immutable after construction; the constructors
//! compute the symmetry / diagonality / nonnegativity flags once so hot
//! paths can branch on them without rescanning entries. Determinant and
//! rank use fraction-free (Bareiss) elimination over scaled integer rows,
//! which keeps intermediate entries polynomially bounded instead of letting
//! naive rational elimination blow up.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{rat_pow, Rational};
use crate::error::{Error, Result};

/// Immutable dense matrix with `Rational` entries, row-major storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
    symmetric: bool,
    diagonal: bool,
    nonnegative: bool,
}

impl RationalMatrix {
    /// Build from explicit rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let entries: Vec<Rational> = rows.into_iter().flatten().collect();
        Ok(Self::from_flat(r, c, entries))
    }

    /// Build an `r x c` matrix from a generator over (row, col).
    pub fn from_fn(r: usize, c: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                entries.push(f(i, j));
            }
        }
        Self::from_flat(r, c, entries)
    }

    fn from_flat(rows: usize, cols: usize, entries: Vec<Rational>) -> Self {
        debug_assert_eq!(entries.len(), rows * cols);
        let mut m = Self {
            rows,
            cols,
            entries,
            symmetric: false,
            diagonal: false,
            nonnegative: false,
        };
        m.recompute_flags();
        m
    }

    fn recompute_flags(&mut self) {
        let square = self.rows == self.cols;
        self.symmetric = square
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)));
        self.diagonal = square
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| i == j || self.at(i, j).is_zero()));
        self.nonnegative = self.entries.iter().all(|e| !e.is_negative());
    }

    /// `n x n` identity.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// All-zero `r x c` matrix.
    pub fn zeros(r: usize, c: usize) -> Self {
        Self::from_fn(r, c, |_, _| Rational::zero())
    }

    /// Square matrix with the given diagonal and zeros elsewhere.
    pub fn diagonal_from(diag: &[Rational]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                diag[i].clone()
            } else {
                Rational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// Entry reference (panics out of range; bounds are the caller's job).
    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    /// Owned copy of an entry.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.at(i, j).clone()
    }

    /// Owned copy of the diagonal (square matrices).
    pub fn diagonal_entries(&self) -> Vec<Rational> {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.entry(i, i)).collect()
    }

    /// Row `i` as a fresh vector.
    pub fn row(&self, i: usize) -> Vec<Rational> {
        (0..self.cols).map(|j| self.entry(i, j)).collect()
    }

    /// Column `j` as a fresh vector.
    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.entry(i, j)).collect()
    }

    /// True when every entry of the matrix is zero.
    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Largest absolute value over all entries (zero for empty matrices).
    pub fn max_abs(&self) -> Rational {
        let mut best = Rational::zero();
        for e in &self.entries {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Matrix product; shapes must be compatible.
    pub fn mat_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    if !self.at(i, k).is_zero() && !other.at(k, j).is_zero() {
                        acc += self.at(i, k) * other.at(k, j);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(Self::from_flat(self.rows, other.cols, entries))
    }

    /// Entrywise (Hadamard) `p`-th power; `p = 0` gives the all-ones matrix.
    pub fn hadamard_pow(&self, p: u64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| rat_pow(self.at(i, j), p))
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.entry(j, i))
    }

    /// Scale every entry by `c`.
    pub fn scalar_mul(&self, c: &Rational) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    /// Inverse of a diagonal matrix; errors on any zero diagonal entry.
    pub fn invert_diagonal(&self) -> Result<Self> {
        if !self.is_diagonal() {
            return Err(Error::Contract("invert_diagonal needs a diagonal matrix".into()));
        }
        for i in 0..self.rows {
            if self.at(i, i).is_zero() {
                return Err(Error::Contract(format!(
                    "diagonal entry {i} is zero; not invertible"
                )));
            }
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self.at(i, i).recip()
            } else {
                Rational::zero()
            }
        }))
    }

    /// Principal submatrix keeping the given (strictly increasing) indices.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        Self::from_fn(keep.len(), keep.len(), |i, j| self.entry(keep[i], keep[j]))
    }

    /// Exact determinant by fraction-free elimination; square matrices only.
    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(Rational::one());
        }
        let (int_rows, row_scales) = self.integer_rows();
        let det_int = bareiss_det(int_rows);
        // det(A) = det(scaled) / prod(row scales)
        let mut denom = BigInt::one();
        for s in row_scales {
            denom *= s;
        }
        Ok(Rational::new(det_int, denom))
    }

    /// Exact rank by fraction-free elimination with full pivoting.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let (int_rows, _) = self.integer_rows();
        bareiss_rank(int_rows)
    }

    /// Clear denominators row by row: returns integer rows plus the positive
    /// scale factor applied to each row.
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut out = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut lcm = BigInt::one();
            for j in 0..self.cols {
                lcm = lcm.lcm(self.at(i, j).denom());
            }
            let row = (0..self.cols)
                .map(|j| {
                    let e = self.at(i, j);
                    e.numer() * (&lcm / e.denom())
                })
                .collect();
            out.push(row);
            scales.push(lcm);
        }
        (out, scales)
    }
}

// ---- Fraction-free elimination kernels ----

/// Bareiss determinant of a square integer matrix. Every division below is
/// exact; intermediate entries stay bounded by minors of the input.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let last = std::mem::take(&mut m[n - 1][n - 1]);
    if sign < 0 {
        -last
    } else {
        last
    }
}

/// Rank of an integer matrix via Bareiss elimination with full pivoting.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut r = 0;
    let mut c = 0;
    while r < rows && c < cols {
        // Full pivot search over the remaining block.
        let mut pivot = None;
        'scan: for i in r..rows {
            for j in c..cols {
                if !m[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(r, pi);
        if pj != c {
            for row in m.iter_mut() {
                row.swap(c, pj);
            }
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = num / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        rank += 1;
        r += 1;
        c += 1;
    }
    rank
}
