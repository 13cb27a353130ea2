//! Dense linear algebra over F_2 with bit-packed rows: rank, nullspace,
//! linear solve, block composition, and the Guttman/Schur rank identity.
//!
//! Matrices are immutable values; every operation returns a fresh result, so
//! they can be shared freely across scan workers.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    DimensionMismatch { expected: usize, got: usize },
    NotInvertible,
}

impl fmt::Display for Gf2Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gf2Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Gf2Error::NotInvertible => write!(f, "matrix is singular over F_2"),
        }
    }
}

impl std::error::Error for Gf2Error {}

/// A vector over F_2, packed 64 bits to the word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn from_bits(bits: &[bool]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        if b {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of set bits.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Parity of the intersection with another vector (dot product over F_2).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A dense matrix over F_2 with bit-packed rows. The 0 x 0 matrix is valid.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> BitMatrix {
        let words_per_row = cols.div_ceil(64);
        BitMatrix { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    pub fn identity(n: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds an r x c matrix from a bit-valued function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> BitMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        BitMatrix::from_fn(r, c, |i, j| rows[i][j] != 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.words_per_row + j / 64];
        if b {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> BitVec {
        let mut v = BitVec::zeros(self.cols);
        v.words
            .copy_from_slice(&self.data[i * self.words_per_row..(i + 1) * self.words_per_row]);
        v
    }

    fn row_xor(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words_per_row;
        if dst > src {
            let (head, tail) = self.data.split_at_mut(dst * w);
            let s = &head[src * w..src * w + w];
            for (d, s) in tail[..w].iter_mut().zip(s) {
                *d ^= s;
            }
        } else {
            let (head, tail) = self.data.split_at_mut(src * w);
            let d = &mut head[dst * w..dst * w + w];
            for (d, s) in d.iter_mut().zip(&tail[..w]) {
                *d ^= s;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.words_per_row {
            self.data.swap(i * self.words_per_row + k, j * self.words_per_row + k);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise XOR (= sum over F_2).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d ^= s;
        }
        Ok(out)
    }

    /// Matrix product over F_2: xor the rows of `other` selected by each row of self.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let dst = i * out.words_per_row;
                    let src = k * other.words_per_row;
                    for w in 0..out.words_per_row {
                        out.data[dst + w] ^= other.data[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, Gf2Error> {
        if self.cols != v.len {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, got: v.len });
        }
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            out.set(i, self.row(i).dot(v));
        }
        Ok(out)
    }

    /// Row echelon reduction in place; returns the pivot columns in order.
    /// Rows below each pivot and, with `reduce_up`, above it are cleared.
    fn eliminate(&mut self, reduce_up: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                let lower = i > r;
                let upper = reduce_up && i < r;
                if (lower || upper) && self.get(i, c) {
                    self.row_xor(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Row rank by Gaussian elimination. The input is not mutated.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.eliminate(false).len()
    }

    /// A canonical basis of the right null space {v : Mv = 0}.
    ///
    /// Basis vectors come from the reduced echelon form, one per free column in
    /// ascending column order, so the output is deterministic.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let mut work = self.clone();
        let pivots = work.eliminate(true);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (r, &c) in pivots.iter().enumerate() {
                if work.get(r, free) {
                    v.set(c, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves Mx = b, returning the canonical solution with all free variables
    /// zero, or None if the system is inconsistent.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>, Gf2Error> {
        if b.len != self.rows {
            return Err(Gf2Error::DimensionMismatch { expected: self.rows, got: b.len });
        }
        // Augment with b as an extra column and reduce.
        let mut work = BitMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                b.get(i)
            }
        });
        let pivots = work.eliminate(true);
        if pivots.last() == Some(&self.cols) {
            return Ok(None); // pivot in the augmented column: inconsistent
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if work.get(r, self.cols) {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// Inverse of a square matrix, by Gauss-Jordan on [M | I].
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        let n = self.rows;
        if n != self.cols {
            return Err(Gf2Error::DimensionMismatch { expected: n, got: self.cols });
        }
        let mut work = BitMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j)
            } else {
                i == j - n
            }
        });
        let pivots = work.eliminate(true);
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Gf2Error::NotInvertible);
        }
        Ok(BitMatrix::from_fn(n, n, |i, j| work.get(i, j + n)))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", if self.get(i, j) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Concatenates a 2 x 2 grid of blocks into one matrix.
pub fn block_assemble(blocks: [[&BitMatrix; 2]; 2]) -> Result<BitMatrix, Gf2Error> {
    let [[a, b], [c, d]] = blocks;
    if a.rows != b.rows {
        return Err(Gf2Error::DimensionMismatch { expected: a.rows, got: b.rows });
    }
    if c.rows != d.rows {
        return Err(Gf2Error::DimensionMismatch { expected: c.rows, got: d.rows });
    }
    if a.cols != c.cols {
        return Err(Gf2Error::DimensionMismatch { expected: a.cols, got: c.cols });
    }
    if b.cols != d.cols {
        return Err(Gf2Error::DimensionMismatch { expected: b.cols, got: d.cols });
    }
    let rows = a.rows + c.rows;
    let cols = a.cols + b.cols;
    Ok(BitMatrix::from_fn(rows, cols, |i, j| match (i < a.rows, j < a.cols) {
        (true, true) => a.get(i, j),
        (true, false) => b.get(i, j - a.cols),
        (false, true) => c.get(i - a.rows, j),
        (false, false) => d.get(i - a.rows, j - a.cols),
    }))
}

/// Rank of [[C1, C2], [C3, C4]] via the Schur complement: when C1 is invertible
/// the rank equals rank(C1) + rank(C4 - C3 C1^{-1} C2).
pub fn schur_rank(
    c1: &BitMatrix,
    c2: &BitMatrix,
    c3: &BitMatrix,
    c4: &BitMatrix,
) -> Result<usize, Gf2Error> {
    let inv = c1.inverse()?;
    if c2.rows != c1.rows {
        return Err(Gf2Error::DimensionMismatch { expected: c1.rows, got: c2.rows });
    }
    if c3.cols != c1.cols {
        return Err(Gf2Error::DimensionMismatch { expected: c1.cols, got: c3.cols });
    }
    let complement = c4.add(&c3.mul(&inv)?.mul(c2)?)?;
    Ok(c1.rank() + complement.rank())
}
