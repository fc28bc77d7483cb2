//! Dense matrices over the two-element field, rows packed into `u64` words.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::matrix::IntegerMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        F2Matrix { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Reduction mod 2 of an integer matrix.
    pub fn from_integer(m: &IntegerMatrix) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, m[(i, j)].is_odd());
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if b {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    fn xor_row_into(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let s = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    /// Row echelon form in place; returns the pivot columns.
    fn eliminate(&mut self, companion: Option<&mut F2Matrix>) -> Vec<usize> {
        let mut companion = companion;
        let mut pivots = Vec::new();
        let mut p = 0;
        for j in 0..self.cols {
            if p == self.rows {
                break;
            }
            let Some(pi) = (p..self.rows).find(|&i| self.get(i, j)) else { continue };
            self.swap_rows(p, pi);
            if let Some(c) = companion.as_deref_mut() {
                c.swap_rows(p, pi);
            }
            for i in 0..self.rows {
                if i != p && self.get(i, j) {
                    self.xor_row_into(i, p);
                    if let Some(c) = companion.as_deref_mut() {
                        c.xor_row_into(i, p);
                    }
                }
            }
            pivots.push(j);
            p += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(None).len()
    }

    pub fn inverse(&self) -> Option<F2Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let mut a = self.clone();
        let mut inv = F2Matrix::identity(self.rows);
        (a.eliminate(Some(&mut inv)).len() == self.rows).then_some(inv)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, rhs: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in F2 product");
        let mut out = F2Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    for w in 0..out.words {
                        out.data[i * out.words + w] ^= rhs.data[k * rhs.words + w];
                    }
                }
            }
        }
        out
    }

    /// Row vector `x * self` for `x` given as a bitmask over rows (rows <= 64).
    pub fn row_combination(&self, mask: u64) -> Vec<u64> {
        let mut acc = vec![0u64; self.words];
        for i in 0..self.rows.min(64) {
            if (mask >> i) & 1 == 1 {
                for (a, b) in acc.iter_mut().zip(self.row_words(i)) {
                    *a ^= b;
                }
            }
        }
        acc
    }

    pub fn to_nested(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) as u8).collect()).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == F2Matrix::identity(self.rows) && self.rows == self.cols
    }
}

impl std::fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F2Matrix {:?}", self.to_nested())
    }
}

/// Parity of a big integer as a field element.
pub fn parity(x: &BigInt) -> bool {
    x.is_odd()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_reduced_integer_matrix() {
        // I + T for the permutation block reduces to the all-ones 2x2, rank 1.
        let m = IntegerMatrix::from_rows(&[[1, 1], [1, 1]]);
        assert_eq!(F2Matrix::from_integer(&m).rank(), 1);
        let m = IntegerMatrix::from_rows(&[[2, 0], [0, 0]]);
        assert_eq!(F2Matrix::from_integer(&m).rank(), 0);
    }

    #[test]
    fn inverse_round_trip() {
        let m = F2Matrix::from_rows(&[
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(F2Matrix::from_rows(&[vec![true, true], vec![true, true]]).inverse().is_none());
    }

    #[test]
    fn wide_rows_span_words() {
        let mut m = F2Matrix::zeros(2, 130);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(1, 3, true);
        assert_eq!(m.rank(), 2);
        assert!(m.transpose().get(129, 1));
    }
}
