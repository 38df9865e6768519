//! Dense linear algebra: nullspaces over a prime field and exact integer
//! determinants.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{mul_mod, pow_mod, sub_mod};

/// A dense row-major matrix of residues mod a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        ModMatrix { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, modulus: u64, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j) % modulus);
            }
        }
        ModMatrix { rows, cols, modulus, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let p = self.modulus as u128;
        (0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u128, |acc, (&a, &b)| (acc + a as u128 * b as u128) % p);
                acc as u64
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    /// The modulus must be prime.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.modulus;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = pow_mod(self.get(r, c), p - 2, p);
            for j in 0..self.cols {
                let v = mul_mod(self.get(r, j), inv, p);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                let f = self.get(i, c);
                if i == r || f == 0 {
                    continue;
                }
                for j in 0..self.cols {
                    let v = sub_mod(self.get(i, j), mul_mod(f, self.get(r, j), p), p);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of `{x : A x = 0}`, one vector per free column in increasing
    /// column order; the free coordinate is 1 and the other free
    /// coordinates are 0.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let p = self.modulus;
        let mut reduced = self.clone();
        let pivots = reduced.rref();
        let mut basis = Vec::new();
        let mut pivot_iter = pivots.iter().peekable();
        for free in 0..self.cols {
            if pivot_iter.peek() == Some(&&free) {
                pivot_iter.next();
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = sub_mod(0, reduced.get(row, free), p);
            }
            basis.push(v);
        }
        basis
    }
}

/// Exact determinant of a square integer matrix by fraction-free
/// (Bareiss) elimination.
///
/// Panics if the matrix is not square or an intermediate overflows `i128`.
pub fn int_determinant(matrix: &[Vec<i64>]) -> i128 {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = matrix.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .checked_mul(a[k][k])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .expect("determinant overflows i128");
                // exact by Sylvester's identity
                a[i][j] = num / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// The `j x j` Toeplitz pattern with `-1` on the diagonal, `0` just below
/// it, and alternating signs moving away from those two diagonals:
///
/// ```text
/// -1  1 -1  1
///  0 -1  1 -1
///  1  0 -1  1
/// -1  1  0 -1
/// ```
pub fn pattern_matrix(j: usize) -> Vec<Vec<i64>> {
    (0..j)
        .map(|r| {
            (0..j)
                .map(|c| {
                    if c + 1 == r {
                        0
                    } else if c >= r {
                        if (c - r) % 2 == 0 { -1 } else { 1 }
                    } else if (r - c) % 2 == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect()
}
