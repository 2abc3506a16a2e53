//! Small dense matrices over Q.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::poly::{q_to_f64, QPoly, Q};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(cols: &[Vec<Q>]) -> Self {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = Q::from_integer(BigInt::from(v));
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

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Q::zero(), |acc, j| acc + &self[(i, j)] * &v[j])
            })
            .collect()
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).fold(Q::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn add_scaled_identity(&self, k: &Q) -> QMatrix {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += k;
        }
        out
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| q_to_f64(&self[(i, j)])).collect())
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|q| q.is_integer())
    }

    /// Inverse by Gauss–Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &p;
                inv[(col, j)] /= &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !a[(r, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(rank, pivot);
            for r in rank + 1..self.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &a[(rank, col)];
                for j in col..self.cols {
                    let t = &f * &a[(rank, j)];
                    a[(r, j)] -= t;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self * x = b` for a consistent system with independent columns.
    pub fn solve_columns(&self, b: &[Q]) -> Option<Vec<Q>> {
        // augmented elimination, least-index pivots
        let (m, n) = (self.rows, self.cols);
        let mut a = QMatrix::zeros(m, n + 1);
        for i in 0..m {
            for j in 0..n {
                a[(i, j)] = self[(i, j)].clone();
            }
            a[(i, n)] = b[i].clone();
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let p = (row..m).find(|&r| !a[(r, col)].is_zero())?;
            a.swap_rows(row, p);
            let pv = a[(row, col)].clone();
            for j in 0..=n {
                a[(row, j)] /= &pv;
            }
            for r in 0..m {
                if r == row || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..=n {
                    let t = &f * &a[(row, j)];
                    a[(r, j)] -= t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        if (row..m).any(|r| !a[(r, n)].is_zero()) {
            return None;
        }
        Some((0..n).map(|j| a[(j, n)].clone()).collect())
    }

    /// Characteristic polynomial `det(X I - A)` by the Faddeev–LeVerrier
    /// recursion, exact over Q.
    pub fn char_poly(&self) -> QPoly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut m = QMatrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            m = self.mul(&m).add_scaled_identity(&coeffs[n - k + 1]);
            let am = self.mul(&m);
            coeffs[n - k] = -am.trace() / Q::from_integer(BigInt::from(k));
        }
        QPoly::new(coeffs)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_char_poly() {
        let c = QMatrix::from_i64_rows(&[
            &[0, 0, 0, -1],
            &[1, 0, 0, 1],
            &[0, 1, 0, 1],
            &[0, 0, 1, 1],
        ]);
        assert_eq!(c.char_poly(), QPoly::from_i64(&[1, -1, -1, -1, 1]));
    }

    #[test]
    fn inverse_round_trip() {
        let a = QMatrix::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMatrix::identity(3));
        let sing = QMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn solve_overdetermined_consistent() {
        let a = QMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b: Vec<Q> = [2, 3, 5].iter().map(|&v| Q::from_integer(v.into())).collect();
        let x = a.solve_columns(&b).unwrap();
        assert_eq!(x, vec![Q::from_integer(2.into()), Q::from_integer(3.into())]);
        let bad: Vec<Q> = [2, 3, 6].iter().map(|&v| Q::from_integer(v.into())).collect();
        assert!(a.solve_columns(&bad).is_none());
    }
}
