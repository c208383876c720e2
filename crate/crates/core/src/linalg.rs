//! Dense matrices over a [`Gf`].

use serde::{Deserialize, Serialize};

use crate::gf::{Fe, Gf};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>, // row-major
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    /// Panics when the rows are ragged.
    pub fn from_rows(rows: &[Vec<Fe>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn from_columns(cols: &[Vec<Fe>]) -> Matrix {
        Matrix::from_rows(cols).transpose()
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Fe>) -> Option<Matrix> {
        (data.len() == rows * cols).then_some(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn map(&self, mut g: impl FnMut(Fe) -> Fe) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| g(x)).collect() }
    }

    pub fn scale(&self, c: Fe, f: &Gf) -> Matrix {
        self.map(|x| f.mul(x, c))
    }

    pub fn mul_vec(&self, v: &[Fe], f: &Gf) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut out = vec![Fe::ZERO; self.rows];
        self.mul_vec_into(v, f, &mut out);
        out
    }

    #[inline]
    pub fn mul_vec_into(&self, v: &[Fe], f: &Gf, out: &mut [Fe]) {
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            let mut acc = Fe::ZERO;
            for (c, &x) in v.iter().enumerate() {
                if !x.is_zero() {
                    acc = f.add(acc, f.mul(self.data[r * self.cols + c], x));
                }
            }
            *o = acc;
        }
    }

    pub fn mul(&self, other: &Matrix, f: &Gf) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Fe::ZERO;
                for k in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(r, k), other.get(k, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: &Gf) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    let (a, b) = (m.get(row, c), m.get(pr, c));
                    m.set(row, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                m.set(row, c, f.mul(m.get(row, c), inv));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &Gf) -> usize {
        self.rref(f).1.len()
    }

    pub fn determinant(&self, f: &Gf) -> Fe {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Fe::ONE;
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Fe::ZERO;
            };
            if pr != col {
                for c in 0..n {
                    let (a, b) = (m.get(col, c), m.get(pr, c));
                    m.set(col, c, b);
                    m.set(pr, c, a);
                }
                det = f.neg(det);
            }
            let piv = m.get(col, col);
            det = f.mul(det, piv);
            let inv = f.inv(piv).expect("pivot is nonzero");
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(col, c)));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self, f: &Gf) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, Fe::ONE);
        }
        let (red, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, red.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn nullspace(&self, f: &Gf) -> Vec<Vec<Fe>> {
        let (red, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[fc] = Fe::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(red.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// Some solution of `M x = b`, if any.
    pub fn solve(&self, b: &[Fe], f: &Gf) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (r, &br) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, br);
        }
        let (red, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Fe::ZERO; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = red.get(r, self.cols);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &Gf, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn inverse_and_determinant() {
        let f = Gf::new(5, 1).unwrap();
        let a = m(&f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 2]]);
        let inv = a.inverse(&f).unwrap();
        assert_eq!(a.mul(&inv, &f), Matrix::identity(3));
        // det = 1*2 - 2*(0 - 12) = 26
        assert_eq!(a.determinant(&f), f.from_int(26));
        let b = m(&f, &[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        assert_eq!(b.determinant(&f), Fe::ZERO);
        assert!(b.inverse(&f).is_none());
        let sing = m(&f, &[&[1, 2], &[2, 4]]);
        assert!(sing.inverse(&f).is_none());
        assert_eq!(sing.determinant(&f), Fe::ZERO);
        assert_eq!(sing.rank(&f), 1);
    }

    #[test]
    fn nullspace_and_solve() {
        let f = Gf::new(7, 1).unwrap();
        let a = m(&f, &[&[1, 2, 3], &[2, 4, 6]]);
        let ns = a.nullspace(&f);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.mul_vec(v, &f).iter().all(|x| x.is_zero()));
        }
        let b = vec![f.from_int(1), f.from_int(2)];
        let x = a.solve(&b, &f).unwrap();
        assert_eq!(a.mul_vec(&x, &f), b);
        assert!(a.solve(&[f.from_int(1), f.from_int(1)], &f).is_none());
    }
}
