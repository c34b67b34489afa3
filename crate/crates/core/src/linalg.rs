//! Dense exact linear algebra over a finite field.

use crate::field::FiniteField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<u32>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix { rows: nrows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// In-place reduced row echelon form. Pivots are taken at the first
    /// nonzero column, left to right. Returns the pivot columns.
    pub fn rref(&mut self, f: &FiniteField) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(src) = (r..self.rows).find(|&i| self.get(i, c) != 0) else { continue };
            self.swap_rows(r, src);
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            for k in c..self.cols {
                let v = self.get(r, k);
                self.set(r, k, f.mul(v, inv));
            }
            let pivot_row: Vec<u32> = self.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                let base = i * self.cols;
                for (k, &pv) in pivot_row.iter().enumerate() {
                    if pv != 0 {
                        let slot = &mut self.data[base + c + k];
                        *slot = f.add(*slot, f.mul(neg, pv));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &FiniteField) -> usize {
        self.clone().rref(f).len()
    }
}

/// Kernel of an RREF matrix with the given pivots: one vector per free
/// column `j`, equal to 1 at `j`, zero at every other free column, and
/// supported otherwise on pivot columns left of `j`.
pub fn kernel_from_rref(m: &Matrix, pivots: &[usize], f: &FiniteField) -> Vec<Vec<u32>> {
    let mut is_pivot = vec![None; m.cols()];
    for (row, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(row);
    }
    (0..m.cols())
        .filter(|&j| is_pivot[j].is_none())
        .map(|j| {
            let mut v = vec![0u32; m.cols()];
            v[j] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                if c < j {
                    v[c] = f.neg(m.get(row, j));
                }
            }
            v
        })
        .collect()
}

/// Incrementally maintained echelon basis of a subspace of F^len.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    len: usize,
    /// (pivot position, vector normalized to 1 at the pivot)
    rows: Vec<(usize, Vec<u32>)>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis { len, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u32], f: &FiniteField) {
        for (p, row) in &self.rows {
            let c = v[*p];
            if c == 0 {
                continue;
            }
            let neg = f.neg(c);
            for (slot, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *slot = f.add(*slot, f.mul(neg, r));
                }
            }
        }
    }

    /// True if `v` lies in the span.
    pub fn contains(&self, v: &[u32], f: &FiniteField) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w, f);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the current basis; returns whether it was.
    pub fn insert(&mut self, v: &[u32], f: &FiniteField) -> bool {
        assert_eq!(v.len(), self.len);
        let mut w = v.to_vec();
        self.reduce(&mut w, f);
        let Some(p) = w.iter().position(|&x| x != 0) else { return false };
        let inv = f.inv(w[p]).expect("nonzero");
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        // keep earlier rows free of the new pivot so reduction stays one pass
        for (_, row) in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                let neg = f.neg(c);
                for (slot, &r) in row.iter_mut().zip(&w) {
                    *slot = f.add(*slot, f.mul(neg, r));
                }
            }
        }
        self.rows.push((p, w));
        true
    }
}
