use std::fmt;

use super::field::PrimeField;

/// Dense row-major matrix over a prime field.
///
/// Rows are treated as vectors throughout: a span is the row space, and
/// [`Matrix::kernel`] is the set of column vectors `v` with `M v = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from raw entries; values are reduced mod p.
    pub fn from_entries(field: PrimeField, rows: usize, cols: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows * cols");
        let data = entries.into_iter().map(|x| field.reduce(x as u64)).collect();
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r.iter().map(|&x| field.reduce(x as u64)));
        }
        Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_signed_rows(field: PrimeField, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let converted: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Matrix::from_rows(field, cols, &converted)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = self.field.reduce(v as u64);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[u32]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row.iter().map(|&x| self.field.reduce(x as u64)));
        self.rows += 1;
    }

    pub fn append(&mut self, other: &Matrix) {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.field, other.field);
        self.data.extend_from_slice(&other.data);
        self.rows += other.rows;
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.field, other.field);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = self.field;
        let p = f.modulus() as u64;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot = (*slot + a as u64 * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = v as u32;
            }
        }
        out
    }

    /// Applies `M` to a column vector.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u32, |acc, (&a, &b)| f.mul_add(acc, a, b))
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let p = f.modulus() as u64;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if sel != prow {
                for j in 0..cols {
                    self.data.swap(sel * cols + j, prow * cols + j);
                }
            }
            let inv = f.inv(self.data[prow * cols + c]);
            for j in c..cols {
                let idx = prow * cols + j;
                self.data[idx] = f.mul(self.data[idx], inv);
            }
            let (head, tail) = self.data.split_at_mut(prow * cols);
            let (pivot_row, rest) = tail.split_at_mut(cols);
            let eliminate = |row: &mut [u32]| {
                let factor = row[c];
                if factor == 0 {
                    return;
                }
                let neg = p - factor as u64;
                for j in c..cols {
                    let pv = pivot_row[j];
                    if pv != 0 {
                        row[j] = ((row[j] as u64 + neg * pv as u64) % p) as u32;
                    }
                }
            };
            head.chunks_exact_mut(cols).for_each(eliminate);
            rest.chunks_exact_mut(cols).for_each(eliminate);
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    /// Row rank over Z_p by forward elimination.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let f = self.field;
        let p = f.modulus() as u64;
        let cols = self.cols;
        let mut a = self.data.clone();
        let mut rank = 0;
        for c in 0..cols {
            if rank == self.rows {
                break;
            }
            let Some(sel) = (rank..self.rows).find(|&r| a[r * cols + c] != 0) else {
                continue;
            };
            if sel != rank {
                for j in 0..cols {
                    a.swap(sel * cols + j, rank * cols + j);
                }
            }
            let inv = f.inv(a[rank * cols + c]);
            let (top, bottom) = a.split_at_mut((rank + 1) * cols);
            let pivot_row = &mut top[rank * cols..];
            for v in pivot_row[c..].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for row in bottom.chunks_exact_mut(cols) {
                let factor = row[c];
                if factor == 0 {
                    continue;
                }
                let neg = p - factor as u64;
                for j in c..cols {
                    let pv = pivot_row[j];
                    if pv != 0 {
                        row[j] = ((row[j] as u64 + neg * pv as u64) % p) as u32;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of the right null space `{v : M v = 0}`, one vector per row.
    pub fn kernel(&self) -> Matrix {
        let f = self.field;
        let mut r = self.clone();
        let pivots = r.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Matrix::zeros(f, 0, self.cols);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (prow, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(prow, free));
            }
            basis.push_row(&v);
        }
        basis
    }

    /// Linear functionals on the ambient space `Z_p^cols` that vanish on
    /// every row of `M`, one functional per row of the result.
    ///
    /// With rows read as vectors this is the annihilator of the row space,
    /// so its size is `cols - rank`.
    pub fn left_null_basis(&self) -> Matrix {
        self.kernel()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over Z_{}", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rng::RngState;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn identity_rank() {
        assert_eq!(Matrix::identity(f101(), 4).rank(), 4);
    }

    #[test]
    fn zero_rank() {
        assert_eq!(Matrix::zeros(f101(), 3, 5).rank(), 0);
        assert_eq!(Matrix::zeros(f101(), 0, 0).rank(), 0);
    }

    #[test]
    fn flattening_at_generic_point_has_rank_two() {
        // [[x000, x001, x100, 0], [0, x011, x110, x111]] at a random point.
        let f = PrimeField::new(32003).unwrap();
        let mut rng = RngState::new(7);
        let x = rng.random_vector(f, 6);
        let m = Matrix::from_rows(f, 4, &[vec![x[0], x[1], x[2], 0], vec![0, x[3], x[4], x[5]]]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn identity_kernel_empty_zero_kernel_full() {
        assert_eq!(Matrix::identity(f101(), 5).kernel().rows(), 0);
        let k = Matrix::zeros(f101(), 4, 4).kernel();
        assert_eq!(k.rows(), 4);
        assert_eq!(k.rank(), 4);
    }

    #[test]
    fn left_null_of_single_row() {
        let f = f101();
        let d = 6;
        let mut e0 = vec![0; d];
        e0[0] = 1;
        let m = Matrix::from_rows(f, d, &[e0]);
        let l = m.left_null_basis();
        assert_eq!(l.rows(), d - 1);
        assert!(m.mul(&l.transpose()).is_zero());
    }

    #[test]
    fn full_row_rank_square_has_no_functionals() {
        let f = f101();
        let m = Matrix::from_signed_rows(f, &[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.left_null_basis().rows(), 0);
    }

    #[test]
    fn rref_matches_rank() {
        let f = f101();
        let m = Matrix::from_signed_rows(f, &[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        let mut r = m.clone();
        assert_eq!(r.rref_in_place().len(), m.rank());
        assert_eq!(m.rank(), 2);
    }
}
