use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{check_len, Error, Result};

/// Compressed sparse row matrix.
///
/// Column indices are sorted and unique within each row. Explicit zeros are
/// allowed and kept, so the pattern of a sum always contains both operands.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidArgument("triplet index out of bounds"));
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            scratch.sort_unstable_by_key(|&(j, _)| j);
            for &(j, v) in &scratch {
                match col_idx.last() {
                    Some(&last) if col_idx.len() > row_ptr[i] && last == j => {
                        *values.last_mut().unwrap() += v;
                    }
                    _ => {
                        col_idx.push(j);
                        values.push(v);
                    }
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    /// Dense row-major input; zeros are dropped.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            check_len("from_dense row", ncols, row.len())?;
            triplets.extend(row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Iterates over stored `(row, col, value)` entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_len("spmv input", self.ncols, x.len())?;
        check_len("spmv output", self.nrows, y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        Ok(())
    }

    /// `y += alpha * self * x`.
    pub fn spmv_acc(&self, alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_len("spmv input", self.ncols, x.len())?;
        check_len("spmv output", self.nrows, y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            *yi += alpha * s;
        }
        Ok(())
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn transpose_spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("transposed spmv input", self.nrows, x.len())?;
        let mut y = vec![0.0; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        check_len("quadratic form", self.ncols, x.len())?;
        check_len("quadratic form", self.nrows, x.len())?;
        Ok((0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum::<f64>()
            })
            .sum())
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &triplets).expect("transposed indices are in range")
    }

    /// Copy of the sub-block `rows × cols`, re-indexed from zero.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in rows.clone() {
            let (c, v) = self.row(i);
            let lo = c.partition_point(|&j| j < cols.start);
            let hi = c.partition_point(|&j| j < cols.end);
            col_idx.extend(c[lo..hi].iter().map(|&j| j - cols.start));
            values.extend_from_slice(&v[lo..hi]);
            row_ptr.push(col_idx.len());
        }
        Self { nrows: rows.len(), ncols: cols.len(), row_ptr, col_idx, values }
    }

    /// Places `self` into an `nrows × ncols` zero matrix with its top-left corner at `(row_offset, col_offset)`.
    pub fn embed(&self, nrows: usize, ncols: usize, row_offset: usize, col_offset: usize) -> Result<Self> {
        if row_offset + self.nrows > nrows || col_offset + self.ncols > ncols {
            return Err(Error::InvalidArgument("embedded block exceeds target dimensions"));
        }
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (i + row_offset, j + col_offset, v)).collect();
        Self::from_triplets(nrows, ncols, &triplets)
    }

    /// Assembles a block matrix from `(row_offset, col_offset, block)` pieces.
    pub fn from_blocks(nrows: usize, ncols: usize, blocks: &[(usize, usize, &SparseMatrix)]) -> Result<Self> {
        let mut triplets = Vec::new();
        for &(r0, c0, b) in blocks {
            if r0 + b.nrows > nrows || c0 + b.ncols > ncols {
                return Err(Error::InvalidArgument("block exceeds target dimensions"));
            }
            triplets.extend(b.triplets().map(|(i, j, v)| (i + r0, j + c0, v)));
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }

    /// Largest `|a_ij - a_ji|` over the stored pattern of both triangles.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.triplets().map(|(i, j, v)| libm::fabs(v - self.get(j, i))).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max)
    }
}

/// `alpha * a + beta * b` over the union of both sparsity patterns.
pub fn add_scaled(a: &SparseMatrix, b: &SparseMatrix, alpha: f64, beta: f64) -> Result<SparseMatrix> {
    check_len("add_scaled rows", a.nrows, b.nrows)?;
    check_len("add_scaled cols", a.ncols, b.ncols)?;
    let mut row_ptr = Vec::with_capacity(a.nrows + 1);
    let mut col_idx = Vec::with_capacity(a.nnz().max(b.nnz()));
    let mut values = Vec::with_capacity(a.nnz().max(b.nnz()));
    row_ptr.push(0);
    for i in 0..a.nrows {
        let (ac, av) = a.row(i);
        let (bc, bv) = b.row(i);
        let (mut p, mut q) = (0, 0);
        while p < ac.len() || q < bc.len() {
            let ja = ac.get(p).copied().unwrap_or(usize::MAX);
            let jb = bc.get(q).copied().unwrap_or(usize::MAX);
            if ja == jb {
                col_idx.push(ja);
                values.push(alpha * av[p] + beta * bv[q]);
                p += 1;
                q += 1;
            } else if ja < jb {
                col_idx.push(ja);
                values.push(alpha * av[p]);
                p += 1;
            } else {
                col_idx.push(jb);
                values.push(beta * bv[q]);
                q += 1;
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(SparseMatrix { nrows: a.nrows, ncols: a.ncols, row_ptr, col_idx, values })
}

/// Free-function form of [`SparseMatrix::spmv`].
pub fn spmv(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    a.spmv(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_times_x_is_x() {
        let x = [1.5, -2.0, 3.25];
        assert_eq!(SparseMatrix::identity(3).spmv(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn small_product_by_hand() {
        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(a.spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
    }

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, 1.0), (0, 0, 2.0), (0, 2, 3.0), (1, 1, -1.0)]).unwrap();
        assert_eq!(a.col_indices(), &[0, 2, 1]);
        assert_eq!(a.values(), &[2.0, 4.0, -1.0]);
        assert_eq!(a.nnz(), 3);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = SparseMatrix::identity(3);
        assert!(matches!(a.spmv(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(add_scaled(&a, &SparseMatrix::identity(2), 1.0, 1.0).is_err());
    }

    #[test]
    fn add_scaled_identities() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0, 0.0], vec![0.0, 3.0, 4.0], vec![5.0, 0.0, 6.0]]).unwrap();
        let b = SparseMatrix::from_dense(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(add_scaled(&a, &b, 1.0, 0.0).unwrap().to_dense(), a.to_dense());
        let z = add_scaled(&a, &a, 1.0, -1.0).unwrap();
        assert!(z.values().iter().all(|v| v.abs() <= 1e-15));
        let s = add_scaled(&a, &b, 2.0, -3.0).unwrap().to_dense();
        let (ad, bd) = (a.to_dense(), b.to_dense());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s[i][j], 2.0 * ad[i][j] - 3.0 * bd[i][j]);
            }
        }
    }

    #[test]
    fn blocks_reassemble() {
        let a = SparseMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0, 2.0],
            vec![1.0, 5.0, 3.0, 0.0],
            vec![0.0, 3.0, 6.0, 1.0],
            vec![2.0, 0.0, 1.0, 7.0],
        ])
        .unwrap();
        let a11 = a.block(0..2, 0..2);
        let a12 = a.block(0..2, 2..4);
        let a21 = a.block(2..4, 0..2);
        let a22 = a.block(2..4, 2..4);
        let back = SparseMatrix::from_blocks(4, 4, &[(0, 0, &a11), (0, 2, &a12), (2, 0, &a21), (2, 2, &a22)]).unwrap();
        assert_eq!(back.to_dense(), a.to_dense());
        assert_eq!(a.transpose().to_dense(), a.to_dense());
        assert_eq!(a.asymmetry(), 0.0);
    }
}
