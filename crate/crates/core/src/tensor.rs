//! Dense matrices and small dense tensors of order 2–4.
//!
//! Storage conventions, fixed once and relied on everywhere:
//! * [`Matrix`] is column-major.
//! * [`Tensor`] is laid out with mode 1 fastest: the flat offset of index
//!   `(i0, i1, i2, i3)` is `i0 + d0*(i1 + d1*(i2 + d2*i3))`.
//!
//! With that layout the mode-`k` unfolding places the remaining modes in
//! increasing order along the columns (lower modes vary fastest), so
//! `unfold`/`refold` are exact inverses and mode products can be expressed
//! as one matrix multiply per mode.

use crate::error::{CdidError, Result};
use crate::scalar::Element;

/// Column-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Element> Matrix<E> {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, E::one());
        }
        m
    }

    /// Builds a matrix from column-major data. The length must match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CdidError::DimensionMismatch(format!(
                "matrix {rows}x{cols} needs {} elements, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
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
    pub fn get(&self, r: usize, c: usize) -> E {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[c * self.rows + r] = v;
    }

    /// Column `c` as a contiguous slice.
    #[inline]
    pub fn col(&self, c: usize) -> &[E] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Column `c` as a mutable contiguous slice.
    #[inline]
    pub fn col_mut(&mut self, c: usize) -> &mut [E] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Raw column-major storage.
    #[inline]
    pub fn data(&self) -> &[E] {
        &self.data
    }

    /// Raw mutable column-major storage.
    #[inline]
    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    /// Conjugate transpose (plain transpose for real elements).
    pub fn herm_transpose(&self) -> Matrix<E> {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for c in 0..self.cols {
            for r in 0..self.rows {
                t.set(c, r, self.get(r, c).conj());
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    ///
    /// Accumulates one rhs column at a time over columns of `self`, which
    /// keeps every inner loop contiguous in column-major storage.
    pub fn matmul(&self, rhs: &Matrix<E>) -> Result<Matrix<E>> {
        if self.cols != rhs.rows {
            return Err(CdidError::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for c in 0..rhs.cols {
            let out_col = &mut out.data[c * self.rows..(c + 1) * self.rows];
            for k in 0..self.cols {
                let w = rhs.get(k, c);
                if w == E::zero() {
                    continue;
                }
                let lhs_col = self.col(k);
                for (o, &l) in out_col.iter_mut().zip(lhs_col) {
                    *o += l * w;
                }
            }
        }
        Ok(out)
    }

    /// Gram matrix `self * self^H` (size `rows x rows`), accumulated as a
    /// sum of rank-one column outer products.
    pub fn gram(&self) -> Matrix<E> {
        let n = self.rows;
        let mut g = Matrix::zeros(n, n);
        for j in 0..self.cols {
            let col = self.col(j);
            for r2 in 0..n {
                let w = col[r2].conj();
                if w == E::zero() {
                    continue;
                }
                let g_col = &mut g.data[r2 * n..(r2 + 1) * n];
                for (o, &l) in g_col.iter_mut().zip(col) {
                    *o += l * w;
                }
            }
        }
        g
    }

    /// Squared Frobenius norm.
    pub fn frob_norm_sq(&self) -> E::Real {
        self.data.iter().map(|&v| v.modulus_sq()).sum()
    }
}

/// Dense tensor of order 2–4 with mode 1 fastest in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<E> {
    dims: Vec<usize>,
    data: Vec<E>,
}

impl<E: Element> Tensor<E> {
    /// Zero tensor with the given dimensions.
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(
            (2..=4).contains(&dims.len()),
            "tensor order must be 2, 3, or 4"
        );
        Tensor {
            dims: dims.to_vec(),
            data: vec![E::zero(); dims.iter().product()],
        }
    }

    /// Builds a tensor from flat data in the crate layout, rejecting length
    /// mismatches and non-finite entries.
    pub fn from_vec(dims: &[usize], data: Vec<E>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(CdidError::DimensionMismatch(format!(
                "tensor {dims:?} needs {expected} elements, got {}",
                data.len()
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(CdidError::NonFinite("tensor construction"));
        }
        assert!(
            (2..=4).contains(&dims.len()),
            "tensor order must be 2, 3, or 4"
        );
        Ok(Tensor {
            dims: dims.to_vec(),
            data,
        })
    }

    /// Same as [`Tensor::from_vec`] but skips the finiteness scan; for data
    /// produced internally from already-validated inputs.
    pub fn from_vec_unchecked(dims: &[usize], data: Vec<E>) -> Self {
        debug_assert_eq!(data.len(), dims.iter().product::<usize>());
        assert!((2..=4).contains(&dims.len()));
        Tensor {
            dims: dims.to_vec(),
            data,
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn data(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    /// Flat offset of a multi-index.
    #[inline]
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut off = 0;
        for k in (0..idx.len()).rev() {
            debug_assert!(idx[k] < self.dims[k]);
            off = off * self.dims[k] + idx[k];
        }
        off
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> E {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: E) {
        let off = self.offset(idx);
        self.data[off] = v;
    }

    /// Squared Frobenius norm.
    pub fn frob_norm_sq(&self) -> E::Real {
        self.data.iter().map(|&v| v.modulus_sq()).sum()
    }

    /// Product of dimensions below (`inner`) and above (`outer`) a mode.
    fn split_sizes(&self, mode: usize) -> (usize, usize) {
        let inner: usize = self.dims[..mode].iter().product();
        let outer: usize = self.dims[mode + 1..].iter().product();
        (inner, outer)
    }

    /// Mode-`k` unfolding: a `dims[k] x (total/dims[k])` matrix whose column
    /// index runs over the remaining modes with lower modes fastest.
    pub fn unfold(&self, mode: usize) -> Result<Matrix<E>> {
        if mode >= self.dims.len() {
            return Err(CdidError::ModeOutOfRange {
                mode,
                order: self.dims.len(),
            });
        }
        let dk = self.dims[mode];
        let (inner, outer) = self.split_sizes(mode);
        let mut m = Matrix::zeros(dk, inner * outer);
        for q in 0..outer {
            for p in 0..inner {
                let col = m.col_mut(p + inner * q);
                let base = p + inner * dk * q;
                for (ik, slot) in col.iter_mut().enumerate() {
                    *slot = self.data[base + inner * ik];
                }
            }
        }
        Ok(m)
    }

    /// Inverse of [`Tensor::unfold`]: rebuilds a tensor with dimensions
    /// `dims` from its mode-`k` unfolding.
    pub fn refold(m: &Matrix<E>, mode: usize, dims: &[usize]) -> Result<Self> {
        if mode >= dims.len() {
            return Err(CdidError::ModeOutOfRange {
                mode,
                order: dims.len(),
            });
        }
        let total: usize = dims.iter().product();
        if m.rows() != dims[mode] || m.rows() * m.cols() != total {
            return Err(CdidError::DimensionMismatch(format!(
                "refold of {}x{} into {dims:?} along mode {mode}",
                m.rows(),
                m.cols()
            )));
        }
        let mut t = Tensor::zeros(dims);
        let dk = dims[mode];
        let (inner, outer) = t.split_sizes(mode);
        for q in 0..outer {
            for p in 0..inner {
                let col = m.col(p + inner * q);
                let base = p + inner * dk * q;
                for (ik, &v) in col.iter().enumerate() {
                    t.data[base + inner * ik] = v;
                }
            }
        }
        Ok(t)
    }

    /// Mode-`k` product with a matrix: contracts `dims[k]` against the
    /// columns of `m`, replacing that dimension with `m.rows()`.
    pub fn mode_product(&self, m: &Matrix<E>, mode: usize) -> Result<Self> {
        if mode >= self.dims.len() {
            return Err(CdidError::ModeOutOfRange {
                mode,
                order: self.dims.len(),
            });
        }
        if m.cols() != self.dims[mode] {
            return Err(CdidError::DimensionMismatch(format!(
                "mode-{mode} product: matrix {}x{} against dimension {}",
                m.rows(),
                m.cols(),
                self.dims[mode]
            )));
        }
        let unfolded = self.unfold(mode)?;
        let product = m.matmul(&unfolded)?;
        let mut new_dims = self.dims.clone();
        new_dims[mode] = m.rows();
        Tensor::refold(&product, mode, &new_dims)
    }
}
