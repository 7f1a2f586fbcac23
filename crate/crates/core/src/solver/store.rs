//! Block layout of per-element field data.

use crate::operators::leading_dim;

/// `n_fields` blocks of `block` entries per element; block `(k, c)` starts
/// at `((k * n_fields) + c) * block`. Entries past `len` are padding and
/// stay zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionStore {
    pub n_elements: usize,
    pub n_fields: usize,
    /// Meaningful entries per block.
    pub len: usize,
    /// Block stride, `len` or `len` rounded up to a multiple of 16.
    pub block: usize,
    pub padded: bool,
    pub data: Vec<f64>,
}

impl SolutionStore {
    pub fn new(n_elements: usize, n_fields: usize, len: usize, padded: bool) -> Self {
        let block = leading_dim(len, padded);
        SolutionStore {
            n_elements,
            n_fields,
            len,
            block,
            padded,
            data: vec![0.0; n_elements * n_fields * block],
        }
    }

    #[inline]
    pub fn offset(&self, k: usize, c: usize) -> usize {
        (k * self.n_fields + c) * self.block
    }

    /// All fields of element `k`.
    #[inline]
    pub fn element(&self, k: usize) -> &[f64] {
        let s = self.n_fields * self.block;
        &self.data[k * s..(k + 1) * s]
    }

    #[inline]
    pub fn element_mut(&mut self, k: usize) -> &mut [f64] {
        let s = self.n_fields * self.block;
        &mut self.data[k * s..(k + 1) * s]
    }

    #[inline]
    pub fn field(&self, k: usize, c: usize) -> &[f64] {
        let o = self.offset(k, c);
        &self.data[o..o + self.len]
    }

    #[inline]
    pub fn field_mut(&mut self, k: usize, c: usize) -> &mut [f64] {
        let o = self.offset(k, c);
        &mut self.data[o..o + self.len]
    }

    /// Stride between elements.
    pub fn element_stride(&self) -> usize {
        self.n_fields * self.block
    }

    /// Dense copy without padding, element-major then field-major.
    pub fn unpack(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_elements * self.n_fields * self.len);
        for k in 0..self.n_elements {
            for c in 0..self.n_fields {
                out.extend_from_slice(self.field(k, c));
            }
        }
        out
    }

    /// Inverse of [`unpack`](Self::unpack).
    pub fn pack(dense: &[f64], n_elements: usize, n_fields: usize, len: usize, padded: bool) -> Self {
        assert_eq!(dense.len(), n_elements * n_fields * len, "dense data size");
        let mut s = Self::new(n_elements, n_fields, len, padded);
        for (i, chunk) in dense.chunks_exact(len).enumerate() {
            let o = i * s.block;
            s.data[o..o + len].copy_from_slice(chunk);
        }
        s
    }

    /// True if every padding slot holds zero.
    pub fn padding_is_zero(&self) -> bool {
        self.data
            .chunks_exact(self.block)
            .all(|b| b[self.len..].iter().all(|&v| v == 0.0))
    }

    /// Same data in the other layout.
    pub fn relayout(&self, padded: bool) -> Self {
        Self::pack(&self.unpack(), self.n_elements, self.n_fields, self.len, padded)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}
