//! Minimal column-major matrix used for the orthonormal column store and
//! basis evaluation tables.

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Debug)]
pub struct ColMatrix<S: Scalar> {
    nrows: usize,
    data: Vec<S>,
}

impl<S: Scalar> ColMatrix<S> {
    pub fn with_capacity(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            data: Vec::with_capacity(nrows * ncols),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        if self.nrows == 0 {
            0
        } else {
            self.data.len() / self.nrows
        }
    }

    pub fn push_col(&mut self, col: &[S]) {
        debug_assert_eq!(col.len(), self.nrows);
        self.data.extend_from_slice(col);
    }

    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }
}

/// `w -= Σ_k cols(k)·coeffs[k]`, accumulated in ascending k for every
/// element so the result is bit-identical however the rows are chunked.
pub fn subtract_scaled_columns<S: Scalar>(w: &mut [S], mat: &ColMatrix<S>, coeffs: &[S]) {
    let nrows = w.len();
    debug_assert_eq!(mat.nrows(), nrows);
    debug_assert!(coeffs.len() <= mat.ncols());
    const CHUNK: usize = 8192;
    let work = nrows.saturating_mul(coeffs.len());
    if work >= 1 << 18 && nrows > CHUNK {
        use rayon::prelude::*;
        w.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
            let off = ci * CHUNK;
            for (k, &c) in coeffs.iter().enumerate() {
                let col = &mat.col(k)[off..off + chunk.len()];
                for (wv, &qv) in chunk.iter_mut().zip(col) {
                    *wv -= qv * c;
                }
            }
        });
    } else {
        for (k, &c) in coeffs.iter().enumerate() {
            let col = mat.col(k);
            for (wv, &qv) in w.iter_mut().zip(col) {
                *wv -= qv * c;
            }
        }
    }
}

/// `out += col·c`, chunk-parallel with per-element determinism.
pub fn axpy<S: Scalar>(out: &mut [S], col: &[S], c: S) {
    debug_assert_eq!(out.len(), col.len());
    const CHUNK: usize = 8192;
    if out.len() >= 1 << 18 {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK)
            .zip(col.par_chunks(CHUNK))
            .for_each(|(o, s)| {
                for (ov, &sv) in o.iter_mut().zip(s) {
                    *ov += sv * c;
                }
            });
    } else {
        for (ov, &sv) in out.iter_mut().zip(col) {
            *ov += sv * c;
        }
    }
}
