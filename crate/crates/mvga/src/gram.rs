//! Collocation maps: sparse realizations of a linear map L with G = LᵀL,
//! and the induced semidefinite inner products of stacked vectors.
//!
//! G is never materialized. Every application's G factors through a short
//! list of sparse rows over the stacked blocks; inner products cost
//! O(rows · terms) instead of touching an (m·d̃)² matrix.

use crate::error::{Error, Result};
use crate::scalar::{dot_conj, l2_norm, Scalar};
use crate::stacked::{BlockId, StackedLayout, StackedVector};

/// One summand of a collocation row: `weight · block[node]`.
#[derive(Clone, PartialEq, Debug)]
pub struct CollocationTerm<S: Scalar> {
    pub block: BlockId,
    /// 0-based node index.
    pub node: usize,
    pub weight: S,
}

impl<S: Scalar> CollocationTerm<S> {
    pub fn new(block: BlockId, node: usize, weight: S) -> Self {
        Self {
            block,
            node,
            weight,
        }
    }
}

/// One row of the map: a sparse linear functional on stacked vectors.
#[derive(Clone, PartialEq, Debug)]
pub struct CollocationRow<S: Scalar> {
    terms: Vec<CollocationTerm<S>>,
}

impl<S: Scalar> CollocationRow<S> {
    pub fn new(terms: Vec<CollocationTerm<S>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyRow);
        }
        Ok(Self { terms })
    }

    pub fn single(block: BlockId, node: usize, weight: S) -> Self {
        Self {
            terms: vec![CollocationTerm::new(block, node, weight)],
        }
    }

    pub fn terms(&self) -> &[CollocationTerm<S>] {
        &self.terms
    }
}

/// Sparse row list realizing L; the induced G = LᵀL is positive
/// semidefinite by construction.
#[derive(Clone, PartialEq, Debug)]
pub struct CollocationMap<S: Scalar> {
    layout: StackedLayout,
    rows: Vec<CollocationRow<S>>,
    /// Flattened terms with precomputed value offsets, for the hot path.
    flat: Vec<(usize, S)>,
    row_ends: Vec<usize>,
}

impl<S: Scalar> CollocationMap<S> {
    pub fn new(layout: StackedLayout, rows: Vec<CollocationRow<S>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMap);
        }
        let mut flat = Vec::new();
        let mut row_ends = Vec::with_capacity(rows.len());
        for row in &rows {
            for term in row.terms() {
                if !term.block.valid_for(layout.d, layout.order) {
                    return Err(Error::InvalidBlock {
                        block: term.block.name(),
                        d: layout.d,
                        order: layout.order.as_u8(),
                    });
                }
                if term.node >= layout.m {
                    return Err(Error::NodeOutOfRange {
                        node: term.node,
                        m: layout.m,
                    });
                }
                if !term.weight.is_finite() {
                    return Err(Error::NonFinite("collocation weight"));
                }
                flat.push((term.block.position(layout.d) * layout.m + term.node, term.weight));
            }
            row_ends.push(flat.len());
        }
        Ok(Self {
            layout,
            rows,
            flat,
            row_ends,
        })
    }

    /// One row per node selecting the value block with unit weight — the
    /// plain interpolation inner product.
    pub fn value_selection(layout: StackedLayout) -> Self {
        let rows = (0..layout.m)
            .map(|j| CollocationRow::single(BlockId::Value, j, S::one()))
            .collect();
        Self::new(layout, rows).expect("non-empty selection map")
    }

    /// One row per (block, node) entry with unit weight: the ordinary
    /// Euclidean inner product on the full stacked space.
    pub fn full_identity(layout: StackedLayout) -> Self {
        let mut rows = Vec::with_capacity(layout.len());
        for block in BlockId::all(layout.d, layout.order) {
            for j in 0..layout.m {
                rows.push(CollocationRow::single(block, j, S::one()));
            }
        }
        Self::new(layout, rows).expect("non-empty identity map")
    }

    pub fn layout(&self) -> StackedLayout {
        self.layout
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[CollocationRow<S>] {
        &self.rows
    }

    fn check_layout(&self, v: &StackedVector<S>) -> Result<()> {
        if v.layout() != self.layout {
            return Err(self.layout.mismatch_error(&v.layout()));
        }
        Ok(())
    }

    /// L·v as a dense vector of length `num_rows`.
    pub fn apply(&self, v: &StackedVector<S>) -> Result<Vec<S>> {
        self.check_layout(v)?;
        let mut out = vec![S::zero(); self.rows.len()];
        self.apply_slice_into(v.values(), &mut out);
        Ok(out)
    }

    /// Hot-path variant on raw storage; the layout is assumed checked.
    pub(crate) fn apply_slice_into(&self, values: &[S], out: &mut [S]) {
        debug_assert_eq!(values.len(), self.layout.len());
        debug_assert_eq!(out.len(), self.rows.len());
        let mut start = 0;
        for (row, &end) in self.row_ends.iter().enumerate() {
            let mut acc = S::zero();
            for &(offset, weight) in &self.flat[start..end] {
                acc += weight * values[offset];
            }
            out[row] = acc;
            start = end;
        }
    }

    /// ⟨y, z⟩_G = (Ly)ᴴ(Lz), conjugating the first argument.
    pub fn g_inner(&self, y: &StackedVector<S>, z: &StackedVector<S>) -> Result<S> {
        let ly = self.apply(y)?;
        let lz = self.apply(z)?;
        Ok(dot_conj(&ly, &lz))
    }

    /// ‖y‖_G = ‖Ly‖₂. Computed as a sum of squared moduli, so it cannot
    /// go negative under round-off.
    pub fn g_norm(&self, y: &StackedVector<S>) -> Result<S::Real> {
        let ly = self.apply(y)?;
        Ok(l2_norm(&ly))
    }
}
