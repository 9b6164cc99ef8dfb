//! Stacked evaluation vectors and the block shift operators.
//!
//! A stacked vector holds a function's values at `m` nodes followed by its
//! first and second partial derivatives there, one length-`m` block per
//! quantity: `[f | ∂1 .. ∂d | ∂11, ∂12, .., ∂1d, ∂22, .., ∂dd]`. The shift
//! operator for a coordinate multiplies by that coordinate jointly on all
//! blocks with the product rule folded in; it is applied matrix-free.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Highest derivative order carried in the stacked blocks.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum DerivOrder {
    Zero,
    One,
    Two,
}

impl DerivOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            DerivOrder::Zero => 0,
            DerivOrder::One => 1,
            DerivOrder::Two => 2,
        }
    }

    pub fn try_from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(DerivOrder::Zero),
            1 => Ok(DerivOrder::One),
            2 => Ok(DerivOrder::Two),
            _ => Err(Error::InvalidInput(format!(
                "derivative order must be 0, 1 or 2, got {v}"
            ))),
        }
    }
}

/// Number of stacked blocks: 1, 1+d, or 1+d+d(d+1)/2.
pub fn stacked_dim(d: usize, order: DerivOrder) -> usize {
    match order {
        DerivOrder::Zero => 1,
        DerivOrder::One => 1 + d,
        DerivOrder::Two => 1 + d + d * (d + 1) / 2,
    }
}

/// Identifier of one block of a stacked vector. Coordinates are 0-based;
/// `Hess(j, k)` requires `j ≤ k`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum BlockId {
    Value,
    Grad(usize),
    Hess(usize, usize),
}

impl BlockId {
    /// Derivative order of the quantity in this block.
    pub fn order(self) -> u8 {
        match self {
            BlockId::Value => 0,
            BlockId::Grad(_) => 1,
            BlockId::Hess(..) => 2,
        }
    }

    /// Position of the block within the stacked layout.
    pub fn position(self, d: usize) -> usize {
        match self {
            BlockId::Value => 0,
            BlockId::Grad(j) => 1 + j,
            BlockId::Hess(j, k) => 1 + d + j * d - j * (j + 1) / 2 + k,
        }
    }

    pub fn valid_for(self, d: usize, order: DerivOrder) -> bool {
        match self {
            BlockId::Value => true,
            BlockId::Grad(j) => j < d && order.as_u8() >= 1,
            BlockId::Hess(j, k) => j <= k && k < d && order.as_u8() >= 2,
        }
    }

    /// Serialized name: `f`, `d1`..`dd`, `d11`..`ddd` (1-based digits).
    pub fn name(self) -> String {
        match self {
            BlockId::Value => "f".to_string(),
            BlockId::Grad(j) => format!("d{}", j + 1),
            BlockId::Hess(j, k) => format!("d{}{}", j + 1, k + 1),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "f" {
            return Ok(BlockId::Value);
        }
        let digits = s
            .strip_prefix('d')
            .ok_or_else(|| Error::Parse(format!("unknown block name {s:?}")))?;
        let parts: Vec<usize> = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|v| v as usize)
                    .ok_or_else(|| Error::Parse(format!("unknown block name {s:?}")))
            })
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [j] if *j >= 1 => Ok(BlockId::Grad(j - 1)),
            [j, k] if *j >= 1 && *k >= 1 && j <= k => Ok(BlockId::Hess(j - 1, k - 1)),
            _ => Err(Error::Parse(format!("unknown block name {s:?}"))),
        }
    }

    /// All blocks of a stacked layout, in stacking order.
    pub fn all(d: usize, order: DerivOrder) -> Vec<BlockId> {
        let mut out = Vec::with_capacity(stacked_dim(d, order));
        out.push(BlockId::Value);
        if order.as_u8() >= 1 {
            for j in 0..d {
                out.push(BlockId::Grad(j));
            }
        }
        if order.as_u8() >= 2 {
            for j in 0..d {
                for k in j..d {
                    out.push(BlockId::Hess(j, k));
                }
            }
        }
        out
    }
}

/// Shape of a stacked vector: node count, dimension, derivative order.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct StackedLayout {
    pub m: usize,
    pub d: usize,
    pub order: DerivOrder,
}

impl StackedLayout {
    pub fn new(m: usize, d: usize, order: DerivOrder) -> Self {
        Self { m, d, order }
    }

    pub fn block_count(&self) -> usize {
        stacked_dim(self.d, self.order)
    }

    pub fn len(&self) -> usize {
        self.m * self.block_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_range(&self, block: BlockId) -> Result<std::ops::Range<usize>> {
        if !block.valid_for(self.d, self.order) {
            return Err(Error::InvalidBlock {
                block: block.name(),
                d: self.d,
                order: self.order.as_u8(),
            });
        }
        let start = block.position(self.d) * self.m;
        Ok(start..start + self.m)
    }

    pub fn mismatch_error(&self, got: &StackedLayout) -> Error {
        Error::LayoutMismatch {
            expected_m: self.m,
            expected_d: self.d,
            expected_order: self.order.as_u8(),
            got_m: got.m,
            got_d: got.d,
            got_order: got.order.as_u8(),
        }
    }
}

/// A set of nodes in `d` dimensions, stored row-major (`m × d`).
#[derive(Clone, PartialEq, Debug)]
pub struct NodeSet<S: Scalar> {
    d: usize,
    coords: Vec<S>,
}

impl<S: Scalar> NodeSet<S> {
    pub fn new(d: usize, coords: Vec<S>) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if coords.is_empty() || coords.len() % d != 0 {
            return Err(Error::LengthMismatch {
                what: "node coordinates",
                expected: d.max(coords.len().div_ceil(d) * d),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("node coordinates"));
        }
        Ok(Self { d, coords })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::LengthMismatch {
                    what: "node row",
                    expected: d,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(d, coords)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn coord(&self, node: usize, axis: usize) -> S {
        self.coords[node * self.d + axis]
    }

    pub fn node(&self, j: usize) -> &[S] {
        &self.coords[j * self.d..(j + 1) * self.d]
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    /// Concatenation, preserving node order of `self` then `other`.
    pub fn concat(&self, other: &NodeSet<S>) -> Result<NodeSet<S>> {
        if other.d != self.d {
            return Err(Error::LengthMismatch {
                what: "node dimension",
                expected: self.d,
                got: other.d,
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        NodeSet::new(self.d, coords)
    }
}

/// Flat block vector over a stacked layout.
#[derive(Clone, PartialEq, Debug)]
pub struct StackedVector<S: Scalar> {
    layout: StackedLayout,
    values: Vec<S>,
}

impl<S: Scalar> StackedVector<S> {
    pub fn zeros(layout: StackedLayout) -> Self {
        Self {
            layout,
            values: vec![S::zero(); layout.len()],
        }
    }

    pub fn from_values(layout: StackedLayout, values: Vec<S>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::LengthMismatch {
                what: "stacked vector",
                expected: layout.len(),
                got: values.len(),
            });
        }
        Ok(Self { layout, values })
    }

    pub fn layout(&self) -> StackedLayout {
        self.layout
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn block(&self, block: BlockId) -> Result<&[S]> {
        Ok(&self.values[self.layout.block_range(block)?])
    }

    pub fn block_mut(&mut self, block: BlockId) -> Result<&mut [S]> {
        let range = self.layout.block_range(block)?;
        Ok(&mut self.values[range])
    }
}

/// Stacked evaluation of the constant function 1: ones in the value
/// block, zeros in every derivative block.
pub fn constant_column<S: Scalar>(nodes: &NodeSet<S>, order: DerivOrder) -> StackedVector<S> {
    let layout = StackedLayout::new(nodes.len(), nodes.dim(), order);
    let mut v = StackedVector::zeros(layout);
    for t in 0..layout.m {
        v.values[t] = S::one();
    }
    v
}

/// Applies the shift operator for coordinate `u` (0-based): multiplication
/// by that coordinate on every block, with the product-rule couplings
///
/// ```text
/// out.f      = χ·f
/// out.∂j     = δ_{uj}·f + χ·∂j
/// out.∂jk    = δ_{uj}·∂k + δ_{uk}·∂j + χ·∂jk
/// ```
///
/// where χ is the u-th coordinate of each node.
pub fn apply_shift<S: Scalar>(
    u: usize,
    v: &StackedVector<S>,
    nodes: &NodeSet<S>,
) -> Result<StackedVector<S>> {
    let layout = v.layout();
    if nodes.dim() != layout.d || nodes.len() != layout.m {
        let got = StackedLayout::new(nodes.len(), nodes.dim(), layout.order);
        return Err(layout.mismatch_error(&got));
    }
    if u >= layout.d {
        return Err(Error::CoordinateOutOfRange {
            coord: u,
            d: layout.d,
        });
    }
    let mut out = vec![S::zero(); layout.len()];
    shift_into(u, v.values(), &mut out, nodes, layout);
    StackedVector::from_values(layout, out)
}

/// Matrix-free shift on raw storage; layouts are assumed checked.
pub(crate) fn shift_into<S: Scalar>(
    u: usize,
    src: &[S],
    out: &mut [S],
    nodes: &NodeSet<S>,
    layout: StackedLayout,
) {
    debug_assert_eq!(src.len(), layout.len());
    debug_assert_eq!(out.len(), layout.len());
    let m = layout.m;
    let d = layout.d;
    let value = &src[..m];

    // value block: χ·f
    for t in 0..m {
        out[t] = nodes.coord(t, u) * value[t];
    }

    if layout.order.as_u8() >= 1 {
        for j in 0..d {
            let start = (1 + j) * m;
            let grad_j = &src[start..start + m];
            if j == u {
                for t in 0..m {
                    out[start + t] = value[t] + nodes.coord(t, u) * grad_j[t];
                }
            } else {
                for t in 0..m {
                    out[start + t] = nodes.coord(t, u) * grad_j[t];
                }
            }
        }
    }

    if layout.order.as_u8() >= 2 {
        for j in 0..d {
            for k in j..d {
                let start = BlockId::Hess(j, k).position(d) * m;
                let hess = &src[start..start + m];
                for t in 0..m {
                    out[start + t] = nodes.coord(t, u) * hess[t];
                }
                if u == j {
                    let gk = (1 + k) * m;
                    for t in 0..m {
                        let g = src[gk + t];
                        out[start + t] += g;
                    }
                }
                if u == k {
                    let gj = (1 + j) * m;
                    for t in 0..m {
                        let g = src[gj + t];
                        out[start + t] += g;
                    }
                }
            }
        }
    }
}
