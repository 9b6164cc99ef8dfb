//! Evaluation stage: reconstructs the discrete G-orthogonal basis at new
//! nodes from the triangular factor and the parent table, then combines
//! columns with a coefficient vector into stacked outputs.
//!
//! Column 1 is the stacked constant scaled by 1/R̃₁₁; column i applies the
//! parent's shift and subtracts the R̃-weighted earlier columns. The
//! recurrence needs every previous column, so the table is retained while
//! building; polynomial evaluation folds E·c on the fly.

use crate::arnoldi::FitModel;
use crate::colmat::{axpy, subtract_scaled_columns, ColMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stacked::{
    constant_column, shift_into, BlockId, NodeSet, StackedLayout, StackedVector,
};
use num_traits::{Float, One, Zero};

/// Basis evaluations at new nodes: column j holds the j-th orthogonal
/// basis function's stacked values.
#[derive(Clone, Debug)]
pub struct EvalTable<S: Scalar> {
    layout: StackedLayout,
    table: ColMatrix<S>,
    extrapolation: bool,
}

impl<S: Scalar> EvalTable<S> {
    pub fn layout(&self) -> StackedLayout {
        self.layout
    }

    pub fn ncols(&self) -> usize {
        self.table.ncols()
    }

    pub fn col(&self, j: usize) -> &[S] {
        self.table.col(j)
    }

    /// True when some evaluation node leaves the fitting nodes' bounding
    /// box by more than 10% of its width. Diagnostic only.
    pub fn extrapolation(&self) -> bool {
        self.extrapolation
    }

    /// E·c reshaped into stacked blocks.
    pub fn combine(&self, coeffs: &[S]) -> Result<StackedOutput<S>> {
        if coeffs.len() != self.table.ncols() {
            return Err(Error::LengthMismatch {
                what: "coefficient vector",
                expected: self.table.ncols(),
                got: coeffs.len(),
            });
        }
        let mut out = vec![S::zero(); self.layout.len()];
        for (j, &c) in coeffs.iter().enumerate() {
            axpy(&mut out, self.table.col(j), c);
        }
        Ok(StackedOutput {
            inner: StackedVector::from_values(self.layout, out)?,
        })
    }
}

/// Stacked values of the fitted polynomial at evaluation nodes.
#[derive(Clone, Debug)]
pub struct StackedOutput<S: Scalar> {
    inner: StackedVector<S>,
}

impl<S: Scalar> StackedOutput<S> {
    pub fn layout(&self) -> StackedLayout {
        self.inner.layout()
    }

    pub fn as_stacked(&self) -> &StackedVector<S> {
        &self.inner
    }

    /// Function values, one per evaluation node.
    pub fn values(&self) -> &[S] {
        self.inner.block(BlockId::Value).expect("value block")
    }

    pub fn grad(&self, j: usize) -> Result<&[S]> {
        self.inner.block(BlockId::Grad(j))
    }

    pub fn hess(&self, j: usize, k: usize) -> Result<&[S]> {
        self.inner.block(BlockId::Hess(j, k))
    }
}

/// Evaluates all t basis columns at the new nodes.
pub fn eval_basis<S: Scalar>(model: &FitModel<S>, new_nodes: &NodeSet<S>) -> Result<EvalTable<S>> {
    let mut builder = ColumnBuilder::new(model, new_nodes)?;
    while builder.advance()?.is_some() {}
    Ok(EvalTable {
        layout: builder.layout,
        table: builder.table,
        extrapolation: builder.extrapolation,
    })
}

/// Evaluates the fitted polynomial (and derivative blocks) at the new
/// nodes, folding the coefficient combination column by column.
pub fn eval_poly<S: Scalar>(
    model: &FitModel<S>,
    new_nodes: &NodeSet<S>,
) -> Result<StackedOutput<S>> {
    let coeffs = model.coeffs().ok_or(Error::MissingCoefficients)?.to_vec();
    let mut builder = ColumnBuilder::new(model, new_nodes)?;
    let mut out = vec![S::zero(); builder.layout.len()];
    while let Some(j) = builder.advance()? {
        axpy(&mut out, builder.table.col(j), coeffs[j]);
    }
    Ok(StackedOutput {
        inner: StackedVector::from_values(builder.layout, out)?,
    })
}

struct ColumnBuilder<'a, S: Scalar> {
    model: &'a FitModel<S>,
    nodes: &'a NodeSet<S>,
    layout: StackedLayout,
    table: ColMatrix<S>,
    extrapolation: bool,
    next: usize,
}

impl<'a, S: Scalar> ColumnBuilder<'a, S> {
    fn new(model: &'a FitModel<S>, nodes: &'a NodeSet<S>) -> Result<Self> {
        if nodes.dim() != model.basis().dim() {
            return Err(Error::LengthMismatch {
                what: "evaluation node dimension",
                expected: model.basis().dim(),
                got: nodes.dim(),
            });
        }
        let layout = StackedLayout::new(nodes.len(), nodes.dim(), model.order());
        for i in 0..model.t() {
            let diag = model.rtilde().get(i, i);
            if !(diag.real() > S::Real::zero()) || diag.imag() != S::Real::zero() {
                return Err(Error::NonPositiveDiagonal { index: i });
            }
        }
        Ok(Self {
            model,
            nodes,
            layout,
            table: ColMatrix::with_capacity(layout.len(), model.t()),
            extrapolation: leaves_bounding_box(model.nodes(), nodes),
            next: 0,
        })
    }

    /// Builds the next column; returns its index, or `None` when done.
    fn advance(&mut self) -> Result<Option<usize>> {
        let i = self.next;
        if i >= self.model.t() {
            return Ok(None);
        }
        let rtilde = self.model.rtilde();
        if i == 0 {
            let e = constant_column(self.nodes, self.model.order());
            let inv = S::Real::one() / rtilde.get(0, 0).real();
            let col: Vec<S> = e.values().iter().map(|&x| x.scale(inv)).collect();
            self.table.push_col(&col);
        } else {
            let parent = self.model.basis().parent(i)?;
            let mut w = vec![S::zero(); self.layout.len()];
            shift_into(
                parent.coord,
                self.table.col(parent.source),
                &mut w,
                self.nodes,
                self.layout,
            );
            let upper = rtilde.upper_column(i);
            subtract_scaled_columns(&mut w, &self.table, &upper);
            let inv = S::Real::one() / rtilde.get(i, i).real();
            for x in w.iter_mut() {
                *x = x.scale(inv);
            }
            self.table.push_col(&w);
        }
        self.next = i + 1;
        Ok(Some(i))
    }
}

/// Bounding-box extrapolation check over both real and imaginary parts,
/// with a 10% width margin per coordinate.
fn leaves_bounding_box<S: Scalar>(fitted: &NodeSet<S>, new_nodes: &NodeSet<S>) -> bool {
    let d = fitted.dim();
    for axis in 0..d {
        for part in 0..2 {
            let value = |s: S| if part == 0 { s.real() } else { s.imag() };
            let mut lo = value(fitted.coord(0, axis));
            let mut hi = lo;
            for j in 1..fitted.len() {
                let v = value(fitted.coord(j, axis));
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let margin = (hi - lo) * S::real_from_f64(0.1);
            for j in 0..new_nodes.len() {
                let v = value(new_nodes.coord(j, axis));
                if v < lo - margin || v > hi + margin {
                    return true;
                }
            }
        }
    }
    false
}
