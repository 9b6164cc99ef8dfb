//! Fitting stage: the shift-and-orthogonalize recurrence.
//!
//! Starting from the stacked constant column, each basis element's column
//! is produced by shifting its parent's orthonormal column and running two
//! Gram-Schmidt passes in the map's G-inner product. The projections
//! accumulate into an upper-triangular factor R̃ whose diagonal holds the
//! residual G-norms; a residual norm at round-off level relative to the
//! shifted column declares breakdown and truncates the basis.

use crate::basis::MonomialBasis;
use crate::colmat::{subtract_scaled_columns, ColMatrix};
use crate::error::{Error, Result};
use crate::gram::CollocationMap;
use crate::scalar::{dot_conj, l2_norm, Scalar};
use crate::stacked::{constant_column, shift_into, DerivOrder, NodeSet, StackedLayout};
use num_traits::{Float, NumCast, One, Zero};

#[derive(Clone, Debug)]
pub struct FitOptions {
    /// Relative breakdown threshold: the residual G-norm is compared to
    /// `breakdown_tol` times the shifted column's G-norm.
    pub breakdown_tol: f64,
    /// Number of Gram-Schmidt passes per column.
    pub gs_passes: usize,
    /// Whether the orthonormal column store is retained on the model.
    pub keep_q: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            breakdown_tol: 1e-13,
            gs_passes: 2,
            keep_q: true,
        }
    }
}

/// Where and how the recurrence truncated.
#[derive(Clone, Copy, Debug)]
pub struct BreakdownInfo {
    /// 0-based index of the column whose residual vanished.
    pub column: usize,
    pub residual_norm: f64,
    pub reference_norm: f64,
}

/// Dense row-major t×t storage of the upper-triangular factor.
#[derive(Clone, PartialEq, Debug)]
pub struct Triangular<S: Scalar> {
    t: usize,
    data: Vec<S>,
}

impl<S: Scalar> Triangular<S> {
    pub fn from_row_major(t: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != t * t {
            return Err(Error::LengthMismatch {
                what: "triangular factor",
                expected: t * t,
                got: data.len(),
            });
        }
        for row in 0..t {
            for col in 0..row {
                if data[row * t + col] != S::zero() {
                    return Err(Error::InvalidInput(format!(
                        "triangular factor has a nonzero below the diagonal at ({row}, {col})"
                    )));
                }
            }
        }
        Ok(Self { t, data })
    }

    pub fn order(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> S {
        self.data[row * self.t + col]
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    /// Entries above the diagonal of column `col`, as a contiguous vector
    /// of length `col`.
    pub fn upper_column(&self, col: usize) -> Vec<S> {
        (0..col).map(|row| self.get(row, col)).collect()
    }
}

/// Result of the fitting stage: basis bookkeeping, the triangular factor,
/// and optionally the orthonormal columns and a coefficient vector.
#[derive(Clone, Debug)]
pub struct FitModel<S: Scalar> {
    basis: MonomialBasis,
    nodes: NodeSet<S>,
    order: DerivOrder,
    map: CollocationMap<S>,
    t: usize,
    rtilde: Triangular<S>,
    q: Option<ColMatrix<S>>,
    coeffs: Option<Vec<S>>,
    breakdown: Option<BreakdownInfo>,
}

impl<S: Scalar> FitModel<S> {
    /// Reassembles a model from stored parts (no orthonormal columns).
    /// Used when loading from a file.
    pub fn from_parts(
        basis: MonomialBasis,
        nodes: NodeSet<S>,
        order: DerivOrder,
        map: CollocationMap<S>,
        rtilde: Triangular<S>,
        coeffs: Option<Vec<S>>,
    ) -> Result<Self> {
        if !basis.has_parents() {
            return Err(Error::MissingParentTable);
        }
        let t = rtilde.order();
        if t == 0 || t > basis.len() {
            return Err(Error::InvalidInput(format!(
                "triangular factor order {t} incompatible with basis size {}",
                basis.len()
            )));
        }
        let layout = StackedLayout::new(nodes.len(), nodes.dim(), order);
        if map.layout() != layout {
            return Err(layout.mismatch_error(&map.layout()));
        }
        for i in 0..t {
            let diag = rtilde.get(i, i);
            if !(diag.real() > S::Real::zero()) || diag.imag() != S::Real::zero() {
                return Err(Error::NonPositiveDiagonal { index: i });
            }
        }
        if let Some(c) = &coeffs {
            if c.len() != t {
                return Err(Error::LengthMismatch {
                    what: "coefficient vector",
                    expected: t,
                    got: c.len(),
                });
            }
        }
        Ok(Self {
            basis,
            nodes,
            order,
            map,
            t,
            rtilde,
            q: None,
            coeffs,
            breakdown: None,
        })
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn nodes(&self) -> &NodeSet<S> {
        &self.nodes
    }

    pub fn order(&self) -> DerivOrder {
        self.order
    }

    pub fn map(&self) -> &CollocationMap<S> {
        &self.map
    }

    /// Effective basis size (number of orthonormal columns produced).
    pub fn t(&self) -> usize {
        self.t
    }

    /// Requested basis size g = C(n+d, d).
    pub fn g(&self) -> usize {
        self.basis.len()
    }

    pub fn is_truncated(&self) -> bool {
        self.t < self.basis.len()
    }

    pub fn rtilde(&self) -> &Triangular<S> {
        &self.rtilde
    }

    pub fn q(&self) -> Option<&ColMatrix<S>> {
        self.q.as_ref()
    }

    pub fn coeffs(&self) -> Option<&[S]> {
        self.coeffs.as_deref()
    }

    pub fn breakdown(&self) -> Option<&BreakdownInfo> {
        self.breakdown.as_ref()
    }

    pub fn set_coeffs(&mut self, coeffs: Vec<S>) -> Result<()> {
        if coeffs.len() != self.t {
            return Err(Error::LengthMismatch {
                what: "coefficient vector",
                expected: self.t,
                got: coeffs.len(),
            });
        }
        self.coeffs = Some(coeffs);
        Ok(())
    }

    /// Frees the orthonormal column store.
    pub fn discard_q(&mut self) {
        self.q = None;
    }

    /// Maximum deviation of the retained columns' G-Gram matrix from the
    /// identity: max |⟨qᵢ, qⱼ⟩_G − δᵢⱼ|.
    pub fn gram_check(&self) -> Result<f64> {
        let q = self.q.as_ref().ok_or(Error::MissingQ)?;
        let r = self.map.num_rows();
        let mut mapped = ColMatrix::with_capacity(r, self.t);
        let mut buf = vec![S::zero(); r];
        for j in 0..self.t {
            self.map.apply_slice_into(q.col(j), &mut buf);
            mapped.push_col(&buf);
        }
        use rayon::prelude::*;
        let worst = (0..self.t)
            .into_par_iter()
            .map(|i| {
                let mut local: f64 = 0.0;
                for j in i..self.t {
                    let entry = dot_conj(mapped.col(i), mapped.col(j));
                    let target = if i == j { 1.0 } else { 0.0 };
                    let dev = (entry - S::from_f64(target)).modulus();
                    let dev: f64 = <f64 as NumCast>::from(dev).unwrap_or(f64::NAN);
                    local = local.max(dev);
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }
}

/// Runs the fitting stage over the basis's parent chain.
pub fn fit<S: Scalar>(
    nodes: &NodeSet<S>,
    basis: &MonomialBasis,
    map: &CollocationMap<S>,
    order: DerivOrder,
    opts: &FitOptions,
) -> Result<FitModel<S>> {
    if !basis.has_parents() {
        return Err(Error::MissingParentTable);
    }
    if basis.dim() != nodes.dim() {
        return Err(Error::LengthMismatch {
            what: "basis dimension",
            expected: nodes.dim(),
            got: basis.dim(),
        });
    }
    if opts.gs_passes == 0 {
        return Err(Error::InvalidInput(
            "at least one Gram-Schmidt pass is required".into(),
        ));
    }
    let layout = StackedLayout::new(nodes.len(), nodes.dim(), order);
    if map.layout() != layout {
        return Err(layout.mismatch_error(&map.layout()));
    }

    let g = basis.len();
    let nrows = layout.len();
    let r = map.num_rows();
    let bd_tol = S::real_from_f64(opts.breakdown_tol);

    let mut q = ColMatrix::<S>::with_capacity(nrows, g);
    let mut mapped = ColMatrix::<S>::with_capacity(r, g);
    // working triangular factor, column-major with stride g
    let mut rwork = vec![S::zero(); g * g];
    let mut lw = vec![S::zero(); r];

    // column 1: the stacked constant
    let e = constant_column(nodes, order);
    map.apply_slice_into(e.values(), &mut lw);
    let r00 = l2_norm(&lw);
    if !r00.is_finite() {
        return Err(Error::NonFinite("constant column G-norm"));
    }
    if r00 == S::Real::zero() {
        return Err(Error::DegenerateInnerProduct);
    }
    rwork[0] = S::from_real(r00);
    let inv = S::Real::one() / r00;
    let col0: Vec<S> = e.values().iter().map(|&x| x.scale(inv)).collect();
    let lcol0: Vec<S> = lw.iter().map(|&x| x.scale(inv)).collect();
    q.push_col(&col0);
    mapped.push_col(&lcol0);

    let mut t = g;
    let mut breakdown = None;
    let mut w = vec![S::zero(); nrows];

    for i in 1..g {
        let parent = basis.parent(i)?;
        shift_into(parent.coord, q.col(parent.source), &mut w, nodes, layout);

        let mut reference_norm = S::Real::zero();
        for pass in 0..opts.gs_passes {
            map.apply_slice_into(&w, &mut lw);
            if pass == 0 {
                reference_norm = l2_norm(&lw);
            }
            let proj = projections(&mapped, &lw, i);
            subtract_scaled_columns(&mut w, &q, &proj);
            for (k, &p) in proj.iter().enumerate() {
                rwork[i * g + k] += p;
            }
        }

        map.apply_slice_into(&w, &mut lw);
        let rnorm = l2_norm(&lw);
        if !rnorm.is_finite() || w.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("orthogonalization residual"));
        }
        if rnorm <= bd_tol * reference_norm {
            breakdown = Some(BreakdownInfo {
                column: i,
                residual_norm: <f64 as NumCast>::from(rnorm).unwrap_or(f64::NAN),
                reference_norm: <f64 as NumCast>::from(reference_norm).unwrap_or(f64::NAN),
            });
            t = i;
            break;
        }
        rwork[i * g + i] = S::from_real(rnorm);
        let inv = S::Real::one() / rnorm;
        for x in w.iter_mut() {
            *x = x.scale(inv);
        }
        q.push_col(&w);
        let lcol: Vec<S> = lw.iter().map(|&x| x.scale(inv)).collect();
        mapped.push_col(&lcol);
    }

    // compact the working factor to t×t row-major
    let mut data = vec![S::zero(); t * t];
    for col in 0..t {
        for row in 0..=col {
            data[row * t + col] = rwork[col * g + row];
        }
    }
    let rtilde = Triangular::from_row_major(t, data)?;

    Ok(FitModel {
        basis: basis.clone(),
        nodes: nodes.clone(),
        order,
        map: map.clone(),
        t,
        rtilde,
        q: opts.keep_q.then_some(q),
        coeffs: None,
        breakdown,
    })
}

/// ⟨qₖ, w⟩_G for k < i, via the cached mapped columns.
fn projections<S: Scalar>(mapped: &ColMatrix<S>, lw: &[S], i: usize) -> Vec<S> {
    let work = i.saturating_mul(lw.len());
    if work >= 1 << 16 {
        use rayon::prelude::*;
        (0..i)
            .into_par_iter()
            .map(|k| dot_conj(mapped.col(k), lw))
            .collect()
    } else {
        (0..i).map(|k| dot_conj(mapped.col(k), lw)).collect()
    }
}
