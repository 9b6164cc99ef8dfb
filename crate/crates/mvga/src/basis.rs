//! Total-degree monomial basis in graded order with generating parents.
//!
//! The basis is ordered by total degree, ties broken at the first
//! coordinate where the exponents differ, larger exponent first. Every
//! element beyond the constant has a minimal generating parent: the
//! earliest basis element whose exponent vector differs by a single unit
//! step along one coordinate. That parent table is what drives the
//! shift-and-orthogonalize recurrence downstream.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::HashMap;

/// Exponent vector of a multivariate monomial, with the total degree cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    total_degree: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let sum: u64 = exponents.iter().map(|&e| u64::from(e)).sum();
        let total_degree = u32::try_from(sum).map_err(|_| Error::BasisSizeOverflow {
            d: exponents.len(),
            n: u32::MAX,
        })?;
        Ok(Self {
            exponents,
            total_degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.total_degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn exponent(&self, coord: usize) -> u32 {
        self.exponents[coord]
    }
}

/// Comparator of the graded ordering: lower total degree first; within a
/// degree, the multi-index with the larger exponent at the first differing
/// coordinate comes first.
pub fn graded_cmp(a: &MultiIndex, b: &MultiIndex) -> Ordering {
    debug_assert_eq!(a.dim(), b.dim());
    a.total_degree
        .cmp(&b.total_degree)
        .then_with(|| {
            for (&ea, &eb) in a.exponents.iter().zip(b.exponents.iter()) {
                if ea != eb {
                    // larger exponent sorts earlier
                    return eb.cmp(&ea);
                }
            }
            Ordering::Equal
        })
}

/// Minimal generating parent of a basis element: `source` is the 0-based
/// position of the earlier element, `coord` the 0-based coordinate with
/// `indices[i] = indices[source] + e_coord`.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Parent {
    pub source: usize,
    pub coord: usize,
}

/// The ordered monomial basis of the total-degree space, dimension
/// C(n+d, d), optionally carrying the parent table.
#[derive(Clone, PartialEq, Debug)]
pub struct MonomialBasis {
    d: usize,
    n: u32,
    indices: Vec<MultiIndex>,
    parents: Option<Vec<Parent>>,
}

impl MonomialBasis {
    /// C(n+d, d), with an explicit error instead of wraparound when the
    /// count exceeds the platform's index type.
    pub fn size(d: usize, n: u32) -> Result<usize> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let overflow = || Error::BasisSizeOverflow { d, n };
        let mut acc: u128 = 1;
        for i in 1..=d as u128 {
            let factor = u128::from(n) + i;
            acc = acc.checked_mul(factor).ok_or_else(overflow)? / i;
        }
        usize::try_from(acc).map_err(|_| overflow())
    }

    /// Enumerates all multi-indices with |α| ≤ n in graded order. The
    /// parent table is left unbuilt.
    pub fn enumerate(d: usize, n: u32) -> Result<Self> {
        let g = Self::size(d, n)?;
        let mut indices = Vec::with_capacity(g);
        let mut current = vec![0u32; d];
        fill(&mut indices, &mut current, 0, n);
        debug_assert_eq!(indices.len(), g);
        indices.sort_by(graded_cmp);
        Ok(Self {
            d,
            n,
            indices,
            parents: None,
        })
    }

    /// Enumerates the basis and builds the parent table.
    pub fn with_parents(d: usize, n: u32) -> Result<Self> {
        let mut basis = Self::enumerate(d, n)?;
        basis.build_parent_table()?;
        Ok(basis)
    }

    /// For every element beyond the first, finds the minimal earlier
    /// element at unit exponent distance.
    pub fn build_parent_table(&mut self) -> Result<()> {
        let mut position: HashMap<&[u32], usize> = HashMap::with_capacity(self.indices.len());
        for (i, idx) in self.indices.iter().enumerate() {
            position.insert(idx.exponents(), i);
        }
        let mut parents = Vec::with_capacity(self.indices.len().saturating_sub(1));
        for i in 1..self.indices.len() {
            let alpha = &self.indices[i];
            let mut best: Option<Parent> = None;
            let mut probe = alpha.exponents().to_vec();
            for u in 0..self.d {
                if alpha.exponent(u) == 0 {
                    continue;
                }
                probe[u] -= 1;
                if let Some(&j) = position.get(probe.as_slice()) {
                    if best.map_or(true, |b| j < b.source) {
                        best = Some(Parent { source: j, coord: u });
                    }
                }
                probe[u] += 1;
            }
            // a downward-closed graded enumeration always has a parent
            let parent = best.ok_or_else(|| {
                Error::Internal(format!("no generating parent for basis element {i}"))
            })?;
            debug_assert!(parent.source < i);
            parents.push(parent);
        }
        self.parents = Some(parents);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of basis elements, g = C(n+d, d).
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn has_parents(&self) -> bool {
        self.parents.is_some()
    }

    /// Parent of element `i` (0-based, `i ≥ 1`).
    pub fn parent(&self, i: usize) -> Result<Parent> {
        let parents = self.parents.as_ref().ok_or(Error::MissingParentTable)?;
        if i == 0 || i > parents.len() {
            return Err(Error::Internal(format!(
                "parent requested for element {i} of a basis with {} elements",
                self.indices.len()
            )));
        }
        Ok(parents[i - 1])
    }

    pub fn parents(&self) -> Result<&[Parent]> {
        self.parents
            .as_deref()
            .ok_or(Error::MissingParentTable)
    }
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, coord: usize, budget: u32) {
    if coord + 1 == current.len() {
        for e in 0..=budget {
            current[coord] = e;
            out.push(
                MultiIndex::new(current.clone()).expect("non-empty exponent vector"),
            );
        }
        current[coord] = 0;
        return;
    }
    for e in 0..=budget {
        current[coord] = e;
        fill(out, current, coord + 1, budget - e);
    }
    current[coord] = 0;
}
