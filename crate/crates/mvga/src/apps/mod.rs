//! Application builders: collocation maps, right-hand sides, and
//! coefficient solves for the shipped least-squares systems.
//!
//! Every builder assembles the fitting node set (interior group first,
//! then boundary groups), the sparse collocation map that doubles as the
//! fitting inner product, and the right-hand side aligned with the map's
//! rows.

pub mod geometry;
pub mod problems;
mod solve;

pub use solve::{solve_coefficients, SolvePath, SolveReport};

use crate::error::{Error, Result};
use crate::gram::{CollocationMap, CollocationRow, CollocationTerm};
use crate::stacked::{BlockId, DerivOrder, NodeSet, StackedLayout};
use std::ops::Range;

/// Index ranges of the node groups inside the assembled fitting set.
/// Groups are disjoint and cover the set; unused groups are empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodePartition {
    pub interior: Range<usize>,
    pub dirichlet: Range<usize>,
    pub neumann: Range<usize>,
}

impl NodePartition {
    fn interior_only(m: usize) -> Self {
        Self {
            interior: 0..m,
            dirichlet: m..m,
            neumann: m..m,
        }
    }
}

/// A least-squares system: the assembled nodes, the collocation map that
/// serves as both the coefficient matrix recipe and the fitting inner
/// product, and the right-hand side.
#[derive(Clone, Debug)]
pub struct LsProblem {
    pub nodes: NodeSet<f64>,
    pub order: DerivOrder,
    pub map: CollocationMap<f64>,
    pub rhs: Vec<f64>,
    pub partition: NodePartition,
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch {
            what,
            expected,
            got,
        });
    }
    Ok(())
}

fn check_finite(what: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

/// Hermite fitting: function values everywhere, all first partials on the
/// boundary group. Rows are the value functional at every node followed by
/// one block of boundary derivative rows per coordinate; the right-hand
/// side stacks in the same order.
pub fn build_hermite(
    interior: &NodeSet<f64>,
    boundary: Option<&NodeSet<f64>>,
    values: &[f64],
    boundary_derivs: &[Vec<f64>],
) -> Result<LsProblem> {
    let d = interior.dim();
    let m0 = interior.len();
    let m1 = boundary.map_or(0, NodeSet::len);
    let nodes = match boundary {
        Some(b) => interior.concat(b)?,
        None => interior.clone(),
    };
    let m = m0 + m1;
    check_len("function values", m, values.len())?;
    check_len("boundary derivative groups", d, boundary_derivs.len())?;
    for derivs in boundary_derivs {
        check_len("boundary derivative values", m1, derivs.len())?;
    }
    check_finite("function values", values)?;

    let layout = StackedLayout::new(m, d, DerivOrder::One);
    let mut rows = Vec::with_capacity(m + d * m1);
    let mut rhs = Vec::with_capacity(m + d * m1);
    for j in 0..m {
        rows.push(CollocationRow::single(BlockId::Value, j, 1.0));
        rhs.push(values[j]);
    }
    for (axis, derivs) in boundary_derivs.iter().enumerate() {
        check_finite("boundary derivative values", derivs)?;
        for (i, &v) in derivs.iter().enumerate() {
            rows.push(CollocationRow::single(BlockId::Grad(axis), m0 + i, 1.0));
            rhs.push(v);
        }
    }
    Ok(LsProblem {
        nodes,
        order: DerivOrder::One,
        map: CollocationMap::new(layout, rows)?,
        rhs,
        partition: NodePartition {
            interior: 0..m0,
            dirichlet: m0..m,
            neumann: m..m,
        },
    })
}

/// Interpolation of function values, stacked to second order so that
/// derivative blocks are recovered by evaluation.
pub fn build_interpolation(nodes: &NodeSet<f64>, values: &[f64]) -> Result<LsProblem> {
    build_interpolation_with_order(nodes, values, DerivOrder::Two)
}

pub fn build_interpolation_with_order(
    nodes: &NodeSet<f64>,
    values: &[f64],
    order: DerivOrder,
) -> Result<LsProblem> {
    let m = nodes.len();
    check_len("function values", m, values.len())?;
    check_finite("function values", values)?;
    let layout = StackedLayout::new(m, nodes.dim(), order);
    Ok(LsProblem {
        nodes: nodes.clone(),
        order,
        map: CollocationMap::value_selection(layout),
        rhs: values.to_vec(),
        partition: NodePartition::interior_only(m),
    })
}

/// Collocation of u + αΔu = f on the interior group and u = h on the
/// Dirichlet boundary group. `alpha` is sampled per interior node.
pub fn build_poisson_dirichlet(
    interior: &NodeSet<f64>,
    boundary: &NodeSet<f64>,
    alpha: &[f64],
    f_values: &[f64],
    h_values: &[f64],
) -> Result<LsProblem> {
    let d = interior.dim();
    let m0 = interior.len();
    let m1 = boundary.len();
    check_len("alpha samples", m0, alpha.len())?;
    check_len("interior right-hand side", m0, f_values.len())?;
    check_len("boundary values", m1, h_values.len())?;
    check_finite("alpha samples", alpha)?;
    check_finite("interior right-hand side", f_values)?;
    check_finite("boundary values", h_values)?;

    let nodes = interior.concat(boundary)?;
    let m = m0 + m1;
    let layout = StackedLayout::new(m, d, DerivOrder::Two);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for j in 0..m0 {
        rows.push(operator_row(j, alpha[j], d));
        rhs.push(f_values[j]);
    }
    for j in 0..m1 {
        rows.push(CollocationRow::single(BlockId::Value, m0 + j, 1.0));
        rhs.push(h_values[j]);
    }
    Ok(LsProblem {
        nodes,
        order: DerivOrder::Two,
        map: CollocationMap::new(layout, rows)?,
        rhs,
        partition: NodePartition {
            interior: 0..m0,
            dirichlet: m0..m,
            neumann: m..m,
        },
    })
}

/// Collocation of u + αΔu = f with u = h₁ on the Dirichlet group and
/// ∇u·n = h₂ on the Neumann group. `normals` holds one outward unit vector
/// per Neumann node.
#[allow(clippy::too_many_arguments)]
pub fn build_poisson_mixed(
    interior: &NodeSet<f64>,
    dirichlet: &NodeSet<f64>,
    neumann: &NodeSet<f64>,
    normals: &NodeSet<f64>,
    alpha: &[f64],
    f_values: &[f64],
    h1_values: &[f64],
    h2_values: &[f64],
) -> Result<LsProblem> {
    let d = interior.dim();
    let m0 = interior.len();
    let md = dirichlet.len();
    let mn = neumann.len();
    check_len("alpha samples", m0, alpha.len())?;
    check_len("interior right-hand side", m0, f_values.len())?;
    check_len("Dirichlet values", md, h1_values.len())?;
    check_len("Neumann values", mn, h2_values.len())?;
    check_len("normal vectors", mn, normals.len())?;
    check_len("normal dimension", d, normals.dim())?;
    check_finite("alpha samples", alpha)?;
    check_finite("interior right-hand side", f_values)?;
    check_finite("Dirichlet values", h1_values)?;
    check_finite("Neumann values", h2_values)?;
    for j in 0..mn {
        let norm: f64 = (0..d)
            .map(|a| normals.coord(j, a).powi(2))
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitNormal { node: j, norm });
        }
    }

    let nodes = interior.concat(dirichlet)?.concat(neumann)?;
    let m = m0 + md + mn;
    let layout = StackedLayout::new(m, d, DerivOrder::Two);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for j in 0..m0 {
        rows.push(operator_row(j, alpha[j], d));
        rhs.push(f_values[j]);
    }
    for j in 0..md {
        rows.push(CollocationRow::single(BlockId::Value, m0 + j, 1.0));
        rhs.push(h1_values[j]);
    }
    for j in 0..mn {
        let node = m0 + md + j;
        let mut terms = Vec::with_capacity(d);
        for axis in 0..d {
            let w = normals.coord(j, axis);
            if w != 0.0 {
                terms.push(CollocationTerm::new(BlockId::Grad(axis), node, w));
            }
        }
        rows.push(CollocationRow::new(terms)?);
        rhs.push(h2_values[j]);
    }
    Ok(LsProblem {
        nodes,
        order: DerivOrder::Two,
        map: CollocationMap::new(layout, rows)?,
        rhs,
        partition: NodePartition {
            interior: 0..m0,
            dirichlet: m0..m0 + md,
            neumann: m0 + md..m,
        },
    })
}

/// Value plus α times the Laplacian at one node. Zero-α rows collapse to
/// the bare value functional.
fn operator_row(node: usize, alpha: f64, d: usize) -> CollocationRow<f64> {
    let mut terms = vec![CollocationTerm::new(BlockId::Value, node, 1.0)];
    if alpha != 0.0 {
        for axis in 0..d {
            terms.push(CollocationTerm::new(BlockId::Hess(axis, axis), node, alpha));
        }
    }
    CollocationRow::new(terms).expect("non-empty operator row")
}
