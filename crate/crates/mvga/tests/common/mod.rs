//! Shared test oracles, kept independent of the library's computation
//! paths: exact monomial stacked evaluation, dense shift-operator and
//! Gram-matrix assembly, a reference Gram-Schmidt, and a dense
//! least-squares solve.
#![allow(dead_code)]

use mvga::gram::CollocationMap;
use mvga::stacked::{BlockId, DerivOrder, NodeSet, StackedLayout, StackedVector};
use nalgebra::{DMatrix, DVector};

/// x^α at one point.
pub fn monomial_value(alpha: &[u32], x: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(x)
        .map(|(&e, &v)| v.powi(e as i32))
        .product()
}

/// ∂_j x^α at one point: α_j x^(α−e_j).
pub fn monomial_deriv(alpha: &[u32], x: &[f64], j: usize) -> f64 {
    if alpha[j] == 0 {
        return 0.0;
    }
    let mut reduced = alpha.to_vec();
    reduced[j] -= 1;
    alpha[j] as f64 * monomial_value(&reduced, x)
}

/// ∂_{jk} x^α at one point.
pub fn monomial_deriv2(alpha: &[u32], x: &[f64], j: usize, k: usize) -> f64 {
    if alpha[j] == 0 {
        return 0.0;
    }
    let mut reduced = alpha.to_vec();
    reduced[j] -= 1;
    alpha[j] as f64 * monomial_deriv(&reduced, x, k)
}

/// Exact stacked evaluation of x^α: values and analytic partials.
pub fn monomial_stacked_column(
    alpha: &[u32],
    nodes: &NodeSet<f64>,
    order: DerivOrder,
) -> StackedVector<f64> {
    let layout = StackedLayout::new(nodes.len(), nodes.dim(), order);
    let d = nodes.dim();
    let mut values = vec![0.0; layout.len()];
    for t in 0..nodes.len() {
        let x = nodes.node(t);
        values[t] = monomial_value(alpha, x);
        if order.as_u8() >= 1 {
            for j in 0..d {
                let pos = BlockId::Grad(j).position(d) * nodes.len() + t;
                values[pos] = monomial_deriv(alpha, x, j);
            }
        }
        if order.as_u8() >= 2 {
            for j in 0..d {
                for k in j..d {
                    let pos = BlockId::Hess(j, k).position(d) * nodes.len() + t;
                    values[pos] = monomial_deriv2(alpha, x, j, k);
                }
            }
        }
    }
    StackedVector::from_values(layout, values).unwrap()
}

/// Dense assembly of the block shift operator for coordinate `u`:
/// χ on every block diagonal, identity couplings value→∂u, ∂k→∂uk (twice
/// for the repeated pair).
pub fn dense_shift_matrix(u: usize, nodes: &NodeSet<f64>, order: DerivOrder) -> DMatrix<f64> {
    let d = nodes.dim();
    let m = nodes.len();
    let layout = StackedLayout::new(m, d, order);
    let n = layout.len();
    let mut a = DMatrix::zeros(n, n);
    let blocks = BlockId::all(d, order);
    // diagonal χ blocks
    for b in &blocks {
        let off = b.position(d) * m;
        for t in 0..m {
            a[(off + t, off + t)] = nodes.coord(t, u);
        }
    }
    if order.as_u8() >= 1 {
        let dst = BlockId::Grad(u).position(d) * m;
        for t in 0..m {
            a[(dst + t, t)] += 1.0;
        }
    }
    if order.as_u8() >= 2 {
        for j in 0..d {
            for k in j..d {
                let dst = BlockId::Hess(j, k).position(d) * m;
                if u == j {
                    let src = BlockId::Grad(k).position(d) * m;
                    for t in 0..m {
                        a[(dst + t, src + t)] += 1.0;
                    }
                }
                if u == k {
                    let src = BlockId::Grad(j).position(d) * m;
                    for t in 0..m {
                        a[(dst + t, src + t)] += 1.0;
                    }
                }
            }
        }
    }
    a
}

/// Dense L from the map's rows.
pub fn dense_l(map: &CollocationMap<f64>) -> DMatrix<f64> {
    let layout = map.layout();
    let mut l = DMatrix::zeros(map.num_rows(), layout.len());
    for (r, row) in map.rows().iter().enumerate() {
        for term in row.terms() {
            let col = term.block.position(layout.d) * layout.m + term.node;
            l[(r, col)] += term.weight;
        }
    }
    l
}

/// Dense G = LᵀL.
pub fn dense_g(map: &CollocationMap<f64>) -> DMatrix<f64> {
    let l = dense_l(map);
    l.transpose() * l
}

/// yᵀGz through the dense matrix.
pub fn dense_quadratic(g: &DMatrix<f64>, y: &[f64], z: &[f64]) -> f64 {
    let yv = DVector::from_column_slice(y);
    let zv = DVector::from_column_slice(z);
    (yv.transpose() * g * zv)[(0, 0)]
}

/// Classical Gram-Schmidt with a configurable number of passes under the
/// dense-G inner product. Returns the orthonormal columns, the effective
/// rank (same relative breakdown rule as the library), and the triangular
/// projection factor with columns = input columns in the produced basis.
pub fn reference_gs(
    columns: &[Vec<f64>],
    g: &DMatrix<f64>,
    passes: usize,
    breakdown_tol: f64,
) -> (Vec<Vec<f64>>, usize, DMatrix<f64>) {
    let n = columns.len();
    let mut r = DMatrix::zeros(n, n);
    let mut q: Vec<Vec<f64>> = Vec::new();
    for (i, col) in columns.iter().enumerate() {
        let mut w = col.clone();
        let reference = dense_quadratic(g, &w, &w).max(0.0).sqrt();
        for _ in 0..passes {
            for (k, qk) in q.iter().enumerate() {
                let proj = dense_quadratic(g, qk, &w);
                r[(k, i)] += proj;
                for (wv, &qv) in w.iter_mut().zip(qk) {
                    *wv -= proj * qv;
                }
            }
        }
        let norm = dense_quadratic(g, &w, &w).max(0.0).sqrt();
        if norm <= breakdown_tol * reference {
            let t = q.len();
            return (q, t, r);
        }
        r[(i, i)] = norm;
        for wv in w.iter_mut() {
            *wv /= norm;
        }
        q.push(w);
    }
    let t = q.len();
    (q, t, r)
}

/// Dense least squares min ‖Ax − b‖₂ by SVD.
pub fn dense_least_squares(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(&DVector::from_column_slice(b), 1e-13)
        .expect("SVD least-squares solve")
        .iter()
        .copied()
        .collect()
}

/// Max |aᵢ − bᵢ|.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}
