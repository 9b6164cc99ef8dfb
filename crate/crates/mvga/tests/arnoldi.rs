//! Fit-stage checks: span of the produced columns, re-orthogonalization
//! quality, the univariate Hessenberg identity, and breakdown handling.

mod common;

use common::{
    dense_g, dense_quadratic, dense_shift_matrix, monomial_stacked_column, reference_gs,
};
use mvga::apps::geometry::{domain_nodes, Domain};
use mvga::arnoldi::{fit, FitOptions};
use mvga::basis::MonomialBasis;
use mvga::eval::eval_basis;
use mvga::gram::{CollocationMap, CollocationRow};
use mvga::stacked::{BlockId, DerivOrder, NodeSet, StackedLayout};
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_nodes(rng: &mut ChaCha8Rng, d: usize, m: usize) -> NodeSet<f64> {
    let coords = (0..m * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    NodeSet::new(d, coords).unwrap()
}

/// Hermite-style map: values everywhere, first derivatives on the last
/// `m1` nodes, in an order-`order` stacked space.
fn hermite_style_map(m: usize, m1: usize, d: usize, order: DerivOrder) -> CollocationMap<f64> {
    let layout = StackedLayout::new(m, d, order);
    let mut rows = Vec::new();
    for j in 0..m {
        rows.push(CollocationRow::single(BlockId::Value, j, 1.0));
    }
    for axis in 0..d {
        for j in m - m1..m {
            rows.push(CollocationRow::single(BlockId::Grad(axis), j, 1.0));
        }
    }
    CollocationMap::new(layout, rows).unwrap()
}

/// Every exact monomial column lies in the span of the first i produced
/// columns: the residual after projection is at round-off scale.
#[test]
fn span_contains_exact_monomial_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (d, n, m) in [(1usize, 4u32, 9usize), (2, 3, 14), (2, 4, 20)] {
        let nodes = random_nodes(&mut rng, d, m);
        let basis = MonomialBasis::with_parents(d, n).unwrap();
        let order = DerivOrder::One;
        let layout = StackedLayout::new(m, d, order);
        let map = CollocationMap::full_identity(layout);
        let model = fit(&nodes, &basis, &map, order, &FitOptions::default()).unwrap();
        assert_eq!(model.t(), basis.len());
        let g = dense_g(&map);
        let q = model.q().unwrap();
        for i in 0..model.t() {
            let exact = monomial_stacked_column(basis.index(i).exponents(), &nodes, order);
            let mut residual = exact.values().to_vec();
            for k in 0..=i {
                let proj = dense_quadratic(&g, q.col(k), &residual);
                for (rv, &qv) in residual.iter_mut().zip(q.col(k)) {
                    *rv -= proj * qv;
                }
            }
            let res_norm = dense_quadratic(&g, &residual, &residual).max(0.0).sqrt();
            let exact_norm = dense_quadratic(&g, exact.values(), exact.values()).sqrt();
            assert!(
                res_norm <= 1e-8 * exact_norm,
                "d={d} n={n} column {i}: residual {res_norm:e} vs norm {exact_norm:e}"
            );
        }
    }
}

/// Disk geometry with derivative rows on the boundary only, order-2
/// stacking, degree 10: the produced columns are orthonormal to 1e-10,
/// and a quadruple-pass run is no better than the shipped two passes.
#[test]
fn hermite_style_fit_gram_deviation() {
    let gen = domain_nodes(&Domain::Disk, 120, 42).unwrap();
    let nodes = gen.interior.concat(&gen.boundary).unwrap();
    let m = nodes.len();
    let map = hermite_style_map(m, 42, 2, DerivOrder::Two);
    let basis = MonomialBasis::with_parents(2, 10).unwrap();
    assert_eq!(basis.len(), 66);

    let two_pass = fit(&nodes, &basis, &map, DerivOrder::Two, &FitOptions::default()).unwrap();
    assert_eq!(two_pass.t(), 66);
    let dev2 = two_pass.gram_check().unwrap();
    assert!(dev2 <= 1e-10, "two-pass deviation {dev2:e}");

    let four_pass = fit(
        &nodes,
        &basis,
        &map,
        DerivOrder::Two,
        &FitOptions {
            gs_passes: 4,
            ..FitOptions::default()
        },
    )
    .unwrap();
    let dev4 = four_pass.gram_check().unwrap();
    assert!(dev4 <= 1e-10, "four-pass deviation {dev4:e}");
}

/// Dropping the second pass on an ill-conditioned univariate instance
/// costs orders of magnitude of orthogonality.
#[test]
fn single_pass_degrades_orthogonality() {
    let m = 60;
    let coords: Vec<f64> = (0..m).map(|j| j as f64 / (m - 1) as f64).collect();
    let nodes = NodeSet::new(1, coords).unwrap();
    let basis = MonomialBasis::with_parents(1, 30).unwrap();
    let layout = StackedLayout::new(m, 1, DerivOrder::Zero);
    let map = CollocationMap::value_selection(layout);

    let two = fit(&nodes, &basis, &map, DerivOrder::Zero, &FitOptions::default()).unwrap();
    let one = fit(
        &nodes,
        &basis,
        &map,
        DerivOrder::Zero,
        &FitOptions {
            gs_passes: 1,
            ..FitOptions::default()
        },
    )
    .unwrap();
    let dev2 = two.gram_check().unwrap();
    let dev1 = one.gram_check().unwrap();
    assert!(dev2 <= 1e-10, "re-orthogonalized deviation {dev2:e}");
    assert!(
        dev1 >= 100.0 * dev2,
        "single pass {dev1:e} vs two passes {dev2:e}"
    );
}

/// Univariate compact form: X·Q_j = Q_j·H_j + γ_j q_{j+1} e_jᵀ with H_j a
/// slice of the triangular factor and γ_j its next diagonal entry.
#[test]
fn univariate_hessenberg_identity() {
    let m = 14;
    let coords: Vec<f64> = (0..m)
        .map(|j| (std::f64::consts::PI * j as f64 / (m - 1) as f64).cos())
        .collect();
    let nodes = NodeSet::new(1, coords).unwrap();
    for order in [DerivOrder::Zero, DerivOrder::One, DerivOrder::Two] {
        let basis = MonomialBasis::with_parents(1, 10).unwrap();
        let layout = StackedLayout::new(m, 1, order);
        let map = CollocationMap::full_identity(layout);
        let model = fit(&nodes, &basis, &map, order, &FitOptions::default()).unwrap();
        let t = model.t();
        assert_eq!(t, 11);
        let q = model.q().unwrap();
        let rt = model.rtilde();
        let x = dense_shift_matrix(0, &nodes, order);
        let nrows = layout.len();

        let j = t - 1;
        let qj = DMatrix::from_fn(nrows, j, |r, c| q.col(c)[r]);
        let h = DMatrix::from_fn(j, j, |r, c| rt.get(r, c + 1));
        let mut residual = &x * &qj - &qj * &h;
        let gamma = rt.get(j, j);
        for r in 0..nrows {
            residual[(r, j - 1)] -= gamma * q.col(j)[r];
        }
        let worst = residual.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        assert!(worst <= 1e-10, "order {order:?}: residual {worst:e}");
    }
}

/// The produced columns match a plain Gram-Schmidt run on the exact
/// monomial columns (the route that uses the ill-conditioned basis
/// directly), column for column up to round-off.
#[test]
fn matches_reference_orthogonalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let nodes = random_nodes(&mut rng, 2, 12);
    let basis = MonomialBasis::with_parents(2, 3).unwrap();
    let order = DerivOrder::Two;
    let layout = StackedLayout::new(12, 2, order);
    let map = CollocationMap::value_selection(layout);
    let model = fit(&nodes, &basis, &map, order, &FitOptions::default()).unwrap();

    let columns: Vec<Vec<f64>> = (0..basis.len())
        .map(|i| {
            monomial_stacked_column(basis.index(i).exponents(), &nodes, order)
                .values()
                .to_vec()
        })
        .collect();
    let g = dense_g(&map);
    let (q_ref, t_ref, _) = reference_gs(&columns, &g, 2, 1e-13);
    assert_eq!(model.t(), t_ref);
    let q = model.q().unwrap();
    for i in 0..model.t() {
        let sign = if dense_quadratic(&g, q.col(i), &q_ref[i]) >= 0.0 {
            1.0
        } else {
            -1.0
        };
        for (a, b) in q.col(i).iter().zip(&q_ref[i]) {
            assert!(
                (a - sign * b).abs() <= 1e-10,
                "column {i}: {a} vs {b} (sign {sign})"
            );
        }
    }
}

/// Truncation survives the whole pipeline: fit, solve, and evaluation all
/// operate on the t produced columns.
#[test]
fn breakdown_truncation_end_to_end() {
    let nodes = NodeSet::new(1, vec![0.2, 0.9]).unwrap();
    let basis = MonomialBasis::with_parents(1, 3).unwrap();
    let layout = StackedLayout::new(2, 1, DerivOrder::Zero);
    let map = CollocationMap::value_selection(layout);
    let mut model = fit(&nodes, &basis, &map, DerivOrder::Zero, &FitOptions::default()).unwrap();
    assert_eq!(model.t(), 2);
    assert_eq!(model.g(), 4);
    assert!(model.is_truncated());

    // least-squares through the truncated basis still interpolates two
    // values with the (unique) affine polynomial
    let problem = mvga::apps::build_interpolation_with_order(
        &nodes,
        &[1.0, -3.0],
        DerivOrder::Zero,
    )
    .unwrap();
    let report = mvga::apps::solve_coefficients(&mut model, &problem).unwrap();
    assert_eq!(model.coeffs().unwrap().len(), 2);
    assert!(report.residual_orthogonality <= 1e-12);

    let table = eval_basis(&model, &nodes).unwrap();
    assert_eq!(table.ncols(), 2);
    let out = mvga::eval::eval_poly(&model, &nodes).unwrap();
    assert!((out.values()[0] - 1.0).abs() <= 1e-12);
    assert!((out.values()[1] + 3.0).abs() <= 1e-12);

    // and away from the nodes the fit is the straight line through them
    let probe = NodeSet::new(1, vec![0.55]).unwrap();
    let out = mvga::eval::eval_poly(&model, &probe).unwrap();
    let slope = (-3.0 - 1.0) / (0.9 - 0.2);
    let expected = 1.0 + slope * (0.55 - 0.2);
    assert!((out.values()[0] - expected).abs() <= 1e-12);
}
