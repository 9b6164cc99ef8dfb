//! Evaluation-stage checks: consistency with the fitted columns, the
//! monomial-expansion oracle, degree-gradedness, and derivative coherence
//! against finite differences.

mod common;

use common::{dense_g, max_abs_diff, monomial_stacked_column, monomial_value, reference_gs};
use mvga::apps::geometry::{domain_nodes, padua_nodes, Domain};
use mvga::apps::problems::TestField;
use mvga::apps::{build_interpolation, solve_coefficients};
use mvga::arnoldi::{fit, FitOptions};
use mvga::basis::MonomialBasis;
use mvga::eval::{eval_basis, eval_poly};
use mvga::gram::CollocationMap;
use mvga::stacked::{DerivOrder, NodeSet, StackedLayout};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_nodes(rng: &mut ChaCha8Rng, d: usize, m: usize) -> NodeSet<f64> {
    let coords = (0..m * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    NodeSet::new(d, coords).unwrap()
}

#[test]
fn reproduces_q_at_fitting_nodes_disk_instance() {
    let gen = domain_nodes(&Domain::Disk, 120, 42).unwrap();
    let nodes = gen.interior.concat(&gen.boundary).unwrap();
    let basis = MonomialBasis::with_parents(2, 10).unwrap();
    let layout = StackedLayout::new(nodes.len(), 2, DerivOrder::Two);
    let map = CollocationMap::value_selection(layout);
    let model = fit(&nodes, &basis, &map, DerivOrder::Two, &FitOptions::default()).unwrap();
    let table = eval_basis(&model, &nodes).unwrap();
    let q = model.q().unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..model.t() {
        worst = worst.max(max_abs_diff(table.col(j), q.col(j)));
    }
    assert!(worst <= 1e-12, "max deviation {worst:e}");
}

/// The evaluated basis functions are the polynomials obtained by pushing
/// the exact monomials through the inverse of the reference triangular
/// factor.
#[test]
fn matches_monomial_expansion_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    let order = DerivOrder::One;
    for n in [3u32, 4] {
        let nodes = random_nodes(&mut rng, 2, 18);
        let basis = MonomialBasis::with_parents(2, n).unwrap();
        let layout = StackedLayout::new(18, 2, order);
        let map = CollocationMap::value_selection(layout);
        let model = fit(&nodes, &basis, &map, order, &FitOptions::default()).unwrap();
        assert_eq!(model.t(), basis.len());

        // reference factor from plain Gram-Schmidt on exact columns
        let columns: Vec<Vec<f64>> = (0..basis.len())
            .map(|i| {
                monomial_stacked_column(basis.index(i).exponents(), &nodes, order)
                    .values()
                    .to_vec()
            })
            .collect();
        let g = dense_g(&map);
        let (_, t_ref, r_ref) = reference_gs(&columns, &g, 2, 1e-13);
        assert_eq!(t_ref, basis.len());

        let new_nodes = random_nodes(&mut rng, 2, 25);
        let table = eval_basis(&model, &new_nodes).unwrap();
        for j in 0..model.t() {
            // expansion coefficients: R⁻¹ e_j by back substitution
            let mut e = DVector::zeros(basis.len());
            e[j] = 1.0;
            let coeffs = r_ref
                .clone()
                .solve_upper_triangular(&e)
                .expect("nonsingular reference factor");
            for node in 0..new_nodes.len() {
                let x = new_nodes.node(node);
                let direct: f64 = (0..basis.len())
                    .map(|i| coeffs[i] * monomial_value(basis.index(i).exponents(), x))
                    .sum();
                let got = table.col(j)[node];
                assert!(
                    (got - direct).abs() <= 1e-10,
                    "n={n} column {j} node {node}: {got} vs {direct}"
                );
            }
        }
    }
}

/// Each basis function only involves monomials up to its own position:
/// solving for monomial coefficients on a unisolvent grid leaves the
/// trailing entries at round-off.
#[test]
fn basis_functions_are_degree_graded() {
    let n = 4u32;
    let nodes = padua_nodes(n as usize).unwrap();
    let basis = MonomialBasis::with_parents(2, n).unwrap();
    let g = basis.len();
    assert_eq!(nodes.len(), g);
    let layout = StackedLayout::new(g, 2, DerivOrder::Zero);
    let map = CollocationMap::value_selection(layout);
    let model = fit(&nodes, &basis, &map, DerivOrder::Zero, &FitOptions::default()).unwrap();
    let table = eval_basis(&model, &nodes).unwrap();

    let vander = DMatrix::from_fn(g, g, |r, c| {
        monomial_value(basis.index(c).exponents(), nodes.node(r))
    });
    let lu = vander.lu();
    for j in 0..g {
        let col = DVector::from_column_slice(table.col(j));
        let coeffs = lu.solve(&col).expect("unisolvent grid");
        let scale = coeffs.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        for i in j + 1..g {
            assert!(
                coeffs[i].abs() <= 1e-10 * scale.max(1.0),
                "basis function {j} leaks onto monomial {i}: {}",
                coeffs[i]
            );
        }
    }
}

/// Gradient and second-derivative blocks agree with central finite
/// differences of the value block.
#[test]
fn derivative_blocks_match_finite_differences() {
    let field = TestField::GaussianQuadform;
    let nodes = padua_nodes(10).unwrap();
    let values = field.sample_values(&nodes);
    let problem = build_interpolation(&nodes, &values).unwrap();
    let basis = MonomialBasis::with_parents(2, 10).unwrap();
    let mut model = fit(
        &problem.nodes,
        &basis,
        &problem.map,
        problem.order,
        &FitOptions::default(),
    )
    .unwrap();
    solve_coefficients(&mut model, &problem).unwrap();

    let probes = [[0.3, -0.2], [0.0, 0.5], [-0.6, -0.4], [0.1, 0.1]];
    let h = 1e-5;
    let value_at = |x: [f64; 2]| -> f64 {
        let nodes = NodeSet::new(2, x.to_vec()).unwrap();
        eval_poly(&model, &nodes).unwrap().values()[0]
    };
    for p in probes {
        let nodes = NodeSet::new(2, p.to_vec()).unwrap();
        let out = eval_poly(&model, &nodes).unwrap();
        for axis in 0..2 {
            let mut hi = p;
            let mut lo = p;
            hi[axis] += h;
            lo[axis] -= h;
            let fd = (value_at(hi) - value_at(lo)) / (2.0 * h);
            let got = out.grad(axis).unwrap()[0];
            let rel = (got - fd).abs() / fd.abs().max(1.0);
            assert!(rel <= 1e-5, "grad[{axis}] at {p:?}: {got} vs {fd}");
        }
        for j in 0..2 {
            for k in j..2 {
                let fd = if j == k {
                    let mut hi = p;
                    let mut lo = p;
                    hi[j] += h;
                    lo[j] -= h;
                    (value_at(hi) - 2.0 * value_at(p) + value_at(lo)) / (h * h)
                } else {
                    let mut pp = p;
                    let mut pm = p;
                    let mut mp = p;
                    let mut mm = p;
                    pp[j] += h;
                    pp[k] += h;
                    pm[j] += h;
                    pm[k] -= h;
                    mp[j] -= h;
                    mp[k] += h;
                    mm[j] -= h;
                    mm[k] -= h;
                    (value_at(pp) - value_at(pm) - value_at(mp) + value_at(mm)) / (4.0 * h * h)
                };
                let got = out.hess(j, k).unwrap()[0];
                let rel = (got - fd).abs() / fd.abs().max(1.0);
                assert!(rel <= 1e-5, "hess[{j}{k}] at {p:?}: {got} vs {fd}");
            }
        }
    }
}
