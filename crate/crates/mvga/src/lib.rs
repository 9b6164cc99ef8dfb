//! Multivariate polynomial least squares with derivative data.
//!
//! Fits total-degree multivariate polynomials to scattered values and
//! first/second partial derivatives under an application-chosen positive
//! semidefinite inner product, and evaluates the fitted polynomial and its
//! derivatives at new nodes through a stable recurrence.
//!
//! The pipeline:
//!
//! 1. [`basis`] enumerates the monomial basis in graded order and finds
//!    each element's minimal generating parent.
//! 2. [`stacked`] holds block vectors of values and partial derivatives at
//!    the nodes and applies the coordinate shift operators matrix-free.
//! 3. [`gram`] realizes the semidefinite inner product as a sparse
//!    collocation map L with G = LᵀL.
//! 4. [`arnoldi`] runs the shift-and-orthogonalize recurrence, producing
//!    G-orthonormal columns and an upper-triangular factor.
//! 5. [`eval`] rebuilds the orthogonal basis at arbitrary nodes from the
//!    factor and parent table, and forms the polynomial's stacked output.
//! 6. [`apps`] assembles the shipped least-squares systems: Hermite
//!    fitting, interpolation with derivative recovery, and Poisson
//!    collocation with Dirichlet or mixed boundary conditions.

pub mod apps;
pub mod arnoldi;
pub mod basis;
pub mod colmat;
pub mod error;
pub mod eval;
pub mod gram;
pub mod io;
pub mod scalar;
pub mod stacked;

pub use arnoldi::{fit, FitModel, FitOptions};
pub use basis::{MonomialBasis, MultiIndex, Parent};
pub use error::{Error, Result};
pub use eval::{eval_basis, eval_poly, EvalTable, StackedOutput};
pub use gram::{CollocationMap, CollocationRow, CollocationTerm};
pub use scalar::Scalar;
pub use stacked::{
    apply_shift, constant_column, stacked_dim, BlockId, DerivOrder, NodeSet, StackedLayout,
    StackedVector,
};
