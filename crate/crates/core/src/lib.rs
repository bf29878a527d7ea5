//! Three equivalent formulations of one-dimensional quantum mechanics and the
//! static-field law of motion in general relativity, with numerical
//! certificates for each equivalence.
//!
//! * [`grid`] - uniform Dirichlet grids and trapezoid weights.
//! * [`linalg`] - dense symmetric/Hermitian eigensolvers, commutators and the
//!   spectral matrix exponential.
//! * [`schrodinger`] - the finite-difference operator `-d²/dx² + V`.
//! * [`kernel`] - the Green's kernel of that operator, its Nyström spectrum
//!   and the reciprocity certificate `E_k · μ_k = 1`.
//! * [`pictures`] - Schrödinger and Heisenberg time evolution.
//! * [`relativity`] - static metrics, Christoffel symbols, the rest-frame
//!   motion law, the full geodesic equation and the radial Poisson solver.
#![allow(clippy::needless_range_loop)]
// NaN must fail validation, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod output;
pub mod pictures;
pub mod relativity;
pub mod schrodinger;

pub use error::{Error, Result};
