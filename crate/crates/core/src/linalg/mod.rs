//! Dense linear algebra for the finite-dimensional operators in this crate.

mod expm;
mod jacobi;
mod matrix;
mod spectrum;
pub mod tridiagonal;

pub use expm::{commutator, spectral_exp, spectral_exp_from};
pub use jacobi::{hermitian_eigen, hermitian_eigen_of, jacobi_eigen, DEFAULT_TOL, MAX_SWEEPS};
pub use matrix::{ComplexMatrix, HermitianMatrix, SymmetricMatrix};
pub use spectrum::{EigenScalar, Spectrum, PHASE_THRESHOLD};
pub use tridiagonal::{extremal_eigen, Extremal, HouseholderReduction, SymmetricTridiagonal};

use crate::error::Result;

/// Dimension up to which [`symmetric_eigen`] uses full cyclic Jacobi.
pub const JACOBI_MAX_DIM: usize = 400;

/// Extremal eigenpairs of a dense symmetric matrix. Full Jacobi up to
/// [`JACOBI_MAX_DIM`], Householder reduction and bisection above it.
pub fn symmetric_eigen(a: &SymmetricMatrix, k: usize, which: Extremal) -> Result<Spectrum> {
    if a.dim() <= JACOBI_MAX_DIM && k >= 1 && k <= a.dim() {
        let full = jacobi_eigen(a, DEFAULT_TOL)?;
        Ok(match which {
            Extremal::Lowest => full.lowest(k),
            Extremal::Highest => full.highest(k),
        })
    } else {
        extremal_eigen(a, k, which)
    }
}
