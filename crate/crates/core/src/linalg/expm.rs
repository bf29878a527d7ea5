use num_complex::Complex64;

use super::jacobi::{jacobi_eigen, DEFAULT_TOL};
use super::matrix::{ComplexMatrix, SymmetricMatrix};
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// `exp(scale · H) = V diag(exp(scale λ_k)) Vᵀ` from a Jacobi decomposition of
/// `H`. For purely imaginary `scale` the result is unitary.
pub fn spectral_exp(h: &SymmetricMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    let spectrum = jacobi_eigen(h, DEFAULT_TOL)?;
    Ok(spectral_exp_from(&spectrum, scale))
}

/// Same as [`spectral_exp`] for a precomputed full spectrum.
pub fn spectral_exp_from(spectrum: &Spectrum, scale: Complex64) -> ComplexMatrix {
    let n = spectrum.vectors.first().map_or(0, Vec::len);
    let phases: Vec<Complex64> = spectrum.values.iter().map(|&l| (scale * l).exp()).collect();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, &ph) in spectrum.vectors.iter().zip(&phases) {
                acc += ph * (v[i] * v[j]);
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(&a.matmul(b)? - &b.matmul(a)?)
}
