//! Green's kernel of `-d²/dx² + V` with Dirichlet ends, its Nyström
//! discretization, and the reciprocity certificate between the kernel
//! spectrum and the energy spectrum.
//!
//! Two kernels are available. [`kernel_from_inverse`] inverts the discrete
//! Hamiltonian, so the quadrature action `Σ_j K_ij w_j u_j` solves
//! `H ψ = u` exactly and the spectra are reciprocal to solver precision.
//! [`kernel_analytic_free`] samples the closed-form free-particle kernel
//! `(min - a)(b - max) / (b - a)`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, QuadratureWeights};
use crate::linalg::{symmetric_eigen, Extremal, Spectrum, SymmetricMatrix};
use crate::output::{csv_writer, fmt_f64};
use crate::schrodinger::{solve_spectrum, Hamiltonian};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelOrigin {
    DiscreteInverse,
    Analytic,
}

impl fmt::Display for KernelOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelOrigin::DiscreteInverse => "discrete-inverse",
            KernelOrigin::Analytic => "analytic",
        })
    }
}

impl std::str::FromStr for KernelOrigin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete-inverse" => Ok(Self::DiscreteInverse),
            "analytic" => Ok(Self::Analytic),
            other => Err(Error::Domain(format!("unknown kernel origin `{other}`"))),
        }
    }
}

/// Kernel samples `K(x_i, x_j)` on the interior nodes together with the
/// quadrature weights that discretize `dQ`.
#[derive(Debug, Clone)]
pub struct Kernel {
    weights: QuadratureWeights,
    samples: SymmetricMatrix,
    origin: KernelOrigin,
}

impl Kernel {
    pub fn grid(&self) -> &Grid1D {
        self.weights.grid()
    }

    pub fn weights(&self) -> &QuadratureWeights {
        &self.weights
    }

    pub fn samples(&self) -> &SymmetricMatrix {
        &self.samples
    }

    pub fn origin(&self) -> KernelOrigin {
        self.origin
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    /// Quadrature action `ψ_i = Σ_j K_ij w_j u_j`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = u
            .iter()
            .zip(self.weights.values())
            .map(|(a, w)| a * w)
            .collect();
        self.samples.mul_vec(&weighted)
    }

    /// Symmetrized Nyström matrix `diag(√w) K diag(√w)`.
    pub fn nystrom_matrix(&self) -> SymmetricMatrix {
        let sw: Vec<f64> = self.weights.values().iter().map(|w| w.sqrt()).collect();
        SymmetricMatrix::from_upper(self.dim(), |i, j| sw[i] * self.samples[(i, j)] * sw[j])
    }
}

/// `K = H⁻¹ diag(1/w)`. Requires `H` positive definite: fails if any
/// eigenvalue lies at or below `1e-12 · max|H_ij|`.
pub fn kernel_from_inverse(h: &Hamiltonian, weights: &QuadratureWeights) -> Result<Kernel> {
    if h.grid() != weights.grid() {
        return Err(Error::GridMismatch);
    }
    let bands = h.tridiagonal();
    let threshold = 1e-12 * h.max_abs();
    if bands.count_below(threshold) > 0 || bands.count_below(f64::MIN_POSITIVE) > 0 {
        return Err(Error::SingularHamiltonian { threshold });
    }

    // LDLᵀ of the tridiagonal operator, then one solve per unit vector.
    let n = h.dim();
    let diag = bands.diag();
    let off = bands.off();
    let mut d = vec![0.0; n];
    let mut l = vec![0.0; n.saturating_sub(1)];
    d[0] = diag[0];
    for i in 1..n {
        l[i - 1] = off[i - 1] / d[i - 1];
        d[i] = diag[i] - l[i - 1] * off[i - 1];
    }
    let w = weights.values();
    let mut data = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|x| *x = 0.0);
        col[j] = 1.0;
        for i in 1..n {
            col[i] -= l[i - 1] * col[i - 1];
        }
        for i in 0..n {
            col[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            col[i] -= l[i] * col[i + 1];
        }
        for i in 0..n {
            data[i * n + j] = col[i] / w[j];
        }
    }
    Ok(Kernel {
        weights: weights.clone(),
        samples: SymmetricMatrix::from_row_major(n, data)?,
        origin: KernelOrigin::DiscreteInverse,
    })
}

/// Closed-form Green's function of `-d²/dx²` on `(a, b)` with Dirichlet ends.
pub fn free_green(a: f64, b: f64, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    (lo - a) * (b - hi) / (b - a)
}

pub fn kernel_analytic_free(grid: &Grid1D, weights: &QuadratureWeights) -> Result<Kernel> {
    if grid != weights.grid() {
        return Err(Error::GridMismatch);
    }
    let x = grid.points();
    let samples = SymmetricMatrix::from_upper(grid.len(), |i, j| {
        free_green(grid.a(), grid.b(), x[i], x[j])
    });
    Ok(Kernel {
        weights: weights.clone(),
        samples,
        origin: KernelOrigin::Analytic,
    })
}

/// Largest `k` eigenvalues `μ` of the Nyström operator, ascending. Each
/// eigenvector is returned as a grid function (divided by `√w`), so the
/// vectors are orthonormal in the quadrature inner product.
pub fn kernel_spectrum(kernel: &Kernel, k: usize) -> Result<Spectrum> {
    if k == 0 || k > kernel.dim() {
        return Err(Error::Domain(format!(
            "k must lie in 1..={}, got {k}",
            kernel.dim()
        )));
    }
    let s = symmetric_eigen(&kernel.nystrom_matrix(), k, Extremal::Highest)?;
    let sw: Vec<f64> = kernel.weights.values().iter().map(|w| w.sqrt()).collect();
    let vectors = s
        .vectors
        .into_iter()
        .map(|v| v.iter().zip(&sw).map(|(x, s)| x / s).collect())
        .collect();
    Ok(Spectrum {
        values: s.values,
        vectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocityPair {
    pub energy: f64,
    pub mu: f64,
}

impl ReciprocityPair {
    pub fn product(&self) -> f64 {
        self.energy * self.mu
    }

    pub fn abs_deviation(&self) -> f64 {
        (self.product() - 1.0).abs()
    }
}

/// `E_k` paired with `μ_k` in order of ascending energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocityReport {
    pub pairs: Vec<ReciprocityPair>,
    pub max_abs_deviation: f64,
}

impl ReciprocityReport {
    /// Pairs ascending energies with descending kernel eigenvalues.
    pub fn from_spectra(energies: &[f64], mu_ascending: &[f64]) -> Self {
        let pairs: Vec<ReciprocityPair> = energies
            .iter()
            .zip(mu_ascending.iter().rev())
            .map(|(&energy, &mu)| ReciprocityPair { energy, mu })
            .collect();
        let max_abs_deviation = pairs
            .iter()
            .map(ReciprocityPair::abs_deviation)
            .fold(0.0, f64::max);
        Self {
            pairs,
            max_abs_deviation,
        }
    }

    /// Columns `index,E,mu,product,abs_dev`; `index` starts at 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["index", "E", "mu", "product", "abs_dev"])?;
        for (k, p) in self.pairs.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                fmt_f64(p.energy),
                fmt_f64(p.mu),
                fmt_f64(p.product()),
                fmt_f64(p.abs_deviation()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lowest `k` energies of `H` against the largest `k` kernel eigenvalues.
pub fn certify_reciprocity(
    h: &Hamiltonian,
    kernel: &Kernel,
    k: usize,
) -> Result<ReciprocityReport> {
    if h.grid() != kernel.grid() {
        return Err(Error::GridMismatch);
    }
    let energies = solve_spectrum(h, k)?;
    let mu = kernel_spectrum(kernel, k)?;
    Ok(ReciprocityReport::from_spectra(
        &energies.values,
        &mu.values,
    ))
}

/// Kernel eigenvalues against given reference energies (for instance the
/// exact continuum levels from [`free_particle_energies`]).
pub fn certify_against_energies(kernel: &Kernel, energies: &[f64]) -> Result<ReciprocityReport> {
    let mu = kernel_spectrum(kernel, energies.len())?;
    Ok(ReciprocityReport::from_spectra(energies, &mu.values))
}

/// Exact levels `(mπ / L)²`, `m = 1..=k`, of `-d²/dx²` on an interval of
/// length `L` with Dirichlet ends.
pub fn free_particle_energies(length: f64, k: usize) -> Vec<f64> {
    (1..=k).map(|m| (m as f64 * PI / length).powi(2)).collect()
}
