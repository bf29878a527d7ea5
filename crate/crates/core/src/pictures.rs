//! Schrödinger-picture state evolution and Heisenberg-picture operator
//! evolution, both from one spectral decomposition of `H`.
//!
//! Convention: states obey `i ∂ψ/∂t = Hψ`, so `ψ(t) = e^{-iHt} ψ(0)` and
//! `O_H(t) = e^{+iHt} O e^{-iHt}`, whence `dO_H/dt = i [H, O_H]`.
//! Expectation values use the quadrature inner product
//! `⟨φ, O ψ⟩ = Σ_i w_i conj(φ_i) (O ψ)_i`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{trapezoid_weights, Grid1D, QuadratureWeights};
use crate::linalg::{
    commutator, jacobi_eigen, spectral_exp_from, ComplexMatrix, HermitianMatrix, Spectrum,
    DEFAULT_TOL,
};
use crate::output::{csv_writer, fmt_f64};
use crate::schrodinger::Hamiltonian;

const NORM_TOL: f64 = 1e-10;

/// Grid function normalized so that `Σ w_k |ψ_k|² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: Grid1D,
    psi: Vec<Complex64>,
}

impl StateVector {
    /// Wraps an already normalized state.
    pub fn new(grid: &Grid1D, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: psi.len(),
            });
        }
        let state = Self {
            grid: grid.clone(),
            psi,
        };
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Rescales `psi` to unit quadrature norm.
    pub fn normalized(grid: &Grid1D, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                left: grid.len(),
                right: psi.len(),
            });
        }
        let raw = Self {
            grid: grid.clone(),
            psi,
        };
        let norm_sq = raw.norm_sq();
        if !(norm_sq > 0.0 && norm_sq.is_finite()) {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            grid: raw.grid,
            psi: raw.psi.into_iter().map(|z| z * scale).collect(),
        })
    }

    pub fn from_real(grid: &Grid1D, psi: &[f64]) -> Result<Self> {
        Self::normalized(grid, psi.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn norm_sq(&self) -> f64 {
        self.grid.spacing() * self.psi.iter().map(Complex64::norm_sqr).sum::<f64>()
    }

    /// `⟨self, other⟩` in the quadrature inner product.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        let h = self.grid.spacing();
        self.psi
            .iter()
            .zip(&other.psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * h
    }
}

/// Hermitian operator acting on grid functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub label: String,
    matrix: HermitianMatrix,
}

impl Observable {
    pub fn new(label: impl Into<String>, matrix: HermitianMatrix) -> Self {
        Self {
            label: label.into(),
            matrix,
        }
    }

    /// Rejects non-Hermitian input.
    pub fn from_matrix(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        Ok(Self::new(label, HermitianMatrix::new(matrix)?))
    }

    /// Multiplication by `x`.
    pub fn position(grid: &Grid1D) -> Self {
        Self::new("position", HermitianMatrix::diagonal(grid.points()))
    }

    /// `p = -i D` with `D` the central-difference first derivative
    /// (Dirichlet ends).
    pub fn momentum(grid: &Grid1D) -> Self {
        let half = 0.5 / grid.spacing();
        let m = ComplexMatrix::from_fn(grid.len(), |i, j| {
            if j == i + 1 {
                Complex64::new(0.0, -half)
            } else if i == j + 1 {
                Complex64::new(0.0, half)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(
            "momentum",
            HermitianMatrix::new(m).expect("central difference is Hermitian"),
        )
    }

    pub fn energy(h: &Hamiltonian) -> Self {
        Self::new("energy", HermitianMatrix::from_real(&h.matrix()))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new("identity", HermitianMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Cached spectral decomposition `H = V Λ Vᵀ`.
///
/// States evolve through `e^{-iHt} = V e^{-iΛt} Vᵀ`. Observables evolve in
/// the eigenbasis: `(Vᵀ O_H(t) V)_ab = e^{i(λ_a - λ_b)t} (Vᵀ O V)_ab`, so a
/// diagonal entry picks up exactly the phase 1.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
    /// `V` row-major: `basis[i * n + k]` is component `i` of eigenvector `k`.
    basis: Vec<f64>,
    hamiltonian: ComplexMatrix,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let dense = h.matrix();
        let spectrum = jacobi_eigen(&dense, DEFAULT_TOL)?;
        let n = dense.dim();
        let mut basis = vec![0.0; n * n];
        for (k, v) in spectrum.vectors.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                basis[i * n + k] = *x;
            }
        }
        Ok(Self {
            spectrum,
            basis,
            hamiltonian: ComplexMatrix::from_real(&dense),
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `e^{-iHt}`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        spectral_exp_from(&self.spectrum, Complex64::new(0.0, -t))
    }

    pub fn evolve_state(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        self.check_dim(psi0.psi.len())?;
        let psi = self.unitary(t).mul_vec(&psi0.psi);
        StateVector::new(&psi0.grid, psi)
    }

    pub fn evolve_observable(&self, o: &Observable, t: f64) -> Result<Observable> {
        self.check_dim(o.dim())?;
        let rotated = self.to_eigenbasis(o.matrix.as_matrix());
        let evolved = self
            .back_from_eigenbasis(&self.modulate(&rotated, |w| Complex64::from_polar(1.0, w * t)));
        Observable::from_matrix(o.label.clone(), evolved)
    }

    /// `(O_H(t + dt) - O_H(t - dt)) / 2dt`, differenced before leaving the
    /// eigenbasis.
    fn central_difference(&self, o: &Observable, t: f64, dt: f64) -> ComplexMatrix {
        let rotated = self.to_eigenbasis(o.matrix.as_matrix());
        let diff = self.modulate(&rotated, |w| {
            (Complex64::from_polar(1.0, w * (t + dt)) - Complex64::from_polar(1.0, w * (t - dt)))
                / (2.0 * dt)
        });
        self.back_from_eigenbasis(&diff)
    }

    /// `X_ab · f(λ_a - λ_b)`; on the diagonal the argument is exactly zero.
    fn modulate<F: Fn(f64) -> Complex64>(&self, x: &ComplexMatrix, f: F) -> ComplexMatrix {
        let l = &self.spectrum.values;
        ComplexMatrix::from_fn(x.dim(), |a, b| x[(a, b)] * f(l[a] - l[b]))
    }

    /// `Vᵀ M V`.
    fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.basis;
        let zero = Complex64::new(0.0, 0.0);
        let mut mv = vec![zero; n * n];
        for i in 0..n {
            let row = &mut mv[i * n..(i + 1) * n];
            for (k, a) in m.row(i).iter().enumerate() {
                if *a != zero {
                    for (r, b) in row.iter_mut().zip(&v[k * n..(k + 1) * n]) {
                        *r += a * b;
                    }
                }
            }
        }
        let mut out = vec![zero; n * n];
        for k in 0..n {
            let src = &mv[k * n..(k + 1) * n];
            for i in 0..n {
                let c = v[k * n + i];
                for (r, b) in out[i * n..(i + 1) * n].iter_mut().zip(src) {
                    *r += b * c;
                }
            }
        }
        ComplexMatrix::from_row_major(n, out).expect("square buffer")
    }

    /// `V X Vᵀ`.
    fn back_from_eigenbasis(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.basis;
        let zero = Complex64::new(0.0, 0.0);
        let mut vx = vec![zero; n * n];
        for i in 0..n {
            let row = &mut vx[i * n..(i + 1) * n];
            for k in 0..n {
                let c = v[i * n + k];
                for (r, b) in row.iter_mut().zip(x.row(k)) {
                    *r += b * c;
                }
            }
        }
        ComplexMatrix::from_fn(n, |i, j| {
            vx[i * n..(i + 1) * n]
                .iter()
                .zip(&v[j * n..(j + 1) * n])
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other,
            });
        }
        Ok(())
    }
}

/// `ψ(t) = e^{-iHt} ψ(0)`.
pub fn schrodinger_evolve(h: &Hamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if h.grid() != psi0.grid() {
        return Err(Error::GridMismatch);
    }
    Propagator::new(h)?.evolve_state(psi0, t)
}

/// `O_H(t) = e^{+iHt} O e^{-iHt}`.
pub fn heisenberg_evolve(h: &Hamiltonian, o: &Observable, t: f64) -> Result<Observable> {
    if h.dim() != o.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: o.dim(),
        });
    }
    Propagator::new(h)?.evolve_observable(o, t)
}

/// `⟨ψ, O ψ⟩` including its (roundoff-level) imaginary part.
pub fn expectation_complex(
    o: &Observable,
    psi: &StateVector,
    weights: &QuadratureWeights,
) -> Result<Complex64> {
    if o.dim() != psi.psi.len() {
        return Err(Error::DimensionMismatch {
            left: o.dim(),
            right: psi.psi.len(),
        });
    }
    if weights.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let o_psi = o.matrix.as_matrix().mul_vec(&psi.psi);
    Ok(psi
        .psi
        .iter()
        .zip(&o_psi)
        .zip(weights.values())
        .map(|((a, b), w)| a.conj() * b * *w)
        .sum())
}

/// Real part of [`expectation_complex`].
pub fn expectation(o: &Observable, psi: &StateVector, weights: &QuadratureWeights) -> Result<f64> {
    Ok(expectation_complex(o, psi, weights)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PictureSample {
    pub t: f64,
    pub schrodinger: f64,
    pub heisenberg: f64,
}

impl PictureSample {
    pub fn abs_diff(&self) -> f64 {
        (self.schrodinger - self.heisenberg).abs()
    }
}

/// Expectation-value time series from both pictures.
#[derive(Debug, Clone, PartialEq)]
pub struct PictureComparison {
    pub observable: String,
    pub samples: Vec<PictureSample>,
    pub max_deviation: f64,
}

impl PictureComparison {
    /// Columns `t,expect_schrodinger,expect_heisenberg,abs_diff`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["t", "expect_schrodinger", "expect_heisenberg", "abs_diff"])?;
        for s in &self.samples {
            w.write_record([
                fmt_f64(s.t),
                fmt_f64(s.schrodinger),
                fmt_f64(s.heisenberg),
                fmt_f64(s.abs_diff()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compares `⟨ψ(t), O ψ(t)⟩` with `⟨ψ(0), O_H(t) ψ(0)⟩` at each time.
pub fn verify_picture_equivalence(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    times: &[f64],
) -> Result<PictureComparison> {
    if h.grid() != psi0.grid() {
        return Err(Error::GridMismatch);
    }
    let prop = Propagator::new(h)?;
    compare_pictures(&prop, o, psi0, times)
}

/// [`verify_picture_equivalence`] with a prebuilt propagator.
pub fn compare_pictures(
    prop: &Propagator,
    o: &Observable,
    psi0: &StateVector,
    times: &[f64],
) -> Result<PictureComparison> {
    let weights = trapezoid_weights(psi0.grid());
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let schrodinger = expectation(o, &prop.evolve_state(psi0, t)?, &weights)?;
        let heisenberg = expectation(&prop.evolve_observable(o, t)?, psi0, &weights)?;
        samples.push(PictureSample {
            t,
            schrodinger,
            heisenberg,
        });
    }
    let max_deviation = samples
        .iter()
        .map(PictureSample::abs_diff)
        .fold(0.0, f64::max);
    Ok(PictureComparison {
        observable: o.label.clone(),
        samples,
        max_deviation,
    })
}

/// `max |(O_H(t+dt) - O_H(t-dt)) / 2dt - i [H, O_H(t)]|`, which is `O(dt²)`.
pub fn verify_heisenberg_derivative(
    h: &Hamiltonian,
    o: &Observable,
    t: f64,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if h.dim() != o.dim() {
        return Err(Error::DimensionMismatch {
            left: h.dim(),
            right: o.dim(),
        });
    }
    let prop = Propagator::new(h)?;
    heisenberg_derivative_deviation(&prop, o, t, dt)
}

/// [`verify_heisenberg_derivative`] with a prebuilt propagator.
pub fn heisenberg_derivative_deviation(
    prop: &Propagator,
    o: &Observable,
    t: f64,
    dt: f64,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    prop.check_dim(o.dim())?;
    let difference = prop.central_difference(o, t, dt);
    let now = prop.evolve_observable(o, t)?;
    let generator = commutator(&prop.hamiltonian, now.matrix().as_matrix())?.scale(Complex64::i());
    Ok(difference.max_abs_diff(&generator))
}
