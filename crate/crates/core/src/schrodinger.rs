//! The stationary operator `H = -d²/dx² + V` on a Dirichlet grid.
//!
//! Units: ħ = 1 and 2m = 1, so the kinetic term is exactly `-d²/dx²`.
//! Second-order central differences give the tridiagonal stencil
//! `H_ii = 2/h² + V(x_i)`, `H_i,i±1 = -1/h²`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::linalg::{jacobi_eigen, Spectrum, SymmetricMatrix, SymmetricTridiagonal, DEFAULT_TOL};

/// A named potential `V(x)`.
#[derive(Clone)]
pub struct Potential {
    label: String,
    sampler: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .finish()
    }
}

impl Potential {
    pub fn new<F>(label: impl Into<String>, sampler: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            sampler: Arc::new(sampler),
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0)
    }

    /// `V = x²`.
    pub fn harmonic() -> Self {
        Self::new("harmonic", |x| x * x)
    }

    /// `V = x⁴`.
    pub fn quartic() -> Self {
        Self::new("quartic", |x| x.powi(4))
    }

    /// Gaussian bump `V = c exp(-(x - x0)² / s²)`.
    pub fn well_bump(c: f64, x0: f64, s: f64) -> Self {
        Self::new("well-bump", move |x| c * (-((x - x0) / s).powi(2)).exp())
    }

    /// Constant potential, mostly useful for shift tests.
    pub fn constant(c: f64) -> Self {
        Self::new("constant", move |_| c)
    }

    /// Adds a constant to this potential.
    pub fn shifted(&self, c: f64) -> Self {
        let inner = Arc::clone(&self.sampler);
        Self {
            label: format!("{}+{c}", self.label),
            sampler: Arc::new(move |x| inner(x) + c),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.sampler)(x)
    }
}

/// Finite-difference Hamiltonian restricted to the interior grid points.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    grid: Grid1D,
    potential: String,
    potential_values: Vec<f64>,
    bands: SymmetricTridiagonal,
}

impl Hamiltonian {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn potential_label(&self) -> &str {
        &self.potential
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.potential_values
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn tridiagonal(&self) -> &SymmetricTridiagonal {
        &self.bands
    }

    /// Dense copy of the operator.
    pub fn matrix(&self) -> SymmetricMatrix {
        self.bands.to_dense()
    }

    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        self.bands.mul_vec(psi)
    }

    pub fn max_abs(&self) -> f64 {
        self.bands.max_abs()
    }
}

pub fn assemble_hamiltonian(grid: &Grid1D, potential: &Potential) -> Result<Hamiltonian> {
    let h = grid.spacing();
    let kinetic = 1.0 / (h * h);
    let mut potential_values = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let v = potential.eval(x);
        if !v.is_finite() {
            return Err(Error::NonFinitePotential { x });
        }
        potential_values.push(v);
    }
    let diag = potential_values.iter().map(|v| 2.0 * kinetic + v).collect();
    let off = vec![-kinetic; grid.len() - 1];
    Ok(Hamiltonian {
        grid: grid.clone(),
        potential: potential.label().to_owned(),
        potential_values,
        bands: SymmetricTridiagonal::new(diag, off)?,
    })
}

/// Lowest `k` eigenpairs of `H`. Eigenvectors have unit Euclidean norm.
///
/// The operator is tridiagonal, so this uses Sturm bisection with inverse
/// iteration; [`solve_spectrum_dense`] gives the same pairs via Jacobi.
pub fn solve_spectrum(h: &Hamiltonian, k: usize) -> Result<Spectrum> {
    check_count(h, k)?;
    Ok(h.bands.lowest(k))
}

/// Lowest `k` eigenpairs from a full Jacobi decomposition of the dense matrix.
pub fn solve_spectrum_dense(h: &Hamiltonian, k: usize) -> Result<Spectrum> {
    check_count(h, k)?;
    Ok(jacobi_eigen(&h.matrix(), DEFAULT_TOL)?.lowest(k))
}

fn check_count(h: &Hamiltonian, k: usize) -> Result<()> {
    if k == 0 || k > h.dim() {
        return Err(Error::Domain(format!(
            "k must lie in 1..={}, got {k}",
            h.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn stencil_entries() {
        let g = make_grid(0.0, 1.0, 3).unwrap();
        let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
        let m = h.matrix();
        for i in 0..3 {
            assert_eq!(m[(i, i)], 32.0);
        }
        assert_eq!(m[(0, 1)], -16.0);
        assert_eq!(m[(1, 2)], -16.0);
        assert_eq!(m[(0, 2)], 0.0);

        let h = assemble_hamiltonian(&g, &Potential::constant(7.0)).unwrap();
        assert!((0..3).all(|i| h.matrix()[(i, i)] == 39.0));
    }

    #[test]
    fn singular_potential_rejected() {
        let g = make_grid(0.0, 1.0, 3).unwrap();
        let v = Potential::new("pole", |x| 1.0 / (x - 0.5));
        match assemble_hamiltonian(&g, &v) {
            Err(Error::NonFinitePotential { x }) => assert_eq!(x, 0.5),
            other => panic!("expected NonFinitePotential, got {other:?}"),
        }
    }

    #[test]
    fn three_point_closed_form() {
        // 16 · tridiag(-1, 2, -1): 16 (2 - √2), 32, 16 (2 + √2).
        let g = make_grid(0.0, 1.0, 3).unwrap();
        let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
        let s = solve_spectrum(&h, 3).unwrap();
        let exact = [16.0 * (2.0 - 2f64.sqrt()), 32.0, 16.0 * (2.0 + 2f64.sqrt())];
        for (e, x) in s.values.iter().zip(exact) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn k_out_of_range() {
        let g = make_grid(0.0, 1.0, 3).unwrap();
        let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
        assert!(solve_spectrum(&h, 0).is_err());
        assert!(solve_spectrum(&h, 4).is_err());
    }

    #[test]
    fn bisection_agrees_with_jacobi() {
        let g = make_grid(-6.0, 6.0, 150).unwrap();
        let h = assemble_hamiltonian(&g, &Potential::harmonic()).unwrap();
        let a = solve_spectrum(&h, 6).unwrap();
        let b = solve_spectrum_dense(&h, 6).unwrap();
        for k in 0..6 {
            assert!((a.values[k] - b.values[k]).abs() < 1e-10);
            for (x, y) in a.vectors[k].iter().zip(&b.vectors[k]) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn second_order_convergence() {
        let err = |n: usize| {
            let g = make_grid(0.0, 1.0, n).unwrap();
            let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
            let e1 = solve_spectrum(&h, 1).unwrap().values[0];
            (e1 - PI * PI).abs() / (PI * PI)
        };
        for n in [49, 99, 199] {
            let ratio = err(n) / err(2 * n + 1);
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn positive_for_nonnegative_potential_and_shift_exact() {
        let g = make_grid(0.0, 1.0, 80).unwrap();
        let base = Potential::well_bump(40.0, 0.5, 0.1);
        let h = assemble_hamiltonian(&g, &base).unwrap();
        let s = solve_spectrum(&h, 80).unwrap();
        assert!(s.values[0] > 0.0);

        let shifted = assemble_hamiltonian(&g, &base.shifted(3.25)).unwrap();
        let t = solve_spectrum(&shifted, 10).unwrap();
        for k in 0..10 {
            assert!((t.values[k] - s.values[k] - 3.25).abs() < 1e-9);
        }
    }
}
