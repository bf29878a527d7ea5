//! Uniform grids on a finite interval with Dirichlet boundaries.
//!
//! Only interior nodes are stored: the boundary values are pinned to zero, so
//! every vector and matrix built on a [`Grid1D`] has dimension `n`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    h: f64,
    points: Vec<f64>,
}

impl Grid1D {
    /// `n` interior points of `(a, b)` with spacing `(b - a) / (n + 1)`.
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Domain(format!(
                "grid needs a < b, got a = {a}, b = {b}"
            )));
        }
        if n < 3 {
            return Err(Error::Domain(format!(
                "grid needs n >= 3 interior points, got {n}"
            )));
        }
        let h = (b - a) / (n + 1) as f64;
        let points = (0..n).map(|k| a + (k + 1) as f64 * h).collect();
        Ok(Self { a, b, h, points })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Shorthand for [`Grid1D::new`].
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(a, b, n)
}

/// Quadrature weights attached to the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights {
    grid: Grid1D,
    w: Vec<f64>,
}

impl QuadratureWeights {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `Σ w_k f(x_k)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.w)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Trapezoid rule on the interior nodes. The boundary terms carry a vanishing
/// integrand, so every weight equals the spacing.
pub fn trapezoid_weights(grid: &Grid1D) -> QuadratureWeights {
    QuadratureWeights {
        grid: grid.clone(),
        w: vec![grid.spacing(); grid.len()],
    }
}
