//! Newtonian potential of a spherically symmetric body.
//!
//! Units: G = 1 with `∇²φ = 4πρ`, so outside a body of mass `M` the
//! potential is `-M/r`. Inside,
//! `φ(r) = -m(r)/r - 4π ∫_r^R s ρ(s) ds` with `m(r) = 4π ∫_0^r s² ρ(s) ds`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

const GL_ORDER: usize = 8;
const PANELS: usize = 64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes from Newton's method
/// on `P_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_lo^hi f` split into `panels` equal pieces.
    pub fn integrate(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let width = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = lo + (p as f64 + 0.5) * width;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + 0.5 * width * x);
            }
            total += 0.5 * width * acc;
        }
        total
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Potential of a body with density `ρ(r)` supported on `r ≤ R`.
pub struct RadialPotential {
    radius: f64,
    density: Box<dyn Fn(f64) -> f64>,
    rule: GaussLegendre,
    total_mass: f64,
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("radius", &self.radius)
            .field("total_mass", &self.total_mass)
            .finish()
    }
}

impl RadialPotential {
    /// Fails if `ρ` is negative or non-finite anywhere it is sampled.
    pub fn new<F: Fn(f64) -> f64 + 'static>(density: F, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!(
                "body radius must be positive, got {radius}"
            )));
        }
        let rule = GaussLegendre::new(GL_ORDER);
        let width = radius / PANELS as f64;
        let mut probes = vec![0.0, radius];
        for p in 0..PANELS {
            let mid = (p as f64 + 0.5) * width;
            probes.extend(rule.nodes().iter().map(|x| mid + 0.5 * width * x));
        }
        for r in probes {
            let rho = density(r);
            if rho.is_nan() || rho.is_infinite() {
                return Err(Error::Domain(format!("density is not finite at r = {r}")));
            }
            if rho < 0.0 {
                return Err(Error::NegativeDensity { r });
            }
        }
        let mut out = Self {
            radius,
            density: Box::new(density),
            rule,
            total_mass: 0.0,
        };
        out.total_mass = out.mass_within(radius);
        Ok(out)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let panels = ((PANELS as f64 * (hi - lo) / self.radius).ceil() as usize).max(1);
        self.rule.integrate(f, lo, hi, panels)
    }

    /// `m(r) = 4π ∫_0^r s² ρ(s) ds`.
    pub fn enclosed_mass(&self, r: f64) -> f64 {
        if r >= self.radius {
            return self.total_mass;
        }
        self.mass_within(r)
    }

    fn mass_within(&self, r: f64) -> f64 {
        4.0 * PI * self.integrate(|s| s * s * (self.density)(s), 0.0, r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        if r >= self.radius {
            self.exterior_phi(r)
        } else {
            self.interior_phi(r)
        }
    }

    /// `dφ/dr = m(r) / r²`.
    pub fn dphi_dr(&self, r: f64) -> f64 {
        if r >= self.radius {
            self.exterior_dphi_dr(r)
        } else {
            self.interior_dphi_dr(r)
        }
    }

    /// Interior solution `-m(r)/r - 4π ∫_r^R s ρ ds`, valid for `0 <= r <= R`.
    pub fn interior_phi(&self, r: f64) -> f64 {
        let outer = 4.0 * PI * self.integrate(|s| s * (self.density)(s), r, self.radius);
        if r == 0.0 {
            return -outer;
        }
        -self.mass_within(r) / r - outer
    }

    pub fn interior_dphi_dr(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        self.mass_within(r) / (r * r)
    }

    /// Exterior (Laplace) solution `-M/r`, valid for `r >= R`.
    pub fn exterior_phi(&self, r: f64) -> f64 {
        -self.total_mass / r
    }

    pub fn exterior_dphi_dr(&self, r: f64) -> f64 {
        self.total_mass / (r * r)
    }
}

/// `φ` at each of `r_samples` for density `ρ` supported on `r ≤ radius`.
pub fn poisson_radial<F: Fn(f64) -> f64 + 'static>(
    density: F,
    radius: f64,
    r_samples: &[f64],
) -> Result<Vec<f64>> {
    let body = RadialPotential::new(density, radius)?;
    r_samples
        .iter()
        .map(|&r| {
            if r >= 0.0 && r.is_finite() {
                Ok(body.phi(r))
            } else {
                Err(Error::Domain(format!(
                    "sample radius must be finite and non-negative, got {r}"
                )))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(mass: f64, radius: f64) -> impl Fn(f64) -> f64 {
        let rho = 3.0 * mass / (4.0 * PI * radius.powi(3));
        move |r| if r <= radius { rho } else { 0.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gauss_legendre_exactness() {
        let rule = GaussLegendre::new(8);
        assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Exact through degree 15.
        for k in 0..16 {
            let got = rule.integrate(|x| x.powi(k), -1.0, 1.0, 1);
            let want = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            assert!((got - want).abs() < 1e-14, "x^{k}: {got} vs {want}");
        }
        assert!((rule.integrate(f64::sin, 0.0, PI, 4) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn uniform_ball() {
        let (m, r_ball) = (2.5, 3.0);
        let body = RadialPotential::new(uniform(m, r_ball), r_ball).unwrap();
        assert!(rel(body.total_mass(), m) < 1e-13);
        assert!(rel(body.phi(0.0), -1.5 * m / r_ball) < 1e-12);
        for r in [0.1, 1.0, 2.0, 2.9] {
            let exact = -m * (3.0 * r_ball * r_ball - r * r) / (2.0 * r_ball.powi(3));
            assert!(rel(body.phi(r), exact) < 1e-12, "r={r}");
            assert!(rel(body.dphi_dr(r), m * r / r_ball.powi(3)) < 1e-12);
        }
        for r in [3.0, 3.5, 10.0, 1e4] {
            assert!(rel(body.phi(r), -m / r) < 1e-12);
        }
    }

    #[test]
    fn continuity_at_surface() {
        let profile = |r: f64| (1.0 - r * r).max(0.0) * (2.0 + r.cos());
        let body = RadialPotential::new(profile, 1.0).unwrap();
        let eps = 1e-12;
        let (inside, outside) = (body.phi(1.0 - eps), body.phi(1.0 + eps));
        assert!(rel(inside, outside) < 1e-8);
        assert!(rel(body.dphi_dr(1.0 - eps), body.dphi_dr(1.0 + eps)) < 1e-8);
        assert!(rel(body.interior_phi(1.0), body.exterior_phi(1.0)) < 1e-14);
        assert!(rel(body.interior_dphi_dr(1.0), body.exterior_dphi_dr(1.0)) < 1e-14);
    }

    #[test]
    fn enclosed_mass_matches_direct_quadrature() {
        // Shell theorem: only the enclosed mass acts outside.
        let profile = |r: f64| (-r).exp();
        let body = RadialPotential::new(profile, 2.0).unwrap();
        let exact = 4.0 * PI * (2.0 - (-2.0f64).exp() * (2.0 + 4.0 + 4.0));
        assert!(rel(body.total_mass(), exact) < 1e-13);
        assert!(rel(body.phi(5.0), -exact / 5.0) < 1e-13);
    }

    #[test]
    fn zero_density_and_errors() {
        let v = poisson_radial(|_| 0.0, 1.0, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
        assert!(matches!(
            poisson_radial(|r| r - 0.5, 1.0, &[1.0]),
            Err(Error::NegativeDensity { .. })
        ));
        assert!(poisson_radial(|_| 1.0, 0.0, &[1.0]).is_err());
        assert!(poisson_radial(|_| 1.0, 1.0, &[-1.0]).is_err());
    }
}
