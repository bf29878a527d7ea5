use crate::error::{Error, Result};

/// Index of the time coordinate `x₄`; indices `0..3` are Cartesian `x, y, z`.
pub const TIME: usize = 3;

/// Static, spherically symmetric line element
/// `ds² = g44(r) dt² + grr(r) dr² + r² dΩ²` in geometric units (G = c = 1).
///
/// Spatial coordinates are Cartesian, so the spatial metric is
/// `g_ij = δ_ij + (grr - 1) n_i n_j` with `n = x / r`.
pub trait StaticMetric {
    fn label(&self) -> &str;

    /// Central mass `M`.
    fn mass(&self) -> f64;

    /// Validity floor: the metric is only evaluated for `r > r_min`.
    fn r_min(&self) -> f64;

    fn g44(&self, r: f64) -> f64;
    fn grr(&self, r: f64) -> f64;
    fn dg44_dr(&self, r: f64) -> f64;
    fn dgrr_dr(&self, r: f64) -> f64;

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > self.r_min()) || !r.is_finite() {
            return Err(Error::BelowFloor {
                r,
                r_min: self.r_min(),
            });
        }
        Ok(())
    }

    /// Full `g_μν` at a Cartesian position.
    fn tensor(&self, position: &[f64; 3]) -> Result<[[f64; 4]; 4]> {
        let r = norm(position);
        self.check_radius(r)?;
        let f = self.grr(r) - 1.0;
        let mut g = [[0.0; 4]; 4];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = f * position[i] * position[j] / (r * r) + if i == j { 1.0 } else { 0.0 };
            }
        }
        g[TIME][TIME] = self.g44(r);
        Ok(g)
    }
}

/// Schwarzschild exterior: `g44 = -(1 - 2M/r)`, `grr = 1 / (1 - 2M/r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schwarzschild {
    mass: f64,
    margin: f64,
}

impl Schwarzschild {
    pub const DEFAULT_MARGIN: f64 = 0.5;

    pub fn new(mass: f64) -> Result<Self> {
        Self::with_margin(mass, Self::DEFAULT_MARGIN)
    }

    /// `r_min = 2M (1 + margin)`.
    pub fn with_margin(mass: f64, margin: f64) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!(
                "mass must be finite and non-negative, got {mass}"
            )));
        }
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(Error::Domain(format!(
                "r_min margin must be positive, got {margin}"
            )));
        }
        Ok(Self { mass, margin })
    }

    pub fn flat() -> Self {
        Self {
            mass: 0.0,
            margin: Self::DEFAULT_MARGIN,
        }
    }

    fn lapse_sq(&self, r: f64) -> f64 {
        1.0 - 2.0 * self.mass / r
    }
}

impl StaticMetric for Schwarzschild {
    fn label(&self) -> &str {
        "schwarzschild"
    }

    fn mass(&self) -> f64 {
        self.mass
    }

    fn r_min(&self) -> f64 {
        2.0 * self.mass * (1.0 + self.margin)
    }

    fn g44(&self, r: f64) -> f64 {
        -self.lapse_sq(r)
    }

    fn grr(&self, r: f64) -> f64 {
        1.0 / self.lapse_sq(r)
    }

    fn dg44_dr(&self, r: f64) -> f64 {
        -2.0 * self.mass / (r * r)
    }

    fn dgrr_dr(&self, r: f64) -> f64 {
        let f = self.lapse_sq(r);
        -2.0 * self.mass / (r * r * f * f)
    }
}

pub(crate) fn norm(x: &[f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

/// Christoffel symbols `Γ^μ_αβ` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    components: [[[f64; 4]; 4]; 4],
}

impl Christoffel {
    pub fn get(&self, upper: usize, lower1: usize, lower2: usize) -> f64 {
        self.components[upper][lower1][lower2]
    }

    /// `Γ^μ_αβ u^α u^β`.
    pub fn contract(&self, u: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (mu, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    acc += self.components[mu][a][b] * u[a] * u[b];
                }
            }
            *slot = acc;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .flatten()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Analytic Christoffel symbols of a static spherically symmetric metric at
/// a Cartesian position. Nonzero families:
///
/// * `Γⁱ₄₄ = -g44' nᵢ / (2 grr)`
/// * `Γ⁴₄ᵢ = Γ⁴ᵢ₄ = g44' nᵢ / (2 g44)`
/// * `Γⁱⱼₖ = (nᵢ / grr) [grr' nⱼ nₖ / 2 + (grr - 1)(δⱼₖ - nⱼ nₖ) / r]`
pub fn christoffel<M: StaticMetric + ?Sized>(
    metric: &M,
    position: &[f64; 3],
) -> Result<Christoffel> {
    let r = norm(position);
    metric.check_radius(r)?;
    let n = [position[0] / r, position[1] / r, position[2] / r];
    let g44 = metric.g44(r);
    let grr = metric.grr(r);
    let dg44 = metric.dg44_dr(r);
    let dgrr = metric.dgrr_dr(r);

    let mut c = [[[0.0; 4]; 4]; 4];
    for i in 0..3 {
        c[i][TIME][TIME] = -0.5 * dg44 * n[i] / grr;
        c[TIME][TIME][i] = 0.5 * dg44 * n[i] / g44;
        c[TIME][i][TIME] = c[TIME][TIME][i];
        for j in 0..3 {
            for k in 0..3 {
                let delta = if j == k { 1.0 } else { 0.0 };
                c[i][j][k] = n[i] / grr
                    * (0.5 * dgrr * n[j] * n[k] + (grr - 1.0) / r * (delta - n[j] * n[k]));
            }
        }
    }
    Ok(Christoffel { components: c })
}

/// `Γʳ₄₄`, the radial component of `Γⁱ₄₄`.
pub fn radial_gamma_44<M: StaticMetric + ?Sized>(metric: &M, r: f64) -> Result<f64> {
    metric.check_radius(r)?;
    Ok(-0.5 * metric.dg44_dr(r) / metric.grr(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Γ from central differences of the metric tensor, independent of the
    /// closed forms above.
    fn christoffel_fd<M: StaticMetric>(metric: &M, x: &[f64; 3], step: f64) -> [[[f64; 4]; 4]; 4] {
        let g = metric.tensor(x).unwrap();
        let mut dg = [[[0.0; 4]; 4]; 4]; // dg[l][m][n] = ∂_l g_mn
        for l in 0..3 {
            let mut plus = *x;
            let mut minus = *x;
            plus[l] += step;
            minus[l] -= step;
            let gp = metric.tensor(&plus).unwrap();
            let gm = metric.tensor(&minus).unwrap();
            for m in 0..4 {
                for n in 0..4 {
                    dg[l][m][n] = (gp[m][n] - gm[m][n]) / (2.0 * step);
                }
            }
        }
        let inv = invert4(&g);
        let mut out = [[[0.0; 4]; 4]; 4];
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let mut acc = 0.0;
                    for s in 0..4 {
                        acc += 0.5 * inv[mu][s] * (dg[a][s][b] + dg[b][s][a] - dg[s][a][b]);
                    }
                    out[mu][a][b] = acc;
                }
            }
        }
        out
    }

    fn invert4(g: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
        // Gauss-Jordan with partial pivoting.
        let mut a = *g;
        let mut inv = [[0.0; 4]; 4];
        for i in 0..4 {
            inv[i][i] = 1.0;
        }
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
                .unwrap();
            a.swap(col, piv);
            inv.swap(col, piv);
            let d = a[col][col];
            for j in 0..4 {
                a[col][j] /= d;
                inv[col][j] /= d;
            }
            for row in 0..4 {
                if row != col {
                    let f = a[row][col];
                    for j in 0..4 {
                        a[row][j] -= f * a[col][j];
                        inv[row][j] -= f * inv[col][j];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn flat_space_is_connection_free() {
        let flat = Schwarzschild::flat();
        for x in [[1.0, 2.0, 3.0], [0.1, 0.0, 0.0], [-50.0, 3.0, 7.0]] {
            assert_eq!(christoffel(&flat, &x).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn schwarzschild_gamma_r44() {
        let m = Schwarzschild::new(1.0).unwrap();
        let c = christoffel(&m, &[10.0, 0.0, 0.0]).unwrap();
        assert!((c.get(0, TIME, TIME) - 0.008).abs() < 1e-15);
        assert!((radial_gamma_44(&m, 10.0).unwrap() - 0.008).abs() < 1e-15);
        assert_eq!(c.get(1, TIME, TIME), 0.0);
    }

    #[test]
    fn lower_index_symmetry() {
        let m = Schwarzschild::new(1.3).unwrap();
        let c = christoffel(&m, &[4.0, -3.0, 2.5]).unwrap();
        for mu in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(c.get(mu, a, b), c.get(mu, b, a));
                }
            }
        }
    }

    #[test]
    fn matches_finite_differences() {
        let m = Schwarzschild::new(1.0).unwrap();
        for r in [5.0, 10.0, 100.0] {
            for dir in [[1.0, 0.0, 0.0], [0.6, 0.0, 0.8], [0.48, -0.6, 0.64]] {
                let x = [r * dir[0], r * dir[1], r * dir[2]];
                let exact = christoffel(&m, &x).unwrap();
                let fd = christoffel_fd(&m, &x, 1e-4 * r);
                for mu in 0..4 {
                    for a in 0..4 {
                        for b in 0..4 {
                            let diff = (exact.get(mu, a, b) - fd[mu][a][b]).abs();
                            assert!(diff <= 1e-6, "r={r} Γ^{mu}_{a}{b}: {diff:e}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn radius_floor() {
        let m = Schwarzschild::new(1.0).unwrap();
        assert_eq!(m.r_min(), 3.0);
        assert!(matches!(
            christoffel(&m, &[3.0, 0.0, 0.0]),
            Err(Error::BelowFloor { .. })
        ));
        assert!(christoffel(&m, &[3.0001, 0.0, 0.0]).is_ok());
        assert!(Schwarzschild::new(-1.0).is_err());
        assert!(Schwarzschild::with_margin(1.0, 0.0).is_err());
    }
}
