use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::output::{csv_writer, fmt_f64};

use super::metric::{christoffel, norm, StaticMetric, TIME};

/// Divergence levels reported by [`compare_motion_laws`].
pub const DIVERGENCE_THRESHOLDS: [f64; 3] = [1e-8, 1e-6, 1e-4];

/// Tolerance on `g(u, u) = -1` for an initial four-velocity.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    LanczosStatic,
    FullGeodesic,
}

impl Law {
    pub fn as_str(self) -> &'static str {
        match self {
            Law::LanczosStatic => "lanczos-static",
            Law::FullGeodesic => "full-geodesic",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub x4: f64,
    pub xi: [f64; 3],
    pub dxi_dx4: [f64; 3],
}

impl TrajectorySample {
    pub fn radius(&self) -> f64 {
        norm(&self.xi)
    }
}

/// Particle path sampled against coordinate time `x4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub law: Law,
    pub samples: Vec<TrajectorySample>,
    /// Carried along for reporting only.
    pub mass_tag: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectories are never empty")
    }

    /// Columns `x4,x,y,z,vx,vy,vz,law,mass_tag`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["x4", "x", "y", "z", "vx", "vy", "vz", "law", "mass_tag"])?;
        let law = self.law.as_str();
        let tag = fmt_f64(self.mass_tag);
        for s in &self.samples {
            let mut row: Vec<String> = Vec::with_capacity(9);
            row.push(fmt_f64(s.x4));
            row.extend(s.xi.iter().map(|&v| fmt_f64(v)));
            row.extend(s.dxi_dx4.iter().map(|&v| fmt_f64(v)));
            row.push(law.to_owned());
            row.push(tag.clone());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Right-hand side of the static-condition law `d²ξⁱ/dx₄² = -Γⁱ₄₄(ξ)`.
///
/// There is no mass argument: the law does not involve the particle's mass.
pub fn lanczos_static_rhs<M: StaticMetric + ?Sized>(metric: &M, xi: &[f64; 3]) -> Result<[f64; 3]> {
    let c = christoffel(metric, xi)?;
    Ok([
        -c.get(0, TIME, TIME),
        -c.get(1, TIME, TIME),
        -c.get(2, TIME, TIME),
    ])
}

/// `d²ξⁱ/dt²` of a geodesic written in coordinate time, for spatial velocity
/// `v = dξ/dt`:
/// `-Γⁱ_αβ w^α w^β + Γ⁴_αβ w^α w^β vⁱ` with `w = (v, 1)`.
pub fn coordinate_geodesic_acceleration<M: StaticMetric + ?Sized>(
    metric: &M,
    xi: &[f64; 3],
    v: &[f64; 3],
) -> Result<[f64; 3]> {
    let c = christoffel(metric, xi)?.contract(&[v[0], v[1], v[2], 1.0]);
    Ok([
        -c[0] + c[TIME] * v[0],
        -c[1] + c[TIME] * v[1],
        -c[2] + c[TIME] * v[2],
    ])
}

/// `d²ξⁱ/dx₄²` implied by the proper-time geodesic equation at four-velocity
/// `u`: with `a = -Γ u u`, it is `(aⁱ u⁴ - uⁱ a⁴) / (u⁴)³`.
pub fn proper_time_coordinate_acceleration<M: StaticMetric + ?Sized>(
    metric: &M,
    xi: &[f64; 3],
    u: &[f64; 4],
) -> Result<[f64; 3]> {
    let c = christoffel(metric, xi)?.contract(u);
    let ut = u[TIME];
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (-c[i] * ut + u[i] * c[TIME]) / (ut * ut * ut);
    }
    Ok(out)
}

/// `g_μν u^μ u^ν` at a spatial position.
pub fn four_velocity_norm<M: StaticMetric + ?Sized>(
    metric: &M,
    xi: &[f64; 3],
    u: &[f64; 4],
) -> Result<f64> {
    let g = metric.tensor(xi)?;
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += g[a][b] * u[a] * u[b];
        }
    }
    Ok(acc)
}

/// Four-velocity of a particle momentarily at rest at `xi`.
pub fn rest_four_velocity<M: StaticMetric + ?Sized>(metric: &M, xi: &[f64; 3]) -> Result<[f64; 4]> {
    let r = norm(xi);
    metric.check_radius(r)?;
    Ok([0.0, 0.0, 0.0, 1.0 / (-metric.g44(r)).sqrt()])
}

/// Four-velocity of the circular geodesic through `(r, 0, 0)` moving in `+y`,
/// with angular velocity `dφ/dt = √(-g44' / 2r)` (`√(M/r³)` for Schwarzschild).
pub fn circular_orbit_velocity<M: StaticMetric + ?Sized>(metric: &M, r: f64) -> Result<[f64; 4]> {
    metric.check_radius(r)?;
    let omega_sq = -metric.dg44_dr(r) / (2.0 * r);
    let denom = -metric.g44(r) - r * r * omega_sq;
    if omega_sq < 0.0 || denom <= 0.0 {
        return Err(Error::Domain(format!(
            "no timelike circular orbit at r = {r}"
        )));
    }
    let ut = 1.0 / denom.sqrt();
    Ok([0.0, r * omega_sq.sqrt() * ut, 0.0, ut])
}

fn rk4_step<const N: usize, F>(y: &[f64; N], h: f64, f: &F) -> Result<[f64; N]>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let offset = |k: &[f64; N], s: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&offset(&k1, 0.5 * h))?;
    let k3 = f(&offset(&k2, 0.5 * h))?;
    let k4 = f(&offset(&k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Fixed-step RK4 from `y0`; the first three components must be the spatial
/// position. A floor violation during step `k` (1-based) is reported as
/// [`Error::CrossedFloor`] with that step.
fn march<const N: usize, M, F>(
    metric: &M,
    y0: [f64; N],
    h: f64,
    steps: usize,
    f: F,
) -> Result<Vec<[f64; N]>>
where
    M: StaticMetric + ?Sized,
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y0);
    let mut y = y0;
    for step in 1..=steps {
        let crossed = |r: f64| Error::CrossedFloor {
            step,
            r,
            r_min: metric.r_min(),
        };
        y = rk4_step(&y, h, &f).map_err(|e| match e {
            Error::BelowFloor { r, .. } => crossed(r),
            other => other,
        })?;
        let r = norm(&[y[0], y[1], y[2]]);
        if metric.check_radius(r).is_err() {
            return Err(crossed(r));
        }
        states.push(y);
    }
    Ok(states)
}

fn check_steps(steps: usize, span: f64, name: &str) -> Result<()> {
    if steps < 10 {
        return Err(Error::Domain(format!(
            "steps must be at least 10, got {steps}"
        )));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::Domain(format!(
            "{name} must be positive and finite, got {span}"
        )));
    }
    Ok(())
}

/// RK4 integration of the static-condition law from `x4 = 0` to `x4_end`.
///
/// `v0` must vanish unless `allow_nonstatic` is set. `mass_tag` is copied into
/// the result untouched.
pub fn integrate_lanczos<M: StaticMetric + ?Sized>(
    metric: &M,
    xi0: [f64; 3],
    v0: [f64; 3],
    x4_end: f64,
    steps: usize,
    mass_tag: f64,
    allow_nonstatic: bool,
) -> Result<Trajectory> {
    check_steps(steps, x4_end, "x4_end")?;
    if !allow_nonstatic && v0 != [0.0; 3] {
        return Err(Error::NonStatic);
    }
    metric.check_radius(norm(&xi0))?;
    let h = x4_end / steps as f64;
    let y0 = [xi0[0], xi0[1], xi0[2], v0[0], v0[1], v0[2]];
    let states = march(metric, y0, h, steps, |y| {
        let a = lanczos_static_rhs(metric, &[y[0], y[1], y[2]])?;
        Ok([y[3], y[4], y[5], a[0], a[1], a[2]])
    })?;
    Ok(Trajectory {
        law: Law::LanczosStatic,
        samples: position_velocity_samples(&states, h),
        mass_tag,
    })
}

/// RK4 integration of the geodesic equation with coordinate time as the
/// parameter, on the same `x4` grid as [`integrate_lanczos`].
pub fn integrate_geodesic_coordinate_time<M: StaticMetric + ?Sized>(
    metric: &M,
    xi0: [f64; 3],
    v0: [f64; 3],
    x4_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    check_steps(steps, x4_end, "x4_end")?;
    metric.check_radius(norm(&xi0))?;
    let h = x4_end / steps as f64;
    let y0 = [xi0[0], xi0[1], xi0[2], v0[0], v0[1], v0[2]];
    let states = march(metric, y0, h, steps, |y| {
        let a = coordinate_geodesic_acceleration(metric, &[y[0], y[1], y[2]], &[y[3], y[4], y[5]])?;
        Ok([y[3], y[4], y[5], a[0], a[1], a[2]])
    })?;
    Ok(Trajectory {
        law: Law::FullGeodesic,
        samples: position_velocity_samples(&states, h),
        mass_tag: 1.0,
    })
}

fn position_velocity_samples(states: &[[f64; 6]], h: f64) -> Vec<TrajectorySample> {
    states
        .iter()
        .enumerate()
        .map(|(k, y)| TrajectorySample {
            x4: k as f64 * h,
            xi: [y[0], y[1], y[2]],
            dxi_dx4: [y[3], y[4], y[5]],
        })
        .collect()
}

/// Point on a proper-time geodesic. Index 3 of `position` and `velocity` is
/// the time component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub tau: f64,
    pub position: [f64; 4],
    pub velocity: [f64; 4],
}

impl GeodesicState {
    pub fn xi(&self) -> [f64; 3] {
        [self.position[0], self.position[1], self.position[2]]
    }

    pub fn radius(&self) -> f64 {
        norm(&self.xi())
    }

    /// Conserved energy `E = -g44 dt/dτ`.
    pub fn energy<M: StaticMetric + ?Sized>(&self, metric: &M) -> f64 {
        -metric.g44(self.radius()) * self.velocity[TIME]
    }

    /// Conserved `|x × dx/dτ|`, equal to `r² dφ/dτ` in the orbital plane.
    pub fn angular_momentum(&self) -> f64 {
        let (x, u) = (&self.position, &self.velocity);
        let l = [
            x[1] * u[2] - x[2] * u[1],
            x[2] * u[0] - x[0] * u[2],
            x[0] * u[1] - x[1] * u[0],
        ];
        norm(&l)
    }
}

/// Geodesic sampled in proper time.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub states: Vec<GeodesicState>,
}

impl GeodesicPath {
    pub fn first(&self) -> &GeodesicState {
        &self.states[0]
    }

    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("paths are never empty")
    }

    /// Reparametrizes by `x4 = t`; `dξ/dx4 = uⁱ / u⁴`.
    pub fn to_trajectory(&self) -> Trajectory {
        let samples = self
            .states
            .iter()
            .map(|s| {
                let ut = s.velocity[TIME];
                TrajectorySample {
                    x4: s.position[TIME],
                    xi: s.xi(),
                    dxi_dx4: [s.velocity[0] / ut, s.velocity[1] / ut, s.velocity[2] / ut],
                }
            })
            .collect();
        Trajectory {
            law: Law::FullGeodesic,
            samples,
            mass_tag: 1.0,
        }
    }

    fn max_relative_drift(&self, f: impl Fn(&GeodesicState) -> f64) -> f64 {
        let reference = f(self.first());
        self.states
            .iter()
            .map(|s| ((f(s) - reference) / reference).abs())
            .fold(0.0, f64::max)
    }

    pub fn energy_drift<M: StaticMetric + ?Sized>(&self, metric: &M) -> f64 {
        self.max_relative_drift(|s| s.energy(metric))
    }

    pub fn angular_momentum_drift(&self) -> f64 {
        self.max_relative_drift(GeodesicState::angular_momentum)
    }

    pub fn radius_drift(&self) -> f64 {
        self.max_relative_drift(GeodesicState::radius)
    }
}

/// RK4 integration of `d²x^μ/dτ² = -Γ^μ_αβ u^α u^β` from `τ = 0`, `t = 0`.
///
/// `u0` is ordered `(uˣ, uʸ, uᶻ, u⁴)` and must satisfy `g(u0, u0) = -1`.
pub fn integrate_geodesic_path<M: StaticMetric + ?Sized>(
    metric: &M,
    xi0: [f64; 3],
    u0: [f64; 4],
    tau_end: f64,
    steps: usize,
) -> Result<GeodesicPath> {
    check_steps(steps, tau_end, "tau_end")?;
    let value = four_velocity_norm(metric, &xi0, &u0)?;
    if !((value + 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::FourVelocityNorm { value });
    }
    if u0[TIME] <= 0.0 {
        return Err(Error::Domain(
            "four-velocity must be future directed (u4 > 0)".into(),
        ));
    }
    let h = tau_end / steps as f64;
    let y0 = [xi0[0], xi0[1], xi0[2], 0.0, u0[0], u0[1], u0[2], u0[3]];
    let states = march(metric, y0, h, steps, |y| {
        let u = [y[4], y[5], y[6], y[7]];
        let a = christoffel(metric, &[y[0], y[1], y[2]])?.contract(&u);
        Ok([u[0], u[1], u[2], u[3], -a[0], -a[1], -a[2], -a[3]])
    })?;
    let states = states
        .iter()
        .enumerate()
        .map(|(k, y)| GeodesicState {
            tau: k as f64 * h,
            position: [y[0], y[1], y[2], y[3]],
            velocity: [y[4], y[5], y[6], y[7]],
        })
        .collect();
    Ok(GeodesicPath { states })
}

/// Proper-time geodesic, reparametrized to coordinate time.
pub fn integrate_full_geodesic<M: StaticMetric + ?Sized>(
    metric: &M,
    xi0: [f64; 3],
    u0: [f64; 4],
    tau_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    Ok(integrate_geodesic_path(metric, xi0, u0, tau_end, steps)?.to_trajectory())
}

/// Pointwise separation of the two motion laws started from rest.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub x4: Vec<f64>,
    pub divergence: Vec<f64>,
    /// First `x4` at which the divergence exceeds each of
    /// [`DIVERGENCE_THRESHOLDS`], if it does within the horizon.
    pub first_exceedance: Vec<(f64, Option<f64>)>,
    /// Max component difference of `d²ξ/dx4²` at `x4 = 0` between the static
    /// law and the proper-time geodesic.
    pub initial_acceleration_difference: f64,
}

impl DivergenceReport {
    pub fn max_divergence(&self) -> f64 {
        self.divergence.iter().copied().fold(0.0, f64::max)
    }

    /// True when the divergence never decreases after the first sample.
    pub fn is_monotone(&self) -> bool {
        self.divergence.windows(2).skip(1).all(|w| w[1] >= w[0])
    }

    /// Columns `x4,abs_divergence`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["x4", "abs_divergence"])?;
        for (t, d) in self.x4.iter().zip(&self.divergence) {
            w.write_record([fmt_f64(*t), fmt_f64(*d)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the static law and the geodesic from rest at `xi0` on a shared
/// `x4` grid. Away from `x4 = 0` the geodesic picks up velocity-dependent
/// terms the static law lacks, so growing divergence is expected.
pub fn compare_motion_laws<M: StaticMetric + ?Sized>(
    metric: &M,
    xi0: [f64; 3],
    horizon: f64,
    steps: usize,
) -> Result<DivergenceReport> {
    let lanczos = integrate_lanczos(metric, xi0, [0.0; 3], horizon, steps, 1.0, false)?;
    let geodesic = integrate_geodesic_coordinate_time(metric, xi0, [0.0; 3], horizon, steps)?;

    let x4: Vec<f64> = lanczos.samples.iter().map(|s| s.x4).collect();
    let divergence: Vec<f64> = lanczos
        .samples
        .iter()
        .zip(&geodesic.samples)
        .map(|(a, b)| norm(&[a.xi[0] - b.xi[0], a.xi[1] - b.xi[1], a.xi[2] - b.xi[2]]))
        .collect();
    let first_exceedance = DIVERGENCE_THRESHOLDS
        .iter()
        .map(|&th| {
            (
                th,
                x4.iter()
                    .zip(&divergence)
                    .find(|(_, &d)| d > th)
                    .map(|(&t, _)| t),
            )
        })
        .collect();

    let static_acc = lanczos_static_rhs(metric, &xi0)?;
    let geo_acc =
        proper_time_coordinate_acceleration(metric, &xi0, &rest_four_velocity(metric, &xi0)?)?;
    let initial_acceleration_difference = (0..3)
        .map(|i| (static_acc[i] - geo_acc[i]).abs())
        .fold(0.0, f64::max);

    Ok(DivergenceReport {
        x4,
        divergence,
        first_exceedance,
        initial_acceleration_difference,
    })
}
