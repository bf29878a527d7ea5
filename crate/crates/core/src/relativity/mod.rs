//! Motion in a static, spherically symmetric gravitational field.
//!
//! Geometric units (G = c = 1). Coordinates are Cartesian `x, y, z` (indices
//! 0..3) plus the time coordinate `x₄ = t` at index [`TIME`].

mod metric;
mod motion;
mod poisson;

pub use metric::{christoffel, radial_gamma_44, Christoffel, Schwarzschild, StaticMetric, TIME};
pub use motion::{
    circular_orbit_velocity, compare_motion_laws, coordinate_geodesic_acceleration,
    four_velocity_norm, integrate_full_geodesic, integrate_geodesic_coordinate_time,
    integrate_geodesic_path, integrate_lanczos, lanczos_static_rhs,
    proper_time_coordinate_acceleration, rest_four_velocity, DivergenceReport, GeodesicPath,
    GeodesicState, Law, Trajectory, TrajectorySample, DIVERGENCE_THRESHOLDS, NORMALIZATION_TOL,
};
pub use poisson::{poisson_radial, GaussLegendre, RadialPotential};
