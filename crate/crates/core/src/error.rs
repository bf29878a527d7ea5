use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not {kind} (max asymmetry {deviation:e})")]
    NotSymmetric { kind: &'static str, deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("potential is not finite at x = {x}")]
    NonFinitePotential { x: f64 },

    #[error("Hamiltonian is not positive definite: an eigenvalue lies below {threshold:e}")]
    SingularHamiltonian { threshold: f64 },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("state is not normalized: quadrature norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("radius {r} is at or below the validity floor r_min = {r_min}")]
    BelowFloor { r: f64, r_min: f64 },

    #[error("trajectory crossed r_min = {r_min} at step {step} (r = {r})")]
    CrossedFloor { step: usize, r: f64, r_min: f64 },

    #[error("initial velocity must vanish for the static-condition law (pass allow_nonstatic to override)")]
    NonStatic,

    #[error("four-velocity is not normalized: g(u, u) = {value}")]
    FourVelocityNorm { value: f64 },

    #[error("density is negative at r = {r}")]
    NegativeDensity { r: f64 },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SingularHamiltonian { .. }
                | Error::CrossedFloor { .. }
        )
    }
}
