//! Command-line driver for the `lanczos` binary: configuration, experiment
//! dispatch and the verification battery behind `verify-all`.

pub mod battery;
pub mod config;
pub mod run;

use std::fmt;

use thiserror::Error;

pub use config::{parse_config, Experiment, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Core(#[from] lanczos_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Acceptance bound of a check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn admits(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost(b) => x <= b,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "{b:e}"),
            Bound::Within(lo, hi) => write!(f, "[{lo},{hi}]"),
        }
    }
}

/// One certificate line.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
        }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, Bound::AtMost(bound))
    }

    pub fn within(name: impl Into<String>, measured: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, measured, Bound::Within(lo, hi))
    }

    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.bound.admits(self.measured)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} measured={:.6e} bound={}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.measured,
            self.bound
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_format() {
        let c = Check::at_most("reciprocity", 3.2e-12, 1e-8);
        assert_eq!(
            c.to_string(),
            "CHECK reciprocity PASS measured=3.200000e-12 bound=1e-8"
        );
        let c = Check::within("order", 5.0, 3.5, 4.5);
        assert_eq!(
            c.to_string(),
            "CHECK order FAIL measured=5.000000e0 bound=[3.5,4.5]"
        );
        assert!(!Check::at_most("nan", f64::NAN, 1.0).passed());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG);
        let numerical = lanczos_core::Error::CrossedFloor {
            step: 3,
            r: 2.9,
            r_min: 3.0,
        };
        assert_eq!(CliError::from(numerical).exit_code(), EXIT_NUMERICAL);
        let domain = lanczos_core::Error::Domain("bad".into());
        assert_eq!(CliError::from(domain).exit_code(), EXIT_CONFIG);
    }
}
