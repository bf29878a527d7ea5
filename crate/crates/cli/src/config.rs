//! Plain `key = value` run configuration.
//!
//! ```text
//! # comment
//! experiment = reciprocity
//! [grid]
//! a = 0
//! b = 1
//! n = 400
//! [potential]
//! name = well-bump
//! c = 50
//! ```
//!
//! Sections: `grid`, `potential`, `spectrum`, `kernel`, `pictures`, `metric`,
//! `poisson`. Keys before the first section header are top level
//! (`experiment`, `output`). Every key is optional; missing keys take the
//! defaults of [`RunConfig::default`].

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lanczos_core::kernel::KernelOrigin;
use lanczos_core::relativity::{Schwarzschild, StaticMetric};
use lanczos_core::schrodinger::Potential;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    Kernel,
    Reciprocity,
    Pictures,
    Geodesic,
    Poisson,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Spectrum,
        Experiment::Kernel,
        Experiment::Reciprocity,
        Experiment::Pictures,
        Experiment::Geodesic,
        Experiment::Poisson,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Kernel => "kernel",
            Experiment::Reciprocity => "reciprocity",
            Experiment::Pictures => "pictures",
            Experiment::Geodesic => "geodesic",
            Experiment::Poisson => "poisson",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialConfig {
    pub name: String,
    /// Well-bump height, centre and width.
    pub c: f64,
    pub x0: f64,
    pub s: f64,
}

impl PotentialConfig {
    pub const NAMES: [&'static str; 4] = ["zero", "harmonic", "quartic", "well-bump"];

    pub fn build(&self) -> Potential {
        match self.name.as_str() {
            "harmonic" => Potential::harmonic(),
            "quartic" => Potential::quartic(),
            "well-bump" => Potential::well_bump(self.c, self.x0, self.s),
            _ => Potential::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    /// Number of levels; `None` means `min(5, n)`.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    pub origin: KernelOrigin,
    /// Number of pairs; `None` means `min(10, n)`.
    pub k: Option<usize>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicturesConfig {
    pub t_end: f64,
    pub times: usize,
    /// Derivative step; `None` picks `0.01 / max|H_ij|`.
    pub dt: Option<f64>,
    /// Initial Gaussian; `None` for centre and width places it at 40% of the
    /// interval with width 5% of its length.
    pub center: Option<f64>,
    pub width: Option<f64>,
    pub kick: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricConfig {
    pub mass: f64,
    pub margin: f64,
    pub r0: f64,
    pub v0: [f64; 3],
    pub horizon: f64,
    pub steps: usize,
    pub mass_tag: f64,
}

impl MetricConfig {
    pub fn build(&self) -> Schwarzschild {
        Schwarzschild::with_margin(self.mass, self.margin).expect("validated metric parameters")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonConfig {
    pub mass: f64,
    pub radius: f64,
    pub r_max: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub output: Option<PathBuf>,
    pub grid: GridConfig,
    pub potential: PotentialConfig,
    pub spectrum: SpectrumConfig,
    pub kernel: KernelConfig,
    pub pictures: PicturesConfig,
    pub metric: MetricConfig,
    pub poisson: PoissonConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            output: None,
            grid: GridConfig {
                a: 0.0,
                b: 1.0,
                n: 400,
            },
            potential: PotentialConfig {
                name: "zero".into(),
                c: 50.0,
                x0: 0.5,
                s: 0.1,
            },
            spectrum: SpectrumConfig { k: None },
            kernel: KernelConfig {
                origin: KernelOrigin::DiscreteInverse,
                k: None,
                tolerance: 1e-8,
            },
            pictures: PicturesConfig {
                t_end: 1.0,
                times: 20,
                dt: None,
                center: None,
                width: None,
                kick: 0.0,
                tolerance: 1e-8,
            },
            metric: MetricConfig {
                mass: 1.0,
                margin: Schwarzschild::DEFAULT_MARGIN,
                r0: 10.0,
                v0: [0.0; 3],
                horizon: 10.0,
                steps: 1000,
                mass_tag: 1.0,
            },
            poisson: PoissonConfig {
                mass: 1.0,
                radius: 1.0,
                r_max: 3.0,
                samples: 61,
            },
        }
    }
}

const SECTIONS: [&str; 7] = [
    "grid",
    "potential",
    "spectrum",
    "kernel",
    "pictures",
    "metric",
    "poisson",
];

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let mut section = String::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| CliError::Config(format!("line {line_no}: {msg}"));
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(format!("malformed section header `{line}`")))?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(err(format!("unknown section `[{name}]`")));
            }
            section = name.to_owned();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err("missing key before `=`".into()));
        }
        let qualified = if section.is_empty() {
            key.to_owned()
        } else {
            format!("{section}.{key}")
        };
        if !seen.insert(qualified.clone()) {
            return Err(err(format!("duplicate key `{qualified}`")));
        }
        assign(&mut cfg, &section, key, value).map_err(err)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn real(key: &str, value: &str) -> Result<f64, String> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!(
            "`{key}` expects a finite real number, got `{value}`"
        )),
    }
}

fn count(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))
}

fn assign(cfg: &mut RunConfig, section: &str, key: &str, value: &str) -> Result<(), String> {
    match (section, key) {
        ("", "experiment") => cfg.experiment = Some(value.parse()?),
        ("", "output") => cfg.output = Some(PathBuf::from(value)),
        ("grid", "a") => cfg.grid.a = real(key, value)?,
        ("grid", "b") => cfg.grid.b = real(key, value)?,
        ("grid", "n") => cfg.grid.n = count(key, value)?,
        ("potential", "name") => {
            if !PotentialConfig::NAMES.contains(&value) {
                return Err(format!(
                    "unknown potential `{value}` (expected one of {})",
                    PotentialConfig::NAMES.join(", ")
                ));
            }
            cfg.potential.name = value.to_owned();
        }
        ("potential", "c") => cfg.potential.c = real(key, value)?,
        ("potential", "x0") => cfg.potential.x0 = real(key, value)?,
        ("potential", "s") => cfg.potential.s = real(key, value)?,
        ("spectrum", "k") => cfg.spectrum.k = Some(count(key, value)?),
        ("kernel", "origin") => {
            cfg.kernel.origin = value
                .parse()
                .map_err(|e: lanczos_core::Error| e.to_string())?
        }
        ("kernel", "k") => cfg.kernel.k = Some(count(key, value)?),
        ("kernel", "tolerance") => cfg.kernel.tolerance = real(key, value)?,
        ("pictures", "t_end") => cfg.pictures.t_end = real(key, value)?,
        ("pictures", "times") => cfg.pictures.times = count(key, value)?,
        ("pictures", "dt") => cfg.pictures.dt = Some(real(key, value)?),
        ("pictures", "center") => cfg.pictures.center = Some(real(key, value)?),
        ("pictures", "width") => cfg.pictures.width = Some(real(key, value)?),
        ("pictures", "kick") => cfg.pictures.kick = real(key, value)?,
        ("pictures", "tolerance") => cfg.pictures.tolerance = real(key, value)?,
        ("metric", "M") | ("metric", "mass") => cfg.metric.mass = real(key, value)?,
        ("metric", "margin") => cfg.metric.margin = real(key, value)?,
        ("metric", "r0") => cfg.metric.r0 = real(key, value)?,
        ("metric", "vx") => cfg.metric.v0[0] = real(key, value)?,
        ("metric", "vy") => cfg.metric.v0[1] = real(key, value)?,
        ("metric", "vz") => cfg.metric.v0[2] = real(key, value)?,
        ("metric", "horizon") => cfg.metric.horizon = real(key, value)?,
        ("metric", "steps") => cfg.metric.steps = count(key, value)?,
        ("metric", "mass_tag") => cfg.metric.mass_tag = real(key, value)?,
        ("poisson", "mass") => cfg.poisson.mass = real(key, value)?,
        ("poisson", "radius") => cfg.poisson.radius = real(key, value)?,
        ("poisson", "r_max") => cfg.poisson.r_max = real(key, value)?,
        ("poisson", "samples") => cfg.poisson.samples = count(key, value)?,
        _ if section.is_empty() => return Err(format!("unknown key `{key}`")),
        _ => return Err(format!("unknown key `{key}` in [{section}]")),
    }
    Ok(())
}

fn require(
    ok: bool,
    key: &str,
    value: impl fmt::Display,
    constraint: &str,
) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{key} = {value} violates {constraint}"
        )))
    }
}

impl RunConfig {
    /// Checks every parameter against the preconditions of the operation it
    /// feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        require(g.n >= 3, "grid.n", g.n, "n >= 3")?;
        require(g.b > g.a, "grid.b", g.b, &format!("b > a (a = {})", g.a))?;

        require(
            self.potential.s > 0.0,
            "potential.s",
            self.potential.s,
            "s > 0",
        )?;

        for (key, k) in [("spectrum.k", self.spectrum.k), ("kernel.k", self.kernel.k)] {
            if let Some(k) = k {
                require(
                    k >= 1 && k <= g.n,
                    key,
                    k,
                    &format!("1 <= k <= n (n = {})", g.n),
                )?;
            }
        }
        require(
            self.kernel.tolerance > 0.0,
            "kernel.tolerance",
            self.kernel.tolerance,
            "tolerance > 0",
        )?;

        let p = &self.pictures;
        require(p.times >= 1, "pictures.times", p.times, "times >= 1")?;
        require(p.t_end >= 0.0, "pictures.t_end", p.t_end, "t_end >= 0")?;
        if let Some(dt) = p.dt {
            require(dt > 0.0, "pictures.dt", dt, "dt > 0")?;
        }
        if let Some(w) = p.width {
            require(w > 0.0, "pictures.width", w, "width > 0")?;
        }
        if let Some(c) = p.center {
            require(
                c > g.a && c < g.b,
                "pictures.center",
                c,
                &format!("a < center < b ({}, {})", g.a, g.b),
            )?;
        }
        require(
            p.tolerance > 0.0,
            "pictures.tolerance",
            p.tolerance,
            "tolerance > 0",
        )?;

        let m = &self.metric;
        require(m.mass >= 0.0, "metric.M", m.mass, "M >= 0")?;
        require(m.margin > 0.0, "metric.margin", m.margin, "margin > 0")?;
        let r_min = Schwarzschild::with_margin(m.mass, m.margin)
            .map(|s| s.r_min())
            .unwrap_or(f64::INFINITY);
        require(
            m.r0 > r_min,
            "metric.r0",
            m.r0,
            &format!("r0 > r_min = 2M(1 + margin) = {r_min}"),
        )?;
        require(m.horizon > 0.0, "metric.horizon", m.horizon, "horizon > 0")?;
        require(m.steps >= 10, "metric.steps", m.steps, "steps >= 10")?;

        let q = &self.poisson;
        require(q.mass >= 0.0, "poisson.mass", q.mass, "mass >= 0")?;
        require(q.radius > 0.0, "poisson.radius", q.radius, "radius > 0")?;
        require(
            q.r_max > q.radius,
            "poisson.r_max",
            q.r_max,
            &format!("r_max > radius = {}", q.radius),
        )?;
        require(q.samples >= 2, "poisson.samples", q.samples, "samples >= 2")?;
        Ok(())
    }

    pub fn spectrum_k(&self) -> usize {
        self.spectrum.k.unwrap_or(self.grid.n.min(5))
    }

    pub fn kernel_k(&self) -> usize {
        self.kernel.k.unwrap_or(self.grid.n.min(10))
    }

    /// Initial Gaussian centre and width for the pictures run.
    pub fn wavepacket(&self) -> (f64, f64) {
        let len = self.grid.b - self.grid.a;
        (
            self.pictures.center.unwrap_or(self.grid.a + 0.4 * len),
            self.pictures.width.unwrap_or(0.05 * len),
        )
    }
}
