//! One experiment per invocation: build the objects from a validated
//! [`RunConfig`], write CSV tables into the output directory and collect
//! certificate checks.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use lanczos_core::grid::{make_grid, trapezoid_weights, Grid1D};
use lanczos_core::kernel::{
    certify_reciprocity, kernel_analytic_free, kernel_from_inverse, kernel_spectrum, Kernel,
    KernelOrigin,
};
use lanczos_core::output::{csv_writer, fmt_f64};
use lanczos_core::pictures::{
    compare_pictures, heisenberg_derivative_deviation, Observable, Propagator, StateVector,
};
use lanczos_core::relativity::{
    compare_motion_laws, integrate_geodesic_path, integrate_lanczos, RadialPotential, StaticMetric,
    TIME,
};
use lanczos_core::schrodinger::{assemble_hamiltonian, solve_spectrum, Hamiltonian};
use num_complex::Complex64;

use crate::config::{Experiment, RunConfig};
use crate::{Check, CliError};

/// Certificates and informational lines from one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.notes.extend(other.notes);
        self.checks.extend(other.checks);
    }

    /// Notes first, then one `CHECK` line per check.
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for n in &self.notes {
            writeln!(out, "{n}")?;
        }
        for c in &self.checks {
            writeln!(out, "{c}")?;
        }
        Ok(())
    }
}

/// Creates `dir/name` and hands a buffered writer to `body`.
pub fn write_output<F>(dir: &Path, name: &str, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> lanczos_core::Result<()>,
{
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Relative difference `|a - b| / |b|`, zero when the two agree exactly.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn run_experiment(
    experiment: Experiment,
    cfg: &RunConfig,
    out: &Path,
    allow_nonstatic: bool,
) -> Result<Report, CliError> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(CliError::Config(format!(
                "experiment = {e} in the config does not match the `{experiment}` subcommand"
            )));
        }
    }
    match experiment {
        Experiment::Spectrum => spectrum(cfg, out),
        Experiment::Kernel => kernel(cfg, out),
        Experiment::Reciprocity => reciprocity(cfg, out),
        Experiment::Pictures => pictures(cfg, out),
        Experiment::Geodesic => geodesic(cfg, out, allow_nonstatic),
        Experiment::Poisson => poisson(cfg, out),
    }
}

fn hamiltonian(cfg: &RunConfig) -> Result<Hamiltonian, CliError> {
    let g = &cfg.grid;
    let grid = make_grid(g.a, g.b, g.n)?;
    Ok(assemble_hamiltonian(&grid, &cfg.potential.build())?)
}

fn spectrum(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let h = hamiltonian(cfg)?;
    let s = solve_spectrum(&h, cfg.spectrum_k())?;
    write_output(out, "spectrum.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["index", "E"])?;
        for (k, e) in s.values.iter().enumerate() {
            c.write_record([(k + 1).to_string(), fmt_f64(*e)])?;
        }
        c.flush()?;
        Ok(())
    })?;
    // Eigenfunctions scaled to unit quadrature norm.
    let scale = 1.0 / h.grid().spacing().sqrt();
    write_output(out, "eigenvectors.csv", |w| {
        let mut c = csv_writer(w);
        let mut header = vec!["x".to_owned()];
        header.extend((1..=s.len()).map(|k| format!("psi_{k}")));
        c.write_record(&header)?;
        for (i, x) in h.grid().points().iter().enumerate() {
            let mut row = vec![fmt_f64(*x)];
            row.extend(s.vectors.iter().map(|v| fmt_f64(v[i] * scale)));
            c.write_record(&row)?;
        }
        c.flush()?;
        Ok(())
    })?;
    let residual = s.residual(|v| h.apply(v)) / h.max_abs();
    Ok(Report {
        notes: vec![format!(
            "spectrum: {} levels of {} on {} points",
            s.len(),
            h.potential_label(),
            h.dim()
        )],
        checks: vec![
            Check::at_most("spectrum_residual", residual, 1e-10),
            Check::at_most("spectrum_orthonormality", s.orthonormality_error(), 1e-10),
        ],
    })
}

fn build_kernel(cfg: &RunConfig, h: &Hamiltonian) -> Result<Kernel, CliError> {
    let w = trapezoid_weights(h.grid());
    Ok(match cfg.kernel.origin {
        KernelOrigin::DiscreteInverse => kernel_from_inverse(h, &w)?,
        KernelOrigin::Analytic => {
            if cfg.potential.name != "zero" {
                return Err(CliError::Config(format!(
                    "kernel.origin = analytic requires potential.name = zero, got {}",
                    cfg.potential.name
                )));
            }
            kernel_analytic_free(h.grid(), &w)?
        }
    })
}

fn kernel(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let h = hamiltonian(cfg)?;
    let kernel = build_kernel(cfg, &h)?;
    let s = kernel_spectrum(&kernel, cfg.kernel_k())?;
    write_output(out, "kernel_spectrum.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["index", "mu"])?;
        for (k, mu) in s.values.iter().rev().enumerate() {
            c.write_record([(k + 1).to_string(), fmt_f64(*mu)])?;
        }
        c.flush()?;
        Ok(())
    })?;
    let mu_max = s.values.last().copied().unwrap_or(1.0);
    let residual = s.residual(|v| kernel.apply(v)) / mu_max;
    Ok(Report {
        notes: vec![format!(
            "kernel: origin {}, {} eigenvalues",
            kernel.origin(),
            s.len()
        )],
        checks: vec![Check::at_most("kernel_residual", residual, 1e-10)],
    })
}

fn reciprocity(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let h = hamiltonian(cfg)?;
    let kernel = build_kernel(cfg, &h)?;
    let report = certify_reciprocity(&h, &kernel, cfg.kernel_k())?;
    write_output(out, "reciprocity.csv", |w| report.write_csv(w))?;
    Ok(Report {
        notes: vec![format!(
            "reciprocity: origin {}, potential {}",
            kernel.origin(),
            h.potential_label()
        )],
        checks: vec![Check::at_most(
            "reciprocity",
            report.max_abs_deviation,
            cfg.kernel.tolerance,
        )],
    })
}

/// Normalized Gaussian `exp(-(x-c)²/2s²) e^{ikx}` on the grid.
pub fn gaussian_state(
    grid: &Grid1D,
    center: f64,
    width: f64,
    kick: f64,
) -> Result<StateVector, CliError> {
    let psi = grid
        .points()
        .iter()
        .map(|&x| Complex64::from_polar((-((x - center) / width).powi(2) / 2.0).exp(), kick * x))
        .collect();
    Ok(StateVector::normalized(grid, psi)?)
}

/// `count` evenly spaced times on `[0, t_end]`.
pub fn time_grid(t_end: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|k| t_end * k as f64 / (count - 1) as f64)
        .collect()
}

/// Ratio of the derivative-identity deviation at `dt` to that at `dt / 2`.
pub fn derivative_order_ratio(
    prop: &Propagator,
    o: &Observable,
    t: f64,
    dt: f64,
) -> Result<f64, CliError> {
    let coarse = heisenberg_derivative_deviation(prop, o, t, dt)?;
    let fine = heisenberg_derivative_deviation(prop, o, t, 0.5 * dt)?;
    Ok(coarse / fine)
}

fn pictures(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let h = hamiltonian(cfg)?;
    let grid = h.grid().clone();
    let (center, width) = cfg.wavepacket();
    let psi0 = gaussian_state(&grid, center, width, cfg.pictures.kick)?;
    let prop = Propagator::new(&h)?;
    let times = time_grid(cfg.pictures.t_end, cfg.pictures.times);
    let dt = cfg.pictures.dt.unwrap_or(0.01 / h.max_abs());
    let t_mid = 0.5 * cfg.pictures.t_end;

    let mut report = Report::default();
    report.notes.push(format!(
        "pictures: potential {}, {} points, {} times, derivative step {}",
        h.potential_label(),
        grid.len(),
        times.len(),
        fmt_f64(dt)
    ));
    for o in [
        Observable::position(&grid),
        Observable::momentum(&grid),
        Observable::energy(&h),
    ] {
        let cmp = compare_pictures(&prop, &o, &psi0, &times)?;
        write_output(out, &format!("pictures_{}.csv", o.label), |w| {
            cmp.write_csv(w)
        })?;
        report.checks.push(Check::at_most(
            format!("pictures_{}", o.label),
            cmp.max_deviation,
            cfg.pictures.tolerance,
        ));
        if o.label != "energy" {
            let ratio = derivative_order_ratio(&prop, &o, t_mid, dt)?;
            report.checks.push(Check::within(
                format!("heisenberg_order_{}", o.label),
                ratio,
                3.5,
                4.5,
            ));
        }
    }
    Ok(report)
}

fn geodesic(cfg: &RunConfig, out: &Path, allow_nonstatic: bool) -> Result<Report, CliError> {
    let m = &cfg.metric;
    let metric = m.build();
    let xi0 = [m.r0, 0.0, 0.0];
    let at_rest = m.v0 == [0.0; 3];
    let mut report = Report::default();
    report.notes.push(format!(
        "geodesic: M = {}, r0 = {}, r_min = {}, horizon {}, {} steps",
        m.mass,
        m.r0,
        metric.r_min(),
        m.horizon,
        m.steps
    ));

    let lanczos = integrate_lanczos(
        &metric,
        xi0,
        m.v0,
        m.horizon,
        m.steps,
        m.mass_tag,
        allow_nonstatic,
    )
    .map_err(|e| match e {
        lanczos_core::Error::NonStatic => CliError::Config(
            "metric.vx/vy/vz must be 0 for the static-condition law (use --allow-nonstatic)".into(),
        ),
        other => other.into(),
    })?;
    write_output(out, "trajectory_lanczos.csv", |w| lanczos.write_csv(w))?;

    // Proper-time geodesic with the same spatial start and velocity.
    let g = metric.tensor(&xi0)?;
    let spatial: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| g[i][j] * m.v0[i] * m.v0[j])
        .sum();
    let denom = -g[TIME][TIME] - spatial;
    if denom <= 0.0 {
        return Err(CliError::Config("initial velocity is not timelike".into()));
    }
    let ut = 1.0 / denom.sqrt();
    let u0 = [ut * m.v0[0], ut * m.v0[1], ut * m.v0[2], ut];
    let path = integrate_geodesic_path(&metric, xi0, u0, m.horizon / ut, m.steps)?;
    write_output(out, "trajectory_geodesic.csv", |w| {
        path.to_trajectory().write_csv(w)
    })?;
    report.checks.push(Check::at_most(
        "geodesic_energy_drift",
        path.energy_drift(&metric),
        1e-8,
    ));
    if path.first().angular_momentum() > 0.0 {
        report.checks.push(Check::at_most(
            "geodesic_angular_momentum_drift",
            path.angular_momentum_drift(),
            1e-8,
        ));
    }

    if at_rest {
        let cmp = compare_motion_laws(&metric, xi0, m.horizon, m.steps)?;
        write_output(out, "divergence.csv", |w| cmp.write_csv(w))?;
        for (th, at) in &cmp.first_exceedance {
            report.notes.push(match at {
                Some(x4) => format!("divergence exceeds {th:e} first at x4 = {}", fmt_f64(*x4)),
                None => format!(
                    "divergence stays below {th:e} up to x4 = {}",
                    fmt_f64(m.horizon)
                ),
            });
        }
        report.notes.push(
            "divergence after the rest instant is expected: the static law drops velocity terms"
                .into(),
        );
        report.checks.push(Check::at_most(
            "rest_instant_acceleration",
            cmp.initial_acceleration_difference,
            1e-10,
        ));
    } else {
        report
            .notes
            .push("nonstatic start: divergence report against the static law skipped".into());
    }
    Ok(report)
}

/// Analytic potential of a uniform ball of mass `m` and radius `r_ball`.
pub fn uniform_ball_phi(m: f64, r_ball: f64, r: f64) -> f64 {
    if r >= r_ball {
        -m / r
    } else {
        -m * (3.0 * r_ball * r_ball - r * r) / (2.0 * r_ball.powi(3))
    }
}

pub fn uniform_ball(m: f64, r_ball: f64) -> Result<RadialPotential, CliError> {
    let rho = 3.0 * m / (4.0 * PI * r_ball.powi(3));
    Ok(RadialPotential::new(
        move |r| if r <= r_ball { rho } else { 0.0 },
        r_ball,
    )?)
}

/// Uniform-ball checks shared by the `poisson` run and the battery.
pub fn poisson_checks(body: &RadialPotential, m: f64, samples: &[f64]) -> Vec<Check> {
    let r_ball = body.radius();
    let exterior = samples
        .iter()
        .filter(|&&r| r > r_ball)
        .map(|&r| rel_diff(body.phi(r), -m / r))
        .fold(0.0, f64::max);
    vec![
        Check::at_most("poisson_exterior", exterior, 1e-8),
        Check::at_most(
            "poisson_center",
            rel_diff(body.phi(0.0), -1.5 * m / r_ball),
            1e-8,
        ),
        Check::at_most(
            "poisson_phi_continuity",
            rel_diff(body.interior_phi(r_ball), body.exterior_phi(r_ball)),
            1e-8,
        ),
        Check::at_most(
            "poisson_dphi_continuity",
            rel_diff(body.interior_dphi_dr(r_ball), body.exterior_dphi_dr(r_ball)),
            1e-8,
        ),
    ]
}

fn poisson(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let p = &cfg.poisson;
    let body = uniform_ball(p.mass, p.radius)?;
    let samples: Vec<f64> = (0..p.samples)
        .map(|k| p.r_max * k as f64 / (p.samples - 1) as f64)
        .collect();
    write_output(out, "poisson.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["r", "phi", "dphi_dr", "phi_exact"])?;
        for &r in &samples {
            c.write_record([
                fmt_f64(r),
                fmt_f64(body.phi(r)),
                fmt_f64(body.dphi_dr(r)),
                fmt_f64(uniform_ball_phi(p.mass, p.radius, r)),
            ])?;
        }
        c.flush()?;
        Ok(())
    })?;
    Ok(Report {
        notes: vec![format!(
            "poisson: uniform ball M = {}, R = {}",
            p.mass, p.radius
        )],
        checks: poisson_checks(&body, p.mass, &samples),
    })
}
