//! The verification battery run by `verify-all`. Each criterion writes its
//! tables into the output directory and returns its certificates; parameters
//! are fixed so that repeated runs are byte-identical.

use std::path::Path;

use lanczos_core::grid::{make_grid, trapezoid_weights};
use lanczos_core::kernel::{
    certify_against_energies, certify_reciprocity, free_particle_energies, kernel_analytic_free,
    kernel_from_inverse,
};
use lanczos_core::output::{csv_writer, fmt_f64};
use lanczos_core::pictures::{compare_pictures, Observable, Propagator};
use lanczos_core::relativity::{
    circular_orbit_velocity, integrate_geodesic_path, integrate_lanczos, lanczos_static_rhs,
    proper_time_coordinate_acceleration, rest_four_velocity, GeodesicPath, Schwarzschild,
    StaticMetric, Trajectory, TIME,
};
use lanczos_core::schrodinger::{assemble_hamiltonian, solve_spectrum, Potential};

use crate::run::{
    derivative_order_ratio, gaussian_state, poisson_checks, rel_diff, time_grid, uniform_ball,
    write_output, Report,
};
use crate::{Check, CliError};

pub const CRITERIA: [(u8, &str); 8] = [
    (1, "discrete reciprocity"),
    (2, "continuum reciprocity convergence"),
    (3, "spectral accuracy"),
    (4, "picture equivalence"),
    (5, "rest-instant motion law"),
    (6, "mass independence"),
    (7, "geodesic integrator quality"),
    (8, "Poisson/Laplace matching"),
];

pub fn run_criterion(id: u8, out: &Path) -> Result<Report, CliError> {
    match id {
        1 => discrete_reciprocity(out),
        2 => continuum_reciprocity(out),
        3 => spectral_accuracy(out),
        4 => picture_equivalence(out),
        5 => rest_instant(out),
        6 => mass_independence(out),
        7 => geodesic_quality(out),
        8 => poisson_matching(out),
        _ => Err(CliError::Config(format!("no criterion {id}"))),
    }
}

/// Every criterion in order.
pub fn run_all(out: &Path) -> Result<Vec<(u8, &'static str, Report)>, CliError> {
    CRITERIA
        .iter()
        .map(|&(id, title)| Ok((id, title, run_criterion(id, out)?)))
        .collect()
}

/// Battery potentials: label, interval, potential.
pub fn battery_potentials() -> [(&'static str, f64, f64, Potential); 3] {
    [
        ("zero", 0.0, 1.0, Potential::zero()),
        ("harmonic", -10.0, 10.0, Potential::harmonic()),
        ("well-bump", 0.0, 1.0, Potential::well_bump(50.0, 0.5, 0.1)),
    ]
}

/// Discrete-inverse reciprocity for one potential on 400 points, lowest 10
/// pairs.
pub fn reciprocity_case(
    label: &str,
    a: f64,
    b: f64,
    v: &Potential,
    out: &Path,
) -> Result<Check, CliError> {
    let grid = make_grid(a, b, 400)?;
    let h = assemble_hamiltonian(&grid, v)?;
    let kernel = kernel_from_inverse(&h, &trapezoid_weights(&grid))?;
    let rec = certify_reciprocity(&h, &kernel, 10)?;
    write_output(out, &format!("reciprocity_{label}.csv"), |w| {
        rec.write_csv(w)
    })?;
    Ok(Check::at_most(
        format!("reciprocity_{label}"),
        rec.max_abs_deviation,
        1e-8,
    ))
}

fn discrete_reciprocity(out: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    for (label, a, b, v) in battery_potentials() {
        report.checks.push(reciprocity_case(label, a, b, &v, out)?);
    }
    Ok(report)
}

/// Analytic free kernel against the exact levels `(mπ)²` on `(0, 1)`.
pub fn continuum_deviation(n: usize, k: usize) -> Result<f64, CliError> {
    let grid = make_grid(0.0, 1.0, n)?;
    let kernel = kernel_analytic_free(&grid, &trapezoid_weights(&grid))?;
    Ok(certify_against_energies(&kernel, &free_particle_energies(1.0, k))?.max_abs_deviation)
}

fn continuum_reciprocity(out: &Path) -> Result<Report, CliError> {
    let sizes = [250, 500, 1000];
    let mut devs = Vec::new();
    for n in sizes {
        devs.push(continuum_deviation(n, 10)?);
    }
    write_output(out, "continuum_reciprocity.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["n", "max_abs_dev"])?;
        for (n, d) in sizes.iter().zip(&devs) {
            c.write_record([n.to_string(), fmt_f64(*d)])?;
        }
        c.flush()?;
        Ok(())
    })?;

    // Against the discrete operator the analytic kernel is its exact inverse.
    let grid = make_grid(0.0, 1.0, 250)?;
    let h = assemble_hamiltonian(&grid, &Potential::zero())?;
    let discrete = certify_reciprocity(
        &h,
        &kernel_analytic_free(&grid, &trapezoid_weights(&grid))?,
        10,
    )?;

    let mut report = Report::default();
    for (i, n) in sizes.iter().enumerate() {
        report.notes.push(format!(
            "analytic kernel n = {n}: max |E_k mu_k - 1| = {:e} vs (k pi)^2",
            devs[i]
        ));
    }
    report.checks.push(Check::within(
        "continuum_order_250_500",
        devs[0] / devs[1],
        3.5,
        4.5,
    ));
    report.checks.push(Check::within(
        "continuum_order_500_1000",
        devs[1] / devs[2],
        3.5,
        4.5,
    ));
    report.checks.push(Check::at_most(
        "analytic_kernel_vs_discrete_operator",
        discrete.max_abs_deviation,
        1e-8,
    ));
    Ok(report)
}

fn spectral_accuracy(out: &Path) -> Result<Report, CliError> {
    let cases: [(&str, f64, f64, Potential, Vec<f64>); 2] = [
        (
            "square_well",
            0.0,
            1.0,
            Potential::zero(),
            free_particle_energies(1.0, 5),
        ),
        (
            "harmonic",
            -10.0,
            10.0,
            Potential::harmonic(),
            vec![1.0, 3.0, 5.0],
        ),
    ];
    let mut report = Report::default();
    for (label, a, b, v, exact) in cases {
        let grid = make_grid(a, b, 2000)?;
        let h = assemble_hamiltonian(&grid, &v)?;
        let s = solve_spectrum(&h, exact.len())?;
        write_output(out, &format!("spectrum_{label}.csv"), |w| {
            let mut c = csv_writer(w);
            c.write_record(["index", "E", "E_exact", "rel_err"])?;
            for (k, (e, x)) in s.values.iter().zip(&exact).enumerate() {
                c.write_record([
                    (k + 1).to_string(),
                    fmt_f64(*e),
                    fmt_f64(*x),
                    fmt_f64(rel_diff(*e, *x)),
                ])?;
            }
            c.flush()?;
            Ok(())
        })?;
        let worst = s
            .values
            .iter()
            .zip(&exact)
            .map(|(e, x)| rel_diff(*e, *x))
            .fold(0.0, f64::max);
        report
            .checks
            .push(Check::at_most(format!("levels_{label}"), worst, 1e-3));
    }
    Ok(report)
}

fn picture_equivalence(out: &Path) -> Result<Report, CliError> {
    let mut report = Report::default();
    let mut worst = 0.0f64;
    for (label, a, b, v) in battery_potentials() {
        let grid = make_grid(a, b, 100)?;
        let h = assemble_hamiltonian(&grid, &v)?;
        let prop = Propagator::new(&h)?;
        // Displaced ground state for the oscillator, a moving packet in the box.
        let (psi0, t_end) = if label == "harmonic" {
            (gaussian_state(&grid, 1.5, 1.0, 0.0)?, std::f64::consts::PI)
        } else {
            (gaussian_state(&grid, 0.4, 0.05, 20.0)?, 0.5)
        };
        let times = time_grid(t_end, 20);
        let dt = 0.01 / h.max_abs();
        for o in [
            Observable::position(&grid),
            Observable::momentum(&grid),
            Observable::energy(&h),
        ] {
            let cmp = compare_pictures(&prop, &o, &psi0, &times)?;
            write_output(out, &format!("pictures_{label}_{}.csv", o.label), |w| {
                cmp.write_csv(w)
            })?;
            worst = worst.max(cmp.max_deviation);
            if o.label != "energy" {
                let ratio = derivative_order_ratio(&prop, &o, 0.5 * t_end, dt)?;
                report.checks.push(Check::within(
                    format!("heisenberg_order_{label}_{}", o.label),
                    ratio,
                    3.5,
                    4.5,
                ));
            }
        }
    }
    report
        .checks
        .insert(0, Check::at_most("picture_equivalence", worst, 1e-8));
    Ok(report)
}

fn rest_instant(out: &Path) -> Result<Report, CliError> {
    let metric = Schwarzschild::new(1.0)?;
    let mut report = Report::default();
    let mut rows = Vec::new();
    for r0 in [5.0, 10.0, 100.0] {
        let xi = [r0, 0.0, 0.0];
        let stat = lanczos_static_rhs(&metric, &xi)?;
        let geo =
            proper_time_coordinate_acceleration(&metric, &xi, &rest_four_velocity(&metric, &xi)?)?;
        let diff = (0..3).map(|i| (stat[i] - geo[i]).abs()).fold(0.0, f64::max);
        rows.push((r0, stat[0], geo[0]));
        report
            .checks
            .push(Check::at_most(format!("rest_instant_r{r0}"), diff, 1e-10));
    }
    let r = 1e4;
    let a = lanczos_static_rhs(&metric, &[r, 0.0, 0.0])?;
    let newton = metric.mass() / (r * r);
    report.checks.push(Check::at_most(
        "newtonian_limit_r1e4",
        rel_diff(a[0].abs(), newton),
        3.0 * metric.mass() / r,
    ));
    write_output(out, "rest_instant.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["r0", "static_acc", "geodesic_acc"])?;
        for (r0, s, g) in &rows {
            c.write_record([fmt_f64(*r0), fmt_f64(*s), fmt_f64(*g)])?;
        }
        c.flush()?;
        Ok(())
    })?;
    Ok(report)
}

/// CSV text with the trailing `mass_tag` column removed.
pub fn strip_mass_tag(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

fn trajectory_csv(t: &Trajectory) -> Result<String, CliError> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

fn mass_independence(out: &Path) -> Result<Report, CliError> {
    let metric = Schwarzschild::new(1.0)?;
    let run = |tag| integrate_lanczos(&metric, [10.0, 1.0, -2.0], [0.0; 3], 20.0, 2000, tag, false);
    let light = run(1.0)?;
    let heavy = run(1e6)?;
    let (a, b) = (trajectory_csv(&light)?, trajectory_csv(&heavy)?);
    write_output(out, "trajectory_mass_1.csv", |w| {
        Ok(std::io::Write::write_all(w, a.as_bytes())?)
    })?;
    write_output(out, "trajectory_mass_1e6.csv", |w| {
        Ok(std::io::Write::write_all(w, b.as_bytes())?)
    })?;

    let sample_diff = light
        .samples
        .iter()
        .zip(&heavy.samples)
        .flat_map(|(p, q)| {
            let d: Vec<f64> = (0..3)
                .flat_map(|i| {
                    [
                        (p.xi[i] - q.xi[i]).abs(),
                        (p.dxi_dx4[i] - q.dxi_dx4[i]).abs(),
                    ]
                })
                .chain([(p.x4 - q.x4).abs()])
                .collect();
            d
        })
        .fold(0.0, f64::max);
    let (sa, sb) = (strip_mass_tag(&a), strip_mass_tag(&b));
    let differing_bytes =
        sa.bytes().zip(sb.bytes()).filter(|(x, y)| x != y).count() + sa.len().abs_diff(sb.len());
    Ok(Report {
        notes: vec!["trajectory CSVs compared with the mass_tag metadata column removed".into()],
        checks: vec![
            Check::at_most("mass_independence_samples", sample_diff, 0.0),
            Check::at_most("mass_independence_csv_bytes", differing_bytes as f64, 0.0),
        ],
    })
}

/// Bound, mildly eccentric orbit used for the conservation and order checks.
pub fn eccentric_orbit(
    metric: &Schwarzschild,
    tau_end: f64,
    steps: usize,
) -> Result<GeodesicPath, CliError> {
    let xi0 = [20.0, 0.0, 0.0];
    let vy = 0.21;
    let g = metric.tensor(&xi0)?;
    let ut = ((1.0 + g[1][1] * vy * vy) / -g[TIME][TIME]).sqrt();
    Ok(integrate_geodesic_path(
        metric,
        xi0,
        [0.0, vy, 0.0, ut],
        tau_end,
        steps,
    )?)
}

/// Error ratio at `steps` and `2 steps` against a run with `16 steps`.
pub fn rk4_error_ratio(metric: &Schwarzschild, steps: usize) -> Result<f64, CliError> {
    let end = |s| -> Result<[f64; 4], CliError> {
        Ok(eccentric_orbit(metric, 300.0, s)?.last().position)
    };
    let reference = end(16 * steps)?;
    let err = |p: [f64; 4]| ((0..3).map(|i| (p[i] - reference[i]).powi(2)).sum::<f64>()).sqrt();
    Ok(err(end(steps)?) / err(end(2 * steps)?))
}

fn geodesic_quality(out: &Path) -> Result<Report, CliError> {
    let metric = Schwarzschild::new(1.0)?;
    let r = 10.0;
    let u = circular_orbit_velocity(&metric, r)?;
    let period = 2.0 * std::f64::consts::PI * (r.powi(3) / metric.mass()).sqrt();
    let circle = integrate_geodesic_path(&metric, [r, 0.0, 0.0], u, period / u[TIME], 10_000)?;
    write_output(out, "circular_orbit.csv", |w| {
        circle.to_trajectory().write_csv(w)
    })?;
    let ecc = eccentric_orbit(&metric, 300.0, 10_000)?;
    let ratio = rk4_error_ratio(&metric, 200)?;

    Ok(Report {
        notes: vec![],
        checks: vec![
            Check::at_most("circular_radius_drift", circle.radius_drift(), 1e-6),
            Check::at_most("circular_energy_drift", circle.energy_drift(&metric), 1e-8),
            Check::at_most(
                "circular_angular_momentum_drift",
                circle.angular_momentum_drift(),
                1e-8,
            ),
            Check::at_most("eccentric_energy_drift", ecc.energy_drift(&metric), 1e-8),
            Check::at_most(
                "eccentric_angular_momentum_drift",
                ecc.angular_momentum_drift(),
                1e-8,
            ),
            Check::within("rk4_error_ratio", ratio, 14.0, 18.0),
        ],
    })
}

fn poisson_matching(out: &Path) -> Result<Report, CliError> {
    let (m, r_ball) = (1.0, 1.0);
    let body = uniform_ball(m, r_ball)?;
    let samples: Vec<f64> = (0..=60).map(|k| 0.05 * k as f64).collect();
    write_output(out, "poisson_uniform_ball.csv", |w| {
        let mut c = csv_writer(w);
        c.write_record(["r", "phi", "dphi_dr"])?;
        for &r in &samples {
            c.write_record([fmt_f64(r), fmt_f64(body.phi(r)), fmt_f64(body.dphi_dr(r))])?;
        }
        c.flush()?;
        Ok(())
    })?;
    Ok(Report {
        notes: vec![],
        checks: poisson_checks(&body, m, &samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_last_column() {
        let text = "x4,x,mass_tag\n0,1,2.5\n1,2,2.5\n";
        assert_eq!(strip_mass_tag(text), "x4,x\n0,1\n1,2");
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(9, Path::new(".")).is_err());
    }
}
