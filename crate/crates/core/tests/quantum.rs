//! Cross-module checks of the differential, integral and matrix formulations.

use std::f64::consts::PI;

use lanczos_core::grid::{make_grid, trapezoid_weights};
use lanczos_core::kernel::{
    certify_against_energies, certify_reciprocity, free_particle_energies, kernel_analytic_free,
    kernel_from_inverse, kernel_spectrum,
};
use lanczos_core::pictures::{verify_picture_equivalence, Observable, StateVector};
use lanczos_core::schrodinger::{assemble_hamiltonian, solve_spectrum, Potential};
use num_complex::Complex64;

#[test]
fn square_well_levels_at_2000_points() {
    let g = make_grid(0.0, 1.0, 2000).unwrap();
    let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
    let s = solve_spectrum(&h, 5).unwrap();
    for (m, e) in s.values.iter().enumerate() {
        let exact = ((m + 1) as f64 * PI).powi(2);
        assert!((e - exact).abs() / exact < 1e-3, "E{} = {e}", m + 1);
    }
}

#[test]
fn oscillator_levels_at_2000_points() {
    let g = make_grid(-10.0, 10.0, 2000).unwrap();
    let h = assemble_hamiltonian(&g, &Potential::harmonic()).unwrap();
    let s = solve_spectrum(&h, 3).unwrap();
    for (e, exact) in s.values.iter().zip([1.0, 3.0, 5.0]) {
        assert!((e - exact).abs() / exact < 1e-3);
    }
}

#[test]
fn quartic_reciprocity_and_shared_eigenfunctions() {
    let g = make_grid(-3.0, 3.0, 150).unwrap();
    let h = assemble_hamiltonian(&g, &Potential::quartic()).unwrap();
    let w = trapezoid_weights(&g);
    let k = kernel_from_inverse(&h, &w).unwrap();
    let report = certify_reciprocity(&h, &k, 8).unwrap();
    assert!(report.max_abs_deviation < 1e-9);

    // Same eigenfunctions: kernel vectors are quadrature-normalized, the
    // Hamiltonian's are Euclidean-normalized, so they differ by √h.
    let e = solve_spectrum(&h, 3).unwrap();
    let mu = kernel_spectrum(&k, 3).unwrap();
    let sqrt_h = g.spacing().sqrt();
    for i in 0..3 {
        let from_kernel = &mu.vectors[2 - i];
        for (a, b) in e.vectors[i].iter().zip(from_kernel) {
            assert!((a - b * sqrt_h).abs() < 1e-6);
        }
    }
}

#[test]
fn analytic_kernel_converges_at_second_order() {
    let dev = |n| {
        let g = make_grid(0.0, 1.0, n).unwrap();
        let k = kernel_analytic_free(&g, &trapezoid_weights(&g)).unwrap();
        certify_against_energies(&k, &free_particle_energies(1.0, 4))
            .unwrap()
            .max_abs_deviation
    };
    // Spacings 1/50, 1/100, 1/200.
    let (a, b, c) = (dev(49), dev(99), dev(199));
    for ratio in [a / b, b / c] {
        assert!((3.9..=4.1).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn energy_is_conserved_in_both_pictures() {
    let g = make_grid(0.0, 1.0, 80).unwrap();
    let h = assemble_hamiltonian(&g, &Potential::well_bump(50.0, 0.5, 0.1)).unwrap();
    let psi: Vec<Complex64> = g
        .points()
        .iter()
        .map(|&x| Complex64::from_polar((-((x - 0.3) / 0.07).powi(2)).exp(), 15.0 * x))
        .collect();
    let psi0 = StateVector::normalized(&g, psi).unwrap();
    let times: Vec<f64> = (0..10).map(|k| 0.05 * k as f64).collect();
    let cmp = verify_picture_equivalence(&h, &Observable::energy(&h), &psi0, &times).unwrap();
    assert!(cmp.max_deviation < 1e-8);
    let e0 = cmp.samples[0].schrodinger;
    for s in &cmp.samples {
        assert!((s.schrodinger - e0).abs() / e0 < 1e-10);
        assert!((s.heisenberg - e0).abs() / e0 < 1e-10);
    }
}

#[test]
fn free_packet_moves_at_group_velocity() {
    // Wide box, short time: <x>(t) = x0 + 2 k t for -d²/dx² (group velocity 2k).
    let g = make_grid(-20.0, 20.0, 300).unwrap();
    let h = assemble_hamiltonian(&g, &Potential::zero()).unwrap();
    let k0 = 1.0;
    let psi: Vec<Complex64> = g
        .points()
        .iter()
        .map(|&x| Complex64::from_polar((-(x / 2.0).powi(2) / 2.0).exp(), k0 * x))
        .collect();
    let psi0 = StateVector::normalized(&g, psi).unwrap();
    let times = [0.0, 0.5, 1.0, 1.5];
    let cmp = verify_picture_equivalence(&h, &Observable::position(&g), &psi0, &times).unwrap();
    assert!(cmp.max_deviation < 1e-8);
    for s in &cmp.samples {
        // Lattice dispersion slows the packet slightly.
        assert!(
            (s.schrodinger - 2.0 * k0 * s.t).abs() < 0.02,
            "t={} x={}",
            s.t,
            s.schrodinger
        );
    }
}
