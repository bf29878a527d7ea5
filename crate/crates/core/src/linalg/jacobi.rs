//! Cyclic Jacobi diagonalization for dense real-symmetric and complex
//! Hermitian matrices.
//!
//! Rotations are applied in row-cyclic order `(0,1), (0,2), ..., (n-2,n-1)`,
//! so results are deterministic. Each rotation updates two contiguous rows
//! and mirrors them into the matching columns.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianMatrix, SymmetricMatrix};
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a real symmetric matrix. Iterates until the
/// off-diagonal Frobenius norm is at most `tol · ‖A‖_F`.
pub fn jacobi_eigen(a: &SymmetricMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "Jacobi tolerance must be positive, got {tol}"
        )));
    }
    let n = a.dim();
    let mut m = a.as_slice().to_vec();
    // Row k of `vt` is column k of the eigenvector matrix.
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let target = tol * a.frobenius();

    let mut sweeps = 0;
    loop {
        let off = off_norm_real(&m, n);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate_real(&mut m, &mut vt, n, p, q);
            }
        }
    }

    let values = (0..n).map(|i| m[i * n + i]).collect();
    let vectors = vt.chunks(n.max(1)).take(n).map(<[f64]>::to_vec).collect();
    Ok(Spectrum::normalized(values, vectors))
}

fn off_norm_real(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j] * m[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn rotate_real(m: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    // Negligible against both diagonal entries: zero it without rotating.
    if app.abs() + 1e3 * apq.abs() == app.abs() && aqq.abs() + 1e3 * apq.abs() == aqq.abs() {
        m[p * n + q] = 0.0;
        m[q * n + p] = 0.0;
        return;
    }
    let (c, s, t) = rotation(app, aqq, apq);
    let tau = s / (1.0 + c);

    let (head, tail) = m.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let g = row_p[k];
        let h = row_q[k];
        row_p[k] = g - s * (h + g * tau);
        row_q[k] = h + s * (g - h * tau);
    }
    row_p[p] = app - t * apq;
    row_q[q] = aqq + t * apq;
    row_p[q] = 0.0;
    row_q[p] = 0.0;
    for k in 0..n {
        if k != p && k != q {
            m[k * n + p] = m[p * n + k];
            m[k * n + q] = m[q * n + k];
        }
    }

    let (head, tail) = vt.split_at_mut(q * n);
    let vp = &mut head[p * n..(p + 1) * n];
    let vq = &mut tail[..n];
    for (g, h) in vp.iter_mut().zip(vq.iter_mut()) {
        let (x, y) = (*g, *h);
        *g = x - s * (y + x * tau);
        *h = y + s * (x - y * tau);
    }
}

/// Jacobi rotation `(c, s, t)` annihilating `a_pq` in the block
/// `[[app, apq], [apq, aqq]]`.
fn rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, t)
}

/// Eigen-decomposition of a Hermitian matrix by complex Jacobi rotations.
/// Each rotation first removes the phase of `a_pq`, then applies the real
/// rotation.
pub fn hermitian_eigen(a: &HermitianMatrix, tol: f64) -> Result<Spectrum<Complex64>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "Jacobi tolerance must be positive, got {tol}"
        )));
    }
    let n = a.dim();
    let mut m: Vec<Complex64> = a.as_matrix().as_slice().to_vec();
    let zero = Complex64::new(0.0, 0.0);
    let mut vt = vec![zero; n * n];
    for i in 0..n {
        vt[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let target = tol * m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut sweeps = 0;
    loop {
        let off = off_norm_complex(&m, n);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate_complex(&mut m, &mut vt, n, p, q);
            }
        }
    }

    let values = (0..n).map(|i| m[i * n + i].re).collect();
    let vectors = vt
        .chunks(n.max(1))
        .take(n)
        .map(<[Complex64]>::to_vec)
        .collect();
    Ok(Spectrum::normalized(values, vectors))
}

fn off_norm_complex(m: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate_complex(m: &mut [Complex64], vt: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    if app.abs() + 1e3 * r == app.abs() && aqq.abs() + 1e3 * r == aqq.abs() {
        m[p * n + q] = Complex64::new(0.0, 0.0);
        m[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    // U = diag(1, e^{-iφ}) · R with a_pq = r e^{iφ}.
    let phase = apq / r;
    let (c, s, t) = rotation(app, aqq, r);

    let (head, tail) = m.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let g = row_p[k];
        let h = row_q[k] * phase;
        row_p[k] = g * c - h * s;
        row_q[k] = g * s + h * c;
    }
    row_p[p] = Complex64::new(app - t * r, 0.0);
    row_q[q] = Complex64::new(aqq + t * r, 0.0);
    row_p[q] = Complex64::new(0.0, 0.0);
    row_q[p] = Complex64::new(0.0, 0.0);
    for k in 0..n {
        if k != p && k != q {
            m[k * n + p] = m[p * n + k].conj();
            m[k * n + q] = m[q * n + k].conj();
        }
    }

    let back = phase.conj();
    let (head, tail) = vt.split_at_mut(q * n);
    let vp = &mut head[p * n..(p + 1) * n];
    let vq = &mut tail[..n];
    for (g, h) in vp.iter_mut().zip(vq.iter_mut()) {
        let x = *g;
        let y = *h * back;
        *g = x * c - y * s;
        *h = x * s + y * c;
    }
}

/// Convenience wrapper for Hermitian input given as a general matrix.
pub fn hermitian_eigen_of(m: &ComplexMatrix, tol: f64) -> Result<Spectrum<Complex64>> {
    hermitian_eigen(&HermitianMatrix::new(m.clone())?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn lcg_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut state = seed;
        SymmetricMatrix::from_upper(n, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    fn reconstruct(s: &Spectrum, n: usize) -> SymmetricMatrix {
        SymmetricMatrix::from_upper(n, |i, j| {
            s.values
                .iter()
                .zip(&s.vectors)
                .map(|(l, v)| l * v[i] * v[j])
                .sum()
        })
    }

    #[test]
    fn identity_and_diagonal() {
        let s = jacobi_eigen(&SymmetricMatrix::identity(3), DEFAULT_TOL).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0, 1.0]);
        let s = jacobi_eigen(&SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0]), DEFAULT_TOL).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.vectors[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let a = SymmetricMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let s = jacobi_eigen(&a, DEFAULT_TOL).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-14);
        assert!((s.values[1] - 3.0).abs() < 1e-14);
        // First large component positive.
        let v0 = &s.vectors[0];
        assert!((v0[0] - FRAC_1_SQRT_2).abs() < 1e-14 && (v0[1] + FRAC_1_SQRT_2).abs() < 1e-14);
        let v1 = &s.vectors[1];
        assert!((v1[0] - FRAC_1_SQRT_2).abs() < 1e-14 && (v1[1] - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn zero_and_empty_matrices() {
        let s = jacobi_eigen(&SymmetricMatrix::diagonal(&[0.0, 0.0]), DEFAULT_TOL).unwrap();
        assert_eq!(s.values, vec![0.0, 0.0]);
        let s = jacobi_eigen(&SymmetricMatrix::identity(0), DEFAULT_TOL).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn bad_tolerance() {
        assert!(jacobi_eigen(&SymmetricMatrix::identity(2), 0.0).is_err());
        assert!(jacobi_eigen(&SymmetricMatrix::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let a = SymmetricMatrix::from_upper(3, |i, j| if i == j { 0.0 } else { f64::NAN });
        assert!(matches!(
            jacobi_eigen(&a, DEFAULT_TOL),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn random_200_reconstructs() {
        let n = 200;
        let a = lcg_symmetric(n, 7);
        let s = jacobi_eigen(&a, DEFAULT_TOL).unwrap();
        let scale = a.max_abs();
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(s.orthonormality_error() <= 1e-10);
        assert!(s.residual(|x| a.mul_vec(x)) <= 1e-9 * scale.max(1.0));
        let back = reconstruct(&s, n);
        let err = back
            .as_slice()
            .iter()
            .zip(a.as_slice())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(err <= 1e-9 * scale, "reconstruction error {err}");
        let trace: f64 = s.values.iter().sum();
        assert!((trace - a.trace()).abs() <= 1e-9 * scale * n as f64);
    }

    #[test]
    fn pauli_y() {
        let i = Complex64::i();
        let m = ComplexMatrix::from_row_major(2, vec![0.0.into(), -i, i, 0.0.into()]).unwrap();
        let s = hermitian_eigen_of(&m, DEFAULT_TOL).unwrap();
        assert!((s.values[0] + 1.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
        assert!(s.orthonormality_error() < 1e-14);
        // Leading component real and positive.
        assert!(s.vectors[0][0].im.abs() < 1e-15 && s.vectors[0][0].re > 0.0);
    }

    #[test]
    fn hermitian_trivial_cases() {
        let s = hermitian_eigen(&HermitianMatrix::identity(2), DEFAULT_TOL).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        let s = hermitian_eigen(&HermitianMatrix::diagonal(&[5.0, -5.0]), DEFAULT_TOL).unwrap();
        assert_eq!(s.values, vec![-5.0, 5.0]);
    }

    #[test]
    fn random_hermitian_residual() {
        let n = 40;
        let mut state = 99u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut raw = ComplexMatrix::zeros(n);
        for i in 0..n {
            raw.set(i, i, Complex64::new(next(), 0.0));
            for j in (i + 1)..n {
                let z = Complex64::new(next(), next());
                raw.set(i, j, z);
                raw.set(j, i, z.conj());
            }
        }
        let h = HermitianMatrix::new(raw).unwrap();
        let s = hermitian_eigen(&h, DEFAULT_TOL).unwrap();
        assert!(s.orthonormality_error() <= 1e-10);
        assert!(s.residual(|x| h.as_matrix().mul_vec(x)) <= 1e-9);
        let trace: f64 = (0..n).map(|i| h[(i, i)].re).sum();
        assert!((s.values.iter().sum::<f64>() - trace).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reconstruction_and_trace(n in 1usize..24, seed in any::<u64>()) {
            let a = lcg_symmetric(n, seed);
            let s = jacobi_eigen(&a, DEFAULT_TOL).unwrap();
            let scale = a.max_abs().max(1e-300);
            let back = reconstruct(&s, n);
            for (x, y) in back.as_slice().iter().zip(a.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-9 * scale);
            }
            prop_assert!(s.orthonormality_error() <= 1e-10);
            prop_assert!((s.values.iter().sum::<f64>() - a.trace()).abs() <= 1e-9 * scale * n as f64);
        }
    }
}
