//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues and inverse iteration for the eigenvectors, plus Householder
//! reduction of a dense symmetric matrix to tridiagonal form.
//!
//! Used when only a few extremal eigenpairs of a large matrix are needed.

use super::matrix::{dot, SymmetricMatrix};
use super::spectrum::Spectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymmetricTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("tridiagonal matrix must be non-empty".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                left: diag.len() - 1,
                right: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn to_dense(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_upper(self.dim(), |i, j| {
            if i == j {
                self.diag[i]
            } else if j == i + 1 {
                self.off[i]
            } else {
                0.0
            }
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.off)
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        (lo - pad, hi + pad)
    }

    fn pivmin(&self) -> f64 {
        f64::MIN_POSITIVE * self.off.iter().fold(1.0f64, |m, e| m.max(e * e))
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of the
    /// `LDLᵀ` factorization of `T - x I`).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut d = self.diag[0] - x;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.off[i - 1];
            d = self.diag[i] - x - e * e / d;
            if d.abs() < pivmin {
                d = -pivmin;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th eigenvalue (0 = smallest), by bisection to full
    /// precision.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenpairs with the given indices (0 = smallest). Vectors come from
    /// inverse iteration and are re-orthogonalized within clusters.
    pub fn eigenpairs(&self, indices: &[usize]) -> Spectrum {
        let norm = self.max_abs().max(f64::MIN_POSITIVE);
        let cluster = 1e-3 * norm;
        let values: Vec<f64> = indices.iter().map(|&k| self.eigenvalue(k)).collect();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &lambda) in values.iter().enumerate() {
            let neighbours: Vec<usize> = (0..j)
                .filter(|&i| (values[i] - lambda).abs() <= cluster)
                .collect();
            let v = self.inverse_iteration(lambda, j, &neighbours, &vectors, norm);
            vectors.push(v);
        }
        Spectrum::normalized(values, vectors)
    }

    pub fn lowest(&self, k: usize) -> Spectrum {
        let k = k.min(self.dim());
        self.eigenpairs(&(0..k).collect::<Vec<_>>())
    }

    pub fn highest(&self, k: usize) -> Spectrum {
        let n = self.dim();
        let k = k.min(n);
        self.eigenpairs(&((n - k)..n).collect::<Vec<_>>())
    }

    fn inverse_iteration(
        &self,
        lambda: f64,
        seed: usize,
        neighbours: &[usize],
        previous: &[Vec<f64>],
        norm: f64,
    ) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let lu = ShiftedLu::new(self, lambda, norm);
        let mut x: Vec<f64> = (0..n).map(|i| start_entry(i, seed)).collect();
        normalize(&mut x);
        for _ in 0..5 {
            lu.solve(&mut x);
            for &i in neighbours {
                let proj = dot(&x, &previous[i]);
                for (a, b) in x.iter_mut().zip(&previous[i]) {
                    *a -= proj * b;
                }
            }
            normalize(&mut x);
        }
        x
    }
}

fn start_entry(i: usize, seed: usize) -> f64 {
    // Deterministic, non-symmetric start vector.
    let mut z = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 31;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 29;
    0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
}

fn normalize(x: &mut [f64]) {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
}

/// `T - λ I = P L U` with partial pivoting (two superdiagonals in `U`).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(t: &SymmetricTridiagonal, lambda: f64, norm: f64) -> Self {
        let n = t.dim();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - lambda).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let floor = f64::EPSILON * norm;
        for p in d.iter_mut() {
            if p.abs() < floor {
                *p = if *p < 0.0 { -floor } else { floor };
            }
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
        // Rescale to avoid overflow when λ is an eigenvalue to full precision.
        let big = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if big > 0.0 && big.is_finite() {
            for x in b.iter_mut() {
                *x /= big;
            }
        }
    }
}

/// Orthogonal reduction `A = Q T Qᵀ` of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct HouseholderReduction {
    pub tridiagonal: SymmetricTridiagonal,
    /// Unit Householder vectors; reflector `k` acts on components `k + 1..`.
    reflectors: Vec<Vec<f64>>,
}

impl HouseholderReduction {
    pub fn new(a: &SymmetricMatrix) -> Result<Self> {
        let n = a.dim();
        if n == 0 {
            return Err(Error::Domain("cannot reduce an empty matrix".into()));
        }
        let mut m = a.as_slice().to_vec();
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        for k in 0..n.saturating_sub(2) {
            let x: Vec<f64> = m[k * n + k + 1..(k + 1) * n].to_vec();
            let norm = dot(&x, &x).sqrt();
            diag[k] = m[k * n + k];
            if norm == 0.0 {
                off[k] = 0.0;
                reflectors.push(vec![0.0; x.len()]);
                continue;
            }
            let alpha = if x[0] >= 0.0 { -norm } else { norm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = dot(&v, &v).sqrt();
            for e in v.iter_mut() {
                *e /= vnorm;
            }
            off[k] = alpha;

            // Trailing block B <- H B H = B - 2 (v qᵀ + q vᵀ), q = Bv - (vᵀBv) v.
            let s = k + 1;
            let len = n - s;
            let p: Vec<f64> = (0..len)
                .map(|i| dot(&m[(s + i) * n + s..(s + i + 1) * n], &v))
                .collect();
            let kappa = dot(&v, &p);
            let q: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
            for i in 0..len {
                let row = &mut m[(s + i) * n + s..(s + i + 1) * n];
                let (vi, qi) = (v[i], q[i]);
                for ((r, vj), qj) in row.iter_mut().zip(&v).zip(&q) {
                    *r -= 2.0 * (vi * qj + qi * vj);
                }
            }
            reflectors.push(v);
        }
        if n >= 2 {
            diag[n - 2] = m[(n - 2) * n + n - 2];
            off[n - 2] = m[(n - 2) * n + n - 1];
        }
        diag[n - 1] = m[n * n - 1];
        Ok(Self {
            tridiagonal: SymmetricTridiagonal::new(diag, off)?,
            reflectors,
        })
    }

    /// `x <- Q x`.
    pub fn apply_q(&self, x: &mut [f64]) {
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut x[k + 1..];
            let proj = 2.0 * dot(tail, v);
            if proj != 0.0 {
                for (t, vi) in tail.iter_mut().zip(v) {
                    *t -= proj * vi;
                }
            }
        }
    }

    /// Eigenpairs of the original matrix for the given tridiagonal indices.
    pub fn eigenpairs(&self, indices: &[usize]) -> Spectrum {
        let tri = self.tridiagonal.eigenpairs(indices);
        let mut vectors = tri.vectors;
        for v in vectors.iter_mut() {
            self.apply_q(v);
        }
        Spectrum::normalized(tri.values, vectors)
    }
}

/// Which end of the spectrum to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Lowest,
    Highest,
}

/// The `k` lowest or highest eigenpairs of a dense symmetric matrix via
/// Householder reduction and bisection.
pub fn extremal_eigen(a: &SymmetricMatrix, k: usize, which: Extremal) -> Result<Spectrum> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "requested {k} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let red = HouseholderReduction::new(a)?;
    let indices: Vec<usize> = match which {
        Extremal::Lowest => (0..k).collect(),
        Extremal::Highest => ((n - k)..n).collect(),
    };
    Ok(red.eigenpairs(&indices))
}
