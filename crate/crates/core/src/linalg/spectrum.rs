use num_complex::{Complex64, ComplexFloat};

/// Scalar type of an eigenvector entry: `f64` or `Complex64`.
pub trait EigenScalar: ComplexFloat<Real = f64> + std::iter::Sum + Send + Sync + 'static {
    /// Unit-modulus factor that rotates `self` onto the positive real axis.
    fn positive_phase(self) -> Self;
}

impl EigenScalar for f64 {
    fn positive_phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl EigenScalar for Complex64 {
    fn positive_phase(self) -> Self {
        self.conj() / self.norm()
    }
}

/// Components below this magnitude never fix an eigenvector's phase.
pub const PHASE_THRESHOLD: f64 = 1e-8;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors.
///
/// `vectors[k]` is the eigenvector for `values[k]`. The phase is fixed so
/// that its first component of magnitude above [`PHASE_THRESHOLD`] is real
/// and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T = f64> {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<T>>,
}

impl<T: EigenScalar> Spectrum<T> {
    /// Sorts ascending and applies the phase convention.
    pub(crate) fn normalized(values: Vec<f64>, vectors: Vec<Vec<T>>) -> Self {
        assert_eq!(values.len(), vectors.len());
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let values = order.iter().map(|&k| values[k]).collect();
        let mut vectors: Vec<Vec<T>> = order.iter().map(|&k| vectors[k].clone()).collect();
        for v in &mut vectors {
            fix_phase(v);
        }
        Self { values, vectors }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the `k` smallest eigenpairs.
    pub fn lowest(mut self, k: usize) -> Self {
        self.values.truncate(k);
        self.vectors.truncate(k);
        self
    }

    /// Keeps the `k` largest eigenpairs (still in ascending order).
    pub fn highest(mut self, k: usize) -> Self {
        let skip = self.values.len().saturating_sub(k);
        self.values.drain(..skip);
        self.vectors.drain(..skip);
        self
    }

    /// `max |<v_i, v_j> - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err = 0.0f64;
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate().skip(i) {
                let ip: T = vi.iter().zip(vj).map(|(&a, &b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((ip - T::from(target).unwrap()).abs());
            }
        }
        err
    }

    /// `max |A v_k - λ_k v_k|` where `apply` computes `A x`.
    pub fn residual<F: Fn(&[T]) -> Vec<T>>(&self, apply: F) -> f64 {
        let mut err = 0.0f64;
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let av = apply(v);
            for (&a, &x) in av.iter().zip(v) {
                err = err.max((a - x * T::from(lambda).unwrap()).abs());
            }
        }
        err
    }
}

pub(crate) fn fix_phase<T: EigenScalar>(v: &mut [T]) {
    if let Some(&lead) = v.iter().find(|x| x.abs() > PHASE_THRESHOLD) {
        let phase = lead.positive_phase();
        for x in v.iter_mut() {
            *x = *x * phase;
        }
    }
}
