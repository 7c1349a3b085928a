use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::telemetry::LocalPoint;

use super::kernel::{kernel_eval, KernelSpec};
use super::GpError;

/// Diagonal jitter tried in turn when the covariance is not numerically
/// positive definite.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-9, 1e-6, 1e-3];

/// Training inputs and scalar targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<LocalPoint>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<LocalPoint>, y: Vec<f64>) -> Result<Self, GpError> {
        if x.len() != y.len() {
            return Err(GpError::DimensionMismatch {
                inputs: x.len(),
                targets: y.len(),
            });
        }
        if x.is_empty() {
            return Err(GpError::EmptyDataset);
        }
        let finite =
            x.iter().all(|p| p.x.is_finite() && p.y.is_finite()) && y.iter().all(|v| v.is_finite());
        if !finite {
            return Err(GpError::NonFinite);
        }
        Ok(Dataset { x, y })
    }

    pub fn x(&self) -> &[LocalPoint] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Subset at the given indices, in that order.
    pub fn select(&self, idx: &[usize]) -> Result<Dataset, GpError> {
        Dataset::new(
            idx.iter().map(|&i| self.x[i]).collect(),
            idx.iter().map(|&i| self.y[i]).collect(),
        )
    }

    /// Same inputs with every target transformed.
    pub fn map_targets(&self, f: impl Fn(f64) -> f64) -> Dataset {
        Dataset {
            x: self.x.clone(),
            y: self.y.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Posterior mean and (latent) variance at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

/// A zero-mean GP conditioned on a dataset.
///
/// Holds the Cholesky factor `L` of `K(X, X) + σ_n² I` (plus any jitter that
/// was needed) and `alpha = (L Lᵀ)⁻¹ Y`.
#[derive(Debug, Clone)]
pub struct GpModel {
    data: Dataset,
    kernel: KernelSpec,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

/// Kernel matrix between two input sets.
pub fn gram(k: &KernelSpec, a: &[LocalPoint], b: &[LocalPoint]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| kernel_eval(k, &a[i], &b[j]))
}

/// `K(X, X) + σ_n² I`.
pub fn covariance(k: &KernelSpec, x: &[LocalPoint]) -> DMatrix<f64> {
    let n = x.len();
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel_eval(k, &x[i], &x[j]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
        cov[(i, i)] += k.noise;
    }
    cov
}

/// Conditions a GP with kernel `k` on `data`.
pub fn fit(data: &Dataset, k: &KernelSpec) -> Result<GpModel, GpError> {
    k.validate()?;
    let cov = covariance(k, data.x());
    for &jitter in &JITTER_LADDER {
        let mut m = cov.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(chol) = Cholesky::new(m) {
            if chol
                .l_dirty()
                .diagonal()
                .iter()
                .all(|d| d.is_finite() && *d > 0.0)
            {
                let alpha = chol.solve(&DVector::from_column_slice(data.y()));
                return Ok(GpModel {
                    data: data.clone(),
                    kernel: *k,
                    chol,
                    alpha,
                    jitter,
                });
            }
        }
    }
    Err(GpError::NotPositiveDefinite)
}

impl GpModel {
    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Lower-triangular factor of the training covariance.
    pub fn chol_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// Diagonal jitter that made the factorization succeed (0 if none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Posterior at `w`: mean `k*ᵀ alpha`, variance `k(w, w) - vᵀv` with
    /// `v = L⁻¹ k*`, clamped at zero.
    pub fn predict(&self, w: &LocalPoint) -> Prediction {
        let k_star = DVector::from_iterator(
            self.data.len(),
            self.data
                .x()
                .iter()
                .map(|xi| kernel_eval(&self.kernel, w, xi)),
        );
        let mean = k_star.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&k_star)
            .expect("cholesky factor has a positive diagonal");
        let variance = (kernel_eval(&self.kernel, w, w) - v.dot(&v)).max(0.0);
        Prediction { mean, variance }
    }

    /// `-½ Yᵀα - Σ log Lᵢᵢ - (n/2) log 2π`.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let y = DVector::from_column_slice(self.data.y());
        let log_det_half: f64 = self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        let n = self.data.len() as f64;
        -0.5 * y.dot(&self.alpha) - log_det_half - 0.5 * n * (2.0 * PI).ln()
    }
}

pub fn predict(m: &GpModel, w: &LocalPoint) -> Prediction {
    m.predict(w)
}

pub fn log_marginal_likelihood(m: &GpModel) -> f64 {
    m.log_marginal_likelihood()
}
