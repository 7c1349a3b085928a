//! Gaussian Process regression: kernels, exact inference via Cholesky
//! factorization, log marginal likelihood and hyperparameter search.

pub mod fields;
pub mod kernel;
pub mod model;
pub mod optimize;
pub mod persist;

use thiserror::Error;

pub use fields::{
    fit_scalar_field, fit_scalar_field_with, fit_vector_field, fit_vector_field_with, FitOptions,
    ScalarFieldModel, VectorFieldModel, VectorPrediction,
};
pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use model::{fit, log_marginal_likelihood, predict, Dataset, GpModel, Prediction};
pub use optimize::{lml_of, optimize_hyperparams};
pub use persist::ModelFile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("{inputs} inputs but {targets} targets")]
    DimensionMismatch { inputs: usize, targets: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset contains non-finite values")]
    NonFinite,
    #[error("invalid kernel hyperparameters: {0:?}")]
    InvalidKernel(KernelSpec),
    #[error("unknown kernel {0:?}")]
    UnknownKernel(String),
    #[error("covariance is not positive definite even with maximum jitter")]
    NotPositiveDefinite,
    #[error("optimizer budget must be at least one evaluation")]
    InvalidBudget,
    #[error("model file: {0}")]
    ModelFormat(String),
}
